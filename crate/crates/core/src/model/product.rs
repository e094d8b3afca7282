//! Synchronized product moves.
//!
//! A move is fired by delaying, then taking every participant edge at once.
//! Invariants are folded into the move's clock guard: every process's
//! source invariant, plus target invariants on clocks the move does not
//! reset. Upper-bound invariants that hold when the move fires held during
//! the whole delay, so no other invariant handling is needed.

use std::fmt;

use super::{DiscreteState, IntUpdate, Network, Sync};
use crate::dbm::{ClockAtom, Dbm};

/// Participating `(process, edge)` pairs; the initiating edge comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Label {
    pub moves: Vec<(usize, usize)>,
}

impl Label {
    /// `P.a->b` for each participant, joined by ` | `.
    pub fn describe(&self, net: &Network) -> String {
        self.moves
            .iter()
            .map(|&(p, e)| {
                let proc_ = &net.processes[p];
                let edge = &proc_.edges[e];
                format!(
                    "{}.{}->{}",
                    proc_.name,
                    proc_.locations[edge.source].name,
                    proc_.locations[edge.target].name
                )
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moves.iter().map(|(p, e)| format!("{p}:{e}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// A discretely enabled move with its effective clock guard and resets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub label: Label,
    pub target: DiscreteState,
    pub guard: Vec<ClockAtom>,
    /// Sorted, without duplicates.
    pub resets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Successor {
    pub label: Label,
    pub state: DiscreteState,
    /// Canonical; may be empty.
    pub zone: Dbm,
}

/// Integer-enabled edges of process `p` leaving its current location.
fn enabled<'a>(
    net: &'a Network,
    s: &'a DiscreteState,
    p: usize,
) -> impl Iterator<Item = usize> + 'a {
    let proc_ = &net.processes[p];
    proc_
        .edges
        .iter()
        .enumerate()
        .filter(move |(_, e)| e.source == s.locations[p] && e.int_enabled(&s.ints))
        .map(|(i, _)| i)
}

fn receivers(net: &Network, s: &DiscreteState, p: usize, chan: usize) -> Vec<usize> {
    enabled(net, s, p)
        .filter(|&i| net.processes[p].edges[i].sync == Some(Sync::Receive(chan)))
        .collect()
}

/// Builds the move, or `None` when an update leaves its variable's range.
fn combine(net: &Network, s: &DiscreteState, moves: Vec<(usize, usize)>) -> Option<Transition> {
    let mut target = s.clone();
    let mut guard = Vec::new();
    let mut resets = Vec::new();
    for &(p, e) in &moves {
        let edge = &net.processes[p].edges[e];
        target.locations[p] = edge.target;
        guard.extend_from_slice(&edge.clock_guard);
        resets.extend_from_slice(&edge.resets);
        for u in &edge.updates {
            let (var, value) = match *u {
                IntUpdate::Set { var, value } => (var, value),
                IntUpdate::Add { var, delta } => (var, target.ints[var].checked_add(delta)?),
            };
            let decl = &net.ints[var];
            if value < decl.lo || value > decl.hi {
                return None;
            }
            target.ints[var] = value;
        }
    }
    resets.sort_unstable();
    resets.dedup();
    guard.extend(net.invariant_of(s));
    // An invariant atom on a reset clock is checked at 0: it only matters
    // when it fails there, and then it must empty the successor.
    guard.extend(
        net.invariant_of(&target).into_iter().filter(|a| {
            resets.binary_search(&a.clock).is_err() || !a.relation.holds(0, a.constant)
        }),
    );
    Some(Transition {
        label: Label { moves },
        target,
        guard,
        resets,
    })
}

/// Every discretely enabled move from `s`, ordered by initiating process,
/// then edge, then partner.
pub fn transitions(net: &Network, s: &DiscreteState) -> Vec<Transition> {
    let mut out = Vec::new();
    for p in 0..net.processes.len() {
        for e in enabled(net, s, p) {
            match net.processes[p].edges[e].sync {
                None => out.extend(combine(net, s, vec![(p, e)])),
                Some(Sync::Receive(_)) => {}
                Some(Sync::Send(c)) if net.channels[c].broadcast => {
                    let groups: Vec<(usize, Vec<usize>)> = (0..net.processes.len())
                        .filter(|&q| q != p)
                        .map(|q| (q, receivers(net, s, q, c)))
                        .filter(|(_, r)| !r.is_empty())
                        .collect();
                    // One receiving edge per participating process, odometer order.
                    let mut pick = vec![0usize; groups.len()];
                    'product: loop {
                        let mut moves = vec![(p, e)];
                        moves.extend(groups.iter().zip(&pick).map(|((q, r), &i)| (*q, r[i])));
                        out.extend(combine(net, s, moves));
                        for k in (0..groups.len()).rev() {
                            pick[k] += 1;
                            if pick[k] < groups[k].1.len() {
                                continue 'product;
                            }
                            pick[k] = 0;
                        }
                        break;
                    }
                }
                Some(Sync::Send(c)) => {
                    for q in (0..net.processes.len()).filter(|&q| q != p) {
                        for f in receivers(net, s, q, c) {
                            out.extend(combine(net, s, vec![(p, e), (q, f)]));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Zone successors of `(s, z)` in [`transitions`] order, empty ones included.
pub fn product_successors(s: &DiscreteState, z: &Dbm, net: &Network) -> Vec<Successor> {
    transitions(net, s)
        .into_iter()
        .map(|t| Successor {
            zone: z.zone_successor(&t.guard, &t.resets),
            label: t.label,
            state: t.target,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn net(text: &str) -> Network {
        parse_model(text).unwrap()
    }

    #[test]
    fn handshake_without_partner_is_absent() {
        let n = net("system s\nchan a\nprocess P\nlocation l initial\nedge l -> l sync: a!\nprocess Q\nlocation m initial\n");
        assert!(transitions(&n, &n.initial_state()).is_empty());
    }

    #[test]
    fn handshake_pairs_in_partner_order() {
        let n = net(
            "system s\nchan a\nprocess P\nlocation l initial\nlocation k\nedge l -> k sync: a!\n\
             process Q\nlocation m initial\nlocation r\nedge m -> r sync: a?\nedge m -> m sync: a?\n",
        );
        let ts = transitions(&n, &n.initial_state());
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].label.moves, vec![(0, 0), (1, 0)]);
        assert_eq!(ts[0].target.locations, vec![1, 1]);
        assert_eq!(ts[1].label.moves, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn broadcast_without_receivers_moves_sender() {
        let n = net("system s\nchan b broadcast\nprocess P\nlocation l initial\nlocation k\nedge l -> k sync: b!\nprocess Q\nlocation m initial\n");
        let ts = transitions(&n, &n.initial_state());
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].label.moves, vec![(0, 0)]);
    }

    #[test]
    fn broadcast_takes_product_of_receivers() {
        let n = net(
            "system s\nchan b broadcast\nprocess P\nlocation l initial\nedge l -> l sync: b!\n\
             process Q\nlocation m initial\nedge m -> m sync: b?\nedge m -> m sync: b?\n\
             process R\nlocation r initial\nedge r -> r sync: b?\nedge r -> r sync: b?\n",
        );
        let ts = transitions(&n, &n.initial_state());
        let moves: Vec<_> = ts.iter().map(|t| t.label.moves.clone()).collect();
        assert_eq!(
            moves,
            vec![
                vec![(0, 0), (1, 0), (2, 0)],
                vec![(0, 0), (1, 0), (2, 1)],
                vec![(0, 0), (1, 1), (2, 0)],
                vec![(0, 0), (1, 1), (2, 1)],
            ]
        );
    }

    #[test]
    fn out_of_range_update_disables_move() {
        let n = net("system s\nint v 0 1 1\nprocess P\nlocation l initial\nedge l -> l do: v := v + 1\nedge l -> l do: v := v - 1\n");
        let ts = transitions(&n, &n.initial_state());
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].target.ints, vec![0]);
    }

    #[test]
    fn invariants_fold_into_guard() {
        let n = net(
            "system s\nclock x\nclock y\nprocess P\nlocation a initial invariant: x <= 3\n\
             location b invariant: x <= 2 && y <= 1\nedge a -> b do: y := 0\n",
        );
        let ts = transitions(&n, &n.initial_state());
        let g = &ts[0].guard;
        assert!(g.contains(&ClockAtom::new(1, crate::dbm::Relation::Le, 3)));
        assert!(g.contains(&ClockAtom::new(1, crate::dbm::Relation::Le, 2)));
        assert!(!g.iter().any(|a| a.clock == 2));
    }
}
