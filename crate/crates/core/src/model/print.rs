use std::fmt::{self, Write};

use super::{IntAtom, IntUpdate, Network, StateAtom, Sync};
use crate::dbm::ClockAtom;

fn clock_atom(net: &Network, a: &ClockAtom) -> String {
    format!(
        "{} {} {}",
        net.clock_name(a.clock),
        a.relation.symbol(),
        a.constant
    )
}

fn int_atom(net: &Network, a: &IntAtom) -> String {
    format!(
        "{} {} {}",
        net.ints[a.var].name,
        a.relation.symbol(),
        a.constant
    )
}

/// Emits the text format; the output parses back to an equal network.
pub(super) fn write_network(net: &Network, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    writeln!(f, "system {}", net.name)?;
    for c in &net.clocks {
        writeln!(f, "clock {c}")?;
    }
    for v in &net.ints {
        writeln!(f, "int {} {} {} {}", v.name, v.lo, v.hi, v.init)?;
    }
    for c in &net.channels {
        writeln!(
            f,
            "chan {}{}",
            c.name,
            if c.broadcast { " broadcast" } else { "" }
        )?;
    }
    for p in &net.processes {
        writeln!(f, "process {}", p.name)?;
        for (i, l) in p.locations.iter().enumerate() {
            let mut line = format!("location {}", l.name);
            if i == p.initial {
                line.push_str(" initial");
            }
            if l.accepting {
                line.push_str(" accepting");
            }
            if !l.invariant.is_empty() {
                let atoms: Vec<String> = l.invariant.iter().map(|a| clock_atom(net, a)).collect();
                write!(line, " invariant: {}", atoms.join(" && "))?;
            }
            writeln!(f, "{line}")?;
        }
        for e in &p.edges {
            let mut line = format!(
                "edge {} -> {}",
                p.locations[e.source].name, p.locations[e.target].name
            );
            let mut guard: Vec<String> = e.clock_guard.iter().map(|a| clock_atom(net, a)).collect();
            guard.extend(e.int_guard.iter().map(|a| int_atom(net, a)));
            if !guard.is_empty() {
                write!(line, " guard: {}", guard.join(" && "))?;
            }
            match e.sync {
                Some(Sync::Send(c)) => write!(line, " sync: {}!", net.channels[c].name)?,
                Some(Sync::Receive(c)) => write!(line, " sync: {}?", net.channels[c].name)?,
                None => {}
            }
            let mut assigns: Vec<String> = e
                .resets
                .iter()
                .map(|&x| format!("{} := 0", net.clock_name(x)))
                .collect();
            for u in &e.updates {
                assigns.push(match *u {
                    IntUpdate::Set { var, value } => format!("{} := {}", net.ints[var].name, value),
                    IntUpdate::Add { var, delta } => {
                        let name = &net.ints[var].name;
                        if delta < 0 {
                            format!("{name} := {name} - {}", -delta)
                        } else {
                            format!("{name} := {name} + {delta}")
                        }
                    }
                });
            }
            if !assigns.is_empty() {
                write!(line, " do: {}", assigns.join(", "))?;
            }
            writeln!(f, "{line}")?;
        }
    }
    if let Some(q) = &net.query {
        let disjuncts: Vec<String> = q
            .disjuncts
            .iter()
            .map(|conj| {
                let atoms: Vec<String> = conj
                    .iter()
                    .map(|a| match a {
                        StateAtom::At { process, location } => {
                            let p = &net.processes[*process];
                            format!("{}.{}", p.name, p.locations[*location].name)
                        }
                        StateAtom::Int(a) => int_atom(net, a),
                    })
                    .collect();
                atoms.join(" && ")
            })
            .collect();
        writeln!(f, "query reachable: {}", disjuncts.join(" || "))?;
    }
    Ok(())
}
