//! Benchmark families and small hand-made automata, emitted in the text
//! format and parsed back, so every generated network is also a valid file.

use std::fmt::Write;

use thiserror::Error;

use super::{parse_model, Network};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unknown family `{0}` (expected fischer, fischer-buggy, csma, fddi, paper-a1, paper-a2, paper-a3, fig1)")]
    UnknownFamily(String),
    #[error("{family} needs n >= {min}, got {n}")]
    SizeOutOfRange {
        family: &'static str,
        n: usize,
        min: usize,
    },
}

/// Names accepted by [`generate`].
pub const FAMILIES: [&str; 8] = [
    "fischer",
    "fischer-buggy",
    "csma",
    "fddi",
    "paper-a1",
    "paper-a2",
    "paper-a3",
    "fig1",
];

/// Dispatches on a family name. The fixed-size families ignore `n`.
pub fn generate(family: &str, n: usize) -> Result<Network, GenError> {
    match family {
        "fischer" => fischer(n),
        "fischer-buggy" => fischer_buggy(n),
        "csma" => csma(n),
        "fddi" => fddi(n),
        "paper-a1" => Ok(paper_a1()),
        "paper-a2" => Ok(paper_a2()),
        "paper-a3" => Ok(paper_a3()),
        "fig1" => Ok(fig1()),
        other => Err(GenError::UnknownFamily(other.to_string())),
    }
}

fn build(text: &str) -> Network {
    parse_model(text).unwrap_or_else(|e| panic!("generated model does not parse: {e}\n{text}"))
}

fn need(family: &'static str, n: usize, min: usize) -> Result<(), GenError> {
    if n < min {
        Err(GenError::SizeOutOfRange { family, n, min })
    } else {
        Ok(())
    }
}

/// `P1.a && P2.b || ...` over all unordered pairs of distinct processes.
fn pairs_query(names: &[String], locs: &[&str]) -> String {
    let mut disjuncts = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            for a in locs {
                for b in locs {
                    disjuncts.push(format!("{}.{a} && {}.{b}", names[i], names[j]));
                }
            }
        }
    }
    disjuncts.join(" || ")
}

/// Fischer's protocol: a process waits more than 2 time units after
/// writing `id`, and writes within 1 unit of reading it free.
pub fn fischer(n: usize) -> Result<Network, GenError> {
    need("fischer", n, 2)?;
    Ok(build(&fischer_text(n, 2, "fischer")))
}

/// Fischer with the wait lowered to `> 0`, which breaks mutual exclusion.
pub fn fischer_buggy(n: usize) -> Result<Network, GenError> {
    need("fischer-buggy", n, 2)?;
    Ok(build(&fischer_text(n, 0, "fischer_buggy")))
}

fn fischer_text(n: usize, wait: i64, name: &str) -> String {
    let mut s = format!("system {name}{n}\n");
    for i in 1..=n {
        writeln!(s, "clock x{i}").unwrap();
    }
    writeln!(s, "int id 0 {n} 0").unwrap();
    let mut names = Vec::new();
    for i in 1..=n {
        names.push(format!("P{i}"));
        write!(
            s,
            "process P{i}
location A initial
location req invariant: x{i} <= 1
location wait
location cs
edge A -> req guard: id == 0 do: x{i} := 0
edge req -> wait guard: x{i} <= 1 do: x{i} := 0, id := {i}
edge wait -> cs guard: x{i} > {wait} && id == {i}
edge wait -> req guard: id == 0 do: x{i} := 0
edge cs -> A do: id := 0
"
        )
        .unwrap();
    }
    writeln!(s, "query reachable: {}", pairs_query(&names, &["cs"])).unwrap();
    s
}

/// CSMA/CD: stations share a bus with propagation delay 26 and frame
/// length 808; collisions are announced on a broadcast channel. The query
/// asks for two stations transmitting while the bus is merely active.
pub fn csma(n: usize) -> Result<Network, GenError> {
    need("csma", n, 2)?;
    let mut s = format!("system csma{n}\n");
    for i in 1..=n {
        writeln!(s, "clock x{i}").unwrap();
    }
    s.push_str(
        "clock y
chan begin
chan end
chan busy
chan cd broadcast
process Bus
location Idle initial
location Active
location Collision invariant: y < 26
edge Idle -> Active sync: begin? do: y := 0
edge Active -> Idle sync: end? do: y := 0
edge Active -> Active guard: y >= 26 sync: busy!
edge Active -> Collision guard: y < 26 sync: begin? do: y := 0
edge Collision -> Idle sync: cd! do: y := 0
",
    );
    for i in 1..=n {
        write!(
            s,
            "process P{i}
location Wait initial
location Start invariant: x{i} <= 808
location Retry invariant: x{i} <= 52
edge Wait -> Start sync: begin! do: x{i} := 0
edge Wait -> Retry sync: busy? do: x{i} := 0
edge Wait -> Wait sync: cd? do: x{i} := 0
edge Start -> Wait guard: x{i} == 808 sync: end! do: x{i} := 0
edge Start -> Retry guard: x{i} < 52 sync: cd? do: x{i} := 0
edge Retry -> Start guard: x{i} < 52 sync: begin! do: x{i} := 0
edge Retry -> Retry sync: busy? do: x{i} := 0
edge Retry -> Retry sync: cd? do: x{i} := 0
"
        )
        .unwrap();
    }
    s.push_str("query reachable: P1.Start && P2.Start && Bus.Active\n");
    Ok(build(&s))
}

/// FDDI token ring: each station has a synchronous-transmission timer `t`
/// and two token-rotation timers `a`, `b` used in alternate rounds; the
/// ring has one clock. That is `3n + 1` clocks, DBM order `3n + 2`. The
/// query asks for two stations holding the token at once.
pub fn fddi(n: usize) -> Result<Network, GenError> {
    need("fddi", n, 3)?;
    let ttrt = 50 * n;
    let sa = 20;
    let mut s = format!("system fddi{n}\n");
    for i in 1..=n {
        writeln!(s, "clock t{i}\nclock a{i}\nclock b{i}").unwrap();
    }
    s.push_str("clock z\n");
    for i in 1..=n {
        writeln!(s, "chan tt{i}\nchan rt{i}").unwrap();
    }
    s.push_str("process Ring\n");
    for i in 1..=n {
        let init = if i == 1 { " initial" } else { "" };
        writeln!(s, "location to{i}{init} invariant: z <= 0\nlocation at{i}").unwrap();
    }
    for i in 1..=n {
        let next = i % n + 1;
        writeln!(
            s,
            "edge to{i} -> at{i} sync: tt{i}!\nedge at{i} -> to{next} sync: rt{i}? do: z := 0"
        )
        .unwrap();
    }
    let mut names = Vec::new();
    for i in 1..=n {
        names.push(format!("S{i}"));
        write!(
            s,
            "process S{i}
location idleA initial
location syncA invariant: t{i} <= {sa}
location asyncA invariant: a{i} <= {ttrt}
location idleB
location syncB invariant: t{i} <= {sa}
location asyncB invariant: b{i} <= {ttrt}
edge idleA -> syncA sync: tt{i}? do: t{i} := 0, b{i} := 0
edge syncA -> idleB guard: t{i} == {sa} && a{i} >= {ttrt} sync: rt{i}!
edge syncA -> asyncA guard: t{i} == {sa} && a{i} < {ttrt}
edge asyncA -> idleB sync: rt{i}!
edge idleB -> syncB sync: tt{i}? do: t{i} := 0, a{i} := 0
edge syncB -> idleA guard: t{i} == {sa} && b{i} >= {ttrt} sync: rt{i}!
edge syncB -> asyncB guard: t{i} == {sa} && b{i} < {ttrt}
edge asyncB -> idleA sync: rt{i}!
"
        )
        .unwrap();
    }
    writeln!(
        s,
        "query reachable: {}",
        pairs_query(&names, &["syncA", "asyncA", "syncB", "asyncB"])
    )
    .unwrap();
    Ok(build(&s))
}

/// A large guard sits on an edge whose synchronization has no partner, so
/// it can never fire; a static analysis still counts its constant.
pub fn paper_a1() -> Network {
    build(
        "system paper_a1
clock x
clock y
chan a
process A
location q0 initial
location q1
location q2
edge q0 -> q0 guard: x == 1 do: x := 0
edge q0 -> q1 guard: y >= 10000 sync: a!
edge q0 -> q2 guard: y <= 10
query reachable: A.q1
",
    )
}

/// The large guard follows an edge that the invariant of `q0` disables.
pub fn paper_a2() -> Network {
    build(
        "system paper_a2
clock x
clock y
process A
location q0 initial invariant: x <= 5
location q1
location q2
edge q0 -> q0 guard: x == 5 do: x := 0
edge q0 -> q1 guard: x > 5 && y >= 20
edge q1 -> q2 guard: y >= 10000
query reachable: A.q2
",
    )
}

/// The large guard is conjoined with an integer test that never holds.
pub fn paper_a3() -> Network {
    build(
        "system paper_a3
clock x
clock y
int n 0 10 0
process A
location q0 initial
location q1
location q2
edge q0 -> q0 guard: x == 1 do: x := 0
edge q0 -> q2 guard: y >= 10000 && n == 10
edge q0 -> q1 guard: y <= 10
edge q1 -> q2 guard: n == 10
query reachable: A.q2
",
    )
}

const FIG1_BODY: &str = "clock x
clock y
process A
location q0 initial
location q1
location q2
";

const FIG1_EDGES: &str = "edge q0 -> q1 guard: x <= 5
edge q1 -> q2
edge q2 -> q3 guard: x <= 14 do: y := 0
edge q2 -> q1 guard: y >= 5 do: x := 0
edge q0 -> q3 guard: y >= 1000000
";

/// The two-clock automaton whose `q1`/`q2` loop needs a small bound on `y`
/// at `q2` although `y` is compared with `10⁶` elsewhere; target `q3`.
pub fn fig1() -> Network {
    build(&format!(
        "system fig1\n{FIG1_BODY}location q3 accepting\n{FIG1_EDGES}query reachable: A.q3\n"
    ))
}

/// [`fig1`] without a target, for exploring the whole zone graph.
pub fn fig1_unmarked() -> Network {
    build(&format!(
        "system fig1_unmarked\n{FIG1_BODY}location q3\n{FIG1_EDGES}"
    ))
}
