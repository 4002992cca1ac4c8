//! Games, devices, states and protocols of the built-in examples.

use crate::classical::{CorrelatingDevice, StrategyDevice};
use crate::distribution::Distribution;
use crate::error::Result;
use crate::games::{ExtensiveFormGame, NodeSpec, NormalFormGame, PlayerId, PureStrategy};
use crate::linalg::{r, tensor_product, Matrix};
use crate::quantum::{ExtensiveProtocol, Gate, PlayerCircuit, QuantumState};

fn two_by_two(tr: [f64; 2], bl: [f64; 2], tl: [f64; 2], br: [f64; 2]) -> NormalFormGame {
    NormalFormGame::from_labels(&[&["T", "B"], &["L", "R"]], &[&tl, &tr, &bl, &br]).expect("static game")
}

/// TR pays (1, 5), BL pays (5, 1), the diagonal pays nothing.
pub fn fig1_game() -> NormalFormGame {
    two_by_two([1.0, 5.0], [5.0, 1.0], [0.0, 0.0], [0.0, 0.0])
}

/// TR and BL pay 6 to both players, the diagonal pays nothing.
pub fn fig2_game() -> NormalFormGame {
    two_by_two([6.0, 6.0], [6.0, 6.0], [0.0, 0.0], [0.0, 0.0])
}

/// TR pays (7, 10), BL pays (10, 7), the diagonal pays nothing.
pub fn fig4_game() -> NormalFormGame {
    two_by_two([7.0, 10.0], [10.0, 7.0], [0.0, 0.0], [0.0, 0.0])
}

/// `(|01⟩+|10⟩)/√2`, one qubit each.
pub fn fig1_state() -> QuantumState {
    QuantumState::normalized_real(&[0.0, 1.0, 1.0, 0.0], vec![0, 1]).expect("static state")
}

/// `(|01⟩+|10⟩+|11⟩)/√3`, one qubit each.
pub fn naive_state() -> QuantumState {
    QuantumState::normalized_real(&[0.0, 1.0, 1.0, 1.0], vec![0, 1]).expect("static state")
}

/// Four-qubit state (two per player) giving ⅓(TR+BL+BR) under which the
/// row player cannot gain but the column player can.
pub fn appd1_state() -> QuantumState {
    let (s6, s12) = (1.0 / 6f64.sqrt(), 1.0 / 12f64.sqrt());
    let mut amps = [0.0; 16];
    for (idx, v) in [
        (0b0010, s6),
        (0b0011, -s6),
        (0b1000, s6),
        (0b1100, s6),
        (0b1010, s12),
        (0b1011, s12),
        (0b1110, s12),
        (0b1111, s12),
    ] {
        amps[idx] = v;
    }
    QuantumState::new(amps.iter().map(|&a| r(a)).collect(), vec![0, 0, 1, 1]).expect("static state")
}

/// Row player applies H to their qubit before measuring.
pub fn hadamard_circuits() -> Vec<PlayerCircuit> {
    vec![
        PlayerCircuit::measure(0, &[0], &["T", "B"]).with_gate(Gate::H, &[0]),
        PlayerCircuit::measure(1, &[0], &["L", "R"]),
    ]
}

/// ⅓(TR+BL+BR).
pub fn third_device() -> CorrelatingDevice {
    Distribution::uniform([vec![0, 1], vec![1, 0], vec![1, 1]]).expect("static device")
}

/// Player 0 picks OUT (3 each) or IN; player 1 then picks a or b, and
/// player 0 picks L or R without seeing it.
pub fn fig3_game() -> ExtensiveFormGame {
    let mut specs = in_branch(2);
    specs.insert(0, NodeSpec::decision("root", 0, "p1_start", &[("OUT", "out"), ("IN", "in")]));
    specs.push(NodeSpec::leaf("out", &[3.0, 3.0]));
    ExtensiveFormGame::new(2, specs, "root").expect("static game")
}

/// The IN subtree, padded with zero payoffs up to `players`.
fn in_branch(players: usize) -> Vec<NodeSpec> {
    let pay = |a: f64, b: f64| {
        let mut v = vec![0.0; players];
        v[0] = a;
        v[1] = b;
        v
    };
    vec![
        NodeSpec::decision("in", 1, "p2", &[("a", "a"), ("b", "b")]),
        NodeSpec::decision("a", 0, "p1_move", &[("L", "al"), ("R", "ar")]),
        NodeSpec::decision("b", 0, "p1_move", &[("L", "bl"), ("R", "br")]),
        NodeSpec::leaf("al", &pay(100.0, 2.0)),
        NodeSpec::leaf("ar", &pay(0.0, 0.0)),
        NodeSpec::leaf("bl", &pay(0.0, 0.0)),
        NodeSpec::leaf("br", &pay(2.0, 100.0)),
    ]
}

fn strategy(g: &ExtensiveFormGame, owner: PlayerId, pairs: &[(&str, &str)]) -> PureStrategy {
    PureStrategy::from_choices(g, owner, pairs).expect("static strategy")
}

/// ½(IN·L, a) + ½(IN·R, b).
pub fn fig3_device(g: &ExtensiveFormGame) -> StrategyDevice {
    let s = |o, pairs: &[(&str, &str)]| strategy(g, o, pairs);
    Distribution::new([
        (vec![s(0, &[("p1_start", "IN"), ("p1_move", "L")]), s(1, &[("p2", "a")])], 0.5),
        (vec![s(0, &[("p1_start", "IN"), ("p1_move", "R")]), s(1, &[("p2", "b")])], 0.5),
    ])
    .expect("static device")
}

pub fn bell_state(owners: [PlayerId; 2]) -> QuantumState {
    QuantumState::normalized_real(&[1.0, 0.0, 0.0, 1.0], owners.to_vec()).expect("static state")
}

/// Players 0 and 1 share a Bell pair; player 0 plays IN, and both later
/// measure their qubit and play the matching move.
pub fn fig3_protocol(g: &ExtensiveFormGame) -> Result<ExtensiveProtocol> {
    ExtensiveProtocol::from_named(g, bell_state([0, 1]), fig3_circuits(), vec![])
}

fn fig3_circuits() -> Vec<(&'static str, PlayerCircuit)> {
    vec![
        ("p1_start", PlayerCircuit::constant(0, "IN")),
        ("p2", PlayerCircuit::measure(1, &[0], &["a", "b"])),
        ("p1_move", PlayerCircuit::measure(0, &[0], &["L", "R"])),
    ]
}

/// Inputs Nate may choose, as `abc` bit strings.
pub const GHZ_INPUTS: [&str; 4] = ["000", "011", "101", "110"];

const TRIO: [&str; 3] = ["alice", "bob", "charlie"];

/// `½(|000⟩ − |011⟩ − |101⟩ − |110⟩)`, one qubit for each of `owners`.
pub fn ghz_state(owners: [PlayerId; 3]) -> QuantumState {
    QuantumState::normalized_real(&[1.0, 0.0, 0.0, -1.0, 0.0, -1.0, -1.0, 0.0], owners.to_vec()).expect("static state")
}

/// Win condition: output parity equals the OR of the inputs.
pub fn ghz_wins(input: [u8; 3], output: [u8; 3]) -> bool {
    (output[0] ^ output[1] ^ output[2]) == (input[0] | input[1] | input[2])
}

pub fn input_bits(input: &str) -> [u8; 3] {
    let b = input.as_bytes();
    [b[0] - b'0', b[1] - b'0', b[2] - b'0']
}

/// Nate's decision node `root` followed by the three sequential movers.
/// Each mover's information set only records their own input bit.
fn ghz_subtree(root: &str, nate: PlayerId, trio: [PlayerId; 3], payoff: impl Fn(bool) -> Vec<f64>) -> Vec<NodeSpec> {
    let mut specs = Vec::new();
    let edges: Vec<(String, String)> = GHZ_INPUTS.iter().map(|i| (i.to_string(), format!("{root}.{i}"))).collect();
    let edge_refs: Vec<(&str, &str)> = edges.iter().map(|(a, c)| (a.as_str(), c.as_str())).collect();
    specs.push(NodeSpec::decision(root, nate, "nate", &edge_refs));
    for input in GHZ_INPUTS {
        let bits = input_bits(input);
        let mut frontier = vec![(format!("{root}.{input}"), Vec::<u8>::new())];
        for k in 0..3 {
            let mut next = Vec::new();
            for (name, outs) in frontier {
                let infoset = format!("{}_{}", TRIO[k], bits[k]);
                let kids: Vec<(String, String)> = (0..2u8).map(|x| (x.to_string(), format!("{name}{x}"))).collect();
                let refs: Vec<(&str, &str)> = kids.iter().map(|(a, c)| (a.as_str(), c.as_str())).collect();
                specs.push(NodeSpec::decision(&name, trio[k], &infoset, &refs));
                for (x, (_, child)) in kids.into_iter().enumerate() {
                    let mut o = outs.clone();
                    o.push(x as u8);
                    next.push((child, o));
                }
            }
            frontier = next;
        }
        for (name, outs) in frontier {
            let win = ghz_wins(bits, [outs[0], outs[1], outs[2]]);
            specs.push(NodeSpec::leaf(&name, &payoff(win)));
        }
    }
    specs
}

/// Nate (player 0) picks the inputs; Alice, Bob and Charlie (players 1-3)
/// get 1 on a win and Nate gets 1 minus Alice's payoff.
pub fn cghz_game() -> ExtensiveFormGame {
    let specs = ghz_subtree("nate", 0, [1, 2, 3], |w| {
        let w = if w { 1.0 } else { 0.0 };
        vec![1.0 - w, w, w, w]
    });
    ExtensiveFormGame::new(4, specs, "nate").expect("static game")
}

/// Each mover measures their GHZ qubit, after a Hadamard if their input is 1.
fn ghz_circuits(trio: [PlayerId; 3]) -> Vec<(String, PlayerCircuit)> {
    let mut out = Vec::new();
    for (k, &p) in trio.iter().enumerate() {
        for bit in 0..2 {
            let mut circ = PlayerCircuit::measure(p, &[0], &["0", "1"]);
            if bit == 1 {
                circ = circ.with_gate(Gate::H, &[0]);
            }
            out.push((format!("{}_{bit}", TRIO[k]), circ));
        }
    }
    out
}

fn uniform_nate() -> Vec<(&'static str, Vec<(&'static str, f64)>)> {
    vec![("nate", GHZ_INPUTS.iter().map(|&i| (i, 0.25)).collect())]
}

/// GHZ state for players 1-3 and a uniformly mixing Nate.
pub fn cghz_protocol(g: &ExtensiveFormGame) -> Result<ExtensiveProtocol> {
    let circuits = ghz_circuits([1, 2, 3]);
    let named: Vec<(&str, PlayerCircuit)> = circuits.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
    ExtensiveProtocol::from_named(g, ghz_state([1, 2, 3]), named, uniform_nate())
}

/// The exit-or-guess tree of [`fig3_game`] with OUT leading to a cGHZ game in which player 0 is
/// Nate and players 2-4 are Alice, Bob and Charlie. A failed trio pays
/// player 0 fifty; player 1 never moves there and gets nothing.
pub fn appf_game() -> ExtensiveFormGame {
    let mut specs = vec![NodeSpec::decision("root", 0, "p1_start", &[("OUT", "out"), ("IN", "in")])];
    specs.extend(in_branch(5));
    specs.extend(ghz_subtree("out", 0, [2, 3, 4], |w| {
        if w {
            vec![0.0, 0.0, 1.0, 1.0, 1.0]
        } else {
            vec![50.0, 0.0, 0.0, 0.0, 0.0]
        }
    }));
    ExtensiveFormGame::new(5, specs, "root").expect("static game")
}

/// ½(IN,a,L) + ½(IN,b,R), with off-path advice: Nate's role plays 000 and
/// the trio always outputs 0.
pub fn appf_device(g: &ExtensiveFormGame) -> StrategyDevice {
    let s = |o, pairs: &[(&str, &str)]| strategy(g, o, pairs);
    let trio: Vec<PureStrategy> = (0..3)
        .map(|k| {
            let (a, b) = (format!("{}_0", TRIO[k]), format!("{}_1", TRIO[k]));
            s(k + 2, &[(a.as_str(), "0"), (b.as_str(), "0")])
        })
        .collect();
    let profile = |mv: &str, p2: &str| {
        let mut v = vec![s(0, &[("p1_start", "IN"), ("p1_move", mv), ("nate", "000")]), s(1, &[("p2", p2)])];
        v.extend(trio.iter().cloned());
        v
    };
    Distribution::new([(profile("L", "a"), 0.5), (profile("R", "b"), 0.5)]).expect("static device")
}

/// Bell pair for players 0-1, GHZ state for players 2-4; off the path,
/// player 0 mixes uniformly as Nate.
pub fn appf_protocol(g: &ExtensiveFormGame) -> Result<ExtensiveProtocol> {
    let bell = bell_state([0, 1]);
    let ghz = ghz_state([2, 3, 4]);
    let amps = tensor_product(&Matrix::column(bell.amplitudes().to_vec()), &Matrix::column(ghz.amplitudes().to_vec()))?;
    let state = QuantumState::new(amps.into_data(), vec![0, 1, 2, 3, 4])?;
    let ghz_named = ghz_circuits([2, 3, 4]);
    let mut circuits: Vec<(&str, PlayerCircuit)> = fig3_circuits();
    circuits.extend(ghz_named.iter().map(|(n, c)| (n.as_str(), c.clone())));
    ExtensiveProtocol::from_named(g, state, circuits, uniform_nate())
}
