//! Entanglement-assisted play of game trees.
//!
//! Players keep their registers for the whole game. At each reached
//! information set the owner runs that set's circuit on everything they hold,
//! measures its outputs and plays the mapped action; the joint state
//! collapses and every outcome is followed as its own weighted branch.
//! Information sets without quantum advice may instead mix over actions
//! with fixed probabilities.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::games::{ExtensiveFormGame, InfosetId, NodeId, NodeKind, PlayerId};
use crate::linalg::DEFAULT_MAX_QUBITS;
use crate::quantum::circuit::PlayerCircuit;
use crate::quantum::state::QuantumState;
use crate::report::{DeviationMove, EquilibriumReport, PlayerDeviation, Witness};

/// Default cap on deviation plans per player.
pub const DEFAULT_PLAN_CAP: usize = 4096;

/// Measurement outcomes with probability at or below this are dropped.
const BRANCH_TOL: f64 = 1e-15;

/// Plans must beat the best value so far by more than this to replace it.
const TIE_BAND: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensiveProtocol {
    pub state: QuantumState,
    pub circuits: BTreeMap<InfosetId, PlayerCircuit>,
    /// Action-index distributions for information sets played classically.
    pub mixing: BTreeMap<InfosetId, Distribution<usize>>,
    pub max_qubits: usize,
}

impl ExtensiveProtocol {
    pub fn new(
        game: &ExtensiveFormGame,
        state: QuantumState,
        circuits: BTreeMap<InfosetId, PlayerCircuit>,
        mixing: BTreeMap<InfosetId, Distribution<usize>>,
    ) -> Result<Self> {
        game.ensure_valid()?;
        if state.owners().iter().any(|&o| o >= game.players()) {
            return Err(Error::InvalidState(format!(
                "state has a qubit owned by a player outside 0..{}",
                game.players()
            )));
        }
        for (&h, circ) in &circuits {
            let set = infoset_checked(game, h)?;
            if circ.owner != set.owner {
                return Err(Error::InvalidCircuit(format!(
                    "circuit for `{}` belongs to player {} but the set is player {}'s",
                    set.name, circ.owner, set.owner
                )));
            }
            if let Some(a) = circ.actions.iter().find(|a| !set.actions.contains(a)) {
                return Err(Error::InvalidCircuit(format!("`{}` has no action `{a}`", set.name)));
            }
        }
        for (&h, d) in &mixing {
            let set = infoset_checked(game, h)?;
            if circuits.contains_key(&h) {
                return Err(Error::InvalidCircuit(format!("`{}` has both a circuit and a mixed strategy", set.name)));
            }
            if d.keys().any(|&a| a >= set.actions.len()) {
                return Err(Error::InvalidDistribution(format!(
                    "mixed strategy at `{}` uses an unknown action",
                    set.name
                )));
            }
        }
        Ok(Self { state, circuits, mixing, max_qubits: DEFAULT_MAX_QUBITS })
    }

    /// Same as [`Self::new`] with information sets and actions given by name.
    pub fn from_named(
        game: &ExtensiveFormGame,
        state: QuantumState,
        circuits: Vec<(&str, PlayerCircuit)>,
        mixing: Vec<(&str, Vec<(&str, f64)>)>,
    ) -> Result<Self> {
        let lookup = |name: &str| {
            game.infoset_by_name(name).ok_or_else(|| Error::InvalidGame(format!("unknown information set `{name}`")))
        };
        let mut cmap = BTreeMap::new();
        for (name, circ) in circuits {
            cmap.insert(lookup(name)?, circ);
        }
        let mut mmap = BTreeMap::new();
        for (name, entries) in mixing {
            let h = lookup(name)?;
            let actions = &game.infoset(h).actions;
            let mut idx = Vec::with_capacity(entries.len());
            for (a, p) in entries {
                let k = actions
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| Error::InvalidGame(format!("`{name}` has no action `{a}`")))?;
                idx.push((k, p));
            }
            mmap.insert(h, Distribution::new(idx)?);
        }
        Self::new(game, state, cmap, mmap)
    }

    pub fn with_max_qubits(mut self, max_qubits: usize) -> Self {
        self.max_qubits = max_qubits;
        self
    }
}

fn infoset_checked(game: &ExtensiveFormGame, h: InfosetId) -> Result<&crate::games::Infoset> {
    game.infosets().get(h).ok_or_else(|| Error::InvalidGame(format!("information set {h} does not exist")))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensiveOutcome {
    pub distribution: Distribution<NodeId>,
    /// Circuits that touch qubits already measured on the same path.
    pub warnings: Vec<String>,
}

/// A deviation by one player.
///
/// At `trigger` the player runs that set's circuit and then, immediately, the
/// circuits of every set in `early`, and plays `response[r]` where `r` is
/// the mixed-radix index of all results (trigger first). Sets in `early`
/// later play the action their recorded result maps to. Sets in
/// `overrides` play a fixed action. Everything else follows the protocol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationPlan {
    pub trigger: Option<InfosetId>,
    pub early: Vec<InfosetId>,
    pub response: Vec<usize>,
    pub overrides: BTreeMap<InfosetId, usize>,
}

impl DeviationPlan {
    pub fn moves(&self, game: &ExtensiveFormGame, protocol: &ExtensiveProtocol) -> Vec<DeviationMove> {
        let mut out = Vec::new();
        if let Some(h0) = self.trigger {
            let set = game.infoset(h0);
            let mut sets = vec![h0];
            sets.extend(&self.early);
            let radices: Vec<usize> = sets.iter().map(|h| protocol.circuits[h].actions.len()).collect();
            for (r, &a) in self.response.iter().enumerate() {
                let mut rest = r;
                let mut parts = Vec::with_capacity(sets.len());
                for (k, &h) in sets.iter().enumerate().rev() {
                    let res = rest % radices[k];
                    rest /= radices[k];
                    parts.push(format!("{} reads {}", game.infoset(h).name, protocol.circuits[&h].actions[res]));
                }
                parts.reverse();
                out.push(DeviationMove {
                    when: format!("{}: {}", set.name, parts.join(", ")),
                    play: set.actions[a].clone(),
                });
            }
        }
        for (&h, &a) in &self.overrides {
            let set = game.infoset(h);
            out.push(DeviationMove { when: format!("{}: always", set.name), play: set.actions[a].clone() });
        }
        out
    }
}

struct Branch {
    weight: f64,
    state: QuantumState,
    measured: BTreeSet<usize>,
    recorded: BTreeMap<InfosetId, usize>,
}

struct Walker<'a> {
    game: &'a ExtensiveFormGame,
    protocol: &'a ExtensiveProtocol,
    deviation: Option<(PlayerId, &'a DeviationPlan)>,
    leaves: BTreeMap<NodeId, f64>,
    warnings: BTreeSet<String>,
}

impl Walker<'_> {
    fn run(&mut self, b: Branch, node: NodeId) -> Result<()> {
        let (owner, h) = match &self.game.node(node).kind {
            NodeKind::Leaf { .. } => {
                *self.leaves.entry(node).or_insert(0.0) += b.weight;
                return Ok(());
            }
            NodeKind::Decision { owner, infoset, .. } => (*owner, *infoset),
        };
        if let Some((_, plan)) = self.deviation.filter(|(p, _)| *p == owner) {
            if let Some(&a) = plan.overrides.get(&h) {
                return self.run(b, self.game.child(node, a));
            }
            if plan.trigger == Some(h) {
                return self.trigger(b, node, h, plan);
            }
            if let Some(&res) = b.recorded.get(&h) {
                let a = self.action_index(h, res)?;
                return self.run(b, self.game.child(node, a));
            }
        }
        self.follow(b, node, h)
    }

    fn follow(&mut self, b: Branch, node: NodeId, h: InfosetId) -> Result<()> {
        if self.protocol.circuits.contains_key(&h) {
            for (res, nb) in self.measure(b, h)? {
                let a = self.action_index(h, res)?;
                self.run(nb, self.game.child(node, a))?;
            }
            return Ok(());
        }
        if let Some(mix) = self.protocol.mixing.get(&h) {
            for (&a, p) in mix.iter() {
                if p > 0.0 {
                    let nb = Branch { weight: b.weight * p, ..clone_branch(&b) };
                    self.run(nb, self.game.child(node, a))?;
                }
            }
            return Ok(());
        }
        Err(Error::InvalidCircuit(format!(
            "information set `{}` has neither a circuit nor a mixed strategy",
            self.game.infoset(h).name
        )))
    }

    fn trigger(&mut self, b: Branch, node: NodeId, h0: InfosetId, plan: &DeviationPlan) -> Result<()> {
        // (branch, mixed-radix result index)
        let mut frontier: Vec<(Branch, usize)> = self.measure(b, h0)?.into_iter().map(|(r, nb)| (nb, r)).collect();
        for &h in &plan.early {
            let radix = self.protocol.circuits[&h].actions.len();
            let mut next = Vec::new();
            for (fb, idx) in frontier {
                for (res, mut nb) in self.measure(fb, h)? {
                    nb.recorded.insert(h, res);
                    next.push((nb, idx * radix + res));
                }
            }
            frontier = next;
        }
        for (fb, idx) in frontier {
            self.run(fb, self.game.child(node, plan.response[idx]))?;
        }
        Ok(())
    }

    /// Runs the circuit of `h` and splits the branch by its measurement.
    fn measure(&mut self, b: Branch, h: InfosetId) -> Result<Vec<(usize, Branch)>> {
        let circ = &self.protocol.circuits[&h];
        let mut state = b.state;
        let reg = circ.allocate(&mut state, self.protocol.max_qubits)?;
        let reused: Vec<usize> = circ.touched(&reg).into_iter().filter(|q| b.measured.contains(q)).collect();
        if !reused.is_empty() {
            self.warnings.insert(format!(
                "information set `{}` acts on already measured qubit(s) {reused:?}",
                self.game.infoset(h).name
            ));
        }
        circ.apply_unitaries(&mut state, &reg)?;
        let outputs = circ.output_qubits(&reg);
        let mut measured = b.measured;
        measured.extend(outputs.iter().copied());
        let mut out = Vec::new();
        for res in 0..circ.actions.len() {
            if let Some((p, post)) = state.project(&outputs, res) {
                if p > BRANCH_TOL {
                    out.push((
                        res,
                        Branch {
                            weight: b.weight * p,
                            state: post,
                            measured: measured.clone(),
                            recorded: b.recorded.clone(),
                        },
                    ));
                }
            }
        }
        Ok(out)
    }

    fn action_index(&self, h: InfosetId, res: usize) -> Result<usize> {
        let label = &self.protocol.circuits[&h].actions[res];
        let set = self.game.infoset(h);
        set.actions
            .iter()
            .position(|a| a == label)
            .ok_or_else(|| Error::InvalidCircuit(format!("`{}` has no action `{label}`", set.name)))
    }
}

fn clone_branch(b: &Branch) -> Branch {
    Branch { weight: b.weight, state: b.state.clone(), measured: b.measured.clone(), recorded: b.recorded.clone() }
}

fn walk(
    game: &ExtensiveFormGame,
    protocol: &ExtensiveProtocol,
    deviation: Option<(PlayerId, &DeviationPlan)>,
) -> Result<ExtensiveOutcome> {
    let mut w = Walker { game, protocol, deviation, leaves: BTreeMap::new(), warnings: BTreeSet::new() };
    let start =
        Branch { weight: 1.0, state: protocol.state.clone(), measured: BTreeSet::new(), recorded: BTreeMap::new() };
    w.run(start, game.root())?;
    Ok(ExtensiveOutcome { distribution: Distribution::unchecked(w.leaves), warnings: w.warnings.into_iter().collect() })
}

/// Exact leaf distribution of the protocol.
pub fn simulate_extensive_qce(game: &ExtensiveFormGame, protocol: &ExtensiveProtocol) -> Result<ExtensiveOutcome> {
    walk(game, protocol, None)
}

/// Leaf distribution when `player` follows `plan` and everyone else the protocol.
pub fn simulate_deviation(
    game: &ExtensiveFormGame,
    protocol: &ExtensiveProtocol,
    player: PlayerId,
    plan: &DeviationPlan,
) -> Result<ExtensiveOutcome> {
    walk(game, protocol, Some((player, plan)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LookaheadResult {
    pub player: PlayerId,
    pub on_path: f64,
    pub value: f64,
    /// The best plan, absent when none beats following the protocol.
    pub plan: Option<DeviationPlan>,
    pub plans_evaluated: usize,
}

impl LookaheadResult {
    pub fn gain(&self) -> f64 {
        self.value - self.on_path
    }
}

fn product_capped(factors: impl IntoIterator<Item = usize>, cap: usize) -> usize {
    factors.into_iter().try_fold(1usize, |acc, f| acc.checked_mul(f).filter(|&v| v <= cap)).unwrap_or(usize::MAX)
}

/// Every assignment of "keep" or a constant action to the given sets,
/// as override maps (the all-keep map first).
fn override_maps(game: &ExtensiveFormGame, sets: &[InfosetId]) -> Vec<BTreeMap<InfosetId, usize>> {
    let mut out = vec![BTreeMap::new()];
    for &h in sets {
        let n = game.infoset(h).actions.len();
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..=n).map(move |k| {
                    let mut m = m.clone();
                    if k > 0 {
                        m.insert(h, k - 1);
                    }
                    m
                })
            })
            .collect();
    }
    out
}

/// Lookahead plans of `player`: a trigger set with a circuit, a subset of
/// their later circuit sets run early, a response map, and for each of their
/// other classically mixed sets either its mixture or a constant action.
pub fn lookahead_plans(
    game: &ExtensiveFormGame,
    protocol: &ExtensiveProtocol,
    player: PlayerId,
    cap: usize,
) -> Result<Vec<DeviationPlan>> {
    let own = game.player_infosets(player);
    let mut plans = Vec::new();
    for &h0 in own.iter().filter(|h| protocol.circuits.contains_key(h)) {
        let followers: Vec<InfosetId> = own
            .iter()
            .copied()
            .filter(|&h| h != h0 && protocol.circuits.contains_key(&h) && game.infoset_follows(h0, h))
            .collect();
        let mixed: Vec<InfosetId> = own.iter().copied().filter(|h| protocol.mixing.contains_key(h)).collect();
        let overrides = override_maps(game, &mixed);
        let n_actions = game.infoset(h0).actions.len();
        for mask in 0..1usize << followers.len() {
            let early: Vec<InfosetId> =
                followers.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &h)| h).collect();
            let results = product_capped(
                std::iter::once(h0).chain(early.iter().copied()).map(|h| protocol.circuits[&h].actions.len()),
                cap,
            );
            let maps =
                if results > 63 { usize::MAX } else { product_capped(std::iter::repeat_n(n_actions, results), cap) };
            let count = product_capped([maps, overrides.len()], cap);
            if plans.len().saturating_add(count) > cap {
                return Err(Error::CapExceeded {
                    what: "deviation plan",
                    count: plans.len().saturating_add(count),
                    cap,
                });
            }
            for code in 0..maps {
                let mut response = vec![0; results];
                let mut rest = code;
                for slot in response.iter_mut().rev() {
                    *slot = rest % n_actions;
                    rest /= n_actions;
                }
                for ov in &overrides {
                    plans.push(DeviationPlan {
                        trigger: Some(h0),
                        early: early.clone(),
                        response: response.clone(),
                        overrides: ov.clone(),
                    });
                }
            }
        }
    }
    Ok(plans)
}

/// Plans that fix constant actions at any nonempty subset of the player's sets.
pub fn override_plans(game: &ExtensiveFormGame, player: PlayerId, cap: usize) -> Result<Vec<DeviationPlan>> {
    let own = game.player_infosets(player);
    let count = product_capped(own.iter().map(|&h| game.infoset(h).actions.len() + 1), cap);
    if count > cap {
        return Err(Error::CapExceeded { what: "deviation plan", count, cap });
    }
    Ok(override_maps(game, own)
        .into_iter()
        .skip(1)
        .map(|overrides| DeviationPlan { overrides, ..DeviationPlan::default() })
        .collect())
}

fn best_of(
    game: &ExtensiveFormGame,
    protocol: &ExtensiveProtocol,
    player: PlayerId,
    plans: Vec<DeviationPlan>,
) -> Result<LookaheadResult> {
    let on_path = game.expected_payoffs(&simulate_extensive_qce(game, protocol)?.distribution)[player];
    let mut best = LookaheadResult { player, on_path, value: on_path, plan: None, plans_evaluated: 0 };
    for plan in plans {
        let v = game.expected_payoffs(&simulate_deviation(game, protocol, player, &plan)?.distribution)[player];
        best.plans_evaluated += 1;
        if v > best.value + TIE_BAND {
            best.value = v;
            best.plan = Some(plan);
        }
    }
    Ok(best)
}

/// Best value of `player` over the lookahead family (never below on-path).
pub fn lookahead_deviation_value(
    game: &ExtensiveFormGame,
    protocol: &ExtensiveProtocol,
    player: PlayerId,
    cap: usize,
) -> Result<LookaheadResult> {
    let plans = lookahead_plans(game, protocol, player, cap)?;
    best_of(game, protocol, player, plans)
}

/// Checks every player against the lookahead family and all constant
/// overrides. A positive verdict only covers these families, so each
/// player's entry is marked inexact.
pub fn verify_extensive_qce(
    game: &ExtensiveFormGame,
    protocol: &ExtensiveProtocol,
    eps: f64,
    cap: usize,
) -> Result<EquilibriumReport> {
    let mut players = Vec::with_capacity(game.players());
    for i in 0..game.players() {
        let mut plans = lookahead_plans(game, protocol, i, cap)?;
        plans.extend(override_plans(game, i, cap)?);
        let res = best_of(game, protocol, i, plans)?;
        let witness = res.plan.as_ref().map(|p| Witness {
            description: format!("player {i} deviates (best of {} tested plans)", res.plans_evaluated),
            moves: p.moves(game, protocol),
            measurement: None,
        });
        players.push(PlayerDeviation {
            player: i,
            on_path: res.on_path,
            best_value: res.value,
            gain: res.gain(),
            exact: false,
            witness,
        });
    }
    Ok(EquilibriumReport::from_players(players, eps, &[]))
}
