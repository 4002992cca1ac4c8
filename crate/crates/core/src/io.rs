//! JSON file formats for games, devices, states, circuits and protocols.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in the shortest
//! form that reads back to the same `f64`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classical::{CorrelatingDevice, StrategyDevice};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::games::{ExtensiveFormGame, NodeId, NodeKind, NodeSpec, NormalFormGame, PlayerId, Profile, PureStrategy};
use crate::linalg::{c, Matrix, C64};
use crate::quantum::{
    ExtensiveProtocol, Gate, GateOp, PlayerCircuit, QceInstance, QuantumState, SearchResult, TraceBound,
};

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads and parses a file, prefixing errors with its path.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn complex_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| complex_pair(z)).collect()).collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<Matrix> {
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Matrix::new(rows.len(), n, rows.iter().flatten().map(|&[re, im]| c(re, im)).collect())
}

// ---------------------------------------------------------------- games

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NodeRecord {
    Decision { id: String, owner: PlayerId, infoset: String, edges: Vec<(String, String)> },
    Leaf { id: String, payoffs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GameFile {
    /// `payoffs` has one row per cell, cells in row-major order of action
    /// indices (player 0 slowest).
    Normal {
        actions: Vec<Vec<String>>,
        payoffs: Vec<Vec<f64>>,
    },
    Extensive {
        players: usize,
        root: String,
        nodes: Vec<NodeRecord>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Game {
    Normal(NormalFormGame),
    Extensive(ExtensiveFormGame),
}

impl GameFile {
    pub fn from_normal(g: &NormalFormGame) -> Self {
        GameFile::Normal {
            actions: (0..g.players()).map(|i| g.action_labels(i).to_vec()).collect(),
            payoffs: g.profiles().map(|p| g.payoffs(&p).to_vec()).collect(),
        }
    }

    pub fn from_extensive(g: &ExtensiveFormGame) -> Self {
        let nodes = g
            .nodes()
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Decision { owner, infoset, edges } => NodeRecord::Decision {
                    id: n.name.clone(),
                    owner: *owner,
                    infoset: g.infoset(*infoset).name.clone(),
                    edges: edges.iter().map(|(a, k)| (a.clone(), g.node(*k).name.clone())).collect(),
                },
                NodeKind::Leaf { payoffs } => NodeRecord::Leaf { id: n.name.clone(), payoffs: payoffs.clone() },
            })
            .collect();
        GameFile::Extensive { players: g.players(), root: g.node(g.root()).name.clone(), nodes }
    }

    pub fn from_game(g: &Game) -> Self {
        match g {
            Game::Normal(g) => Self::from_normal(g),
            Game::Extensive(g) => Self::from_extensive(g),
        }
    }

    pub fn into_game(self) -> Result<Game> {
        match self {
            GameFile::Normal { actions, payoffs } => Ok(Game::Normal(NormalFormGame::new(actions, payoffs)?)),
            GameFile::Extensive { players, root, nodes } => {
                let specs = nodes
                    .into_iter()
                    .map(|n| match n {
                        NodeRecord::Decision { id, owner, infoset, edges } => {
                            NodeSpec::Decision { name: id, owner, infoset, edges }
                        }
                        NodeRecord::Leaf { id, payoffs } => NodeSpec::Leaf { name: id, payoffs },
                    })
                    .collect();
                Ok(Game::Extensive(ExtensiveFormGame::new(players, specs, &root)?))
            }
        }
    }
}

impl Game {
    pub fn normal(self) -> Result<NormalFormGame> {
        match self {
            Game::Normal(g) => Ok(g),
            Game::Extensive(_) => Err(Error::InvalidGame("expected a normal-form game".into())),
        }
    }

    pub fn extensive(self) -> Result<ExtensiveFormGame> {
        match self {
            Game::Extensive(g) => Ok(g),
            Game::Normal(_) => Err(Error::InvalidGame("expected an extensive-form game".into())),
        }
    }
}

// -------------------------------------------------------------- devices

/// A device profile: one label per player (actions, or strategy labels such
/// as `IN·L`), or one information-set-to-action map per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileRecord {
    Labels(Vec<String>),
    Choices(Vec<BTreeMap<String, String>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceEntry {
    pub profile: ProfileRecord,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceFile {
    pub entries: Vec<DeviceEntry>,
}

impl DeviceFile {
    pub fn from_normal(g: &NormalFormGame, mu: &CorrelatingDevice) -> Self {
        let entries = mu
            .iter()
            .map(|(p, prob)| DeviceEntry { profile: ProfileRecord::Labels(g.profile_labels(p)), probability: prob })
            .collect();
        Self { entries }
    }

    pub fn from_strategies(g: &ExtensiveFormGame, mu: &StrategyDevice) -> Self {
        let entries = mu
            .iter()
            .map(|(p, prob)| DeviceEntry {
                profile: ProfileRecord::Labels(p.iter().map(|s| s.label(g)).collect()),
                probability: prob,
            })
            .collect();
        Self { entries }
    }

    pub fn to_normal(&self, g: &NormalFormGame) -> Result<CorrelatingDevice> {
        let mut out = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let ProfileRecord::Labels(labels) = &e.profile else {
                return Err(Error::Parse("normal-form profiles are lists of action labels".into()));
            };
            let p = g.profile_from_labels(labels).map_err(|e| Error::Parse(e.to_string()))?;
            out.push((p, e.probability));
        }
        Distribution::new(out)
    }

    pub fn to_strategies(&self, g: &ExtensiveFormGame) -> Result<StrategyDevice> {
        let mut out = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let profile = match &e.profile {
                ProfileRecord::Labels(labels) => {
                    if labels.len() != g.players() {
                        return Err(Error::Parse(format!(
                            "profile has {} labels for {} players",
                            labels.len(),
                            g.players()
                        )));
                    }
                    labels.iter().enumerate().map(|(i, l)| strategy_from_label(g, i, l)).collect::<Result<Vec<_>>>()?
                }
                ProfileRecord::Choices(maps) => {
                    if maps.len() != g.players() {
                        return Err(Error::Parse(format!(
                            "profile has {} maps for {} players",
                            maps.len(),
                            g.players()
                        )));
                    }
                    maps.iter()
                        .enumerate()
                        .map(|(i, m)| {
                            let pairs: Vec<(&str, &str)> = m.iter().map(|(h, a)| (h.as_str(), a.as_str())).collect();
                            PureStrategy::from_choices(g, i, &pairs)
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            out.push((profile, e.probability));
        }
        Distribution::new(out)
    }
}

/// Parses a strategy label (`IN·L`, or `-` for a player without moves).
pub fn strategy_from_label(g: &ExtensiveFormGame, player: PlayerId, label: &str) -> Result<PureStrategy> {
    let sets = g.player_infosets(player);
    let parts: Vec<&str> = if label == "-" { Vec::new() } else { label.split('·').collect() };
    if parts.len() != sets.len() {
        return Err(Error::Parse(format!(
            "strategy `{label}` for player {player} needs {} actions joined by `·`",
            sets.len()
        )));
    }
    let choices = sets
        .iter()
        .zip(&parts)
        .map(|(&h, a)| {
            g.infoset(h)
                .actions
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| Error::Parse(format!("`{}` has no action `{a}`", g.infoset(h).name)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PureStrategy { owner: player, choices })
}

// ------------------------------------------------------ states, circuits

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub qubits: usize,
    /// Owning player of each qubit.
    pub partition: Vec<PlayerId>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(s: &QuantumState) -> Self {
        Self {
            qubits: s.qubit_count(),
            partition: s.owners().to_vec(),
            amplitudes: s.amplitudes().iter().map(|&z| complex_pair(z)).collect(),
        }
    }

    pub fn to_state(&self, max_qubits: usize) -> Result<QuantumState> {
        if self.partition.len() != self.qubits {
            return Err(Error::Parse(format!(
                "partition lists {} qubits, expected {}",
                self.partition.len(),
                self.qubits
            )));
        }
        QuantumState::with_max_qubits(
            self.amplitudes.iter().map(|&[re, im]| c(re, im)).collect(),
            self.partition.clone(),
            max_qubits,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateRecord {
    Named { gate: String, targets: Vec<usize> },
    Matrix { matrix: Vec<Vec<[f64; 2]>>, targets: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub owner: PlayerId,
    #[serde(default)]
    pub ancillas: usize,
    #[serde(default)]
    pub gates: Vec<GateRecord>,
    pub outputs: Vec<usize>,
    /// Action played for each measurement bitstring, in binary order.
    pub actions: Vec<String>,
}

impl CircuitFile {
    pub fn from_circuit(circ: &PlayerCircuit) -> Self {
        let gates = circ
            .gates
            .iter()
            .map(|op| match op.gate.name() {
                Some(name) => GateRecord::Named { gate: name.into(), targets: op.targets.clone() },
                None => GateRecord::Matrix { matrix: matrix_rows(&op.gate.matrix()), targets: op.targets.clone() },
            })
            .collect();
        Self {
            owner: circ.owner,
            ancillas: circ.ancillas,
            gates,
            outputs: circ.outputs.clone(),
            actions: circ.actions.clone(),
        }
    }

    pub fn to_circuit(&self) -> Result<PlayerCircuit> {
        let gates = self
            .gates
            .iter()
            .map(|g| match g {
                GateRecord::Named { gate, targets } => Gate::from_name(gate)
                    .map(|gate| GateOp::new(gate, targets))
                    .ok_or_else(|| Error::Parse(format!("unknown gate `{gate}`"))),
                GateRecord::Matrix { matrix, targets } => {
                    Ok(GateOp::new(Gate::Unitary(matrix_from_rows(matrix)?), targets))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PlayerCircuit {
            owner: self.owner,
            ancillas: self.ancillas,
            gates,
            outputs: self.outputs.clone(),
            actions: self.actions.clone(),
        })
    }
}

/// A list of circuits, one per player in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitsFile {
    pub circuits: Vec<CircuitFile>,
}

impl CircuitsFile {
    pub fn from_circuits(circuits: &[PlayerCircuit]) -> Self {
        Self { circuits: circuits.iter().map(CircuitFile::from_circuit).collect() }
    }

    pub fn to_circuits(&self) -> Result<Vec<PlayerCircuit>> {
        self.circuits.iter().map(CircuitFile::to_circuit).collect()
    }
}

/// A normal-form protocol: shared state and one circuit per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub state: StateFile,
    pub circuits: Vec<CircuitFile>,
}

impl InstanceFile {
    pub fn from_instance(inst: &QceInstance) -> Self {
        Self {
            state: StateFile::from_state(&inst.state),
            circuits: inst.circuits.iter().map(CircuitFile::from_circuit).collect(),
        }
    }
}

/// Result of the impossibility search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchFile {
    pub min_residual: f64,
    pub restarts: usize,
    pub evaluations: usize,
    pub bound: TraceBound,
    pub best_state: StateFile,
}

impl SearchFile {
    pub fn from_result(r: &SearchResult) -> Self {
        Self {
            min_residual: r.min_residual,
            restarts: r.restarts,
            evaluations: r.evaluations,
            bound: r.bound,
            best_state: StateFile::from_state(&r.best_state),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfosetCircuit {
    pub infoset: String,
    #[serde(flatten)]
    pub circuit: CircuitFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingRecord {
    pub infoset: String,
    /// Action label to probability.
    pub distribution: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub state: StateFile,
    #[serde(default)]
    pub circuits: Vec<InfosetCircuit>,
    #[serde(default)]
    pub mixing: Vec<MixingRecord>,
}

impl ProtocolFile {
    pub fn from_protocol(g: &ExtensiveFormGame, p: &ExtensiveProtocol) -> Self {
        Self {
            state: StateFile::from_state(&p.state),
            circuits: p
                .circuits
                .iter()
                .map(|(&h, circ)| InfosetCircuit {
                    infoset: g.infoset(h).name.clone(),
                    circuit: CircuitFile::from_circuit(circ),
                })
                .collect(),
            mixing: p
                .mixing
                .iter()
                .map(|(&h, d)| MixingRecord {
                    infoset: g.infoset(h).name.clone(),
                    distribution: d.iter().map(|(&a, prob)| (g.infoset(h).actions[a].clone(), prob)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_protocol(&self, g: &ExtensiveFormGame, max_qubits: usize) -> Result<ExtensiveProtocol> {
        let state = self.state.to_state(max_qubits)?;
        let circuits = self
            .circuits
            .iter()
            .map(|ic| Ok((ic.infoset.as_str(), ic.circuit.to_circuit()?)))
            .collect::<Result<Vec<_>>>()?;
        let mixing = self
            .mixing
            .iter()
            .map(|m| (m.infoset.as_str(), m.distribution.iter().map(|(a, &p)| (a.as_str(), p)).collect()))
            .collect();
        Ok(ExtensiveProtocol::from_named(g, state, circuits, mixing)?.with_max_qubits(max_qubits))
    }
}

// ------------------------------------------------------------- outcomes

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    /// Action labels for normal-form outcomes, a one-element leaf id list
    /// for game trees.
    pub outcome: Vec<String>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeFile {
    pub entries: Vec<OutcomeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl OutcomeFile {
    pub fn from_profiles(g: &NormalFormGame, d: &Distribution<Profile>) -> Self {
        let entries =
            d.iter().map(|(p, prob)| OutcomeEntry { outcome: g.profile_labels(p), probability: prob }).collect();
        Self { entries, warnings: Vec::new() }
    }

    pub fn from_leaves(g: &ExtensiveFormGame, d: &Distribution<NodeId>, warnings: Vec<String>) -> Self {
        let entries = d
            .iter()
            .map(|(&leaf, prob)| OutcomeEntry { outcome: vec![g.node(leaf).name.clone()], probability: prob })
            .collect();
        Self { entries, warnings }
    }

    pub fn to_profiles(&self, g: &NormalFormGame) -> Result<Distribution<Profile>> {
        let entries = self
            .entries
            .iter()
            .map(|e| Ok((g.profile_from_labels(&e.outcome)?, e.probability)))
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(entries)
    }

    pub fn to_leaves(&self, g: &ExtensiveFormGame) -> Result<Distribution<NodeId>> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let [name] = e.outcome.as_slice() else {
                    return Err(Error::Parse("tree outcomes name exactly one leaf".into()));
                };
                let id = g.node_by_name(name).ok_or_else(|| Error::Parse(format!("unknown leaf `{name}`")))?;
                Ok((id, e.probability))
            })
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(entries)
    }
}
