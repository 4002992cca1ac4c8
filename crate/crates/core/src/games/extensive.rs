use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::games::normal::{NormalFormGame, PlayerId, Profile};

pub type NodeId = usize;
pub type InfosetId = usize;

/// Default cap on the number of pure strategies per player in n(G).
pub const DEFAULT_STRATEGY_CAP: usize = 4096;

/// Node description used to build a game; children are referenced by name.
#[derive(Clone, Debug, PartialEq)]
pub enum NodeSpec {
    Decision { name: String, owner: PlayerId, infoset: String, edges: Vec<(String, String)> },
    Leaf { name: String, payoffs: Vec<f64> },
}

impl NodeSpec {
    pub fn decision(name: &str, owner: PlayerId, infoset: &str, edges: &[(&str, &str)]) -> Self {
        NodeSpec::Decision {
            name: name.into(),
            owner,
            infoset: infoset.into(),
            edges: edges.iter().map(|(a, c)| (a.to_string(), c.to_string())).collect(),
        }
    }

    pub fn leaf(name: &str, payoffs: &[f64]) -> Self {
        NodeSpec::Leaf { name: name.into(), payoffs: payoffs.to_vec() }
    }

    pub fn name(&self) -> &str {
        match self {
            NodeSpec::Decision { name, .. } | NodeSpec::Leaf { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Decision { owner: PlayerId, infoset: InfosetId, edges: Vec<(String, NodeId)> },
    Leaf { payoffs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub name: String,
    /// Owner of the first member node.
    pub owner: PlayerId,
    /// Action labels of the first member node, in edge order.
    pub actions: Vec<String>,
    pub nodes: Vec<NodeId>,
}

/// Things [`ExtensiveFormGame::validate`] can find wrong with a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RootHasParent { root: String },
    MultipleParents { node: String },
    Unreachable { node: String },
    InfosetOwners { infoset: String },
    InfosetActions { infoset: String, node: String },
    ImperfectRecall { infoset: String, player: PlayerId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootHasParent { root } => write!(f, "root `{root}` has a parent"),
            Violation::MultipleParents { node } => write!(f, "node `{node}` has more than one parent"),
            Violation::Unreachable { node } => write!(f, "node `{node}` is not reachable from the root"),
            Violation::InfosetOwners { infoset } => write!(f, "information set `{infoset}` spans several players"),
            Violation::InfosetActions { infoset, node } => {
                write!(f, "node `{node}` in information set `{infoset}` has different actions")
            }
            Violation::ImperfectRecall { infoset, player } => {
                write!(f, "player {player} forgets own history at information set `{infoset}`")
            }
        }
    }
}

/// A finite game tree without chance nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensiveFormGame {
    players: usize,
    nodes: Vec<Node>,
    root: NodeId,
    infosets: Vec<Infoset>,
    parents: Vec<Vec<NodeId>>,
    player_infosets: Vec<Vec<InfosetId>>,
}

impl ExtensiveFormGame {
    /// Resolves names into a game. Dangling references and malformed nodes
    /// are errors; shape and recall problems are left to [`Self::validate`].
    pub fn new(players: usize, specs: Vec<NodeSpec>, root: &str) -> Result<Self> {
        let mut index = HashMap::new();
        for (k, s) in specs.iter().enumerate() {
            if index.insert(s.name().to_string(), k).is_some() {
                return Err(Error::InvalidGame(format!("duplicate node id `{}`", s.name())));
            }
        }
        let root = *index.get(root).ok_or_else(|| Error::InvalidGame(format!("unknown root `{root}`")))?;
        let mut infoset_index: HashMap<String, InfosetId> = HashMap::new();
        let mut infosets: Vec<Infoset> = Vec::new();
        let mut nodes = Vec::with_capacity(specs.len());
        let mut parents = vec![Vec::new(); specs.len()];
        for (k, spec) in specs.into_iter().enumerate() {
            let node = match spec {
                NodeSpec::Leaf { name, payoffs } => {
                    if payoffs.len() != players {
                        return Err(Error::InvalidGame(format!(
                            "leaf `{name}` has {} payoffs for {players} players",
                            payoffs.len()
                        )));
                    }
                    if payoffs.iter().any(|u| !u.is_finite()) {
                        return Err(Error::InvalidGame(format!("leaf `{name}` has a non-finite payoff")));
                    }
                    Node { name, kind: NodeKind::Leaf { payoffs } }
                }
                NodeSpec::Decision { name, owner, infoset, edges } => {
                    if owner >= players {
                        return Err(Error::InvalidGame(format!("node `{name}` owned by unknown player {owner}")));
                    }
                    if edges.is_empty() {
                        return Err(Error::InvalidGame(format!("decision node `{name}` has no edges")));
                    }
                    let mut labels = HashSet::new();
                    let mut resolved = Vec::with_capacity(edges.len());
                    for (action, child) in edges {
                        if !labels.insert(action.clone()) {
                            return Err(Error::InvalidGame(format!("node `{name}` repeats action `{action}`")));
                        }
                        let c = *index.get(&child).ok_or_else(|| {
                            Error::InvalidGame(format!("node `{name}` points to unknown node `{child}`"))
                        })?;
                        parents[c].push(k);
                        resolved.push((action, c));
                    }
                    let h = *infoset_index.entry(infoset.clone()).or_insert_with(|| {
                        infosets.push(Infoset {
                            name: infoset.clone(),
                            owner,
                            actions: resolved.iter().map(|(a, _)| a.clone()).collect(),
                            nodes: Vec::new(),
                        });
                        infosets.len() - 1
                    });
                    infosets[h].nodes.push(k);
                    Node { name, kind: NodeKind::Decision { owner, infoset: h, edges: resolved } }
                }
            };
            nodes.push(node);
        }
        let mut player_infosets = vec![Vec::new(); players];
        for (h, set) in infosets.iter().enumerate() {
            player_infosets[set.owner].push(h);
        }
        Ok(Self { players, nodes, root, infosets, parents, player_infosets })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, h: InfosetId) -> &Infoset {
        &self.infosets[h]
    }

    pub fn infoset_by_name(&self, name: &str) -> Option<InfosetId> {
        self.infosets.iter().position(|s| s.name == name)
    }

    /// Information sets owned by `player`, in order of first appearance.
    pub fn player_infosets(&self, player: PlayerId) -> &[InfosetId] {
        &self.player_infosets[player]
    }

    /// Position of `h` within its owner's information-set list.
    pub fn local_infoset_index(&self, h: InfosetId) -> usize {
        let owner = self.infosets[h].owner;
        self.player_infosets[owner].iter().position(|&x| x == h).expect("infoset listed under its owner")
    }

    pub fn leaf_payoffs(&self, id: NodeId) -> Option<&[f64]> {
        match &self.nodes[id].kind {
            NodeKind::Leaf { payoffs } => Some(payoffs),
            NodeKind::Decision { .. } => None,
        }
    }

    /// Child reached by taking action number `action` of the node's
    /// information set.
    pub fn child(&self, id: NodeId, action: usize) -> NodeId {
        match &self.nodes[id].kind {
            NodeKind::Decision { infoset, edges, .. } => {
                let label = &self.infosets[*infoset].actions[action];
                edges.iter().find(|(a, _)| a == label).map(|&(_, c)| c).expect("validated action set")
            }
            NodeKind::Leaf { .. } => panic!("leaf has no children"),
        }
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&k| matches!(self.nodes[k].kind, NodeKind::Leaf { .. }))
    }

    /// Tree shape, information-set consistency and perfect recall.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.parents[self.root].is_empty() {
            out.push(Violation::RootHasParent { root: self.nodes[self.root].name.clone() });
        }
        for (k, p) in self.parents.iter().enumerate() {
            if p.len() > 1 {
                out.push(Violation::MultipleParents { node: self.nodes[k].name.clone() });
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(k) = stack.pop() {
            if std::mem::replace(&mut seen[k], true) {
                continue;
            }
            if let NodeKind::Decision { edges, .. } = &self.nodes[k].kind {
                stack.extend(edges.iter().map(|&(_, c)| c));
            }
        }
        for (k, &s) in seen.iter().enumerate() {
            if !s {
                out.push(Violation::Unreachable { node: self.nodes[k].name.clone() });
            }
        }
        let tree_ok = out.is_empty();

        let mut action_sets_ok = true;
        for set in &self.infosets {
            let mut owners_ok = true;
            let expected: BTreeSet<&str> = set.actions.iter().map(String::as_str).collect();
            for &k in &set.nodes {
                if let NodeKind::Decision { owner, edges, .. } = &self.nodes[k].kind {
                    owners_ok &= *owner == set.owner;
                    let labels: BTreeSet<&str> = edges.iter().map(|(a, _)| a.as_str()).collect();
                    if labels != expected {
                        action_sets_ok = false;
                        out.push(Violation::InfosetActions {
                            infoset: set.name.clone(),
                            node: self.nodes[k].name.clone(),
                        });
                    }
                }
            }
            if !owners_ok {
                out.push(Violation::InfosetOwners { infoset: set.name.clone() });
            }
        }

        if tree_ok && action_sets_ok {
            for set in &self.infosets {
                let histories: BTreeSet<Vec<(InfosetId, String)>> =
                    set.nodes.iter().map(|&k| self.own_history(k, set.owner)).collect();
                if histories.len() > 1 {
                    out.push(Violation::ImperfectRecall { infoset: set.name.clone(), player: set.owner });
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            let text: Vec<String> = report.iter().map(ToString::to_string).collect();
            Err(Error::InvalidGame(text.join("; ")))
        }
    }

    /// Sequence of `player`'s (information set, action) pairs on the path
    /// from the root to `node`, excluding the node itself.
    pub fn own_history(&self, node: NodeId, player: PlayerId) -> Vec<(InfosetId, String)> {
        let mut hist = Vec::new();
        let mut cur = node;
        while let Some(&parent) = self.parents[cur].first() {
            if let NodeKind::Decision { owner, infoset, edges } = &self.nodes[parent].kind {
                if *owner == player {
                    let action = edges.iter().find(|&&(_, c)| c == cur).map(|(a, _)| a.clone()).unwrap_or_default();
                    hist.push((*infoset, action));
                }
            }
            if parent == self.root {
                break;
            }
            cur = parent;
        }
        hist.reverse();
        hist
    }

    /// True if some node of `later` lies strictly below some node of `earlier`.
    pub fn infoset_follows(&self, earlier: InfosetId, later: InfosetId) -> bool {
        self.infosets[later].nodes.iter().any(|&k| {
            let mut cur = k;
            while let Some(&p) = self.parents[cur].first() {
                if self.infosets[earlier].nodes.contains(&p) {
                    return true;
                }
                if p == self.root {
                    break;
                }
                cur = p;
            }
            false
        })
    }

    /// Leaf reached when every player follows the given pure strategies.
    pub fn play(&self, profile: &[PureStrategy]) -> NodeId {
        let mut cur = self.root;
        loop {
            match &self.nodes[cur].kind {
                NodeKind::Leaf { .. } => return cur,
                NodeKind::Decision { owner, infoset, .. } => {
                    let a = profile[*owner].choice(self, *infoset);
                    cur = self.child(cur, a);
                }
            }
        }
    }

    /// Every pure strategy of `player`, last information set varying fastest.
    pub fn pure_strategies(&self, player: PlayerId, cap: usize) -> Result<Vec<PureStrategy>> {
        let sets = &self.player_infosets[player];
        let sizes: Vec<usize> = sets.iter().map(|&h| self.infosets[h].actions.len()).collect();
        let count = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).unwrap_or(usize::MAX);
        if count > cap {
            return Err(Error::CapExceeded { what: "pure strategy", count, cap });
        }
        let mut out = Vec::with_capacity(count);
        let mut choices = vec![0usize; sizes.len()];
        loop {
            out.push(PureStrategy { owner: player, choices: choices.clone() });
            let mut k = sizes.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                choices[k] += 1;
                if choices[k] < sizes[k] {
                    break;
                }
                choices[k] = 0;
            }
        }
    }

    pub fn expected_payoffs(&self, dist: &Distribution<NodeId>) -> Vec<f64> {
        (0..self.players).map(|i| dist.expect(|&leaf| self.leaf_payoffs(leaf).map_or(0.0, |u| u[i]))).collect()
    }

    /// Normal-form equivalent n(G).
    pub fn to_normal_form(&self, cap: usize) -> Result<NormalFormConversion> {
        self.ensure_valid()?;
        let strategies: Vec<Vec<PureStrategy>> =
            (0..self.players).map(|i| self.pure_strategies(i, cap)).collect::<Result<_>>()?;
        let labels: Vec<Vec<String>> = strategies.iter().map(|ss| ss.iter().map(|s| s.label(self)).collect()).collect();
        let cells = strategies.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len())).unwrap_or(usize::MAX);
        let mut payoffs = Vec::with_capacity(cells);
        let mut leaves = Vec::with_capacity(cells);
        let mut idx = vec![0usize; self.players];
        for _ in 0..cells {
            let profile: Vec<PureStrategy> = idx.iter().enumerate().map(|(i, &k)| strategies[i][k].clone()).collect();
            let leaf = self.play(&profile);
            payoffs.push(self.leaf_payoffs(leaf).expect("play ends at a leaf").to_vec());
            leaves.push(leaf);
            for i in (0..self.players).rev() {
                idx[i] += 1;
                if idx[i] < strategies[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
        let game = NormalFormGame::new(labels, payoffs)?;
        Ok(NormalFormConversion { game, strategies, leaves })
    }
}

/// A choice of action at each of one player's information sets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PureStrategy {
    pub owner: PlayerId,
    /// Indexed like [`ExtensiveFormGame::player_infosets`].
    pub choices: Vec<usize>,
}

impl PureStrategy {
    /// Action index chosen at information set `h` (which must be the owner's).
    pub fn choice(&self, game: &ExtensiveFormGame, h: InfosetId) -> usize {
        self.choices[game.local_infoset_index(h)]
    }

    /// Action labels joined with `·`, e.g. `IN·L`.
    pub fn label(&self, game: &ExtensiveFormGame) -> String {
        if self.choices.is_empty() {
            return "-".into();
        }
        game.player_infosets(self.owner)
            .iter()
            .zip(&self.choices)
            .map(|(&h, &a)| game.infoset(h).actions[a].as_str())
            .collect::<Vec<_>>()
            .join("·")
    }

    /// Builds a strategy from `(information set name, action label)` pairs
    /// covering every information set of `owner`.
    pub fn from_choices(game: &ExtensiveFormGame, owner: PlayerId, pairs: &[(&str, &str)]) -> Result<Self> {
        let sets = game.player_infosets(owner);
        let mut choices = vec![usize::MAX; sets.len()];
        for (set_name, action) in pairs {
            let h = game
                .infoset_by_name(set_name)
                .ok_or_else(|| Error::InvalidGame(format!("unknown information set `{set_name}`")))?;
            let local = sets
                .iter()
                .position(|&x| x == h)
                .ok_or_else(|| Error::InvalidGame(format!("information set `{set_name}` is not player {owner}'s")))?;
            let a =
                game.infoset(h).actions.iter().position(|x| x == action).ok_or_else(|| {
                    Error::InvalidGame(format!("information set `{set_name}` has no action `{action}`"))
                })?;
            choices[local] = a;
        }
        if let Some(k) = choices.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidGame(format!(
                "strategy for player {owner} misses information set `{}`",
                game.infoset(sets[k]).name
            )));
        }
        Ok(Self { owner, choices })
    }
}

/// n(G) together with the map from its profiles back to the tree.
#[derive(Clone, Debug)]
pub struct NormalFormConversion {
    pub game: NormalFormGame,
    /// `strategies[i][k]` is player `i`'s action `k` in `game`.
    pub strategies: Vec<Vec<PureStrategy>>,
    leaves: Vec<NodeId>,
}

impl NormalFormConversion {
    pub fn leaf_of(&self, profile: &[usize]) -> NodeId {
        self.leaves[self.game.cell_index(profile)]
    }

    pub fn strategy_index(&self, s: &PureStrategy) -> Option<usize> {
        self.strategies.get(s.owner)?.iter().position(|x| x == s)
    }

    pub fn profile_of(&self, strategies: &[PureStrategy]) -> Option<Profile> {
        strategies.iter().map(|s| self.strategy_index(s)).collect()
    }

    /// Pushes a distribution over strategy profiles into n(G).
    pub fn push_device(&self, device: &Distribution<Vec<PureStrategy>>) -> Result<Distribution<Profile>> {
        let mut entries = Vec::with_capacity(device.len());
        for (profile, p) in device.iter() {
            let idx = self.profile_of(profile).ok_or_else(|| {
                Error::InvalidDistribution("device profile is not a strategy profile of the game".into())
            })?;
            entries.push((idx, p));
        }
        Ok(Distribution::unchecked(entries))
    }

    /// Leaf distribution induced by a distribution over n(G) profiles.
    pub fn outcome_distribution(&self, d: &Distribution<Profile>) -> Distribution<NodeId> {
        d.map(|p| self.leaf_of(p))
    }
}

/// True iff every leaf's probability under `d_ext` equals the total mass of
/// the n(G) profiles reaching it, within `tol`.
pub fn corresponds(
    conversion: &NormalFormConversion,
    d_ext: &Distribution<NodeId>,
    d_nf: &Distribution<Profile>,
    tol: f64,
) -> bool {
    conversion.outcome_distribution(d_nf).max_abs_diff(d_ext) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_shot() -> ExtensiveFormGame {
        ExtensiveFormGame::new(
            1,
            vec![
                NodeSpec::decision("r", 0, "h", &[("x", "a"), ("y", "b")]),
                NodeSpec::leaf("a", &[1.0]),
                NodeSpec::leaf("b", &[2.0]),
            ],
            "r",
        )
        .unwrap()
    }

    #[test]
    fn single_leaf_is_valid() {
        let g = ExtensiveFormGame::new(2, vec![NodeSpec::leaf("z", &[0.0, 0.0])], "z").unwrap();
        assert!(g.validate().is_empty());
        let nf = g.to_normal_form(DEFAULT_STRATEGY_CAP).unwrap();
        assert_eq!(nf.game.cell_count(), 1);
    }

    #[test]
    fn depth_one_conversion_keeps_moves() {
        let nf = one_shot().to_normal_form(DEFAULT_STRATEGY_CAP).unwrap();
        assert_eq!(nf.game.action_labels(0), &["x".to_string(), "y".to_string()]);
        assert_eq!(nf.game.payoff(&[1], 0), 2.0);
    }

    #[test]
    fn infoset_spanning_players_is_flagged() {
        let g = ExtensiveFormGame::new(
            2,
            vec![
                NodeSpec::decision("r", 0, "h", &[("x", "a"), ("y", "b")]),
                NodeSpec::decision("a", 1, "h", &[("x", "l1"), ("y", "l2")]),
                NodeSpec::leaf("b", &[0.0, 0.0]),
                NodeSpec::leaf("l1", &[0.0, 0.0]),
                NodeSpec::leaf("l2", &[0.0, 0.0]),
            ],
            "r",
        )
        .unwrap();
        let report = g.validate();
        assert!(report.contains(&Violation::InfosetOwners { infoset: "h".into() }), "{report:?}");
        assert!(g.to_normal_form(DEFAULT_STRATEGY_CAP).is_err());
    }

    #[test]
    fn shape_violations() {
        let g = ExtensiveFormGame::new(
            1,
            vec![
                NodeSpec::decision("r", 0, "h", &[("x", "z"), ("y", "z")]),
                NodeSpec::leaf("z", &[0.0]),
                NodeSpec::leaf("orphan", &[0.0]),
            ],
            "r",
        )
        .unwrap();
        let report = g.validate();
        assert!(report.contains(&Violation::MultipleParents { node: "z".into() }));
        assert!(report.contains(&Violation::Unreachable { node: "orphan".into() }));
    }

    #[test]
    fn forgetting_own_move_breaks_recall() {
        // Player 0 moves, then cannot tell which move it made.
        let g = ExtensiveFormGame::new(
            1,
            vec![
                NodeSpec::decision("r", 0, "h0", &[("x", "a"), ("y", "b")]),
                NodeSpec::decision("a", 0, "h1", &[("l", "a1"), ("r", "a2")]),
                NodeSpec::decision("b", 0, "h1", &[("l", "b1"), ("r", "b2")]),
                NodeSpec::leaf("a1", &[0.0]),
                NodeSpec::leaf("a2", &[0.0]),
                NodeSpec::leaf("b1", &[0.0]),
                NodeSpec::leaf("b2", &[0.0]),
            ],
            "r",
        )
        .unwrap();
        assert_eq!(g.validate(), vec![Violation::ImperfectRecall { infoset: "h1".into(), player: 0 }]);
    }

    #[test]
    fn dangling_reference_is_an_error() {
        let err = ExtensiveFormGame::new(1, vec![NodeSpec::decision("r", 0, "h", &[("x", "nope")])], "r");
        assert!(err.is_err());
    }

    #[test]
    fn strategy_cap() {
        let err = one_shot().to_normal_form(1).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { count: 2, cap: 1, .. }));
    }
}
