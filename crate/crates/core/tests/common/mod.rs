//! Random small game trees with perfect recall, and a direct tree walker.
#![allow(dead_code)]

use proptest::prelude::*;

use qce::games::{ExtensiveFormGame, NodeId, NodeKind, NodeSpec, NormalFormConversion, Profile};

pub const PLAYERS: usize = 3;

/// One layer of the tree: every node at this depth is owned by `owner`, has
/// `actions` children, and either sees the full path (`perfect`) or only
/// what `owner` saw and did before.
#[derive(Clone, Debug)]
pub struct Layer {
    pub owner: usize,
    pub actions: usize,
    pub perfect: bool,
}

fn node_count(layers: &[Layer]) -> usize {
    let mut width = 1;
    let mut total = 1;
    for l in layers {
        width *= l.actions;
        total += width;
    }
    total
}

pub fn layers(max_nodes: usize) -> impl Strategy<Value = Vec<Layer>> {
    prop::collection::vec((0..PLAYERS, 2usize..=3, any::<bool>()), 1..=3)
        .prop_map(|v| {
            v.into_iter().map(|(owner, actions, perfect)| Layer { owner, actions, perfect }).collect::<Vec<_>>()
        })
        .prop_filter("too many nodes", move |l| node_count(l) <= max_nodes)
}

/// A tree whose information sets are built from each owner's own
/// observations, so perfect recall holds by construction.
pub fn build_tree(layers: &[Layer], payoffs: &[f64]) -> ExtensiveFormGame {
    let mut specs = Vec::new();
    let mut leaf = 0;
    // (node name, path of action indices, per-player observation string)
    let mut frontier = vec![("n".to_string(), Vec::<usize>::new(), vec![String::new(); PLAYERS])];
    for (k, layer) in layers.iter().enumerate() {
        let mut next = Vec::new();
        for (name, path, obs) in frontier {
            let infoset = if layer.perfect { format!("{k}p{path:?}") } else { format!("{k}o{}", obs[layer.owner]) };
            let kids: Vec<(String, String)> =
                (0..layer.actions).map(|a| (format!("a{a}"), format!("{name}.{a}"))).collect();
            let edges: Vec<(&str, &str)> = kids.iter().map(|(a, c)| (a.as_str(), c.as_str())).collect();
            specs.push(NodeSpec::decision(&name, layer.owner, &infoset, &edges));
            for (a, (_, child)) in kids.iter().enumerate() {
                let mut p = path.clone();
                p.push(a);
                let mut o = obs.clone();
                o[layer.owner].push_str(&format!("[{infoset}:{a}]"));
                next.push((child.clone(), p, o));
            }
        }
        frontier = next;
    }
    for (name, _, _) in frontier {
        let u: Vec<f64> = (0..PLAYERS).map(|i| payoffs[(leaf * PLAYERS + i) % payoffs.len()]).collect();
        leaf += 1;
        specs.push(NodeSpec::leaf(&name, &u));
    }
    ExtensiveFormGame::new(PLAYERS, specs, "n").expect("generated tree is valid")
}

/// Leaf reached when every player follows their strategy in `profile`.
pub fn walk(g: &ExtensiveFormGame, conv: &NormalFormConversion, profile: &[usize]) -> NodeId {
    let mut node = g.root();
    loop {
        match &g.node(node).kind {
            NodeKind::Leaf { .. } => return node,
            NodeKind::Decision { owner, infoset, edges } => {
                let local = g.player_infosets(*owner).iter().position(|h| h == infoset).unwrap();
                let a = conv.strategies[*owner][profile[*owner]].choices[local];
                node = edges[a].1;
            }
        }
    }
}

/// Random distribution over profiles of `conv.game`, from raw weights.
pub fn profile_distribution(conv: &NormalFormConversion, picks: &[(usize, f64)]) -> qce::Distribution<Profile> {
    let cells = conv.game.cell_count();
    let total: f64 = picks.iter().map(|p| p.1).sum();
    qce::Distribution::new(picks.iter().map(|&(k, w)| (conv.game.profile_of(k % cells), w / total))).unwrap()
}

pub fn picks() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((any::<usize>(), 0.05..1.0f64), 1..=4)
}

pub fn payoffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 90)
}
