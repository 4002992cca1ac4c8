use std::collections::BTreeMap;

use crate::classical::ce::verify_ce;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::games::{ExtensiveFormGame, InfosetId, NodeId, NodeKind, PlayerId, PureStrategy, DEFAULT_STRATEGY_CAP};
use crate::report::{DeviationMove, EquilibriumReport, PlayerDeviation, Witness};

/// Default cap on the number of deviator information states explored per
/// player by [`verify_efce`].
pub const DEFAULT_INFO_STATE_CAP: usize = 1 << 20;

/// Values within this band of the recommended action's value count as ties.
const TIE_BAND: f64 = 1e-12;

/// A device over pure strategy profiles of an extensive-form game.
pub type StrategyDevice = Distribution<Vec<PureStrategy>>;

pub(crate) fn check_device(g: &ExtensiveFormGame, mu: &StrategyDevice) -> Result<()> {
    for (profile, _) in mu.iter() {
        if profile.len() != g.players() {
            return Err(Error::InvalidDistribution(format!(
                "profile has {} strategies for {} players",
                profile.len(),
                g.players()
            )));
        }
        for (i, s) in profile.iter().enumerate() {
            let sets = g.player_infosets(i);
            let ok = s.owner == i
                && s.choices.len() == sets.len()
                && s.choices.iter().zip(sets).all(|(&a, &h)| a < g.infoset(h).actions.len());
            if !ok {
                return Err(Error::InvalidDistribution(format!("entry {i} is not a pure strategy of player {i}")));
            }
        }
    }
    Ok(())
}

/// What the deviator knows when asked to move: the information sets reached
/// so far and the recommendation received at each, the current one last.
type InfoState = Vec<(InfosetId, usize)>;

/// A deviator decision point of one device outcome.
#[derive(Clone, Copy)]
struct Position {
    weight: f64,
    world: usize,
    node: NodeId,
}

struct Search<'a> {
    game: &'a ExtensiveFormGame,
    worlds: Vec<(&'a [PureStrategy], f64)>,
    player: PlayerId,
    visited: usize,
    cap: usize,
}

struct Solved {
    value: f64,
    moves: Vec<DeviationMove>,
}

impl<'a> Search<'a> {
    /// Follows the other players' recommendations until a leaf or one of the
    /// deviator's nodes.
    fn advance(&self, world: usize, mut node: NodeId) -> NodeId {
        loop {
            match &self.game.node(node).kind {
                NodeKind::Leaf { .. } => return node,
                NodeKind::Decision { owner, .. } if *owner == self.player => return node,
                NodeKind::Decision { owner, infoset, .. } => {
                    let a = self.worlds[world].0[*owner].choice(self.game, *infoset);
                    node = self.game.child(node, a);
                }
            }
        }
    }

    /// Splits positions into leaf value and the deviator's next info states.
    fn distribute(
        &self,
        prefix: &InfoState,
        arrivals: impl Iterator<Item = Position>,
    ) -> (f64, BTreeMap<InfoState, Vec<Position>>) {
        let mut leaf_value = 0.0;
        let mut next: BTreeMap<InfoState, Vec<Position>> = BTreeMap::new();
        for pos in arrivals {
            let node = self.advance(pos.world, pos.node);
            match &self.game.node(node).kind {
                NodeKind::Leaf { payoffs } => leaf_value += pos.weight * payoffs[self.player],
                NodeKind::Decision { infoset, .. } => {
                    let rec = self.worlds[pos.world].0[self.player].choice(self.game, *infoset);
                    let mut key = prefix.clone();
                    key.push((*infoset, rec));
                    next.entry(key).or_default().push(Position { node, ..pos });
                }
            }
        }
        (leaf_value, next)
    }

    fn solve_all(&mut self, groups: BTreeMap<InfoState, Vec<Position>>) -> Result<Solved> {
        let mut total = Solved { value: 0.0, moves: Vec::new() };
        for (state, positions) in groups {
            let s = self.solve(state, positions)?;
            total.value += s.value;
            total.moves.extend(s.moves);
        }
        Ok(total)
    }

    fn solve(&mut self, state: InfoState, positions: Vec<Position>) -> Result<Solved> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(Error::CapExceeded { what: "deviation information state", count: self.visited, cap: self.cap });
        }
        let &(h, rec) = state.last().expect("info state is never empty");
        let actions = self.game.infoset(h).actions.len();
        let mut options = Vec::with_capacity(actions);
        for a in 0..actions {
            let arrivals =
                positions.iter().map(|p| Position { node: self.game.child(p.node, a), ..*p }).collect::<Vec<_>>();
            let (leaf_value, next) = self.distribute(&state, arrivals.into_iter());
            let mut s = self.solve_all(next)?;
            s.value += leaf_value;
            options.push(s);
        }
        let max = options.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
        let best = if options[rec].value >= max - TIE_BAND {
            rec
        } else {
            options.iter().position(|s| s.value >= max - TIE_BAND).unwrap_or(rec)
        };
        let mut chosen = options.swap_remove(best);
        if best != rec {
            let set = self.game.infoset(h);
            chosen
                .moves
                .insert(0, DeviationMove { when: describe(self.game, &state), play: set.actions[best].clone() });
        }
        Ok(chosen)
    }
}

fn describe(g: &ExtensiveFormGame, state: &InfoState) -> String {
    let parts: Vec<String> =
        state.iter().map(|&(h, r)| format!("{}: told {}", g.infoset(h).name, g.infoset(h).actions[r])).collect();
    parts.join(", ")
}

/// Exact EFCE check.
///
/// For each player the best deviation plan is found by recursion over the
/// player's information states (information set plus the recommendations
/// received so far). Recommendations keep arriving at every own information
/// set that is reached, including after a deviation.
pub fn verify_efce(g: &ExtensiveFormGame, mu: &StrategyDevice, eps: f64) -> Result<EquilibriumReport> {
    verify_efce_capped(g, mu, eps, DEFAULT_INFO_STATE_CAP)
}

pub fn verify_efce_capped(
    g: &ExtensiveFormGame,
    mu: &StrategyDevice,
    eps: f64,
    cap: usize,
) -> Result<EquilibriumReport> {
    g.ensure_valid()?;
    check_device(g, mu)?;
    let worlds: Vec<(&[PureStrategy], f64)> = mu.iter().map(|(p, w)| (p.as_slice(), w)).collect();
    let mut players = Vec::with_capacity(g.players());
    for i in 0..g.players() {
        let on_path: f64 =
            worlds.iter().map(|&(p, w)| w * g.leaf_payoffs(g.play(p)).expect("play ends at a leaf")[i]).sum();
        let mut search = Search { game: g, worlds: worlds.clone(), player: i, visited: 0, cap };
        let starts = (0..worlds.len()).map(|k| Position { weight: worlds[k].1, world: k, node: g.root() });
        let (leaf_value, groups) = search.distribute(&Vec::new(), starts);
        let mut best = search.solve_all(groups)?;
        best.value += leaf_value;
        let gain = (best.value - on_path).max(0.0);
        let witness = (!best.moves.is_empty()).then(|| Witness {
            description: "deviate at the listed information states, follow elsewhere".into(),
            moves: best.moves,
            measurement: None,
        });
        players.push(PlayerDeviation { player: i, on_path, best_value: best.value, gain, exact: true, witness });
    }
    Ok(EquilibriumReport::from_players(players, eps, &[]))
}

/// IR-EFCE check: every player sees their whole recommended strategy up front,
/// which is a correlated equilibrium check on the normal form.
pub fn verify_ir_efce(g: &ExtensiveFormGame, mu: &StrategyDevice, eps: f64) -> Result<EquilibriumReport> {
    verify_ir_efce_capped(g, mu, eps, DEFAULT_STRATEGY_CAP)
}

pub fn verify_ir_efce_capped(
    g: &ExtensiveFormGame,
    mu: &StrategyDevice,
    eps: f64,
    strategy_cap: usize,
) -> Result<EquilibriumReport> {
    check_device(g, mu)?;
    let conv = g.to_normal_form(strategy_cap)?;
    let device = conv.push_device(mu)?;
    let mut report = verify_ce(&conv.game, &device, eps)?;
    for p in &mut report.players {
        if let Some(w) = &mut p.witness {
            w.description = "replace the whole recommended strategy as listed".into();
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::NodeSpec;

    /// Player 0 picks OUT (3 each) or IN; then player 1 picks a/b and
    /// player 0 picks L/R without seeing it.
    fn fig3() -> ExtensiveFormGame {
        ExtensiveFormGame::new(
            2,
            vec![
                NodeSpec::decision("root", 0, "p1_start", &[("OUT", "out"), ("IN", "in")]),
                NodeSpec::leaf("out", &[3.0, 3.0]),
                NodeSpec::decision("in", 1, "p2", &[("a", "a"), ("b", "b")]),
                NodeSpec::decision("a", 0, "p1_move", &[("L", "al"), ("R", "ar")]),
                NodeSpec::decision("b", 0, "p1_move", &[("L", "bl"), ("R", "br")]),
                NodeSpec::leaf("al", &[100.0, 2.0]),
                NodeSpec::leaf("ar", &[0.0, 0.0]),
                NodeSpec::leaf("bl", &[0.0, 0.0]),
                NodeSpec::leaf("br", &[2.0, 100.0]),
            ],
            "root",
        )
        .unwrap()
    }

    fn device(g: &ExtensiveFormGame) -> StrategyDevice {
        let s = |o, pairs: &[(&str, &str)]| PureStrategy::from_choices(g, o, pairs).unwrap();
        Distribution::new([
            (vec![s(0, &[("p1_start", "IN"), ("p1_move", "L")]), s(1, &[("p2", "a")])], 0.5),
            (vec![s(0, &[("p1_start", "IN"), ("p1_move", "R")]), s(1, &[("p2", "b")])], 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn fig3_is_efce_but_not_ir_efce() {
        let g = fig3();
        let mu = device(&g);
        let efce = verify_efce(&g, &mu, 1e-9).unwrap();
        assert!(efce.is_equilibrium(), "{efce}");
        assert_eq!(efce.player(0).on_path, 51.0);
        let ir = verify_ir_efce(&g, &mu, 1e-9).unwrap();
        assert!(!ir.is_equilibrium());
        assert_eq!(ir.player(0).best_value, 51.5);
        assert_eq!(ir.player(0).gain, 0.5);
        let w = ir.player(0).witness.as_ref().unwrap();
        assert_eq!(w.moves[0].when, "told IN·R");
        assert!(w.moves[0].play.starts_with("OUT"));
    }

    #[test]
    fn profitable_first_move_is_found() {
        // Recommending IN·R with b for sure leaves player 0 with 2 < 3.
        let g = fig3();
        let s = |o, pairs: &[(&str, &str)]| PureStrategy::from_choices(&g, o, pairs).unwrap();
        let mu = Distribution::point(vec![s(0, &[("p1_start", "IN"), ("p1_move", "R")]), s(1, &[("p2", "b")])]);
        let rep = verify_efce(&g, &mu, 1e-9).unwrap();
        assert_eq!(rep.player(0).gain, 1.0);
        assert_eq!(rep.player(0).witness.as_ref().unwrap().moves[0].play, "OUT");
        assert_eq!(rep.player(1).gain, 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = fig3();
        let err = verify_efce_capped(&g, &device(&g), 1e-9, 1).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
