use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::games::{NormalFormGame, PlayerId, Profile};
use crate::report::{DeviationMove, EquilibriumReport, PlayerDeviation, Witness};

/// Default equilibrium slack for games with small integer payoffs.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Largest incentive-constraint violation tolerated in an LP solution.
pub const LP_FEASIBILITY_TOL: f64 = 1e-8;

/// Default cap on payoff cells for [`find_ce`].
pub const DEFAULT_CELL_CAP: usize = 1 << 16;

/// A correlating device over action profiles.
pub type CorrelatingDevice = Distribution<Profile>;

pub(crate) fn check_profiles(g: &NormalFormGame, mu: &CorrelatingDevice) -> Result<()> {
    for (profile, _) in mu.iter() {
        if profile.len() != g.players() || profile.iter().enumerate().any(|(i, &a)| a >= g.action_count(i)) {
            return Err(Error::InvalidDistribution(format!("profile {profile:?} does not index the game")));
        }
    }
    Ok(())
}

/// Sum that does not depend on the order of `terms`.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Unnormalized values `Σ_{a: a_i = rec} μ(a) u_i(b, a_{-i})` for every `b`.
fn weighted_values(g: &NormalFormGame, mu: &CorrelatingDevice, player: PlayerId, rec: usize) -> (f64, Vec<f64>) {
    let told: Vec<(&Profile, f64)> = mu.iter().filter(|(pr, _)| pr[player] == rec).collect();
    let mass = ordered_sum(told.iter().map(|&(_, p)| p).collect());
    let vals = (0..g.action_count(player))
        .map(|b| ordered_sum(told.iter().map(|&(profile, p)| p * g.payoff_with(profile, player, b)).collect()))
        .collect();
    (mass, vals)
}

/// Expected utility of each action for `player` conditional on being told
/// `rec`, or `None` if `rec` is never recommended.
pub fn conditional_values(
    g: &NormalFormGame,
    mu: &CorrelatingDevice,
    player: PlayerId,
    rec: usize,
) -> Option<Vec<f64>> {
    let (mass, vals) = weighted_values(g, mu, player, rec);
    (mass > 0.0).then(|| vals.into_iter().map(|v| v / mass).collect())
}

/// Index of the best entry, preferring `preferred` and then the lowest index
/// among exact ties.
pub(crate) fn best_index(vals: &[f64], preferred: usize) -> usize {
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if vals[preferred] >= max {
        preferred
    } else {
        vals.iter().position(|&v| v >= max).unwrap_or(preferred)
    }
}

/// Checks that obeying the device is a best response for every player.
pub fn verify_ce(g: &NormalFormGame, mu: &CorrelatingDevice, eps: f64) -> Result<EquilibriumReport> {
    check_profiles(g, mu)?;
    let mut players = Vec::with_capacity(g.players());
    for i in 0..g.players() {
        let (mut on_path, mut gain) = (Vec::new(), Vec::new());
        let mut moves = Vec::new();
        for rec in 0..g.action_count(i) {
            let (mass, vals) = weighted_values(g, mu, i, rec);
            if mass == 0.0 {
                continue;
            }
            let best = best_index(&vals, rec);
            on_path.push(vals[rec]);
            gain.push(vals[best] - vals[rec]);
            if best != rec {
                moves.push(DeviationMove {
                    when: format!("told {}", g.action_label(i, rec)),
                    play: g.action_label(i, best).to_string(),
                });
            }
        }
        let witness = (!moves.is_empty()).then(|| Witness {
            description: "switch actions after the listed recommendations".into(),
            moves,
            measurement: None,
        });
        let (on_path, gain) = (ordered_sum(on_path), ordered_sum(gain));
        players.push(PlayerDeviation { player: i, on_path, best_value: on_path + gain, gain, exact: true, witness });
    }
    Ok(EquilibriumReport::from_players(players, eps, &[]))
}

/// Largest violation of the CE incentive constraints (0 if all hold).
pub fn ce_constraint_violation(g: &NormalFormGame, mu: &CorrelatingDevice) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..g.players() {
        for rec in 0..g.action_count(i) {
            let (_, vals) = weighted_values(g, mu, i, rec);
            for &v in &vals {
                worst = worst.max(v - vals[rec]);
            }
        }
    }
    worst
}

/// Social welfare: the payoff sum of each cell.
pub fn welfare_objective(g: &NormalFormGame) -> Vec<f64> {
    g.profiles().map(|p| g.payoffs(&p).iter().sum()).collect()
}

/// One player's payoff in each cell.
pub fn player_objective(g: &NormalFormGame, player: PlayerId) -> Vec<f64> {
    g.profiles().map(|p| g.payoff(&p, player)).collect()
}

/// Finds a correlated equilibrium by linear programming over cell
/// probabilities, maximizing `objective` (one coefficient per cell) if given.
pub fn find_ce(g: &NormalFormGame, objective: Option<&[f64]>) -> Result<CorrelatingDevice> {
    find_ce_capped(g, objective, DEFAULT_CELL_CAP)
}

pub fn find_ce_capped(g: &NormalFormGame, objective: Option<&[f64]>, cell_cap: usize) -> Result<CorrelatingDevice> {
    let cells = g.cell_count();
    if cells > cell_cap {
        return Err(Error::CapExceeded { what: "payoff cell", count: cells, cap: cell_cap });
    }
    if let Some(obj) = objective {
        if obj.len() != cells {
            return Err(Error::Dimension(format!("objective has {} coefficients for {cells} cells", obj.len())));
        }
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..cells).map(|c| lp.add_var(objective.map_or(0.0, |o| o[c]), (0.0, f64::INFINITY))).collect();
    lp.add_constraint(vars.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    let profiles: Vec<Profile> = g.profiles().collect();
    for i in 0..g.players() {
        for rec in 0..g.action_count(i) {
            for dev in (0..g.action_count(i)).filter(|&d| d != rec) {
                let terms: Vec<_> = profiles
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p[i] == rec)
                    .map(|(c, p)| (vars[c], g.payoff_with(p, i, dev) - g.payoff(p, i)))
                    .filter(|&(_, w)| w != 0.0)
                    .collect();
                if !terms.is_empty() {
                    lp.add_constraint(terms, ComparisonOp::Le, 0.0);
                }
            }
        }
    }
    let solution = lp.solve().map_err(|e| Error::Solver(e.to_string()))?;
    let raw: Vec<f64> = vars.iter().map(|&v| solution[v].max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Solver("solution has no mass".into()));
    }
    let device = Distribution::new(
        profiles.into_iter().zip(raw).filter(|(_, p)| *p > 0.0).map(|(profile, p)| (profile, p / total)),
    )?;
    let violation = ce_constraint_violation(g, &device);
    if violation > LP_FEASIBILITY_TOL {
        return Err(Error::Solver(format!("solution violates incentive constraints by {violation:e}")));
    }
    Ok(device)
}
