use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of an equilibrium check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equilibrium,
    NotEquilibrium,
    /// Some player's deviation value could only be bounded from below.
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equilibrium => "equilibrium",
            Verdict::NotEquilibrium => "not equilibrium",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// One conditional move of a deviation: in situation `when`, play `play`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationMove {
    pub when: String,
    pub play: String,
}

/// The deviation achieving a player's best value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<DeviationMove>,
    /// Projector onto the outcome that selects the player's first action,
    /// as rows of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerDeviation {
    pub player: usize,
    /// Expected utility when everyone follows the protocol.
    pub on_path: f64,
    /// Best deviation value found (an upper bound when `exact` is false and
    /// the verdict is certified, a lower bound when undetermined).
    pub best_value: f64,
    pub gain: f64,
    #[serde(default = "yes")]
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub verdict: Verdict,
    pub eps: f64,
    pub players: Vec<PlayerDeviation>,
}

impl EquilibriumReport {
    /// Verdict from per-player gains: equilibrium iff every gain is at most
    /// `eps`; undetermined players only block a positive verdict.
    pub fn from_players(players: Vec<PlayerDeviation>, eps: f64, undetermined: &[usize]) -> Self {
        let verdict = if players.iter().any(|p| p.gain > eps) {
            Verdict::NotEquilibrium
        } else if !undetermined.is_empty() {
            Verdict::Undetermined
        } else {
            Verdict::Equilibrium
        };
        Self { verdict, eps, players }
    }

    pub fn is_equilibrium(&self) -> bool {
        self.verdict == Verdict::Equilibrium
    }

    pub fn max_gain(&self) -> f64 {
        self.players.iter().map(|p| p.gain).fold(0.0, f64::max)
    }

    pub fn player(&self, i: usize) -> &PlayerDeviation {
        &self.players[i]
    }
}

impl fmt::Display for EquilibriumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {} (eps = {:e})", self.verdict, self.eps)?;
        for p in &self.players {
            write!(
                f,
                "  player {}: on-path {:.10}, best deviation {:.10}, gain {:.10}",
                p.player, p.on_path, p.best_value, p.gain
            )?;
            if !p.exact {
                write!(f, " (bound)")?;
            }
            writeln!(f)?;
            if let Some(w) = &p.witness {
                if !w.description.is_empty() {
                    writeln!(f, "    witness: {}", w.description)?;
                }
                for m in &w.moves {
                    writeln!(f, "    when {} play {}", m.when, m.play)?;
                }
                if let Some(rows) = &w.measurement {
                    writeln!(f, "    measurement (projector for the first action):")?;
                    for row in rows {
                        let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
                        writeln!(f, "      [{}]", cells.join(", "))?;
                    }
                }
            }
        }
        Ok(())
    }
}
