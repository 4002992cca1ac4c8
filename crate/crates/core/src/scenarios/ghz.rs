//! The GHZ game played with the shared state and with every classical
//! deterministic strategy.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quantum::Gate;
use crate::scenarios::corpus::{ghz_state, ghz_wins, input_bits, GHZ_INPUTS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzBranch {
    pub input: String,
    pub win_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzQuantumReport {
    pub branches: Vec<GhzBranch>,
    pub min_win_probability: f64,
}

/// Exact win probability of the Hadamard-if-input-is-1 protocol per input.
pub fn ghz_quantum() -> Result<GhzQuantumReport> {
    let mut branches = Vec::new();
    for input in GHZ_INPUTS {
        let bits = input_bits(input);
        let mut s = ghz_state([0, 1, 2]);
        for (q, &b) in bits.iter().enumerate() {
            if b == 1 {
                s.apply(&Gate::H.matrix(), &[q])?;
            }
        }
        let win: f64 = s
            .outcome_probabilities(&[0, 1, 2])
            .iter()
            .enumerate()
            .filter(|&(k, _)| ghz_wins(bits, [(k >> 2) as u8 & 1, (k >> 1) as u8 & 1, k as u8 & 1]))
            .map(|(_, p)| p)
            .sum();
        branches.push(GhzBranch { input: input.into(), win_probability: win });
    }
    let min_win_probability = branches.iter().map(|b| b.win_probability).fold(f64::INFINITY, f64::min);
    Ok(GhzQuantumReport { branches, min_win_probability })
}

/// A deterministic strategy: output for input 0, output for input 1.
pub type BitMap = [u8; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzClassicalReport {
    pub profiles: usize,
    /// Best win probability against uniformly chosen inputs.
    pub max_win_probability: f64,
    /// A profile attaining it, as `xy` output pairs per player.
    pub best_profile: Vec<String>,
    /// Every profile loses on at least one input.
    pub every_profile_defeated: bool,
    /// Smallest payoff a uniformly mixing Nate gets against any profile.
    pub min_nate_uniform_payoff: f64,
}

pub fn ghz_classical() -> GhzClassicalReport {
    let maps: [BitMap; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];
    let mut profiles = 0;
    let mut best = (-1.0, Vec::new());
    let mut every_defeated = true;
    let mut min_nate = f64::INFINITY;
    for fa in maps {
        for fb in maps {
            for fc in maps {
                profiles += 1;
                let wins = GHZ_INPUTS
                    .iter()
                    .filter(|i| {
                        let b = input_bits(i);
                        ghz_wins(b, [fa[b[0] as usize], fb[b[1] as usize], fc[b[2] as usize]])
                    })
                    .count();
                let p = wins as f64 / GHZ_INPUTS.len() as f64;
                every_defeated &= wins < GHZ_INPUTS.len();
                min_nate = min_nate.min(1.0 - p);
                if p > best.0 {
                    let label = |f: BitMap| format!("{}{}", f[0], f[1]);
                    best = (p, vec![label(fa), label(fb), label(fc)]);
                }
            }
        }
    }
    GhzClassicalReport {
        profiles,
        max_win_probability: best.0,
        best_profile: best.1,
        every_profile_defeated: every_defeated,
        min_nate_uniform_payoff: min_nate,
    }
}
