use std::collections::HashSet;

use crate::distribution::Distribution;
use crate::error::{Error, Result};

pub type PlayerId = usize;

/// One action index per player.
pub type Profile = Vec<usize>;

/// A finite game in strategic form.
///
/// Payoff cells are stored in row-major order of action indices: player 0's
/// action varies slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame {
    actions: Vec<Vec<String>>,
    payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    pub fn new(actions: Vec<Vec<String>>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let n = actions.len();
        if n == 0 {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        for (i, labels) in actions.iter().enumerate() {
            if labels.is_empty() {
                return Err(Error::InvalidGame(format!("player {i} has no actions")));
            }
            let mut seen = HashSet::new();
            if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
                return Err(Error::InvalidGame(format!("player {i} repeats action label `{dup}`")));
            }
        }
        let cells = actions
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
            .ok_or_else(|| Error::InvalidGame("payoff tensor too large".into()))?;
        if payoffs.len() != cells {
            return Err(Error::InvalidGame(format!("expected {cells} payoff cells, found {}", payoffs.len())));
        }
        for (k, cell) in payoffs.iter().enumerate() {
            if cell.len() != n {
                return Err(Error::InvalidGame(format!("cell {k} has {} payoffs for {n} players", cell.len())));
            }
            if cell.iter().any(|u| !u.is_finite()) {
                return Err(Error::InvalidGame(format!("cell {k} has a non-finite payoff")));
            }
        }
        Ok(Self { actions, payoffs })
    }

    /// Convenience constructor from string slices.
    pub fn from_labels(actions: &[&[&str]], payoffs: &[&[f64]]) -> Result<Self> {
        Self::new(
            actions.iter().map(|a| a.iter().map(|s| s.to_string()).collect()).collect(),
            payoffs.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn action_count(&self, player: PlayerId) -> usize {
        self.actions[player].len()
    }

    pub fn action_labels(&self, player: PlayerId) -> &[String] {
        &self.actions[player]
    }

    pub fn action_label(&self, player: PlayerId, action: usize) -> &str {
        &self.actions[player][action]
    }

    pub fn action_index(&self, player: PlayerId, label: &str) -> Option<usize> {
        self.actions[player].iter().position(|l| l == label)
    }

    pub fn cell_count(&self) -> usize {
        self.payoffs.len()
    }

    pub fn cell_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.players());
        profile.iter().zip(&self.actions).fold(0, |acc, (&a, labels)| acc * labels.len() + a)
    }

    pub fn profile_of(&self, mut cell: usize) -> Profile {
        let mut profile = vec![0; self.players()];
        for i in (0..self.players()).rev() {
            let m = self.actions[i].len();
            profile[i] = cell % m;
            cell /= m;
        }
        profile
    }

    /// All action profiles in cell order.
    pub fn profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.cell_count()).map(|c| self.profile_of(c))
    }

    pub fn payoffs(&self, profile: &[usize]) -> &[f64] {
        &self.payoffs[self.cell_index(profile)]
    }

    pub fn payoff(&self, profile: &[usize], player: PlayerId) -> f64 {
        self.payoffs(profile)[player]
    }

    /// Payoff to `player` if they switch to `action` while the others keep `profile`.
    pub fn payoff_with(&self, profile: &[usize], player: PlayerId, action: usize) -> f64 {
        let mut p = profile.to_vec();
        p[player] = action;
        self.payoff(&p, player)
    }

    pub fn expected_payoffs(&self, dist: &Distribution<Profile>) -> Vec<f64> {
        (0..self.players()).map(|i| dist.expect(|p| self.payoff(p, i))).collect()
    }

    /// Labels of a profile, e.g. `["T", "R"]`.
    pub fn profile_labels(&self, profile: &[usize]) -> Vec<String> {
        profile.iter().enumerate().map(|(i, &a)| self.actions[i][a].clone()).collect()
    }

    /// Compact label: concatenated when every label is one character (`TR`),
    /// comma-joined otherwise.
    pub fn profile_name(&self, profile: &[usize]) -> String {
        let labels = self.profile_labels(profile);
        if labels.iter().all(|l| l.chars().count() == 1) {
            labels.concat()
        } else {
            format!("({})", labels.join(","))
        }
    }

    pub fn profile_from_labels(&self, labels: &[impl AsRef<str>]) -> Result<Profile> {
        if labels.len() != self.players() {
            return Err(Error::InvalidGame(format!(
                "profile has {} entries for {} players",
                labels.len(),
                self.players()
            )));
        }
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                self.action_index(i, l.as_ref())
                    .ok_or_else(|| Error::InvalidGame(format!("player {i} has no action `{}`", l.as_ref())))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> NormalFormGame {
        NormalFormGame::from_labels(&[&["T", "B"], &["L", "R"]], &[&[0.0, 0.0], &[6.0, 6.0], &[6.0, 6.0], &[0.0, 0.0]])
            .unwrap()
    }

    #[test]
    fn row_major_indexing() {
        let g = fig2();
        assert_eq!(g.cell_index(&[0, 1]), 1);
        assert_eq!(g.profile_of(2), vec![1, 0]);
        assert_eq!(g.payoff(&[1, 0], 0), 6.0);
        assert_eq!(g.profile_name(&[0, 1]), "TR");
        for c in 0..g.cell_count() {
            assert_eq!(g.cell_index(&g.profile_of(c)), c);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(NormalFormGame::from_labels(&[&["T", "T"]], &[&[0.0], &[0.0]]).is_err());
        assert!(NormalFormGame::from_labels(&[&["T", "B"], &["L"]], &[&[0.0, 0.0]]).is_err());
        assert!(NormalFormGame::from_labels(&[&["T"]], &[&[f64::NAN]]).is_err());
    }
}
