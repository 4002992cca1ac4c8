use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Probabilities may sum to 1 up to this slack.
pub const SUM_TOL: f64 = 1e-9;

/// A finite probability distribution over keys, kept in key order.
///
/// Used both for outcome distributions (keys are action profiles or leaf
/// ids) and for correlating devices (keys are strategy profiles).
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<K: Ord> {
    entries: BTreeMap<K, f64>,
}

impl<K: Ord + Clone> Distribution<K> {
    /// Merges duplicate keys, drops zero entries and validates the total.
    pub fn new(entries: impl IntoIterator<Item = (K, f64)>) -> Result<Self> {
        let dist = Self::unchecked(entries);
        if let Some((_, &p)) = dist.entries.iter().find(|(_, &p)| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("probability {p} is not a nonnegative finite number")));
        }
        let total = dist.total();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(dist)
    }

    /// Like [`Distribution::new`] but without validation.
    pub fn unchecked(entries: impl IntoIterator<Item = (K, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, p) in entries {
            *map.entry(k).or_insert(0.0) += p;
        }
        map.retain(|_, p| *p != 0.0);
        Self { entries: map }
    }

    pub fn point(key: K) -> Self {
        Self { entries: BTreeMap::from([(key, 1.0)]) }
    }

    pub fn uniform(keys: impl IntoIterator<Item = K>) -> Result<Self> {
        let keys: Vec<K> = keys.into_iter().collect();
        let p = 1.0 / keys.len() as f64;
        Self::new(keys.into_iter().map(|k| (k, p)))
    }

    pub fn prob(&self, key: &K) -> f64 {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.entries.iter().map(|(k, &p)| (k, p))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Expectation of `f` under the distribution.
    pub fn expect(&self, mut f: impl FnMut(&K) -> f64) -> f64 {
        self.entries.iter().map(|(k, &p)| p * f(k)).sum()
    }

    /// Pushes the distribution forward through `f`.
    pub fn map<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> Distribution<L> {
        Distribution::unchecked(self.entries.iter().map(|(k, &p)| (f(k), p)))
    }

    /// Largest per-key probability difference over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &p) in &self.entries {
            worst = worst.max((p - other.prob(k)).abs());
        }
        for (k, &q) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(q);
            }
        }
        worst
    }

    /// Entries with probability above `tol`.
    pub fn support(&self, tol: f64) -> Vec<&K> {
        self.entries.iter().filter(|(_, &p)| p > tol).map(|(k, _)| k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_validates() {
        let d = Distribution::new([(1, 0.25), (2, 0.5), (1, 0.25)]).unwrap();
        assert_eq!(d.prob(&1), 0.5);
        assert_eq!(d.len(), 2);
        assert!(Distribution::new([(1, 0.5)]).is_err());
        assert!(Distribution::new([(1, 1.5), (2, -0.5)]).is_err());
    }

    #[test]
    fn diff_covers_both_supports() {
        let a = Distribution::new([(1, 0.5), (2, 0.5)]).unwrap();
        let b = Distribution::new([(1, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(a.max_abs_diff(&b), 0.5);
        assert_eq!(a.max_abs_diff(&a), 0.0);
    }
}
