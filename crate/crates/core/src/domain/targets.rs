use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finite, nonempty, sorted set of distinct target values.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet<S> {
    targets: Vec<S>,
}

impl<S: Scalar> TargetSet<S> {
    /// Sorts and deduplicates the input.
    pub fn new(mut targets: Vec<S>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Schema { path: "$.targets".into(), message: "target set must be nonempty".into() });
        }
        if let Some(i) = targets.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { path: format!("$.targets[{i}]") });
        }
        targets.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        targets.dedup();
        Ok(Self { targets })
    }

    pub fn singleton(a: S) -> Result<Self> {
        Self::new(vec![a])
    }

    pub fn values(&self) -> &[S] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn as_singleton(&self) -> Option<S> {
        match self.targets.as_slice() {
            [a] => Some(*a),
            _ => None,
        }
    }

    pub fn get(&self, i: usize) -> S {
        self.targets[i]
    }

    /// Index of the target nearest to `y` and the distance to it. Ties go to
    /// the lower target.
    pub fn nearest(&self, y: S) -> (usize, S) {
        let idx = self.targets.partition_point(|a| *a < y);
        let mut best = (usize::MAX, S::infinity());
        for i in [idx.wrapping_sub(1), idx] {
            if let Some(&a) = self.targets.get(i) {
                let d = (y - a).abs();
                if d < best.1 || (d == best.1 && i < best.0) {
                    best = (i, d);
                }
            }
        }
        best
    }

    pub fn distance(&self, y: S) -> S {
        self.nearest(y).1
    }

    /// Targets together with the midpoints between consecutive targets: the
    /// levels at which `f - a` changes sign or the nearest target switches.
    pub fn levels(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(2 * self.targets.len());
        for (i, &a) in self.targets.iter().enumerate() {
            if i > 0 {
                out.push((self.targets[i - 1] + a) * S::half());
            }
            out.push(a);
        }
        out
    }

    pub fn contains(&self, y: S) -> bool {
        self.targets.binary_search_by(|a| a.partial_cmp(&y).expect("finite")).is_ok()
    }
}
