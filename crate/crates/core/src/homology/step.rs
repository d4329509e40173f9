use crate::scalar::Scalar;

/// Integer-valued step function on `[0, inf)`.
///
/// `points[0] = 0`; `at[i]` is the value at `points[i]` and `after[i]` the
/// value on the open interval up to the next point (or infinity).
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<S> {
    points: Vec<S>,
    at: Vec<usize>,
    after: Vec<usize>,
}

/// Maximal interval of constant value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInterval<S> {
    pub lo: S,
    /// `None` for an interval unbounded above.
    pub hi: Option<S>,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub value: usize,
}

impl<S: Scalar> StepFunction<S> {
    pub fn new(points: Vec<S>, at: Vec<usize>, after: Vec<usize>) -> Self {
        assert!(!points.is_empty() && points[0] == S::zero(), "step function starts at 0");
        assert!(points.windows(2).all(|w| w[0] < w[1]), "breakpoints strictly increasing");
        assert!(at.len() == points.len() && after.len() == points.len());
        Self { points, at, after }.simplified()
    }

    pub fn constant(value: usize) -> Self {
        Self { points: vec![S::zero()], at: vec![value], after: vec![value] }
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    /// Values at the breakpoints.
    pub fn at(&self) -> &[usize] {
        &self.at
    }

    /// Values on the open intervals after each breakpoint.
    pub fn after(&self) -> &[usize] {
        &self.after
    }

    pub fn eval(&self, r: S) -> usize {
        let idx = self.points.partition_point(|p| *p <= r);
        if idx == 0 {
            return self.at[0];
        }
        if self.points[idx - 1] == r {
            self.at[idx - 1]
        } else {
            self.after[idx - 1]
        }
    }

    /// Value on the open interval just right of `r`.
    pub fn eval_right(&self, r: S) -> usize {
        let idx = self.points.partition_point(|p| *p <= r);
        self.after[idx.max(1) - 1]
    }

    /// Drops breakpoints where the value does not change.
    fn simplified(self) -> Self {
        let n = self.points.len();
        let keep: Vec<usize> = (0..n)
            .filter(|&i| i == 0 || !(self.at[i] == self.after[i - 1] && self.at[i] == self.after[i]))
            .collect();
        Self {
            points: keep.iter().map(|&i| self.points[i]).collect(),
            at: keep.iter().map(|&i| self.at[i]).collect(),
            after: keep.iter().map(|&i| self.after[i]).collect(),
        }
    }

    /// Maximal constant pieces with their open/closed ends.
    pub fn intervals(&self) -> Vec<StepInterval<S>> {
        let mut out: Vec<StepInterval<S>> = Vec::new();
        for i in 0..self.points.len() {
            let p = self.points[i];
            let next = self.points.get(i + 1).copied();
            match out.last_mut() {
                Some(last) if last.value == self.at[i] => {
                    last.hi = Some(p);
                    last.hi_closed = true;
                }
                _ => out.push(StepInterval { lo: p, hi: Some(p), lo_closed: true, hi_closed: true, value: self.at[i] }),
            }
            match out.last_mut() {
                Some(last) if last.value == self.after[i] => {
                    last.hi = next;
                    last.hi_closed = false;
                }
                _ => out.push(StepInterval { lo: p, hi: next, lo_closed: false, hi_closed: false, value: self.after[i] }),
            }
        }
        out
    }
}

impl<S: Scalar> StepInterval<S> {
    /// `[0,1]:2`, `(1,2):0`, `(5,inf):0` style label.
    pub fn label(&self) -> String {
        let lo = if self.lo_closed { '[' } else { '(' };
        let hi = if self.hi_closed { ']' } else { ')' };
        let upper = match self.hi {
            Some(h) => format!("{h}"),
            None => "inf".to_string(),
        };
        format!("{lo}{},{upper}{hi}:{}", self.lo, self.value)
    }
}
