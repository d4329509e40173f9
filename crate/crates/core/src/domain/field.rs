use std::sync::Arc;

use crate::domain::complex::{Complex1D, Location};
use crate::error::{Error, Result};
use crate::scalar::{lerp, Scalar};

/// Real-valued field given by one value per vertex, linear along each edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<S> {
    complex: Arc<Complex1D<S>>,
    values: Vec<S>,
}

impl<S: Scalar> ScalarField<S> {
    pub fn new(complex: Arc<Complex1D<S>>, values: Vec<S>) -> Result<Self> {
        if values.len() != complex.vertex_count() {
            return Err(Error::Schema {
                path: "$.field".into(),
                message: format!(
                    "expected {} vertex values, got {}",
                    complex.vertex_count(),
                    values.len()
                ),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let id = complex.vertex(i).id;
            return Err(Error::NonFinite { path: format!("$.field.{id}") });
        }
        Ok(Self { complex, values })
    }

    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        &self.complex
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, v: usize) -> S {
        self.values[v]
    }

    /// Values at the two endpoints of edge `e`, in edge orientation.
    pub fn edge_values(&self, e: usize) -> (S, S) {
        let edge = self.complex.edge(e);
        (self.values[edge.u], self.values[edge.v])
    }

    pub fn eval(&self, loc: &Location<S>) -> Result<S> {
        self.complex.validate_location(loc)?;
        Ok(self.eval_unchecked(loc))
    }

    pub(crate) fn eval_unchecked(&self, loc: &Location<S>) -> S {
        match *loc {
            Location::Vertex(v) => self.values[v],
            Location::Edge { edge, t } => {
                let (a, b) = self.edge_values(edge);
                lerp(a, b, t)
            }
        }
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self { complex: self.complex.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn max_value(&self) -> Option<S> {
        self.values.iter().copied().reduce(S::max)
    }
}

/// Interior breakpoint of a [`PlField`] on an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot<S> {
    pub t: S,
    pub value: S,
}

/// Piecewise-linear field: vertex values plus sorted interior knots on each
/// edge, linear between consecutive knots.
///
/// Perturbations built from clamps, contractions and blends need breakpoints
/// strictly inside edges; carrying them as knots keeps every perturbation on
/// the same underlying complex so that two of them can be combined directly.
#[derive(Debug, Clone, PartialEq)]
pub struct PlField<S> {
    complex: Arc<Complex1D<S>>,
    vertex_values: Vec<S>,
    knots: Vec<Vec<Knot<S>>>,
}

impl<S: Scalar> From<&ScalarField<S>> for PlField<S> {
    fn from(f: &ScalarField<S>) -> Self {
        Self {
            complex: f.complex.clone(),
            vertex_values: f.values.clone(),
            knots: vec![Vec::new(); f.complex.edge_count()],
        }
    }
}

impl<S: Scalar> PlField<S> {
    /// Samples `value` at every vertex and at the given interior parameters.
    /// Cut lists are sorted and deduplicated here.
    pub fn from_fn(
        complex: Arc<Complex1D<S>>,
        mut cuts: Vec<Vec<S>>,
        value: impl Fn(&Location<S>) -> S,
    ) -> Self {
        cuts.resize(complex.edge_count(), Vec::new());
        let vertex_values = (0..complex.vertex_count()).map(|v| value(&Location::Vertex(v))).collect();
        let knots = cuts
            .into_iter()
            .enumerate()
            .map(|(edge, ts)| {
                normalize_cuts(ts)
                    .into_iter()
                    .map(|t| Knot { t, value: value(&Location::Edge { edge, t }) })
                    .collect()
            })
            .collect();
        Self { complex, vertex_values, knots }
    }

    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        &self.complex
    }

    pub fn vertex_values(&self) -> &[S] {
        &self.vertex_values
    }

    pub fn knots(&self, edge: usize) -> &[Knot<S>] {
        &self.knots[edge]
    }

    pub fn knot_count(&self) -> usize {
        self.knots.iter().map(Vec::len).sum()
    }

    pub fn eval(&self, loc: &Location<S>) -> Result<S> {
        self.complex.validate_location(loc)?;
        Ok(self.eval_unchecked(loc))
    }

    pub(crate) fn eval_unchecked(&self, loc: &Location<S>) -> S {
        match *loc {
            Location::Vertex(v) => self.vertex_values[v],
            Location::Edge { edge, t } => self.eval_edge(edge, t),
        }
    }

    fn eval_edge(&self, edge: usize, t: S) -> S {
        let e = self.complex.edge(edge);
        let knots = &self.knots[edge];
        let idx = knots.partition_point(|k| k.t <= t);
        let (t0, v0) = if idx == 0 {
            (S::zero(), self.vertex_values[e.u])
        } else {
            (knots[idx - 1].t, knots[idx - 1].value)
        };
        if t == t0 {
            return v0;
        }
        let (t1, v1) = if idx == knots.len() {
            (S::one(), self.vertex_values[e.v])
        } else {
            (knots[idx].t, knots[idx].value)
        };
        lerp(v0, v1, (t - t0) / (t1 - t0))
    }

    /// `(t, value)` breakpoints of edge `e` including both endpoints.
    pub fn edge_samples(&self, edge: usize) -> Vec<(S, S)> {
        let e = self.complex.edge(edge);
        let mut out = Vec::with_capacity(self.knots[edge].len() + 2);
        out.push((S::zero(), self.vertex_values[e.u]));
        out.extend(self.knots[edge].iter().map(|k| (k.t, k.value)));
        out.push((S::one(), self.vertex_values[e.v]));
        out
    }

    /// Breakpoints of edge `e` restricted to `[t0, t1]`, endpoints included.
    pub fn samples_within(&self, edge: usize, t0: S, t1: S) -> Vec<(S, S)> {
        let mut out = vec![(t0, self.eval_edge(edge, t0))];
        out.extend(self.knots[edge].iter().filter(|k| k.t > t0 && k.t < t1).map(|k| (k.t, k.value)));
        if t1 > t0 {
            out.push((t1, self.eval_edge(edge, t1)));
        }
        out
    }

    pub fn cut_params(&self) -> Vec<Vec<S>> {
        self.knots.iter().map(|ks| ks.iter().map(|k| k.t).collect()).collect()
    }

    /// Same function, with extra breakpoints inserted at `cuts`.
    pub fn with_cuts(&self, cuts: &[Vec<S>]) -> Self {
        let merged = merge_cuts(&[self.cut_params(), cuts.to_vec()]);
        Self::from_fn(self.complex.clone(), merged, |loc| self.eval_unchecked(loc))
    }

    pub fn same_complex(&self, other: &Arc<Complex1D<S>>) -> bool {
        Arc::ptr_eq(&self.complex, other) || *self.complex == **other
    }

    /// Pointwise combination on the common refinement of both knot sets.
    pub fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self> {
        if !self.same_complex(&other.complex) {
            return Err(Error::ComplexMismatch);
        }
        let cuts = merge_cuts(&[self.cut_params(), other.cut_params()]);
        Ok(Self::from_fn(self.complex.clone(), cuts, |loc| {
            f(self.eval_unchecked(loc), other.eval_unchecked(loc))
        }))
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            complex: self.complex.clone(),
            vertex_values: self.vertex_values.iter().map(|&v| f(v)).collect(),
            knots: self
                .knots
                .iter()
                .map(|ks| ks.iter().map(|k| Knot { t: k.t, value: f(k.value) }).collect())
                .collect(),
        }
    }

    /// Largest `|self - other|` over the complex. Exact, since the difference
    /// is linear between consecutive breakpoints of the two fields.
    pub fn sup_distance(&self, other: &Self) -> Result<S> {
        let diff = self.zip_with(other, |a, b| (a - b).abs())?;
        let mut best = diff.vertex_values.iter().copied().fold(S::zero(), S::max);
        for ks in &diff.knots {
            for k in ks {
                best = best.max(k.value);
            }
        }
        Ok(best)
    }

    /// Expands knots into vertices, returning a complex on which the field is
    /// linear per edge. New vertices get fresh ids above the current maximum.
    pub fn materialize(&self) -> ScalarField<S> {
        let refined = crate::domain::refine::subdivide(&self.complex, &self.cut_params());
        let values = refined
            .vertex_origin()
            .iter()
            .map(|loc| self.eval_unchecked(loc))
            .collect();
        ScalarField { complex: refined.complex().clone(), values }
    }
}

/// Sorts, drops parameters outside the open unit interval, and merges
/// parameters closer than the dedup tolerance.
pub(crate) fn normalize_cuts<S: Scalar>(mut ts: Vec<S>) -> Vec<S> {
    ts.retain(|t| *t > S::zero() && *t < S::one());
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut parameter"));
    let tol = S::dedup_tol();
    let mut out: Vec<S> = Vec::with_capacity(ts.len());
    for t in ts {
        if out.last().is_none_or(|last| t - *last > tol) {
            out.push(t);
        }
    }
    out
}

pub(crate) fn merge_cuts<S: Scalar>(sets: &[Vec<Vec<S>>]) -> Vec<Vec<S>> {
    let n = sets.iter().map(Vec::len).max().unwrap_or(0);
    (0..n)
        .map(|e| {
            let all: Vec<S> = sets.iter().filter_map(|s| s.get(e)).flatten().copied().collect();
            normalize_cuts(all)
        })
        .collect()
}
