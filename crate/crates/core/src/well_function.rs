//! Well functions, thickenings of the target set, closed sublevel sets, and
//! the contraction used to build point witnesses.
//!
//! Three well functions are computed independently:
//!
//! * [`well_field_prime`]: the distance from `f(x)` to the target set;
//! * [`well_field_second`]: the smallest `r` with `f(x)` in the thickening
//!   `A_r`, found by bisection on thickening membership;
//! * [`well_field_family`]: the least perturbation size that moves `f(x)`
//!   into the targets, for families where this has a closed form.
//!
//! On a refined complex all three are linear per edge.

use std::sync::Arc;

use crate::domain::refine::level_crossings;
use crate::domain::{Complex1D, Location, PlField, Region, ScalarField, Segment, TargetSet};
use crate::error::{Error, Result};
use crate::perturbations::{PerturbationFamily, PerturbedField, Provenance};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    FullSupNorm,
    Shift,
    SampledParametric,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::FullSupNorm => "full",
            FamilyKind::Shift => "shift",
            FamilyKind::SampledParametric => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellVariant {
    /// Distance to the target set.
    Primed,
    /// Infimal thickening radius, by bisection.
    DoublePrimed,
    /// Least perturbation radius within a family.
    FamilyDefinitional(FamilyKind),
}

/// Nonnegative PL field with a tag recording how it was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct WellField<S> {
    field: ScalarField<S>,
    variant: WellVariant,
}

impl<S: Scalar> WellField<S> {
    pub fn variant(&self) -> WellVariant {
        self.variant
    }

    pub fn field(&self) -> &ScalarField<S> {
        &self.field
    }

    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        self.field.complex()
    }

    pub fn values(&self) -> &[S] {
        self.field.values()
    }

    pub fn value(&self, v: usize) -> S {
        self.field.value(v)
    }
}

/// Sorted union of disjoint closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion<S> {
    intervals: Vec<(S, S)>,
}

impl<S: Scalar> IntervalUnion<S> {
    /// Sorts and merges overlapping or touching closed intervals.
    pub fn from_intervals(mut raw: Vec<(S, S)>) -> Self {
        raw.retain(|(lo, hi)| lo <= hi);
        raw.sort_by(|a, b| a.partial_cmp(b).expect("finite interval"));
        let mut intervals: Vec<(S, S)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match intervals.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => intervals.push((lo, hi)),
            }
        }
        Self { intervals }
    }

    pub fn intervals(&self) -> &[(S, S)] {
        &self.intervals
    }

    pub fn contains(&self, y: S) -> bool {
        let idx = self.intervals.partition_point(|(lo, _)| *lo <= y);
        idx > 0 && y <= self.intervals[idx - 1].1
    }

    /// Whether `[lo, hi]` lies inside the union.
    pub fn covers(&self, lo: S, hi: S) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= lo && hi <= b)
    }

    /// Parameter intervals of `{t in [0,1] : lerp(fu, fv, t) in self}`.
    pub fn preimage_on_edge(&self, fu: S, fv: S) -> Vec<(S, S)> {
        if fu == fv {
            return if self.contains(fu) { vec![(S::zero(), S::one())] } else { Vec::new() };
        }
        let param = |y: S| ((y - fu) / (fv - fu)).max(S::zero()).min(S::one());
        let mut out: Vec<(S, S)> = Vec::new();
        for &(lo, hi) in &self.intervals {
            let (a, b) = (param(lo), param(hi));
            let (t0, t1) = if a <= b { (a, b) } else { (b, a) };
            let inside = |t: S| {
                let y = crate::scalar::lerp(fu, fv, t);
                y >= lo && y <= hi
            };
            if t0 < t1 || inside(t0) {
                out.push((t0, t1));
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out
    }
}

/// `A_r`: union of `[a - r, a + r]` over the targets, overlaps merged.
pub fn thicken<S: Scalar>(targets: &TargetSet<S>, r: S) -> Result<IntervalUnion<S>> {
    if r < S::zero() || r.is_nan() {
        return Err(Error::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(IntervalUnion::from_intervals(targets.values().iter().map(|&a| (a - r, a + r)).collect()))
}

/// `min_a |f(v) - a|` at every vertex.
pub fn well_field_prime<S: Scalar>(f: &ScalarField<S>, targets: &TargetSet<S>) -> WellField<S> {
    WellField { field: f.map(|y| targets.distance(y)), variant: WellVariant::Primed }
}

/// Per vertex, the least `r` with `f(v)` in `thicken(A, r)`, located by
/// bisection to absolute tolerance `tol` (at most 64 halvings).
pub fn well_field_second<S: Scalar>(f: &ScalarField<S>, targets: &TargetSet<S>, tol: S) -> Result<WellField<S>> {
    if !(tol > S::zero()) {
        return Err(Error::NonPositiveTolerance(tol.to_f64().unwrap_or(f64::NAN)));
    }
    let member = |y: S, r: S| thicken(targets, r).map(|a| a.contains(y));
    let mut values = Vec::with_capacity(f.values().len());
    for &y in f.values() {
        if member(y, S::zero())? {
            values.push(S::zero());
            continue;
        }
        let mut hi = S::one();
        while !member(y, hi)? {
            hi = hi * S::two();
        }
        let mut lo = S::zero();
        for _ in 0..64 {
            if hi - lo <= tol {
                break;
            }
            let mid = (lo + hi) * S::half();
            if member(y, mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        values.push(hi);
    }
    let field = ScalarField::new(f.complex().clone(), values)?;
    Ok(WellField { field, variant: WellVariant::DoublePrimed })
}

/// The well function defined through the perturbation family itself.
///
/// For the full sup-norm family this coincides with the distance to the
/// targets. For shifts `f + t` it is the least `|t|` with `f(v) + t` in the
/// targets. Sampled families have no closed form.
pub fn well_field_family<S: Scalar>(
    f: &ScalarField<S>,
    targets: &TargetSet<S>,
    family: &PerturbationFamily<S>,
) -> Result<WellField<S>> {
    match family {
        PerturbationFamily::FullSupNorm => Ok(WellField {
            variant: WellVariant::FamilyDefinitional(FamilyKind::FullSupNorm),
            ..well_field_prime(f, targets)
        }),
        PerturbationFamily::Shift => {
            let field = f.map(|y| {
                targets
                    .values()
                    .iter()
                    .map(|&a| (a - y).abs())
                    .fold(S::infinity(), S::min)
            });
            Ok(WellField { field, variant: WellVariant::FamilyDefinitional(FamilyKind::Shift) })
        }
        PerturbationFamily::SampledParametric(_) => Err(Error::NoDefinitionalWellField),
    }
}

/// Portion of an edge inside a closed sublevel set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeCoverage<S> {
    Empty,
    Full,
    /// `[0, t]`, attached to the edge's first endpoint.
    Start(S),
    /// `[t, 1]`, attached to the edge's second endpoint.
    End(S),
}

impl<S: Scalar> EdgeCoverage<S> {
    pub fn interval(&self) -> Option<(S, S)> {
        match *self {
            EdgeCoverage::Empty => None,
            EdgeCoverage::Full => Some((S::zero(), S::one())),
            EdgeCoverage::Start(t) => Some((S::zero(), t)),
            EdgeCoverage::End(t) => Some((t, S::one())),
        }
    }
}

/// Closed sublevel set `{x : w(x) <= r}` of a PL well field.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcomplexSelection<S> {
    pub radius: S,
    pub vertices: Vec<bool>,
    pub edges: Vec<EdgeCoverage<S>>,
}

impl<S: Scalar> SubcomplexSelection<S> {
    pub fn region(&self) -> Region<S> {
        Region {
            vertices: (0..self.vertices.len()).filter(|&v| self.vertices[v]).collect(),
            segments: self
                .edges
                .iter()
                .enumerate()
                .filter_map(|(edge, c)| c.interval().map(|(t0, t1)| Segment { edge, t0, t1 }))
                .collect(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.vertices.iter().all(|&b| b) && self.edges.iter().all(|c| *c == EdgeCoverage::Full)
    }
}

/// Parameter on an edge where a linear `w` with endpoint values `wu`, `wv`
/// (on opposite sides of `r`) equals `r`.
pub(crate) fn crossing_param<S: Scalar>(wu: S, wv: S, r: S) -> S {
    ((r - wu) / (wv - wu)).max(S::zero()).min(S::one())
}

/// Closed sublevel set of `w` at `r`, per edge in closed form.
pub fn sublevel<S: Scalar>(w: &WellField<S>, r: S) -> Result<SubcomplexSelection<S>> {
    if r < S::zero() || r.is_nan() {
        return Err(Error::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    let vertices: Vec<bool> = w.values().iter().map(|&x| x <= r).collect();
    let complex = w.complex();
    let edges = complex
        .edges()
        .iter()
        .map(|e| match (vertices[e.u], vertices[e.v]) {
            (true, true) => EdgeCoverage::Full,
            (false, false) => EdgeCoverage::Empty,
            (true, false) => EdgeCoverage::Start(crossing_param(w.value(e.u), w.value(e.v), r)),
            (false, true) => EdgeCoverage::End(crossing_param(w.value(e.u), w.value(e.v), r)),
        })
        .collect();
    Ok(SubcomplexSelection { radius: r, vertices, edges })
}

/// Point of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanPoint<S>(pub Vec<S>);

impl<S: Scalar> EuclideanPoint<S> {
    pub fn new(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch(0, 1));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { path: "point".into() });
        }
        Ok(Self(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &Self) -> S {
        self.0.iter().zip(&other.0).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<S>().sqrt()
    }
}

/// Contracts the ball of radius `r + eps` about `a` onto `a`, leaves points at
/// distance `>= r + 2 eps` fixed, and rescales radially in between.
/// No point moves by more than `r + 2 eps`.
pub fn contraction_map<S: Scalar>(
    a: &EuclideanPoint<S>,
    r: S,
    eps: S,
    y: &EuclideanPoint<S>,
) -> Result<EuclideanPoint<S>> {
    if a.dim() != y.dim() {
        return Err(Error::DimensionMismatch(a.dim(), y.dim()));
    }
    Ok(EuclideanPoint(contract_coords(&a.0, r, eps, &y.0)?))
}

fn contract_coords<S: Scalar>(a: &[S], r: S, eps: S, y: &[S]) -> Result<Vec<S>> {
    if !(eps > S::zero()) {
        return Err(Error::NonPositiveEpsilon(eps.to_f64().unwrap_or(f64::NAN)));
    }
    if r < S::zero() || r.is_nan() {
        return Err(Error::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    let rho = a.iter().zip(y).map(|(p, q)| (*q - *p) * (*q - *p)).sum::<S>().sqrt();
    let inner = r + eps;
    let outer = r + S::two() * eps;
    if rho <= inner {
        return Ok(a.to_vec());
    }
    if rho >= outer {
        return Ok(y.to_vec());
    }
    let scale = (rho - inner) * outer / eps / rho;
    Ok(a.iter().zip(y).map(|(p, q)| *p + scale * (*q - *p)).collect())
}

/// One-dimensional contraction, used pointwise on real fields.
pub fn contract_scalar<S: Scalar>(a: S, r: S, eps: S, y: S) -> Result<S> {
    Ok(contract_coords(&[a], r, eps, &[y])?[0])
}

/// `h = Phi o f` with `Phi` the contraction about `a` of radius
/// `|f(x) - a|`. Knots are inserted where `f` crosses the two shells, so `h`
/// is PL; `h(x) = a` and `sup |h - f| <= |f(x) - a| + 2 eps`.
pub fn witness_point_perturbation<S: Scalar>(
    f: &ScalarField<S>,
    x: &Location<S>,
    a: S,
    eps: S,
) -> Result<PerturbedField<S>> {
    let fx = f.eval(x)?;
    let r = (fx - a).abs();
    // validates eps before anything is built
    contract_scalar(a, r, eps, fx)?;
    let shells = [
        a - r - S::two() * eps,
        a - r - eps,
        a + r + eps,
        a + r + S::two() * eps,
    ];
    let complex = f.complex().clone();
    let crossings: Vec<Vec<(S, S)>> = (0..complex.edge_count()).map(|e| level_crossings(f, e, &shells)).collect();
    let cuts = crossings.iter().map(|c| c.iter().map(|&(t, _)| t).collect()).collect();
    // Shell crossings get their exact images: the inner shells map to `a`,
    // the outer ones stay put. Evaluating there would amplify rounding by the
    // steep slope of the map.
    let h = PlField::from_fn(complex, cuts, |loc| {
        if let Location::Edge { edge, t } = *loc {
            if let Some(&(_, level)) = crossings[edge].iter().find(|c| c.0 == t) {
                return if level == shells[1] || level == shells[2] { a } else { level };
            }
        }
        contract_scalar(a, r, eps, f.eval_unchecked(loc)).expect("validated parameters")
    });
    PerturbedField::certify(f, h, Provenance::Contraction { target: a, radius: r, eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{refine_for_targets, VertexId};

    fn counterexample() -> (ScalarField<f64>, TargetSet<f64>) {
        let c = Complex1D::new("ce", vec![(VertexId(0), -3.0), (VertexId(1), 3.0)], vec![(VertexId(0), VertexId(1), 6.0)])
            .unwrap();
        let f = ScalarField::new(Arc::new(c), vec![-3.0, 3.0]).unwrap();
        let a = TargetSet::new(vec![-2.0, 2.0]).unwrap();
        (refine_for_targets(&f, &a).field, a)
    }

    fn point_field(values: &[f64]) -> ScalarField<f64> {
        let vs = values.iter().enumerate().map(|(i, _)| (VertexId(i as i64), i as f64)).collect();
        let c = Complex1D::new("pts", vs, vec![]).unwrap();
        ScalarField::new(Arc::new(c), values.to_vec()).unwrap()
    }

    #[test]
    fn prime_values() {
        let (f, a) = counterexample();
        let w = well_field_prime(&f, &a);
        // vertices: -3, 3, -2, 0, 2
        assert_eq!(w.values(), &[1.0, 1.0, 0.0, 2.0, 0.0]);
        let w7 = well_field_prime(&point_field(&[7.0]), &a);
        assert_eq!(w7.values(), &[5.0]);
    }

    #[test]
    fn thicken_examples() {
        let a = TargetSet::new(vec![-2.0, 2.0]).unwrap();
        assert_eq!(thicken(&a, 1.0).unwrap().intervals(), &[(-3.0, -1.0), (1.0, 3.0)]);
        assert_eq!(thicken(&a, 2.0).unwrap().intervals(), &[(-4.0, 4.0)]);
        let z = TargetSet::singleton(0.0).unwrap();
        assert_eq!(thicken(&z, 0.0).unwrap().intervals(), &[(0.0, 0.0)]);
        assert!(thicken(&z, -1.0).is_err());
    }

    #[test]
    fn second_matches_prime_by_bisection() {
        let a = TargetSet::new(vec![-2.0, 2.0]).unwrap();
        let f = point_field(&[0.0, 7.0, 2.0]);
        let w = well_field_second(&f, &a, 1e-9).unwrap();
        assert!((w.value(0) - 2.0).abs() <= 1e-9);
        assert!((w.value(1) - 5.0).abs() <= 1e-9);
        assert_eq!(w.value(2), 0.0);
        assert!(well_field_second(&f, &a, 0.0).is_err());
    }

    #[test]
    fn family_well_fields() {
        let (f, a) = counterexample();
        let shift = well_field_family(&f, &a, &PerturbationFamily::Shift).unwrap();
        assert_eq!(shift.value(3), 2.0);
        assert_eq!(shift.variant(), WellVariant::FamilyDefinitional(FamilyKind::Shift));
        let full = well_field_family(&f, &a, &PerturbationFamily::FullSupNorm).unwrap();
        assert_eq!(full.values(), well_field_prime(&f, &a).values());
        let err = well_field_family(&f, &a, &PerturbationFamily::SampledParametric(vec![])).unwrap_err();
        assert_eq!(err.to_string(), "no definitional well field; supply radii explicitly");
    }

    #[test]
    fn sublevel_of_counterexample() {
        let (f, a) = counterexample();
        let w = well_field_prime(&f, &a);
        let c = w.complex().clone();
        let s1 = sublevel(&w, 1.0).unwrap();
        let mut spans: Vec<(f64, f64)> = s1
            .region()
            .segments
            .iter()
            .map(|s| {
                let p0 = c.position(&Location::Edge { edge: s.edge, t: s.t0 });
                let p1 = c.position(&Location::Edge { edge: s.edge, t: s.t1 });
                (p0.min(p1), p0.max(p1))
            })
            .collect();
        spans.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(spans, vec![(-3.0, -2.0), (-2.0, -1.0), (1.0, 2.0), (2.0, 3.0)]);
        assert!(sublevel(&w, 2.0).unwrap().is_full());
        assert!(sublevel(&w, 100.0).unwrap().is_full());
        assert!(sublevel(&w, -0.5).is_err());
    }

    #[test]
    fn contraction_examples() {
        let a = EuclideanPoint(vec![0.0, 0.0]);
        let inside = EuclideanPoint(vec![1.2, 0.0]);
        assert_eq!(contraction_map(&a, 1.0, 0.5, &inside).unwrap(), a);
        let far = EuclideanPoint(vec![0.0, 3.0]);
        assert_eq!(contraction_map(&a, 1.0, 0.5, &far).unwrap(), far);
        let mid = contraction_map(&a, 1.0, 0.5, &EuclideanPoint(vec![1.75, 0.0])).unwrap();
        assert_eq!(mid, EuclideanPoint(vec![1.0, 0.0]));
        assert!(contraction_map(&a, 1.0, 0.0, &far).is_err());
        assert!(contraction_map(&a, 1.0, 0.5, &EuclideanPoint(vec![1.0])).is_err());
    }

    #[test]
    fn witness_on_counterexample() {
        let (f, _) = counterexample();
        // vertex 3 sits at position 0
        let h = witness_point_perturbation(&f, &Location::Vertex(3), 2.0, 0.1).unwrap();
        assert_eq!(h.field().eval(&Location::Vertex(3)).unwrap(), 2.0);
        assert!(h.distance() <= 2.2);
    }

    #[test]
    fn witness_on_constant_field() {
        let f = point_field(&[4.0, 4.0]);
        let h = witness_point_perturbation(&f, &Location::Vertex(0), 5.0, 0.5).unwrap();
        assert_eq!(h.field().vertex_values(), &[5.0, 5.0]);
        assert_eq!(h.distance(), 1.0);
    }

    #[test]
    fn witness_when_already_on_target() {
        let (f, _) = counterexample();
        let h = witness_point_perturbation(&f, &Location::Vertex(2), -2.0, 0.25).unwrap();
        assert_eq!(h.field().eval(&Location::Vertex(2)).unwrap(), -2.0);
        assert!(h.distance() <= 0.5 + 1e-12);
    }

    #[test]
    fn preimage_matches_thickening() {
        let a = TargetSet::singleton(0.0).unwrap();
        let u = thicken(&a, 1.0).unwrap();
        assert_eq!(u.preimage_on_edge(-3.0, 3.0), vec![(1.0 / 3.0, 2.0 / 3.0)]);
        assert_eq!(u.preimage_on_edge(0.5, 0.5), vec![(0.0, 1.0)]);
        assert!(u.preimage_on_edge(2.0, 2.0).is_empty());
        assert!(u.preimage_on_edge(2.0, 5.0).is_empty());
    }
}
