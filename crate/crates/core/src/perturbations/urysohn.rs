use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::domain::field::merge_cuts;
use crate::domain::{Complex1D, Location, PlField, Region, ScalarField, TargetSet};
use crate::error::{Error, Result};
use crate::perturbations::{zeros_on, PerturbedField, Provenance};
use crate::scalar::Scalar;

/// Path-length distance to a closed region of the complex.
#[derive(Debug, Clone)]
pub struct RegionDistance<'a, S> {
    complex: &'a Complex1D<S>,
    region: &'a Region<S>,
    vertex: Vec<S>,
}

struct Entry<S>(S, usize);

impl<S: PartialOrd> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: PartialOrd> Eq for Entry<S> {}
impl<S: PartialOrd> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: PartialOrd> Ord for Entry<S> {
    // reversed for a min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(other.1.cmp(&self.1))
    }
}

impl<'a, S: Scalar> RegionDistance<'a, S> {
    pub fn new(complex: &'a Complex1D<S>, region: &'a Region<S>) -> Self {
        let n = complex.vertex_count();
        let mut dist = vec![S::infinity(); n];
        let mut heap = BinaryHeap::new();
        let mut seed = |v: usize, d: S, heap: &mut BinaryHeap<Entry<S>>| {
            if d < dist[v] {
                dist[v] = d;
                heap.push(Entry(d, v));
            }
        };
        for &v in &region.vertices {
            seed(v, S::zero(), &mut heap);
        }
        for s in &region.segments {
            let e = complex.edge(s.edge);
            seed(e.u, s.t0 * e.length, &mut heap);
            seed(e.v, (S::one() - s.t1) * e.length, &mut heap);
        }
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &e in complex.incident(v) {
                let u = complex.other_end(e, v);
                let nd = d + complex.edge(e).length;
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Entry(nd, u));
                }
            }
        }
        Self { complex, region, vertex: dist }
    }

    pub fn at_vertex(&self, v: usize) -> S {
        self.vertex[v]
    }

    pub fn at(&self, loc: &Location<S>) -> S {
        match self.complex.normalize(*loc) {
            Location::Vertex(v) => self.vertex[v],
            Location::Edge { edge, t } => {
                let e = self.complex.edge(edge);
                let mut d = (self.vertex[e.u] + t * e.length).min(self.vertex[e.v] + (S::one() - t) * e.length);
                for s in self.region.segments.iter().filter(|s| s.edge == edge) {
                    if s.contains(t) {
                        return S::zero();
                    }
                    let gap = if t < s.t0 { s.t0 - t } else { t - s.t1 };
                    d = d.min(gap * e.length);
                }
                d
            }
        }
    }

    /// Smallest distance from any point of `other` to this region.
    pub fn gap_to(&self, other: &Region<S>) -> S {
        let mut best = S::infinity();
        for &v in &other.vertices {
            best = best.min(self.vertex[v]);
        }
        // Off this region's own pieces of the edge the distance is concave
        // along a segment, so overlaps plus the two ends suffice.
        for s in &other.segments {
            if self.region.segments.iter().any(|p| p.edge == s.edge && p.t0 <= s.t1 && s.t0 <= p.t1) {
                return S::zero();
            }
            best = best.min(self.at(&Location::Edge { edge: s.edge, t: s.t0 }));
            best = best.min(self.at(&Location::Edge { edge: s.edge, t: s.t1 }));
        }
        best
    }
}

/// Weight that is 1 on one region and 0 on another, PL on the complex.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendWeights<S> {
    weights: PlField<S>,
}

impl<S: Scalar> BlendWeights<S> {
    pub fn field(&self) -> &PlField<S> {
        &self.weights
    }

    pub fn eval(&self, loc: &Location<S>) -> Result<S> {
        self.weights.eval(loc)
    }
}

fn ratio<S: Scalar>(d_near: S, d_far: S) -> S {
    if d_far.is_infinite() || d_near == S::zero() {
        S::one()
    } else if d_near.is_infinite() {
        S::zero()
    } else {
        d_far / (d_near + d_far)
    }
}

/// `d(x, far) / (d(x, near) + d(x, far))` sampled at vertices and at the
/// boundary points of both regions, linear in between.
pub fn urysohn<S: Scalar>(complex: &Arc<Complex1D<S>>, near: &Region<S>, far: &Region<S>) -> Result<BlendWeights<S>> {
    let dn = RegionDistance::new(complex, near);
    let df = RegionDistance::new(complex, far);
    if !near.is_empty() && !far.is_empty() && !(dn.gap_to(far) > S::zero()) {
        return Err(Error::RegionsNotSeparated);
    }
    let m = complex.edge_count();
    let cuts = merge_cuts(&[near.interior_cuts(m), far.interior_cuts(m)]);
    let weights = PlField::from_fn(complex.clone(), cuts, |loc| {
        if near.contains(complex, loc) {
            S::one()
        } else if far.contains(complex, loc) {
            S::zero()
        } else {
            ratio(dn.at(loc), df.at(loc))
        }
    });
    Ok(BlendWeights { weights })
}

/// `h = phi g + (1 - phi) g'` with `phi` the Urysohn weight of `(near, far)`.
/// `g` must avoid the targets on `near`, `g'` on `far`; then `h` avoids them
/// on both and is no farther from `f` than the farther of `g`, `g'`.
pub fn blend<S: Scalar>(
    f: &ScalarField<S>,
    g: &PerturbedField<S>,
    g_far: &PerturbedField<S>,
    near: &Region<S>,
    far: &Region<S>,
    targets: &TargetSet<S>,
) -> Result<PerturbedField<S>> {
    let complex = f.complex();
    if !g.field().same_complex(complex) || !g_far.field().same_complex(complex) {
        return Err(Error::ComplexMismatch);
    }
    if let Some(z) = zeros_on(g.field(), targets, near).first() {
        return Err(Error::BlendPrecondition(format!("first field meets a target on the first region at {z:?}")));
    }
    if let Some(z) = zeros_on(g_far.field(), targets, far).first() {
        return Err(Error::BlendPrecondition(format!("second field meets a target on the second region at {z:?}")));
    }
    let phi = urysohn(complex, near, far)?;
    let cuts = merge_cuts(&[g.field().cut_params(), g_far.field().cut_params(), phi.field().cut_params()]);
    let h = PlField::from_fn(complex.clone(), cuts, |loc| {
        let w = phi.field().eval_unchecked(loc);
        w * g.field().eval_unchecked(loc) + (S::one() - w) * g_far.field().eval_unchecked(loc)
    });
    let steps = match g.provenance() {
        Provenance::Blend { steps } => steps + 1,
        _ => 1,
    };
    let out = PerturbedField::certify(f, h, Provenance::Blend { steps })?;
    let bound = g.distance().max(g_far.distance());
    if out.distance() > bound + S::verify_tol() {
        return Err(Error::Verification(format!(
            "blend moved {} from f, above the bound {}",
            out.distance(),
            bound
        )));
    }
    if let Some(z) = zeros_on(out.field(), targets, &near.union(far)).first() {
        return Err(Error::Verification(format!("blend meets a target at {z:?}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Segment, VertexId};

    fn line(positions: &[f64]) -> ScalarField<f64> {
        let vs = positions.iter().enumerate().map(|(i, &p)| (VertexId(i as i64), p)).collect();
        let es = (1..positions.len())
            .map(|i| (VertexId(i as i64 - 1), VertexId(i as i64), positions[i] - positions[i - 1]))
            .collect();
        let c = Arc::new(Complex1D::new("line", vs, es).unwrap());
        ScalarField::new(c, positions.to_vec()).unwrap()
    }

    #[test]
    fn left_half_against_right_end() {
        let f = line(&[0.0, 1.0]);
        let near = Region { vertices: vec![0], segments: vec![Segment { edge: 0, t0: 0.0, t1: 0.5 }] };
        let far = Region { vertices: vec![1], segments: vec![] };
        let phi = urysohn(f.complex(), &near, &far).unwrap();
        let at = |t: f64| phi.eval(&Location::Edge { edge: 0, t }).unwrap();
        assert_eq!(at(0.25), 1.0);
        assert_eq!(at(0.5), 1.0);
        assert_eq!(at(0.75), 0.5);
        assert_eq!(phi.eval(&Location::Vertex(1)).unwrap(), 0.0);
    }

    #[test]
    fn equidistant_midpoint_is_half() {
        let f = line(&[0.0, 1.0, 2.0]);
        let near = Region { vertices: vec![0], segments: vec![] };
        let far = Region { vertices: vec![2], segments: vec![] };
        let phi = urysohn(f.complex(), &near, &far).unwrap();
        assert_eq!(phi.eval(&Location::Vertex(1)).unwrap(), 0.5);
    }

    #[test]
    fn overlapping_regions_rejected() {
        let f = line(&[0.0, 1.0]);
        let near = Region { vertices: vec![0], segments: vec![Segment { edge: 0, t0: 0.0, t1: 0.6 }] };
        let far = Region { vertices: vec![1], segments: vec![Segment { edge: 0, t0: 0.6, t1: 1.0 }] };
        assert_eq!(urysohn(f.complex(), &near, &far), Err(Error::RegionsNotSeparated));
    }

    #[test]
    fn nested_segment_is_not_separated() {
        let f = line(&[0.0, 1.0]);
        let inner = Region { vertices: vec![], segments: vec![Segment { edge: 0, t0: 0.45, t1: 0.46 }] };
        let outer = Region { vertices: vec![], segments: vec![Segment { edge: 0, t0: 0.3, t1: 0.6 }] };
        assert_eq!(RegionDistance::new(f.complex(), &inner).gap_to(&outer), 0.0);
        assert_eq!(urysohn(f.complex(), &inner, &outer), Err(Error::RegionsNotSeparated));
    }

    #[test]
    fn empty_far_region_gives_one() {
        let f = line(&[0.0, 1.0]);
        let near = Region { vertices: vec![0], segments: vec![] };
        let phi = urysohn(f.complex(), &near, &Region::default()).unwrap();
        assert!(phi.field().vertex_values().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn equal_fields_blend_to_themselves() {
        let f = line(&[-3.0, 0.0, 3.0]);
        let a = TargetSet::singleton(0.0).unwrap();
        let g = PerturbedField::shift(&f, 3.5).unwrap();
        let near = Region { vertices: vec![0], segments: vec![] };
        let far = Region { vertices: vec![2], segments: vec![] };
        let h = blend(&f, &g, &g, &near, &far, &a).unwrap();
        assert_eq!(h.field().vertex_values(), g.field().vertex_values());
        assert_eq!(h.distance(), 3.5);
    }

    #[test]
    fn opposite_shifts_avoid_both_ends() {
        // f = x on [-3, 3], a = 0; g = f - 1 avoids 0 on [-3, -1], g' = f + 1 on [1, 3]
        let f = line(&[-3.0, -1.0, 1.0, 3.0]);
        let a = TargetSet::singleton(0.0).unwrap();
        let g = PerturbedField::shift(&f, -1.0).unwrap();
        let g2 = PerturbedField::shift(&f, 1.0).unwrap();
        let near = Region::induced(f.complex(), &[0, 1]);
        let far = Region::induced(f.complex(), &[2, 3]);
        let h = blend(&f, &g, &g2, &near, &far, &a).unwrap();
        assert!(h.distance() <= 1.0 + 1e-12);
        assert!(zeros_on(h.field(), &a, &near.union(&far)).is_empty());
        assert_eq!(h.field().vertex_values()[0], -4.0);
        assert_eq!(h.field().vertex_values()[3], 4.0);
    }

    #[test]
    fn blend_rejects_field_with_zero() {
        let f = line(&[-1.0, 1.0]);
        let a = TargetSet::singleton(0.0).unwrap();
        let g = PerturbedField::identity(&f);
        let near = Region::induced(f.complex(), &[0, 1]);
        let r = blend(&f, &g, &g, &near, &Region::default(), &a);
        assert!(matches!(r, Err(Error::BlendPrecondition(_))));
    }
}
