//! Subdivision of a complex so that the well function becomes linear per edge.

use std::sync::Arc;

use crate::domain::complex::{Complex1D, Edge, Location, Vertex, VertexId};
use crate::domain::field::{normalize_cuts, ScalarField};
use crate::domain::targets::TargetSet;
use crate::error::{Error, Result};
use crate::scalar::{lerp, Scalar};

/// Where a refined edge sits inside its parent edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePiece<S> {
    pub parent: usize,
    pub t0: S,
    pub t1: S,
}

/// A subdivision of a parent complex. Parent vertices keep their indices;
/// new vertices are appended with fresh ids.
#[derive(Debug, Clone)]
pub struct Subdivision<S> {
    parent: Arc<Complex1D<S>>,
    complex: Arc<Complex1D<S>>,
    pieces: Vec<EdgePiece<S>>,
    children: Vec<Vec<usize>>,
    vertex_origin: Vec<Location<S>>,
}

impl<S: Scalar> Subdivision<S> {
    pub fn parent(&self) -> &Arc<Complex1D<S>> {
        &self.parent
    }

    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        &self.complex
    }

    pub fn pieces(&self) -> &[EdgePiece<S>] {
        &self.pieces
    }

    /// Location in the parent complex of each refined vertex.
    pub fn vertex_origin(&self) -> &[Location<S>] {
        &self.vertex_origin
    }

    pub fn added_vertices(&self) -> usize {
        self.complex.vertex_count() - self.parent.vertex_count()
    }

    /// Maps a parent location to the same point of the refined complex.
    pub fn locate(&self, loc: &Location<S>) -> Result<Location<S>> {
        self.parent.validate_location(loc)?;
        Ok(match *loc {
            Location::Vertex(v) => Location::Vertex(v),
            Location::Edge { edge, t } => {
                let kids = &self.children[edge];
                let k = kids
                    .iter()
                    .copied()
                    .find(|&c| t <= self.pieces[c].t1)
                    .unwrap_or(*kids.last().expect("every edge has a child"));
                let p = self.pieces[k];
                let local = ((t - p.t0) / (p.t1 - p.t0)).max(S::zero()).min(S::one());
                self.complex.normalize(Location::Edge { edge: k, t: local })
            }
        })
    }

    /// Transfers a field on the parent complex to the refined complex.
    pub fn lift(&self, f: &ScalarField<S>) -> Result<ScalarField<S>> {
        if !(Arc::ptr_eq(f.complex(), &self.parent) || **f.complex() == *self.parent) {
            return Err(Error::ComplexMismatch);
        }
        let values = self.vertex_origin.iter().map(|loc| f.eval_unchecked(loc)).collect();
        ScalarField::new(self.complex.clone(), values)
    }
}

/// Splits edges at the given interior parameters (one list per parent edge).
pub fn subdivide<S: Scalar>(parent: &Arc<Complex1D<S>>, cuts: &[Vec<S>]) -> Subdivision<S> {
    let mut vertices: Vec<Vertex<S>> = parent.vertices().to_vec();
    let mut vertex_origin: Vec<Location<S>> = (0..vertices.len()).map(Location::Vertex).collect();
    let mut next_id = parent.max_vertex_id().map_or(0, |id| id.0 + 1);
    let mut edges = Vec::with_capacity(parent.edge_count());
    let mut pieces = Vec::with_capacity(parent.edge_count());
    let mut children = Vec::with_capacity(parent.edge_count());

    for (e, edge) in parent.edges().iter().enumerate() {
        let ts = normalize_cuts(cuts.get(e).cloned().unwrap_or_default());
        let (pu, pv) = (parent.vertex(edge.u).position, parent.vertex(edge.v).position);
        let mut kids = Vec::with_capacity(ts.len() + 1);
        let mut prev = (edge.u, S::zero());
        for t in ts.into_iter().chain(std::iter::once(S::one())) {
            let idx = if t == S::one() {
                edge.v
            } else {
                vertices.push(Vertex { id: VertexId(next_id), position: lerp(pu, pv, t) });
                vertex_origin.push(Location::Edge { edge: e, t });
                next_id += 1;
                vertices.len() - 1
            };
            kids.push(edges.len());
            edges.push(Edge { u: prev.0, v: idx, length: edge.length * t - edge.length * prev.1 });
            pieces.push(EdgePiece { parent: e, t0: prev.1, t1: t });
            prev = (idx, t);
        }
        children.push(kids);
    }

    let complex = Arc::new(Complex1D::from_indexed(parent.name().to_string(), vertices, edges));
    Subdivision { parent: parent.clone(), complex, pieces, children, vertex_origin }
}

/// Parameters on edge `e` where the linear field crosses one of `levels`
/// strictly inside the edge, paired with the level crossed.
pub(crate) fn level_crossings<S: Scalar>(f: &ScalarField<S>, e: usize, levels: &[S]) -> Vec<(S, S)> {
    let (fu, fv) = f.edge_values(e);
    let mut out = Vec::new();
    for &level in levels {
        if (fu - level) * (fv - level) < S::zero() {
            let t = (level - fu) / (fv - fu);
            if t > S::zero() && t < S::one() {
                out.push((t, level));
            }
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    out
}

/// Result of [`refine_for_targets`]: the subdivision and the field on it.
#[derive(Debug, Clone)]
pub struct Refined<S> {
    pub subdivision: Subdivision<S>,
    pub field: ScalarField<S>,
}

impl<S: Scalar> Refined<S> {
    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        self.subdivision.complex()
    }
}

/// Inserts a vertex wherever `f` crosses a level in `levels` inside an edge.
/// New vertices carry the crossed level exactly, so refining again is a no-op.
pub fn refine_at_levels<S: Scalar>(f: &ScalarField<S>, levels: &[S]) -> Refined<S> {
    let parent = f.complex();
    let tol = S::dedup_tol();
    let mut cuts = Vec::with_capacity(parent.edge_count());
    let mut cut_levels = Vec::with_capacity(parent.edge_count());
    for e in 0..parent.edge_count() {
        let mut ts: Vec<S> = Vec::new();
        let mut ls: Vec<S> = Vec::new();
        for (t, level) in level_crossings(f, e, levels) {
            if ts.last().is_none_or(|last| t - *last > tol) {
                ts.push(t);
                ls.push(level);
            }
        }
        cuts.push(ts);
        cut_levels.push(ls);
    }
    let subdivision = subdivide(parent, &cuts);
    let mut values = f.values().to_vec();
    for (e, ls) in cut_levels.iter().enumerate() {
        // normalize_cuts keeps this order, so the new vertices line up
        values.extend_from_slice(ls);
        debug_assert_eq!(
            normalize_cuts(cuts[e].clone()).len(),
            ls.len(),
            "refinement cuts must survive normalization"
        );
    }
    let field = ScalarField::new(subdivision.complex().clone(), values)
        .expect("refined values are finite and one per vertex");
    Refined { subdivision, field }
}

/// Refines so that `min_a |f - a|` is linear on every edge: cuts where `f`
/// hits a target or a midpoint between consecutive targets.
pub fn refine_for_targets<S: Scalar>(f: &ScalarField<S>, targets: &TargetSet<S>) -> Refined<S> {
    refine_at_levels(f, &targets.levels())
}

/// First level of `levels` crossed strictly inside some edge, if any.
pub fn find_unrefined_edge<S: Scalar>(f: &ScalarField<S>, levels: &[S]) -> Option<(usize, S)> {
    (0..f.complex().edge_count())
        .find_map(|e| level_crossings(f, e, levels).first().map(|&(_, level)| (e, level)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(a: f64, b: f64) -> ScalarField<f64> {
        let c = Complex1D::new("seg", vec![(VertexId(0), a), (VertexId(1), b)], vec![(VertexId(0), VertexId(1), b - a)])
            .unwrap();
        ScalarField::new(Arc::new(c), vec![a, b]).unwrap()
    }

    #[test]
    fn counterexample_edge_gets_three_vertices() {
        let f = segment(-3.0, 3.0);
        let a = TargetSet::new(vec![-2.0, 2.0]).unwrap();
        let r = refine_for_targets(&f, &a);
        let positions: Vec<f64> = r.complex().vertices()[2..].iter().map(|v| v.position).collect();
        assert_eq!(positions, vec![-2.0, 0.0, 2.0]);
        assert_eq!(r.field.values(), &[-3.0, 3.0, -2.0, 0.0, 2.0]);
        let lengths: Vec<f64> = r.complex().edges().iter().map(|e| e.length).collect();
        assert_eq!(lengths, vec![1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn constant_field_is_untouched() {
        let c = Complex1D::new("seg", vec![(VertexId(0), 0.0), (VertexId(1), 1.0)], vec![(VertexId(0), VertexId(1), 1.0)])
            .unwrap();
        let f = ScalarField::new(Arc::new(c), vec![5.0, 5.0]).unwrap();
        let r = refine_for_targets(&f, &TargetSet::singleton(0.0).unwrap());
        assert_eq!(r.subdivision.added_vertices(), 0);
    }

    #[test]
    fn sign_change_adds_midpoint() {
        let c = Complex1D::new("seg", vec![(VertexId(0), 0.0), (VertexId(1), 1.0)], vec![(VertexId(0), VertexId(1), 1.0)])
            .unwrap();
        let f = ScalarField::new(Arc::new(c), vec![-1.0, 1.0]).unwrap();
        let r = refine_for_targets(&f, &TargetSet::singleton(0.0).unwrap());
        assert_eq!(r.subdivision.added_vertices(), 1);
        assert_eq!(r.complex().vertex(2).position, 0.5);
        assert_eq!(r.field.value(2), 0.0);
    }

    #[test]
    fn refinement_is_idempotent() {
        let f = segment(-3.0, 3.0);
        let a = TargetSet::new(vec![-2.0, 2.0]).unwrap();
        let once = refine_for_targets(&f, &a);
        let twice = refine_for_targets(&once.field, &a);
        assert_eq!(twice.subdivision.added_vertices(), 0);
        assert!(find_unrefined_edge(&once.field, &a.levels()).is_none());
        assert_eq!(find_unrefined_edge(&f, &a.levels()).map(|x| x.0), Some(0));
    }

    #[test]
    fn locate_maps_parent_points() {
        let f = segment(-3.0, 3.0);
        let a = TargetSet::new(vec![-2.0, 2.0]).unwrap();
        let r = refine_for_targets(&f, &a);
        let loc = Location::Edge { edge: 0, t: 0.75 };
        let mapped = r.subdivision.locate(&loc).unwrap();
        assert!((r.complex().position(&mapped) - 1.5).abs() < 1e-12);
        assert!((r.field.eval(&mapped).unwrap() - f.eval(&loc).unwrap()).abs() < 1e-12);
        let lifted = r.subdivision.lift(&f).unwrap();
        assert_eq!(lifted.values(), r.field.values());
    }
}
