use crate::domain::complex::{Complex1D, Location};
use crate::scalar::Scalar;

/// Closed subsegment `[t0, t1]` of an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<S> {
    pub edge: usize,
    pub t0: S,
    pub t1: S,
}

impl<S: Scalar> Segment<S> {
    pub fn full(edge: usize) -> Self {
        Self { edge, t0: S::zero(), t1: S::one() }
    }

    pub fn contains(&self, t: S) -> bool {
        t >= self.t0 && t <= self.t1
    }
}

/// Closed subset of a complex: member vertices plus edge segments. Used for
/// sublevel components and for the sets handed to the Urysohn blend.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region<S> {
    pub vertices: Vec<usize>,
    pub segments: Vec<Segment<S>>,
}

impl<S: Scalar> Region<S> {
    /// Vertex-induced closed subcomplex: the vertices and every edge with
    /// both endpoints in the set.
    pub fn induced(complex: &Complex1D<S>, vertices: &[usize]) -> Self {
        let mut member = vec![false; complex.vertex_count()];
        for &v in vertices {
            member[v] = true;
        }
        let segments = complex
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| member[e.u] && member[e.v])
            .map(|(i, _)| Segment::full(i))
            .collect();
        let mut vertices = vertices.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        Self { vertices, segments }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.segments.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        vertices.sort_unstable();
        vertices.dedup();
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        Self { vertices, segments }
    }

    pub fn contains(&self, complex: &Complex1D<S>, loc: &Location<S>) -> bool {
        match complex.normalize(*loc) {
            Location::Vertex(v) => {
                self.vertices.binary_search(&v).is_ok()
                    || self.segments.iter().any(|s| {
                        let e = complex.edge(s.edge);
                        (e.u == v && s.t0 == S::zero()) || (e.v == v && s.t1 == S::one())
                    })
            }
            Location::Edge { edge, t } => {
                self.segments.iter().any(|s| s.edge == edge && s.contains(t))
            }
        }
    }

    /// Segment endpoints strictly inside their edge, per edge. These are the
    /// extra breakpoints a PL function needs to resolve the region boundary.
    pub fn interior_cuts(&self, edge_count: usize) -> Vec<Vec<S>> {
        let mut cuts = vec![Vec::new(); edge_count];
        for s in &self.segments {
            for t in [s.t0, s.t1] {
                if t > S::zero() && t < S::one() {
                    cuts[s.edge].push(t);
                }
            }
        }
        cuts
    }

    /// Every vertex and segment endpoint of the region, as locations.
    pub fn boundary_points(&self) -> Vec<Location<S>> {
        let mut out: Vec<Location<S>> = self.vertices.iter().map(|&v| Location::Vertex(v)).collect();
        for s in &self.segments {
            out.push(Location::Edge { edge: s.edge, t: s.t0 });
            out.push(Location::Edge { edge: s.edge, t: s.t1 });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::complex::VertexId;

    fn path3() -> Complex1D<f64> {
        let vs = (0..3).map(|i| (VertexId(i), i as f64)).collect();
        let es = vec![(VertexId(0), VertexId(1), 1.0), (VertexId(1), VertexId(2), 1.0)];
        Complex1D::new("p", vs, es).unwrap()
    }

    #[test]
    fn induced_region_membership() {
        let c = path3();
        let r = Region::induced(&c, &[0, 1]);
        assert_eq!(r.segments, vec![Segment::full(0)]);
        assert!(r.contains(&c, &Location::Edge { edge: 0, t: 0.3 }));
        assert!(!r.contains(&c, &Location::Edge { edge: 1, t: 0.3 }));
        assert!(r.contains(&c, &Location::Edge { edge: 1, t: 0.0 }));
        assert!(!r.contains(&c, &Location::Vertex(2)));
    }

    #[test]
    fn partial_segment_cuts() {
        let r = Region { vertices: vec![0], segments: vec![Segment { edge: 0, t0: 0.0, t1: 0.25 }] };
        assert_eq!(r.interior_cuts(2), vec![vec![0.25], vec![]]);
    }
}
