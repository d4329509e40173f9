use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// User-facing vertex identifier, as it appears in instance files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub i64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex<S> {
    pub id: VertexId,
    pub position: S,
}

/// Edge between two vertex indices. The edge is parametrised by `t` in
/// `[0, 1]` running from `u` to `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<S> {
    pub u: usize,
    pub v: usize,
    pub length: S,
}

/// A finite 1-dimensional complex: vertices with coordinates, edges with
/// positive lengths. Connectivity is not required.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex1D<S> {
    name: String,
    vertices: Vec<Vertex<S>>,
    edges: Vec<Edge<S>>,
    index: BTreeMap<VertexId, usize>,
    incident: Vec<Vec<usize>>,
}

impl<S: Scalar> Complex1D<S> {
    /// Builds a complex from `(id, position)` vertices and `(u, v, length)`
    /// edges given by vertex id. Errors carry a path into the argument lists.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<(VertexId, S)>,
        edges: Vec<(VertexId, VertexId, S)>,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        let mut verts = Vec::with_capacity(vertices.len());
        for (i, (id, position)) in vertices.into_iter().enumerate() {
            if !position.is_finite() {
                return Err(Error::NonFinite { path: format!("$.vertices[{i}].position") });
            }
            if index.insert(id, i).is_some() {
                return Err(Error::DuplicateVertex { path: format!("$.vertices[{i}].id"), id: id.0 });
            }
            verts.push(Vertex { id, position });
        }
        let mut es = Vec::with_capacity(edges.len());
        for (i, (a, b, length)) in edges.into_iter().enumerate() {
            let u = *index
                .get(&a)
                .ok_or(Error::DanglingEdge { path: format!("$.edges[{i}].u"), id: a.0 })?;
            let v = *index
                .get(&b)
                .ok_or(Error::DanglingEdge { path: format!("$.edges[{i}].v"), id: b.0 })?;
            if u == v {
                return Err(Error::Schema {
                    path: format!("$.edges[{i}]"),
                    message: "edge endpoints must be distinct".into(),
                });
            }
            if !length.is_finite() {
                return Err(Error::NonFinite { path: format!("$.edges[{i}].length") });
            }
            if length <= S::zero() {
                return Err(Error::Schema {
                    path: format!("$.edges[{i}].length"),
                    message: "edge length must be positive".into(),
                });
            }
            es.push(Edge { u, v, length });
        }
        Ok(Self::from_parts(name.into(), verts, es, index))
    }

    pub(crate) fn from_indexed(name: String, vertices: Vec<Vertex<S>>, edges: Vec<Edge<S>>) -> Self {
        let index = vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        Self::from_parts(name, vertices, edges, index)
    }

    fn from_parts(
        name: String,
        vertices: Vec<Vertex<S>>,
        edges: Vec<Edge<S>>,
        index: BTreeMap<VertexId, usize>,
    ) -> Self {
        let mut incident = vec![Vec::new(); vertices.len()];
        for (e, edge) in edges.iter().enumerate() {
            incident[edge.u].push(e);
            incident[edge.v].push(e);
        }
        Self { name, vertices, edges, index, incident }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex<S>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: usize) -> &Vertex<S> {
        &self.vertices[v]
    }

    pub fn edge(&self, e: usize) -> &Edge<S> {
        &self.edges[e]
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Edges incident to vertex `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// The endpoint of `e` opposite to `v`.
    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.u == v {
            edge.v
        } else {
            edge.u
        }
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.index.keys().next_back().copied()
    }

    pub fn validate_location(&self, loc: &Location<S>) -> Result<()> {
        match *loc {
            Location::Vertex(v) if v < self.vertices.len() => Ok(()),
            Location::Vertex(v) => Err(Error::InvalidLocation(format!("vertex index {v} out of range"))),
            Location::Edge { edge, t } => {
                if edge >= self.edges.len() {
                    Err(Error::InvalidLocation(format!("edge index {edge} out of range")))
                } else if !(t >= S::zero() && t <= S::one()) {
                    Err(Error::InvalidLocation(format!("parameter {t} outside [0, 1]")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Coordinate of a location, interpolated along its edge.
    pub fn position(&self, loc: &Location<S>) -> S {
        match *loc {
            Location::Vertex(v) => self.vertices[v].position,
            Location::Edge { edge, t } => {
                let e = &self.edges[edge];
                crate::scalar::lerp(self.vertices[e.u].position, self.vertices[e.v].position, t)
            }
        }
    }

    /// Rewrites an edge location at `t = 0` or `t = 1` as the endpoint vertex.
    pub fn normalize(&self, loc: Location<S>) -> Location<S> {
        match loc {
            Location::Edge { edge, t } if t == S::zero() => Location::Vertex(self.edges[edge].u),
            Location::Edge { edge, t } if t == S::one() => Location::Vertex(self.edges[edge].v),
            other => other,
        }
    }
}

/// A point of the complex: a vertex, or a parameter on an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location<S> {
    Vertex(usize),
    Edge { edge: usize, t: S },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(i: i64) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn dangling_edge_is_reported_with_path() {
        let err = Complex1D::new("x", vec![(id(0), 0.0), (id(1), 1.0)], vec![(id(0), id(7), 1.0)])
            .unwrap_err();
        assert_eq!(err, Error::DanglingEdge { path: "$.edges[0].v".into(), id: 7 });
        assert!(err.to_string().contains("dangling edge"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Complex1D::<f64>::new("x", vec![(id(3), 0.0), (id(3), 1.0)], vec![]).unwrap_err();
        assert!(matches!(err, Error::DuplicateVertex { id: 3, .. }));
    }

    #[test]
    fn single_vertex_is_legal() {
        let c = Complex1D::new("pt", vec![(id(0), 0.0)], vec![]).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.edge_count(), 0);
    }

    #[test]
    fn rejects_bad_lengths_and_loops() {
        let vs = vec![(id(0), 0.0), (id(1), 1.0)];
        assert!(Complex1D::new("x", vs.clone(), vec![(id(0), id(1), 0.0)]).is_err());
        assert!(Complex1D::new("x", vs.clone(), vec![(id(0), id(0), 1.0)]).is_err());
        assert!(Complex1D::new("x", vs, vec![(id(0), id(1), f64::NAN)]).is_err());
    }

    #[test]
    fn positions_interpolate() {
        let c = Complex1D::new("x", vec![(id(0), -3.0), (id(1), 3.0)], vec![(id(0), id(1), 6.0)]).unwrap();
        assert_eq!(c.position(&Location::Edge { edge: 0, t: 0.5 }), 0.0);
        assert_eq!(c.normalize(Location::Edge { edge: 0, t: 1.0 }), Location::Vertex(1));
        assert!(c.validate_location(&Location::Edge { edge: 0, t: 1.5 }).is_err());
        assert!(c.validate_location(&Location::Edge { edge: 1, t: 0.5 }).is_err());
    }
}
