//! Seeded random instances for property tests and the acceptance suite.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Complex1D, Location, Region, ScalarField, Segment, TargetSet, VertexId};
use crate::instance::Instance;
use crate::perturbations::PerturbationFamily;
use crate::well_groups::RadiiSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of generated complexes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldShape {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub value_range: (f64, f64),
    /// Chance of one extra edge closing a cycle.
    pub cycle_prob: f64,
    /// Round values to this grid, producing ties and exact target hits.
    pub snap: Option<f64>,
}

impl Default for FieldShape {
    fn default() -> Self {
        Self { min_vertices: 1, max_vertices: 12, value_range: (-10.0, 10.0), cycle_prob: 0.3, snap: None }
    }
}

/// Random tree (sometimes with one cycle) with positive edge lengths and
/// random vertex values.
pub fn random_field(rng: &mut impl Rng, shape: &FieldShape) -> ScalarField<f64> {
    let n = rng.random_range(shape.min_vertices..=shape.max_vertices);
    let vertices: Vec<(VertexId, f64)> = (0..n).map(|i| (VertexId(i as i64), i as f64)).collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((VertexId(j as i64), VertexId(i as i64), rng.random_range(0.5..2.0)));
    }
    if n >= 3 && rng.random_bool(shape.cycle_prob) {
        let u = rng.random_range(0..n);
        let v = (u + 1 + rng.random_range(0..n - 1)) % n;
        let present = edges.iter().any(|&(a, b, _)| (a.0, b.0) == (u as i64, v as i64) || (a.0, b.0) == (v as i64, u as i64));
        if !present {
            edges.push((VertexId(u as i64), VertexId(v as i64), rng.random_range(0.5..2.0)));
        }
    }
    let complex = Complex1D::new("random", vertices, edges).expect("generated complex is valid");
    let (lo, hi) = shape.value_range;
    let values = (0..n)
        .map(|_| {
            let y = rng.random_range(lo..=hi);
            shape.snap.map_or(y, |s| (y / s).round() * s)
        })
        .collect();
    ScalarField::new(Arc::new(complex), values).expect("finite values")
}

/// `count` distinct targets inside the value range.
pub fn random_targets(rng: &mut impl Rng, count: usize, range: (f64, f64)) -> TargetSet<f64> {
    let mut values: Vec<f64> = Vec::with_capacity(count);
    while values.len() < count {
        let a = rng.random_range(range.0..=range.1);
        if values.iter().all(|b| (a - b).abs() > 1e-3) {
            values.push(a);
        }
    }
    TargetSet::new(values).expect("finite targets")
}

/// Random instance with automatic radii.
pub fn random_instance(
    rng: &mut impl Rng,
    shape: &FieldShape,
    target_count: usize,
    family: PerturbationFamily<f64>,
) -> Instance<f64> {
    let field = random_field(rng, shape);
    let targets = random_targets(rng, target_count, shape.value_range);
    Instance::new(field, targets, family, RadiiSpec::default()).expect("generated family is valid")
}

/// Uniform random point on the complex.
pub fn random_location(rng: &mut impl Rng, complex: &Complex1D<f64>) -> Location<f64> {
    if complex.edge_count() == 0 || rng.random_bool(0.2) {
        Location::Vertex(rng.random_range(0..complex.vertex_count()))
    } else {
        Location::Edge { edge: rng.random_range(0..complex.edge_count()), t: rng.random_range(0.0..1.0) }
    }
}

/// Random closed region: a few vertices together with their star segments of
/// random length, and a few interior edge pieces.
pub fn random_region(rng: &mut impl Rng, complex: &Complex1D<f64>) -> Region<f64> {
    let mut region = Region { vertices: Vec::new(), segments: Vec::new() };
    let picks = rng.random_range(1..=2.min(complex.vertex_count()).max(1));
    for _ in 0..picks {
        let v = rng.random_range(0..complex.vertex_count());
        region.vertices.push(v);
        for &e in complex.incident(v) {
            let len = rng.random_range(0.0..0.3);
            let seg = if complex.edge(e).u == v {
                Segment { edge: e, t0: 0.0, t1: len }
            } else {
                Segment { edge: e, t0: 1.0 - len, t1: 1.0 }
            };
            region.segments.push(seg);
        }
    }
    if complex.edge_count() > 0 && rng.random_bool(0.5) {
        let e = rng.random_range(0..complex.edge_count());
        let t0 = rng.random_range(0.35..0.5);
        region.segments.push(Segment { edge: e, t0, t1: t0 + rng.random_range(0.0..0.15) });
    }
    region.vertices.sort_unstable();
    region.vertices.dedup();
    region
}
