use crate::domain::{Location, PlField, Region, TargetSet};
use crate::scalar::Scalar;

/// All points of `region` where `g` takes a target value, solved in closed
/// form on each linear piece. A piece lying entirely on a target contributes
/// its two ends.
pub fn zeros_on<S: Scalar>(g: &PlField<S>, targets: &TargetSet<S>, region: &Region<S>) -> Vec<Location<S>> {
    let complex = g.complex();
    let mut out: Vec<Location<S>> = Vec::new();
    for &v in &region.vertices {
        if targets.contains(g.vertex_values()[v]) {
            out.push(Location::Vertex(v));
        }
    }
    for seg in &region.segments {
        let samples = g.samples_within(seg.edge, seg.t0, seg.t1);
        for &a in targets.values() {
            for (i, &(t, y)) in samples.iter().enumerate() {
                if y == a {
                    out.push(Location::Edge { edge: seg.edge, t });
                }
                if let Some(&(t1, y1)) = samples.get(i + 1) {
                    let (d0, d1) = (y - a, y1 - a);
                    if (d0 < S::zero() && d1 > S::zero()) || (d0 > S::zero() && d1 < S::zero()) {
                        let tz = t + d0 / (d0 - d1) * (t1 - t);
                        out.push(Location::Edge { edge: seg.edge, t: tz });
                    }
                }
            }
        }
    }
    let mut out: Vec<Location<S>> = out.into_iter().map(|l| complex.normalize(l)).collect();
    out.sort_by(|a, b| key(a).partial_cmp(&key(b)).expect("finite"));
    out.dedup_by(|a, b| match (*a, *b) {
        (Location::Vertex(x), Location::Vertex(y)) => x == y,
        (Location::Edge { edge: e1, t: t1 }, Location::Edge { edge: e2, t: t2 }) => {
            e1 == e2 && (t1 - t2).abs() <= S::dedup_tol()
        }
        _ => false,
    });
    out
}

fn key<S: Scalar>(loc: &Location<S>) -> (usize, usize, S) {
    match *loc {
        Location::Vertex(v) => (0, v, S::zero()),
        Location::Edge { edge, t } => (1, edge, t),
    }
}

/// Smallest `|g - a|` over the region and the targets; zero when `g`
/// crosses a target. Used to recognise perturbations that touch a target up
/// to rounding.
pub fn min_target_gap<S: Scalar>(g: &PlField<S>, targets: &TargetSet<S>, region: &Region<S>) -> S {
    let mut best = S::infinity();
    for &v in &region.vertices {
        best = best.min(targets.distance(g.vertex_values()[v]));
    }
    for seg in &region.segments {
        let samples = g.samples_within(seg.edge, seg.t0, seg.t1);
        for (i, &(_, y)) in samples.iter().enumerate() {
            best = best.min(targets.distance(y));
            if let Some(&(_, y1)) = samples.get(i + 1) {
                let (lo, hi) = if y <= y1 { (y, y1) } else { (y1, y) };
                if targets.values().iter().any(|&a| lo <= a && a <= hi) {
                    return S::zero();
                }
            }
        }
    }
    best
}
