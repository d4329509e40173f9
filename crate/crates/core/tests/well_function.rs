use proptest::prelude::*;
use rand::Rng;

use wellgroups::domain::{refine_for_targets, Location, PlField, ScalarField, TargetSet};
use wellgroups::testkit::{random_field, random_location, random_targets, rng, FieldShape};
use wellgroups::well_function::{
    contraction_map, sublevel, well_field_prime, well_field_second, witness_point_perturbation, EuclideanPoint,
};

/// `{t in [0, 1] : fu + t (fv - fu) in [a - r, a + r] for some a}`, as merged
/// closed parameter intervals. Endpoint membership uses `|y - a| <= r`, the
/// same predicate as the vertex test, so boundary ties round the same way.
fn preimage_params(fu: f64, fv: f64, targets: &[f64], r: f64) -> Vec<(f64, f64)> {
    let mut ivs: Vec<(f64, f64)> = Vec::new();
    for &a in targets {
        let (in_u, in_v) = ((fu - a).abs() <= r, (fv - a).abs() <= r);
        if fu == fv {
            if in_u {
                ivs.push((0.0, 1.0));
            }
            continue;
        }
        let ta = ((a - r - fu) / (fv - fu)).clamp(0.0, 1.0);
        let tb = ((a + r - fu) / (fv - fu)).clamp(0.0, 1.0);
        let (mut t0, mut t1) = (ta.min(tb), ta.max(tb));
        if in_u {
            t0 = 0.0;
        }
        if in_v {
            t1 = 1.0;
        }
        let mid = fu + (t0 + t1) / 2.0 * (fv - fu);
        if in_u || in_v || (mid - a).abs() < r - 1e-12 {
            ivs.push((t0, t1));
        }
    }
    ivs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in ivs {
        match out.last_mut() {
            Some(last) if lo <= last.1 + 1e-12 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn instance(seed: u64) -> (ScalarField<f64>, TargetSet<f64>) {
    let mut rng = rng(seed);
    let shape = FieldShape { snap: if seed.is_multiple_of(3) { Some(0.5) } else { None }, ..FieldShape::default() };
    let f = random_field(&mut rng, &shape);
    let count = rng.random_range(1..=3);
    let targets = random_targets(&mut rng, count, (-10.0, 10.0));
    (f, targets)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn distance_and_thickening_well_fields_agree(seed in any::<u64>()) {
        let (f, targets) = instance(seed);
        let prime = well_field_prime(&f, &targets);
        let second = well_field_second(&f, &targets, 1e-12).unwrap();
        for (p, s) in prime.values().iter().zip(second.values()) {
            prop_assert!((p - s).abs() <= 1e-9, "{p} vs {s}");
        }
    }

    #[test]
    fn sublevel_is_preimage_of_thickening(seed in any::<u64>(), r_raw in 0.0f64..12.0) {
        let (f, targets) = instance(seed);
        let refined = refine_for_targets(&f, &targets);
        let g = &refined.field;
        let well = well_field_prime(g, &targets);
        let mut radii = vec![r_raw, 0.0];
        radii.extend(well.values().iter().copied());
        for r in radii {
            let sel = sublevel(&well, r).unwrap();
            let complex = g.complex();
            for (e, edge) in complex.edges().iter().enumerate() {
                let want = preimage_params(g.value(edge.u), g.value(edge.v), targets.values(), r);
                let got: Vec<(f64, f64)> = sel.edges[e].interval().into_iter().collect();
                prop_assert_eq!(got.len(), want.len(), "edge {} at r = {}: {:?} vs {:?}", e, r, got, want);
                for (x, y) in got.iter().zip(&want) {
                    prop_assert!((x.0 - y.0).abs() <= 1e-12 && (x.1 - y.1).abs() <= 1e-12, "edge {e}: {x:?} vs {y:?}");
                }
            }
            for v in 0..complex.vertex_count() {
                prop_assert_eq!(sel.vertices[v], targets.distance(g.value(v)) <= r);
            }
        }
    }

    #[test]
    fn point_witness_reaches_target_within_bound(seed in any::<u64>(), small in any::<bool>()) {
        let (f, targets) = instance(seed);
        let mut rng = rng(seed ^ 0x5eed);
        let eps = if small { 1e-6 } else { 1e-3 };
        let x = random_location(&mut rng, f.complex());
        let a = targets.get(rng.random_range(0..targets.len()));
        let h = witness_point_perturbation(&f, &x, a, eps).unwrap();
        let fx = f.eval(&x).unwrap();
        prop_assert_eq!(h.field().eval(&x).unwrap(), a);
        let independent = PlField::from(&f).sup_distance(h.field()).unwrap();
        prop_assert!(independent <= (fx - a).abs() + 2.0 * eps + 1e-12);
        // With the nearest target the bound is the distance well function.
        let nearest = targets.get(targets.nearest(fx).0);
        let h = witness_point_perturbation(&f, &x, nearest, eps).unwrap();
        prop_assert!(h.distance() <= targets.distance(fx) + 2.0 * eps + 1e-12);
        prop_assert!(targets.contains(h.field().eval(&x).unwrap()));
    }

    #[test]
    fn contraction_contract(
        dim in 1usize..=3,
        coords in prop::collection::vec(-50.0f64..50.0, 6),
        r in 0.0f64..20.0,
        eps in 1e-6f64..2.0,
        scale in 0.0f64..3.0,
    ) {
        let a = EuclideanPoint::new(coords[..dim].to_vec()).unwrap();
        // put y at a controlled distance so every regime is visited
        let dir: Vec<f64> = coords[dim..].iter().chain(std::iter::repeat(&1.0)).take(dim).copied().collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-9);
        let rho = scale * (r + 2.0 * eps);
        let y = EuclideanPoint::new(a.0.iter().zip(&dir).map(|(p, d)| p + rho * d / norm).collect()).unwrap();
        let z = contraction_map(&a, r, eps, &y).unwrap();
        let dist = a.distance(&y);
        prop_assert!(z.distance(&y) <= r + 2.0 * eps + 1e-12);
        if dist <= r + eps {
            prop_assert_eq!(&z, &a);
        }
        if dist >= r + 2.0 * eps {
            prop_assert_eq!(&z, &y);
        }
    }
}

#[test]
fn contraction_rejects_bad_parameters() {
    let a = EuclideanPoint::new(vec![0.0]).unwrap();
    assert!(contraction_map(&a, 1.0, 0.0, &a).is_err());
    assert!(contraction_map(&a, -1.0, 0.1, &a).is_err());
    let b = EuclideanPoint::new(vec![0.0, 1.0]).unwrap();
    assert!(contraction_map(&a, 1.0, 0.1, &b).is_err());
}

#[test]
fn witness_on_vertex_of_counterexample() {
    let inst = wellgroups::counterexample_instance::<f64>();
    let h = witness_point_perturbation(&inst.field, &Location::Vertex(2), 2.0, 1e-3).unwrap();
    assert_eq!(h.field().eval(&Location::Vertex(2)).unwrap(), 2.0);
    assert!(h.distance() <= 2.0 + 2e-3);
}
