use proptest::prelude::*;
use rand::Rng;

use wellgroups::io::{instance_json, parse_instance, report_json, step_csv, to_json_string, verify_report};
use wellgroups::perturbations::PerturbationFamily;
use wellgroups::testkit::{random_instance, rng, FieldShape};
use wellgroups::Instance;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn instance(seed: u64) -> Instance<f64> {
    let mut rng = rng(seed);
    let shape = FieldShape { max_vertices: 8, ..FieldShape::default() };
    if rng.random_bool(0.5) {
        random_instance(&mut rng, &shape, 1, PerturbationFamily::FullSupNorm)
    } else {
        let count = rng.random_range(1..=3);
        random_instance(&mut rng, &shape, count, PerturbationFamily::Shift)
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn reports_reverify_and_are_deterministic(seed in any::<u64>()) {
        let inst = instance(seed);
        let text = to_json_string(&report_json(&inst, &inst.analyze().unwrap()));
        let again = to_json_string(&report_json(&inst, &inst.analyze().unwrap()));
        prop_assert_eq!(&text, &again);
        let check = verify_report(&text).unwrap();
        prop_assert!(check.witnesses + check.certificates > 0);
    }

    #[test]
    fn instance_files_round_trip(seed in any::<u64>()) {
        let inst = instance(seed);
        let text = to_json_string(&instance_json(&inst));
        let back: Instance<f64> = parse_instance(&text).unwrap();
        // values pass through 12 significant digits
        let a = inst.analyze().unwrap();
        let b = back.analyze().unwrap();
        prop_assert_eq!(step_csv(&a.betti0).lines().count(), step_csv(&b.betti0).lines().count());
        prop_assert_eq!(back.complex().vertex_count(), inst.complex().vertex_count());
    }
}

#[test]
fn report_keys_follow_the_published_layout() {
    let inst = wellgroups::counterexample_instance::<f64>();
    let report = report_json(&inst, &inst.analyze().unwrap());
    for key in ["betti0", "well_diagram", "fibers", "swl"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    let swl = &report["swl"];
    for key in ["violations", "admissible", "component_count_at_0"] {
        assert!(swl.get(key).is_some(), "{key}");
    }
    let v = &swl["violations"][0];
    for key in ["r", "s", "component"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
