use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use wellcheck::{run_with, Command as Cmd, FamilyOverride, Format, RunConfig, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn wellcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wellcheck")).args(args).env_remove("WELLCHECK_BUDGET").output().unwrap()
}

fn run_config(config: &RunConfig) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(config, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn with_input(command: Cmd, name: &str) -> RunConfig {
    RunConfig { input: Some(instance(name)), ..RunConfig::new(command) }
}

#[test]
fn counterexample_prints_the_rank_intervals() {
    let out = wellcheck(&["counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rank: [0,1]:2, (1,2):0, [2,5]:1, (5,inf):0"), "{stdout}");
    assert!(stdout.contains("betti0: [0,2):2, [2,inf):1"), "{stdout}");
}

#[test]
fn swl_check_exit_code_follows_the_flag() {
    let path = instance("counterexample.json");
    let path = path.to_str().unwrap();
    let failing = wellcheck(&["swl-check", "--input", path, "--fail-on-violation"]);
    assert_eq!(failing.status.code(), Some(EXIT_VIOLATION));
    let report: Value = serde_json::from_slice(&failing.stdout).unwrap();
    let violations = report["swl"]["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v["r"] == 1.5 && v["s"] == 2));

    let lenient = wellcheck(&["swl-check", "--input", path]);
    assert_eq!(lenient.status.code(), Some(EXIT_OK));
}

#[test]
fn single_vertex_report() {
    let (code, stdout, _) = run_config(&with_input(Cmd::Analyze, "single_vertex.json"));
    assert_eq!(code, EXIT_OK);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let betti = report["betti0"].as_array().unwrap();
    assert_eq!(betti.len(), 1);
    assert_eq!(betti[0]["r_lo"], 0);
    assert_eq!(betti[0]["r_hi"], Value::Null);
    assert_eq!(betti[0]["value"], 1);
    let first = &report["well_diagram"][0];
    assert_eq!((first["r_lo"].clone(), first["lo_closed"].clone(), first["rank"].clone()), (0.into(), true.into(), 1.into()));
}

#[test]
fn reports_are_byte_identical_and_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("report{k}.json"));
        let config = RunConfig { output: Some(path.clone()), ..with_input(Cmd::Analyze, "y_tree.json") };
        assert_eq!(run_config(&config).0, EXIT_OK);
        texts.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let check = wellgroups::io::verify_report(&texts[0]).unwrap();
    assert!(check.witnesses > 0 && check.certificates > 0);
}

#[test]
fn diagram_csv_of_the_counterexample() {
    let config = RunConfig { format: Format::Csv, ..with_input(Cmd::Diagram, "counterexample.json") };
    let (code, stdout, _) = run_config(&config);
    assert_eq!(code, EXIT_OK);
    let expected = "series,r_lo,r_hi,value,lo_closed,hi_closed\n\
        betti0,0,2,2,true,false\n\
        betti0,2,inf,1,true,false\n\
        rank,0,1,2,true,true\n\
        rank,1,2,0,false,false\n\
        rank,2,5,1,true,true\n\
        rank,5,inf,0,false,false\n";
    assert_eq!(stdout, expected);
}

#[test]
fn sampled_instance_reports_upper_bounds() {
    let config = RunConfig { format: Format::Csv, ..with_input(Cmd::Diagram, "cycle_sampled.json") };
    let (code, stdout, _) = run_config(&config);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("rank_upper,1,1.5,1,true,false"), "{stdout}");
}

#[test]
fn overrides_apply() {
    let config = RunConfig {
        family: Some(FamilyOverride::Shift),
        radii: Some(vec![0.25, 2.0]),
        consecutive: true,
        ..with_input(Cmd::Analyze, "y_tree.json")
    };
    let (code, stdout, _) = run_config(&config);
    assert_eq!(code, EXIT_OK);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["instance"]["family"], "shift");
    assert_eq!(report["swl"]["mode"], "consecutive");
    let radii: Vec<f64> = report["fibers"].as_array().unwrap().iter().map(|f| f["r"].as_f64().unwrap()).collect();
    assert!(radii.contains(&0.25) && radii.contains(&2.0));
}

#[test]
fn crosscheck_summary_is_attached() {
    let config = RunConfig { oracle_crosscheck: true, ..with_input(Cmd::Analyze, "y_tree.json") };
    let (code, stdout, stderr) = run_config(&config);
    assert_eq!(code, EXIT_OK, "{stderr}");
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert!(report["crosscheck"]["fibers_checked"].as_u64().unwrap() > 0);
    assert!(stderr.contains("oracle cross-check"));
}

#[test]
fn budget_variable_is_honoured() {
    let path = instance("y_tree.json");
    let out = Command::new(env!("CARGO_BIN_EXE_wellcheck"))
        .args(["analyze", "--oracle-crosscheck", "--input", path.to_str().unwrap()])
        .env("WELLCHECK_BUDGET", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["crosscheck"]["lattice_witnesses"], 0);
    assert!(report["crosscheck"]["lattice_skipped"].as_u64().unwrap() > 0);

    let bad = Command::new(env!("CARGO_BIN_EXE_wellcheck"))
        .args(["analyze", "--oracle-crosscheck", "--input", path.to_str().unwrap()])
        .env("WELLCHECK_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
}

#[test]
fn invalid_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path
    };
    let malformed = write("malformed.json", r#"{"name": "x", "vertices": [{"id": 0, "position": "zero"}]}"#);
    let (code, _, stderr) = run_config(&RunConfig { input: Some(malformed), ..RunConfig::new(Cmd::Analyze) });
    assert_eq!(code, EXIT_INPUT);
    assert!(stderr.contains("$.vertices[0].position"), "{stderr}");

    let cases = [
        RunConfig { input: Some(dir.path().join("missing.json")), ..RunConfig::new(Cmd::Analyze) },
        RunConfig::new(Cmd::Diagram),
        RunConfig { family: Some(FamilyOverride::Full), ..with_input(Cmd::Analyze, "counterexample.json") },
        RunConfig { radii: Some(vec![-1.0]), ..with_input(Cmd::Analyze, "y_tree.json") },
        RunConfig { lattice_resolution: 0.0, ..with_input(Cmd::Analyze, "y_tree.json") },
        RunConfig { output: Some(dir.path().join("no/such/dir.json")), ..with_input(Cmd::Analyze, "y_tree.json") },
    ];
    for config in cases {
        let (code, _, stderr) = run_config(&config);
        assert_eq!(code, EXIT_INPUT, "{config:?}: {stderr}");
    }

    let unknown_flag = wellcheck(&["analyze", "--bogus"]);
    assert_eq!(unknown_flag.status.code(), Some(EXIT_INPUT));
}
