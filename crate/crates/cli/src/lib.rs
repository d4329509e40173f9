//! Library side of the `wellcheck` binary. [`run`] executes one command and
//! returns the process exit code, so tests can drive it without spawning.

use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

use wellgroups::io::{parse_instance, report_json, step_csv, to_json_string, verify_report};
use wellgroups::perturbations::{LatticeOptions, PerturbationFamily};
use wellgroups::well_groups::{oracle_crosscheck, CrosscheckSummary, PairMode, RadiiSpec};
use wellgroups::{counterexample_instance, Analysis, Instance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable overriding the lattice candidate budget.
pub const BUDGET_VAR: &str = "WELLCHECK_BUDGET";

/// Rank intervals of the built-in counterexample.
pub const COUNTEREXAMPLE_RANK: [&str; 4] = ["[0,1]:2", "(1,2):0", "[2,5]:1", "(5,inf):0"];
/// Component-count intervals of the built-in counterexample.
pub const COUNTEREXAMPLE_BETTI0: [&str; 2] = ["[0,2):2", "[2,inf):1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    SwlCheck,
    Counterexample,
    Diagram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyOverride {
    Full,
    Shift,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    /// Standard output when absent.
    pub output: Option<PathBuf>,
    pub format: Format,
    pub family: Option<FamilyOverride>,
    /// Evaluate exactly these radii instead of the instance's own.
    pub radii: Option<Vec<f64>>,
    pub fail_on_violation: bool,
    pub oracle_crosscheck: bool,
    pub lattice_resolution: f64,
    /// Check only neighbouring radii for shrinking wellness.
    pub consecutive: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            output: None,
            format: Format::Json,
            family: None,
            radii: None,
            fail_on_violation: false,
            oracle_crosscheck: false,
            lattice_resolution: 0.05,
            consecutive: false,
        }
    }
}

#[derive(Error, Debug)]
pub enum Failure {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<wellgroups::Error> for Failure {
    fn from(e: wellgroups::Error) -> Self {
        use wellgroups::Error as E;
        match e {
            E::Schema { .. }
            | E::DuplicateVertex { .. }
            | E::DanglingEdge { .. }
            | E::NonFinite { .. }
            | E::NegativeRadius(_)
            | E::NonPositiveResolution(_)
            | E::NoDefinitionalWellField
            | E::MultiTargetFullSupNorm
            | E::DeclaredDistance { .. }
            | E::Io(_) => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

/// Runs against the process's standard streams.
pub fn run(config: &RunConfig) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(config, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one command, writing results to `out` (unless an output path is
/// set) and diagnostics to `err`.
pub fn run_with(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "wellcheck: {f}");
            f.exit_code()
        }
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    if !(config.lattice_resolution > 0.0) {
        return Err(Failure::Input(format!("lattice resolution must be positive, got {}", config.lattice_resolution)));
    }
    if config.command == Command::Counterexample {
        return counterexample(config, out, err);
    }
    let inst = load(config)?;
    let analysis = inst.analyze_with(pair_mode(config))?;
    let mut report = report_json(&inst, &analysis);
    reverify(&report)?;
    if config.oracle_crosscheck {
        let summary = crosscheck(&analysis, config)?;
        let _ = writeln!(err, "oracle cross-check: {}", summary_line(&summary));
        insert(&mut report, "crosscheck", crosscheck_json(&summary, config.lattice_resolution));
    }

    let body = match (config.command, config.format) {
        (Command::Analyze, Format::Json) => to_json_string(&report) + "\n",
        (Command::SwlCheck, Format::Json) => {
            to_json_string(&json!({"instance": report["instance"], "swl": report["swl"]})) + "\n"
        }
        (Command::Diagram, Format::Json) => to_json_string(&json!({
            "betti0": report["betti0"],
            "instance": report["instance"],
            "well_diagram": report["well_diagram"],
        })) + "\n",
        (Command::SwlCheck, Format::Csv) => violations_csv(&analysis),
        (_, Format::Csv) => diagram_csv(&analysis),
        (Command::Counterexample, Format::Json) => unreachable!("handled above"),
    };
    emit(config, out, &body)?;

    let violations = analysis.swl.violations.len();
    if violations > 0 {
        let _ = writeln!(err, "shrinking wellness fails on {violations} (r, s, component) triples");
        if config.fail_on_violation && config.command != Command::Diagram {
            return Ok(EXIT_VIOLATION);
        }
    }
    Ok(EXIT_OK)
}

fn pair_mode(config: &RunConfig) -> PairMode {
    if config.consecutive {
        PairMode::Consecutive
    } else {
        PairMode::All
    }
}

fn load(config: &RunConfig) -> Result<Instance<f64>, Failure> {
    let path = config.input.as_ref().ok_or_else(|| Failure::Input("--input is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let inst: Instance<f64> = parse_instance(&text).map_err(|e| match Failure::from(e) {
        Failure::Input(m) | Failure::Internal(m) => Failure::Input(format!("{}: {m}", path.display())),
    })?;
    let family = match config.family {
        None => inst.family.clone(),
        Some(FamilyOverride::Full) => PerturbationFamily::FullSupNorm,
        Some(FamilyOverride::Shift) => PerturbationFamily::Shift,
    };
    let radii = match &config.radii {
        None => inst.radii.clone(),
        Some(values) => {
            if values.is_empty() || values.iter().any(|r| !r.is_finite() || *r < 0.0) {
                return Err(Failure::Input("radii must be finite, nonnegative and nonempty".into()));
            }
            RadiiSpec::Explicit(values.clone())
        }
    };
    Ok(Instance::new(inst.field, inst.targets, family, radii)?)
}

fn lattice_options() -> Result<LatticeOptions, Failure> {
    let mut options = LatticeOptions::default();
    if let Ok(raw) = std::env::var(BUDGET_VAR) {
        options.budget = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{BUDGET_VAR} must be a nonnegative integer, got {raw:?}")))?;
    }
    Ok(options)
}

fn crosscheck(analysis: &Analysis<f64>, config: &RunConfig) -> Result<CrosscheckSummary, Failure> {
    let options = lattice_options()?;
    Ok(oracle_crosscheck(&analysis.tree, &analysis.diagram, &analysis.family, config.lattice_resolution, options)?)
}

fn summary_line(s: &CrosscheckSummary) -> String {
    format!(
        "{} fibers checked, {} skipped; {} lattice searches, {} found avoiders, {} abandoned",
        s.fibers_checked, s.fibers_skipped, s.lattice_runs, s.lattice_witnesses, s.lattice_skipped
    )
}

fn crosscheck_json(s: &CrosscheckSummary, resolution: f64) -> Value {
    json!({
        "resolution": resolution,
        "fibers_checked": s.fibers_checked,
        "fibers_skipped": s.fibers_skipped,
        "lattice_runs": s.lattice_runs,
        "lattice_witnesses": s.lattice_witnesses,
        "lattice_skipped": s.lattice_skipped,
    })
}

fn insert(report: &mut Value, key: &str, value: Value) {
    report.as_object_mut().expect("report is an object").insert(key.into(), value);
}

/// Feeds the serialized report back through the library's checker.
fn reverify(report: &Value) -> Result<(), Failure> {
    verify_report(&to_json_string(report))
        .map(|_| ())
        .map_err(|e| Failure::Internal(format!("emitted report fails re-verification: {e}")))
}

fn emit(config: &RunConfig, out: &mut dyn Write, body: &str) -> Result<(), Failure> {
    match &config.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => out.write_all(body.as_bytes()).map_err(|e| Failure::Internal(e.to_string())),
    }
}

/// Both step functions in one table, tagged by series. The upper rank bound
/// is included when some verdict is undecided.
pub fn diagram_csv(analysis: &Analysis<f64>) -> String {
    let mut series = vec![("betti0", &analysis.betti0), ("rank", &analysis.diagram.rank)];
    if !analysis.diagram.is_exact() {
        series.push(("rank_upper", &analysis.diagram.rank_upper));
    }
    let mut out = String::from("series,r_lo,r_hi,value,lo_closed,hi_closed\n");
    for (name, step) in series {
        for line in step_csv(step).lines().skip(1) {
            out.push_str(&format!("{name},{line}\n"));
        }
    }
    out
}

fn violations_csv(analysis: &Analysis<f64>) -> String {
    let mut out = String::from("r,s,component\n");
    for v in &analysis.swl.violations {
        out.push_str(&format!(
            "{},{},{}\n",
            wellgroups::io::format_g12(v.r),
            wellgroups::io::format_g12(v.s),
            v.component.0
        ));
    }
    out
}

fn labels(step: &wellgroups::homology::StepFunction<f64>) -> Vec<String> {
    step.intervals().iter().map(|i| i.label()).collect()
}

fn counterexample(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let inst = counterexample_instance::<f64>();
    let analysis = inst.analyze_with(pair_mode(config))?;
    let mut report = report_json(&inst, &analysis);
    reverify(&report)?;

    let betti = labels(&analysis.betti0);
    let rank = labels(&analysis.diagram.rank);
    let mut mismatches = Vec::new();
    if betti != COUNTEREXAMPLE_BETTI0 {
        mismatches.push(format!("betti0 {betti:?}, expected {COUNTEREXAMPLE_BETTI0:?}"));
    }
    if rank != COUNTEREXAMPLE_RANK {
        mismatches.push(format!("rank {rank:?}, expected {COUNTEREXAMPLE_RANK:?}"));
    }
    let violations = &analysis.swl.violations;
    if let Some(v) = violations.iter().find(|v| !(v.r > 1.0 && v.r < 2.0 && (2.0..=5.0).contains(&v.s))) {
        mismatches.push(format!("unexpected violation at r = {}, s = {}", v.r, v.s));
    }
    if !violations.iter().any(|v| v.r == 1.5 && v.s == 2.0) && !config.consecutive {
        mismatches.push("violation (1.5, 2) not reported".into());
    }
    if config.oracle_crosscheck {
        let summary = crosscheck(&analysis, config)?;
        let _ = writeln!(err, "oracle cross-check: {}", summary_line(&summary));
        insert(&mut report, "crosscheck", crosscheck_json(&summary, config.lattice_resolution));
    }

    let mut text = format!("betti0: {}\nrank: {}\n", betti.join(", "), rank.join(", "));
    text.push_str(&format!("violations: {}\n", violations.len()));
    for v in violations.iter().filter(|v| v.s == 2.0) {
        text.push_str(&format!("  r = {}, s = {}, component {}\n", v.r, v.s, v.component.0));
    }
    out.write_all(text.as_bytes()).map_err(|e| Failure::Internal(e.to_string()))?;
    if let Some(path) = &config.output {
        std::fs::write(path, to_json_string(&report) + "\n")
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }

    if !mismatches.is_empty() {
        return Err(Failure::Internal(format!("counterexample mismatch: {}", mismatches.join("; "))));
    }
    let _ = writeln!(err, "counterexample matches the ground truth");
    Ok(EXIT_OK)
}
