use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::domain::{Complex1D, Knot, Location, PlField, Region, ScalarField, Segment, TargetSet, VertexId};
use crate::error::{Error, Result};
use crate::homology::{Component, StepFunction};
use crate::instance::{Analysis, Instance};
use crate::io::format::{format_g12, num};
use crate::io::instance_json::complex_json;
use crate::perturbations::{min_target_gap, zeros_on, Certificate, PerturbedField, Provenance, Verdict};
use crate::scalar::Scalar;
use crate::well_function::WellVariant;
use crate::well_groups::{PairMode, WellGroupFiber};

fn location_json<S: Scalar>(loc: &Location<S>, complex: &Complex1D<S>) -> Value {
    match complex.normalize(*loc) {
        Location::Vertex(v) => json!({"vertex": complex.vertex(v).id.0}),
        Location::Edge { edge, t } => json!({"edge": edge, "t": num(t), "position": num(complex.position(loc))}),
    }
}

fn region_json<S: Scalar>(region: &Region<S>, complex: &Complex1D<S>) -> Value {
    json!({
        "vertices": region.vertices.iter().map(|&v| complex.vertex(v).id.0).collect::<Vec<_>>(),
        "segments": region.segments.iter().map(|s| json!({"edge": s.edge, "t0": num(s.t0), "t1": num(s.t1)})).collect::<Vec<_>>(),
    })
}

fn provenance_json<S: Scalar>(p: &Provenance<S>) -> Value {
    match p {
        Provenance::Identity => json!({"kind": "identity"}),
        Provenance::Shift { t } => json!({"kind": "shift", "t": num(*t)}),
        Provenance::Clamp { level, radius, above } => {
            json!({"kind": "clamp", "level": num(*level), "radius": num(*radius), "above": above})
        }
        Provenance::Contraction { target, radius, eps } => {
            json!({"kind": "contraction", "target": num(*target), "radius": num(*radius), "eps": num(*eps)})
        }
        Provenance::Blend { steps } => json!({"kind": "blend", "steps": steps}),
        Provenance::Sampled { index } => json!({"kind": "sampled", "index": index}),
        Provenance::Lattice => json!({"kind": "lattice"}),
        Provenance::User => json!({"kind": "user"}),
    }
}

pub fn perturbation_json<S: Scalar>(p: &PerturbedField<S>) -> Value {
    let g = p.field();
    let complex = g.complex();
    let knots: Vec<Value> = (0..complex.edge_count())
        .flat_map(|e| g.knots(e).iter().map(move |k| json!({"edge": e, "t": num(k.t), "value": num(k.value)})))
        .collect();
    json!({
        "provenance": provenance_json(p.provenance()),
        "distance": num(p.distance()),
        "vertex_values": (0..complex.vertex_count())
            .map(|v| (complex.vertex(v).id.to_string(), num(g.vertex_values()[v])))
            .collect::<serde_json::Map<_, _>>(),
        "knots": knots,
    })
}

fn certificate_json<S: Scalar>(c: &Certificate<S>, complex: &Complex1D<S>) -> Value {
    match c {
        Certificate::Ivt { target, high, low } => json!({
            "kind": "ivt",
            "target": num(*target),
            "high": location_json(high, complex),
            "low": location_json(low, complex),
        }),
        Certificate::ShiftCover { hits } => json!({
            "kind": "shift_cover",
            "hits": hits.iter().map(|&(a, b)| json!([num(a), num(b)])).collect::<Vec<_>>(),
        }),
    }
}

fn component_json<S: Scalar>(comp: &Component<S>, verdict: &Verdict<S>, complex: &Complex1D<S>) -> Value {
    let mut out = json!({
        "id": comp.id.0,
        "f_min": num(comp.f_min),
        "f_max": num(comp.f_max),
        "verdict": verdict.name(),
        "region": region_json(&comp.region, complex),
    });
    let obj = out.as_object_mut().expect("object");
    match verdict {
        Verdict::Avoidable(w) => {
            obj.insert("witness".into(), perturbation_json(w));
        }
        Verdict::Unavoidable(c) => {
            obj.insert("certificate".into(), certificate_json(c, complex));
        }
        Verdict::Unknown => {}
    }
    out
}

fn fiber_json<S: Scalar>(analysis: &Analysis<S>, fiber: &WellGroupFiber<S>) -> Value {
    let complex = analysis.tree.complex();
    let comps = analysis.tree.components_at(fiber.radius);
    let components: Vec<Value> = comps
        .iter()
        .zip(&fiber.decisions)
        .map(|(c, d)| {
            debug_assert_eq!(c.id, d.component);
            component_json(c, &d.verdict, complex)
        })
        .collect();
    json!({
        "r": num(fiber.radius),
        "rank": fiber.rank,
        "rank_upper": fiber.rank_upper,
        "injective_from_previous": fiber.injective_from_previous,
        "components": components,
    })
}

/// Rows `(r_lo, r_hi, value, lo_closed, hi_closed)`; `r_hi` is `None` for
/// the unbounded last piece.
pub fn step_rows<S: Scalar>(step: &StepFunction<S>) -> Vec<(S, Option<S>, usize, bool, bool)> {
    step.intervals().iter().map(|i| (i.lo, i.hi, i.value, i.lo_closed, i.hi_closed)).collect()
}

fn step_json<S: Scalar>(step: &StepFunction<S>, key: &str) -> Value {
    step_rows(step)
        .into_iter()
        .map(|(lo, hi, value, lc, hc)| {
            json!({"r_lo": num(lo), "r_hi": hi.map_or(Value::Null, num), key: value, "lo_closed": lc, "hi_closed": hc})
        })
        .collect()
}

/// Lower and upper rank in one step function, so both share breakpoints.
fn paired_rank<S: Scalar>(analysis: &Analysis<S>) -> StepFunction<S> {
    let d = &analysis.diagram;
    let code = |k: usize| (d.fibers[k].rank << 32) | d.fibers[k].rank_upper;
    let at = (0..d.grid.len()).map(|i| code(2 * i)).collect();
    let after = (0..d.grid.len()).map(|i| code(2 * i + 1)).collect();
    StepFunction::new(d.grid.clone(), at, after)
}

fn diagram_json<S: Scalar>(analysis: &Analysis<S>) -> Value {
    let exact = analysis.diagram.is_exact();
    step_rows(&paired_rank(analysis))
        .into_iter()
        .map(|(lo, hi, code, lc, hc)| {
            let mut row = json!({
                "r_lo": num(lo),
                "r_hi": hi.map_or(Value::Null, num),
                "rank": code >> 32,
                "lo_closed": lc,
                "hi_closed": hc,
            });
            if !exact {
                row.as_object_mut().expect("object").insert("rank_upper".into(), json!(code & 0xffff_ffff));
            }
            row
        })
        .collect()
}

fn variant_name(v: WellVariant) -> String {
    match v {
        WellVariant::Primed => "distance".into(),
        WellVariant::DoublePrimed => "thickening".into(),
        WellVariant::FamilyDefinitional(k) => format!("family:{}", k.name()),
    }
}

/// Full analysis report. Keys are sorted when serialized.
pub fn report_json<S: Scalar>(inst: &Instance<S>, analysis: &Analysis<S>) -> Value {
    let tree = &analysis.tree;
    let complex = tree.complex();
    let swl = &analysis.swl;
    json!({
        "instance": {
            "name": inst.name(),
            "family": inst.family.kind().name(),
            "targets": inst.targets.values().iter().map(|&a| num(a)).collect::<Vec<_>>(),
            "vertex_count": inst.complex().vertex_count(),
            "edge_count": inst.complex().edge_count(),
        },
        "refined": complex_json(&analysis.refined.field),
        "well_field": {
            "variant": variant_name(analysis.well.variant()),
            "values": (0..complex.vertex_count())
                .map(|v| (complex.vertex(v).id.to_string(), num(analysis.well.value(v))))
                .collect::<serde_json::Map<_, _>>(),
        },
        "merge_tree": {
            "births": tree.births().iter().map(|b| json!({"value": num(b.value), "component": b.component.0})).collect::<Vec<_>>(),
            "merges": tree.merges().iter().map(|m| json!({
                "value": num(m.value), "surviving": m.surviving.0, "absorbed": m.absorbed.0,
            })).collect::<Vec<_>>(),
        },
        "betti0": step_json(&analysis.betti0, "value"),
        "well_diagram": diagram_json(analysis),
        "grid": analysis.diagram.grid.iter().map(|&r| num(r)).collect::<Vec<_>>(),
        "fibers": analysis.diagram.fibers.iter().map(|f| fiber_json(analysis, f)).collect::<Vec<_>>(),
        "swl": {
            "mode": match swl.mode { PairMode::All => "all", PairMode::Consecutive => "consecutive" },
            "pairs_checked": swl.pairs_checked,
            "violations": swl.violations.iter().map(|v| json!({
                "r": num(v.r),
                "s": num(v.s),
                "component": v.component.0,
                "preimages": v.preimages.iter().map(|(id, verdict)| json!({"id": id.0, "verdict": verdict})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "undecided_pairs": swl.undecided,
            "non_injective_pairs": swl.injectivity.iter().filter(|p| !p.injective).count(),
            "admissible": swl.admissible,
            "tame": swl.tame,
            "component_count_at_0": swl.component_count_at_0,
        },
    })
}

fn csv_number<S: Scalar>(x: Option<S>) -> String {
    match x {
        Some(v) => format_g12(v.to_f64().unwrap_or(f64::NAN)),
        None => "inf".into(),
    }
}

/// Step function as CSV with header `r_lo,r_hi,value,lo_closed,hi_closed`.
pub fn step_csv<S: Scalar>(step: &StepFunction<S>) -> String {
    let mut out = String::from("r_lo,r_hi,value,lo_closed,hi_closed\n");
    for (lo, hi, value, lc, hc) in step_rows(step) {
        out.push_str(&format!("{},{},{value},{lc},{hc}\n", csv_number(Some(lo)), csv_number(hi)));
    }
    out
}

// Re-verification of emitted reports.

#[derive(Deserialize)]
struct RawReport {
    instance: RawReportInstance,
    refined: RawComplex,
    fibers: Vec<RawFiber>,
}

#[derive(Deserialize)]
struct RawReportInstance {
    targets: Vec<f64>,
}

#[derive(Deserialize)]
struct RawComplex {
    name: String,
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
    field: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawVertex {
    id: i64,
    position: f64,
}

#[derive(Deserialize)]
struct RawEdge {
    u: i64,
    v: i64,
    length: f64,
}

#[derive(Deserialize)]
struct RawFiber {
    r: f64,
    components: Vec<RawComponent>,
}

#[derive(Deserialize)]
struct RawComponent {
    id: i64,
    region: RawRegion,
    witness: Option<RawWitness>,
    certificate: Option<Value>,
}

#[derive(Deserialize)]
struct RawRegion {
    vertices: Vec<i64>,
    segments: Vec<RawSegment>,
}

#[derive(Deserialize)]
struct RawSegment {
    edge: usize,
    t0: f64,
    t1: f64,
}

#[derive(Deserialize)]
struct RawWitness {
    distance: f64,
    vertex_values: BTreeMap<String, f64>,
    knots: Vec<RawKnot>,
}

#[derive(Deserialize)]
struct RawKnot {
    edge: usize,
    t: f64,
    value: f64,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Verification(msg.into())
}

fn vertex_index(complex: &Complex1D<f64>, id: i64) -> Result<usize> {
    complex.index_of(VertexId(id)).ok_or_else(|| bad(format!("unknown vertex {id}")))
}

fn parse_location(complex: &Complex1D<f64>, v: &Value) -> Result<Location<f64>> {
    if let Some(id) = v.get("vertex").and_then(Value::as_i64) {
        return Ok(Location::Vertex(vertex_index(complex, id)?));
    }
    let edge = v.get("edge").and_then(Value::as_u64).ok_or_else(|| bad("location without vertex or edge"))? as usize;
    let t = v.get("t").and_then(Value::as_f64).ok_or_else(|| bad("edge location without t"))?;
    let loc = Location::Edge { edge, t };
    complex.validate_location(&loc)?;
    Ok(loc)
}

/// Counts of items checked by [`verify_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReportCheck {
    pub witnesses: usize,
    pub certificates: usize,
}

/// Rebuilds every witness and certificate from a report's own data and
/// checks it: witnesses stay within the radius and avoid the targets on
/// their component, certificates straddle a target by the radius or cover
/// all shifts in `[-r, r]`. Values in reports are rounded to 12 significant
/// digits, so comparisons allow a small slack.
pub fn verify_report(text: &str) -> Result<ReportCheck> {
    let raw: RawReport = serde_json::from_str(text).map_err(|e| bad(format!("unreadable report: {e}")))?;
    let slack = 1e-9;
    let vertices = raw.refined.vertices.iter().map(|v| (VertexId(v.id), v.position)).collect();
    let edges = raw.refined.edges.iter().map(|e| (VertexId(e.u), VertexId(e.v), e.length)).collect();
    let complex = Arc::new(Complex1D::new(raw.refined.name, vertices, edges)?);
    let mut values = vec![f64::NAN; complex.vertex_count()];
    for (k, &x) in &raw.refined.field {
        let id: i64 = k.parse().map_err(|_| bad(format!("bad vertex key {k}")))?;
        values[vertex_index(&complex, id)?] = x;
    }
    let f = ScalarField::new(complex.clone(), values)?;
    let base = PlField::from(&f);
    let targets = TargetSet::new(raw.instance.targets)?;
    let mut check = ReportCheck::default();

    for fiber in &raw.fibers {
        let r = fiber.r;
        for comp in &fiber.components {
            let region = Region {
                vertices: {
                    let mut vs =
                        comp.region.vertices.iter().map(|&id| vertex_index(&complex, id)).collect::<Result<Vec<_>>>()?;
                    vs.sort_unstable();
                    vs
                },
                segments: comp
                    .region
                    .segments
                    .iter()
                    .map(|s| Segment { edge: s.edge, t0: s.t0, t1: s.t1 })
                    .collect(),
            };
            if let Some(w) = &comp.witness {
                let mut vv = vec![f64::NAN; complex.vertex_count()];
                for (k, &x) in &w.vertex_values {
                    let id: i64 = k.parse().map_err(|_| bad(format!("bad vertex key {k}")))?;
                    vv[vertex_index(&complex, id)?] = x;
                }
                let mut knots: Vec<Vec<Knot<f64>>> = vec![Vec::new(); complex.edge_count()];
                for k in &w.knots {
                    knots.get_mut(k.edge).ok_or_else(|| bad("knot on unknown edge"))?.push(Knot { t: k.t, value: k.value });
                }
                let g = PlField::from_fn(
                    complex.clone(),
                    knots.iter().map(|ks| ks.iter().map(|k| k.t).collect()).collect(),
                    |loc| match *loc {
                        Location::Vertex(v) => vv[v],
                        Location::Edge { edge, t } => knots[edge]
                            .iter()
                            .find(|k| k.t == t)
                            .map_or(f64::NAN, |k| k.value),
                    },
                );
                let d = base.sup_distance(&g)?;
                if !(d <= r + slack) || (d - w.distance).abs() > slack * (1.0 + d.abs()) {
                    return Err(bad(format!("component {} at r = {r}: witness distance {d}", comp.id)));
                }
                if !zeros_on(&g, &targets, &region).is_empty() || min_target_gap(&g, &targets, &region) <= 0.0 {
                    return Err(bad(format!("component {} at r = {r}: witness meets a target", comp.id)));
                }
                check.witnesses += 1;
            }
            if let Some(c) = &comp.certificate {
                match c.get("kind").and_then(Value::as_str) {
                    Some("ivt") => {
                        let a = c.get("target").and_then(Value::as_f64).ok_or_else(|| bad("certificate without target"))?;
                        let high = parse_location(&complex, &c["high"])?;
                        let low = parse_location(&complex, &c["low"])?;
                        let contains = |loc: &Location<f64>| {
                            region.contains(&complex, loc)
                                || region.segments.iter().any(|s| match complex.normalize(*loc) {
                                    Location::Edge { edge, t } => edge == s.edge && t >= s.t0 - slack && t <= s.t1 + slack,
                                    Location::Vertex(_) => false,
                                })
                        };
                        if !contains(&high) || !contains(&low) {
                            return Err(bad(format!("component {} at r = {r}: certificate point outside", comp.id)));
                        }
                        if f.eval(&high)? < a + r - slack || f.eval(&low)? > a - r + slack {
                            return Err(bad(format!("component {} at r = {r}: certificate does not straddle", comp.id)));
                        }
                    }
                    Some("shift_cover") => {
                        let mut hits = Vec::new();
                        for &a in targets.values() {
                            let samples = region_values(&base, &region);
                            let lo = samples.iter().fold(f64::INFINITY, |m, &y| m.min(y - a));
                            let hi = samples.iter().fold(f64::NEG_INFINITY, |m, &y| m.max(y - a));
                            hits.push((-hi - slack, -lo + slack));
                        }
                        let union = crate::well_function::IntervalUnion::from_intervals(hits);
                        if !union.covers(-r, r) {
                            return Err(bad(format!("component {} at r = {r}: shifts not covered", comp.id)));
                        }
                    }
                    _ => return Err(bad("unknown certificate kind")),
                }
                check.certificates += 1;
            }
        }
    }
    Ok(check)
}

fn region_values(f: &PlField<f64>, region: &Region<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = region.vertices.iter().map(|&v| f.vertex_values()[v]).collect();
    for s in &region.segments {
        out.extend(f.samples_within(s.edge, s.t0, s.t1).iter().map(|&(_, y)| y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::counterexample_instance;
    use crate::io::format::to_json_string;

    #[test]
    fn counterexample_report_shape() {
        let inst = counterexample_instance::<f64>();
        let analysis = inst.analyze().unwrap();
        let report = report_json(&inst, &analysis);
        let diagram = report["well_diagram"].as_array().unwrap();
        let ranks: Vec<u64> = diagram.iter().map(|row| row["rank"].as_u64().unwrap()).collect();
        assert_eq!(ranks, vec![2, 0, 1, 0]);
        assert!(diagram[3]["r_hi"].is_null());
        assert!(diagram[0].get("rank_upper").is_none());
        assert_eq!(report["swl"]["component_count_at_0"], 2);
        assert_eq!(report["swl"]["admissible"], true);
    }

    #[test]
    fn report_is_deterministic_and_reverifies() {
        let inst = counterexample_instance::<f64>();
        let a = to_json_string(&report_json(&inst, &inst.analyze().unwrap()));
        let b = to_json_string(&report_json(&inst, &inst.analyze().unwrap()));
        assert_eq!(a, b);
        let check = verify_report(&a).unwrap();
        assert!(check.witnesses > 0 && check.certificates > 0);
    }

    #[test]
    fn tampered_witness_is_caught() {
        let inst = counterexample_instance::<f64>();
        let text = to_json_string(&report_json(&inst, &inst.analyze().unwrap()));
        let mut v: Value = serde_json::from_str(&text).unwrap();
        let fibers = v["fibers"].as_array_mut().unwrap();
        let fiber = fibers.iter_mut().find(|f| f["r"] == 1.5).unwrap();
        let comp = &mut fiber["components"][0];
        comp["witness"]["vertex_values"]["1"] = json!(-2.0);
        assert!(verify_report(&v.to_string()).is_err());
    }

    #[test]
    fn csv_rows() {
        let inst = counterexample_instance::<f64>();
        let analysis = inst.analyze().unwrap();
        assert_eq!(
            step_csv(&analysis.betti0),
            "r_lo,r_hi,value,lo_closed,hi_closed\n0,2,2,true,false\n2,inf,1,true,false\n"
        );
        let rank = step_csv(&analysis.diagram.rank);
        assert_eq!(rank.lines().nth(4), Some("5,inf,0,false,false"));
    }
}
