use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::domain::{Complex1D, ScalarField, TargetSet, VertexId};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::io::format::num;
use crate::perturbations::{PerturbationFamily, SampledPerturbation};
use crate::scalar::Scalar;
use crate::well_groups::RadiiSpec;

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    name: String,
    vertices: Vec<RawVertex>,
    edges: Vec<RawEdge>,
    field: BTreeMap<String, f64>,
    targets: Vec<f64>,
    family: RawFamily,
    radii: RawRadii,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: i64,
    position: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    u: i64,
    v: i64,
    length: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawFamily {
    Full,
    Shift,
    Sampled { perturbations: Vec<RawPerturbation> },
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbation {
    field: BTreeMap<String, f64>,
    distance: f64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
enum RadiiMode {
    Auto,
    Explicit,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRadii {
    mode: RadiiMode,
    #[serde(default)]
    values: Option<Vec<f64>>,
}

fn json_path(path: &serde_path_to_error::Path) -> String {
    let p = path.to_string();
    if p == "." {
        "$".into()
    } else {
        format!("$.{p}")
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn finite<S: Scalar>(x: f64, path: impl Fn() -> String) -> Result<S> {
    if !x.is_finite() {
        return Err(Error::NonFinite { path: path() });
    }
    Ok(S::lit(x))
}

fn field_values<S: Scalar>(
    complex: &Arc<Complex1D<S>>,
    map: &BTreeMap<String, f64>,
    path: &str,
) -> Result<ScalarField<S>> {
    let mut values = vec![None; complex.vertex_count()];
    for (key, &x) in map {
        let id: i64 = key.parse().map_err(|_| schema(format!("{path}.{key}"), "keys must be integer vertex ids"))?;
        let v = complex
            .index_of(VertexId(id))
            .ok_or_else(|| schema(format!("{path}.{key}"), format!("vertex {id} does not exist")))?;
        values[v] = Some(finite(x, || format!("{path}.{key}"))?);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| schema(path, format!("missing value for vertex {}", complex.vertex(v).id))))
        .collect::<Result<Vec<S>>>()?;
    ScalarField::new(complex.clone(), values)
}

/// Reads an instance; errors name the offending JSON path.
pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawInstance = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = json_path(e.path());
        schema(path, e.inner().to_string())
    })?;

    let vertices = raw
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| Ok((VertexId(v.id), finite(v.position, || format!("$.vertices[{i}].position"))?)))
        .collect::<Result<Vec<_>>>()?;
    let edges = raw
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| Ok((VertexId(e.u), VertexId(e.v), finite(e.length, || format!("$.edges[{i}].length"))?)))
        .collect::<Result<Vec<_>>>()?;
    let complex = Arc::new(Complex1D::new(raw.name, vertices, edges)?);
    let field = field_values(&complex, &raw.field, "$.field")?;
    let targets = raw
        .targets
        .iter()
        .enumerate()
        .map(|(i, &a)| finite(a, || format!("$.targets[{i}]")))
        .collect::<Result<Vec<S>>>()?;
    let targets = TargetSet::new(targets)?;
    let family = match raw.family {
        RawFamily::Full => PerturbationFamily::FullSupNorm,
        RawFamily::Shift => PerturbationFamily::Shift,
        RawFamily::Sampled { perturbations } => PerturbationFamily::SampledParametric(
            perturbations
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let path = format!("$.family.perturbations[{i}]");
                    let distance: S = finite(p.distance, || format!("{path}.distance"))?;
                    if distance < S::zero() {
                        return Err(schema(format!("{path}.distance"), "distance must be nonnegative"));
                    }
                    Ok(SampledPerturbation { field: field_values(&complex, &p.field, &format!("{path}.field"))?, distance })
                })
                .collect::<Result<_>>()?,
        ),
    };
    let values = raw
        .radii
        .values
        .unwrap_or_default()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let x: S = finite(r, || format!("$.radii.values[{i}]"))?;
            if x < S::zero() {
                return Err(schema(format!("$.radii.values[{i}]"), "radii must be nonnegative"));
            }
            Ok(x)
        })
        .collect::<Result<Vec<S>>>()?;
    let radii = match raw.radii.mode {
        RadiiMode::Auto => RadiiSpec::Auto { extra: values },
        RadiiMode::Explicit => {
            if values.is_empty() {
                return Err(schema("$.radii.values", "explicit mode needs at least one radius"));
            }
            RadiiSpec::Explicit(values)
        }
    };
    Instance::new(field, targets, family, radii)
}

fn field_json<S: Scalar>(f: &ScalarField<S>) -> Value {
    let complex = f.complex();
    Value::Object(
        (0..complex.vertex_count())
            .map(|v| (complex.vertex(v).id.to_string(), num(f.value(v))))
            .collect(),
    )
}

/// Complex and field in the instance schema's layout.
pub fn complex_json<S: Scalar>(f: &ScalarField<S>) -> Value {
    let complex = f.complex();
    json!({
        "name": complex.name(),
        "vertices": complex.vertices().iter().map(|v| json!({"id": v.id.0, "position": num(v.position)})).collect::<Vec<_>>(),
        "edges": complex.edges().iter().map(|e| json!({
            "u": complex.vertex(e.u).id.0,
            "v": complex.vertex(e.v).id.0,
            "length": num(e.length),
        })).collect::<Vec<_>>(),
        "field": field_json(f),
    })
}

/// Writes an instance in the input schema.
pub fn instance_json<S: Scalar>(inst: &Instance<S>) -> Value {
    let mut out = complex_json(&inst.field);
    let family = match &inst.family {
        PerturbationFamily::FullSupNorm => json!({"kind": "full"}),
        PerturbationFamily::Shift => json!({"kind": "shift"}),
        PerturbationFamily::SampledParametric(list) => json!({
            "kind": "sampled",
            "perturbations": list.iter().map(|p| json!({"field": field_json(&p.field), "distance": num(p.distance)})).collect::<Vec<_>>(),
        }),
    };
    let radii = match &inst.radii {
        RadiiSpec::Auto { extra } if extra.is_empty() => json!({"mode": "auto"}),
        RadiiSpec::Auto { extra } => json!({"mode": "auto", "values": extra.iter().map(|&r| num(r)).collect::<Vec<_>>()}),
        RadiiSpec::Explicit(values) => {
            json!({"mode": "explicit", "values": values.iter().map(|&r| num(r)).collect::<Vec<_>>()})
        }
    };
    let obj = out.as_object_mut().expect("object");
    obj.insert("targets".into(), inst.targets.values().iter().map(|&a| num(a)).collect());
    obj.insert("family".into(), family);
    obj.insert("radii".into(), radii);
    out
}
