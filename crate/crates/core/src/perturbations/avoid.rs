use crate::domain::refine::level_crossings;
use crate::domain::{Location, PlField, VertexId};
use crate::error::{Error, Result};
use crate::homology::{Component, MergeTree};
use crate::perturbations::{zeros_on, PerturbationFamily, PerturbedField, Provenance};
use crate::scalar::Scalar;
use crate::well_function::IntervalUnion;

/// Why no admissible perturbation avoids the targets on a component.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<S> {
    /// `f(high) >= target + r` and `f(low) <= target - r` inside the
    /// component; any perturbation within `r` in the sup metric is `>= target`
    /// at `high` and `<= target` at `low`, so it meets the target on a path
    /// between them.
    Ivt { target: S, high: Location<S>, low: Location<S> },
    /// Shifts `t` for which `f + t` meets the component. They cover `[-r, r]`.
    ShiftCover { hits: Vec<(S, S)> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<S> {
    Avoidable(PerturbedField<S>),
    Unavoidable(Certificate<S>),
    /// No listed perturbation avoids the component and no certificate applies.
    Unknown,
}

impl<S> Verdict<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Avoidable(_) => "avoidable",
            Verdict::Unavoidable(_) => "unavoidable",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn is_unavoidable(&self) -> bool {
        matches!(self, Verdict::Unavoidable(_))
    }

    pub fn is_avoidable(&self) -> bool {
        matches!(self, Verdict::Avoidable(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvoidabilityDecision<S> {
    pub component: VertexId,
    pub radius: S,
    pub verdict: Verdict<S>,
}

fn ivt_certificate<S: Scalar>(tree: &MergeTree<S>, comp: &Component<S>) -> Option<Certificate<S>> {
    let r = comp.radius;
    comp.offsets.iter().enumerate().find_map(|(j, &(lo, hi))| {
        (hi >= r && lo <= -r).then(|| Certificate::Ivt {
            target: tree.targets().get(j),
            high: comp.argmax,
            low: comp.argmin,
        })
    })
}

/// Shifts `t` with `f + t` meeting the component, each interval widened by a
/// rounding tolerance so that gaps and margins below rounding do not count.
pub fn shift_hits<S: Scalar>(comp: &Component<S>) -> IntervalUnion<S> {
    let scale = comp.offsets.iter().fold(S::one() + comp.radius, |m, &(lo, hi)| m.max(lo.abs()).max(hi.abs()));
    let tol = S::dedup_tol() * scale;
    IntervalUnion::from_intervals(comp.offsets.iter().map(|&(lo, hi)| (-hi - tol, -lo + tol)).collect())
}

/// Global clamp that keeps `f` on one side of `target` over the component.
fn clamp_witness<S: Scalar>(tree: &MergeTree<S>, comp: &Component<S>, j: usize) -> Result<PerturbedField<S>> {
    let f = tree.field();
    let r = comp.radius;
    let target = tree.targets().get(j);
    // exact at cut points, unlike f_min - target
    let (lo, hi) = comp.offsets[j];
    let above = lo + r >= r - hi;
    let (level, other) = if above {
        let level = target + (lo + r) * S::half();
        (level, level - r)
    } else {
        let level = target - (r - hi) * S::half();
        (level, level + r)
    };
    let complex = f.complex().clone();
    let cuts = (0..complex.edge_count())
        .map(|e| level_crossings(f, e, &[level, other]).into_iter().map(|(t, _)| t).collect())
        .collect();
    let g = PlField::from_fn(complex, cuts, |loc| {
        let y = f.eval_unchecked(loc);
        if above {
            (y + r).min(y.max(level))
        } else {
            (y - r).max(y.min(level))
        }
    });
    PerturbedField::certify(f, g, Provenance::Clamp { level, radius: r, above })
}

/// Uncovered shift in `[-r, r]` farthest from every hit interval.
fn shift_witness<S: Scalar>(hits: &IntervalUnion<S>, r: S) -> Option<S> {
    let mut candidates = vec![r, -r];
    for pair in hits.intervals().windows(2) {
        let (lo, hi) = (pair[0].1.max(-r), pair[1].0.min(r));
        if lo < hi {
            candidates.push((lo + hi) * S::half());
        }
    }
    let margin = |t: S| hits.intervals().iter().fold(S::infinity(), |m, &(a, b)| m.min((a - t).max(t - b)));
    candidates
        .into_iter()
        .filter(|&t| t.abs() <= r && !hits.contains(t))
        .max_by(|&x, &y| margin(x).partial_cmp(&margin(y)).expect("finite"))
}

/// Decides whether some perturbation within `comp.radius` avoids every target
/// on the component.
pub fn avoidable<S: Scalar>(
    tree: &MergeTree<S>,
    comp: &Component<S>,
    family: &PerturbationFamily<S>,
) -> Result<AvoidabilityDecision<S>> {
    let r = comp.radius;
    let targets = tree.targets();
    let f = tree.field();
    let verdict = match family {
        PerturbationFamily::FullSupNorm => {
            targets.as_singleton().ok_or(Error::MultiTargetFullSupNorm)?;
            match ivt_certificate(tree, comp) {
                Some(cert) => Verdict::Unavoidable(cert),
                None => Verdict::Avoidable(clamp_witness(tree, comp, 0)?),
            }
        }
        PerturbationFamily::Shift => {
            let hits = shift_hits(comp);
            if hits.covers(-r, r) {
                Verdict::Unavoidable(Certificate::ShiftCover { hits: hits.intervals().to_vec() })
            } else {
                let t = shift_witness(&hits, r).ok_or_else(|| {
                    Error::Verification(format!("no uncovered shift found in [-{r}, {r}]"))
                })?;
                Verdict::Avoidable(PerturbedField::shift(f, t)?)
            }
        }
        PerturbationFamily::SampledParametric(list) => {
            let mut found = None;
            for (index, p) in list.iter().enumerate() {
                if p.distance > r {
                    continue;
                }
                let g = PlField::from(&p.field);
                if !g.same_complex(f.complex()) {
                    return Err(Error::ComplexMismatch);
                }
                if zeros_on(&g, targets, &comp.region).is_empty() {
                    found = Some(PerturbedField::certify(f, g, Provenance::Sampled { index })?);
                    break;
                }
            }
            match (found, ivt_certificate(tree, comp)) {
                (Some(w), _) => Verdict::Avoidable(w),
                (None, Some(cert)) => Verdict::Unavoidable(cert),
                (None, None) => Verdict::Unknown,
            }
        }
    };
    let decision = AvoidabilityDecision { component: comp.id, radius: r, verdict };
    verify_decision(tree, comp, &decision)?;
    Ok(decision)
}

/// Re-checks a witness or certificate from scratch.
pub fn verify_decision<S: Scalar>(
    tree: &MergeTree<S>,
    comp: &Component<S>,
    decision: &AvoidabilityDecision<S>,
) -> Result<()> {
    let r = comp.radius;
    let tol = S::verify_tol();
    let f = tree.field();
    let complex = tree.complex();
    match &decision.verdict {
        Verdict::Avoidable(w) => {
            let actual = PlField::from(f).sup_distance(w.field())?;
            if (actual - w.distance()).abs() > tol || actual > r + tol {
                return Err(Error::Verification(format!(
                    "witness for component {} is {actual} from f, radius {r}",
                    comp.id
                )));
            }
            if let Some(z) = zeros_on(w.field(), tree.targets(), &comp.region).first() {
                return Err(Error::Verification(format!("witness for component {} meets a target at {z:?}", comp.id)));
            }
        }
        Verdict::Unavoidable(Certificate::Ivt { target, high, low }) => {
            for loc in [high, low] {
                if !comp.region.contains(complex, loc) {
                    return Err(Error::Verification(format!("certificate point {loc:?} outside component {}", comp.id)));
                }
            }
            let (fh, fl) = (f.eval(high)?, f.eval(low)?);
            if fh < *target + r - tol || fl > *target - r + tol {
                return Err(Error::Verification(format!(
                    "certificate for component {} has f = {fh}, {fl} around target {target} at radius {r}",
                    comp.id
                )));
            }
        }
        Verdict::Unavoidable(Certificate::ShiftCover { hits }) => {
            let recomputed = shift_hits(comp);
            if recomputed.intervals() != hits.as_slice() || !recomputed.covers(-r, r) {
                return Err(Error::Verification(format!("shift cover for component {} does not cover [-r, r]", comp.id)));
            }
        }
        Verdict::Unknown => {}
    }
    Ok(())
}
