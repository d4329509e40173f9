use crate::domain::{Region, VertexId};
use crate::error::{Error, Result};
use crate::homology::MergeTree;
use crate::perturbations::{avoidable, blend, min_target_gap, zeros_on, PerturbationFamily, PerturbedField, Verdict};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerEntry {
    pub component: VertexId,
    pub avoidable: bool,
    /// Whether the final perturbation meets the target on the component.
    pub hit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizingPerturbation<S> {
    pub perturbation: PerturbedField<S>,
    pub ledger: Vec<LedgerEntry>,
}

/// A single perturbation within `r` that avoids the target on every
/// avoidable component at `r`, built by blending the per-component witnesses
/// one at a time. It meets the target exactly on the unavoidable components.
pub fn minimizing_perturbation<S: Scalar>(
    tree: &MergeTree<S>,
    r: S,
    family: &PerturbationFamily<S>,
) -> Result<MinimizingPerturbation<S>> {
    if family.kind() != crate::well_function::FamilyKind::FullSupNorm {
        return Err(Error::MinimizingFamily(family.kind().name()));
    }
    if r < S::zero() || r.is_nan() {
        return Err(Error::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    let targets = tree.targets();
    let f = tree.field();
    let comps = tree.components_at(r);

    let mut h: Option<PerturbedField<S>> = None;
    let mut covered = Region::default();
    let mut avoid = Vec::with_capacity(comps.len());
    for comp in &comps {
        let decision = avoidable(tree, comp, family)?;
        avoid.push(decision.verdict.is_avoidable());
        if let Verdict::Avoidable(witness) = decision.verdict {
            h = Some(match h {
                None => witness,
                Some(prev) => blend(f, &prev, &witness, &covered, &comp.region, targets)?,
            });
            covered = covered.union(&comp.region);
        }
    }
    let perturbation = h.unwrap_or_else(|| PerturbedField::identity(f));
    if perturbation.distance() > r + S::verify_tol() {
        return Err(Error::Verification(format!("minimizing perturbation is {} from f", perturbation.distance())));
    }

    let mut ledger = Vec::with_capacity(comps.len());
    for (comp, &avoidable) in comps.iter().zip(&avoid) {
        let zeros = zeros_on(perturbation.field(), targets, &comp.region);
        let hit = if avoidable {
            !zeros.is_empty()
        } else {
            // a touch within rounding still counts on unavoidable components
            !zeros.is_empty() || min_target_gap(perturbation.field(), targets, &comp.region) <= S::verify_tol()
        };
        if avoidable == hit {
            return Err(Error::Verification(format!(
                "component {}: avoidable = {avoidable} but hit = {hit}",
                comp.id
            )));
        }
        ledger.push(LedgerEntry { component: comp.id, avoidable, hit });
    }
    Ok(MinimizingPerturbation { perturbation, ledger })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::domain::{refine_for_targets, Complex1D, ScalarField, TargetSet};
    use crate::well_function::well_field_prime;

    fn path_tree(values: &[f64], target: f64) -> MergeTree<f64> {
        let vs = (0..values.len()).map(|i| (VertexId(i as i64), i as f64)).collect();
        let es = (1..values.len()).map(|i| (VertexId(i as i64 - 1), VertexId(i as i64), 1.0)).collect();
        let c = Arc::new(Complex1D::new("path", vs, es).unwrap());
        let f = ScalarField::new(c, values.to_vec()).unwrap();
        let a = TargetSet::singleton(target).unwrap();
        let refined = refine_for_targets(&f, &a);
        let w = well_field_prime(&refined.field, &a);
        MergeTree::new(&refined.field, &a, &w).unwrap()
    }

    #[test]
    fn two_avoidable_and_one_unavoidable() {
        // two one-sided wells at 0.5 and 0.7, then one crossing 0 with extrema +-2
        let tree = path_tree(&[0.5, 5.0, 0.7, 5.0, 2.0, 0.0, -2.0, -5.0], 0.0);
        let r = 1.0;
        let comps = tree.components_at(r);
        assert_eq!(comps.len(), 3);
        let out = minimizing_perturbation(&tree, r, &PerturbationFamily::FullSupNorm).unwrap();
        let hits: Vec<bool> = out.ledger.iter().map(|e| e.hit).collect();
        let avoid: Vec<bool> = out.ledger.iter().map(|e| e.avoidable).collect();
        assert_eq!(avoid, vec![true, true, false]);
        assert_eq!(hits, vec![false, false, true]);
        assert!(out.perturbation.distance() <= r + 1e-9);
    }

    #[test]
    fn nothing_avoidable_keeps_f() {
        let tree = path_tree(&[-3.0, 3.0], 0.0);
        let out = minimizing_perturbation(&tree, 1.0, &PerturbationFamily::FullSupNorm).unwrap();
        assert_eq!(out.perturbation.distance(), 0.0);
        assert_eq!(out.ledger.len(), 1);
        assert!(out.ledger[0].hit);
    }

    #[test]
    fn everything_avoidable() {
        let tree = path_tree(&[0.5, 5.0, 0.3, 5.0, -0.2], 0.0);
        let out = minimizing_perturbation(&tree, 0.6, &PerturbationFamily::FullSupNorm).unwrap();
        assert_eq!(out.ledger.len(), 3);
        assert!(out.ledger.iter().all(|e| e.avoidable && !e.hit));
    }

    #[test]
    fn other_families_rejected() {
        let tree = path_tree(&[-3.0, 3.0], 0.0);
        assert_eq!(
            minimizing_perturbation(&tree, 1.0, &PerturbationFamily::Shift),
            Err(Error::MinimizingFamily("shift"))
        );
    }
}
