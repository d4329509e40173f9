use crate::domain::PlField;
use crate::error::{Error, Result};
use crate::homology::{Component, MergeTree};
use crate::perturbations::{lattice_search, min_target_gap, zeros_on, LatticeOptions, PerturbationFamily, Verdict};
use crate::scalar::Scalar;
use crate::well_groups::{subspace_oracle, WellDiagram, WellGroupFiber, MAX_COMPONENTS, MAX_SUBSETS};

/// Tallies from [`oracle_crosscheck`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CrosscheckSummary {
    pub fibers_checked: usize,
    /// Fibers skipped because they exceed the subspace oracle's limits.
    pub fibers_skipped: usize,
    pub lattice_runs: usize,
    /// Lattice searches that found an avoider.
    pub lattice_witnesses: usize,
    /// Lattice searches abandoned for size or budget.
    pub lattice_skipped: usize,
}

/// One enumerated perturbation and, if it was built to avoid a particular
/// component, that component's index.
struct Candidate<S> {
    field: PlField<S>,
    owner: Option<usize>,
}

/// Hit set of `g`: components where it takes a target value. Touches within
/// the verification tolerance count as hits, except on the component `g` was
/// built to avoid.
fn hit_set<S: Scalar>(tree: &MergeTree<S>, comps: &[Component<S>], cand: &Candidate<S>) -> Vec<usize> {
    let targets = tree.targets();
    (0..comps.len())
        .filter(|&i| {
            let region = &comps[i].region;
            if !zeros_on(&cand.field, targets, region).is_empty() {
                return true;
            }
            cand.owner != Some(i) && min_target_gap(&cand.field, targets, region) <= S::verify_tol()
        })
        .collect()
}

fn disagree(msg: String) -> Error {
    Error::Verification(format!("oracle disagreement: {msg}"))
}

/// Shifts worth trying at radius `r`: every value `a - f(p)` over vertices and
/// component boundary points, the ends `±r`, the midpoints between these, and
/// the witnesses already chosen.
fn shift_candidates<S: Scalar>(tree: &MergeTree<S>, comps: &[Component<S>], fiber: &WellGroupFiber<S>) -> Vec<S> {
    let r = fiber.radius;
    let f = tree.field();
    let mut values: Vec<S> = f.values().to_vec();
    for c in comps {
        for loc in c.region.boundary_points() {
            values.push(f.eval_unchecked(&loc));
        }
    }
    let mut keys = vec![-r, r];
    for &a in tree.targets().values() {
        keys.extend(values.iter().map(|&y| a - y).filter(|t| t.abs() <= r));
    }
    keys.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    keys.dedup();
    let mids: Vec<S> = keys.windows(2).map(|w| (w[0] + w[1]) * S::half()).collect();
    keys.extend(mids);
    for d in &fiber.decisions {
        if let Verdict::Avoidable(w) = &d.verdict {
            if let crate::perturbations::Provenance::Shift { t } = w.provenance() {
                keys.push(*t);
            }
        }
    }
    keys
}

fn check_fiber<S: Scalar>(
    tree: &MergeTree<S>,
    fiber: &WellGroupFiber<S>,
    family: &PerturbationFamily<S>,
    resolution: S,
    options: LatticeOptions,
    summary: &mut CrosscheckSummary,
) -> Result<()> {
    let r = fiber.radius;
    let f = tree.field();
    let base = PlField::from(f);
    let comps = tree.components_at(r);
    let index_of = |id| comps.iter().position(|c| c.id == id).expect("fiber matches tree");

    let mut pool: Vec<Candidate<S>> = Vec::new();
    let expected = match family {
        PerturbationFamily::FullSupNorm => {
            pool.push(Candidate { field: base.clone(), owner: None });
            for d in &fiber.decisions {
                let i = index_of(d.component);
                if let Verdict::Avoidable(w) = &d.verdict {
                    pool.push(Candidate { field: w.field().clone(), owner: Some(i) });
                }
                summary.lattice_runs += 1;
                match lattice_search(tree, &comps[i], resolution, options) {
                    Ok(Some(w)) => {
                        if d.verdict.is_unavoidable() {
                            return Err(disagree(format!(
                                "lattice avoids component {} at r = {r}, which is certified unavoidable",
                                d.component
                            )));
                        }
                        summary.lattice_witnesses += 1;
                        pool.push(Candidate { field: w.field().clone(), owner: Some(i) });
                    }
                    Ok(None) => {}
                    Err(Error::InstanceTooLarge { .. } | Error::BudgetExceeded { .. }) => summary.lattice_skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            fiber.rank
        }
        PerturbationFamily::Shift => {
            for t in shift_candidates(tree, &comps, fiber) {
                pool.push(Candidate { field: base.map(|y| y + t), owner: None });
            }
            fiber.rank
        }
        PerturbationFamily::SampledParametric(list) => {
            for p in list.iter().filter(|p| p.distance <= r) {
                pool.push(Candidate { field: PlField::from(&p.field), owner: None });
            }
            fiber.rank_upper
        }
    };

    let mut subsets: Vec<Vec<usize>> = pool.iter().map(|c| hit_set(tree, &comps, c)).collect();
    subsets.sort();
    subsets.dedup();
    if comps.len() > MAX_COMPONENTS || subsets.len() > MAX_SUBSETS {
        summary.fibers_skipped += 1;
        return Ok(());
    }
    let rank = subspace_oracle(comps.len(), &subsets)?;
    if rank != expected {
        return Err(disagree(format!("rank {expected} at r = {r}, oracle gives {rank} from {} hit sets", subsets.len())));
    }
    // Every certified-unavoidable component must be hit by every enumerated
    // perturbation; the oracle rank alone would not notice a swap.
    for d in fiber.decisions.iter().filter(|d| d.verdict.is_unavoidable()) {
        let i = index_of(d.component);
        if let Some(s) = subsets.iter().find(|s| !s.contains(&i)) {
            return Err(disagree(format!("component {} at r = {r} is certified unavoidable but missed by {s:?}", d.component)));
        }
    }
    summary.fibers_checked += 1;
    Ok(())
}

/// Recomputes every fiber's rank by exact linear algebra over the hit sets of
/// enumerated perturbations: witnesses, lattice avoiders (full sup-norm
/// family), scanned shifts, or the listed samples. Any disagreement with the
/// analytic verdicts is an error.
pub fn oracle_crosscheck<S: Scalar>(
    tree: &MergeTree<S>,
    diagram: &WellDiagram<S>,
    family: &PerturbationFamily<S>,
    resolution: S,
    options: LatticeOptions,
) -> Result<CrosscheckSummary> {
    let mut summary = CrosscheckSummary::default();
    for fiber in &diagram.fibers {
        check_fiber(tree, fiber, family, resolution, options, &mut summary)?;
    }
    Ok(summary)
}
