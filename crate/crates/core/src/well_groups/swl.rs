use std::collections::BTreeMap;

use crate::domain::VertexId;
use crate::error::{Error, Result};
use crate::homology::MergeTree;
use crate::perturbations::Verdict;
use crate::scalar::Scalar;
use crate::well_groups::{WellDiagram, WellGroupFiber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMode {
    /// Neighbouring evaluated radii only.
    Consecutive,
    /// Every pair `r < s` of evaluated radii.
    #[default]
    All,
}

/// An unavoidable component at `s` that contains no unavoidable component
/// from `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub r: S,
    pub s: S,
    pub component: VertexId,
    /// Components at `r` mapping into `component`, with their verdicts.
    pub preimages: Vec<(VertexId, &'static str)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInjectivity<S> {
    pub r: S,
    pub s: S,
    pub injective: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwlReport<S> {
    pub mode: PairMode,
    pub pairs_checked: usize,
    pub violations: Vec<Violation<S>>,
    /// Pairs where unknown verdicts leave the outcome open.
    pub undecided: usize,
    pub injectivity: Vec<PairInjectivity<S>>,
    /// Components of the zero set of the well field.
    pub component_count_at_0: usize,
    /// The zero set has finitely many components; always true on a finite complex.
    pub admissible: bool,
    /// Every sublevel set has finitely many components; always true on a finite complex.
    pub tame: bool,
}

impl<S: Scalar> SwlReport<S> {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn labels<S: Scalar>(tree: &MergeTree<S>, fiber: &WellGroupFiber<S>) -> Result<Vec<Option<VertexId>>> {
    let labels = tree.labels_at(fiber.radius);
    let mut ids: Vec<VertexId> = labels.iter().flatten().copied().collect();
    ids.sort();
    ids.dedup();
    if ids != fiber.component_ids() {
        return Err(Error::IncompatibleFibers(format!("components at r = {} differ from the merge tree", fiber.radius)));
    }
    Ok(labels)
}

/// Checks `U(s) ⊆ image of U(r)` for pairs of evaluated radii. Both groups
/// are spanned by components, so the inclusion holds iff every unavoidable
/// component at `s` receives an unavoidable component from `r`.
pub fn swl_check<S: Scalar>(diagram: &WellDiagram<S>, tree: &MergeTree<S>, mode: PairMode) -> Result<SwlReport<S>> {
    let fibers = &diagram.fibers;
    let all_labels = fibers.iter().map(|f| labels(tree, f)).collect::<Result<Vec<_>>>()?;
    let complex = tree.complex();

    let mut violations = Vec::new();
    let mut injectivity = Vec::new();
    let mut undecided = 0;
    let mut pairs_checked = 0;
    for i in 0..fibers.len() {
        let upper = match mode {
            PairMode::Consecutive => (i + 2).min(fibers.len()),
            PairMode::All => fibers.len(),
        };
        for j in i + 1..upper {
            let (fr, fs) = (&fibers[i], &fibers[j]);
            if fr.radius >= fs.radius {
                return Err(Error::IncompatibleFibers("fibers are not sorted by radius".into()));
            }
            pairs_checked += 1;
            let mut preimages: BTreeMap<VertexId, Vec<(VertexId, &Verdict<S>)>> = BTreeMap::new();
            for d in &fr.decisions {
                let v = complex.index_of(d.component).expect("component ids are vertex ids");
                let image = all_labels[j][v].expect("sublevel sets grow with r");
                preimages.entry(image).or_default().push((d.component, &d.verdict));
            }
            let injective = preimages.values().all(|p| p.len() == 1);
            injectivity.push(PairInjectivity { r: fr.radius, s: fs.radius, injective });

            let mut pair_open = false;
            let mut pair_violations = Vec::new();
            for d in &fs.decisions {
                let pre = preimages.get(&d.component).map(Vec::as_slice).unwrap_or(&[]);
                let covered = pre.iter().any(|(_, v)| v.is_unavoidable());
                if covered {
                    continue;
                }
                match d.verdict {
                    Verdict::Unavoidable(_) if pre.iter().all(|(_, v)| v.is_avoidable()) => {
                        pair_violations.push(Violation {
                            r: fr.radius,
                            s: fs.radius,
                            component: d.component,
                            preimages: pre.iter().map(|(id, v)| (*id, v.name())).collect(),
                        });
                    }
                    Verdict::Avoidable(_) => {}
                    _ => pair_open = true,
                }
            }
            if injective && !pair_violations.is_empty() && fr.is_exact() && fs.is_exact() {
                return Err(Error::Verification(format!(
                    "violation on an injective step ({}, {})",
                    fr.radius, fs.radius
                )));
            }
            undecided += usize::from(pair_open);
            violations.extend(pair_violations);
        }
    }
    Ok(SwlReport {
        mode,
        pairs_checked,
        violations,
        undecided,
        injectivity,
        component_count_at_0: tree.betti0_at(S::zero()),
        admissible: true,
        tame: true,
    })
}

/// Re-derives each violation from the stored fibers and the merge tree.
pub fn verify_violations<S: Scalar>(report: &SwlReport<S>, diagram: &WellDiagram<S>, tree: &MergeTree<S>) -> Result<()> {
    for v in &report.violations {
        let (Some(fr), Some(fs)) = (diagram.fiber_at(v.r), diagram.fiber_at(v.s)) else {
            return Err(Error::Verification(format!("no fibers for pair ({}, {})", v.r, v.s)));
        };
        if !matches!(fs.verdict(v.component), Some(Verdict::Unavoidable(_))) {
            return Err(Error::Verification(format!("component {} is not unavoidable at {}", v.component, v.s)));
        }
        let fm = tree.forward_map(v.r, v.s)?;
        for d in &fr.decisions {
            if fm.image(d.component) == Some(v.component) && !d.verdict.is_avoidable() {
                return Err(Error::Verification(format!(
                    "component {} at {} maps into {} and is not avoidable",
                    d.component, v.r, v.component
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::well_groups::counterexample_instance;

    #[test]
    fn counterexample_violations_only_between_gap_and_plateau() {
        let analysis = counterexample_instance::<f64>().analyze().unwrap();
        let report = &analysis.swl;
        assert!(!report.holds());
        assert!(report.violations.iter().any(|v| v.r == 1.5 && v.s == 2.0));
        for v in &report.violations {
            assert!(v.r > 1.0 && v.r < 2.0, "r = {}", v.r);
            assert!((2.0..=5.0).contains(&v.s), "s = {}", v.s);
        }
        assert_eq!(report.component_count_at_0, 2);
        verify_violations(report, &analysis.diagram, &analysis.tree).unwrap();
    }

    #[test]
    fn consecutive_mode_still_sees_the_drop_into_two() {
        let inst = counterexample_instance::<f64>();
        let analysis = inst.analyze().unwrap();
        let report = swl_check(&analysis.diagram, &analysis.tree, PairMode::Consecutive).unwrap();
        assert!(report.violations.iter().all(|v| v.s == 2.0));
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn early_pair_holds() {
        let analysis = counterexample_instance::<f64>().analyze().unwrap();
        assert!(!analysis.swl.violations.iter().any(|v| v.r == 0.5 && v.s == 1.0));
        let inj = analysis.swl.injectivity.iter().find(|p| p.r == 0.5 && p.s == 1.0).unwrap();
        assert!(inj.injective);
    }
}
