use std::sync::Arc;

use crate::domain::{refine_for_targets, Complex1D, Refined, ScalarField, TargetSet, VertexId};
use crate::error::Result;
use crate::homology::{MergeTree, StepFunction};
use crate::perturbations::PerturbationFamily;
use crate::scalar::Scalar;
use crate::well_function::{well_field_family, well_field_prime, WellField};
use crate::well_groups::{swl_check, verify_violations, well_diagram, PairMode, RadiiSpec, SwlReport, WellDiagram};

/// A complete problem: field on a complex, targets, perturbation family and
/// the radii to report.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<S> {
    pub field: ScalarField<S>,
    pub targets: TargetSet<S>,
    pub family: PerturbationFamily<S>,
    pub radii: RadiiSpec<S>,
}

/// Everything computed for an instance.
#[derive(Debug, Clone)]
pub struct Analysis<S> {
    pub refined: Refined<S>,
    /// The family moved onto the refined complex.
    pub family: PerturbationFamily<S>,
    pub well: WellField<S>,
    pub tree: MergeTree<S>,
    pub betti0: StepFunction<S>,
    pub diagram: WellDiagram<S>,
    pub swl: SwlReport<S>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(
        field: ScalarField<S>,
        targets: TargetSet<S>,
        family: PerturbationFamily<S>,
        radii: RadiiSpec<S>,
    ) -> Result<Self> {
        family.validate(&field)?;
        Ok(Self { field, targets, family, radii })
    }

    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        self.field.complex()
    }

    pub fn name(&self) -> &str {
        self.complex().name()
    }

    pub fn refine(&self) -> Result<(Refined<S>, PerturbationFamily<S>)> {
        let refined = refine_for_targets(&self.field, &self.targets);
        let family = self.family.lift(&refined.subdivision)?;
        Ok((refined, family))
    }

    /// Sampled families have no well function of their own; they are
    /// filtered by the distance to the targets.
    pub fn well_field(&self, refined: &Refined<S>, family: &PerturbationFamily<S>) -> Result<WellField<S>> {
        match family {
            PerturbationFamily::SampledParametric(_) => Ok(well_field_prime(&refined.field, &self.targets)),
            _ => well_field_family(&refined.field, &self.targets, family),
        }
    }

    pub fn merge_tree(&self) -> Result<MergeTree<S>> {
        let (refined, family) = self.refine()?;
        let well = self.well_field(&refined, &family)?;
        MergeTree::new(&refined.field, &self.targets, &well)
    }

    pub fn analyze(&self) -> Result<Analysis<S>> {
        self.analyze_with(PairMode::default())
    }

    pub fn analyze_with(&self, mode: PairMode) -> Result<Analysis<S>> {
        let (refined, family) = self.refine()?;
        let well = self.well_field(&refined, &family)?;
        let tree = MergeTree::new(&refined.field, &self.targets, &well)?;
        let betti0 = tree.betti0_curve();
        let diagram = well_diagram(&tree, &family, &self.radii)?;
        let swl = swl_check(&diagram, &tree, mode)?;
        verify_violations(&swl, &diagram, &tree)?;
        Ok(Analysis { refined, family, well, tree, betti0, diagram, swl })
    }
}

/// The interval `[-3, 3]` mapped identically into the line with targets
/// `{-2, 2}` and shift perturbations, already refined at `-2`, `0`, `2`.
pub fn counterexample_instance<S: Scalar>() -> Instance<S> {
    let positions: Vec<S> = [-3.0, -2.0, 0.0, 2.0, 3.0].iter().map(|&x| S::lit(x)).collect();
    let vertices = positions.iter().enumerate().map(|(i, &p)| (VertexId(i as i64), p)).collect();
    let edges = (0..4)
        .map(|i| (VertexId(i as i64), VertexId(i as i64 + 1), positions[i + 1] - positions[i]))
        .collect();
    let complex = Arc::new(Complex1D::new("counterexample", vertices, edges).expect("valid built-in complex"));
    let field = ScalarField::new(complex, positions).expect("finite built-in values");
    let targets = TargetSet::new(vec![S::lit(-2.0), S::lit(2.0)]).expect("finite built-in targets");
    Instance { field, targets, family: PerturbationFamily::Shift, radii: RadiiSpec::default() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Location;

    #[test]
    fn counterexample_contents() {
        let inst = counterexample_instance::<f64>();
        assert_eq!(inst.targets.values(), &[-2.0, 2.0]);
        assert_eq!(inst.family, PerturbationFamily::Shift);
        let zero = inst.complex().vertices().iter().position(|v| v.position == 0.0).unwrap();
        assert_eq!(inst.field.eval(&Location::Vertex(zero)).unwrap(), 0.0);
        let (refined, _) = inst.refine().unwrap();
        assert_eq!(refined.subdivision.added_vertices(), 0);
    }

    #[test]
    fn counterexample_betti_curve() {
        let a = counterexample_instance::<f64>().analyze().unwrap();
        let labels: Vec<String> = a.betti0.intervals().iter().map(|i| i.label()).collect();
        assert_eq!(labels, vec!["[0,2):2", "[2,inf):1"]);
    }

    #[test]
    fn counterexample_in_single_precision() {
        let a = counterexample_instance::<f32>().analyze().unwrap();
        let labels: Vec<String> = a.diagram.rank.intervals().iter().map(|i| i.label()).collect();
        assert_eq!(labels, vec!["[0,1]:2", "(1,2):0", "[2,5]:1", "(5,inf):0"]);
    }
}
