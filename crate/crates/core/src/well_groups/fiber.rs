use crate::domain::VertexId;
use crate::error::Result;
use crate::homology::MergeTree;
use crate::perturbations::{avoidable, AvoidabilityDecision, PerturbationFamily, Verdict};
use crate::scalar::Scalar;

/// Well group at one radius, in the basis of sublevel components: it is
/// spanned by the components no admissible perturbation avoids.
#[derive(Debug, Clone, PartialEq)]
pub struct WellGroupFiber<S> {
    pub radius: S,
    /// One decision per component at `radius`, sorted by component id.
    pub decisions: Vec<AvoidabilityDecision<S>>,
    /// Number of certified unavoidable components.
    pub rank: usize,
    /// `rank` plus undecided components.
    pub rank_upper: usize,
    /// Whether the component map from the previous evaluated radius is
    /// injective; `None` for the first fiber.
    pub injective_from_previous: Option<bool>,
}

impl<S: Scalar> WellGroupFiber<S> {
    pub fn component_ids(&self) -> Vec<VertexId> {
        self.decisions.iter().map(|d| d.component).collect()
    }

    pub fn unavoidable(&self) -> Vec<VertexId> {
        self.decisions.iter().filter(|d| d.verdict.is_unavoidable()).map(|d| d.component).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.rank == self.rank_upper
    }

    pub fn verdict(&self, id: VertexId) -> Option<&Verdict<S>> {
        self.decisions.iter().find(|d| d.component == id).map(|d| &d.verdict)
    }
}

/// Rank of the well group at `r`: the number of unavoidable components.
pub fn well_group_rank<S: Scalar>(
    tree: &MergeTree<S>,
    r: S,
    family: &PerturbationFamily<S>,
) -> Result<WellGroupFiber<S>> {
    if r < S::zero() || r.is_nan() {
        return Err(crate::Error::NegativeRadius(r.to_f64().unwrap_or(f64::NAN)));
    }
    let decisions = tree
        .components_at(r)
        .iter()
        .map(|c| avoidable(tree, c, family))
        .collect::<Result<Vec<_>>>()?;
    let rank = decisions.iter().filter(|d| d.verdict.is_unavoidable()).count();
    let unknown = decisions.iter().filter(|d| matches!(d.verdict, Verdict::Unknown)).count();
    Ok(WellGroupFiber { radius: r, decisions, rank, rank_upper: rank + unknown, injective_from_previous: None })
}
