use crate::domain::{PlField, ScalarField, Subdivision};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::well_function::FamilyKind;

/// A user-supplied perturbation with its declared sup distance from `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPerturbation<S> {
    pub field: ScalarField<S>,
    pub distance: S,
}

/// The admissible perturbations and their metric.
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationFamily<S> {
    /// Every continuous map, sup metric.
    FullSupNorm,
    /// Translations `f + t`, metric `|t|`.
    Shift,
    /// A finite list of PL perturbations.
    SampledParametric(Vec<SampledPerturbation<S>>),
}

impl<S: Scalar> PerturbationFamily<S> {
    pub fn kind(&self) -> FamilyKind {
        match self {
            PerturbationFamily::FullSupNorm => FamilyKind::FullSupNorm,
            PerturbationFamily::Shift => FamilyKind::Shift,
            PerturbationFamily::SampledParametric(_) => FamilyKind::SampledParametric,
        }
    }

    /// Checks declared distances of sampled perturbations against `f`.
    pub fn validate(&self, f: &ScalarField<S>) -> Result<()> {
        if let PerturbationFamily::SampledParametric(list) = self {
            let base = PlField::from(f);
            for (index, p) in list.iter().enumerate() {
                let actual = base.sup_distance(&PlField::from(&p.field))?;
                if !(p.distance >= S::zero()) || (actual - p.distance).abs() > S::verify_tol() {
                    return Err(Error::DeclaredDistance {
                        index,
                        declared: p.distance.to_f64().unwrap_or(f64::NAN),
                        actual: actual.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
        Ok(())
    }

    /// Moves sampled perturbations onto a subdivision of their complex.
    pub fn lift(&self, subdivision: &Subdivision<S>) -> Result<Self> {
        Ok(match self {
            PerturbationFamily::SampledParametric(list) => PerturbationFamily::SampledParametric(
                list.iter()
                    .map(|p| {
                        Ok(SampledPerturbation { field: subdivision.lift(&p.field)?, distance: p.distance })
                    })
                    .collect::<Result<_>>()?,
            ),
            other => other.clone(),
        })
    }

    /// Declared distances of sampled perturbations; empty otherwise.
    pub fn sampled_distances(&self) -> Vec<S> {
        match self {
            PerturbationFamily::SampledParametric(list) => list.iter().map(|p| p.distance).collect(),
            _ => Vec::new(),
        }
    }
}

/// How a perturbation was built.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance<S> {
    Identity,
    Shift { t: S },
    /// `min(f + r, max(f, level))` when `above`, `max(f - r, min(f, level))` otherwise.
    Clamp { level: S, radius: S, above: bool },
    Contraction { target: S, radius: S, eps: S },
    Blend { steps: usize },
    Sampled { index: usize },
    Lattice,
    /// Supplied by the caller.
    User,
}

/// A perturbation of `f` with its certified sup distance, computed exactly
/// over the breakpoints of both fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedField<S> {
    field: PlField<S>,
    distance: S,
    provenance: Provenance<S>,
}

impl<S: Scalar> PerturbedField<S> {
    pub fn certify(base: &ScalarField<S>, field: PlField<S>, provenance: Provenance<S>) -> Result<Self> {
        let distance = PlField::from(base).sup_distance(&field)?;
        Ok(Self { field, distance, provenance })
    }

    pub fn identity(base: &ScalarField<S>) -> Self {
        Self { field: PlField::from(base), distance: S::zero(), provenance: Provenance::Identity }
    }

    pub fn shift(base: &ScalarField<S>, t: S) -> Result<Self> {
        Self::certify(base, PlField::from(base).map(|y| y + t), Provenance::Shift { t })
    }

    pub fn field(&self) -> &PlField<S> {
        &self.field
    }

    pub fn distance(&self) -> S {
        self.distance
    }

    pub fn provenance(&self) -> &Provenance<S> {
        &self.provenance
    }
}
