use crate::error::{Error, Result};
use crate::homology::{MergeTree, StepFunction};
use crate::perturbations::PerturbationFamily;
use crate::scalar::Scalar;
use crate::well_groups::{well_group_rank, WellGroupFiber};

/// Which radii to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum RadiiSpec<S> {
    /// Critical values of the instance plus any extra radii.
    Auto { extra: Vec<S> },
    /// Exactly these radii (and 0).
    Explicit(Vec<S>),
}

impl<S> Default for RadiiSpec<S> {
    fn default() -> Self {
        RadiiSpec::Auto { extra: Vec::new() }
    }
}

/// Rank of the well group as a function of the radius.
#[derive(Debug, Clone, PartialEq)]
pub struct WellDiagram<S> {
    /// Breakpoints, starting at 0.
    pub grid: Vec<S>,
    /// Fibers at every breakpoint, at the midpoint of every gap and one past
    /// the last breakpoint, sorted by radius.
    pub fibers: Vec<WellGroupFiber<S>>,
    /// Certified rank.
    pub rank: StepFunction<S>,
    /// Upper bound; equal to `rank` unless some verdict is unknown.
    pub rank_upper: StepFunction<S>,
}

impl<S: Scalar> WellDiagram<S> {
    pub fn fiber_at(&self, r: S) -> Option<&WellGroupFiber<S>> {
        self.fibers.iter().find(|f| f.radius == r)
    }

    pub fn is_exact(&self) -> bool {
        self.fibers.iter().all(WellGroupFiber::is_exact)
    }
}

fn sorted_unique<S: Scalar>(mut v: Vec<S>) -> Vec<S> {
    v.retain(|x| x.is_finite() && *x >= S::zero());
    v.push(S::zero());
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    // values equal up to rounding would leave no room for a midpoint
    v.dedup_by(|x, kept| *x - *kept <= S::dedup_tol() * (S::one() + x.abs()));
    v
}

/// Radii where the rank may change: well values at vertices, merge values,
/// distances from vertex values to targets and, for shifts, the radii where
/// two endpoints of the shift hit intervals meet.
///
/// Hit intervals have fixed endpoints `a - f(v)` from vertices and moving
/// endpoints `(a - b) ± r` from sublevel boundaries; the ends `±r` of the
/// allowed shifts move like the latter with `a = b`. A fixed and a moving
/// endpoint meet at `|k - c|`, two moving ones at `|c1 - c2| / 2`.
pub fn critical_grid<S: Scalar>(tree: &MergeTree<S>, family: &PerturbationFamily<S>) -> Vec<S> {
    let f = tree.field();
    let targets = tree.targets().values();
    let mut grid: Vec<S> = tree.well().values().to_vec();
    grid.extend(tree.merges().iter().map(|m| m.value));
    for &y in f.values() {
        grid.extend(targets.iter().map(|&a| (y - a).abs()));
    }
    if matches!(family, PerturbationFamily::Shift) {
        let mut fixed: Vec<S> = Vec::new();
        let mut moving: Vec<S> = Vec::new();
        for &a in targets {
            fixed.extend(f.values().iter().map(|&y| a - y));
            moving.extend(targets.iter().map(|&b| a - b));
        }
        for v in [&mut fixed, &mut moving] {
            v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            v.dedup();
        }
        for &c in &moving {
            grid.extend(fixed.iter().map(|&k| (k - c).abs()));
            grid.extend(moving.iter().map(|&c2| (c - c2).abs() * S::half()));
        }
    }
    sorted_unique(grid)
}

/// Evaluates fibers over the grid and assembles the rank step functions
/// with closed values at breakpoints.
pub fn well_diagram<S: Scalar>(
    tree: &MergeTree<S>,
    family: &PerturbationFamily<S>,
    radii: &RadiiSpec<S>,
) -> Result<WellDiagram<S>> {
    let grid = match radii {
        RadiiSpec::Auto { extra } => {
            if matches!(family, PerturbationFamily::SampledParametric(_)) {
                return Err(Error::NoDefinitionalWellField);
            }
            let mut g = critical_grid(tree, family);
            g.extend_from_slice(extra);
            sorted_unique(g)
        }
        RadiiSpec::Explicit(values) => {
            if let Some(&bad) = values.iter().find(|x| !(**x >= S::zero()) || !x.is_finite()) {
                return Err(Error::NegativeRadius(bad.to_f64().unwrap_or(f64::NAN)));
            }
            sorted_unique(values.clone())
        }
    };

    let mut radii: Vec<S> = Vec::with_capacity(2 * grid.len());
    for (i, &p) in grid.iter().enumerate() {
        radii.push(p);
        radii.push(match grid.get(i + 1) {
            Some(&q) => (p + q) * S::half(),
            None => p + S::one(),
        });
    }
    let mut fibers = radii.iter().map(|&r| well_group_rank(tree, r, family)).collect::<Result<Vec<_>>>()?;
    for i in 1..fibers.len() {
        let fm = tree.forward_map(fibers[i - 1].radius, fibers[i].radius)?;
        fibers[i].injective_from_previous = Some(fm.injective);
    }
    let at = |k: usize, upper: bool| if upper { fibers[k].rank_upper } else { fibers[k].rank };
    let build = |upper: bool| {
        let at_vals = (0..grid.len()).map(|i| at(2 * i, upper)).collect();
        let after = (0..grid.len()).map(|i| at(2 * i + 1, upper)).collect();
        StepFunction::new(grid.clone(), at_vals, after)
    };
    let rank = build(false);
    let rank_upper = build(true);
    Ok(WellDiagram { grid, fibers, rank, rank_upper })
}
