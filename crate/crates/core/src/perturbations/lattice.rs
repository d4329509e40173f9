use std::collections::BTreeMap;

use crate::domain::PlField;
use crate::error::{Error, Result};
use crate::homology::{Component, MergeTree};
use crate::perturbations::{min_target_gap, zeros_on, PerturbedField, Provenance};
use crate::scalar::{lerp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeOptions {
    /// Most vertices the search may vary.
    pub max_vertices: usize,
    /// Most partial assignments the search may visit.
    pub budget: u64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self { max_vertices: 10, budget: 10_000_000 }
    }
}

/// Offsets `-r, -r + step, ...` up to and including `r`.
pub fn lattice_offsets<S: Scalar>(r: S, resolution: S) -> Result<Vec<S>> {
    if !(resolution > S::zero()) {
        return Err(Error::NonPositiveResolution(resolution.to_f64().unwrap_or(f64::NAN)));
    }
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let o = -r + S::lit(k as f64) * resolution;
        // absorb rounding just below r
        if o >= r - resolution * S::lit(1e-9) {
            break;
        }
        out.push(o);
        k += 1;
    }
    out.push(r);
    Ok(out)
}

enum Constraint<S> {
    Unary(usize),
    /// Value at parameter `t` along an edge between two variables.
    Binary(usize, usize, S),
}

struct Search<'a, S> {
    domains: Vec<Vec<S>>,
    offsets: Vec<Vec<S>>,
    binary: Vec<(usize, usize, S)>,
    cell: (S, S),
    nodes: &'a mut u64,
    budget: u64,
}

fn inside<S: Scalar>(y: S, cell: (S, S)) -> bool {
    y > cell.0 && y < cell.1
}

impl<S: Scalar> Search<'_, S> {
    fn supported(&self, i: usize, yi: S, j: usize) -> bool {
        self.binary.iter().all(|&(a, b, t)| {
            if a == i && b == j {
                self.domains[j].iter().any(|&yj| inside(lerp(yi, yj, t), self.cell))
            } else if a == j && b == i {
                self.domains[j].iter().any(|&yj| inside(lerp(yj, yi, t), self.cell))
            } else {
                true
            }
        })
    }

    /// Arc consistency over the binary constraints.
    fn ac3(&mut self) {
        let n = self.domains.len();
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let keep: Vec<bool> = self.domains[i].iter().map(|&y| self.supported(i, y, j)).collect();
                    if keep.iter().any(|k| !k) {
                        let mut it = keep.iter();
                        self.domains[i].retain(|_| *it.next().expect("same length"));
                        let mut it = keep.iter();
                        self.offsets[i].retain(|_| *it.next().expect("same length"));
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn consistent(&self, assigned: &[Option<S>]) -> bool {
        self.binary.iter().all(|&(a, b, t)| match (assigned[a], assigned[b]) {
            (Some(ya), Some(yb)) => inside(lerp(ya, yb, t), self.cell),
            _ => true,
        })
    }

    /// Depth-first enumeration in lexicographic order; `visit` sees each
    /// complete assignment (as offsets) and stops the search by returning true.
    fn dfs(
        &mut self,
        depth: usize,
        assigned: &mut Vec<Option<S>>,
        chosen: &mut Vec<S>,
        visit: &mut dyn FnMut(&[S]) -> Result<bool>,
    ) -> Result<bool> {
        if depth == self.domains.len() {
            return visit(chosen);
        }
        for k in 0..self.domains[depth].len() {
            *self.nodes += 1;
            if *self.nodes > self.budget {
                return Err(Error::BudgetExceeded { candidates: *self.nodes as f64, budget: self.budget });
            }
            assigned[depth] = Some(self.domains[depth][k]);
            chosen.push(self.offsets[depth][k]);
            if self.consistent(assigned) && self.dfs(depth + 1, assigned, chosen, visit)? {
                return Ok(true);
            }
            chosen.pop();
            assigned[depth] = None;
        }
        Ok(false)
    }
}

/// Searches vertex offsets on a lattice of step `resolution` in `[-r, r]`,
/// linear on edges, for a perturbation avoiding the targets on `comp`.
/// Every candidate is within `r` of `f`; a returned field is a verified
/// avoider, `None` is evidence only.
///
/// An avoider keeps the component inside one open gap between consecutive
/// targets, so the search runs gap by gap. Only vertices of edges meeting
/// the component are varied.
pub fn lattice_search<S: Scalar>(
    tree: &MergeTree<S>,
    comp: &Component<S>,
    resolution: S,
    options: LatticeOptions,
) -> Result<Option<PerturbedField<S>>> {
    let r = comp.radius;
    let f = tree.field();
    let complex = f.complex();
    let offsets = lattice_offsets(r, resolution)?;

    let mut vars: BTreeMap<usize, usize> = BTreeMap::new();
    let mut constraints = Vec::new();
    for &v in &comp.region.vertices {
        vars.insert(v, 0);
        constraints.push((v, None));
    }
    for s in &comp.region.segments {
        let e = complex.edge(s.edge);
        vars.insert(e.u, 0);
        vars.insert(e.v, 0);
        for t in [s.t0, s.t1] {
            if t == S::zero() {
                constraints.push((e.u, None));
            } else if t == S::one() {
                constraints.push((e.v, None));
            } else {
                constraints.push((e.u, Some((e.v, t))));
            }
        }
    }
    if vars.len() > options.max_vertices {
        return Err(Error::InstanceTooLarge { vertices: vars.len(), limit: options.max_vertices });
    }
    let order: Vec<usize> = vars.keys().copied().collect();
    for (i, v) in order.iter().enumerate() {
        vars.insert(*v, i);
    }
    let constraints: Vec<Constraint<S>> = constraints
        .into_iter()
        .map(|(u, other)| match other {
            None => Constraint::Unary(vars[&u]),
            Some((v, t)) => Constraint::Binary(vars[&u], vars[&v], t),
        })
        .collect();

    let mut bounds = vec![-S::infinity()];
    bounds.extend_from_slice(tree.targets().values());
    bounds.push(S::infinity());

    let mut nodes = 0u64;
    // Avoiders must clear the targets by more than rounding; a lattice value
    // that lands on `a + r - r` would otherwise pass by an ulp.
    let margin = |a: S| if a.is_finite() { S::verify_tol() * (S::one() + a.abs()) } else { S::zero() };
    for cell in bounds.windows(2).map(|w| (w[0] + margin(w[0]), w[1] - margin(w[1]))) {
        let mut domains: Vec<Vec<S>> = Vec::new();
        let mut offs: Vec<Vec<S>> = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            let unary = constraints.iter().any(|c| matches!(c, Constraint::Unary(j) if *j == i));
            let fv = f.value(v);
            let (d, o): (Vec<S>, Vec<S>) =
                offsets.iter().map(|&o| (fv + o, o)).filter(|&(y, _)| !unary || inside(y, cell)).unzip();
            domains.push(d);
            offs.push(o);
        }
        let binary = constraints
            .iter()
            .filter_map(|c| match *c {
                Constraint::Binary(a, b, t) => Some((a, b, t)),
                Constraint::Unary(_) => None,
            })
            .collect();
        let mut search = Search { domains, offsets: offs, binary, cell, nodes: &mut nodes, budget: options.budget };
        search.ac3();
        if search.domains.iter().any(Vec::is_empty) {
            continue;
        }
        let mut found = None;
        let mut visit = |chosen: &[S]| -> Result<bool> {
            let mut values = f.values().to_vec();
            for (i, &v) in order.iter().enumerate() {
                values[v] = values[v] + chosen[i];
            }
            let g = PlField::from_fn(complex.clone(), vec![Vec::new(); complex.edge_count()], |loc| match *loc {
                crate::domain::Location::Vertex(v) => values[v],
                _ => unreachable!("no interior knots requested"),
            });
            if zeros_on(&g, tree.targets(), &comp.region).is_empty()
                && min_target_gap(&g, tree.targets(), &comp.region) > S::verify_tol()
            {
                found = Some(PerturbedField::certify(f, g, Provenance::Lattice)?);
                return Ok(true);
            }
            Ok(false)
        };
        let mut assigned = vec![None; order.len()];
        if search.dfs(0, &mut assigned, &mut Vec::new(), &mut visit)? {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::domain::{refine_for_targets, Complex1D, ScalarField, TargetSet, VertexId};
    use crate::well_function::well_field_prime;

    fn identity_tree(lo: f64, hi: f64, targets: &[f64]) -> MergeTree<f64> {
        let c = Complex1D::new("x", vec![(VertexId(0), lo), (VertexId(1), hi)], vec![(VertexId(0), VertexId(1), hi - lo)])
            .unwrap();
        let f = ScalarField::new(Arc::new(c), vec![lo, hi]).unwrap();
        let a = TargetSet::new(targets.to_vec()).unwrap();
        let refined = refine_for_targets(&f, &a);
        let w = well_field_prime(&refined.field, &a);
        MergeTree::new(&refined.field, &a, &w).unwrap()
    }

    #[test]
    fn offsets_include_both_ends() {
        assert_eq!(lattice_offsets(1.0, 0.5).unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let uneven = lattice_offsets(1.0, 0.8).unwrap();
        assert_eq!(uneven.len(), 4);
        for (got, want) in uneven.iter().zip([-1.0f64, -0.2, 0.6, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(lattice_offsets(0.0, 0.05).unwrap(), vec![0.0]);
        assert!(lattice_offsets(1.0, 0.0).is_err());
    }

    #[test]
    fn straddling_component_has_no_lattice_avoider() {
        let tree = identity_tree(-3.0, 3.0, &[0.0]);
        let comp = &tree.components_at(1.0)[0];
        assert!(lattice_search(&tree, comp, 0.05, LatticeOptions::default()).unwrap().is_none());
    }

    #[test]
    fn one_sided_component_has_lattice_avoider() {
        let tree = identity_tree(0.0, 3.0, &[0.0]);
        let comp = &tree.components_at(1.0)[0];
        let w = lattice_search(&tree, comp, 0.05, LatticeOptions::default()).unwrap().unwrap();
        assert!(w.distance() <= 1.0 + 1e-12);
        assert!(zeros_on(w.field(), tree.targets(), &comp.region).is_empty());
    }

    #[test]
    fn zero_radius_returns_f_only_if_it_avoids() {
        let tree = identity_tree(1.0, 3.0, &[0.0]);
        // the well field is >= 1, so nothing lies below 0
        assert!(tree.components_at(0.0).is_empty());
        let comp = &tree.components_at(1.0)[0];
        let mut at_zero = comp.clone();
        at_zero.radius = 0.0;
        let w = lattice_search(&tree, &at_zero, 0.05, LatticeOptions::default()).unwrap().unwrap();
        assert_eq!(w.distance(), 0.0);
        let tree = identity_tree(0.0, 3.0, &[0.0]);
        let comp = &tree.components_at(0.0)[0];
        assert!(lattice_search(&tree, comp, 0.05, LatticeOptions::default()).unwrap().is_none());
    }

    #[test]
    fn limits_are_enforced() {
        let tree = identity_tree(-3.0, 3.0, &[0.0]);
        let comp = &tree.components_at(1.0)[0];
        let tight = LatticeOptions { max_vertices: 1, budget: 10 };
        assert!(matches!(lattice_search(&tree, comp, 0.05, tight), Err(Error::InstanceTooLarge { .. })));
        let tree = identity_tree(0.0, 3.0, &[0.0]);
        let comp = &tree.components_at(1.0)[0];
        let small_budget = LatticeOptions { max_vertices: 10, budget: 1 };
        assert!(matches!(lattice_search(&tree, comp, 0.05, small_budget), Err(Error::BudgetExceeded { .. })));
    }
}
