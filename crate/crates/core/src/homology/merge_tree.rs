use std::collections::BTreeMap;
use std::sync::Arc;

use crate::domain::refine::find_unrefined_edge;
use crate::domain::{Complex1D, Location, Region, ScalarField, Segment, TargetSet, VertexId};
use crate::error::{Error, Result};
use crate::homology::step::StepFunction;
use crate::homology::union_find::DisjointSet;
use crate::scalar::Scalar;
use crate::well_function::{crossing_param, WellField};

/// Nearest target on an edge of the refined complex and the sign of
/// `f - target` there. Both are constant on the open edge after refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBranch<S> {
    pub target: usize,
    pub sign: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Birth<S> {
    pub value: S,
    pub component: VertexId,
    pub vertex: usize,
}

/// Two or more components joined at `value`; `surviving` is the smallest id
/// among the joined components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<S> {
    pub value: S,
    pub surviving: VertexId,
    pub absorbed: VertexId,
}

/// Path component of a closed sublevel set with exact extrema of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Component<S> {
    /// Smallest member vertex id.
    pub id: VertexId,
    pub radius: S,
    pub members: Vec<usize>,
    pub region: Region<S>,
    pub f_min: S,
    pub f_max: S,
    pub argmin: Location<S>,
    pub argmax: Location<S>,
    /// `(min, max)` of `f - a` over the component, one entry per target.
    pub offsets: Vec<(S, S)>,
}

/// Map on components induced by the inclusion of sublevel sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardMap<S> {
    pub r: S,
    pub s: S,
    pub map: BTreeMap<VertexId, VertexId>,
    pub injective: bool,
}

impl<S> ForwardMap<S> {
    pub fn image(&self, id: VertexId) -> Option<VertexId> {
        self.map.get(&id).copied()
    }
}

/// 0-dimensional persistence of the sublevel filtration of a well field,
/// together with the data needed to describe each component exactly.
#[derive(Debug, Clone)]
pub struct MergeTree<S> {
    field: ScalarField<S>,
    well: WellField<S>,
    targets: TargetSet<S>,
    branches: Vec<EdgeBranch<S>>,
    order: Vec<usize>,
    births: Vec<Birth<S>>,
    merges: Vec<Merge<S>>,
}

struct Snapshot {
    sets: DisjointSet,
    present: Vec<bool>,
    ids: BTreeMap<usize, VertexId>,
}

impl<S: Scalar> MergeTree<S> {
    /// Kruskal-style sweep over vertices sorted by well value. `f` and `w`
    /// must live on a complex refined for `targets`.
    pub fn new(field: &ScalarField<S>, targets: &TargetSet<S>, well: &WellField<S>) -> Result<Self> {
        if !(Arc::ptr_eq(field.complex(), well.complex()) || **field.complex() == **well.complex()) {
            return Err(Error::ComplexMismatch);
        }
        if let Some((edge, level)) = find_unrefined_edge(field, &targets.levels()) {
            return Err(Error::Unrefined { edge, level: level.to_f64().unwrap_or(f64::NAN) });
        }
        let complex = field.complex();
        let branches = (0..complex.edge_count())
            .map(|e| {
                let (fu, fv) = field.edge_values(e);
                let mid = (fu + fv) * S::half();
                let (target, _) = targets.nearest(mid);
                let diff = mid - targets.get(target);
                let sign = if diff > S::zero() {
                    S::one()
                } else if diff < S::zero() {
                    -S::one()
                } else {
                    S::zero()
                };
                EdgeBranch { target, sign }
            })
            .collect();

        let mut order: Vec<usize> = (0..complex.vertex_count()).collect();
        order.sort_by(|&a, &b| {
            well.value(a)
                .partial_cmp(&well.value(b))
                .expect("finite well values")
                .then(complex.vertex(a).id.cmp(&complex.vertex(b).id))
        });

        let mut sets = DisjointSet::new(complex.vertex_count());
        let mut present = vec![false; complex.vertex_count()];
        let mut ids: BTreeMap<usize, VertexId> = BTreeMap::new();
        let mut births = Vec::new();
        let mut merges = Vec::new();
        for &v in &order {
            let value = well.value(v);
            let vid = complex.vertex(v).id;
            let mut roots: Vec<usize> = complex
                .incident(v)
                .iter()
                .map(|&e| complex.other_end(e, v))
                .filter(|&u| present[u])
                .map(|u| sets.find(u))
                .collect();
            roots.sort_unstable();
            roots.dedup();
            present[v] = true;
            if roots.is_empty() {
                births.push(Birth { value, component: vid, vertex: v });
                ids.insert(v, vid);
                continue;
            }
            let mut joined: Vec<VertexId> = roots.iter().map(|r| ids[r]).collect();
            joined.sort();
            for &absorbed in &joined[1..] {
                merges.push(Merge { value, surviving: joined[0], absorbed });
            }
            let mut root = roots[0];
            for &other in &roots[1..] {
                root = sets.union(root, other).unwrap_or(root);
            }
            root = sets.union(root, v).unwrap_or(root);
            for r in &roots {
                ids.remove(r);
            }
            ids.insert(root, joined[0].min(vid));
        }

        Ok(Self {
            field: field.clone(),
            well: well.clone(),
            targets: targets.clone(),
            branches,
            order,
            births,
            merges,
        })
    }

    pub fn complex(&self) -> &Arc<Complex1D<S>> {
        self.field.complex()
    }

    pub fn field(&self) -> &ScalarField<S> {
        &self.field
    }

    pub fn well(&self) -> &WellField<S> {
        &self.well
    }

    pub fn targets(&self) -> &TargetSet<S> {
        &self.targets
    }

    pub fn branches(&self) -> &[EdgeBranch<S>] {
        &self.branches
    }

    pub fn births(&self) -> &[Birth<S>] {
        &self.births
    }

    pub fn merges(&self) -> &[Merge<S>] {
        &self.merges
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    fn snapshot(&self, r: S) -> Snapshot {
        let complex = self.complex();
        let n = complex.vertex_count();
        let mut sets = DisjointSet::new(n);
        let mut present = vec![false; n];
        for &v in &self.order {
            if self.well.value(v) > r {
                break;
            }
            present[v] = true;
        }
        for e in complex.edges() {
            if present[e.u] && present[e.v] {
                sets.union(e.u, e.v);
            }
        }
        let mut ids: BTreeMap<usize, VertexId> = BTreeMap::new();
        for v in (0..n).filter(|&v| present[v]) {
            let root = sets.find(v);
            let id = complex.vertex(v).id;
            ids.entry(root).and_modify(|x| *x = (*x).min(id)).or_insert(id);
        }
        Snapshot { sets, present, ids }
    }

    /// Number of components of the closed sublevel set at `r`.
    pub fn betti0_at(&self, r: S) -> usize {
        self.births.iter().filter(|b| b.value <= r).count() - self.merges.iter().filter(|m| m.value <= r).count()
    }

    /// Components of `{w <= r}`, sorted by id.
    pub fn components_at(&self, r: S) -> Vec<Component<S>> {
        let complex = self.complex();
        let mut snap = self.snapshot(r);
        let targets = self.targets.values();
        let mut by_root: BTreeMap<usize, Component<S>> = BTreeMap::new();

        for v in (0..complex.vertex_count()).filter(|&v| snap.present[v]) {
            let root = snap.sets.find(v);
            let fv = self.field.value(v);
            let id = snap.ids[&root];
            let c = touch(&mut by_root, root, id, r, Location::Vertex(v), fv, |j| fv - targets[j], targets.len());
            c.members.push(v);
            c.region.vertices.push(v);
        }
        for (e, edge) in complex.edges().iter().enumerate() {
            let (pu, pv) = (snap.present[edge.u], snap.present[edge.v]);
            if pu && pv {
                let root = snap.sets.find(edge.u);
                let c = by_root.get_mut(&root).expect("endpoint component exists");
                c.region.segments.push(Segment::full(e));
            } else if pu != pv {
                let inside = if pu { edge.u } else { edge.v };
                let root = snap.sets.find(inside);
                let t = crossing_param(self.well.value(edge.u), self.well.value(edge.v), r);
                let seg = if pu {
                    Segment { edge: e, t0: S::zero(), t1: t }
                } else {
                    Segment { edge: e, t0: t, t1: S::one() }
                };
                // f - a_b = sign * w on this edge, so the cut value is exact
                let b = self.branches[e];
                let nearest = targets[b.target];
                let fcut = nearest + b.sign * r;
                let offset = |j: usize| {
                    if j == b.target {
                        b.sign * r
                    } else {
                        (nearest - targets[j]) + b.sign * r
                    }
                };
                let loc = complex.normalize(Location::Edge { edge: e, t });
                let id = snap.ids[&root];
                let c = touch(&mut by_root, root, id, r, loc, fcut, offset, targets.len());
                c.region.segments.push(seg);
            }
        }
        let mut out: Vec<Component<S>> = by_root.into_values().collect();
        out.sort_by_key(|c| c.id);
        out
    }

    /// Component id at `s` of every component at `r`.
    pub fn forward_map(&self, r: S, s: S) -> Result<ForwardMap<S>> {
        if r > s {
            return Err(Error::ReversedRadii {
                r: r.to_f64().unwrap_or(f64::NAN),
                s: s.to_f64().unwrap_or(f64::NAN),
            });
        }
        let complex = self.complex();
        let from = self.snapshot(r);
        let mut to = self.snapshot(s);
        let mut map = BTreeMap::new();
        for id in from.ids.values() {
            let v = complex.index_of(*id).expect("component id is a vertex id");
            let root = to.sets.find(v);
            map.insert(*id, to.ids[&root]);
        }
        let mut images: Vec<VertexId> = map.values().copied().collect();
        images.sort();
        let before = images.len();
        images.dedup();
        Ok(ForwardMap { r, s, injective: images.len() == before, map })
    }

    /// Component id of every vertex in `{w <= r}`, `None` outside it.
    pub fn labels_at(&self, r: S) -> Vec<Option<VertexId>> {
        let mut snap = self.snapshot(r);
        (0..self.vertex_count())
            .map(|v| {
                if snap.present[v] {
                    let root = snap.sets.find(v);
                    Some(snap.ids[&root])
                } else {
                    None
                }
            })
            .collect()
    }

    /// Number of components as a function of `r`.
    pub fn betti0_curve(&self) -> StepFunction<S> {
        let mut points: Vec<S> = vec![S::zero()];
        points.extend(self.births.iter().map(|b| b.value));
        points.extend(self.merges.iter().map(|m| m.value));
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        points.dedup();
        let values: Vec<usize> = points.iter().map(|&p| self.betti0_at(p)).collect();
        StepFunction::new(points, values.clone(), values)
    }

    /// Distinct merge and birth values in increasing order.
    pub fn critical_values(&self) -> Vec<S> {
        let mut out: Vec<S> = self.births.iter().map(|b| b.value).chain(self.merges.iter().map(|m| m.value)).collect();
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out.dedup();
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn touch<S: Scalar>(
    by_root: &mut BTreeMap<usize, Component<S>>,
    root: usize,
    id: VertexId,
    r: S,
    loc: Location<S>,
    fval: S,
    offset: impl Fn(usize) -> S,
    target_count: usize,
) -> &mut Component<S> {
    let c = by_root.entry(root).or_insert_with(|| Component {
        id,
        radius: r,
        members: Vec::new(),
        region: Region::default(),
        f_min: fval,
        f_max: fval,
        argmin: loc,
        argmax: loc,
        offsets: (0..target_count).map(|j| (offset(j), offset(j))).collect(),
    });
    if fval < c.f_min {
        c.f_min = fval;
        c.argmin = loc;
    }
    if fval > c.f_max {
        c.f_max = fval;
        c.argmax = loc;
    }
    for (j, o) in c.offsets.iter_mut().enumerate() {
        let x = offset(j);
        o.0 = o.0.min(x);
        o.1 = o.1.max(x);
    }
    c
}
