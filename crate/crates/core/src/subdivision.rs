//! Iterated barycentric subdivision with exact flag bookkeeping.
//!
//! A `SubdivisionTower` stores a base complex as level 0 and each barycentric
//! subdivision as a further level. Every vertex of level j carries a *label*:
//! the simplex of level j-1 it is the barycentre of. Simplices of level j are
//! exactly the flags (strict chains) of level j-1 simplices, so carriers, dual
//! cells, and point location are all exact combinatorial or chart-affine
//! computations — nothing is approximated.

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::metric::BaryPoint;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Default cap on the projected simplex count of a single level.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

struct TowerLevel {
    complex: Arc<SimplicialComplex>,
    /// Vertex of this level -> simplex of the previous level it is the
    /// barycentre of. Original vertices are barycentres of their 0-simplex.
    /// Empty at level 0.
    labels: BTreeMap<u32, Simplex>,
    /// Reverse lookup: simplex of the previous level -> its barycentre vertex.
    barycentre_ids: BTreeMap<Simplex, u32>,
    /// Vertex of this level -> its position over the base complex.
    base_pos: BTreeMap<u32, BaryPoint>,
}

/// A base complex together with any number of barycentric subdivisions.
pub struct SubdivisionTower {
    levels: Vec<TowerLevel>,
    budget: u64,
    mode: ExecMode,
}

impl SubdivisionTower {
    /// A tower containing only the base complex (level 0).
    pub fn new(base: Arc<SimplicialComplex>) -> Self {
        let base_pos = base
            .vertex_ids()
            .into_iter()
            .map(|v| (v, BaryPoint::vertex(v)))
            .collect();
        SubdivisionTower {
            levels: vec![TowerLevel {
                complex: base,
                labels: BTreeMap::new(),
                barycentre_ids: BTreeMap::new(),
                base_pos,
            }],
            budget: DEFAULT_BUDGET,
            mode: ExecMode::default(),
        }
    }

    /// Replace the per-level simplex budget.
    pub fn set_budget(&mut self, budget: u64) {
        self.budget = budget;
    }

    /// Choose sequential or parallel construction (results are identical).
    pub fn set_mode(&mut self, mode: ExecMode) {
        self.mode = mode;
    }

    /// The execution mode used for construction and measurements.
    pub fn mode(&self) -> ExecMode {
        self.mode
    }

    /// Number of subdivisions performed (level 0 = none).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// The base complex.
    pub fn base(&self) -> &Arc<SimplicialComplex> {
        &self.levels[0].complex
    }

    /// The complex at a level.
    pub fn complex(&self, level: usize) -> Result<&Arc<SimplicialComplex>> {
        self.level(level).map(|l| &l.complex)
    }

    fn level(&self, level: usize) -> Result<&TowerLevel> {
        self.levels.get(level).ok_or(Error::LevelOutOfRange {
            level,
            depth: self.depth(),
        })
    }

    /// The previous-level simplex a vertex is the barycentre of.
    pub fn label(&self, level: usize, vertex: u32) -> Result<&Simplex> {
        if level == 0 {
            return Err(Error::LevelOutOfRange { level: 0, depth: self.depth() });
        }
        self.level(level)?
            .labels
            .get(&vertex)
            .ok_or_else(|| Error::SimplexNotFound(format!("vertex {vertex} at level {level}")))
    }

    /// The barycentre vertex (at `level`) of a previous-level simplex.
    pub fn barycentre_id(&self, level: usize, sigma: &Simplex) -> Result<u32> {
        if level == 0 {
            return Err(Error::LevelOutOfRange { level: 0, depth: self.depth() });
        }
        self.level(level)?
            .barycentre_ids
            .get(sigma)
            .copied()
            .ok_or_else(|| Error::SimplexNotFound(sigma.to_string()))
    }

    /// Position of a level vertex over the base complex.
    pub fn base_pos(&self, level: usize, vertex: u32) -> Result<&BaryPoint> {
        self.level(level)?
            .base_pos
            .get(&vertex)
            .ok_or_else(|| Error::SimplexNotFound(format!("vertex {vertex} at level {level}")))
    }

    /// Subdivide until the tower has at least `depth` levels beyond the base.
    pub fn ensure_depth(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            self.extend_one()?;
        }
        Ok(())
    }

    /// Projected total simplex count of the next level.
    pub fn projected_next_count(&self) -> u128 {
        let prev = &self.levels[self.levels.len() - 1].complex;
        let totals = chains_per_top_dim(prev.dim());
        let mut sum: u128 = 0;
        for d in 0..=prev.dim() {
            sum = sum.saturating_add(
                (prev.simplices_of_dim(d).len() as u128).saturating_mul(totals[d]),
            );
        }
        sum
    }

    fn extend_one(&mut self) -> Result<()> {
        let projected = self.projected_next_count();
        if projected > self.budget as u128 {
            return Err(Error::BudgetExceeded {
                projected: projected.min(u64::MAX as u128) as u64,
                budget: self.budget,
            });
        }
        let prev_level = &self.levels[self.levels.len() - 1];
        let prev = prev_level.complex.clone();

        // Deterministic barycentre ids: original vertices keep their id, then
        // fresh ids follow the (dimension, lexicographic) order of simplices.
        let mut barycentre_ids: BTreeMap<Simplex, u32> = BTreeMap::new();
        let mut labels: BTreeMap<u32, Simplex> = BTreeMap::new();
        let mut next_id = prev.max_vertex_id() + 1;
        for s in prev.simplices() {
            let id = if s.dim() == 0 {
                s.vertices()[0]
            } else {
                let id = next_id;
                next_id += 1;
                id
            };
            barycentre_ids.insert(s.clone(), id);
            labels.insert(id, s.clone());
        }

        // Every simplex of the new level is a strict chain of previous-level
        // simplices; each chain is generated exactly once, keyed by its top
        // element, so no deduplication is needed. Barycentre ids increase
        // strictly along a chain, so chains are already sorted vertex lists.
        let mut chains_at: BTreeMap<&Simplex, Vec<Simplex>> = BTreeMap::new();
        for d in 0..=prev.dim() {
            let layer = prev.simplices_of_dim(d);
            let results: Vec<Vec<Simplex>> = exec::map_collect(self.mode, layer, |s| {
                let top_id = barycentre_ids[s];
                let mut out = vec![Simplex::vertex(top_id)];
                for face in s.proper_faces() {
                    for chain in &chains_at[&face] {
                        let mut v = chain.vertices().to_vec();
                        v.push(top_id);
                        out.push(Simplex::from_sorted(&v));
                    }
                }
                out
            });
            for (s, chains) in layer.iter().zip(results) {
                chains_at.insert(s, chains);
            }
        }
        let complex = Arc::new(SimplicialComplex::from_closed_simplices(
            chains_at.into_values().flatten().collect(),
        ));

        // Base positions: barycentre of sigma sits at the average of the base
        // positions of sigma's vertices.
        let mut base_pos: BTreeMap<u32, BaryPoint> = BTreeMap::new();
        for (s, &id) in &barycentre_ids {
            if s.dim() == 0 {
                base_pos.insert(id, prev_level.base_pos[&s.vertices()[0]].clone());
            } else {
                let pts: Vec<&BaryPoint> =
                    s.vertices().iter().map(|v| &prev_level.base_pos[v]).collect();
                base_pos.insert(id, BaryPoint::average(&pts));
            }
        }

        self.levels.push(TowerLevel {
            complex,
            labels,
            barycentre_ids,
            base_pos,
        });
        Ok(())
    }

    /// The previous-level simplex whose interior contains the interior of `s`:
    /// the largest label among the vertices of `s` (labels of a flag form a
    /// chain, so the maximum is its top).
    pub fn carrier_one_level_down(&self, level: usize, s: &Simplex) -> Result<Simplex> {
        if level == 0 {
            return Err(Error::LevelOutOfRange { level: 0, depth: self.depth() });
        }
        let lv = self.level(level)?;
        let mut best: Option<&Simplex> = None;
        for v in s.vertices() {
            let label = lv
                .labels
                .get(v)
                .ok_or_else(|| Error::SimplexNotFound(format!("vertex {v} at level {level}")))?;
            if best.map_or(true, |b| label.dim() > b.dim()) {
                best = Some(label);
            }
        }
        Ok(best.expect("simplex has at least one vertex").clone())
    }

    /// Carrier of `s` (a simplex of `level`) down at `target` <= `level`.
    pub fn carrier(&self, level: usize, s: &Simplex, target: usize) -> Result<Simplex> {
        if target > level {
            return Err(Error::LevelOutOfRange {
                level: target,
                depth: level,
            });
        }
        let mut cur = s.clone();
        for l in (target + 1..=level).rev() {
            cur = self.carrier_one_level_down(l, &cur)?;
        }
        Ok(cur)
    }

    /// Express a point given over `level` in the coordinates of `level + 1`.
    ///
    /// Sorting the weights in decreasing order (ties broken by smaller vertex
    /// id) makes the prefix simplices a flag; the new weight on the barycentre
    /// of the t-th prefix is (t+1) times the weight drop at position t. Exact
    /// zeros are dropped so the result is in canonical minimal-carrier form.
    pub fn locate_up(&self, level: usize, point: &BaryPoint) -> Result<BaryPoint> {
        let next = level + 1;
        self.level(next)?;
        let mut pairs: Vec<(f64, u32)> = point
            .coords()
            .iter()
            .zip(point.support())
            .map(|(&c, &v)| (c, v))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut support = Vec::with_capacity(pairs.len());
        let mut coords = Vec::with_capacity(pairs.len());
        let mut prefix: Vec<u32> = Vec::with_capacity(pairs.len());
        for (t, &(c, v)) in pairs.iter().enumerate() {
            prefix.push(v);
            let weight = if t + 1 < pairs.len() {
                (t as f64 + 1.0) * (c - pairs[t + 1].0)
            } else {
                (t as f64 + 1.0) * c
            };
            if weight != 0.0 {
                let sigma = Simplex::new(prefix.clone())?;
                support.push(self.barycentre_id(next, &sigma)?);
                coords.push(weight);
            }
        }
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        BaryPoint::new(support, coords)
    }

    /// Express a base point in the coordinates of `level`.
    pub fn locate(&self, point: &BaryPoint, level: usize) -> Result<BaryPoint> {
        self.level(level)?;
        self.levels[0].complex.require(&point.carrier())?;
        let mut cur = point.clone();
        for l in 0..level {
            cur = self.locate_up(l, &cur)?;
        }
        Ok(cur)
    }

    /// Express a level point in base coordinates (affine image through the
    /// level's vertex positions).
    pub fn realize(&self, level: usize, point: &BaryPoint) -> Result<BaryPoint> {
        let lv = self.level(level)?;
        let terms: Result<Vec<(f64, &BaryPoint)>> = point
            .coords()
            .iter()
            .zip(point.support())
            .map(|(&c, v)| {
                lv.base_pos
                    .get(v)
                    .map(|p| (c, p))
                    .ok_or_else(|| Error::SimplexNotFound(format!("vertex {v} at level {level}")))
            })
            .collect();
        Ok(BaryPoint::combine(&terms?))
    }

    /// The dual cell of `sigma` (a simplex of `level - 1`) inside `level`:
    /// all flags every element of which contains `sigma`. Face-closed.
    pub fn dual_cell(&self, level: usize, sigma: &Simplex) -> Result<Vec<Simplex>> {
        if level == 0 {
            return Err(Error::LevelOutOfRange { level: 0, depth: self.depth() });
        }
        let prev = self.level(level - 1)?;
        prev.complex.require(sigma)?;
        let lv = self.level(level)?;
        let mut cell = Vec::new();
        for s in lv.complex.simplices() {
            let ok = s
                .vertices()
                .iter()
                .all(|v| sigma.is_face_of(&lv.labels[v]));
            if ok {
                cell.push(s.clone());
            }
        }
        Ok(cell)
    }
}

/// Total number of strict chains ending at a d-simplex, for d = 0..=dim.
fn chains_per_top_dim(dim: usize) -> Vec<u128> {
    let mut binom = vec![vec![0u128; dim + 2]; dim + 2];
    for n in 0..dim + 2 {
        binom[n][0] = 1;
        for k in 1..=n {
            binom[n][k] = binom[n - 1][k - 1] + binom[n - 1].get(k).copied().unwrap_or(0);
        }
    }
    let mut t = vec![0u128; dim + 1];
    for d in 0..=dim {
        let mut sum: u128 = 1;
        for e in 0..d {
            sum = sum.saturating_add(binom[d + 1][e + 1].saturating_mul(t[e]));
        }
        t[d] = sum;
    }
    t
}

/// Subdivide a simplicial map: the barycentre of `sigma` maps to the
/// barycentre of the image simplex `f(sigma)` (repeated images collapse).
///
/// `f` must map `dom`'s complex at `level - 1` to `cod`'s complex at
/// `level - 1`; the result maps level `level` to level `level`.
pub fn subdivide_map(
    f: &SimplicialMap,
    dom: &SubdivisionTower,
    cod: &SubdivisionTower,
    level: usize,
) -> Result<SimplicialMap> {
    if level == 0 {
        return Err(Error::LevelOutOfRange { level: 0, depth: dom.depth() });
    }
    if f.domain().as_ref() != dom.complex(level - 1)?.as_ref() {
        return Err(Error::DomainMismatch(format!(
            "map domain is not the level {} complex of the domain tower",
            level - 1
        )));
    }
    if f.codomain().as_ref() != cod.complex(level - 1)?.as_ref() {
        return Err(Error::DomainMismatch(format!(
            "map codomain is not the level {} complex of the codomain tower",
            level - 1
        )));
    }
    let mut images = BTreeMap::new();
    for v in dom.complex(level)?.vertex_ids() {
        let sigma = dom.label(level, v)?;
        let image_simplex = f.apply(sigma);
        images.insert(v, cod.barycentre_id(level, &image_simplex)?);
    }
    SimplicialMap::new(
        dom.complex(level)?.clone(),
        cod.complex(level)?.clone(),
        images,
    )
}

/// A level of a subdivision tower viewed as a space in its own right, with
/// its geometry always measured through base coordinates.
#[derive(Clone)]
pub struct Space {
    tower: Arc<SubdivisionTower>,
    level: usize,
}

impl Space {
    pub fn new(tower: Arc<SubdivisionTower>, level: usize) -> Result<Self> {
        if level > tower.depth() {
            return Err(Error::LevelOutOfRange {
                level,
                depth: tower.depth(),
            });
        }
        Ok(Space { tower, level })
    }

    /// Level 0 of a plain complex: the space is the complex itself.
    pub fn base_space(complex: Arc<SimplicialComplex>) -> Self {
        Space {
            tower: Arc::new(SubdivisionTower::new(complex)),
            level: 0,
        }
    }

    pub fn tower(&self) -> &Arc<SubdivisionTower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// The complex at this space's level.
    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        self.tower.complex(self.level).expect("level checked at construction")
    }

    /// The base complex whose charts measure this space.
    pub fn base(&self) -> &Arc<SimplicialComplex> {
        self.tower.base()
    }

    /// Base-chart position of a vertex of this space.
    pub fn vertex_pos(&self, v: u32) -> Result<&BaryPoint> {
        self.tower.base_pos(self.level, v)
    }

    /// Carrier of a simplex of this space in the base complex.
    pub fn carrier_in_base(&self, s: &Simplex) -> Result<Simplex> {
        self.tower.carrier(self.level, s, 0)
    }

    /// Base coordinates of a point of this space.
    pub fn realize(&self, p: &BaryPoint) -> Result<BaryPoint> {
        self.tower.realize(self.level, p)
    }

    /// This space's coordinates of a base point.
    pub fn locate(&self, p: &BaryPoint) -> Result<BaryPoint> {
        self.tower.locate(p, self.level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn tower_on(maximal: &[&[u32]], depth: usize) -> SubdivisionTower {
        let gens: Vec<Simplex> = maximal.iter().map(|v| simplex(v)).collect();
        let base = Arc::new(SimplicialComplex::from_maximal(&gens).unwrap());
        let mut t = SubdivisionTower::new(base);
        t.ensure_depth(depth).unwrap();
        t
    }

    #[test]
    fn subdivided_triangle_counts_and_ids() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let c = t.complex(1).unwrap();
        assert_eq!(c.simplices_of_dim(0).len(), 7);
        assert_eq!(c.simplices_of_dim(1).len(), 12);
        assert_eq!(c.simplices_of_dim(2).len(), 6);
        // Fresh ids in (dimension, lexicographic) order of the subdivided
        // simplices: edges (0,1), (0,2), (1,2), then the triangle.
        assert_eq!(t.barycentre_id(1, &simplex(&[0, 1])).unwrap(), 3);
        assert_eq!(t.barycentre_id(1, &simplex(&[0, 2])).unwrap(), 4);
        assert_eq!(t.barycentre_id(1, &simplex(&[1, 2])).unwrap(), 5);
        assert_eq!(t.barycentre_id(1, &simplex(&[0, 1, 2])).unwrap(), 6);
        assert_eq!(t.barycentre_id(1, &simplex(&[0])).unwrap(), 0);
    }

    #[test]
    fn twice_subdivided_segment_counts() {
        let t = tower_on(&[&[0, 1]], 2);
        let c = t.complex(2).unwrap();
        assert_eq!(c.simplices_of_dim(0).len(), 5);
        assert_eq!(c.simplices_of_dim(1).len(), 4);
    }

    #[test]
    fn subdivided_tetrahedron_f_vector() {
        let t = tower_on(&[&[0, 1, 2, 3]], 1);
        let c = t.complex(1).unwrap();
        assert_eq!(c.simplices_of_dim(0).len(), 15);
        assert_eq!(c.simplices_of_dim(1).len(), 50);
        assert_eq!(c.simplices_of_dim(2).len(), 60);
        assert_eq!(c.simplices_of_dim(3).len(), 24);
        assert_eq!(c.simplex_count(), 149);
    }

    #[test]
    fn iterated_counts() {
        let t = tower_on(&[&[0, 1]], 3);
        let c = t.complex(3).unwrap();
        assert_eq!(c.simplices_of_dim(0).len(), 9);
        assert_eq!(c.simplices_of_dim(1).len(), 8);

        let t2 = tower_on(&[&[0, 1, 2]], 2);
        assert_eq!(t2.complex(2).unwrap().simplices_of_dim(2).len(), 36);
    }

    #[test]
    fn projected_count_matches_actual() {
        let mut t = tower_on(&[&[0, 1, 2, 3]], 0);
        assert_eq!(t.projected_next_count(), 149);
        t.ensure_depth(1).unwrap();
        assert_eq!(t.projected_next_count(), 2745);
        t.ensure_depth(2).unwrap();
        assert_eq!(t.complex(2).unwrap().simplex_count(), 2745);
    }

    #[test]
    fn budget_is_enforced() {
        let base = Arc::new(SimplicialComplex::standard(3));
        let mut t = SubdivisionTower::new(base);
        t.set_budget(100);
        let err = t.ensure_depth(1).unwrap_err();
        match err {
            Error::BudgetExceeded { projected, budget } => {
                assert_eq!(projected, 149);
                assert_eq!(budget, 100);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn carriers_follow_largest_label() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        // Vertex 6 is the barycentre of the whole triangle.
        assert_eq!(
            t.carrier(1, &simplex(&[6]), 0).unwrap(),
            simplex(&[0, 1, 2])
        );
        // Edge {vertex 0, barycentre of (0,1)} is carried by (0,1).
        assert_eq!(t.carrier(1, &simplex(&[0, 3]), 0).unwrap(), simplex(&[0, 1]));
        // Flag (0,1) < (0,1,2).
        assert_eq!(
            t.carrier(1, &simplex(&[3, 6]), 0).unwrap(),
            simplex(&[0, 1, 2])
        );
        // Every top simplex of the subdivision is carried by the top simplex.
        for s in t.complex(1).unwrap().simplices_of_dim(2) {
            assert_eq!(t.carrier(1, s, 0).unwrap(), simplex(&[0, 1, 2]));
        }
    }

    #[test]
    fn carrier_is_monotone() {
        let t = tower_on(&[&[0, 1, 2]], 2);
        let c = t.complex(2).unwrap();
        for s in c.simplices() {
            let car = t.carrier(2, s, 0).unwrap();
            for f in s.proper_faces() {
                assert!(t.carrier(2, &f, 0).unwrap().is_face_of(&car));
            }
        }
    }

    #[test]
    fn dual_cell_of_segment_endpoint() {
        let t = tower_on(&[&[0, 1]], 1);
        let cell = t.dual_cell(1, &simplex(&[0])).unwrap();
        assert_eq!(cell, vec![simplex(&[0]), simplex(&[2]), simplex(&[0, 2])]);
    }

    #[test]
    fn dual_cell_of_interior_path_vertex() {
        let t = tower_on(&[&[0, 1], &[1, 2]], 1);
        // Barycentre ids: (0,1) -> 3, (1,2) -> 4.
        let cell = t.dual_cell(1, &simplex(&[1])).unwrap();
        assert_eq!(
            cell,
            vec![
                simplex(&[1]),
                simplex(&[3]),
                simplex(&[4]),
                simplex(&[1, 3]),
                simplex(&[1, 4]),
            ]
        );
    }

    #[test]
    fn dual_cell_of_top_simplex_is_its_barycentre() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let cell = t.dual_cell(1, &simplex(&[0, 1, 2])).unwrap();
        assert_eq!(cell, vec![simplex(&[6])]);
    }

    #[test]
    fn only_dual_cell_flag_carried_by_sigma_is_the_barycentre() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let sigma = simplex(&[0, 1]);
        let cell = t.dual_cell(1, &sigma).unwrap();
        let carried: Vec<&Simplex> = cell
            .iter()
            .filter(|s| t.carrier(1, s, 0).unwrap() == sigma)
            .collect();
        assert_eq!(carried, vec![&simplex(&[3])]);
    }

    #[test]
    fn locate_hand_worked_point() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let p = BaryPoint::new(vec![0, 1, 2], vec![0.5, 0.3, 0.2]).unwrap();
        let located = t.locate(&p, 1).unwrap();
        assert_eq!(located.support(), &[0, 3, 6]);
        let expect = [0.2, 0.2, 0.6];
        for (c, e) in located.coords().iter().zip(expect) {
            assert!((c - e).abs() < 1e-12);
        }
    }

    #[test]
    fn locate_barycentre_and_midpoint() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let bary = BaryPoint::new(vec![0, 1, 2], vec![1.0 / 3.0; 3]).unwrap();
        let located = t.locate(&bary, 1).unwrap();
        assert_eq!(located.support(), &[6]);
        let mid = BaryPoint::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
        let located = t.locate(&mid, 1).unwrap();
        assert_eq!(located.support(), &[3]);
    }

    #[test]
    fn locate_realize_roundtrip() {
        let t = tower_on(&[&[0, 1, 2]], 2);
        let p = BaryPoint::new(vec![0, 1, 2], vec![0.61, 0.13, 0.26]).unwrap();
        let located = t.locate(&p, 2).unwrap();
        let back = t.realize(2, &located).unwrap();
        assert_eq!(back.support(), p.support());
        for (a, b) in back.coords().iter().zip(p.coords()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn base_positions_of_barycentres() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let p = t.base_pos(1, 6).unwrap();
        assert_eq!(p.support(), &[0, 1, 2]);
        for c in p.coords() {
            assert!((c - 1.0 / 3.0).abs() < 1e-15);
        }
        let q = t.base_pos(1, 3).unwrap();
        assert_eq!(q.support(), &[0, 1]);
        assert_eq!(q.coords(), &[0.5, 0.5]);
    }

    #[test]
    fn subdivided_collapse_map() {
        let tx = tower_on(&[&[0, 1, 2]], 1);
        let ty = tower_on(&[&[0, 1]], 1);
        let f = SimplicialMap::new(
            tx.base().clone(),
            ty.base().clone(),
            BTreeMap::from([(0, 0), (1, 0), (2, 1)]),
        )
        .unwrap();
        let sd_f = subdivide_map(&f, &tx, &ty, 1).unwrap();
        let expect = BTreeMap::from([
            (0, 0),
            (1, 0),
            (2, 1),
            (3, 0), // barycentre of (0,1) -> barycentre of the collapsed image (0)
            (4, 2), // barycentre of (0,2) -> barycentre of (0,1)
            (5, 2),
            (6, 2),
        ]);
        assert_eq!(sd_f.vertex_images(), &expect);
    }

    #[test]
    fn subdivided_identity_is_identity() {
        let t = tower_on(&[&[0, 1, 2]], 1);
        let id = SimplicialMap::identity(t.base().clone());
        let sd = subdivide_map(&id, &t, &t, 1).unwrap();
        assert!(sd.is_identity_assignment());
    }

    #[test]
    fn subdivide_map_commutes_with_carriers() {
        let tx = tower_on(&[&[0, 1, 2]], 1);
        let ty = tower_on(&[&[0, 1]], 1);
        let f = SimplicialMap::new(
            tx.base().clone(),
            ty.base().clone(),
            BTreeMap::from([(0, 0), (1, 0), (2, 1)]),
        )
        .unwrap();
        let sd_f = subdivide_map(&f, &tx, &ty, 1).unwrap();
        for s in tx.complex(1).unwrap().simplices() {
            let lhs = ty.carrier(1, &sd_f.apply(s), 0).unwrap();
            let rhs = f.apply(&tx.carrier(1, s, 0).unwrap());
            assert_eq!(lhs, rhs, "carrier mismatch at {s}");
        }
    }

    #[test]
    fn parallel_and_sequential_towers_agree() {
        let base = Arc::new(SimplicialComplex::standard(2));
        let mut seq = SubdivisionTower::new(base.clone());
        seq.set_mode(ExecMode::Sequential);
        seq.ensure_depth(2).unwrap();
        let mut par = SubdivisionTower::new(base);
        par.set_mode(ExecMode::Parallel);
        par.ensure_depth(2).unwrap();
        for level in 0..=2 {
            assert_eq!(
                seq.complex(level).unwrap().as_ref(),
                par.complex(level).unwrap().as_ref()
            );
        }
        for v in seq.complex(2).unwrap().vertex_ids() {
            assert_eq!(
                seq.base_pos(2, v).unwrap(),
                par.base_pos(2, v).unwrap()
            );
        }
    }

    #[test]
    fn space_views() {
        let base = Arc::new(SimplicialComplex::standard(2));
        let mut tower = SubdivisionTower::new(base);
        tower.ensure_depth(1).unwrap();
        let space = Space::new(Arc::new(tower), 1).unwrap();
        assert_eq!(space.complex().simplices_of_dim(2).len(), 6);
        assert_eq!(
            space.carrier_in_base(&simplex(&[3, 6])).unwrap(),
            simplex(&[0, 1, 2])
        );
        let p = space.vertex_pos(6).unwrap();
        assert_eq!(p.support(), &[0, 1, 2]);
    }
}
