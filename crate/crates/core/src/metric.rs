//! The standard metric: points, exact chart distances, measured sizes, and
//! conservative neighborhood tests.
//!
//! Each n-simplex carries the metric of the standard simplex spanned by unit
//! basis vectors; globally the complex carries the induced path metric, with
//! distance +infinity between connected components. Chord distances inside one
//! closed simplex are treated as exact; distances across simplices are only
//! ever reported as intervals, and every consumer of a neighborhood test gets
//! a three-valued answer (inside / outside / unknown) rather than a guess.

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::geometry;
use crate::sample::{sample_points, SampleSpec};
use crate::subdivision::{Space, SubdivisionTower};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::sync::{Arc, Mutex};

/// A point of a complex in barycentric coordinates over its minimal carrier:
/// the support is sorted, all weights are strictly positive, and they sum
/// to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BaryPoint {
    support: Vec<u32>,
    coords: Vec<f64>,
}

impl BaryPoint {
    /// Validate and canonicalize (sort the support, drop exact zeros,
    /// renormalize). Rejects duplicate vertices, negative weights, and weight
    /// sums farther than 1e-9 from 1.
    pub fn new(support: Vec<u32>, coords: Vec<f64>) -> Result<Self> {
        if support.len() != coords.len() {
            return Err(Error::BadCoordinates(format!(
                "{} vertices with {} weights",
                support.len(),
                coords.len()
            )));
        }
        let mut pairs: Vec<(u32, f64)> = support.into_iter().zip(coords).collect();
        pairs.sort_by_key(|&(v, _)| v);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::BadCoordinates("duplicate support vertex".into()));
        }
        if let Some(&(v, c)) = pairs.iter().find(|&&(_, c)| c < 0.0) {
            return Err(Error::BadCoordinates(format!(
                "negative weight {c} on vertex {v}"
            )));
        }
        let sum: f64 = pairs.iter().map(|&(_, c)| c).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadCoordinates(format!("weights sum to {sum}")));
        }
        let mut support = Vec::with_capacity(pairs.len());
        let mut coords = Vec::with_capacity(pairs.len());
        for (v, c) in pairs {
            if c != 0.0 {
                support.push(v);
                coords.push(c / sum);
            }
        }
        if support.is_empty() {
            return Err(Error::BadCoordinates("all weights are zero".into()));
        }
        Ok(BaryPoint { support, coords })
    }

    /// The point sitting at a vertex.
    pub fn vertex(v: u32) -> Self {
        BaryPoint {
            support: vec![v],
            coords: vec![1.0],
        }
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The minimal carrier simplex (all weights strictly positive on it).
    pub fn carrier(&self) -> Simplex {
        Simplex::from_sorted(&self.support)
    }

    /// Weight on a vertex (0 outside the support).
    pub fn weight_on(&self, v: u32) -> f64 {
        match self.support.binary_search(&v) {
            Ok(i) => self.coords[i],
            Err(_) => 0.0,
        }
    }

    /// Affine combination of points; the weights are expected to sum to 1.
    /// Exact zeros are pruned, so midpoint arithmetic stays exact.
    pub fn combine(terms: &[(f64, &BaryPoint)]) -> BaryPoint {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for &(w, p) in terms {
            if w == 0.0 {
                continue;
            }
            for (&v, &c) in p.support.iter().zip(&p.coords) {
                *acc.entry(v).or_insert(0.0) += w * c;
            }
        }
        let mut support = Vec::with_capacity(acc.len());
        let mut coords = Vec::with_capacity(acc.len());
        for (v, c) in acc {
            if c != 0.0 {
                support.push(v);
                coords.push(c);
            }
        }
        debug_assert!(
            (coords.iter().sum::<f64>() - 1.0).abs() < 1e-6,
            "combination weights must sum to 1"
        );
        BaryPoint { support, coords }
    }

    /// Equal-weight average.
    pub fn average(points: &[&BaryPoint]) -> BaryPoint {
        let w = 1.0 / points.len() as f64;
        let terms: Vec<(f64, &BaryPoint)> = points.iter().map(|&p| (w, p)).collect();
        Self::combine(&terms)
    }

    /// Straight-line interpolation (1-t) self + t other.
    pub fn lerp(&self, other: &BaryPoint, t: f64) -> BaryPoint {
        BaryPoint::combine(&[(1.0 - t, self), (t, other)])
    }

    /// Exact chord distance, valid whenever both supports lie in one closed
    /// simplex (any chart containing both gives the same value).
    pub fn chart_dist(&self, other: &BaryPoint) -> f64 {
        geometry::sparse_dist(&self.support, &self.coords, &other.support, &other.coords)
    }

    /// Dense coordinates over an explicit chart (sorted vertex list).
    pub fn dense_over(&self, chart: &[u32]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; chart.len()];
        for (&v, &c) in self.support.iter().zip(&self.coords) {
            match chart.binary_search(&v) {
                Ok(i) => out[i] = c,
                Err(_) => {
                    return Err(Error::BadCoordinates(format!(
                        "vertex {v} is outside the chart"
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Maximum coordinate-wise deviation from another point.
    pub fn max_deviation(&self, other: &BaryPoint) -> f64 {
        let mut verts: Vec<u32> = self.support.clone();
        verts.extend_from_slice(&other.support);
        verts.sort_unstable();
        verts.dedup();
        verts
            .into_iter()
            .map(|v| (self.weight_on(v) - other.weight_on(v)).abs())
            .fold(0.0, f64::max)
    }
}

/// A complex together with the rule assigning every vertex a position in an
/// ambient chart; this is the data against which sizes are measured.
#[derive(Clone, Copy)]
pub enum MeasuredComplex<'a> {
    /// A complex measured in its own charts (every simplex is standard).
    IdentityOn(&'a SimplicialComplex),
    /// A domain measured through a simplicial map into the codomain's charts.
    Mapped(&'a SimplicialMap),
    /// A subdivision level measured through its base-chart realization.
    Subdivision(&'a Space),
}

impl<'a> MeasuredComplex<'a> {
    /// The complex whose simplices are being measured.
    pub fn complex(&self) -> &SimplicialComplex {
        match self {
            MeasuredComplex::IdentityOn(c) => c,
            MeasuredComplex::Mapped(f) => f.domain(),
            MeasuredComplex::Subdivision(s) => s.complex(),
        }
    }

    /// Measured position of a vertex.
    pub fn vertex_position(&self, v: u32) -> Result<BaryPoint> {
        match self {
            MeasuredComplex::IdentityOn(c) => {
                c.require(&Simplex::vertex(v))?;
                Ok(BaryPoint::vertex(v))
            }
            MeasuredComplex::Mapped(f) => {
                let w = f
                    .vertex_images()
                    .get(&v)
                    .copied()
                    .ok_or(Error::UnmappedVertex(v))?;
                Ok(BaryPoint::vertex(w))
            }
            MeasuredComplex::Subdivision(s) => Ok(s.vertex_pos(v)?.clone()),
        }
    }

    /// Measured position of a point (affine extension over its carrier).
    pub fn position_of(&self, p: &BaryPoint) -> Result<BaryPoint> {
        if let MeasuredComplex::IdentityOn(_) = self {
            return Ok(p.clone());
        }
        let positions: Result<Vec<BaryPoint>> = p
            .support()
            .iter()
            .map(|&v| self.vertex_position(v))
            .collect();
        let positions = positions?;
        let terms: Vec<(f64, &BaryPoint)> = p
            .coords()
            .iter()
            .copied()
            .zip(positions.iter())
            .collect();
        Ok(BaryPoint::combine(&terms))
    }

    fn positions_of_simplex(&self, s: &Simplex) -> Result<Vec<BaryPoint>> {
        s.vertices().iter().map(|&v| self.vertex_position(v)).collect()
    }
}

/// Exact chord distance between two points sharing a closed simplex.
pub fn dist_in_simplex(
    x: &BaryPoint,
    y: &BaryPoint,
    complex: &SimplicialComplex,
) -> Result<f64> {
    let union = x.carrier().union(&y.carrier());
    if !complex.contains(&union) {
        return Err(Error::NoCommonCarrier(
            x.carrier().to_string(),
            y.carrier().to_string(),
        ));
    }
    Ok(x.chart_dist(y))
}

/// Exact distance from a point to a face of its carrier (affine projection
/// onto the face's span followed by the simplex projection).
pub fn dist_point_to_face(x: &BaryPoint, face: &Simplex) -> Result<f64> {
    let carrier = x.carrier();
    if !face.is_face_of(&carrier) {
        return Err(Error::NotAFace {
            face: face.to_string(),
            simplex: carrier.to_string(),
        });
    }
    let chart = carrier.vertices();
    let dense = x.dense_over(chart)?;
    let mask: Vec<bool> = chart.iter().map(|v| face.contains_vertex(*v)).collect();
    Ok(geometry::dist_to_coordinate_face(&dense, &mask))
}

/// Measured diameter of a simplex: max pairwise distance of its measured
/// vertex positions (exact; the positions share the measured image chart).
pub fn diam_measured(m: &MeasuredComplex, s: &Simplex) -> Result<f64> {
    m.complex().require(s)?;
    let pos = m.positions_of_simplex(s)?;
    let mut best = 0.0f64;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            best = best.max(pos[i].chart_dist(&pos[j]));
        }
    }
    Ok(best)
}

/// Measured inner radius of a positive-dimensional simplex: distance from the
/// measured image of the barycentre to the nearest measured facet hull.
pub fn rad_measured(m: &MeasuredComplex, s: &Simplex) -> Result<f64> {
    m.complex().require(s)?;
    if s.dim() == 0 {
        return Err(Error::Degenerate(format!(
            "radius of the 0-simplex {s} is undefined"
        )));
    }
    let pos = m.positions_of_simplex(s)?;
    let mut chart: Vec<u32> = pos.iter().flat_map(|p| p.support().to_vec()).collect();
    chart.sort_unstable();
    chart.dedup();
    let refs: Vec<&BaryPoint> = pos.iter().collect();
    let centre = BaryPoint::average(&refs).dense_over(&chart)?;
    let dense: Result<Vec<Vec<f64>>> = pos.iter().map(|p| p.dense_over(&chart)).collect();
    let dense = dense?;
    let mut best = f64::INFINITY;
    for skip in 0..pos.len() {
        let facet: Vec<Vec<f64>> = dense
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| p.clone())
            .collect();
        best = best.min(geometry::point_to_hull_dist(&centre, &facet));
    }
    Ok(best)
}

/// Largest measured diameter over all simplices.
pub fn mesh(m: &MeasuredComplex, mode: ExecMode) -> Result<f64> {
    let c = m.complex();
    let mut simplices: Vec<&Simplex> = Vec::new();
    for d in 1..=c.dim() {
        simplices.extend(c.simplices_of_dim(d));
    }
    if simplices.is_empty() {
        return Ok(0.0);
    }
    Ok(exec::max_over(mode, &simplices, |s| {
        diam_measured(m, s).expect("simplices come from the measured complex")
    }))
}

/// Smallest measured radius over positive-dimensional simplices.
pub fn comesh(m: &MeasuredComplex, mode: ExecMode) -> Result<f64> {
    let c = m.complex();
    let mut simplices: Vec<&Simplex> = Vec::new();
    for d in 1..=c.dim() {
        simplices.extend(c.simplices_of_dim(d));
    }
    if simplices.is_empty() {
        return Err(Error::ComeshUndefined);
    }
    Ok(exec::min_over(mode, &simplices, |s| {
        rad_measured(m, s).expect("positive-dimensional simplices have a radius")
    }))
}

/// Face closure of a list of simplices, each validated against the complex.
pub fn close_subcomplex(
    c: &SimplicialComplex,
    targets: &[Simplex],
) -> Result<BTreeSet<Simplex>> {
    let mut closed: BTreeSet<Simplex> = BTreeSet::new();
    for t in targets {
        c.require(t)?;
        for f in t.proper_faces() {
            closed.insert(f);
        }
        closed.insert(t.clone());
    }
    Ok(closed)
}

/// A two-sided bound on a distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistInterval {
    pub lower: f64,
    pub upper: f64,
}

impl DistInterval {
    pub fn exact(v: f64) -> Self {
        DistInterval { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Three-valued result of a neighborhood membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    Unknown,
}

impl std::fmt::Display for Containment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Containment::Inside => "inside",
            Containment::Outside => "outside",
            Containment::Unknown => "unknown",
        };
        write!(f, "{s}")
    }
}

struct StarData {
    /// The closed star of the carrier: all faces of all its cofaces.
    set: BTreeSet<Simplex>,
    /// Star simplices that are faces of simplices outside the star; every
    /// path leaving the star passes through one of them.
    frontier: Vec<Simplex>,
    /// Whether anything lies outside the star at all.
    has_outside: bool,
}

/// Caching context for distance queries against one measured complex.
///
/// Caches are warmed on demand behind a mutex; queries after warm-up are pure
/// lookups plus chart arithmetic, safe to run concurrently.
pub struct MetricContext<'a> {
    measured: MeasuredComplex<'a>,
    refinement: usize,
    /// Graph nodes as points over the measured complex, with their measured
    /// positions; populated lazily on the first cross-chart query.
    graph: Mutex<Option<Arc<PathGraph>>>,
    components: BTreeMap<u32, u32>,
    stars: Mutex<BTreeMap<Simplex, Arc<StarData>>>,
}

struct PathGraph {
    nodes: Vec<BaryPoint>,
    node_pos: Vec<BaryPoint>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl<'a> MetricContext<'a> {
    /// Context with the given graph refinement level (0 = vertices only).
    pub fn new(measured: MeasuredComplex<'a>, refinement: usize) -> Self {
        let components = measured.complex().component_reps();
        MetricContext {
            measured,
            refinement,
            graph: Mutex::new(None),
            components,
            stars: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn measured(&self) -> &MeasuredComplex<'a> {
        &self.measured
    }

    fn complex(&self) -> &SimplicialComplex {
        self.measured.complex()
    }

    fn star(&self, carrier: &Simplex) -> Result<Arc<StarData>> {
        {
            let cache = self.stars.lock().unwrap();
            if let Some(hit) = cache.get(carrier) {
                return Ok(hit.clone());
            }
        }
        let c = self.complex();
        c.require(carrier)?;
        let mut set: BTreeSet<Simplex> = BTreeSet::new();
        for coface in c.simplices() {
            if carrier.is_face_of(coface) {
                for f in coface.proper_faces() {
                    set.insert(f);
                }
                set.insert(coface.clone());
            }
        }
        let mut frontier: BTreeSet<Simplex> = BTreeSet::new();
        let mut has_outside = false;
        for s in c.simplices() {
            if set.contains(s) {
                continue;
            }
            has_outside = true;
            for f in s.proper_faces() {
                if set.contains(&f) {
                    frontier.insert(f);
                }
            }
        }
        let data = Arc::new(StarData {
            set,
            frontier: frontier.into_iter().collect(),
            has_outside,
        });
        self.stars
            .lock()
            .unwrap()
            .insert(carrier.clone(), data.clone());
        Ok(data)
    }

    fn graph(&self) -> Result<Arc<PathGraph>> {
        {
            let cache = self.graph.lock().unwrap();
            if let Some(g) = cache.as_ref() {
                return Ok(g.clone());
            }
        }
        let c = self.complex();
        let nodes: Vec<BaryPoint> = if self.refinement == 0 {
            c.vertex_ids().into_iter().map(BaryPoint::vertex).collect()
        } else {
            let mut tower = SubdivisionTower::new(Arc::new(c.clone()));
            tower.ensure_depth(self.refinement)?;
            let level = tower.complex(self.refinement)?.clone();
            level
                .vertex_ids()
                .into_iter()
                .map(|v| tower.base_pos(self.refinement, v).map(Clone::clone))
                .collect::<Result<Vec<_>>>()?
        };
        let node_pos: Result<Vec<BaryPoint>> =
            nodes.iter().map(|p| self.measured.position_of(p)).collect();
        let node_pos = node_pos?;
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                let union = nodes[i].carrier().union(&nodes[j].carrier());
                if c.contains(&union) {
                    let w = node_pos[i].chart_dist(&node_pos[j]);
                    adjacency[i].push((j, w));
                    adjacency[j].push((i, w));
                }
            }
        }
        let g = Arc::new(PathGraph {
            nodes,
            node_pos,
            adjacency,
        });
        *self.graph.lock().unwrap() = Some(g.clone());
        Ok(g)
    }

    fn component_of(&self, p: &BaryPoint) -> u32 {
        self.components[&p.support()[0]]
    }

    /// Interval bound on the path distance between two points.
    ///
    /// Exact (width 0) when the points share a closed simplex. Otherwise the
    /// upper bound is a shortest path through the refinement graph and the
    /// lower bound comes from chart distances to shared star vertices;
    /// different components give +infinity.
    pub fn path_dist(&self, x: &BaryPoint, y: &BaryPoint) -> Result<DistInterval> {
        let c = self.complex();
        c.require(&x.carrier())?;
        c.require(&y.carrier())?;
        let union = x.carrier().union(&y.carrier());
        if c.contains(&union) {
            let d = self
                .measured
                .position_of(x)?
                .chart_dist(&self.measured.position_of(y)?);
            return Ok(DistInterval::exact(d));
        }
        if self.component_of(x) != self.component_of(y) {
            return Ok(DistInterval::exact(f64::INFINITY));
        }

        let pos_x = self.measured.position_of(x)?;
        let pos_y = self.measured.position_of(y)?;

        // Lower bound: for every vertex v chart-reachable from both points,
        // the triangle inequality gives |d(x,v) - d(y,v)| <= d(x,y).
        let mut lower = 0.0f64;
        for v in c.vertex_ids() {
            let vs = Simplex::vertex(v);
            let join_x = x.carrier().union(&vs);
            let join_y = y.carrier().union(&vs);
            if c.contains(&join_x) && c.contains(&join_y) {
                let pv = self.measured.vertex_position(v)?;
                lower = lower.max((pos_x.chart_dist(&pv) - pos_y.chart_dist(&pv)).abs());
            }
        }

        // Upper bound: Dijkstra over the refinement graph plus the two query
        // points.
        let g = self.graph()?;
        let n = g.nodes.len();
        let mut adj: Vec<Vec<(usize, f64)>> = g.adjacency.clone();
        adj.push(Vec::new()); // x at index n
        adj.push(Vec::new()); // y at index n + 1
        for (i, node) in g.nodes.iter().enumerate() {
            if c.contains(&x.carrier().union(&node.carrier())) {
                let w = pos_x.chart_dist(&g.node_pos[i]);
                adj[n].push((i, w));
                adj[i].push((n, w));
            }
            if c.contains(&y.carrier().union(&node.carrier())) {
                let w = pos_y.chart_dist(&g.node_pos[i]);
                adj[n + 1].push((i, w));
                adj[i].push((n + 1, w));
            }
        }
        let upper = dijkstra(&adj, n, n + 1);
        Ok(DistInterval {
            lower: lower.min(upper),
            upper,
        })
    }

    /// Three-valued test of `dist(x, targets) < eps`, where `targets` is
    /// face-closed before testing.
    ///
    /// Distances to target simplices inside the closed star of x's carrier
    /// are exact hull computations in a shared chart. Everything outside the
    /// star is bounded below by the exact distance to the star frontier.
    pub fn in_neighborhood(
        &self,
        x: &BaryPoint,
        targets: &[Simplex],
        eps: f64,
    ) -> Result<Containment> {
        let interval = self.dist_to_subcomplex(x, targets)?;
        Ok(if interval.upper < eps {
            Containment::Inside
        } else if interval.lower > eps {
            Containment::Outside
        } else {
            Containment::Unknown
        })
    }

    /// Interval bound on the distance from a point to a subcomplex.
    pub fn dist_to_subcomplex(&self, x: &BaryPoint, targets: &[Simplex]) -> Result<DistInterval> {
        let closed = close_subcomplex(self.complex(), targets)?;
        self.dist_to_closed_subcomplex(x, &closed)
    }

    /// Same as [`dist_to_subcomplex`](Self::dist_to_subcomplex) with the
    /// face closure already built, so callers testing many points against one
    /// subcomplex pay for the closure once.
    pub fn dist_to_closed_subcomplex(
        &self,
        x: &BaryPoint,
        closed: &BTreeSet<Simplex>,
    ) -> Result<DistInterval> {
        let c = self.complex();
        let carrier = x.carrier();
        c.require(&carrier)?;
        if closed.is_empty() {
            return Ok(DistInterval::exact(f64::INFINITY));
        }
        let star = self.star(&carrier)?;
        let pos_x = self.measured.position_of(x)?;

        let mut local_min = f64::INFINITY;
        let mut nonlocal: Vec<&Simplex> = Vec::new();
        for t in closed {
            if star.set.contains(t) {
                local_min = local_min.min(self.chart_dist_to_simplex(&pos_x, t)?);
            } else {
                nonlocal.push(t);
            }
        }

        if nonlocal.is_empty() {
            return Ok(DistInterval::exact(local_min));
        }

        // Distance to anything beyond the star is at least the exact distance
        // to the star frontier. This reading of the star geometry only holds
        // for measurements that are homeomorphisms onto their image (identity
        // and subdivision realizations); a collapsing map would not support
        // the crossing argument, so it falls back to a trivial lower bound.
        let frontier_bound = match self.measured {
            MeasuredComplex::Mapped(_) => 0.0,
            _ => {
                let mut b = f64::INFINITY;
                for f in &star.frontier {
                    b = b.min(self.chart_dist_to_simplex(&pos_x, f)?);
                }
                debug_assert!(star.has_outside);
                b
            }
        };
        let lower = local_min.min(frontier_bound);

        let upper = if local_min.is_finite() {
            local_min
        } else {
            // No local target: route through the graph to target vertices.
            let mut u = f64::INFINITY;
            for t in &nonlocal {
                for &v in t.vertices() {
                    u = u.min(self.path_dist(x, &BaryPoint::vertex(v))?.upper);
                }
            }
            u
        };
        Ok(DistInterval {
            lower: lower.min(upper),
            upper,
        })
    }

    /// Exact distance from a measured position to the measured hull of a
    /// simplex sharing a chart with it.
    fn chart_dist_to_simplex(&self, pos_x: &BaryPoint, t: &Simplex) -> Result<f64> {
        let hull = self.measured.positions_of_simplex(t)?;
        let mut chart: Vec<u32> = pos_x.support().to_vec();
        for p in &hull {
            chart.extend_from_slice(p.support());
        }
        chart.sort_unstable();
        chart.dedup();
        let dense_x = pos_x.dense_over(&chart)?;
        let dense_hull: Result<Vec<Vec<f64>>> =
            hull.iter().map(|p| p.dense_over(&chart)).collect();
        Ok(geometry::point_to_hull_dist(&dense_x, &dense_hull?))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], from: usize, to: usize) -> f64 {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // Reverse order: BinaryHeap is a max-heap.
            other.0.total_cmp(&self.0)
        }
    }
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[from] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, from));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == to {
            return d;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
    dist[to]
}

/// A sampled supremum: an estimate certified only over the points actually
/// evaluated, never a proven global bound.
#[derive(Clone, Copy, Debug)]
pub struct SampledSup {
    pub value: f64,
    pub samples: usize,
}

/// Sampled supremum of the measured distance between `control(x)` and
/// `mapped(x)` over grid plus seeded random points of every domain simplex.
/// Distances use path-interval upper bounds (exact when the two image points
/// share a chart, which holds for all controlled pairs by construction).
pub fn control_of_map<F, P>(
    domain: &SimplicialComplex,
    ctx: &MetricContext,
    mapped: F,
    control: P,
    spec: &SampleSpec,
    tag: &str,
    mode: ExecMode,
) -> Result<SampledSup>
where
    F: Fn(&BaryPoint) -> Result<BaryPoint> + Sync + Send,
    P: Fn(&BaryPoint) -> Result<BaryPoint> + Sync + Send,
{
    let simplices: Vec<&Simplex> = domain.simplices().collect();
    let per_simplex: Vec<Result<(f64, usize)>> =
        exec::map_collect(mode, &simplices, |s| {
            let pts = sample_points(s, spec, tag);
            let mut sup = 0.0f64;
            for x in &pts {
                let a = control(x)?;
                let b = mapped(x)?;
                sup = sup.max(ctx.path_dist(&a, &b)?.upper);
            }
            Ok((sup, pts.len()))
        });
    let mut value = 0.0f64;
    let mut samples = 0;
    for r in per_simplex {
        let (sup, n) = r?;
        value = value.max(sup);
        samples += n;
    }
    Ok(SampledSup { value, samples })
}
