//! Stagewise retraction of an iterated barycentric subdivision onto the
//! identity, with a certified straight-line homotopy.
//!
//! Each stage maps the vertices of one subdivision level to vertices of the
//! previous level: barycentres of first-level simplices drop to a chosen
//! vertex, and deeper barycentres move to the nearest vertex of their labeled
//! simplex, measured exactly against the all-but-last face of their
//! first-level carrier flag. Composing the stages gives a simplicial map
//! `r` from the deepest level back to the base whose image stays inside each
//! point's carrier, together with a homotopy from the identity to `r` that
//! interpolates one stage at a time.

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::geometry;
use crate::homotopy::{HomotopyChain, PlEval, Segment};
use crate::metric::{self, BaryPoint, MeasuredComplex, MetricContext};
use crate::report::{CheckSummary, VerificationReport};
use crate::sample::{self, SampleSpec};
use crate::subdivision::{Space, SubdivisionTower, DEFAULT_BUDGET};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// First retraction stage: each first-level vertex, labeled by a base
/// simplex, drops to that simplex's smallest-id vertex.
pub fn build_r1(tower: &SubdivisionTower) -> Result<SimplicialMap> {
    build_r1_with(tower, |s| s.vertices()[0])
}

/// First retraction stage with a custom vertex choice per base simplex.
/// The choice must return a vertex of its argument.
pub fn build_r1_with(
    tower: &SubdivisionTower,
    choice: impl Fn(&Simplex) -> u32,
) -> Result<SimplicialMap> {
    let dom = tower.complex(1)?.clone();
    let cod = tower.base().clone();
    let mut images = BTreeMap::new();
    for v in dom.vertex_ids() {
        let label = tower.label(1, v)?;
        let image = choice(label);
        if !label.contains_vertex(image) {
            return Err(Error::PreconditionFailed(format!(
                "vertex choice returned {image}, which is not a vertex of {label}"
            )));
        }
        images.insert(v, image);
    }
    SimplicialMap::new(dom, cod, images)
}

/// Retraction stage `j >= 2`: the barycentre of a level-(j-1) simplex `tau`
/// moves to the vertex of `tau` nearest (exact chart distance) to the
/// all-but-last face of the first-level flag carrying `tau`, ties broken by
/// smallest vertex id. Barycentres of persistent vertices stay fixed.
pub fn build_rj(tower: &SubdivisionTower, j: usize) -> Result<SimplicialMap> {
    if j < 2 {
        return Err(Error::PreconditionFailed(format!(
            "stage index {j} is below 2; the first stage has its own builder"
        )));
    }
    let dom = tower.complex(j)?.clone();
    let cod = tower.complex(j - 1)?.clone();
    let mut images = BTreeMap::new();
    for w in dom.vertex_ids() {
        let tau = tower.label(j, w)?.clone();
        let rho = tower.carrier(j - 1, &tau, 1)?;
        if rho.dim() == 0 {
            // tau realizes at a single persistent vertex, so its barycentre
            // keeps the same id on both levels.
            images.insert(w, w);
            continue;
        }
        let flag = rho.vertices();
        let n = rho.dim();
        debug_assert!(
            (1..=n).all(|t| {
                let lo = tower.label(1, flag[t - 1]).expect("flag vertex");
                let hi = tower.label(1, flag[t]).expect("flag vertex");
                lo.is_face_of(hi) && lo != hi
            }),
            "first-level vertex ids must be ordered along the flag"
        );
        let chart_simplex = tower.label(1, flag[n])?.clone();
        let chart = chart_simplex.vertices();
        let face: Vec<Vec<f64>> = flag[..n]
            .iter()
            .map(|&u| tower.base_pos(1, u)?.dense_over(chart))
            .collect::<Result<_>>()?;
        let mut best: Option<(f64, u32)> = None;
        for &v in tau.vertices() {
            let pos = tower.base_pos(j - 1, v)?.dense_over(chart)?;
            let d = geometry::point_to_hull_dist(&pos, &face);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        images.insert(w, best.expect("simplices have vertices").1);
    }
    SimplicialMap::new(dom, cod, images)
}

/// Mesh of one tower level, measured in the base charts. Matches the value
/// of [`metric::mesh`] on the corresponding subdivision space.
fn level_mesh(tower: &SubdivisionTower, level: usize, mode: ExecMode) -> Result<f64> {
    let c = tower.complex(level)?;
    let mut simplices: Vec<&Simplex> = Vec::new();
    for d in 1..=c.dim() {
        simplices.extend(c.simplices_of_dim(d));
    }
    if simplices.is_empty() {
        return Ok(0.0);
    }
    Ok(exec::max_over(mode, &simplices, |s| {
        let verts = s.vertices();
        let mut best = 0.0f64;
        for i in 0..verts.len() {
            let pi = tower.base_pos(level, verts[i]).expect("vertex position");
            for j in i + 1..verts.len() {
                let pj = tower.base_pos(level, verts[j]).expect("vertex position");
                best = best.max(pi.chart_dist(pj));
            }
        }
        best
    }))
}

/// Upper bound on the subdivision depth needed to push a mesh below a
/// target, from the one-step contraction factor dim/(dim+1).
pub fn depth_bound(dim: usize, mesh: f64, target: f64) -> usize {
    if dim == 0 || mesh < target {
        return 0;
    }
    let ratio = dim as f64 / (dim as f64 + 1.0);
    let mut m = mesh;
    let mut j = 0usize;
    while m >= target && j < 64 {
        m *= ratio;
        j += 1;
    }
    j
}

/// Minimal depth `i` with measured mesh of level `i` strictly below
/// `comesh - eps`, extending the tower as needed. Requires
/// `0 < eps < comesh` of the base.
pub fn subdivision_depth(tower: &mut SubdivisionTower, eps: f64) -> Result<usize> {
    let base = tower.base().clone();
    let mode = tower.mode();
    let comesh = metric::comesh(&MeasuredComplex::IdentityOn(&base), mode)?;
    if !(eps > 0.0 && eps < comesh) {
        return Err(Error::EpsilonOutOfRange { eps, max: comesh });
    }
    let target = comesh - eps;
    let mesh0 = metric::mesh(&MeasuredComplex::IdentityOn(&base), mode)?;
    let bound = depth_bound(base.dim(), mesh0, target).max(1);
    for i in 1..=bound {
        tower.ensure_depth(i)?;
        if level_mesh(tower, i, mode)? < target {
            return Ok(i);
        }
    }
    Err(Error::PreconditionFailed(format!(
        "mesh did not contract below {target} within {bound} subdivisions"
    )))
}

/// A retraction of an iterated subdivision onto its base: the stages, their
/// composite, and the stagewise homotopy from the identity.
pub struct RetractionBundle {
    tower: Arc<SubdivisionTower>,
    epsilon: f64,
    depth: usize,
    required_depth: usize,
    budget: u64,
    mode: ExecMode,
    stages: Vec<SimplicialMap>,
    r: SimplicialMap,
    homotopy: HomotopyChain,
    r_eval: PlEval,
}

impl RetractionBundle {
    pub fn tower(&self) -> &Arc<SubdivisionTower> {
        &self.tower
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// The minimal depth admissible for this base and epsilon.
    pub fn required_depth(&self) -> usize {
        self.required_depth
    }

    /// Stage maps in stage order: element `j - 1` maps level `j` to `j - 1`.
    pub fn stages(&self) -> &[SimplicialMap] {
        &self.stages
    }

    pub fn stage(&self, j: usize) -> Option<&SimplicialMap> {
        if j == 0 {
            return None;
        }
        self.stages.get(j - 1)
    }

    /// The composite retraction from the deepest level to the base.
    pub fn r(&self) -> &SimplicialMap {
        &self.r
    }

    /// The homotopy from the identity (t = 0) to the retraction (t = 1).
    pub fn homotopy(&self) -> &HomotopyChain {
        &self.homotopy
    }

    /// Point evaluator of the composite retraction.
    pub fn r_eval(&self) -> &PlEval {
        &self.r_eval
    }

    pub fn space(&self, level: usize) -> Result<Space> {
        Space::new(self.tower.clone(), level)
    }

    /// Evaluate the retraction on a point given in base coordinates.
    pub fn retract(&self, x: &BaryPoint) -> Result<BaryPoint> {
        self.r_eval.eval(x)
    }
}

/// Build the full retraction bundle for a base complex and control epsilon.
///
/// The depth defaults to the minimal admissible one; an explicit shallower
/// request is refused, a deeper one honored. A 0-dimensional base yields the
/// identity bundle with a constant homotopy.
pub fn build_retraction(
    base: Arc<SimplicialComplex>,
    eps: f64,
    requested_depth: Option<usize>,
    budget: u64,
    mode: ExecMode,
) -> Result<RetractionBundle> {
    if base.dim() == 0 {
        if !(eps > 0.0) {
            return Err(Error::EpsilonOutOfRange {
                eps,
                max: f64::INFINITY,
            });
        }
        let mut tower = SubdivisionTower::new(base.clone());
        tower.set_budget(budget);
        tower.set_mode(mode);
        let tower = Arc::new(tower);
        let space = Space::new(tower.clone(), 0)?;
        let homotopy = HomotopyChain::constant(PlEval::Identity, space, base.clone())?;
        return Ok(RetractionBundle {
            tower,
            epsilon: eps,
            depth: 0,
            required_depth: 0,
            budget,
            mode,
            stages: Vec::new(),
            r: SimplicialMap::identity(base),
            homotopy,
            r_eval: PlEval::Identity,
        });
    }

    let mut tower = SubdivisionTower::new(base.clone());
    tower.set_budget(budget);
    tower.set_mode(mode);
    let required_depth = subdivision_depth(&mut tower, eps)?;
    let depth = requested_depth.unwrap_or(required_depth);
    if depth < required_depth {
        return Err(Error::DepthTooShallow {
            requested: depth,
            required: required_depth,
        });
    }
    tower.ensure_depth(depth)?;

    let mut stages = Vec::with_capacity(depth);
    stages.push(build_r1(&tower)?);
    for j in 2..=depth {
        stages.push(build_rj(&tower, j)?);
    }

    // down_to[k] composes the stages from the deepest level down to level k.
    let mut down_to: Vec<Option<SimplicialMap>> = vec![None; depth + 1];
    down_to[depth] = Some(SimplicialMap::identity(tower.complex(depth)?.clone()));
    for k in (0..depth).rev() {
        let upper = down_to[k + 1].as_ref().expect("filled in order");
        down_to[k] = Some(SimplicialMap::compose(&stages[k], upper)?);
    }
    let down_to: Vec<SimplicialMap> = down_to.into_iter().map(|m| m.expect("filled")).collect();
    let r = down_to[0].clone();

    let tower = Arc::new(tower);
    let domain = Space::new(tower.clone(), depth)?;
    let mut segments = Vec::with_capacity(depth);
    for j in (1..=depth).rev() {
        let a = if j == depth {
            PlEval::Identity
        } else {
            PlEval::affine(
                domain.clone(),
                down_to[j].clone(),
                Space::new(tower.clone(), j)?,
            )?
        };
        let b = PlEval::affine(
            domain.clone(),
            down_to[j - 1].clone(),
            Space::new(tower.clone(), j - 1)?,
        )?;
        segments.push(Segment {
            pre: PlEval::Identity,
            a,
            b,
            post: PlEval::Identity,
            domain: domain.clone(),
            chart: base.clone(),
        });
    }
    let homotopy = HomotopyChain::new(segments)?;
    let r_eval = PlEval::affine(domain, r.clone(), Space::new(tower.clone(), 0)?)?;

    Ok(RetractionBundle {
        tower,
        epsilon: eps,
        depth,
        required_depth,
        budget,
        mode,
        stages,
        r,
        homotopy,
        r_eval,
    })
}

/// Build with default budget and execution mode.
pub fn build_retraction_default(
    base: Arc<SimplicialComplex>,
    eps: f64,
) -> Result<RetractionBundle> {
    build_retraction(base, eps, None, DEFAULT_BUDGET, ExecMode::default())
}

/// Knobs for the sampled parts of retraction verification.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: SampleSpec,
    /// Number of epsilon values on the nested-neighborhood grid.
    pub eps_grid: usize,
    /// Number of time steps per homotopy sample.
    pub time_steps: usize,
    /// Maximum number of deep simplices sampled per base simplex.
    pub ring_cap: usize,
    /// Maximum number of deep simplices sampled per stage for the boundary
    /// distance check.
    pub stage_cap: usize,
    /// Classification margin for sampled distance comparisons.
    pub margin: f64,
    pub mode: ExecMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: SampleSpec::new(2, 4, 0),
            eps_grid: 8,
            time_steps: 8,
            ring_cap: 64,
            stage_cap: 512,
            margin: 1e-7,
            mode: ExecMode::default(),
        }
    }
}

/// Tolerance for checks that are exact up to floating-point evaluation.
const EXACT_TOL: f64 = 1e-12;

/// Take at most `cap` elements, evenly strided, preserving order.
pub(crate) fn strided<'a, T>(items: &'a [T], cap: usize) -> Vec<&'a T> {
    if items.len() <= cap || cap == 0 {
        return items.iter().collect();
    }
    let stride = items.len().div_ceil(cap);
    items.iter().step_by(stride).collect()
}

pub(crate) fn fmt_point(p: &BaryPoint) -> String {
    let parts: Vec<String> = p
        .support()
        .iter()
        .zip(p.coords())
        .map(|(v, c)| format!("{v}:{c:.6}"))
        .collect();
    format!("[{}]", parts.join(" "))
}

/// Per-point data shared by the collar and homotopy checks.
struct CollarSample {
    /// The sampled point in deep-level coordinates.
    level_point: BaryPoint,
    /// Exact-containment flag: the point's base carrier is a face of sigma.
    in_sigma: bool,
    /// Distance interval to the subdivided sigma (None when `in_sigma`).
    dist: Option<(f64, f64)>,
}

/// Verify the defining properties of a retraction bundle.
///
/// Exact checks (face condition, vertex-level boundary monotonicity, dual
/// cell combinatorics, determinism) never produce `unknown`; sampled checks
/// classify each point as pass, fail, or unknown using interval distance
/// bounds with the configured margin.
pub fn verify_retraction(
    bundle: &RetractionBundle,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let tower = bundle.tower();
    let depth = bundle.depth();
    let base = tower.base().clone();
    let eps = bundle.epsilon();
    let mut report = VerificationReport::new(format!(
        "retraction depth={depth} epsilon={eps:.9}"
    ));

    if depth == 0 {
        let mut c = CheckSummary::new("identity-bundle")
            .with_note("0-dimensional base retracts by the identity");
        c.record_pass();
        report.push(c);
        return Ok(report);
    }

    let space = bundle.space(depth)?;
    let measured = MeasuredComplex::Subdivision(&space);
    let ctx = MetricContext::new(measured, 0);
    let deep = tower.complex(depth)?.clone();
    let deep_simplices: Vec<Simplex> = deep.simplices().cloned().collect();

    // Base carrier of every deep simplex, computed once.
    let carriers: Vec<Simplex> = exec::map_collect(opts.mode, &deep_simplices, |s| {
        tower
            .carrier(depth, s, 0)
            .expect("deep simplices have base carriers")
    });

    // --- Check: face condition, composite and stagewise (exact). ---
    let mut face = CheckSummary::new("face-condition");
    for (s, sigma) in deep_simplices.iter().zip(&carriers) {
        if bundle.r().apply(s).is_face_of(sigma) {
            face.record_pass();
        } else {
            face.record_fail(format!("r({s}) outside carrier {sigma}"));
        }
    }
    for (k, stage) in bundle.stages().iter().enumerate() {
        let j = k + 1;
        for s in tower.complex(j)?.simplices() {
            let carrier = tower.carrier(j, s, j - 1)?;
            if stage.apply(s).is_face_of(&carrier) {
                face.record_pass();
            } else {
                face.record_fail(format!("stage {j}: image of {s} outside {carrier}"));
            }
        }
    }
    report.push(face);

    // Shared sampling of the collar around each base simplex.
    let times = sample::time_grid(opts.time_steps);
    let eps_values: Vec<f64> = if opts.eps_grid <= 1 {
        vec![eps]
    } else {
        (0..opts.eps_grid)
            .map(|m| eps * m as f64 / (opts.eps_grid - 1) as f64)
            .collect()
    };

    let mut collar = CheckSummary::new("collar-retraction");
    let mut homotopy_check = CheckSummary::new("homotopy-keeps-neighborhoods");
    let mut samples_used: u64 = 0;

    for sigma in base.simplices() {
        let targets: Vec<Simplex> = deep_simplices
            .iter()
            .zip(&carriers)
            .filter(|(_, c)| c.is_face_of(sigma))
            .map(|(s, _)| s.clone())
            .collect();
        let closed_targets = metric::close_subcomplex(&deep, &targets)?;
        let target_vertices: BTreeSet<u32> = targets
            .iter()
            .flat_map(|s| s.vertices().iter().copied())
            .collect();
        let ring: Vec<Simplex> = deep_simplices
            .iter()
            .filter(|s| s.vertices().iter().any(|v| target_vertices.contains(v)))
            .cloned()
            .collect();
        let ring = strided(&ring, opts.ring_cap);

        // Gather per-point membership data (parallelizable, order-preserving).
        let per_simplex: Vec<Vec<CollarSample>> = exec::map_collect(opts.mode, &ring, |tau| {
            let pts = sample::sample_points(tau, &opts.samples, "collar");
            pts.into_iter()
                .map(|p| {
                    let carrier0 = tower
                        .carrier(depth, &p.carrier(), 0)
                        .expect("sampled carriers exist");
                    let in_sigma = carrier0.is_face_of(sigma);
                    let dist = if in_sigma {
                        None
                    } else {
                        let d = ctx
                            .dist_to_closed_subcomplex(&p, &closed_targets)
                            .expect("distance bounds exist");
                        Some((d.lower, d.upper))
                    };
                    CollarSample {
                        level_point: p,
                        in_sigma,
                        dist,
                    }
                })
                .collect()
        });

        for (tau, samples) in ring.iter().zip(per_simplex) {
            for s in samples {
                samples_used += 1;
                let x = &s.level_point;

                // Collar membership at the bundle epsilon.
                let member = if s.in_sigma {
                    Some(true)
                } else {
                    let (lo, up) = s.dist.expect("distance computed");
                    if up <= eps {
                        Some(true)
                    } else if lo > eps {
                        Some(false)
                    } else {
                        None
                    }
                };

                // r-image containment, exact on the pushed support.
                let y = push_map(bundle.r(), x);
                let y_in_sigma = y.carrier().is_face_of(sigma);
                match member {
                    Some(true) => {
                        if y_in_sigma {
                            collar.record_pass();
                        } else {
                            collar.record_fail(format!(
                                "sigma={sigma} tau={tau} x={} retracts to {}",
                                fmt_point(x),
                                fmt_point(&y)
                            ));
                        }
                    }
                    None => {
                        if y_in_sigma {
                            collar.record_pass();
                        } else {
                            collar.record_unknown();
                        }
                    }
                    Some(false) => {}
                }

                // Homotopy track evaluated once per time step, classified
                // against every epsilon on the grid.
                let x_base = space.realize(x)?;
                let mut track: Vec<(bool, Option<(f64, f64)>)> =
                    Vec::with_capacity(times.len());
                for &t in &times {
                    let y_t = bundle.homotopy().eval(&x_base, t)?;
                    let y_level = space.locate(&y_t)?;
                    let carrier0 = tower.carrier(depth, &y_level.carrier(), 0)?;
                    if carrier0.is_face_of(sigma) {
                        track.push((true, None));
                    } else {
                        let d = ctx.dist_to_closed_subcomplex(&y_level, &closed_targets)?;
                        track.push((false, Some((d.lower, d.upper))));
                    }
                }
                for &ev in &eps_values {
                    let x_inside = if s.in_sigma {
                        true
                    } else {
                        match s.dist {
                            Some((_, up)) => up <= ev,
                            None => true,
                        }
                    };
                    if !x_inside {
                        continue;
                    }
                    for (ti, &(exact_in, d)) in track.iter().enumerate() {
                        samples_used += 1;
                        if exact_in {
                            homotopy_check.record_pass();
                            continue;
                        }
                        let (lo, up) = d.expect("distance computed");
                        if up <= ev + opts.margin {
                            homotopy_check.record_pass();
                        } else if lo > ev + opts.margin {
                            homotopy_check.record_fail(format!(
                                "sigma={sigma} x={} eps'={ev:.6} t={:.4} dist>[{lo:.6}]",
                                fmt_point(x),
                                times[ti]
                            ));
                        } else {
                            homotopy_check.record_unknown();
                        }
                    }
                }
            }
        }
    }
    report.push(collar);
    report.push(homotopy_check);

    // --- Check: stage boundary monotonicity. ---
    report.push(
        CheckSummary::new("stage-boundary-monotonicity-stage1")
            .with_note("first stage is exempt by construction"),
    );

    let mut mono_exact = CheckSummary::new("stage-boundary-monotonicity-vertices");
    for j in 2..=depth {
        let stage = bundle.stage(j).expect("stage exists");
        let images = stage.vertex_images();
        for w in tower.complex(j)?.vertex_ids() {
            let sigma = tower.carrier(j, &Simplex::vertex(w), 0)?;
            if sigma.dim() == 0 {
                continue;
            }
            let x = tower.base_pos(j, w)?;
            let y = tower.base_pos(j - 1, images[&w])?;
            let dx = boundary_dist(x, &sigma)?;
            let dy = boundary_dist(y, &sigma)?;
            if dy <= dx + EXACT_TOL {
                mono_exact.record_pass();
            } else {
                mono_exact.record_fail(format!(
                    "stage {j} vertex {w}: moved from depth {dx:.9} to {dy:.9} in {sigma}"
                ));
            }
        }
    }
    report.push(mono_exact);

    let mut mono_sampled = CheckSummary::new("stage-boundary-monotonicity-sampled");
    for j in 2..=depth {
        let stage = bundle.stage(j).expect("stage exists");
        let level_simplices: Vec<Simplex> =
            tower.complex(j)?.simplices().cloned().collect();
        let chosen = strided(&level_simplices, opts.stage_cap);
        let results: Vec<Vec<(bool, String)>> = exec::map_collect(opts.mode, &chosen, |tau| {
            let sigma = tower
                .carrier(j, tau, 0)
                .expect("level simplices have carriers");
            if sigma.dim() == 0 {
                return Vec::new();
            }
            let pts = sample::sample_points(tau, &opts.samples, "stage-dist");
            pts.into_iter()
                .map(|p| {
                    let x = tower.realize(j, &p).expect("realizable");
                    let image = push_map(stage, &p);
                    let y = tower.realize(j - 1, &image).expect("realizable");
                    let dx = boundary_dist(&x, &sigma).expect("chart distance");
                    let dy = boundary_dist(&y, &sigma).expect("chart distance");
                    (
                        dy <= dx + opts.margin,
                        format!(
                            "stage {j} tau={tau} x={}: depth {dx:.9} -> {dy:.9}",
                            fmt_point(&p)
                        ),
                    )
                })
                .collect()
        });
        for batch in results {
            for (ok, witness) in batch {
                samples_used += 1;
                if ok {
                    mono_sampled.record_pass();
                } else {
                    mono_sampled.record_fail(witness);
                }
            }
        }
    }
    report.push(mono_sampled);

    // --- Check: dual cell combinatorics and clearance. ---
    let mut dual = CheckSummary::new("dual-cell-boundary-retraction");
    for d in 1..=base.dim() {
        for sigma in base.simplices_of_dim(d) {
            let cell = dual_cell_in(tower, depth, sigma)?;
            let cell_set: BTreeSet<&Simplex> = cell.iter().collect();
            let onto: Vec<&Simplex> = deep_simplices
                .iter()
                .zip(&carriers)
                .filter(|(s, c)| c.is_face_of(sigma) && &bundle.r().apply(s) == sigma)
                .map(|(s, _)| s)
                .collect();
            for tau in &onto {
                if cell_set.contains(tau) {
                    dual.record_pass();
                } else {
                    dual.record_fail(format!(
                        "sigma={sigma}: {tau} maps onto sigma outside the dual cell"
                    ));
                }
            }
            let top_onto = onto.iter().filter(|t| t.dim() == sigma.dim()).count();
            if top_onto == 1 {
                dual.record_pass();
            } else {
                dual.record_fail(format!(
                    "sigma={sigma}: {top_onto} top simplices map onto sigma"
                ));
            }
            // Every dual-cell simplex keeps distance > epsilon from the
            // boundary faces of sigma (exact hull distances).
            let chart = sigma.vertices();
            for tau in &cell {
                let hull: Vec<Vec<f64>> = tau
                    .vertices()
                    .iter()
                    .map(|&v| tower.base_pos(depth, v)?.dense_over(chart))
                    .collect::<Result<_>>()?;
                let mut clear = true;
                for facet in sigma.facets() {
                    let face_hull: Vec<Vec<f64>> = facet
                        .vertices()
                        .iter()
                        .map(|&v| BaryPoint::vertex(v).dense_over(chart))
                        .collect::<Result<_>>()?;
                    if geometry::hull_dist(&hull, &face_hull) <= eps {
                        clear = false;
                        dual.record_fail(format!(
                            "sigma={sigma}: dual-cell simplex {tau} within eps of facet {facet}"
                        ));
                        break;
                    }
                }
                if clear {
                    dual.record_pass();
                }
            }
        }
    }
    report.push(dual);

    // --- Check: deterministic rebuild. ---
    let mut determinism = CheckSummary::new("deterministic-rebuild");
    let rebuilt = build_retraction(
        base.clone(),
        eps,
        Some(depth),
        bundle.budget,
        bundle.mode,
    )?;
    let same_stages = rebuilt
        .stages()
        .iter()
        .zip(bundle.stages())
        .all(|(a, b)| a.vertex_images() == b.vertex_images());
    if same_stages && rebuilt.r().vertex_images() == bundle.r().vertex_images() {
        determinism.record_pass();
    } else {
        determinism.record_fail("rebuild produced different stage assignments");
    }
    report.push(determinism);

    report.samples = samples_used;
    Ok(report)
}

/// Affine push of a level point through a simplicial map (no realization).
fn push_map(map: &SimplicialMap, p: &BaryPoint) -> BaryPoint {
    let images = map.vertex_images();
    let terms: Vec<(f64, BaryPoint)> = p
        .support()
        .iter()
        .zip(p.coords())
        .map(|(v, &c)| (c, BaryPoint::vertex(images[v])))
        .collect();
    let refs: Vec<(f64, &BaryPoint)> = terms.iter().map(|(c, q)| (*c, q)).collect();
    BaryPoint::combine(&refs)
}

/// Exact chart distance from a point to the boundary of a simplex whose
/// vertex set contains the point's support.
fn boundary_dist(p: &BaryPoint, sigma: &Simplex) -> Result<f64> {
    let chart = sigma.vertices();
    let dense = p.dense_over(chart)?;
    let mut best = f64::INFINITY;
    for facet in sigma.facets() {
        let mask: Vec<bool> = chart.iter().map(|v| facet.contains_vertex(*v)).collect();
        best = best.min(geometry::dist_to_coordinate_face(&dense, &mask));
    }
    Ok(best)
}

/// The closed dual cell of a base simplex inside its own subdivided copy at
/// the given level: deep simplices all of whose vertex labels contain the
/// barycentre of sigma, restricted to carriers inside sigma.
pub fn dual_cell_in(
    tower: &SubdivisionTower,
    level: usize,
    sigma: &Simplex,
) -> Result<Vec<Simplex>> {
    let raw = if level == 1 {
        tower.dual_cell(1, sigma)?
    } else {
        let hat = tower.barycentre_id(1, sigma)?;
        tower.dual_cell(level, &Simplex::vertex(hat))?
    };
    let mut out = Vec::new();
    for s in raw {
        if tower.carrier(level, &s, 0)?.is_face_of(sigma) {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn tower_of(base: SimplicialComplex, depth: usize) -> SubdivisionTower {
        let mut t = SubdivisionTower::new(Arc::new(base));
        t.ensure_depth(depth).unwrap();
        t
    }

    #[test]
    fn first_stage_drops_barycentres_to_smallest_vertex() {
        let t = tower_of(SimplicialComplex::standard(2), 1);
        let r1 = build_r1(&t).unwrap();
        let expect: BTreeMap<u32, u32> =
            BTreeMap::from([(0, 0), (1, 1), (2, 2), (3, 0), (4, 0), (5, 1), (6, 0)]);
        assert_eq!(r1.vertex_images(), &expect);
    }

    #[test]
    fn first_stage_with_custom_choice() {
        let t = tower_of(SimplicialComplex::standard(1), 1);
        let r1 = build_r1_with(&t, |s| *s.vertices().last().unwrap()).unwrap();
        assert_eq!(r1.vertex_images()[&2], 1);
        // A non-vertex choice is refused.
        assert!(build_r1_with(&t, |_| 99).is_err());
    }

    #[test]
    fn second_stage_on_twice_subdivided_segment() {
        let t = tower_of(SimplicialComplex::standard(1), 2);
        let r2 = build_rj(&t, 2).unwrap();
        let expect: BTreeMap<u32, u32> =
            BTreeMap::from([(0, 0), (1, 1), (2, 2), (3, 0), (4, 1)]);
        assert_eq!(r2.vertex_images(), &expect);
        let r1 = build_r1(&t).unwrap();
        let r = SimplicialMap::compose(&r1, &r2).unwrap();
        let expect_r: BTreeMap<u32, u32> =
            BTreeMap::from([(0, 0), (1, 1), (2, 0), (3, 0), (4, 1)]);
        assert_eq!(r.vertex_images(), &expect_r);
    }

    #[test]
    fn second_stage_on_triangle_respects_flag_faces() {
        // First-level ids on the triangle: 3 = (0 1)^, 4 = (0 2)^, 5 = (1 2)^,
        // 6 = centre. Barycentres of the spokes move to the spoke's outer end.
        let t = tower_of(SimplicialComplex::standard(2), 2);
        let r2 = build_rj(&t, 2).unwrap();
        let spoke_04_06 = t.barycentre_id(2, &simplex(&[4, 6])).unwrap();
        assert_eq!(r2.vertex_images()[&spoke_04_06], 4);
        let spoke_03_06 = t.barycentre_id(2, &simplex(&[3, 6])).unwrap();
        assert_eq!(r2.vertex_images()[&spoke_03_06], 3);
        let spoke_05_06 = t.barycentre_id(2, &simplex(&[5, 6])).unwrap();
        assert_eq!(r2.vertex_images()[&spoke_05_06], 5);
        // Half-edge (0, (01)^): nearest to the face {0} is the endpoint 0.
        let half = t.barycentre_id(2, &simplex(&[0, 3])).unwrap();
        assert_eq!(r2.vertex_images()[&half], 0);
    }

    #[test]
    fn depth_on_segment_matches_hand_computation() {
        let mut t = SubdivisionTower::new(Arc::new(SimplicialComplex::standard(1)));
        assert_eq!(subdivision_depth(&mut t, 0.2).unwrap(), 2);
        // Tiny epsilon still needs two subdivisions: one halving only ties
        // the comesh, it does not beat it.
        let mut t = SubdivisionTower::new(Arc::new(SimplicialComplex::standard(1)));
        assert_eq!(subdivision_depth(&mut t, 1e-9).unwrap(), 2);
    }

    #[test]
    fn epsilon_bounds_are_enforced() {
        let mut t = SubdivisionTower::new(Arc::new(SimplicialComplex::standard(1)));
        assert!(matches!(
            subdivision_depth(&mut t, 0.8),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert!(matches!(
            subdivision_depth(&mut t, 0.0),
            Err(Error::EpsilonOutOfRange { .. })
        ));
    }

    #[test]
    fn depth_bound_dominates_measured_depth() {
        let comesh = std::f64::consts::FRAC_1_SQRT_2;
        let target = comesh - 0.2;
        assert!(depth_bound(1, std::f64::consts::SQRT_2, target) >= 2);
        assert_eq!(depth_bound(1, 0.1, 0.5), 0);
        assert_eq!(depth_bound(0, 1.0, 0.5), 0);
    }

    #[test]
    fn shallow_request_is_refused() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let r = build_retraction(base, 0.2, Some(1), DEFAULT_BUDGET, ExecMode::Sequential);
        assert!(matches!(
            r,
            Err(Error::DepthTooShallow {
                requested: 1,
                required: 2
            })
        ));
    }

    #[test]
    fn zero_dimensional_base_gets_identity_bundle() {
        let base = Arc::new(SimplicialComplex::from_maximal(&[simplex(&[0]), simplex(&[7])]).unwrap());
        let b = build_retraction(base, 0.5, None, DEFAULT_BUDGET, ExecMode::Sequential).unwrap();
        assert_eq!(b.depth(), 0);
        assert!(b.r().is_identity_assignment());
        let x = BaryPoint::vertex(7);
        assert_eq!(b.homotopy().eval(&x, 0.7).unwrap().support(), &[7]);
        let report = verify_retraction(&b, &VerifyOptions::default()).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn homotopy_starts_at_identity_and_ends_at_retraction() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let b =
            build_retraction(base, 0.2, None, DEFAULT_BUDGET, ExecMode::Sequential).unwrap();
        assert_eq!(b.depth(), 2);
        let x = BaryPoint::new(vec![0, 1], vec![0.3, 0.7]).unwrap();
        let y0 = b.homotopy().eval(&x, 0.0).unwrap();
        assert!(y0.max_deviation(&x) < 1e-12);
        let y1 = b.homotopy().eval(&x, 1.0).unwrap();
        assert!(y1.max_deviation(&b.retract(&x).unwrap()) < 1e-12);
    }

    #[test]
    fn retraction_of_segment_collapses_left_half() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let b =
            build_retraction(base, 0.2, None, DEFAULT_BUDGET, ExecMode::Sequential).unwrap();
        // r has vertex images {0:0, 1:1, 2:0, 3:0, 4:1}; the PL map sends
        // the whole left half to 0 and stretches [1/2, 3/4] over the edge.
        let left = BaryPoint::new(vec![0, 1], vec![0.6, 0.4]).unwrap();
        assert_eq!(b.retract(&left).unwrap().support(), &[0]);
        let right = BaryPoint::new(vec![0, 1], vec![0.375, 0.625]).unwrap();
        let y = b.retract(&right).unwrap();
        assert!(y.max_deviation(&BaryPoint::new(vec![0, 1], vec![0.5, 0.5]).unwrap()) < 1e-12);
    }

    #[test]
    fn dual_cell_of_segment_matches_hand_enumeration() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let b =
            build_retraction(base, 0.2, None, DEFAULT_BUDGET, ExecMode::Sequential).unwrap();
        let cell = dual_cell_in(b.tower(), 2, &simplex(&[0, 1])).unwrap();
        let expect = vec![
            simplex(&[2]),
            simplex(&[3]),
            simplex(&[4]),
            simplex(&[2, 3]),
            simplex(&[2, 4]),
        ];
        assert_eq!(cell, expect);
    }

    #[test]
    fn verification_passes_on_segment() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let b =
            build_retraction(base, 0.2, None, DEFAULT_BUDGET, ExecMode::Sequential).unwrap();
        let opts = VerifyOptions {
            mode: ExecMode::Sequential,
            ..VerifyOptions::default()
        };
        let report = verify_retraction(&b, &opts).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.samples > 0);
        // All exact sub-checks ran.
        assert!(report.check("face-condition").unwrap().pass > 0);
        assert!(report.check("dual-cell-boundary-retraction").unwrap().pass > 0);
        assert_eq!(report.check("deterministic-rebuild").unwrap().pass, 1);
    }

    #[test]
    fn verification_report_is_reproducible() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let opts = VerifyOptions {
            mode: ExecMode::Sequential,
            ..VerifyOptions::default()
        };
        let mut texts = Vec::new();
        for _ in 0..2 {
            let b = build_retraction(
                base.clone(),
                0.2,
                None,
                DEFAULT_BUDGET,
                ExecMode::Sequential,
            )
            .unwrap();
            texts.push(verify_retraction(&b, &opts).unwrap().to_string());
        }
        assert_eq!(texts[0], texts[1]);
    }

    #[test]
    fn boundary_distance_in_triangle() {
        let p = BaryPoint::new(vec![0, 1, 2], vec![1.0 / 3.0; 3]).unwrap();
        let d = boundary_dist(&p, &simplex(&[0, 1, 2])).unwrap();
        assert!((d - 1.0 / 6.0f64.sqrt()).abs() < 1e-12);
    }
}
