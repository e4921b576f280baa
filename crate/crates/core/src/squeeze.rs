//! Squeezing pipeline: turn a metrically controlled homotopy equivalence
//! into a triangular one, with a combinatorial certificate.
//!
//! Given simplicial maps `f: Sd^a X -> Y` and `g: Sd^b Y -> X` together with
//! homotopies `h1: f g ~ id_Y` and `h2: g f ~ id_X` whose tracks stay close
//! to the simplices they start in, [`squeeze`] composes both maps with the
//! canonical retractions of deeper subdivisions and assembles explicit
//! piecewise-linear homotopies witnessing that the composites
//! `f_tri = r_Y o Sd^i f` and `g_tri = r_X o Sd^i g` form a triangular
//! homotopy equivalence: `f_tri` carries simplices into simplices of `Y`,
//! `g_tri` is controlled by `f_tri`, and every homotopy track stays inside
//! the carrier assigned to its starting simplex.
//!
//! All quantitative admission decisions are made from measured mesh and
//! comesh data ([`squeeze_constants`]); the produced equivalence is then
//! certified by exact simplex-by-simplex containment checks plus seeded
//! sampling of the homotopy tracks, never by the admission arithmetic alone.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::geometry;
use crate::homotopy::{HomotopyChain, PlEval, Segment};
use crate::metric::{
    close_subcomplex, comesh, diam_measured, mesh, rad_measured, BaryPoint, Containment,
    MeasuredComplex, MetricContext,
};
use crate::report::{CheckSummary, VerificationReport};
use crate::retraction::{build_retraction, fmt_point, strided, subdivision_depth, RetractionBundle};
use crate::sample::{sample_points, time_grid, SampleSpec};
use crate::subdivision::{subdivide_map, Space, SubdivisionTower, DEFAULT_BUDGET};

/// Tolerance for exact endpoint identities of assembled homotopies.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Projection constants `(k, K)` for a surjection onto a simplex.
///
/// For a simplicial surjection `f` from the closure of `sigma` onto the
/// closure of `tau` and any proper face `rho` of `tau`, the preimage
/// `f^{-1}(rho)` is sandwiched between neighbourhood preimages:
/// `k = diam(tau) / (2 rad(sigma))` scales inner inclusions and
/// `K = 2 rad(tau) / diam(sigma)` scales outer ones (see
/// [`verify_sandwich`] for the sampled statement).
pub fn lemma_constants(sigma: &Simplex, tau: &Simplex) -> Result<(f64, f64)> {
    if sigma.dim() == 0 || tau.dim() == 0 {
        return Err(Error::Degenerate(format!(
            "projection constants need positive-dimensional simplices, got dims {} and {}",
            sigma.dim(),
            tau.dim()
        )));
    }
    let cs = SimplicialComplex::from_maximal(std::slice::from_ref(sigma))?;
    let ct = SimplicialComplex::from_maximal(std::slice::from_ref(tau))?;
    let ms = MeasuredComplex::IdentityOn(&cs);
    let mt = MeasuredComplex::IdentityOn(&ct);
    let k = diam_measured(&mt, tau)? / (2.0 * rad_measured(&ms, sigma)?);
    let cap_k = 2.0 * rad_measured(&mt, tau)? / diam_measured(&ms, sigma)?;
    Ok((k, cap_k))
}

/// Cross-check [`lemma_constants`] against the mesh/comesh route.
///
/// On single-simplex closures the mesh equals the top diameter and the
/// comesh equals the top inradius, so both derivations must agree exactly.
/// Disagreements are reported as failures, never patched over.
pub fn corollary_cross_check(sigma: &Simplex, tau: &Simplex) -> Result<CheckSummary> {
    let (k, cap_k) = lemma_constants(sigma, tau)?;
    let cs = SimplicialComplex::from_maximal(std::slice::from_ref(sigma))?;
    let ct = SimplicialComplex::from_maximal(std::slice::from_ref(tau))?;
    let ms = MeasuredComplex::IdentityOn(&cs);
    let mt = MeasuredComplex::IdentityOn(&ct);
    let mode = ExecMode::Sequential;
    let k2 = mesh(&mt, mode)? / (2.0 * comesh(&ms, mode)?);
    let cap_k2 = 2.0 * comesh(&mt, mode)? / mesh(&ms, mode)?;
    let mut summary = CheckSummary::new("lemma-corollary-agreement")
        .with_note(format!("k={k:.12} K={cap_k:.12}"));
    for (name, a, b) in [("k", k, k2), ("K", cap_k, cap_k2)] {
        if (a - b).abs() <= 1e-12 {
            summary.record_pass();
        } else {
            summary.record_fail(format!("{name}: simplexwise {a:.15} vs mesh-route {b:.15}"));
        }
    }
    Ok(summary)
}

/// The reference against which a simplicial map is tested for triangularity.
pub enum TriControl<'a> {
    /// The map controls itself: every image must lie in its own image closure.
    SelfMap,
    /// Another simplicial map on the same domain supplies the carriers.
    Map(&'a SimplicialMap),
    /// Carriers in the base of a subdivision space over the codomain.
    Carrier(&'a Space),
}

/// Exact per-simplex triangularity check: `map(s)` must be a face of the
/// control's image of `s` for every simplex `s` of the domain.
pub fn is_triangular(map: &SimplicialMap, control: &TriControl<'_>) -> Result<CheckSummary> {
    let (note, control_of): (&str, Box<dyn Fn(&Simplex) -> Result<Simplex>>) = match control {
        TriControl::SelfMap => ("control: the map itself", Box::new(|s| Ok(map.apply(s)))),
        TriControl::Map(m) => {
            if m.domain().as_ref() != map.domain().as_ref() {
                return Err(Error::DomainMismatch(
                    "triangularity control map must share the domain".into(),
                ));
            }
            ("control: companion map", Box::new(|s| Ok(m.apply(s))))
        }
        TriControl::Carrier(space) => {
            if space.complex().as_ref() != map.domain().as_ref() {
                return Err(Error::DomainMismatch(
                    "carrier control must subdivide the map's domain".into(),
                ));
            }
            if space.base().as_ref() != map.codomain().as_ref() {
                return Err(Error::DomainMismatch(
                    "carrier control must live over the map's codomain".into(),
                ));
            }
            (
                "control: base carriers",
                Box::new(move |s| space.carrier_in_base(s)),
            )
        }
    };
    let mut summary = CheckSummary::new("triangular").with_note(note);
    for s in map.domain().simplices() {
        let image = map.apply(s);
        let bound = control_of(s)?;
        if image.is_face_of(&bound) {
            summary.record_pass();
        } else {
            summary.record_fail(format!("s={s} image={image} control={bound}"));
        }
    }
    Ok(summary)
}

/// Options for [`verify_sandwich`].
#[derive(Clone, Debug)]
pub struct SandwichOptions {
    /// Sampling density per simplex.
    pub samples: SampleSpec,
    /// Half-width of the indeterminate band around each threshold.
    pub margin: f64,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        SandwichOptions {
            samples: SampleSpec::new(6, 100, 0),
            margin: 1e-9,
        }
    }
}

/// Sampled verification of the preimage sandwich for a simplicial surjection.
///
/// `fmap` must send the closure of a single maximal simplex `sigma` onto the
/// closure of a single maximal simplex `tau`, and `rho` must be a proper face
/// of `tau`. With `(k, K)` from [`lemma_constants`], the two inclusions
/// tested on sampled points `x` of `sigma` are
///
/// * outer: `d(f(x), rho) <= K eps` implies `d(x, f^{-1}(rho)) <= eps`, and
/// * inner: `d(x, f^{-1}(rho)) <= eps` implies `d(f(x), rho) <= k eps`,
///
/// where `f^{-1}(rho)` is the exact vertex-preimage face of `sigma`. Points
/// whose hypothesis lands within `margin` of its threshold while the
/// conclusion fails are recorded as unknown rather than failed.
pub fn verify_sandwich(
    fmap: &SimplicialMap,
    rho: &Simplex,
    eps: f64,
    opts: &SandwichOptions,
) -> Result<VerificationReport> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::PreconditionFailed(format!(
            "sandwich radius must be a nonnegative finite number, got {eps}"
        )));
    }
    let single_maximal = |c: &SimplicialComplex, side: &str| -> Result<Simplex> {
        let maximal = c.maximal_simplices();
        match &maximal[..] {
            [top] if top.dim() >= 1 => Ok(top.clone()),
            _ => Err(Error::PreconditionFailed(format!(
                "sandwich {side} must be the closure of one positive-dimensional simplex"
            ))),
        }
    };
    let sigma = single_maximal(fmap.domain(), "domain")?;
    let tau = single_maximal(fmap.codomain(), "codomain")?;
    let image: BTreeSet<u32> = sigma
        .vertices()
        .iter()
        .map(|&v| fmap.image_of_vertex(v))
        .collect();
    let image_sorted: Vec<u32> = image.iter().copied().collect();
    if image_sorted.as_slice() != tau.vertices() {
        return Err(Error::PreconditionFailed(format!(
            "sandwich map must be onto the codomain vertices, image {image:?} vs {tau}"
        )));
    }
    if !rho.is_face_of(&tau) || *rho == tau {
        return Err(Error::NotAFace {
            face: rho.to_string(),
            simplex: tau.to_string(),
        });
    }

    let (k, cap_k) = lemma_constants(&sigma, &tau)?;
    let mut report = VerificationReport::new(format!("sandwich rho={rho} eps={eps:.9}"));
    report.push(
        CheckSummary::new("constants")
            .with_note(format!("k={k:.12} K={cap_k:.12}")),
    );

    // Exact join decomposition: the vertex preimage of rho and its
    // complement partition sigma and map onto rho and tau \ rho.
    let pre: Vec<u32> = sigma
        .vertices()
        .iter()
        .copied()
        .filter(|&v| rho.contains_vertex(fmap.image_of_vertex(v)))
        .collect();
    let mut decomposition = CheckSummary::new("join-decomposition");
    let pre_image: BTreeSet<u32> = pre.iter().map(|&v| fmap.image_of_vertex(v)).collect();
    let rho_set: BTreeSet<u32> = rho.vertices().iter().copied().collect();
    if pre_image == rho_set {
        decomposition.record_pass();
    } else {
        decomposition.record_fail(format!(
            "preimage vertices map onto {pre_image:?}, expected {rho_set:?}"
        ));
    }
    let complement: Vec<u32> = sigma
        .vertices()
        .iter()
        .copied()
        .filter(|v| !pre.contains(v))
        .collect();
    let comp_image: BTreeSet<u32> = complement.iter().map(|&v| fmap.image_of_vertex(v)).collect();
    let opposite: BTreeSet<u32> = tau
        .vertices()
        .iter()
        .copied()
        .filter(|v| !rho.contains_vertex(*v))
        .collect();
    if comp_image == opposite {
        decomposition.record_pass();
    } else {
        decomposition.record_fail(format!(
            "complement vertices map onto {comp_image:?}, expected {opposite:?}"
        ));
    }
    report.push(decomposition);

    // Coordinate masks over the two charts.
    let pre_mask: Vec<bool> = sigma
        .vertices()
        .iter()
        .map(|v| pre.contains(v))
        .collect();
    let rho_mask: Vec<bool> = tau
        .vertices()
        .iter()
        .map(|v| rho.contains_vertex(*v))
        .collect();
    let image_index: Vec<usize> = sigma
        .vertices()
        .iter()
        .map(|&v| {
            let w = fmap.image_of_vertex(v);
            tau.vertices().iter().position(|&u| u == w).expect("onto")
        })
        .collect();

    let mut outer = CheckSummary::new("outer-inclusion")
        .with_note(format!("d(f(x), rho) <= {:.9} forces d(x, preimage) <= {eps:.9}", cap_k * eps));
    let mut inner = CheckSummary::new("inner-inclusion")
        .with_note(format!("d(x, preimage) <= {eps:.9} forces d(f(x), rho) <= {:.9}", k * eps));
    let pts = sample_points(&sigma, &opts.samples, "sandwich");
    report.samples += pts.len() as u64;
    for x in &pts {
        let xd = x.dense_over(sigma.vertices())?;
        let mut fxd = vec![0.0f64; tau.vertices().len()];
        for (j, &c) in xd.iter().enumerate() {
            fxd[image_index[j]] += c;
        }
        let d_pre = geometry::dist_to_coordinate_face(&xd, &pre_mask);
        let d_rho = geometry::dist_to_coordinate_face(&fxd, &rho_mask);
        let witness = || {
            format!(
                "x={} d_pre={d_pre:.9} d_rho={d_rho:.9}",
                fmt_point(x)
            )
        };
        record_implication(&mut outer, d_rho, cap_k * eps, d_pre, eps, opts.margin, witness());
        record_implication(&mut inner, d_pre, eps, d_rho, k * eps, opts.margin, witness());
    }
    report.push(outer);
    report.push(inner);
    Ok(report)
}

/// Classify one sampled implication `hyp <= hb  =>  concl <= cb`.
fn record_implication(
    summary: &mut CheckSummary,
    hyp: f64,
    hyp_bound: f64,
    concl: f64,
    concl_bound: f64,
    margin: f64,
    witness: String,
) {
    if hyp > hyp_bound + margin {
        // Hypothesis clearly fails: the implication holds vacuously.
        summary.record_pass();
    } else if concl <= concl_bound + margin {
        summary.record_pass();
    } else if hyp > hyp_bound - margin {
        // Hypothesis sits inside the indeterminate band.
        summary.record_unknown();
    } else {
        summary.record_fail(witness);
    }
}

/// Quantities controlling one squeeze: measured sizes, projection constants,
/// the admissible control bound, and the subdivision depth to be used.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SqueezeConstants {
    /// Mesh of the domain side, measured in its control chart.
    pub mesh_x: f64,
    /// Comesh of the domain side.
    pub comesh_x: f64,
    /// Mesh of the codomain side.
    pub mesh_y: f64,
    /// Comesh of the codomain side.
    pub comesh_y: f64,
    /// Inner projection constant `k = mesh_y / (2 comesh_x)`.
    pub k: f64,
    /// Outer projection constant `K = 2 comesh_y / mesh_x`.
    pub cap_k: f64,
    /// Largest admissible control bound `min(k comesh_x, k comesh_y / K)`.
    pub eps_xy: f64,
    /// The control bound this squeeze was admitted at.
    pub eps: f64,
    /// Common subdivision depth for both retractions.
    pub depth: usize,
}

impl fmt::Display for SqueezeConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={:.9} K={:.9} eps_xy={:.9} eps={:.9} depth={} \
             (mesh_x={:.9} comesh_x={:.9} mesh_y={:.9} comesh_y={:.9})",
            self.k,
            self.cap_k,
            self.eps_xy,
            self.eps,
            self.depth,
            self.mesh_x,
            self.comesh_x,
            self.mesh_y,
            self.comesh_y,
        )
    }
}

/// Derive the squeeze constants for measured domain and codomain sides.
///
/// `eps` must satisfy `0 < eps < eps_xy`; the returned depth is the smallest
/// level at which both canonical retractions exist at tolerance `eps / k`
/// on the domain side and `K eps / k` on the codomain side.
pub fn squeeze_constants(
    x: &MeasuredComplex<'_>,
    y: &MeasuredComplex<'_>,
    eps: f64,
    mode: ExecMode,
) -> Result<SqueezeConstants> {
    let mesh_x = mesh(x, mode)?;
    let comesh_x = comesh(x, mode)?;
    let mesh_y = mesh(y, mode)?;
    let comesh_y = comesh(y, mode)?;
    let k = mesh_y / (2.0 * comesh_x);
    let cap_k = 2.0 * comesh_y / mesh_x;
    let eps_xy = (k * comesh_x).min(k * comesh_y / cap_k);
    if !(eps > 0.0 && eps < eps_xy) {
        return Err(Error::EpsilonOutOfRange { eps, max: eps_xy });
    }
    let depth_for = |c: &SimplicialComplex, tol: f64| -> Result<usize> {
        let mut tower = SubdivisionTower::new(Arc::new(c.clone()));
        tower.set_mode(mode);
        subdivision_depth(&mut tower, tol)
    };
    let depth = depth_for(x.complex(), eps / k)?.max(depth_for(y.complex(), cap_k * eps / k)?);
    Ok(SqueezeConstants {
        mesh_x,
        comesh_x,
        mesh_y,
        comesh_y,
        k,
        cap_k,
        eps_xy,
        eps,
        depth,
    })
}

/// A claimed controlled homotopy equivalence between two complexes.
///
/// `f: Sd^{f_level} x_base -> y_base` and `g: Sd^{g_level} y_base -> x_base`
/// are simplicial; `h1: f g ~ id` runs in `y_base`, `h2: g f ~ id` in
/// `x_base` (time 0 at the composite, time 1 at the identity); and
/// `epsilon_claimed` bounds how far every composite and homotopy track may
/// stray from the simplex it starts in, measured in the codomain chart.
pub struct EquivalenceData {
    x_base: Arc<SimplicialComplex>,
    y_base: Arc<SimplicialComplex>,
    f: SimplicialMap,
    f_level: usize,
    g: SimplicialMap,
    g_level: usize,
    h1: HomotopyChain,
    h2: HomotopyChain,
    epsilon_claimed: f64,
}

impl EquivalenceData {
    /// Validate and assemble the data of a claimed controlled equivalence.
    ///
    /// Checks the simplicial domains and codomains (the level domains are
    /// compared against freshly built subdivisions), that every homotopy
    /// segment lives over the right base, and that the homotopy endpoints
    /// agree with the composites and identities at all domain vertices to
    /// within [`ENDPOINT_TOL`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_base: Arc<SimplicialComplex>,
        y_base: Arc<SimplicialComplex>,
        f: SimplicialMap,
        f_level: usize,
        g: SimplicialMap,
        g_level: usize,
        h1: HomotopyChain,
        h2: HomotopyChain,
        epsilon_claimed: f64,
    ) -> Result<Self> {
        if !(epsilon_claimed > 0.0 && epsilon_claimed.is_finite()) {
            return Err(Error::PreconditionFailed(format!(
                "claimed control must be a positive finite number, got {epsilon_claimed}"
            )));
        }
        if f.codomain().as_ref() != y_base.as_ref() {
            return Err(Error::DomainMismatch(
                "f must land in the codomain base".into(),
            ));
        }
        if g.codomain().as_ref() != x_base.as_ref() {
            return Err(Error::DomainMismatch(
                "g must land in the domain base".into(),
            ));
        }
        let check_level_domain = |map: &SimplicialMap,
                                  base: &Arc<SimplicialComplex>,
                                  level: usize,
                                  name: &str|
         -> Result<()> {
            let mut tower = SubdivisionTower::new(base.clone());
            tower.ensure_depth(level)?;
            if map.domain().as_ref() != tower.complex(level)?.as_ref() {
                return Err(Error::DomainMismatch(format!(
                    "{name} must be defined on subdivision level {level} of its base"
                )));
            }
            Ok(())
        };
        check_level_domain(&f, &x_base, f_level, "f")?;
        check_level_domain(&g, &y_base, g_level, "g")?;
        for (chain, base, name) in [(&h1, &y_base, "h1"), (&h2, &x_base, "h2")] {
            for seg in chain.segments() {
                if seg.chart.as_ref() != base.as_ref() || seg.domain.base().as_ref() != base.as_ref()
                {
                    return Err(Error::DomainMismatch(format!(
                        "every {name} segment must run over the matching base complex"
                    )));
                }
            }
        }

        // Endpoint agreement at the vertices of each homotopy's own domain.
        let mut tx = SubdivisionTower::new(x_base.clone());
        tx.ensure_depth(f_level)?;
        let tx = Arc::new(tx);
        let mut ty = SubdivisionTower::new(y_base.clone());
        ty.ensure_depth(g_level)?;
        let ty = Arc::new(ty);
        let f_eval = PlEval::affine(
            Space::new(tx.clone(), f_level)?,
            f.clone(),
            Space::base_space(y_base.clone()),
        )?;
        let g_eval = PlEval::affine(
            Space::new(ty.clone(), g_level)?,
            g.clone(),
            Space::base_space(x_base.clone()),
        )?;
        let check_ends = |chain: &HomotopyChain,
                          composite: &dyn Fn(&BaryPoint) -> Result<BaryPoint>,
                          name: &str|
         -> Result<()> {
            let domain = chain.segments()[0].domain.clone();
            for v in domain.complex().vertex_ids() {
                let p = domain.vertex_pos(v)?.clone();
                let start = chain.eval(&p, 0.0)?;
                let target = composite(&p)?;
                let dev0 = start.max_deviation(&target);
                let end = chain.eval(&p, 1.0)?;
                let dev1 = end.max_deviation(&p);
                if dev0 > ENDPOINT_TOL || dev1 > ENDPOINT_TOL {
                    return Err(Error::PreconditionFailed(format!(
                        "{name} endpoints disagree at vertex {v}: \
                         composite deviation {dev0:.3e}, identity deviation {dev1:.3e}"
                    )));
                }
            }
            Ok(())
        };
        check_ends(
            &h1,
            &|p| f_eval.eval(&g_eval.eval(p)?),
            "h1",
        )?;
        check_ends(
            &h2,
            &|p| g_eval.eval(&f_eval.eval(p)?),
            "h2",
        )?;

        Ok(EquivalenceData {
            x_base,
            y_base,
            f,
            f_level,
            g,
            g_level,
            h1,
            h2,
            epsilon_claimed,
        })
    }

    /// Base complex of the domain side.
    pub fn x_base(&self) -> &Arc<SimplicialComplex> {
        &self.x_base
    }

    /// Base complex of the codomain side.
    pub fn y_base(&self) -> &Arc<SimplicialComplex> {
        &self.y_base
    }

    /// The forward map.
    pub fn f(&self) -> &SimplicialMap {
        &self.f
    }

    /// Subdivision level of the forward map's domain.
    pub fn f_level(&self) -> usize {
        self.f_level
    }

    /// The backward map.
    pub fn g(&self) -> &SimplicialMap {
        &self.g
    }

    /// Subdivision level of the backward map's domain.
    pub fn g_level(&self) -> usize {
        self.g_level
    }

    /// Homotopy from `f g` to the identity of the codomain.
    pub fn h1(&self) -> &HomotopyChain {
        &self.h1
    }

    /// Homotopy from `g f` to the identity of the domain.
    pub fn h2(&self) -> &HomotopyChain {
        &self.h2
    }

    /// The claimed control bound.
    pub fn epsilon_claimed(&self) -> f64 {
        self.epsilon_claimed
    }
}

/// The identity equivalence of a complex with itself at a claimed control.
pub fn identity_equivalence(c: Arc<SimplicialComplex>, eps: f64) -> Result<EquivalenceData> {
    let id = SimplicialMap::identity(c.clone());
    let constant = HomotopyChain::constant(
        PlEval::Identity,
        Space::base_space(c.clone()),
        c.clone(),
    )?;
    EquivalenceData::new(
        c.clone(),
        c,
        id.clone(),
        0,
        id,
        0,
        constant.clone(),
        constant,
        eps,
    )
}

/// Options for [`squeeze`] and [`verify_triangular_equivalence`].
#[derive(Clone, Debug)]
pub struct SqueezeOptions {
    /// Sampling density per simplex for control gates and track checks.
    pub samples: SampleSpec,
    /// Time steps per homotopy segment.
    pub time_steps: usize,
    /// Cap on the number of simplices sampled per track check.
    pub simplex_cap: usize,
    /// Point budget for each endpoint-identity check.
    pub endpoint_samples: usize,
    /// Metric slack accepted before a track sample counts as escaping.
    pub margin: f64,
    /// Simplex budget for subdivision towers.
    pub budget: u64,
    /// Execution mode for measurement and certification.
    pub mode: ExecMode,
}

impl Default for SqueezeOptions {
    fn default() -> Self {
        SqueezeOptions {
            samples: SampleSpec::new(6, 100, 0),
            time_steps: 8,
            simplex_cap: 512,
            endpoint_samples: 1000,
            margin: 1e-7,
            budget: DEFAULT_BUDGET,
            mode: ExecMode::default(),
        }
    }
}

/// A triangular homotopy equivalence produced by [`squeeze`], together with
/// everything needed to re-certify it.
pub struct TriangularEquivalence {
    constants: SqueezeConstants,
    x_space: Space,
    y_space: Space,
    f: SimplicialMap,
    f_level: usize,
    g: SimplicialMap,
    g_level: usize,
    f_tri: SimplicialMap,
    g_tri: SimplicialMap,
    f_eval: PlEval,
    g_eval: PlEval,
    f_tri_eval: PlEval,
    g_tri_eval: PlEval,
    h_y: HomotopyChain,
    h_x: HomotopyChain,
    connect_f: HomotopyChain,
    connect_g: HomotopyChain,
    bundle_x: RetractionBundle,
    bundle_y: RetractionBundle,
    admission: Vec<CheckSummary>,
    certificate: VerificationReport,
}

impl TriangularEquivalence {
    /// The constants the squeeze was admitted at.
    pub fn constants(&self) -> &SqueezeConstants {
        &self.constants
    }

    /// Deep domain space: level `f_level + depth` over the domain base.
    pub fn x_space(&self) -> &Space {
        &self.x_space
    }

    /// Deep codomain space: level `g_level + depth` over the codomain base.
    pub fn y_space(&self) -> &Space {
        &self.y_space
    }

    /// The original forward map.
    pub fn f(&self) -> &SimplicialMap {
        &self.f
    }

    /// Subdivision level of the original forward map's domain.
    pub fn f_level(&self) -> usize {
        self.f_level
    }

    /// The original backward map.
    pub fn g(&self) -> &SimplicialMap {
        &self.g
    }

    /// Subdivision level of the original backward map's domain.
    pub fn g_level(&self) -> usize {
        self.g_level
    }

    /// The triangular forward map `r_Y o Sd^depth f`.
    pub fn f_tri(&self) -> &SimplicialMap {
        &self.f_tri
    }

    /// The controlled backward map `r_X o Sd^depth g`.
    pub fn g_tri(&self) -> &SimplicialMap {
        &self.g_tri
    }

    /// Piecewise-linear evaluation of the triangular forward map.
    pub fn f_tri_eval(&self) -> &PlEval {
        &self.f_tri_eval
    }

    /// Piecewise-linear evaluation of the controlled backward map.
    pub fn g_tri_eval(&self) -> &PlEval {
        &self.g_tri_eval
    }

    /// Homotopy from `f_tri g_tri` to the identity of the codomain base.
    pub fn h_y(&self) -> &HomotopyChain {
        &self.h_y
    }

    /// Homotopy from `g_tri f_tri` to the identity of the domain base.
    pub fn h_x(&self) -> &HomotopyChain {
        &self.h_x
    }

    /// Homotopy connecting the original forward map to `f_tri`.
    pub fn connect_f(&self) -> &HomotopyChain {
        &self.connect_f
    }

    /// Homotopy connecting the original backward map to `g_tri`.
    pub fn connect_g(&self) -> &HomotopyChain {
        &self.connect_g
    }

    /// Retraction bundle on the domain side.
    pub fn bundle_x(&self) -> &RetractionBundle {
        &self.bundle_x
    }

    /// Retraction bundle on the codomain side.
    pub fn bundle_y(&self) -> &RetractionBundle {
        &self.bundle_y
    }

    /// Admission-time control gate summaries.
    pub fn admission(&self) -> &[CheckSummary] {
        &self.admission
    }

    /// The certificate produced when the equivalence was built.
    pub fn certificate(&self) -> &VerificationReport {
        &self.certificate
    }

    /// Whether the build-time certificate passed in full.
    pub fn certified(&self) -> bool {
        self.certificate.passed()
    }
}

/// One sigma-wise control gate: sampled tracks must stay within `bound` of
/// the control simplex assigned to their starting simplex.
struct GateOutcome {
    summary: CheckSummary,
    samples: u64,
}

#[allow(clippy::too_many_arguments)]
fn sigma_wise_gate(
    name: &str,
    domain: &SimplicialComplex,
    target: &SimplicialComplex,
    ctx: &MetricContext<'_>,
    carrier_of: &(dyn Fn(&Simplex) -> Result<Simplex> + Sync),
    realize: &(dyn Fn(&BaryPoint) -> Result<BaryPoint> + Sync),
    track: &(dyn Fn(&BaryPoint, f64) -> Result<BaryPoint> + Sync),
    anchor: &(dyn Fn(&BaryPoint) -> Result<BaryPoint> + Sync),
    times: &[f64],
    spec: &SampleSpec,
    bound: f64,
    mode: ExecMode,
) -> Result<GateOutcome> {
    let simplices: Vec<&Simplex> = domain.simplices().collect();
    let per_simplex: Vec<Result<(u64, f64, f64, Option<String>)>> =
        exec::map_collect(mode, &simplices, |s| {
            let s: &Simplex = s;
            let carrier = carrier_of(s)?;
            let closed = close_subcomplex(target, std::slice::from_ref(&carrier))?;
            let pts = sample_points(s, spec, name);
            let mut used = 0u64;
            let mut sup = 0.0f64;
            let mut disp = 0.0f64;
            let mut witness: Option<String> = None;
            for p in &pts {
                let base = realize(p)?;
                let anchored = anchor(&base)?;
                for &t in times {
                    let q = track(&base, t)?;
                    used += 1;
                    let d = ctx.dist_to_closed_subcomplex(&q, &closed)?.upper;
                    disp = disp.max(ctx.path_dist(&q, &anchored)?.upper);
                    if d > sup {
                        sup = d;
                        if d > bound {
                            witness = Some(format!(
                                "s={s} carrier={carrier} t={t:.4} point={} dist={d:.9}",
                                fmt_point(&q)
                            ));
                        }
                    }
                }
            }
            Ok((used, sup, disp, witness))
        });
    let mut summary = CheckSummary::new(name);
    let mut samples = 0u64;
    let mut sup = 0.0f64;
    let mut disp = 0.0f64;
    for r in per_simplex {
        let (used, s_sup, s_disp, witness) = r?;
        samples += used;
        sup = sup.max(s_sup);
        disp = disp.max(s_disp);
        match witness {
            Some(w) => summary.record_fail(w),
            None => summary.record_pass(),
        }
    }
    summary = summary.with_note(format!(
        "carrier-distance sup {sup:.9} (bound {bound:.9}); displacement sup {disp:.9}; {samples} track samples"
    ));
    Ok(GateOutcome { summary, samples })
}

/// Squeeze a controlled homotopy equivalence into a triangular one.
///
/// Derives the constants and depth from measured data, gates the claimed
/// control by sampling every composite and homotopy track against its
/// carrier, builds the canonical retractions on both sides at the derived
/// depth, subdivides `f` and `g` down to that depth, and assembles the four
/// explicit homotopies of the output. The returned equivalence carries a
/// certificate combining exact triangularity checks with sampled track and
/// endpoint checks; consult [`TriangularEquivalence::certified`].
pub fn squeeze(data: &EquivalenceData, opts: &SqueezeOptions) -> Result<TriangularEquivalence> {
    let x_base = data.x_base.clone();
    let y_base = data.y_base.clone();

    // Constants and depth, measuring the domain side through its chart at
    // the forward map's level and the codomain side at its own scale.
    let constants = {
        let mut tower = SubdivisionTower::new(x_base.clone());
        tower.set_budget(opts.budget);
        tower.set_mode(opts.mode);
        tower.ensure_depth(data.f_level)?;
        let tower = Arc::new(tower);
        let x_space = Space::new(tower, data.f_level)?;
        squeeze_constants(
            &MeasuredComplex::Subdivision(&x_space),
            &MeasuredComplex::IdentityOn(&y_base),
            data.epsilon_claimed,
            opts.mode,
        )?
    };
    let depth = constants.depth;

    // Towers deep enough for the subdivided maps on both sides.
    let mut txm = SubdivisionTower::new(x_base.clone());
    txm.set_budget(opts.budget);
    txm.set_mode(opts.mode);
    txm.ensure_depth(data.f_level + depth)?;
    let tx = Arc::new(txm);
    let mut tym = SubdivisionTower::new(y_base.clone());
    tym.set_budget(opts.budget);
    tym.set_mode(opts.mode);
    tym.ensure_depth(data.g_level + depth)?;
    let ty = Arc::new(tym);

    let sp_x0 = Space::new(tx.clone(), 0)?;
    let sp_y0 = Space::new(ty.clone(), 0)?;
    let sp_x_f = Space::new(tx.clone(), data.f_level)?;
    let sp_y_g = Space::new(ty.clone(), data.g_level)?;
    let f_eval = PlEval::affine(sp_x_f.clone(), data.f.clone(), sp_y0.clone())?;
    let g_eval = PlEval::affine(sp_y_g.clone(), data.g.clone(), sp_x0.clone())?;

    // Sigma-wise admission gates, all measured in the codomain chart: the
    // composite f g, the track of h1, and the f-image of the track of h2
    // must stay within the claimed control of their starting carriers.
    let measured_y = MeasuredComplex::IdentityOn(y_base.as_ref());
    let ctx_y = MetricContext::new(measured_y, 0);
    let eps = data.epsilon_claimed;
    let identity = |p: &BaryPoint| Ok(p.clone());
    let mut admission: Vec<CheckSummary> = Vec::new();
    let mut gate_samples = 0u64;
    admission.push(
        CheckSummary::new("control-f")
            .with_note("identically zero against its own images"),
    );
    admission.last_mut().expect("just pushed").record_pass();

    let own_carrier = |s: &Simplex| Ok(s.clone());
    let fg_track = |p: &BaryPoint, _t: f64| f_eval.eval(&g_eval.eval(p)?);
    let gate_g = sigma_wise_gate(
        "control-g",
        &y_base,
        &y_base,
        &ctx_y,
        &own_carrier,
        &identity,
        &fg_track,
        &identity,
        &[0.0],
        &opts.samples,
        eps,
        opts.mode,
    )?;
    let h1_times = time_grid(data.h1.segments().len() * opts.time_steps);
    let h1_track = |p: &BaryPoint, t: f64| data.h1.eval(p, t);
    let gate_h1 = sigma_wise_gate(
        "control-h1",
        &y_base,
        &y_base,
        &ctx_y,
        &own_carrier,
        &identity,
        &h1_track,
        &identity,
        &h1_times,
        &opts.samples,
        eps,
        opts.mode,
    )?;
    let h2_times = time_grid(data.h2.segments().len() * opts.time_steps);
    let f_carrier = |s: &Simplex| Ok(data.f.apply(s));
    let f_realize = |p: &BaryPoint| sp_x_f.realize(p);
    let fh2_track = |p: &BaryPoint, t: f64| f_eval.eval(&data.h2.eval(p, t)?);
    let f_anchor = |p: &BaryPoint| f_eval.eval(p);
    let gate_h2 = sigma_wise_gate(
        "control-h2",
        data.f.domain(),
        &y_base,
        &ctx_y,
        &f_carrier,
        &f_realize,
        &fh2_track,
        &f_anchor,
        &h2_times,
        &opts.samples,
        eps,
        opts.mode,
    )?;
    for gate in [gate_g, gate_h1, gate_h2] {
        gate_samples += gate.samples;
        if !gate.summary.passed() {
            let witness = gate
                .summary
                .witnesses
                .first()
                .cloned()
                .unwrap_or_default();
            return Err(Error::PreconditionFailed(format!(
                "{} exceeds the claimed control {eps:.9}: {witness}",
                gate.summary.name
            )));
        }
        admission.push(gate.summary);
    }

    // Canonical retractions at the derived depth on both sides.
    let bundle_x = build_retraction(
        x_base.clone(),
        constants.eps / constants.k,
        Some(depth),
        opts.budget,
        opts.mode,
    )?;
    let bundle_y = build_retraction(
        y_base.clone(),
        constants.cap_k * constants.eps / constants.k,
        Some(depth),
        opts.budget,
        opts.mode,
    )?;

    // Subdivide f and g down to the common depth. The shifted towers start
    // at the maps' own domains; structural equality of subdivision levels
    // lets the results compose with the main towers.
    let mut tf = SubdivisionTower::new(data.f.domain().clone());
    tf.set_budget(opts.budget);
    tf.set_mode(opts.mode);
    tf.ensure_depth(depth)?;
    let mut tg = SubdivisionTower::new(data.g.domain().clone());
    tg.set_budget(opts.budget);
    tg.set_mode(opts.mode);
    tg.ensure_depth(depth)?;
    let mut f_deep = data.f.clone();
    let mut g_deep = data.g.clone();
    for level in 1..=depth {
        f_deep = subdivide_map(&f_deep, &tf, &ty, level)?;
        g_deep = subdivide_map(&g_deep, &tg, &tx, level)?;
    }
    let f_tri = SimplicialMap::compose(bundle_y.r(), &f_deep)?;
    let g_tri = SimplicialMap::compose(bundle_x.r(), &g_deep)?;

    let sp_x_deep = Space::new(tx.clone(), data.f_level + depth)?;
    let sp_y_deep = Space::new(ty.clone(), data.g_level + depth)?;
    let sp_x_i = Space::new(tx.clone(), depth)?;
    let sp_y_i = Space::new(ty.clone(), depth)?;
    let f_i_eval = PlEval::affine(sp_x_deep.clone(), f_deep.clone(), sp_y_i.clone())?;
    let g_i_eval = PlEval::affine(sp_y_deep.clone(), g_deep.clone(), sp_x_i.clone())?;
    let r_x_eval = PlEval::affine(sp_x_i.clone(), bundle_x.r().clone(), sp_x0.clone())?;
    let r_y_eval = PlEval::affine(sp_y_i.clone(), bundle_y.r().clone(), sp_y0.clone())?;
    let f_tri_eval = PlEval::affine(sp_x_deep.clone(), f_tri.clone(), sp_y0.clone())?;
    let g_tri_eval = PlEval::affine(sp_y_deep.clone(), g_tri.clone(), sp_x0.clone())?;

    // Homotopy from f_tri g_tri to the identity of the codomain base:
    // undo the domain-side retraction inside f_tri, exchange the subdivided
    // composite for the original one, run h1, undo the codomain retraction.
    let h_y = HomotopyChain::concat(vec![
        bundle_x
            .homotopy()
            .reversed()
            .precomposed(&g_i_eval, sp_y_deep.clone())?
            .postcomposed(&f_tri_eval),
        HomotopyChain::new(vec![Segment {
            pre: PlEval::Identity,
            a: g_i_eval.then(&f_i_eval),
            b: g_eval.then(&f_eval),
            post: r_y_eval.clone(),
            domain: sp_y_deep.clone(),
            chart: y_base.clone(),
        }])?,
        data.h1.postcomposed(&r_y_eval),
        bundle_y.homotopy().reversed(),
    ])?;

    // Mirrored homotopy from g_tri f_tri to the identity of the domain base.
    let h_x = HomotopyChain::concat(vec![
        bundle_y
            .homotopy()
            .reversed()
            .precomposed(&f_i_eval, sp_x_deep.clone())?
            .postcomposed(&g_tri_eval),
        HomotopyChain::new(vec![Segment {
            pre: PlEval::Identity,
            a: f_i_eval.then(&g_i_eval),
            b: f_eval.then(&g_eval),
            post: r_x_eval.clone(),
            domain: sp_x_deep.clone(),
            chart: x_base.clone(),
        }])?,
        data.h2.postcomposed(&r_x_eval),
        bundle_x.homotopy().reversed(),
    ])?;

    // Connecting homotopies from the original maps to the squeezed ones.
    let connect_f = HomotopyChain::concat(vec![
        bundle_y.homotopy().precomposed(&f_eval, sp_x_deep.clone())?,
        HomotopyChain::new(vec![Segment {
            pre: PlEval::Identity,
            a: f_eval.clone(),
            b: f_i_eval.clone(),
            post: r_y_eval.clone(),
            domain: sp_x_deep.clone(),
            chart: y_base.clone(),
        }])?,
    ])?;
    let connect_g = HomotopyChain::concat(vec![
        bundle_x.homotopy().precomposed(&g_eval, sp_y_deep.clone())?,
        HomotopyChain::new(vec![Segment {
            pre: PlEval::Identity,
            a: g_eval.clone(),
            b: g_i_eval.clone(),
            post: r_x_eval.clone(),
            domain: sp_y_deep.clone(),
            chart: x_base.clone(),
        }])?,
    ])?;

    let mut result = TriangularEquivalence {
        constants,
        x_space: sp_x_deep,
        y_space: sp_y_deep,
        f: data.f.clone(),
        f_level: data.f_level,
        g: data.g.clone(),
        g_level: data.g_level,
        f_tri,
        g_tri,
        f_eval,
        g_eval,
        f_tri_eval,
        g_tri_eval,
        h_y,
        h_x,
        connect_f,
        connect_g,
        bundle_x,
        bundle_y,
        admission,
        certificate: VerificationReport::new("pending"),
    };
    let mut certificate = certify(&result, opts, "cert")?;
    certificate.samples += gate_samples;
    let mut checks = result.admission.clone();
    checks.append(&mut certificate.checks);
    certificate.checks = checks;
    result.certificate = certificate;
    Ok(result)
}

/// Exact triangularity of the backward map over the forward one: for every
/// simplex `tau` of the deep codomain, the forward image of the region over
/// `g_tri(tau)` must stay inside the carrier of `tau`.
fn backward_triangular(t: &TriangularEquivalence) -> Result<CheckSummary> {
    let mut summary = CheckSummary::new("triangular-g_tri")
        .with_note("exact: forward images over g_tri images stay in carriers");
    // Bucket the deep domain vertices by their base carriers, then collect
    // forward image vertices per base simplex on demand.
    let mut buckets: BTreeMap<Simplex, Vec<u32>> = BTreeMap::new();
    for w in t.x_space.complex().vertex_ids() {
        let carrier = t.x_space.carrier_in_base(&Simplex::vertex(w))?;
        buckets.entry(carrier).or_default().push(w);
    }
    let mut image_cache: BTreeMap<Simplex, BTreeSet<u32>> = BTreeMap::new();
    for tau in t.y_space.complex().simplices() {
        let sigma = t.y_space.carrier_in_base(tau)?;
        let rho = t.g_tri.apply(tau);
        let images = image_cache.entry(rho.clone()).or_insert_with(|| {
            let mut set = BTreeSet::new();
            for (carrier, ws) in &buckets {
                if carrier.is_face_of(&rho) {
                    for &w in ws {
                        set.insert(t.f_tri.image_of_vertex(w));
                    }
                }
            }
            set
        });
        match images.iter().find(|&&v| !sigma.contains_vertex(v)) {
            None => summary.record_pass(),
            Some(&escape) => summary.record_fail(format!(
                "tau={tau} carrier={sigma} g_tri-image={rho} escapes via forward image vertex {escape}"
            )),
        }
    }
    Ok(summary)
}

/// Sampled check that a homotopy track, optionally pushed forward, stays in
/// the carrier assigned to its starting simplex.
#[allow(clippy::too_many_arguments)]
fn track_containment(
    name: &str,
    space: &Space,
    target_ctx: &MetricContext<'_>,
    carrier_of: &(dyn Fn(&Simplex) -> Result<Simplex> + Sync),
    chain: &HomotopyChain,
    push: Option<&PlEval>,
    opts: &SqueezeOptions,
    tag: &str,
) -> Result<(CheckSummary, u64)> {
    let all: Vec<Simplex> = space.complex().simplices().cloned().collect();
    let chosen = strided(&all, opts.simplex_cap);
    let times = time_grid(chain.segments().len() * opts.time_steps);
    let per_simplex: Vec<Result<(u64, u64, u64, u64, Option<String>)>> =
        exec::map_collect(opts.mode, &chosen, |s| {
            let s: &Simplex = s;
            let carrier = carrier_of(s)?;
            let pts = sample_points(s, &opts.samples, tag);
            let mut used = 0u64;
            let (mut pass, mut fail, mut unknown) = (0u64, 0u64, 0u64);
            let mut witness: Option<String> = None;
            for p in &pts {
                let base = space.realize(p)?;
                for &time in &times {
                    used += 1;
                    let step = || -> Result<Containment> {
                        let mut q = chain.eval(&base, time)?;
                        if let Some(eval) = push {
                            q = eval.eval(&q)?;
                        }
                        if q.carrier().is_face_of(&carrier) {
                            return Ok(Containment::Inside);
                        }
                        target_ctx.in_neighborhood(
                            &q,
                            std::slice::from_ref(&carrier),
                            opts.margin,
                        )
                    };
                    match step() {
                        Ok(Containment::Inside) => pass += 1,
                        Ok(Containment::Unknown) => unknown += 1,
                        Ok(Containment::Outside) => {
                            fail += 1;
                            witness.get_or_insert_with(|| {
                                format!(
                                    "s={s} carrier={carrier} t={time:.4} from {}",
                                    fmt_point(&base)
                                )
                            });
                        }
                        Err(e) => {
                            fail += 1;
                            witness.get_or_insert_with(|| {
                                format!("s={s} t={time:.4}: {e}")
                            });
                        }
                    }
                }
            }
            Ok((used, pass, fail, unknown, witness))
        });
    let mut summary = CheckSummary::new(name).with_note("tracks against starting carriers");
    let mut samples = 0u64;
    for r in per_simplex {
        let (used, pass, fail, unknown, witness) = r?;
        samples += used;
        for _ in 0..pass {
            summary.record_pass();
        }
        for _ in 0..unknown {
            summary.record_unknown();
        }
        if fail > 0 {
            summary.record_fail(witness.unwrap_or_default());
            summary.fail += fail - 1;
        }
    }
    Ok((summary, samples))
}

/// Sampled check that a chain's endpoints match two reference evaluations
/// to within [`ENDPOINT_TOL`].
fn endpoint_check(
    name: &str,
    space: &Space,
    chain: &HomotopyChain,
    at_zero: &(dyn Fn(&BaryPoint) -> Result<BaryPoint> + Sync),
    at_one: &(dyn Fn(&BaryPoint) -> Result<BaryPoint> + Sync),
    opts: &SqueezeOptions,
    tag: &str,
) -> Result<(CheckSummary, u64)> {
    let all: Vec<Simplex> = space.complex().simplices().cloned().collect();
    let chosen = strided(&all, opts.simplex_cap);
    let mut summary = CheckSummary::new(name)
        .with_note(format!("time 0 and 1 identities to within {ENDPOINT_TOL:.1e}"));
    let mut samples = 0u64;
    let mut budget = opts.endpoint_samples;
    'outer: for s in chosen {
        let pts = sample_points(s, &opts.samples, tag);
        for p in &pts {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            samples += 1;
            let base = space.realize(p)?;
            let step = || -> Result<(f64, f64)> {
                let dev0 = chain.eval(&base, 0.0)?.max_deviation(&at_zero(&base)?);
                let dev1 = chain.eval(&base, 1.0)?.max_deviation(&at_one(&base)?);
                Ok((dev0, dev1))
            };
            match step() {
                Ok((dev0, dev1)) if dev0 <= ENDPOINT_TOL && dev1 <= ENDPOINT_TOL => {
                    summary.record_pass();
                }
                Ok((dev0, dev1)) => summary.record_fail(format!(
                    "x={} dev0={dev0:.3e} dev1={dev1:.3e}",
                    fmt_point(&base)
                )),
                Err(e) => summary.record_fail(format!("x={}: {e}", fmt_point(&base))),
            }
        }
    }
    Ok((summary, samples))
}

/// Run the full certificate for a built equivalence.
fn certify(
    t: &TriangularEquivalence,
    opts: &SqueezeOptions,
    tag: &str,
) -> Result<VerificationReport> {
    let x_base = t.bundle_x.tower().base().clone();
    let y_base = t.bundle_y.tower().base().clone();
    let mut report = VerificationReport::new(format!(
        "squeeze depth={} epsilon={:.9}",
        t.constants.depth, t.constants.eps
    ));
    report.push(
        CheckSummary::new("constants").with_note(t.constants.to_string()),
    );

    report.push(
        is_triangular(&t.f_tri, &TriControl::SelfMap)?
            .renamed("triangular-f_tri")
            .with_note("exact: every image is a face of itself"),
    );
    report.push(backward_triangular(t)?);

    let measured_x = MeasuredComplex::IdentityOn(x_base.as_ref());
    let measured_y = MeasuredComplex::IdentityOn(y_base.as_ref());
    let ctx_x = MetricContext::new(measured_x, 0);
    let ctx_y = MetricContext::new(measured_y, 0);

    // Track containment: h_y keeps every track inside the closed base
    // carrier of its starting point; for h_x the forward image of every
    // track stays inside the original map's image of the starting
    // simplex's carrier, taken at the original map's own level (retraction
    // stages move points within those carriers, so this is the bound the
    // construction actually guarantees).
    let y_space = t.y_space.clone();
    let y_carrier = |s: &Simplex| y_space.carrier_in_base(s);
    let (summary, n) = track_containment(
        "homotopy-hY",
        &t.y_space,
        &ctx_y,
        &y_carrier,
        &t.h_y,
        None,
        opts,
        &format!("{tag}-hY"),
    )?;
    report.samples += n;
    report.push(summary);

    let x_tower_h = t.x_space.tower().clone();
    let x_level_h = t.x_space.level();
    let f_for_hx = t.f.clone();
    let f_level_hx = t.f_level;
    let forward_carrier = move |s: &Simplex| {
        Ok(f_for_hx.apply(&x_tower_h.carrier(x_level_h, s, f_level_hx)?))
    };
    let (summary, n) = track_containment(
        "homotopy-hX",
        &t.x_space,
        &ctx_y,
        &forward_carrier,
        &t.h_x,
        Some(&t.f_tri_eval),
        opts,
        &format!("{tag}-hX"),
    )?;
    report.samples += n;
    report.push(summary);

    // Connecting homotopies: both tracks out of a point of a deep simplex
    // stay inside the original map's image of the simplex's carrier at the
    // original map's own level.
    let x_tower = t.x_space.tower().clone();
    let x_level = t.x_space.level();
    let f_orig = t.f.clone();
    let f_orig_level = t.f_level;
    let connect_f_carrier = move |s: &Simplex| {
        Ok(f_orig.apply(&x_tower.carrier(x_level, s, f_orig_level)?))
    };
    let (summary, n) = track_containment(
        "homotopy-connect-f",
        &t.x_space,
        &ctx_y,
        &connect_f_carrier,
        &t.connect_f,
        None,
        opts,
        &format!("{tag}-cf"),
    )?;
    report.samples += n;
    report.push(summary);

    let y_tower = t.y_space.tower().clone();
    let y_level = t.y_space.level();
    let g_orig = t.g.clone();
    let g_orig_level = t.g_level;
    let connect_g_carrier = move |s: &Simplex| {
        Ok(g_orig.apply(&y_tower.carrier(y_level, s, g_orig_level)?))
    };
    let (summary, n) = track_containment(
        "homotopy-connect-g",
        &t.y_space,
        &ctx_x,
        &connect_g_carrier,
        &t.connect_g,
        None,
        opts,
        &format!("{tag}-cg"),
    )?;
    report.samples += n;
    report.push(summary);

    // Endpoint identities of all four chains.
    let g_tri_eval = &t.g_tri_eval;
    let f_tri_eval = &t.f_tri_eval;
    let (summary, n) = endpoint_check(
        "endpoints-hY",
        &t.y_space,
        &t.h_y,
        &|p| f_tri_eval.eval(&g_tri_eval.eval(p)?),
        &|p| Ok(p.clone()),
        opts,
        &format!("{tag}-eY"),
    )?;
    report.samples += n;
    report.push(summary);
    let (summary, n) = endpoint_check(
        "endpoints-hX",
        &t.x_space,
        &t.h_x,
        &|p| g_tri_eval.eval(&f_tri_eval.eval(p)?),
        &|p| Ok(p.clone()),
        opts,
        &format!("{tag}-eX"),
    )?;
    report.samples += n;
    report.push(summary);
    let f_eval = &t.f_eval;
    let (summary, n) = endpoint_check(
        "endpoints-connect-f",
        &t.x_space,
        &t.connect_f,
        &|p| f_eval.eval(p),
        &|p| f_tri_eval.eval(p),
        opts,
        &format!("{tag}-ecf"),
    )?;
    report.samples += n;
    report.push(summary);
    let g_eval = &t.g_eval;
    let (summary, n) = endpoint_check(
        "endpoints-connect-g",
        &t.y_space,
        &t.connect_g,
        &|p| g_eval.eval(p),
        &|p| g_tri_eval.eval(p),
        opts,
        &format!("{tag}-ecg"),
    )?;
    report.samples += n;
    report.push(summary);

    Ok(report)
}

/// Re-certify a built equivalence with a fresh sampling pass.
///
/// Runs the same exact and sampled checks as the build-time certificate
/// (admission gates excluded: they belong to the input data, which is no
/// longer present) under the supplied options.
pub fn verify_triangular_equivalence(
    t: &TriangularEquivalence,
    opts: &SqueezeOptions,
) -> Result<VerificationReport> {
    certify(t, opts, "verify")
}

/// Experimental probe of the one-level-deeper control question.
///
/// Checks whether the squeezed pair is still triangular when carriers are
/// taken in the first barycentric subdivision of the codomain instead of
/// the codomain itself. Failures are expected and are data, not defects.
pub fn conjecture_probe(t: &TriangularEquivalence) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("conjecture-probe (experimental)");
    let y_tower = t.y_space.tower();
    let deep = t.y_space.level();
    let level_one = y_tower.complex(1)?;
    // Carrier of each first-subdivision simplex in the base.
    let mut base_of: BTreeMap<&Simplex, Simplex> = BTreeMap::new();
    for s in level_one.simplices() {
        base_of.insert(s, y_tower.carrier(1, s, 0)?);
    }
    let pieces_inside = |beta: &Simplex| -> Vec<&Simplex> {
        base_of
            .iter()
            .filter(|(_, b)| b.is_face_of(beta))
            .map(|(s, _)| *s)
            .collect()
    };

    // Deep domain simplices bucketed by base carrier, for preimage regions.
    let mut x_buckets: BTreeMap<Simplex, Vec<&Simplex>> = BTreeMap::new();
    let x_complex = t.x_space.complex().clone();
    for s in x_complex.simplices() {
        x_buckets
            .entry(t.x_space.carrier_in_base(s)?)
            .or_default()
            .push(s);
    }

    let mut backward = CheckSummary::new("probe-g_tri")
        .with_note("one level deeper: forward images over g_tri images vs first-subdivision carriers");
    for tau in t.y_space.complex().simplices() {
        let refined = y_tower.carrier(deep, tau, 1)?;
        let rho = t.g_tri.apply(tau);
        let mut ok = true;
        let mut witness = String::new();
        for (carrier, simplices) in &x_buckets {
            if !carrier.is_face_of(&rho) {
                continue;
            }
            for s in simplices {
                let beta = t.f_tri.apply(s);
                for piece in pieces_inside(&beta) {
                    if !piece.is_face_of(&refined) {
                        ok = false;
                        witness = format!(
                            "tau={tau} refined-carrier={refined} image piece {piece} of {beta} escapes"
                        );
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            backward.record_pass();
        } else {
            backward.record_fail(witness);
        }
    }
    report.push(backward);

    let mut forward = CheckSummary::new("probe-f_tri")
        .with_note("one level deeper: forward images vs single first-subdivision simplices");
    for s in x_complex.simplices() {
        let beta = t.f_tri.apply(s);
        let pieces = pieces_inside(&beta);
        let fits = pieces
            .iter()
            .any(|candidate| pieces.iter().all(|p| p.is_face_of(candidate)));
        if fits {
            forward.record_pass();
        } else {
            forward.record_fail(format!(
                "s={s} image={beta} spans {} first-subdivision pieces",
                pieces.len()
            ));
        }
    }
    report.push(forward);
    Ok(report)
}
