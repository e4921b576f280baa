//! Piecewise-linear map evaluation and concatenated straight-line homotopies.
//!
//! A `PlMap` evaluates a simplicial map between tower levels on geometric
//! points: locate the input in the domain level, push the barycentric weights
//! through the vertex assignment, and realize the image in the codomain's
//! base chart. A `HomotopyChain` is a time-ordered list of segments, each
//! interpolating two such evaluators inside a shared chart simplex; the
//! carrier condition is validated exactly on vertices and extends to simplex
//! interiors by convexity.

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::metric::BaryPoint;
use crate::subdivision::Space;
use std::sync::Arc;

/// A simplicial map made evaluable on points: base coordinates of the domain
/// space in, base coordinates of the codomain space out.
#[derive(Clone)]
pub struct PlMap {
    dom: Space,
    map: SimplicialMap,
    cod: Space,
}

impl PlMap {
    pub fn new(dom: Space, map: SimplicialMap, cod: Space) -> Result<Self> {
        if map.domain().as_ref() != dom.complex().as_ref() {
            return Err(Error::DomainMismatch(
                "map domain is not the complex of the domain space".into(),
            ));
        }
        if map.codomain().as_ref() != cod.complex().as_ref() {
            return Err(Error::DomainMismatch(
                "map codomain is not the complex of the codomain space".into(),
            ));
        }
        Ok(PlMap { dom, map, cod })
    }

    pub fn map(&self) -> &SimplicialMap {
        &self.map
    }

    pub fn domain_space(&self) -> &Space {
        &self.dom
    }

    pub fn codomain_space(&self) -> &Space {
        &self.cod
    }

    /// Push a point given at the domain space's level through the vertex
    /// assignment (affine on each simplex), still at the codomain level.
    pub fn push_level_point(&self, p: &BaryPoint) -> BaryPoint {
        let images = self.map.vertex_images();
        let terms: Vec<(f64, BaryPoint)> = p
            .support()
            .iter()
            .zip(p.coords())
            .map(|(v, &c)| (c, BaryPoint::vertex(images[v])))
            .collect();
        let refs: Vec<(f64, &BaryPoint)> = terms.iter().map(|(c, p)| (*c, p)).collect();
        BaryPoint::combine(&refs)
    }

    /// Evaluate on base coordinates of the domain space.
    pub fn eval(&self, x: &BaryPoint) -> Result<BaryPoint> {
        let located = self.dom.locate(x)?;
        let image = self.push_level_point(&located);
        self.cod.realize(&image)
    }
}

/// A composable point evaluator.
#[derive(Clone)]
pub enum PlEval {
    /// The identity on whatever point it is given.
    Identity,
    /// One simplicial map evaluated through its towers.
    Affine(Arc<PlMap>),
    /// Left-to-right composition.
    Seq(Vec<PlEval>),
}

impl PlEval {
    pub fn affine(dom: Space, map: SimplicialMap, cod: Space) -> Result<Self> {
        Ok(PlEval::Affine(Arc::new(PlMap::new(dom, map, cod)?)))
    }

    /// Composition applying `self` first, then `after`.
    pub fn then(&self, after: &PlEval) -> PlEval {
        match (self, after) {
            (PlEval::Identity, x) | (x, PlEval::Identity) => x.clone(),
            (a, b) => PlEval::Seq(vec![a.clone(), b.clone()]),
        }
    }

    pub fn eval(&self, x: &BaryPoint) -> Result<BaryPoint> {
        match self {
            PlEval::Identity => Ok(x.clone()),
            PlEval::Affine(m) => m.eval(x),
            PlEval::Seq(parts) => {
                let mut cur = x.clone();
                for p in parts {
                    cur = p.eval(&cur)?;
                }
                Ok(cur)
            }
        }
    }
}

/// One homotopy segment: at time s it evaluates
/// `post(lerp(a(pre(x)), b(pre(x)), s))`, with the interpolation taking place
/// inside a simplex of `chart`.
#[derive(Clone)]
pub struct Segment {
    pub pre: PlEval,
    pub a: PlEval,
    pub b: PlEval,
    pub post: PlEval,
    /// Space whose simplices index validation and sampling; `pre`, `a`, `b`
    /// must be affine on each of its simplices.
    pub domain: Space,
    /// Complex in whose simplices the interpolation happens.
    pub chart: Arc<SimplicialComplex>,
}

impl Segment {
    fn interpolant(&self, x: &BaryPoint, s: f64) -> Result<BaryPoint> {
        let p = self.pre.eval(x)?;
        let pa = self.a.eval(&p)?;
        let pb = self.b.eval(&p)?;
        let union = pa.carrier().union(&pb.carrier());
        if !self.chart.contains(&union) {
            return Err(Error::CarrierViolation(format!(
                "{} and {} while interpolating",
                pa.carrier(),
                pb.carrier()
            )));
        }
        Ok(pa.lerp(&pb, s))
    }

    /// Evaluate the segment at local time s in [0, 1].
    pub fn eval(&self, x: &BaryPoint, s: f64) -> Result<BaryPoint> {
        let mid = self.interpolant(x, s)?;
        self.post.eval(&mid)
    }

    /// Exact carrier-condition check: on every maximal simplex of the domain,
    /// the carriers of all vertex images under both endpoint maps must span
    /// one chart simplex; convexity extends this to the interior.
    fn validate(&self) -> Result<()> {
        for m in self.domain.complex().maximal_simplices() {
            let mut union: Option<Simplex> = None;
            for &v in m.vertices() {
                let base = self.domain.vertex_pos(v)?.clone();
                let p = self.pre.eval(&base)?;
                let pa = self.a.eval(&p)?;
                let pb = self.b.eval(&p)?;
                let here = pa.carrier().union(&pb.carrier());
                union = Some(match union {
                    None => here,
                    Some(u) => u.union(&here),
                });
            }
            let union = union.expect("maximal simplex has vertices");
            if !self.chart.contains(&union) {
                return Err(Error::CarrierViolation(format!(
                    "vertex images of {m} span {union}, not a chart simplex"
                )));
            }
        }
        Ok(())
    }
}

/// A homotopy as a time-ordered concatenation of straight-line segments with
/// uniform time parametrization.
#[derive(Clone)]
pub struct HomotopyChain {
    segments: Vec<Segment>,
}

/// Tolerance for junction agreement between consecutive segments (pure
/// floating-point roundtrip noise; the underlying maps agree exactly).
const JUNCTION_TOL: f64 = 1e-9;

impl HomotopyChain {
    /// Validate carrier conditions on every segment and agreement at every
    /// junction, then assemble the chain.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Degenerate("homotopy with no segments".into()));
        }
        for seg in &segments {
            seg.validate()?;
        }
        for k in 0..segments.len() - 1 {
            let left = &segments[k];
            let right = &segments[k + 1];
            for &v in right.domain.complex().vertex_ids().iter() {
                let x = right.domain.vertex_pos(v)?.clone();
                let end = left.eval(&x, 1.0)?;
                let start = right.eval(&x, 0.0)?;
                if end.max_deviation(&start) > JUNCTION_TOL {
                    return Err(Error::PreconditionFailed(format!(
                        "segments {k} and {} disagree at vertex {v}",
                        k + 1
                    )));
                }
            }
        }
        Ok(HomotopyChain { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Straight-line homotopy from `a` to `b` as a single validated segment.
    pub fn straight_line(
        a: PlEval,
        b: PlEval,
        domain: Space,
        chart: Arc<SimplicialComplex>,
    ) -> Result<Self> {
        Self::new(vec![Segment {
            pre: PlEval::Identity,
            a,
            b,
            post: PlEval::Identity,
            domain,
            chart,
        }])
    }

    /// The constant homotopy at one map.
    pub fn constant(at: PlEval, domain: Space, chart: Arc<SimplicialComplex>) -> Result<Self> {
        Self::straight_line(at.clone(), at, domain, chart)
    }

    /// Evaluate at global time t in [0, 1] (uniform over segments).
    pub fn eval(&self, x: &BaryPoint, t: f64) -> Result<BaryPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::BadCoordinates(format!("time {t} outside [0, 1]")));
        }
        let n = self.segments.len() as f64;
        let scaled = t * n;
        let idx = (scaled.floor() as usize).min(self.segments.len() - 1);
        let s = scaled - idx as f64;
        self.segments[idx].eval(x, s)
    }

    /// Run time backwards.
    pub fn reversed(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| Segment {
                pre: seg.pre.clone(),
                a: seg.b.clone(),
                b: seg.a.clone(),
                post: seg.post.clone(),
                domain: seg.domain.clone(),
                chart: seg.chart.clone(),
            })
            .collect();
        HomotopyChain { segments }
    }

    /// Apply an extra evaluator after every segment (post-composition).
    /// Carrier conditions are untouched; junction agreement is preserved.
    pub fn postcomposed(&self, extra: &PlEval) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|seg| Segment {
                pre: seg.pre.clone(),
                a: seg.a.clone(),
                b: seg.b.clone(),
                post: seg.post.then(extra),
                domain: seg.domain.clone(),
                chart: seg.chart.clone(),
            })
            .collect();
        HomotopyChain { segments }
    }

    /// Apply an extra evaluator before every segment and revalidate against
    /// the new domain (on whose simplices the composite must be affine).
    pub fn precomposed(&self, extra: &PlEval, new_domain: Space) -> Result<Self> {
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .map(|seg| Segment {
                pre: extra.then(&seg.pre),
                a: seg.a.clone(),
                b: seg.b.clone(),
                post: seg.post.clone(),
                domain: new_domain.clone(),
                chart: seg.chart.clone(),
            })
            .collect();
        HomotopyChain::new(segments)
    }

    /// Concatenate chains in time order, revalidating the junctions.
    pub fn concat(chains: Vec<HomotopyChain>) -> Result<Self> {
        let segments: Vec<Segment> = chains.into_iter().flat_map(|c| c.segments).collect();
        HomotopyChain::new(segments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::SubdivisionTower;
    use std::collections::BTreeMap;

    fn simplex(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn point(support: &[u32], coords: &[f64]) -> BaryPoint {
        BaryPoint::new(support.to_vec(), coords.to_vec()).unwrap()
    }

    /// Tower over a segment with its first stage map (barycentre to the
    /// smaller endpoint).
    fn segment_stage() -> (Arc<SubdivisionTower>, SimplicialMap) {
        let base = Arc::new(SimplicialComplex::standard(1));
        let mut tower = SubdivisionTower::new(base.clone());
        tower.ensure_depth(1).unwrap();
        let tower = Arc::new(tower);
        let map = SimplicialMap::new(
            tower.complex(1).unwrap().clone(),
            base,
            BTreeMap::from([(0, 0), (1, 1), (2, 0)]),
        )
        .unwrap();
        (tower, map)
    }

    #[test]
    fn plmap_evaluates_affinely() {
        let (tower, map) = segment_stage();
        let dom = Space::new(tower.clone(), 1).unwrap();
        let cod = Space::new(tower, 0).unwrap();
        let f = PlMap::new(dom, map, cod).unwrap();
        // The midpoint vertex goes to vertex 0, and with it the whole
        // half-edge [0, mid] collapses to vertex 0.
        let at_mid = f.eval(&point(&[0, 1], &[0.5, 0.5])).unwrap();
        assert_eq!(at_mid.support(), &[0]);
        let quarter = f.eval(&point(&[0, 1], &[0.75, 0.25])).unwrap();
        assert_eq!(quarter.support(), &[0]);
        // On the half-edge [mid, 1] the map interpolates mid -> 0, 1 -> 1:
        // the three-quarter point lands back at the midpoint of the base.
        let y = f.eval(&point(&[0, 1], &[0.25, 0.75])).unwrap();
        assert!(y.max_deviation(&point(&[0, 1], &[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn straight_line_endpoints_and_midpoint() {
        let (tower, map) = segment_stage();
        let dom = Space::new(tower.clone(), 1).unwrap();
        let cod = Space::new(tower.clone(), 0).unwrap();
        let chart = tower.base().clone();
        let r1 = PlEval::affine(dom.clone(), map, cod).unwrap();
        let h = HomotopyChain::straight_line(PlEval::Identity, r1, dom, chart).unwrap();
        // t = 0: identity; t = 1: the stage map; t = 1/2: midpoint.
        let x = point(&[0, 1], &[0.5, 0.5]);
        let y0 = h.eval(&x, 0.0).unwrap();
        assert!(y0.max_deviation(&x) < 1e-12);
        let y1 = h.eval(&x, 1.0).unwrap();
        assert_eq!(y1.support(), &[0]);
        let ymid = h.eval(&x, 0.5).unwrap();
        assert!(ymid.max_deviation(&point(&[0, 1], &[0.75, 0.25])) < 1e-12);
    }

    #[test]
    fn carrier_violation_is_detected() {
        // Flipping the path 0-1-2 end to end is not a straight-line homotopy:
        // vertex images 0 and 2 share no simplex.
        let base = Arc::new(
            SimplicialComplex::from_maximal(&[simplex(&[0, 1]), simplex(&[1, 2])]).unwrap(),
        );
        let flip = SimplicialMap::new(
            base.clone(),
            base.clone(),
            BTreeMap::from([(0, 2), (1, 1), (2, 0)]),
        )
        .unwrap();
        let space = Space::base_space(base.clone());
        let f = PlEval::affine(space.clone(), flip, space.clone()).unwrap();
        let r = HomotopyChain::straight_line(PlEval::Identity, f, space, base);
        assert!(matches!(r, Err(Error::CarrierViolation(_))));
    }

    #[test]
    fn junction_mismatch_is_detected() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let space = Space::base_space(base.clone());
        let swap = SimplicialMap::new(
            base.clone(),
            base.clone(),
            BTreeMap::from([(0, 1), (1, 0)]),
        )
        .unwrap();
        let sw = PlEval::affine(space.clone(), swap, space.clone()).unwrap();
        let seg1 = Segment {
            pre: PlEval::Identity,
            a: PlEval::Identity,
            b: PlEval::Identity,
            post: PlEval::Identity,
            domain: space.clone(),
            chart: base.clone(),
        };
        let seg2 = Segment {
            pre: PlEval::Identity,
            a: sw.clone(),
            b: sw,
            post: PlEval::Identity,
            domain: space,
            chart: base,
        };
        let r = HomotopyChain::new(vec![seg1, seg2]);
        assert!(matches!(r, Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn reversal_swaps_endpoints() {
        let (tower, map) = segment_stage();
        let dom = Space::new(tower.clone(), 1).unwrap();
        let cod = Space::new(tower.clone(), 0).unwrap();
        let chart = tower.base().clone();
        let r1 = PlEval::affine(dom.clone(), map, cod).unwrap();
        let h = HomotopyChain::straight_line(PlEval::Identity, r1, dom, chart).unwrap();
        let rev = h.reversed();
        let x = point(&[0, 1], &[0.3, 0.7]);
        assert!(h
            .eval(&x, 0.0)
            .unwrap()
            .max_deviation(&rev.eval(&x, 1.0).unwrap())
            < 1e-12);
        assert!(h
            .eval(&x, 1.0)
            .unwrap()
            .max_deviation(&rev.eval(&x, 0.0).unwrap())
            < 1e-12);
    }

    #[test]
    fn constant_chain_is_constant() {
        let base = Arc::new(SimplicialComplex::standard(2));
        let space = Space::base_space(base.clone());
        let h = HomotopyChain::constant(PlEval::Identity, space, base).unwrap();
        let x = point(&[0, 1, 2], &[0.2, 0.3, 0.5]);
        for t in [0.0, 0.25, 0.5, 1.0] {
            assert!(h.eval(&x, t).unwrap().max_deviation(&x) < 1e-12);
        }
    }

    #[test]
    fn time_outside_unit_interval_is_rejected() {
        let base = Arc::new(SimplicialComplex::standard(1));
        let space = Space::base_space(base.clone());
        let h = HomotopyChain::constant(PlEval::Identity, space, base).unwrap();
        assert!(h.eval(&BaryPoint::vertex(0), 1.5).is_err());
        assert!(h.eval(&BaryPoint::vertex(0), -0.1).is_err());
    }
}
