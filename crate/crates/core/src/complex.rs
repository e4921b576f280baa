//! Finite simplicial complexes and simplicial maps.
//!
//! Simplices are sorted tuples of `u32` vertex ids. A complex stores its
//! simplices grouped by dimension and is always face-closed. Simplicial maps
//! are vertex assignments whose induced simplex images land in the codomain;
//! collapses (repeated image vertices) are legal.

use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A simplex: a strictly increasing tuple of vertex ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(SmallVec<[u32; 4]>);

impl Simplex {
    /// Build a simplex from vertex ids, sorting them; duplicate ids are
    /// rejected as malformed.
    pub fn new(vertices: impl Into<Vec<u32>>) -> Result<Self> {
        let mut v: Vec<u32> = vertices.into();
        if v.is_empty() {
            return Err(Error::MalformedSimplex("empty vertex list".into()));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedSimplex(format!(
                "duplicate vertex in {v:?}"
            )));
        }
        Ok(Simplex(SmallVec::from_vec(v)))
    }

    /// The 0-simplex on a single vertex.
    pub fn vertex(v: u32) -> Self {
        Simplex(SmallVec::from_slice(&[v]))
    }

    /// Build from a slice that is already sorted and duplicate-free.
    pub(crate) fn from_sorted(vertices: &[u32]) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(!vertices.is_empty());
        Simplex(SmallVec::from_slice(vertices))
    }

    /// Dimension: one less than the number of vertices.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The sorted vertex ids.
    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    /// Whether `v` is a vertex of this simplex.
    pub fn contains_vertex(&self, v: u32) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Whether `self` is a (not necessarily proper) face of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }

    /// The codimension-1 faces. Empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|skip| {
                let mut v: SmallVec<[u32; 4]> = self.0.clone();
                v.remove(skip);
                Simplex(v)
            })
            .collect()
    }

    /// All nonempty proper faces.
    pub fn proper_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out = Vec::with_capacity((1usize << n) - 2);
        for mask in 1u32..((1 << n) - 1) {
            let v: SmallVec<[u32; 4]> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.0[i])
                .collect();
            out.push(Simplex(v));
        }
        out
    }

    /// Sorted union of the vertex sets of two simplices.
    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut v: SmallVec<[u32; 4]> = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    v.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    v.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    v.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Simplex(v)
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A finite, face-closed simplicial complex.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    index: BTreeSet<Simplex>,
}

impl SimplicialComplex {
    /// Build the face closure of a set of generating simplices.
    pub fn from_maximal(maximal: &[Simplex]) -> Result<Self> {
        if maximal.is_empty() {
            return Err(Error::EmptyComplex);
        }
        let mut index: BTreeSet<Simplex> = BTreeSet::new();
        for s in maximal {
            let n = s.vertices().len();
            for mask in 1u32..(1u32 << n) {
                let v: SmallVec<[u32; 4]> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| s.vertices()[i])
                    .collect();
                index.insert(Simplex(v));
            }
        }
        let top = index.iter().map(|s| s.dim()).max().unwrap();
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); top + 1];
        for s in &index {
            by_dim[s.dim()].push(s.clone());
        }
        for layer in &mut by_dim {
            layer.sort();
        }
        Ok(SimplicialComplex { by_dim, index })
    }

    /// Build from a set of simplices already known to be face-closed and
    /// duplicate-free (each flag of a subdivision is generated exactly once).
    pub(crate) fn from_closed_simplices(all: Vec<Simplex>) -> Self {
        debug_assert!(!all.is_empty());
        let top = all.iter().map(|s| s.dim()).max().unwrap();
        let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); top + 1];
        for s in &all {
            by_dim[s.dim()].push(s.clone());
        }
        for layer in &mut by_dim {
            layer.sort();
        }
        let index: BTreeSet<Simplex> = all.into_iter().collect();
        debug_assert!(by_dim.iter().map(Vec::len).sum::<usize>() == index.len());
        SimplicialComplex { by_dim, index }
    }

    /// The single standard n-simplex on vertices 0..=n.
    pub fn standard(n: u32) -> Self {
        let top = Simplex::new((0..=n).collect::<Vec<_>>()).unwrap();
        Self::from_maximal(std::slice::from_ref(&top)).unwrap()
    }

    /// Dimension of the complex.
    pub fn dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    /// All simplices of dimension `d` in sorted order.
    pub fn simplices_of_dim(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All simplices, ascending by dimension then lexicographically.
    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    /// Total number of simplices (all dimensions).
    pub fn simplex_count(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    /// Membership test.
    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains(s)
    }

    /// Error unless `s` is a simplex of this complex.
    pub fn require(&self, s: &Simplex) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::SimplexNotFound(s.to_string()))
        }
    }

    /// Sorted vertex ids.
    pub fn vertex_ids(&self) -> Vec<u32> {
        self.by_dim[0].iter().map(|s| s.vertices()[0]).collect()
    }

    /// Largest vertex id in use.
    pub fn max_vertex_id(&self) -> u32 {
        *self.by_dim[0].last().unwrap().vertices().last().unwrap()
    }

    /// The simplices that are not proper faces of any other simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        // In a face-closed complex a simplex is non-maximal exactly when it
        // is a facet of some other simplex, so one facet-cover pass suffices.
        let mut covered: BTreeSet<Simplex> = BTreeSet::new();
        for s in self.simplices() {
            if s.dim() == 0 {
                continue;
            }
            for f in s.facets() {
                covered.insert(f);
            }
        }
        self.simplices()
            .filter(|s| !covered.contains(*s))
            .cloned()
            .collect()
    }

    /// All simplices having `s` as a face (including `s` itself).
    pub fn cofaces(&self, s: &Simplex) -> Vec<Simplex> {
        self.simplices()
            .filter(|c| s.is_face_of(c))
            .cloned()
            .collect()
    }

    /// Closed star of `s`: all faces of all simplices containing `s`.
    pub fn closed_star(&self, s: &Simplex) -> Vec<Simplex> {
        let mut out: BTreeSet<Simplex> = BTreeSet::new();
        for c in self.cofaces(s) {
            for f in c.proper_faces() {
                out.insert(f);
            }
            out.insert(c);
        }
        let mut v: Vec<Simplex> = out.into_iter().collect();
        v.sort_by_key(|s| (s.dim(), s.clone()));
        v
    }

    /// Connected-component representative for each vertex (smallest vertex id
    /// reachable through edges).
    pub fn component_reps(&self) -> BTreeMap<u32, u32> {
        let verts = self.vertex_ids();
        let mut parent: BTreeMap<u32, u32> = verts.iter().map(|&v| (v, v)).collect();
        fn find(parent: &mut BTreeMap<u32, u32>, v: u32) -> u32 {
            let p = parent[&v];
            if p == v {
                return v;
            }
            let r = find(parent, p);
            parent.insert(v, r);
            r
        }
        for e in self.simplices_of_dim(1) {
            let (a, b) = (e.vertices()[0], e.vertices()[1]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent.insert(hi, lo);
        }
        verts.iter().map(|&v| (v, find(&mut parent, v))).collect()
    }

    /// Whether all vertices lie in one connected component.
    pub fn is_connected(&self) -> bool {
        let reps = self.component_reps();
        let mut it = reps.values();
        match it.next() {
            None => true,
            Some(first) => it.all(|r| r == first),
        }
    }
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SimplicialComplex(dim {}, {} simplices)",
            self.dim(),
            self.simplex_count()
        )
    }
}

/// A simplicial map: a total vertex assignment carrying simplices of the
/// domain into simplices of the codomain (possibly collapsing them).
#[derive(Clone)]
pub struct SimplicialMap {
    domain: Arc<SimplicialComplex>,
    codomain: Arc<SimplicialComplex>,
    images: BTreeMap<u32, u32>,
}

impl SimplicialMap {
    /// Validate a vertex assignment into a simplicial map.
    pub fn new(
        domain: Arc<SimplicialComplex>,
        codomain: Arc<SimplicialComplex>,
        images: BTreeMap<u32, u32>,
    ) -> Result<Self> {
        for v in domain.vertex_ids() {
            let w = *images.get(&v).ok_or(Error::UnmappedVertex(v))?;
            if !codomain.contains(&Simplex::vertex(w)) {
                return Err(Error::NonSimplicialImage {
                    simplex: Simplex::vertex(v).to_string(),
                    image: Simplex::vertex(w).to_string(),
                });
            }
        }
        let map = SimplicialMap {
            domain,
            codomain,
            images,
        };
        // It suffices to check maximal simplices: images of faces are faces.
        for s in map.domain.maximal_simplices() {
            let img = map.apply(&s);
            if !map.codomain.contains(&img) {
                return Err(Error::NonSimplicialImage {
                    simplex: s.to_string(),
                    image: img.to_string(),
                });
            }
        }
        Ok(map)
    }

    /// The identity map of a complex.
    pub fn identity(c: Arc<SimplicialComplex>) -> Self {
        let images = c.vertex_ids().into_iter().map(|v| (v, v)).collect();
        SimplicialMap {
            domain: c.clone(),
            codomain: c,
            images,
        }
    }

    pub fn domain(&self) -> &Arc<SimplicialComplex> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SimplicialComplex> {
        &self.codomain
    }

    /// The vertex assignment.
    pub fn vertex_images(&self) -> &BTreeMap<u32, u32> {
        &self.images
    }

    /// Image of one vertex. Panics if `v` is not a domain vertex.
    pub fn image_of_vertex(&self, v: u32) -> u32 {
        self.images[&v]
    }

    /// Image simplex (vertex images, sorted, duplicates collapsed).
    pub fn apply(&self, s: &Simplex) -> Simplex {
        let mut v: SmallVec<[u32; 4]> =
            s.vertices().iter().map(|&w| self.images[&w]).collect();
        v.sort_unstable();
        v.dedup();
        Simplex(v)
    }

    /// Composition `outer . inner` (apply `inner` first).
    pub fn compose(outer: &SimplicialMap, inner: &SimplicialMap) -> Result<SimplicialMap> {
        if !Arc::ptr_eq(&inner.codomain, &outer.domain) && inner.codomain != outer.domain {
            return Err(Error::ComposeMismatch);
        }
        let images = inner
            .images
            .iter()
            .map(|(&v, &w)| (v, outer.images[&w]))
            .collect();
        Ok(SimplicialMap {
            domain: inner.domain.clone(),
            codomain: outer.codomain.clone(),
            images,
        })
    }

    /// Whether every vertex maps to itself.
    pub fn is_identity_assignment(&self) -> bool {
        self.images.iter().all(|(v, w)| v == w)
    }
}

impl fmt::Debug for SimplicialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SimplicialMap({} vertices, {:?} -> {:?})",
            self.images.len(),
            self.domain,
            self.codomain
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn closure_of_triangle_has_seven_simplices() {
        let c = SimplicialComplex::standard(2);
        assert_eq!(c.simplices_of_dim(0).len(), 3);
        assert_eq!(c.simplices_of_dim(1).len(), 3);
        assert_eq!(c.simplices_of_dim(2).len(), 1);
        assert_eq!(c.simplex_count(), 7);
    }

    #[test]
    fn closure_of_tetrahedron_has_fifteen_simplices() {
        let c = SimplicialComplex::standard(3);
        assert_eq!(c.simplex_count(), 15);
        assert_eq!(c.dim(), 3);
    }

    #[test]
    fn duplicate_vertices_are_malformed() {
        assert!(matches!(
            Simplex::new(vec![1, 1, 2]),
            Err(Error::MalformedSimplex(_))
        ));
    }

    #[test]
    fn simplices_are_sorted_on_construction() {
        let s = simplex(&[3, 1, 2]);
        assert_eq!(s.vertices(), &[1, 2, 3]);
    }

    #[test]
    fn face_relation() {
        let t = simplex(&[0, 1, 2]);
        assert!(simplex(&[0, 2]).is_face_of(&t));
        assert!(!simplex(&[0, 3]).is_face_of(&t));
        assert_eq!(t.facets().len(), 3);
        assert_eq!(t.proper_faces().len(), 6);
    }

    #[test]
    fn closed_star_in_boundary_plus_edge() {
        // Hollow triangle (0 1 2) with a free edge (2 3) attached.
        let c = SimplicialComplex::from_maximal(&[
            simplex(&[0, 1]),
            simplex(&[0, 2]),
            simplex(&[1, 2]),
            simplex(&[2, 3]),
        ])
        .unwrap();
        let star = c.closed_star(&simplex(&[2]));
        assert_eq!(star.len(), 7);
        assert!(star.contains(&simplex(&[2, 3])));
        assert!(!star.contains(&simplex(&[0, 1])));
    }

    #[test]
    fn maximal_simplices_roundtrip() {
        let gens = vec![simplex(&[0, 1, 2]), simplex(&[2, 3])];
        let c = SimplicialComplex::from_maximal(&gens).unwrap();
        // Ascending by dimension, then lexicographic.
        assert_eq!(c.maximal_simplices(), vec![simplex(&[2, 3]), simplex(&[0, 1, 2])]);
    }

    #[test]
    fn components_of_disjoint_edges() {
        let c =
            SimplicialComplex::from_maximal(&[simplex(&[0, 1]), simplex(&[5, 9])]).unwrap();
        assert!(!c.is_connected());
        let reps = c.component_reps();
        assert_eq!(reps[&0], reps[&1]);
        assert_eq!(reps[&5], reps[&9]);
        assert_ne!(reps[&0], reps[&5]);
    }

    #[test]
    fn collapse_map_is_legal() {
        let dom = Arc::new(SimplicialComplex::standard(2));
        let cod = Arc::new(SimplicialComplex::standard(1));
        let images = BTreeMap::from([(0, 0), (1, 0), (2, 1)]);
        let f = SimplicialMap::new(dom, cod, images).unwrap();
        assert_eq!(f.apply(&simplex(&[0, 1, 2])), simplex(&[0, 1]));
        assert_eq!(f.apply(&simplex(&[0, 1])), simplex(&[0]));
    }

    #[test]
    fn non_simplicial_image_is_rejected() {
        // Square: the diagonal (0 2) is not an edge.
        let square = Arc::new(
            SimplicialComplex::from_maximal(&[
                simplex(&[0, 1]),
                simplex(&[1, 2]),
                simplex(&[2, 3]),
                simplex(&[0, 3]),
            ])
            .unwrap(),
        );
        let seg = Arc::new(SimplicialComplex::standard(1));
        let images = BTreeMap::from([(0, 0), (1, 2)]);
        let r = SimplicialMap::new(seg, square, images);
        assert!(matches!(r, Err(Error::NonSimplicialImage { .. })));
    }

    #[test]
    fn unmapped_vertex_is_rejected() {
        let dom = Arc::new(SimplicialComplex::standard(1));
        let cod = Arc::new(SimplicialComplex::standard(1));
        let images = BTreeMap::from([(0, 0)]);
        assert!(matches!(
            SimplicialMap::new(dom, cod, images),
            Err(Error::UnmappedVertex(1))
        ));
    }

    #[test]
    fn composition_applies_inner_first() {
        let c2 = Arc::new(SimplicialComplex::standard(2));
        let c1 = Arc::new(SimplicialComplex::standard(1));
        let collapse =
            SimplicialMap::new(c2.clone(), c1.clone(), BTreeMap::from([(0, 0), (1, 0), (2, 1)]))
                .unwrap();
        let swap =
            SimplicialMap::new(c1.clone(), c1.clone(), BTreeMap::from([(0, 1), (1, 0)]))
                .unwrap();
        let g = SimplicialMap::compose(&swap, &collapse).unwrap();
        assert_eq!(g.image_of_vertex(0), 1);
        assert_eq!(g.image_of_vertex(2), 0);
        let bad = SimplicialMap::compose(&collapse, &swap);
        assert!(matches!(bad, Err(Error::ComposeMismatch)));
    }
}
