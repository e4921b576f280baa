//! Versioned JSON document format for complexes, maps, homotopy chains, and
//! equivalence instances, so pipeline stages can pass one bundle between
//! commands.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{Simplex, SimplicialComplex, SimplicialMap};
use crate::error::{Error, Result};
use crate::homotopy::{HomotopyChain, PlEval};
use crate::squeeze::EquivalenceData;
use crate::subdivision::{Space, SubdivisionTower};

/// The single format version this build reads and writes.
pub const FORMAT_VERSION: &str = "1";

/// One vertex of the stored complex, with optional 2D/3D layout coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<f64>>,
}

/// A named simplicial map stored as a vertex assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    /// Maximal simplices of the map's domain base; empty means the document
    /// complex itself.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<Vec<u32>>,
    /// The map's domain is the domain base subdivided this many times.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub domain_level: u32,
    /// Maximal simplices of the codomain; empty means the document complex.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub codomain: Vec<Vec<u32>>,
    /// Vertex assignment as (vertex, image) pairs, sorted by vertex.
    pub vertices: Vec<(u32, u32)>,
}

/// A named homotopy chain defined by reference to a stored map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEntry {
    /// One of "straight-line-to-identity" or "constant-identity".
    pub kind: String,
    /// Name of the stored map supplying the moving endpoint and the domain.
    pub map: String,
}

/// A stored controlled-equivalence instance referencing maps and chains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceEntry {
    pub f: String,
    pub g: String,
    pub h1: String,
    pub h2: String,
    pub epsilon: f64,
}

/// A parsed document: one complex plus named maps, chains, and at most one
/// equivalence instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub format_version: String,
    pub vertices: Vec<VertexEntry>,
    pub maximal_simplices: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub chains: BTreeMap<String, ChainEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceEntry>,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

/// A map built from a document entry, together with its declared level.
pub struct BuiltMap {
    pub map: SimplicialMap,
    pub level: usize,
    pub domain_base: Arc<SimplicialComplex>,
    pub codomain: Arc<SimplicialComplex>,
}

/// Parse and validate a document from JSON text.
pub fn parse_document(text: &str) -> Result<ComplexDocument> {
    let doc: ComplexDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.validate()?;
    Ok(doc)
}

/// Serialize a document to canonical JSON text (stable field and key order,
/// two-space indentation, trailing newline).
pub fn serialize_document(doc: &ComplexDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("document serialization");
    text.push('\n');
    text
}

impl ComplexDocument {
    /// Wrap a complex (plus optional layout) in a fresh document.
    pub fn from_complex(
        complex: &SimplicialComplex,
        layout: &BTreeMap<u32, Vec<f64>>,
    ) -> Self {
        let vertices = complex
            .vertex_ids()
            .into_iter()
            .map(|id| VertexEntry {
                id,
                layout: layout.get(&id).cloned(),
            })
            .collect();
        let maximal_simplices = complex
            .maximal_simplices()
            .iter()
            .map(|s| s.vertices().to_vec())
            .collect();
        ComplexDocument {
            format_version: FORMAT_VERSION.to_string(),
            vertices,
            maximal_simplices,
            maps: BTreeMap::new(),
            chains: BTreeMap::new(),
            equivalence: None,
        }
    }

    /// Structural validation beyond what serde enforces.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidDocument(format!(
                "unsupported format_version {:?} (this build reads {:?})",
                self.format_version, FORMAT_VERSION
            )));
        }
        if self.maximal_simplices.is_empty() {
            return Err(Error::EmptyComplex);
        }
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return Err(Error::InvalidDocument(format!(
                    "duplicate vertex entry {}",
                    v.id
                )));
            }
            if let Some(layout) = &v.layout {
                if layout.len() != 2 && layout.len() != 3 {
                    return Err(Error::InvalidDocument(format!(
                        "vertex {} layout must have 2 or 3 coordinates",
                        v.id
                    )));
                }
                if layout.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDocument(format!(
                        "vertex {} layout has a non-finite coordinate",
                        v.id
                    )));
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut used = BTreeSet::new();
        for s in &self.maximal_simplices {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() || sorted.as_slice() != s.as_slice() {
                return Err(Error::MalformedSimplex(format!("{s:?}")));
            }
            if !seen.insert(sorted) {
                return Err(Error::InvalidDocument(format!(
                    "duplicate maximal simplex {s:?}"
                )));
            }
            used.extend(s.iter().copied());
        }
        for v in &used {
            if !ids.contains(v) {
                return Err(Error::InvalidDocument(format!(
                    "simplex vertex {v} missing from the vertices list"
                )));
            }
        }
        for id in &ids {
            if !used.contains(id) {
                return Err(Error::InvalidDocument(format!(
                    "vertex {id} is not used by any maximal simplex"
                )));
            }
        }
        for (name, entry) in &self.maps {
            if name.is_empty() {
                return Err(Error::InvalidDocument("empty map name".into()));
            }
            let mut keys = BTreeSet::new();
            for (v, _) in &entry.vertices {
                if !keys.insert(*v) {
                    return Err(Error::InvalidDocument(format!(
                        "map {name:?} assigns vertex {v} twice"
                    )));
                }
            }
            let sorted: Vec<u32> = keys.into_iter().collect();
            let listed: Vec<u32> = entry.vertices.iter().map(|(v, _)| *v).collect();
            if sorted != listed {
                return Err(Error::InvalidDocument(format!(
                    "map {name:?} vertex pairs must be sorted by vertex"
                )));
            }
        }
        for (name, entry) in &self.chains {
            if entry.kind != "straight-line-to-identity" && entry.kind != "constant-identity" {
                return Err(Error::InvalidDocument(format!(
                    "chain {name:?} has unknown kind {:?}",
                    entry.kind
                )));
            }
            if !self.maps.contains_key(&entry.map) {
                return Err(Error::InvalidDocument(format!(
                    "chain {name:?} references missing map {:?}",
                    entry.map
                )));
            }
        }
        if let Some(eq) = &self.equivalence {
            for (role, name) in [("f", &eq.f), ("g", &eq.g)] {
                if !self.maps.contains_key(name) {
                    return Err(Error::InvalidDocument(format!(
                        "equivalence {role} references missing map {name:?}"
                    )));
                }
            }
            for (role, name) in [("h1", &eq.h1), ("h2", &eq.h2)] {
                if !self.chains.contains_key(name) {
                    return Err(Error::InvalidDocument(format!(
                        "equivalence {role} references missing chain {name:?}"
                    )));
                }
            }
            if !(eq.epsilon.is_finite() && eq.epsilon > 0.0) {
                return Err(Error::InvalidDocument(format!(
                    "equivalence epsilon must be positive and finite, got {}",
                    eq.epsilon
                )));
            }
        }
        Ok(())
    }

    /// The stored complex.
    pub fn complex(&self) -> Result<Arc<SimplicialComplex>> {
        let maximal: Vec<Simplex> = self
            .maximal_simplices
            .iter()
            .map(|s| Simplex::new(s.clone()))
            .collect::<Result<_>>()?;
        Ok(Arc::new(SimplicialComplex::from_maximal(&maximal)?))
    }

    /// Layout coordinates when every vertex carries them, with uniform arity.
    pub fn layout(&self) -> Option<BTreeMap<u32, Vec<f64>>> {
        let mut layout = BTreeMap::new();
        let mut arity = None;
        for v in &self.vertices {
            let coords = v.layout.as_ref()?;
            match arity {
                None => arity = Some(coords.len()),
                Some(n) if n != coords.len() => return None,
                _ => {}
            }
            layout.insert(v.id, coords.clone());
        }
        Some(layout)
    }

    fn complex_from(&self, maximal: &[Vec<u32>]) -> Result<Arc<SimplicialComplex>> {
        if maximal.is_empty() {
            return self.complex();
        }
        let maximal: Vec<Simplex> = maximal
            .iter()
            .map(|s| Simplex::new(s.clone()))
            .collect::<Result<_>>()?;
        Ok(Arc::new(SimplicialComplex::from_maximal(&maximal)?))
    }

    /// Build a named map: its domain is the declared base subdivided
    /// `domain_level` times.
    pub fn build_map(&self, name: &str) -> Result<BuiltMap> {
        let entry = self
            .maps
            .get(name)
            .ok_or_else(|| Error::InvalidDocument(format!("no map named {name:?}")))?;
        let domain_base = self.complex_from(&entry.domain)?;
        let codomain = self.complex_from(&entry.codomain)?;
        let level = entry.domain_level as usize;
        let domain = if level == 0 {
            domain_base.clone()
        } else {
            let mut tower = SubdivisionTower::new(domain_base.clone());
            tower.ensure_depth(level)?;
            tower.complex(level)?.clone()
        };
        let images: BTreeMap<u32, u32> = entry.vertices.iter().copied().collect();
        let map = SimplicialMap::new(domain, codomain.clone(), images)?;
        Ok(BuiltMap {
            map,
            level,
            domain_base,
            codomain,
        })
    }

    /// Build a named homotopy chain from its map reference.
    pub fn build_chain(&self, name: &str) -> Result<HomotopyChain> {
        let entry = self
            .chains
            .get(name)
            .ok_or_else(|| Error::InvalidDocument(format!("no chain named {name:?}")))?;
        let built = self.build_map(&entry.map)?;
        let mut tower = SubdivisionTower::new(built.domain_base.clone());
        tower.ensure_depth(built.level)?;
        let tower = Arc::new(tower);
        let domain = Space::new(tower, built.level)?;
        match entry.kind.as_str() {
            "constant-identity" => {
                HomotopyChain::constant(PlEval::Identity, domain, built.codomain)
            }
            "straight-line-to-identity" => {
                let moving = PlEval::affine(
                    domain.clone(),
                    built.map,
                    Space::base_space(built.codomain.clone()),
                )?;
                HomotopyChain::straight_line(moving, PlEval::Identity, domain, built.codomain)
            }
            other => Err(Error::InvalidDocument(format!(
                "chain {name:?} has unknown kind {other:?}"
            ))),
        }
    }

    /// Assemble the stored equivalence instance.
    pub fn equivalence_data(&self) -> Result<EquivalenceData> {
        let entry = self
            .equivalence
            .as_ref()
            .ok_or_else(|| Error::InvalidDocument("document has no equivalence".into()))?;
        let f = self.build_map(&entry.f)?;
        let g = self.build_map(&entry.g)?;
        let h1 = self.build_chain(&entry.h1)?;
        let h2 = self.build_chain(&entry.h2)?;
        EquivalenceData::new(
            f.domain_base.clone(),
            g.domain_base.clone(),
            f.map,
            f.level,
            g.map,
            g.level,
            h1,
            h2,
            entry.epsilon,
        )
    }
}
