//! Shipped fixture documents: regeneration (ignored; run on purpose to
//! refresh the files) and validation that the shipped bytes stay canonical
//! and in sync with the library's own constructions.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use squeeze_core::complex::{Simplex, SimplicialComplex};
use squeeze_core::document::{
    parse_document, serialize_document, ChainEntry, ComplexDocument, EquivalenceEntry, MapEntry,
    VertexEntry, FORMAT_VERSION,
};
use squeeze_core::retraction::build_retraction_default;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .canonicalize()
        .expect("fixtures directory")
}

fn entry(id: u32, layout: Option<Vec<f64>>) -> VertexEntry {
    VertexEntry { id, layout }
}

fn bare(
    vertices: Vec<VertexEntry>,
    maximal: Vec<Vec<u32>>,
) -> ComplexDocument {
    ComplexDocument {
        format_version: FORMAT_VERSION.into(),
        vertices,
        maximal_simplices: maximal,
        maps: BTreeMap::new(),
        chains: BTreeMap::new(),
        equivalence: None,
    }
}

fn delta1_doc() -> ComplexDocument {
    bare(
        vec![
            entry(0, Some(vec![0.0, 0.0])),
            entry(1, Some(vec![1.0, 0.0])),
        ],
        vec![vec![0, 1]],
    )
}

fn delta2_doc() -> ComplexDocument {
    bare(
        vec![
            entry(0, Some(vec![0.0, 0.0])),
            entry(1, Some(vec![1.0, 0.0])),
            entry(2, Some(vec![0.5, 0.866025403784])),
        ],
        vec![vec![0, 1, 2]],
    )
}

fn delta3_doc() -> ComplexDocument {
    bare(
        vec![entry(0, None), entry(1, None), entry(2, None), entry(3, None)],
        vec![vec![0, 1, 2, 3]],
    )
}

fn boundary_plus_edge_doc() -> ComplexDocument {
    bare(
        vec![
            entry(0, Some(vec![0.0, 0.0])),
            entry(1, Some(vec![1.0, 0.0])),
            entry(2, Some(vec![0.5, 0.866025403784])),
            entry(3, Some(vec![1.3, 1.2])),
        ],
        vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![2, 3]],
    )
}

fn path2_doc() -> ComplexDocument {
    bare(
        vec![
            entry(0, Some(vec![0.0, 0.0])),
            entry(1, Some(vec![1.0, 0.0])),
            entry(2, Some(vec![2.0, 0.0])),
        ],
        vec![vec![0, 1], vec![1, 2]],
    )
}

fn collapse_map_doc() -> ComplexDocument {
    let mut doc = delta2_doc();
    doc.maps.insert(
        "collapse".into(),
        MapEntry {
            domain: Vec::new(),
            domain_level: 0,
            codomain: vec![vec![0, 1]],
            vertices: vec![(0, 0), (1, 0), (2, 1)],
        },
    );
    doc
}

fn squeeze_identity_doc() -> ComplexDocument {
    let mut doc = delta2_doc();
    doc.maps.insert(
        "id".into(),
        MapEntry {
            domain: Vec::new(),
            domain_level: 0,
            codomain: Vec::new(),
            vertices: vec![(0, 0), (1, 1), (2, 2)],
        },
    );
    doc.chains.insert(
        "still".into(),
        ChainEntry {
            kind: "constant-identity".into(),
            map: "id".into(),
        },
    );
    doc.equivalence = Some(EquivalenceEntry {
        f: "id".into(),
        g: "id".into(),
        h1: "still".into(),
        h2: "still".into(),
        epsilon: 0.05,
    });
    doc
}

fn path_complex() -> Arc<SimplicialComplex> {
    Arc::new(
        SimplicialComplex::from_maximal(&[
            Simplex::new(vec![0, 1]).unwrap(),
            Simplex::new(vec![1, 2]).unwrap(),
        ])
        .unwrap(),
    )
}

fn squeeze_path_doc() -> ComplexDocument {
    let bundle = build_retraction_default(path_complex(), 0.1).unwrap();
    assert_eq!(bundle.depth(), 2);
    let table: Vec<(u32, u32)> = bundle
        .r()
        .vertex_images()
        .iter()
        .map(|(v, w)| (*v, *w))
        .collect();
    let mut doc = path2_doc();
    doc.maps.insert(
        "r".into(),
        MapEntry {
            domain: Vec::new(),
            domain_level: 2,
            codomain: Vec::new(),
            vertices: table,
        },
    );
    doc.maps.insert(
        "id".into(),
        MapEntry {
            domain: Vec::new(),
            domain_level: 0,
            codomain: Vec::new(),
            vertices: vec![(0, 0), (1, 1), (2, 2)],
        },
    );
    doc.chains.insert(
        "settle".into(),
        ChainEntry {
            kind: "straight-line-to-identity".into(),
            map: "r".into(),
        },
    );
    doc.equivalence = Some(EquivalenceEntry {
        f: "r".into(),
        g: "id".into(),
        h1: "settle".into(),
        h2: "settle".into(),
        epsilon: 0.25,
    });
    doc
}

fn all_fixtures() -> Vec<(&'static str, ComplexDocument)> {
    vec![
        ("delta1.json", delta1_doc()),
        ("delta2.json", delta2_doc()),
        ("delta3.json", delta3_doc()),
        ("boundary_plus_edge.json", boundary_plus_edge_doc()),
        ("path2.json", path2_doc()),
        ("collapse_map.json", collapse_map_doc()),
        ("squeeze_identity.json", squeeze_identity_doc()),
        ("squeeze_path.json", squeeze_path_doc()),
    ]
}

/// Rewrite every fixture file from the library's own constructions.
/// Run manually: cargo test -p squeeze-core --test fixtures -- --ignored
#[test]
#[ignore = "writes the fixture files; run only to regenerate them"]
fn regenerate_fixtures() {
    let dir = fixture_dir();
    for (name, doc) in all_fixtures() {
        std::fs::write(dir.join(name), serialize_document(&doc)).unwrap();
    }
}

#[test]
fn shipped_fixtures_are_canonical_and_current() {
    let dir = fixture_dir();
    for (name, expected) in all_fixtures() {
        let text = std::fs::read_to_string(dir.join(name))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc, expected, "{name} drifted from the library construction");
        assert_eq!(
            serialize_document(&doc),
            text,
            "{name} is not canonical; regenerate fixtures"
        );
    }
}

#[test]
fn path_fixture_assembles_into_a_valid_instance() {
    let data = squeeze_path_doc().equivalence_data().unwrap();
    assert_eq!(data.epsilon_claimed(), 0.25);
}

#[test]
fn identity_fixture_assembles_into_a_valid_instance() {
    let data = squeeze_identity_doc().equivalence_data().unwrap();
    assert_eq!(data.epsilon_claimed(), 0.05);
}
