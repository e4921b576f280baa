//! Combinatorial and metric machinery for squeezing controlled homotopy
//! equivalences of finite simplicial complexes into triangular form.

pub mod complex;
pub mod document;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod homotopy;
pub mod metric;
pub mod render;
pub mod report;
pub mod retraction;
pub mod sample;
pub mod squeeze;
pub mod subdivision;

pub use complex::{Simplex, SimplicialComplex, SimplicialMap};
pub use document::{parse_document, serialize_document, ComplexDocument};
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use homotopy::{HomotopyChain, PlEval, PlMap};
pub use metric::{BaryPoint, Containment, DistInterval, MeasuredComplex, MetricContext};
pub use render::{auto_layout, render_svg, subdivision_panels, RenderPanel};
pub use report::{CheckSummary, VerificationReport};
pub use retraction::{build_retraction, verify_retraction, RetractionBundle, VerifyOptions};
pub use squeeze::{
    conjecture_probe, identity_equivalence, is_triangular, lemma_constants, squeeze,
    squeeze_constants, verify_sandwich, verify_triangular_equivalence, EquivalenceData,
    SandwichOptions, SqueezeConstants, SqueezeOptions, TriControl, TriangularEquivalence,
};
pub use subdivision::{Space, SubdivisionTower};
