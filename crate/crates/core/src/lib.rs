//! Finite-scale laboratory for convex hyperspaces of probability measures.
//!
//! Every object here is a finite truncation of an infinite construction:
//! finite metric spaces with full distance matrices, the hypercube-corner
//! graphs `G(n,k)` with their L∞ path metric, spaces glued along the
//! maximal metric, Kantorovich distances between discrete measures,
//! Hausdorff distances between finitely generated convex sets of measures
//! and between polytopes, and a convex solver that bounds the Lipschitz
//! constant of retractions onto a Euclidean sample from below.
//!
//! Properness of the infinite spaces is not modeled: closed balls in a
//! finite space are trivially compact.

pub mod error;
pub mod euclid;
pub mod hyperspace;
mod lp;
pub mod metric;
pub mod obstruction;
pub mod report;
pub mod sample;
pub mod spaces;
pub mod transport;

pub use error::{Error, Result};
pub use euclid::{
    barycenter, barycenter_image, hausdorff_polytopes, min_norm_point, nearest_point,
    pi_lemma_probe, EmbeddedMeasure, NearestPoint, Polytope, ProbeFamily, ProbeRecord, ProbeReport,
};
pub use hyperspace::{
    ccp_pushforward, dist_point_to_hull, hausdorff_ccp, ConvexMeasureSet, HausdorffCcp, HullDistance,
};
pub use metric::{
    chain_components, glue_maximal, lipschitz_constant, lipschitz_with, verify_metric,
    AxiomReport, AxiomViolation, ChainReport, FiniteMetricSpace, GlueResult, LipschitzReport, PointMap, TOL,
};
pub use obstruction::{
    composed_retraction, retraction_lower_bound, ComposedRetraction, Initialization,
    ObstructionResult, PlacedPoint, RetractionInstance, SolveStatus, SolverOptions,
};
pub use report::{run_suite, CheckRecord, ExperimentConfig, Grids, Status, Suite, SuiteReport, Tolerances};
pub use spaces::{
    build_assembly, build_gnk, gnk_metric, xprime_distance, AssemblyKind, AssemblyParams,
    GnkGraph, PointInfo, Provenance, SampleSpec, Scheme, SpaceAssembly, XPoint,
};
pub use transport::{
    kantorovich, pushforward, DiscreteMeasure, DualPotential, Kantorovich, TransportPlan,
};

/// Serializes a value as pretty JSON with object keys sorted, so that equal
/// values always produce identical bytes.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Serialization(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::Serialization(e.to_string()))
}
