//! Generalized Paley graphs over odd prime-power fields.
//!
//! The crate builds GF(p^n) with explicit discrete-log tables, constructs the
//! graph P(q, k) whose edges are k-th power differences, decides connectivity
//! two independent ways, produces perfect matchings between the private
//! neighborhoods of an edge, and computes the condensed (idleness-adjusted)
//! Ricci curvature of every edge three independent ways:
//!
//! * a closed formula in the field parameters,
//! * a matching-based formula fed by a maximum-matching size,
//! * an exact optimal-transport solve over BFS ground distances.
//!
//! All curvature arithmetic is exact rational; nothing is floated.

pub mod curvature;
mod det_rng;
pub mod field_cache;
pub mod finite_field;
pub mod flow;
pub mod graph;
pub mod matching;
pub mod paley_graph;
pub mod report;

pub use curvature::{
    transport_curvature, CurvatureError, CurvatureRecord, ExactRational, FormulaCurvature,
};
pub use finite_field::{build_field, Element, FieldError, FieldParams, FieldStructure};
pub use graph::{CompleteGraph, SimpleGraph};
pub use matching::{Matching, MatchingError, MatchingMethod};
pub use paley_graph::{build_graph, ComponentReport, GraphError, PaleyGraph};
pub use report::{ReportFormat, SweepConfig, VerificationReport};
