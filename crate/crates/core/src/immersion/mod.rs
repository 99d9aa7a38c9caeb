//! Warped-product charts immersed in a real space form, and the extrinsic
//! data (fundamental forms, adapted frames, mean curvature) at a point.
//!
//! Sphere and hyperbolic ambients are realized as the standard model
//! hypersurfaces of radius `1/√|c|` in a flat model space of dimension `m+1`
//! (Euclidean, resp. Minkowski with the time-like axis first). The normal
//! frame is always chosen model-orthogonal to the position vector, so the
//! second fundamental form read off against it is the one relative to the
//! space form rather than to the flat model.

mod chart;
mod point;

use thiserror::Error;

use crate::exprlang::ExprError;
use crate::geomcore::GeomError;

pub use chart::{build_chart, Bound, ChartSpec, SpaceForm, SpaceFormKind, WarpedChart};
pub use point::{
    adapted_frame, first_fundamental_form, metric_jet, second_fundamental_form, MetricJet,
    PointData,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImmersionError {
    #[error("invalid chart: {0}")]
    Spec(String),
    #[error("validation failed: {invariant} at u = {witness:?}")]
    Validation {
        invariant: String,
        witness: Vec<f64>,
    },
    #[error("coordinate '{coord}' = {value} lies outside the open interval ({lo}, {hi})")]
    OutsideDomain {
        coord: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("degenerate induced metric at u = {at:?} (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { at: Vec<f64>, min_eigenvalue: f64 },
    #[error("normal space has dimension {found}, expected {expected}")]
    NormalRank { found: usize, expected: usize },
    #[error("expression error: {0}")]
    Expr(#[from] ExprError),
    #[error("linear algebra error: {0}")]
    Geom(#[from] GeomError),
}
