//! Differential-geometry engine: exact polynomial fields, jets, curvature.

pub mod curvature;
pub mod field;
pub mod forms;
pub mod jet;
pub mod poly;

pub use curvature::{christoffel_fd, curvature, sectional, CurvatureReport};
pub use field::{CompiledField, PolyOneForm, PolyVectorField};
pub use forms::{
    exterior_derivative, killing_residual, lie_derivative_form, lie_derivative_metric, metric_at,
    Euclidean, MetricField, OneFormField, VectorField, ZeroField,
};
pub use jet::{Jet2, Scalar, MAX_VARS};
pub use poly::{int, rat, Poly, Rational};
