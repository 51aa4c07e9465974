//! Sasakian, CR and sub-Riemannian geometry of the Heisenberg group ℍ^{2n+1}.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: exact polynomial vector fields and one-forms, second-order
//!   jets, and a Levi-Civita curvature engine for arbitrary metric fields.
//! * [`heisenberg`]: the group law, its symmetries and the right, left and
//!   intermediate contact metric models, plus pullback and residual checks.
//! * [`cr_algebra`]: the Lie algebra of infinitesimal CR transformations,
//!   its structure constants and the ideal/quotient decomposition.
//! * [`sasaki_cone`]: the Sasaki cone, the deformed structures `S_{1,a}`,
//!   their Reeb flows, moment maps and scalar-curvature calibration.
//! * [`subriemannian`]: horizontal paths and Carnot–Carathéodory distance
//!   estimators (lattice graph, geodesic shooting, closed form).
//! * [`quotients`]: lattices, fundamental domains, descent of structures to
//!   compact nilmanifolds and their first homology.
//!
//! Coordinates on ℝ^{2n+1} are always ordered `(x_1..x_n, y_1..y_n, z)`.

pub mod cr_algebra;
pub mod error;
pub mod heisenberg;
pub mod ode;
pub mod quotients;
pub mod sampling;
pub mod sasaki_cone;
pub mod subriemannian;
pub mod tensor;

pub use error::{Error, Result};
pub use heisenberg::{Model, Point, SasakiStructure};
pub use sasaki_cone::{ConeElement, ConeParams, MomentValue};
pub use subriemannian::{DistanceEstimate, DistanceMethod};
pub use tensor::{CurvatureReport, Jet2, Poly, PolyOneForm, PolyVectorField, Scalar};

/// Largest supported `n`; matrices stay at most 9×9.
pub const MAX_N: usize = 4;

/// Index of `x_i` in the flat coordinate vector.
#[inline]
pub fn ix(_n: usize, i: usize) -> usize {
    i
}

/// Index of `y_i` in the flat coordinate vector.
#[inline]
pub fn iy(n: usize, i: usize) -> usize {
    n + i
}

/// Index of `z` in the flat coordinate vector.
#[inline]
pub fn iz(n: usize) -> usize {
    2 * n
}
