//! Numerical laboratory for G₂-structures with a circle symmetry: exterior
//! algebra, SU(3)/G₂ linear algebra, the circle reduction, torsion
//! verification, reduced functionals and their gradient flows.
//!
//! Everything is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.

pub mod discrete_geo;
pub mod exterior;
pub mod flows;
pub mod functionals;
pub mod g2su3;
pub mod linalg;
pub mod ode;
pub mod reduction;
pub mod sampling;
pub mod scalar;
pub mod torsion_verify;

pub use scalar::Real;

pub type Form = exterior::Form<f64>;
pub type Metric = exterior::Metric<f64>;
pub type Matrix = linalg::Matrix<f64>;
