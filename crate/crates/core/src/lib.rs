//! Immersed finite elements for planar linear elasticity eigenvalue problems.
//!
//! The discretization is the P1-nonconforming Crouzeix-Raviart element on a
//! uniform unfitted triangulation of the square `[-1,1]^2`. Elements crossed
//! by a material interface carry piecewise-linear basis functions that satisfy
//! displacement and traction continuity across the interface chord, so the
//! mesh never needs to fit the interface geometry. The broken bilinear form is
//! stabilized by an edge-jump penalty, which keeps the scheme coercive and
//! locking-free for nearly incompressible materials.
//!
//! The crate is organized along the pipeline:
//!
//! * [`geometry`] - meshes, level sets, and interface cuts
//! * [`material`] - piecewise-constant Lame coefficients
//! * [`basis`] - standard and immersed local bases
//! * [`quadrature`] - triangle, polygon, and segment rules
//! * [`assembly`] - stiffness/stabilization/mass assembly and dof handling
//! * [`solver`] - sparse SPD factorization and a shift-invert Lanczos eigensolver
//! * [`driver`] - benchmark cases, convergence studies, exports, and reports

pub mod assembly;
pub mod basis;
pub mod driver;
mod error;
pub mod geometry;
pub mod material;
pub mod quadrature;
pub mod solver;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// 2D point / vector type used throughout.
pub type Vec2 = nalgebra::Vector2<f64>;
