//! Error bounds for polyhedral convex inequalities.
//!
//! For a finite max-of-affine function `f(x) = max_i (<a_i, x> - b_i)` on R^n this
//! crate computes the local and global error bound moduli, the boundary and outer
//! subdifferential slopes, the localized slope `tau(f, x, eps, delta)`, the radius of
//! error bound stability under small perturbations, and it synthesizes the linear
//! perturbation that destroys the error bound once the radius is exceeded.
//!
//! Every exact quantity has an independent estimator in [`oracle`] (Monte-Carlo ratio
//! estimates and brute-force geometry) used for cross-validation.
//!
//! ```
//! use ebound::{PolyhedralFunction, Settings, slopes};
//!
//! // max{-2x + 2, -x + 1, 2x - 5}
//! let f = PolyhedralFunction::from_rows(1, &[(&[-2.0], -2.0), (&[-1.0], -1.0), (&[2.0], 5.0)]).unwrap();
//! let cfg = Settings::default();
//! assert_eq!(slopes::global_boundary_slope(&f, &cfg).unwrap().value(), 1.0);
//! assert_eq!(slopes::global_outer_slope(&f, &cfg).unwrap().value(), 2.0);
//! ```

pub mod cli;
mod error;
pub mod geometry;
pub(crate) mod linalg;
pub mod oracle;
pub mod perturb;
pub mod polyfun;
mod settings;
pub mod slopes;

pub use error::{Error, Result};
pub use geometry::{Halfspace, Hyperplane, Polyhedron, Polytope};
pub use polyfun::{ActiveSet, AffinePiece, PolyhedralFunction, Region};
pub use settings::Settings;
pub use slopes::{ExtReal, SlopeReport};
