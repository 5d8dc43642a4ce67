//! Sub-Riemannian geometry of H-type Carnot groups.
//!
//! The crate builds H-type Lie algebras from explicit Clifford module
//! representations, evaluates the closed-form normal geodesics from the
//! origin, inverts the exponential map, computes Carnot–Carathéodory
//! distances and decides membership in the cut locus of the origin
//! (which is exactly the center `{(0, z)}`).
//!
//! Points are written in exponential coordinates `(x, z)` with `x` in the
//! horizontal layer (dimension `m`) and `z` in the center (dimension `r`).
//!
//! ```
//! use htype::{HTypeAlgebra, GroupPoint, connect::classify};
//!
//! let alg = HTypeAlgebra::build(1, 2).unwrap();
//! let target = GroupPoint::new(&alg, vec![0.0, 0.0], vec![1.0]).unwrap();
//! let result = classify(&alg, &target).unwrap();
//! assert!(result.in_cut_locus);
//! assert!((result.distance.powi(2) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
//! ```

pub mod algebra;
pub mod cli;
pub mod connect;
pub mod error;
pub mod geodesics;
pub mod io;
pub mod numeric;
pub mod par;

pub use algebra::{Covector, GroupPoint, HTypeAlgebra};
pub use connect::{ConnectionResult, Multiplicity, RootSet, TargetClass};
pub use error::{Error, Result};
pub use geodesics::{Geodesic, GeodesicSample, GeodesicSpec};
pub use par::Execution;
