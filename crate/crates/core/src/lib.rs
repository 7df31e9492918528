//! Strict positive definiteness of isotropic kernels on `S^1`, `S^m`,
//! `S^1 x S^m` and `S^1 x M^d` (`M^d` a compact two-point homogeneous space).
//!
//! Kernels are given by their double expansion
//! `f(t, s) = Σ a_{k,l} P_k^1(t) P_l(s)` with a symbolic coefficient support
//! `J_f = {(k, l) : a_{k,l} > 0}`. The crate
//!
//! * evaluates the expansions ([`orthopoly`], [`kernels`]);
//! * decides strict positive definiteness exactly from `J_f` ([`supportsets`],
//!   [`certify`]);
//! * cross-checks verdicts numerically with interpolation matrices and
//!   explicit degenerate configurations ([`geometry`], [`gram`]).
//!
//! ```
//! use sphere_spd::certify::certify_circle_sphere;
//! use sphere_spd::supportsets::{prog, SupportSet2D};
//!
//! let evens_only = SupportSet2D::product(prog(0, 1), prog(0, 2));
//! assert!(!certify_circle_sphere(&evens_only, 2).unwrap().is_spd());
//! ```
//!
//! With the default `parallel` feature, Gram assembly, batteries and the
//! witness search run on rayon; results are identical either way.

pub mod battery;
pub mod certify;
pub mod error;
pub mod geometry;
pub mod gram;
pub mod kernels;
pub mod orthopoly;
pub mod par;
pub mod supportsets;

pub use error::{Error, Result};
