//! Isotonic regression on directed acyclic graphs.
//!
//! * Weighted ℓp norms for `1 <= p < ∞` are solved by an interior point
//!   method whose Newton systems reduce to sparse symmetric diagonally
//!   dominant solves ([`ipm`]).
//! * Weighted ℓ∞ and strict isotonic regression reduce to inf- and
//!   lex-minimal Lipschitz extensions on an augmented graph ([`reduction`],
//!   [`lipschitz`]).
//!
//! With the `oracles` feature, [`oracles`] provides brute-force reference
//! solvers for small instances.
//!
//! ```
//! use dagiso::{isotonic_inf, isotonic_strict, long_step_ipm, Dag, InfVariant, IsoInstance};
//!
//! let dag = Dag::from_pairs(3, &[(0, 1), (1, 2)])?;
//! let y = vec![2.0, 0.0, 1.0];
//! let w = vec![1.0; 3];
//!
//! let inst = IsoInstance::new(dag.clone(), y.clone(), w.clone(), 2.0)?;
//! let fit = long_step_ipm(&inst, 1e-6)?;
//! assert!(fit.gap_bound <= 1e-6);
//! assert!((fit.x[0] - 1.0).abs() < 1e-3 && (fit.x[2] - 1.0).abs() < 1e-3);
//!
//! let inf = isotonic_inf(&dag, &y, &w, InfVariant::Avg)?;
//! assert_eq!(inf.error, 1.0);
//! let strict = isotonic_strict(&dag, &y, &w)?;
//! assert_eq!(strict, vec![1.0, 1.0, 1.0]);
//! # Ok::<(), dagiso::IsoError>(())
//! ```

pub mod barrier;
pub mod dag;
pub mod error;
pub mod instance;
pub mod ipm;
pub mod linalg;
pub mod lipschitz;
#[cfg(feature = "oracles")]
pub mod oracles;
pub mod reduction;

pub use barrier::FeasiblePoint;
pub use dag::{Dag, Edge, TopoOrder};
pub use error::{IsoError, Result};
pub use instance::IsoInstance;
pub use ipm::{isotonic_ipm, isotonic_ipm_with, long_step_ipm, long_step_ipm_with, IpmMode, IpmOptions, SolveReport};
pub use lipschitz::{comp_inf_min, comp_lex_min, InfVariant, PartialLabeling};
pub use reduction::{isotonic_inf, isotonic_strict, InfRegression};
