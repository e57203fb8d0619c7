//! Exact short-time heat kernel coefficients of compact symmetric spaces.
//!
//! A space is given by its curvature datum (`g`, `β`, `Eⁱ`). The crate derives
//! the holonomy and isometry algebras, validates the symmetric-space
//! identities, and expands the group-average representation of the heat
//! kernel diagonal into exact rational coefficients `a_0, a_1, …`. Independent
//! checks come from closed-form curvature invariants, finite-`t` numerical
//! integration, product factorization and sphere spectra.
//!
//! ```
//! use heatgen::{catalog, heat, series::ExpansionBudget};
//!
//! let s2 = catalog::builtin("S2").unwrap();
//! let report = heat::heat_coefficients(&s2, 2, ExpansionBudget::default()).unwrap();
//! let a: Vec<String> = report.coefficients.iter().map(|q| q.to_string()).collect();
//! assert_eq!(a, ["1", "1/3", "1/15"]);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod gaussian;
pub mod heat;
pub mod numeric;
pub mod rational;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use rational::{QMatrix, Rational};
