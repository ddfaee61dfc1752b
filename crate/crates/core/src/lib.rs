//! Exact lower and upper bounds on an adjusted regression slope over every
//! subset of a set of candidate covariates.
//!
//! Given a response `y`, an explanatory variable `x` and `p` covariates, the
//! coefficient of `x` changes depending on which covariates enter the
//! least-squares model. [`search::branch_and_bound`] finds the minimum and
//! maximum of that coefficient over all `2^p` models, pruning whole families
//! of extensions with a closed-form envelope ([`bounds::envelope`]).
//! [`search::brute_force`] fits every model and serves as a reference on
//! small problems.
//!
//! ```
//! use slopebound::{data::Dataset, linalg::Matrix, search};
//!
//! let y = vec![1.0, 2.0, 1.5, 3.5, 4.0, 2.0];
//! let x = vec![0.5, 1.0, 1.0, 2.0, 2.5, 0.0];
//! let s = Matrix::new(
//!     vec![vec![1.0, 0.0, 2.0, 1.0, 0.0, 1.0]],
//!     vec!["age".to_string()],
//! )
//! .unwrap();
//! let data = Dataset::from_columns(y, x, s).unwrap();
//! let bb = search::branch_and_bound(&data).unwrap();
//! let bf = search::brute_force(&data).unwrap();
//! assert!((bb.extrema.lower - bf.extrema.lower).abs() < 1e-12);
//! assert!((bb.extrema.upper - bf.extrema.upper).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod data;
pub mod error;
pub mod linalg;
pub mod search;

pub use error::{Error, Result};

#[cfg(test)]
#[path = "../tests/common/oracle.rs"]
mod oracle;
