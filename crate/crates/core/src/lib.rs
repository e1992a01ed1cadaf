//! Exact Bell polynomials and generalized moment sequences on `Z^d`.
//!
//! All arithmetic is exact over the Gaussian rationals. The crate builds
//! complete and multivariate Bell polynomials by several independent routes,
//! constructs moment sequences `f_α(x) = B_α(a(x)) m(x)` from an exponential
//! `m` and a family of additive functions `a_μ`, checks the binomial-type
//! functional equations on tabulated data, and recovers `m` and `a_μ` from
//! such tables.

pub mod bell;
pub mod error;
pub mod groupfn;
pub mod measure;
pub mod moment;
pub mod multiindex;
pub mod poly;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use poly::{Monomial, Polynomial, Var};
pub use scalar::Scalar;
