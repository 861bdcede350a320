//! Coefficients of the asymptotic second moment of zeta at its local
//! extrema, together with the Hardy Z-function tooling used to check them.

pub mod arithmetic;
pub mod coefficients;
pub mod error;
pub mod experiment;
pub mod hardy_z;
pub mod scalar;
pub mod series;
pub mod special;
pub mod stieltjes;

pub use error::{Error, Result};
pub use scalar::{BigReal, RealScalar, Scalar};
pub use series::{one_over_s_series, LaurentSeries};

/// Default high-precision real.
pub type Real = BigReal;
/// Laurent series over the high-precision real.
pub type Series = LaurentSeries<BigReal>;
pub type SeriesF64 = LaurentSeries<f64>;
pub type ExactSeries = LaurentSeries<num_rational::BigRational>;
