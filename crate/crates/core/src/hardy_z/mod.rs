//! Hardy Z-function evaluation, zero location and per-gap maxima.

pub mod dd;
pub mod extrema;
pub mod riemann_siegel;
pub mod zeros;

pub use extrema::{find_extremum, find_extremum_with, gap_outcome, ExtremumRecord, GapOutcome};
pub use riemann_siegel::{theta, theta_prime, z_eval, z_value};
pub use zeros::{find_zeros, first_zeros, gram_point, load_zeros, parse_zeros, ZeroList, ZeroSource};
