//! Location of the maximum of `Z(t)^2` inside each gap between zeros.

use super::riemann_siegel::z_fast;
use crate::error::{Error, Result};

/// Relative width at which the derivative bisection stops.
pub const LOCATION_REL_TOL: f64 = 1e-4;
const DIFF_STEP_REL: f64 = 1e-6;
const START_INSET: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremumRecord {
    pub index: usize,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub t_star: f64,
    pub z2: f64,
    pub location_tol: f64,
}

/// Outcome of one gap: a record, or a flagged gap where the derivative of
/// `Z^2` showed no sign change.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapOutcome {
    Found(ExtremumRecord),
    Flagged { index: usize, gamma_lo: f64, gamma_hi: f64 },
}

/// Maximum of `f^2` on `(gamma_lo, gamma_hi)` by bisection on the sign of a
/// central difference of `f^2`, stopping below `rel_tol * gap`.
pub fn find_extremum_with(
    f: impl Fn(f64) -> f64,
    index: usize,
    gamma_lo: f64,
    gamma_hi: f64,
    rel_tol: f64,
) -> Result<ExtremumRecord> {
    let gap = gamma_hi - gamma_lo;
    if !(gap > 0.0) {
        return Err(Error::Ordering(format!(
            "gap ({gamma_lo}, {gamma_hi}) is empty"
        )));
    }
    let h = DIFF_STEP_REL * gap;
    let slope = |t: f64| {
        let a = f(t + h);
        let b = f(t - h);
        a * a - b * b
    };
    let mut inset = START_INSET;
    let (mut lo, mut hi) = loop {
        let lo = gamma_lo + inset * gap;
        let hi = gamma_hi - inset * gap;
        if slope(lo) > 0.0 && slope(hi) < 0.0 {
            break (lo, hi);
        }
        inset *= 0.1;
        if inset * gap < 4.0 * h {
            return Err(Error::MultimodalGap { gamma_lo, gamma_hi });
        }
    };
    while hi - lo >= rel_tol * gap {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let z = f(t_star);
    Ok(ExtremumRecord {
        index,
        gamma_lo,
        gamma_hi,
        t_star,
        z2: z * z,
        location_tol: 0.5 * (hi - lo),
    })
}

/// Maximum of `Z(t)^2` between consecutive zeros.
pub fn find_extremum(index: usize, gamma_lo: f64, gamma_hi: f64) -> Result<ExtremumRecord> {
    find_extremum_with(z_fast, index, gamma_lo, gamma_hi, LOCATION_REL_TOL)
}

/// Runs [`find_extremum`] and turns a multimodal gap into a flag.
pub fn gap_outcome(index: usize, gamma_lo: f64, gamma_hi: f64) -> Result<GapOutcome> {
    match find_extremum(index, gamma_lo, gamma_hi) {
        Ok(r) => Ok(GapOutcome::Found(r)),
        Err(Error::MultimodalGap { .. }) => Ok(GapOutcome::Flagged {
            index,
            gamma_lo,
            gamma_hi,
        }),
        Err(e) => Err(e),
    }
}
