//! Zeros of the Hardy Z-function on the critical line.
//!
//! Zeros are found by scanning a grid of `mean_gap / 8`, refining each sign
//! change to `1e-8`, and probing local minima of `|Z|` for close pairs.
//! [`first_zeros`] counts exactly by working between good Gram points,
//! where `N(g_n) = n + 1`.

use std::f64::consts::PI;
use std::path::Path;

use log::{debug, warn};
use rayon::prelude::*;

use super::riemann_siegel::{theta_prime, theta_unchecked, z_fast, T_MIN};
use crate::error::{Error, Result};

pub const ZERO_TOL: f64 = 1e-8;
const GRID_DIV: f64 = 8.0;
const GRAM_CHUNK: i64 = 128;
const CHUNKS_PER_BATCH: usize = 64;
const FIRST_WINDOW_START: f64 = 14.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroSource {
    Computed,
    File,
}

#[derive(Clone, Debug)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub source: ZeroSource,
    pub height_max: f64,
}

impl ZeroList {
    fn new(ordinates: Vec<f64>, source: ZeroSource) -> Self {
        let height_max = ordinates.last().copied().unwrap_or(0.0);
        ZeroList {
            ordinates,
            source,
            height_max,
        }
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

/// Average spacing of zeros near height `t`.
pub fn mean_gap(t: f64) -> f64 {
    2.0 * PI / (t / (2.0 * PI)).ln().max(0.5)
}

/// Smooth zero-count difference `(theta(b) - theta(a)) / pi`.
pub fn theta_count(a: f64, b: f64) -> f64 {
    (theta_unchecked(b) - theta_unchecked(a)) / PI
}

/// Regula falsi with the Illinois modification, run until the bracket is
/// narrower than `tol`. `fa` and `fb` must have opposite signs.
pub fn refine_sign_change(
    f: &impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> f64 {
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        let moved_right;
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
            moved_right = true;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
            moved_right = false;
        }
        if b - a <= tol {
            break;
        }
        // once the estimate has converged from one side, close the bracket
        // with a probe just across it
        let probe = if moved_right { b - 0.45 * tol } else { a + 0.45 * tol };
        if probe > a && probe < b && (fc.abs() < 1e-9 || (b - a) < 1e3 * tol) {
            let fp = f(probe);
            if (fp > 0.0) == (fb > 0.0) {
                b = probe;
                fb = fp;
            } else {
                a = probe;
                fa = fp;
            }
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the minimum of `s * Z` on `[l, r]`, stopping
/// early once the sign flips. Returns the point with the smallest value.
fn dip_search(f: &impl Fn(f64) -> f64, s: f64, l: f64, r: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (l, r);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = s * f(x1);
    let mut f2 = s * f(x2);
    for _ in 0..40 {
        if f1 < 0.0 {
            return (x1, f1 * s);
        }
        if f2 < 0.0 {
            return (x2, f2 * s);
        }
        if b - a < 1e-6 * (r - l) {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = s * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = s * f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1 * s)
    } else {
        (x2, f2 * s)
    }
}

/// Zeros of `f` on `[a, b]` from a grid of `mean_gap / div`.
fn scan_with(f: &impl Fn(f64) -> f64, a: f64, b: f64, div: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if b <= a {
        return out;
    }
    let mut ts = vec![a];
    let mut t = a;
    loop {
        t += mean_gap(t) / div;
        if t >= b {
            ts.push(b);
            break;
        }
        ts.push(t);
    }
    let zs: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    let positive = |z: f64| z >= 0.0;
    for i in 0..ts.len() - 1 {
        if positive(zs[i]) != positive(zs[i + 1]) {
            out.push(refine_sign_change(f, ts[i], ts[i + 1], zs[i], zs[i + 1], ZERO_TOL));
        } else if i >= 1
            && positive(zs[i - 1]) == positive(zs[i])
            && zs[i].abs() < zs[i - 1].abs()
            && zs[i].abs() < zs[i + 1].abs()
        {
            let s = if positive(zs[i]) { 1.0 } else { -1.0 };
            let (tm, zm) = dip_search(f, s, ts[i - 1], ts[i + 1]);
            if positive(zm) != positive(zs[i]) {
                debug!("close pair near t = {tm}");
                out.push(refine_sign_change(f, ts[i - 1], tm, zs[i - 1], zm, ZERO_TOL));
                out.push(refine_sign_change(f, tm, ts[i + 1], zm, zs[i + 1], ZERO_TOL));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Zeros in `[t_lo, t_hi]`. The count is checked against theta
/// differencing to within 2; a mismatch triggers one rescan at a quarter of
/// the grid step.
pub fn find_zeros(t_lo: f64, t_hi: f64) -> Result<ZeroList> {
    if t_lo < FIRST_WINDOW_START || !t_lo.is_finite() || !t_hi.is_finite() {
        return Err(Error::Domain(format!(
            "zero search needs 14 <= t_lo, got {t_lo}"
        )));
    }
    if t_hi <= t_lo {
        return Ok(ZeroList::new(Vec::new(), ZeroSource::Computed));
    }
    let f = |t: f64| z_fast(t);
    let expected = theta_count(t_lo, t_hi);
    let mut div = GRID_DIV;
    for attempt in 0..2 {
        let zs = scan_with(&f, t_lo, t_hi, div);
        if (zs.len() as f64 - expected).abs() <= 2.0 {
            return Ok(ZeroList::new(zs, ZeroSource::Computed));
        }
        if attempt == 1 {
            return Err(Error::MissedZero {
                t_lo,
                t_hi,
                found: zs.len(),
                expected: expected.round() as i64,
            });
        }
        warn!(
            "window [{t_lo}, {t_hi}]: {} zeros vs {expected:.2} expected, rescanning",
            zs.len()
        );
        div *= 4.0;
    }
    unreachable!()
}

/// Gram point `g_n`: `theta(g_n) = n pi`, for `n >= -1`.
pub fn gram_point(n: i64) -> f64 {
    let target = n as f64 * PI;
    let nf = (n as f64 + 2.0).max(2.0);
    let mut t = (2.0 * PI * nf / nf.ln().max(1.0)).max(T_MIN + 8.0);
    for _ in 0..100 {
        let step = (theta_unchecked(t) - target) / theta_prime(t);
        t -= step;
        if step.abs() < 1e-12 * t {
            break;
        }
    }
    t
}

fn is_good_gram(n: i64, g: f64) -> bool {
    let z = z_fast(g);
    if n % 2 == 0 {
        z > 0.0
    } else {
        z < 0.0
    }
}

/// Scans `[a, b]` expecting exactly `expected` zeros, refining the grid
/// twice before giving up.
fn scan_exact(a: f64, b: f64, expected: usize) -> Result<Vec<f64>> {
    let f = |t: f64| z_fast(t);
    let mut div = GRID_DIV;
    let mut found = 0;
    for _ in 0..3 {
        let zs = scan_with(&f, a, b, div);
        if zs.len() == expected {
            return Ok(zs);
        }
        found = zs.len();
        warn!("[{a}, {b}]: {found} zeros, expected {expected}; refining grid");
        div *= 4.0;
    }
    Err(Error::MissedZero {
        t_lo: a,
        t_hi: b,
        found,
        expected: expected as i64,
    })
}

/// Next good Gram index at or after `n`.
fn next_good_gram(mut n: i64) -> Result<(i64, f64)> {
    for _ in 0..10_000 {
        let g = gram_point(n);
        if is_good_gram(n, g) {
            return Ok((n, g));
        }
        n += 1;
    }
    Err(Error::NonConvergence {
        what: format!("search for a good Gram point after index {n}"),
        limit: 10_000,
    })
}

/// The first `count` zeros, with the count in each window between good
/// Gram points checked exactly. Windows are scanned in parallel and merged
/// in order.
pub fn first_zeros(count: usize) -> Result<ZeroList> {
    if count == 0 {
        return Ok(ZeroList::new(Vec::new(), ZeroSource::Computed));
    }
    let (n0, g0) = next_good_gram(0)?;
    // no zeros below 14; N(g_n) = n + 1 at a good Gram point
    let mut zeros = scan_exact(FIRST_WINDOW_START, g0, (n0 + 1) as usize)?;
    let mut prev = (n0, g0);
    while zeros.len() < count {
        let mut bounds = Vec::with_capacity(CHUNKS_PER_BATCH);
        let remaining = count - zeros.len();
        let mut cursor = prev;
        let mut covered = 0usize;
        while bounds.len() < CHUNKS_PER_BATCH && covered < remaining {
            let next = next_good_gram(cursor.0 + GRAM_CHUNK)?;
            covered += (next.0 - cursor.0) as usize;
            bounds.push((cursor, next));
            cursor = next;
        }
        let batches = bounds
            .par_iter()
            .map(|&((na, ga), (nb, gb))| scan_exact(ga, gb, (nb - na) as usize))
            .collect::<Vec<_>>();
        for b in batches {
            zeros.extend(b?);
        }
        prev = cursor;
    }
    zeros.truncate(count);
    Ok(ZeroList::new(zeros, ZeroSource::Computed))
}

/// Reads one ordinate per line (`#` comments and blank lines ignored),
/// checks ordering, and verifies every `sample_every`-th ordinate is a sign
/// change of Z within `1e-4`.
pub fn load_zeros(path: &Path, sample_every: usize) -> Result<ZeroList> {
    let text = std::fs::read_to_string(path)?;
    parse_zeros(&text, sample_every)
}

pub fn parse_zeros(text: &str, sample_every: usize) -> Result<ZeroList> {
    let sample_every = sample_every.max(1);
    let mut out: Vec<f64> = Vec::new();
    let mut data_index = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::DataIntegrity {
            line: line_no,
            reason: format!("not a number: {line:?}"),
        })?;
        if !(v > FIRST_WINDOW_START) {
            return Err(Error::DataIntegrity {
                line: line_no,
                reason: format!("ordinate {v} below the first zero"),
            });
        }
        if let Some(&last) = out.last() {
            if v <= last {
                return Err(Error::DataIntegrity {
                    line: line_no,
                    reason: format!("{v} does not exceed previous ordinate {last}"),
                });
            }
        }
        if data_index.is_multiple_of(sample_every) {
            let lo = z_fast(v - 1e-4);
            let hi = z_fast(v + 1e-4);
            if (lo >= 0.0) == (hi >= 0.0) {
                return Err(Error::DataIntegrity {
                    line: line_no,
                    reason: format!("no sign change of Z within 1e-4 of {v}"),
                });
            }
        }
        out.push(v);
        data_index += 1;
    }
    Ok(ZeroList::new(out, ZeroSource::File))
}
