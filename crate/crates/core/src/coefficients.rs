//! The coefficient pipeline: `c_{k,l}` by Laurent residue extraction,
//! `beta_{k,n}` per k, and the summed `alpha_n`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{with_digits, working_digits, BigReal, RealScalar, Scalar};
use crate::series::{one_over_s_series, LaurentSeries};
use crate::stieltjes::StieltjesTable;

pub const DEFAULT_K_MAX: usize = 80;
pub const DEFAULT_N_MAX: i64 = 22;
pub const DEFAULT_TAIL_TOL: f64 = 1e-18;
/// Consecutive small terms required before a k-sum is cut.
const SMALL_RUN: usize = 3;

/// `c[k][l]` for `1 <= k <= k_max`, `0 <= l <= l_max`.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    k_max: usize,
    l_max: usize,
    digits: u32,
    rows: Vec<Vec<BigReal>>,
    gamma0: BigReal,
    gamma1: BigReal,
}

impl CoefficientTable {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn gamma0(&self) -> &BigReal {
        &self.gamma0
    }

    pub fn gamma1(&self) -> &BigReal {
        &self.gamma1
    }

    pub fn c(&self, k: usize, l: usize) -> Result<&BigReal> {
        if k == 0 || k > self.k_max {
            return Err(Error::IndexOutOfRange {
                what: "k",
                index: k as i64,
                limit: self.k_max as i64,
            });
        }
        self.rows[k - 1].get(l).ok_or(Error::IndexOutOfRange {
            what: "l",
            index: l as i64,
            limit: self.l_max as i64,
        })
    }
}

/// `(zeta'/zeta)' (-zeta'/zeta)^{k-1} zeta^2 / s`, with `zeta` expanded
/// through `(s-1)^trunc`.
pub fn residue_series(
    stieltjes: &StieltjesTable,
    k: usize,
    trunc: i64,
) -> Result<LaurentSeries<BigReal>> {
    let zeta = stieltjes.zeta_series(trunc)?;
    let log_deriv = zeta.diff()?.mul(&zeta.inv()?);
    let d_log_deriv = log_deriv.diff()?;
    let neg_ld = -log_deriv;
    let one_over_s = one_over_s_series::<BigReal>(trunc + 1)?;
    let prod = d_log_deriv
        .mul(&neg_ld.pow((k - 1) as u32))
        .mul(&zeta.mul(&zeta))
        .mul(&one_over_s);
    Ok(prod)
}

/// Builds the `c_{k,l}` table from the given Stieltjes constants at the
/// current working precision. Rows are computed in parallel.
pub fn build_c_table(
    k_max: usize,
    l_max: usize,
    stieltjes: &StieltjesTable,
) -> Result<CoefficientTable> {
    if k_max < 1 || l_max < 2 {
        return Err(Error::Domain(format!(
            "need k_max >= 1 and l_max >= 2, got {k_max}, {l_max}"
        )));
    }
    let trunc = l_max as i64 - 1;
    if trunc as usize > stieltjes.j_max() {
        return Err(Error::TruncationUnderflow(format!(
            "l_max = {l_max} needs gamma_{trunc}, table stops at gamma_{}",
            stieltjes.j_max()
        )));
    }
    let digits = working_digits();
    let rows = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            with_digits(digits, || {
                let series = residue_series(stieltjes, k, trunc)?;
                let base = -(k as i64) - 3;
                (0..=l_max as i64)
                    .map(|l| {
                        let e = base + l;
                        if e < series.lowest_order() {
                            Ok(BigReal::zero())
                        } else {
                            series.coeff(e).cloned().ok_or_else(|| {
                                Error::TruncationUnderflow(format!(
                                    "c[{k}][{l}] beyond series depth {}",
                                    series.trunc_order()
                                ))
                            })
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientTable {
        k_max,
        l_max,
        digits,
        rows,
        gamma0: stieltjes.get(0)?.clone(),
        gamma1: stieltjes.get(1)?.clone(),
    })
}

fn int(n: i64) -> BigReal {
    BigReal::from_i64(n)
}

fn factorial(n: usize) -> BigReal {
    (2..=n as i64).fold(BigReal::one(), |acc, i| acc * int(i))
}

fn binomial(n: usize, k: usize) -> BigReal {
    let k = k.min(n - k);
    let mut acc = BigReal::one();
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int(i as i64 + 1);
    }
    acc
}

fn pow2(k: usize) -> BigReal {
    (0..k).fold(BigReal::one(), |acc, _| acc * int(2))
}

/// `beta_{k,n}` for `n >= -2`.
pub fn beta(k: usize, n: i64, table: &CoefficientTable) -> Result<BigReal> {
    if n < -2 {
        return Err(Error::IndexOutOfRange {
            what: "n",
            index: n,
            limit: -2,
        });
    }
    if n + 2 > table.l_max as i64 {
        return Err(Error::IndexOutOfRange {
            what: "n",
            index: n,
            limit: table.l_max as i64 - 2,
        });
    }
    let c = |l: usize| table.c(k, l).cloned();
    let p = pow2(k);
    let ki = k as i64;
    match n {
        -2 => Ok(p * c(0)? / factorial(k + 2)),
        -1 => {
            let inner = int(-2) - int((ki + 2) * (ki - 3)) * table.gamma0.clone();
            Ok(p / factorial(k + 2) * inner)
        }
        0 => {
            let inner = int((ki + 2) * (ki + 1)) * c(2)? - int(ki) * c(0)?
                + int(ki * (ki + 2)) * c(1)?;
            Ok(p * inner / factorial(k + 2))
        }
        _ => {
            let nu = n as usize;
            let upper = if nu <= k { nu - 1 } else { k };
            let mut sum = BigReal::zero();
            for j in 0..=upper {
                sum = sum + binomial(k, j) * c(j + 2)?;
            }
            let mut out = p.clone() * factorial(nu - 1) / factorial(k - 1) * sum;
            if nu <= k {
                out = out + p * c(nu + 2)? / factorial(k - nu);
            }
            Ok(out)
        }
    }
}

/// A coefficient value with the bookkeeping of its k-sum.
#[derive(Clone, Debug)]
pub struct AlphaValue {
    pub value: BigReal,
    pub k_used: usize,
    pub tail_bound: f64,
}

/// Sums `term(k)` for `k = k_start, ..., k_max`, stopping once
/// `SMALL_RUN` consecutive terms fall below `tail_tol` times the running sum.
fn adaptive_sum(
    what: &str,
    k_start: usize,
    k_max: usize,
    tail_tol: f64,
    mut term: impl FnMut(usize) -> Result<BigReal>,
) -> Result<(BigReal, usize, f64)> {
    let tol = BigReal::from_f64(tail_tol);
    let mut acc = BigReal::zero();
    let mut run = 0;
    let mut last_small = 0.0f64;
    for k in k_start..=k_max {
        let t = term(k)?;
        acc = acc + t.clone();
        let mag = t.abs();
        if mag <= tol.clone() * acc.abs() {
            run += 1;
            last_small = last_small.max(mag.to_f64());
            if run >= SMALL_RUN {
                // terms shrink faster than geometrically; twice the last
                // small term bounds the remainder
                return Ok((acc, k, 2.0 * mag.to_f64().max(last_small)));
            }
        } else {
            run = 0;
            last_small = 0.0;
        }
    }
    Err(Error::NonConvergence {
        what: what.to_string(),
        limit: k_max,
    })
}

fn e_squared() -> BigReal {
    int(2).exp()
}

/// `(e^2 - 5)/2`.
pub fn alpha_minus2_closed() -> BigReal {
    (e_squared() - int(5)) / int(2)
}

/// `5 - e^2 - 10 g0 + 2 e^2 g0`.
pub fn alpha_minus1_closed(g0: &BigReal) -> BigReal {
    let e2 = e_squared();
    int(5) - e2.clone() - int(10) * g0.clone() + int(2) * e2 * g0.clone()
}

/// `12 g1 - 4 e^2 g1 - 5 + e^2 + 10 g0 - 2 e^2 g0 - 4 g0^2`.
pub fn alpha_0_closed(g0: &BigReal, g1: &BigReal) -> BigReal {
    let e2 = e_squared();
    int(12) * g1.clone() - int(4) * e2.clone() * g1.clone() - int(5) + e2.clone()
        + int(10) * g0.clone()
        - int(2) * e2 * g0.clone()
        - int(4) * g0.clone() * g0.clone()
}

/// `alpha_n`: closed forms for `n <= 0`, the double k-sum for `n >= 1`.
pub fn alpha(n: i64, table: &CoefficientTable, tail_tol: f64) -> Result<AlphaValue> {
    let exact = |value| {
        Ok(AlphaValue {
            value,
            k_used: 0,
            tail_bound: 0.0,
        })
    };
    match n {
        i64::MIN..=-3 => Err(Error::IndexOutOfRange {
            what: "n",
            index: n,
            limit: -2,
        }),
        -2 => exact(alpha_minus2_closed()),
        -1 => exact(alpha_minus1_closed(&table.gamma0)),
        0 => exact(alpha_0_closed(&table.gamma0, &table.gamma1)),
        _ => {
            let nu = n as usize;
            if nu + 2 > table.l_max {
                return Err(Error::IndexOutOfRange {
                    what: "n",
                    index: n,
                    limit: table.l_max as i64 - 2,
                });
            }
            let (first, k1, t1) =
                adaptive_sum(&format!("alpha_{n} first sum"), nu, table.k_max, tail_tol, |k| {
                    Ok(pow2(k + 1) * table.c(k, nu + 2)?.clone() / factorial(k - nu))
                })?;
            let (second, k2, t2) =
                adaptive_sum(&format!("alpha_{n} second sum"), 1, table.k_max, tail_tol, |k| {
                    let mut inner = BigReal::zero();
                    for j in 0..=k.min(nu - 1) {
                        inner = inner + binomial(k, j) * table.c(k, j + 2)?.clone();
                    }
                    Ok(pow2(k + 1) / factorial(k - 1) * inner)
                })?;
            let fact = factorial(nu - 1);
            Ok(AlphaValue {
                value: first + fact.clone() * second,
                k_used: k1.max(k2),
                tail_bound: t1 + fact.to_f64() * t2,
            })
        }
    }
}

/// `alpha_n` as `sum_k 2 beta_{k,n}`.
pub fn alpha_via_beta(n: i64, table: &CoefficientTable, tail_tol: f64) -> Result<AlphaValue> {
    let (value, k_used, tail_bound) = adaptive_sum(
        &format!("alpha_{n} via beta"),
        1,
        table.k_max,
        tail_tol,
        |k| Ok(int(2) * beta(k, n, table)?),
    )?;
    Ok(AlphaValue {
        value,
        k_used,
        tail_bound,
    })
}

/// `alpha_n` for `-2 <= n <= n_max`.
#[derive(Clone, Debug)]
pub struct AlphaSet {
    pub n_max: i64,
    pub alpha: BTreeMap<i64, BigReal>,
    pub k_truncation_used: usize,
    pub tail_bound: f64,
    pub tail_tol: f64,
    f64_values: Vec<f64>,
}

impl AlphaSet {
    pub fn compute(table: &CoefficientTable, n_max: i64, tail_tol: f64) -> Result<Self> {
        let mut alpha = BTreeMap::new();
        let mut k_used = 0;
        let mut tail = 0.0f64;
        for n in -2..=n_max {
            let a = self::alpha(n, table, tail_tol)?;
            k_used = k_used.max(a.k_used);
            tail = tail.max(a.tail_bound);
            alpha.insert(n, a.value);
        }
        Ok(Self::from_parts(alpha, n_max, k_used, tail, tail_tol))
    }

    pub fn from_parts(
        alpha: BTreeMap<i64, BigReal>,
        n_max: i64,
        k_truncation_used: usize,
        tail_bound: f64,
        tail_tol: f64,
    ) -> Self {
        let f64_values = alpha.values().map(Scalar::to_f64).collect();
        AlphaSet {
            n_max,
            alpha,
            k_truncation_used,
            tail_bound,
            tail_tol,
            f64_values,
        }
    }

    /// Builds a set from plain `f64` values indexed from `n = -2`.
    pub fn from_f64(values: &[f64]) -> Self {
        let alpha = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i as i64 - 2, BigReal::from_f64(*v)))
            .collect();
        Self::from_parts(alpha, values.len() as i64 - 3, 0, 0.0, 0.0)
    }

    pub fn get(&self, n: i64) -> Option<&BigReal> {
        self.alpha.get(&n)
    }

    pub fn get_f64(&self, n: i64) -> Option<f64> {
        if n < -2 {
            return None;
        }
        self.f64_values.get((n + 2) as usize).copied()
    }
}

/// `(T/2pi) (a_{-2} L^2 + a_{-1} L + sum_{n=0}^{N} a_n L^{-n})`,
/// `L = log(T/2pi)`.
pub fn asymptotic_value(t: f64, alphas: &AlphaSet, n: i64) -> Result<f64> {
    let two_pi = std::f64::consts::TAU;
    if !(t > two_pi) {
        return Err(Error::Domain(format!("T = {t} must exceed 2 pi")));
    }
    if n < -2 || n > alphas.n_max {
        return Err(Error::IndexOutOfRange {
            what: "N",
            index: n,
            limit: alphas.n_max,
        });
    }
    let x = t / two_pi;
    let l = x.ln();
    let a = |i: i64| alphas.get_f64(i).unwrap_or(0.0);
    let mut acc = a(-2) * l * l;
    if n >= -1 {
        acc += a(-1) * l;
    }
    let mut lp = 1.0;
    for i in 0..=n {
        acc += a(i) * lp;
        lp /= l;
    }
    Ok(x * acc)
}

fn eta_equation(eta: f64) -> f64 {
    eta * eta.ln() - eta + 0.5
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smaller positive root of `eta log eta - eta = -1/2`.
pub fn optimal_truncation_eta() -> f64 {
    bisect(0.01, 1.0, eta_equation, 1e-13)
}

/// The larger root, on `(1, 3)`.
pub fn optimal_truncation_eta_upper() -> f64 {
    bisect(1.0, 3.0, eta_equation, 1e-13)
}

/// Renders a coefficient the way the published table does: two decimals
/// through `n = 12`, three significant figures beyond.
pub fn format_alpha(n: i64, value: &BigReal) -> String {
    if n <= 12 {
        format!("{:.2}", value.to_f64())
    } else {
        value.to_scientific(3)
    }
}

/// Three-column text rendering of `alpha_1 ..= alpha_{n_max}`.
pub fn render_alpha_table(alphas: &AlphaSet) -> String {
    let ns: Vec<i64> = (1..=alphas.n_max).collect();
    let rows = ns.len().div_ceil(3);
    let mut out = String::from("n  alpha_n\n");
    for r in 0..rows {
        let cells: Vec<String> = (0..3)
            .filter_map(|c| ns.get(c * rows + r))
            .map(|&n| format!("{n:>3} {:>14}", format_alpha(n, &alphas.alpha[&n])))
            .collect();
        out.push_str(cells.join("  |").trim_end());
        out.push('\n');
    }
    out
}
