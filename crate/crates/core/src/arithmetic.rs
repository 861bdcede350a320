//! Sieved arithmetic functions and brute-force oracles: von Mangoldt
//! convolutions, divisor sums, the partial sums `A_k(x)` and the Dirichlet
//! expansion of `Z_1'/Z_1`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::special::{f_of_s, f_prime, zeta_derivatives};
use crate::Scalar;

/// Upper bound on the bytes a single table set may allocate.
pub const MEMORY_BUDGET: u64 = 1 << 30;
/// Relative tolerance of the identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tail above which [`z1_logderiv_direct`] reports an accuracy error.
pub const DIRECT_TAIL_TARGET: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct ArithmeticTables {
    x_max: usize,
    k_max: usize,
    lambda: Vec<f64>,
    divisor: Vec<u32>,
    divisor_prefix: Vec<u64>,
    mobius: Vec<i8>,
    lambda_k: BTreeMap<usize, Vec<f64>>,
    a_k: BTreeMap<usize, Vec<f64>>,
}

fn table_bytes(x_max: usize, k_max: usize) -> u64 {
    let per_n = 8 + 4 + 8 + 1 + 4 + 8 * (2 * k_max as u64 + 1);
    (x_max as u64 + 1) * per_n
}

/// Smallest prime factor and Moebius function by a linear sieve.
fn linear_sieve(x_max: usize) -> (Vec<u32>, Vec<i8>) {
    let mut spf = vec![0u32; x_max + 1];
    let mut mu = vec![0i8; x_max + 1];
    let mut primes: Vec<usize> = Vec::new();
    if x_max >= 1 {
        mu[1] = 1;
    }
    for i in 2..=x_max {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            primes.push(i);
        }
        for &p in &primes {
            let ip = i * p;
            if p > spf[i] as usize || ip > x_max {
                break;
            }
            spf[ip] = p as u32;
            mu[ip] = if i % p == 0 { 0 } else { -mu[i] };
        }
    }
    (spf, mu)
}

/// `(a * b)(n)` for `n <= len - 1` by summing over multiples.
pub fn dirichlet_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    let mut out = vec![0.0; n];
    for d in 1..n {
        if a[d] == 0.0 {
            continue;
        }
        let mut m = 1;
        while d * m < n {
            out[d * m] += a[d] * b[m];
            m += 1;
        }
    }
    out
}

fn convolve_complex(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().min(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for d in 1..n {
        if a[d] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut m = 1;
        while d * m < n {
            out[d * m] += a[d] * b[m];
            m += 1;
        }
    }
    out
}

impl ArithmeticTables {
    /// Sieves `Lambda`, `d` and `mu` up to `x_max` and builds `Lambda_k`
    /// (`0 <= k <= k_max`) and `a_k` (`1 <= k <= k_max`).
    pub fn build(x_max: usize, k_max: usize) -> Result<Self> {
        if x_max < 2 || k_max < 1 {
            return Err(Error::Domain(format!(
                "tables need x_max >= 2 and k_max >= 1, got {x_max}, {k_max}"
            )));
        }
        let requested = table_bytes(x_max, k_max);
        if requested > MEMORY_BUDGET {
            return Err(Error::Capacity {
                requested,
                budget: MEMORY_BUDGET,
            });
        }
        let (spf, mobius) = linear_sieve(x_max);
        let mut lambda = vec![0.0; x_max + 1];
        for n in 2..=x_max {
            let p = spf[n] as usize;
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            if m == 1 {
                lambda[n] = (p as f64).ln();
            }
        }
        let mut divisor = vec![0u32; x_max + 1];
        for d in 1..=x_max {
            let mut m = d;
            while m <= x_max {
                divisor[m] += 1;
                m += d;
            }
        }
        let mut divisor_prefix = vec![0u64; x_max + 1];
        for n in 1..=x_max {
            divisor_prefix[n] = divisor_prefix[n - 1] + divisor[n] as u64;
        }
        let prime_powers: Vec<usize> = (2..=x_max).filter(|&n| lambda[n] != 0.0).collect();
        let lambda_log: Vec<f64> = (0..=x_max)
            .map(|n| if n >= 2 { lambda[n] * (n as f64).ln() } else { 0.0 })
            .collect();
        let mut lambda_k = BTreeMap::new();
        let mut delta = vec![0.0; x_max + 1];
        delta[1] = 1.0;
        lambda_k.insert(0, delta);
        let mut a_k = BTreeMap::new();
        for k in 1..=k_max {
            let prev = &lambda_k[&(k - 1)];
            let mut next = vec![0.0; x_max + 1];
            let mut ak = vec![0.0; x_max + 1];
            for &q in &prime_powers {
                let (l, ll) = (lambda[q], lambda_log[q]);
                let mut m = 1;
                while q * m <= x_max {
                    let v = prev[m];
                    if v != 0.0 {
                        next[q * m] += l * v;
                        ak[q * m] += ll * v;
                    }
                    m += 1;
                }
            }
            lambda_k.insert(k, next);
            a_k.insert(k, ak);
        }
        Ok(Self {
            x_max,
            k_max,
            lambda,
            divisor,
            divisor_prefix,
            mobius,
            lambda_k,
            a_k,
        })
    }

    pub fn x_max(&self) -> usize {
        self.x_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `Lambda(n)`, indexed by `n` (entry 0 unused).
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn divisor(&self) -> &[u32] {
        &self.divisor
    }

    pub fn mobius(&self) -> &[i8] {
        &self.mobius
    }

    pub fn lambda_k(&self, k: usize) -> Result<&[f64]> {
        self.lambda_k
            .get(&k)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                what: "Lambda_k",
                index: k as i64,
                limit: self.k_max as i64,
            })
    }

    pub fn a_k(&self, k: usize) -> Result<&[f64]> {
        self.a_k
            .get(&k)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                what: "a_k",
                index: k as i64,
                limit: self.k_max as i64,
            })
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if n < 2 || n > self.x_max {
            return Err(Error::Range(format!(
                "n = {n} outside [2, {}]",
                self.x_max
            )));
        }
        Ok(())
    }

    fn divisors(n: usize) -> Vec<usize> {
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut d = 1;
        while d * d <= n {
            if n.is_multiple_of(d) {
                small.push(d);
                if d * d != n {
                    large.push(n / d);
                }
            }
            d += 1;
        }
        small.extend(large.into_iter().rev());
        small
    }

    fn mobius_log_sum(&self, n: usize, power: i32) -> f64 {
        let nf = n as f64;
        Self::divisors(n)
            .into_iter()
            .filter(|&d| self.mobius[d] != 0)
            .map(|d| self.mobius[d] as f64 * (nf / d as f64).ln().powi(power))
            .sum()
    }

    /// `sum_{d|n} mu(d) log(n/d) = Lambda(n)`.
    pub fn mobius_identity_check(&self, n: usize) -> Result<bool> {
        self.check_n(n)?;
        let lhs = self.mobius_log_sum(n, 1);
        let tol = IDENTITY_TOL * (n as f64).ln().max(1.0);
        Ok((lhs - self.lambda[n]).abs() < tol)
    }

    /// `sum_{d|n} mu(d) log^2(n/d) = Lambda(n) log n + Lambda_2(n)`.
    pub fn selberg_identity_check(&self, n: usize) -> Result<bool> {
        self.check_n(n)?;
        let l2 = self.lambda_k(2)?;
        let lhs = self.mobius_log_sum(n, 2);
        let ln = (n as f64).ln();
        let rhs = self.lambda[n] * ln + l2[n];
        Ok((lhs - rhs).abs() < IDENTITY_TOL * (ln * ln).max(1.0))
    }

    /// `A_k(x) = sum_{n <= x} (a_k * d)(n)`, summed as
    /// `sum_{n <= x} a_k(n) D(x/n)` with `D` the divisor summatory function.
    pub fn a_k_bruteforce(&self, k: usize, x: f64) -> Result<f64> {
        if !(x <= self.x_max as f64) {
            return Err(Error::Range(format!(
                "x = {x} exceeds table size {}",
                self.x_max
            )));
        }
        let ak = self.a_k(k)?;
        if x < 1.0 {
            return Ok(0.0);
        }
        let xi = x.floor() as usize;
        let mut acc = 0.0;
        for n in 2..=xi {
            if ak[n] != 0.0 {
                acc += ak[n] * self.divisor_prefix[xi / n] as f64;
            }
        }
        Ok(acc)
    }
}

/// Main term `x sum_{j=0}^{k+2} c_{k,j} (log x)^{k+2-j} / (k+2-j)!`.
pub fn a_k_residue(k: usize, x: f64, table: &CoefficientTable) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("x = {x} must exceed 1")));
    }
    let lx = x.ln();
    let mut acc = 0.0;
    for j in 0..=k + 2 {
        let p = (k + 2 - j) as i32;
        let fact: f64 = (1..=p).map(f64::from).product();
        acc += table.c(k, j)?.to_f64() * lx.powi(p) / fact;
    }
    Ok(x * acc)
}

/// A complex value with an estimated truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tailed {
    pub value: Complex64,
    pub tail: f64,
}

fn check_lemma_domain(s: Complex64) -> Result<()> {
    if !(s.re >= 1.5 && s.im >= 100.0) {
        return Err(Error::Domain(format!(
            "need Re s >= 1.5 and Im s >= 100, got {s}"
        )));
    }
    Ok(())
}

/// `int_N^inf (log x)^m x^{-sigma} dx` for `m <= 2`.
fn log_power_tail(n: f64, sigma: f64, m: u32) -> f64 {
    let a = sigma - 1.0;
    let l = n.ln();
    let base = n.powf(-a);
    match m {
        0 => base / a,
        1 => base * (l / a + 1.0 / (a * a)),
        _ => base * (l * l / a + 2.0 * l / (a * a) + 2.0 / (a * a * a)),
    }
}

/// `Z_1'/Z_1(s)` from partial Dirichlet sums of `zeta`, `zeta'`, `zeta''`
/// over `n <= truncation`, via
/// `(zeta'' + f zeta') / (zeta' + f zeta) + f' / (zeta'/zeta + f)`.
pub fn z1_logderiv_direct(s: Complex64, truncation: usize) -> Result<Tailed> {
    check_lemma_domain(s)?;
    if truncation < 2 {
        return Err(Error::Domain("truncation must be at least 2".into()));
    }
    let mut z = [Complex64::new(0.0, 0.0); 3];
    for n in 1..=truncation {
        let l = (n as f64).ln();
        let t = (-s * l).exp();
        z[0] += t;
        z[1] -= t * l;
        z[2] += t * l * l;
    }
    let nf = truncation as f64;
    let d: Vec<f64> = (0..3).map(|m| log_power_tail(nf, s.re, m)).collect();
    let f = f_of_s(s)?;
    let fp = f_prime(s)?;
    let fa = f.norm();
    let a = z[2] + f * z[1];
    let b = z[1] + f * z[0];
    let zd = b / z[0];
    let value = a / b + fp / zd;

    let da = d[2] + fa * d[1];
    let db = d[1] + fa * d[0];
    let dzd = (db + zd.norm() * d[0]) / (z[0].norm() - d[0]);
    let denoms = [b.norm() - db, z[0].norm() - d[0], zd.norm() - dzd];
    if denoms.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Accuracy {
            tail: f64::INFINITY,
            target: DIRECT_TAIL_TARGET,
        });
    }
    let tail = (da + (a / b).norm() * db) / denoms[0] + fp.norm() * dzd / (zd.norm() * denoms[2]);
    if tail > DIRECT_TAIL_TARGET {
        return Err(Error::Accuracy {
            tail,
            target: DIRECT_TAIL_TARGET,
        });
    }
    Ok(Tailed { value, tail })
}

/// `P(sigma) = -zeta'/zeta(sigma)` and `-P'(sigma) = (zeta'/zeta)'(sigma)`:
/// the Dirichlet series of `Lambda` and `Lambda log` at real `sigma`.
fn real_majorants(sigma: f64) -> Result<(f64, f64)> {
    let d = zeta_derivatives(Complex64::new(sigma, 0.0), 2)?;
    let (z0, z1, z2) = (d[0].re, d[1].re, d[2].re);
    Ok((-z1 / z0, (z2 * z0 - z1 * z1) / (z0 * z0)))
}

/// `sum_{n <= n_max} a(n,s) n^{-s}` with
/// `a(n,s) = -Lambda(n) + sum_{k=1}^{k_max} a_k(n) f(s)^{-k}`, plus a tail
/// bound covering both the `n` and the `k` truncations.
pub fn dirichlet_expansion_partial(
    tables: &ArithmeticTables,
    s: Complex64,
    k_max: usize,
    n_max: usize,
) -> Result<Tailed> {
    check_lemma_domain(s)?;
    if n_max > tables.x_max() || k_max > tables.k_max() {
        return Err(Error::Range(format!(
            "expansion to n = {n_max}, k = {k_max} exceeds tables ({}, {})",
            tables.x_max(),
            tables.k_max()
        )));
    }
    let f = f_of_s(s)?;
    let fa = f.norm();
    let sigma = s.re;
    let (p, pp) = real_majorants(sigma)?;
    let finv = f.inv();
    let mut powers = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=k_max {
        powers.push(powers[k - 1] * finv);
    }
    let aks: Vec<&[f64]> = (1..=k_max).map(|k| tables.a_k(k)).collect::<Result<_>>()?;
    let lam = tables.lambda();
    let mut value = Complex64::new(0.0, 0.0);
    let mut lambda_part = Complex64::new(0.0, 0.0);
    let mut abs_partial = 0.0;
    for n in 2..=n_max {
        let l = (n as f64).ln();
        let ns = (-s * l).exp();
        let mut a = Complex64::new(-lam[n], 0.0);
        let mut a_abs = lam[n];
        let mut fk = 1.0;
        for (k, ak) in aks.iter().enumerate() {
            fk /= fa;
            a += ak[n] * powers[k + 1];
            a_abs += ak[n] * fk;
        }
        value += a * ns;
        lambda_part += lam[n] * ns;
        abs_partial += a_abs * (-sigma * l).exp();
    }

    let n_sigma = (n_max as f64).powf(-sigma);
    let lambda_tail = (p - lambda_partial_abs(lam, n_max, sigma)).max(0.0);
    let ratio = (lambda_part.norm() + lambda_tail) / fa;
    if ratio >= 1.0 {
        return Err(Error::ExpansionInvalid { ratio });
    }
    let rho = p / fa;
    let mut majorant = p;
    let mut term = pp / fa;
    for _ in 0..k_max {
        majorant += term;
        term *= rho;
    }
    let n_tail = (majorant - abs_partial).max(0.0) + 1e-13 * majorant + f64::EPSILON * n_sigma;
    let k_tail = if rho < 1.0 {
        term / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    Ok(Tailed {
        value,
        tail: n_tail + k_tail,
    })
}

fn lambda_partial_abs(lam: &[f64], n_max: usize, sigma: f64) -> f64 {
    (2..=n_max)
        .map(|n| lam[n] * (-sigma * (n as f64).ln()).exp())
        .sum()
}

/// Result of the telescoping check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TelescopeReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub diff: f64,
    pub bound: f64,
}

impl TelescopeReport {
    pub fn passed(&self) -> bool {
        self.diff <= self.bound
    }
}

/// Multiplies `(Lambda_2/f - Lambda)` by the geometric tower
/// `sum_{j=0}^{j_max} Lambda_j / f^j` as Dirichlet series truncated at
/// `n_max`, and compares against `-sum_{n <= n_max} Lambda(n) n^{-s}`. The
/// bound is the leftover `Lambda_{j_max+2}` term plus rounding.
pub fn telescoping_check(
    tables: &ArithmeticTables,
    s: Complex64,
    n_max: usize,
    j_max: usize,
) -> Result<TelescopeReport> {
    if n_max > tables.x_max() || j_max.max(2) > tables.k_max() {
        return Err(Error::Range(format!(
            "telescoping to n = {n_max}, j = {j_max} exceeds tables"
        )));
    }
    let f = f_of_s(s)?;
    let finv = f.inv();
    let zero = Complex64::new(0.0, 0.0);
    let lam = tables.lambda();
    let l2 = tables.lambda_k(2)?;
    let u: Vec<Complex64> = (0..=n_max)
        .map(|n| l2[n] * finv - lam[n])
        .collect();
    let mut v = vec![zero; n_max + 1];
    let mut fj = Complex64::new(1.0, 0.0);
    for j in 0..=j_max {
        let lj = tables.lambda_k(j)?;
        for n in 1..=n_max {
            v[n] += lj[n] * fj;
        }
        fj *= finv;
    }
    let w = convolve_complex(&u, &v);
    let mut lhs = zero;
    let mut rhs = zero;
    for n in 2..=n_max {
        let ns = (-s * (n as f64).ln()).exp();
        lhs += w[n] * ns;
        rhs -= lam[n] * ns;
    }
    let (p, _) = real_majorants(s.re)?;
    let fa = f.norm();
    let bound = p.powi(j_max as i32 + 2) / fa.powi(j_max as i32 + 1) + 1e-12 * (1.0 + rhs.norm());
    Ok(TelescopeReport {
        lhs,
        rhs,
        diff: (lhs - rhs).norm(),
        bound,
    })
}

/// Counts of failures over `2 <= n <= n_hi` in the identity suites.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IdentityReport {
    pub n_hi: usize,
    pub mobius_failures: usize,
    pub selberg_failures: usize,
    pub a1_failures: usize,
    pub convolution_n_hi: usize,
    pub convolution_failures: usize,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.mobius_failures == 0
            && self.selberg_failures == 0
            && self.a1_failures == 0
            && self.convolution_failures == 0
    }
}

/// Runs the Moebius, Selberg and `a_1` checks up to `x_max`, and
/// `Lambda_j * Lambda_k = Lambda_{j+k}` for `j + k <= min(k_max, 4)` up to
/// `min(x_max, 10^4)`, the convolution done independently of the sieve.
pub fn identity_suite(tables: &ArithmeticTables) -> Result<IdentityReport> {
    let n_hi = tables.x_max();
    let mut rep = IdentityReport {
        n_hi,
        convolution_n_hi: n_hi.min(10_000),
        ..Default::default()
    };
    let a1 = tables.a_k(1)?;
    let lam = tables.lambda();
    for n in 2..=n_hi {
        if !tables.mobius_identity_check(n)? {
            rep.mobius_failures += 1;
        }
        if tables.k_max() >= 2 && !tables.selberg_identity_check(n)? {
            rep.selberg_failures += 1;
        }
        if a1[n] != lam[n] * (n as f64).ln() {
            rep.a1_failures += 1;
        }
    }
    let top = tables.k_max().min(4);
    let m = rep.convolution_n_hi + 1;
    for total in 2..=top {
        let target = &tables.lambda_k(total)?[..m];
        for j in 1..total {
            let c = dirichlet_convolve(&tables.lambda_k(j)?[..m], &tables.lambda_k(total - j)?[..m]);
            rep.convolution_failures += c
                .iter()
                .zip(target)
                .filter(|(a, b)| (*a - *b).abs() > IDENTITY_TOL * b.abs().max(1.0))
                .count();
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn tables() -> ArithmeticTables {
        ArithmeticTables::build(2000, 4).unwrap()
    }

    fn naive_lambda(n: usize) -> f64 {
        for p in 2..=n {
            if n.is_multiple_of(p) {
                let mut m = n;
                while m.is_multiple_of(p) {
                    m /= p;
                }
                return if m == 1 { (p as f64).ln() } else { 0.0 };
            }
        }
        0.0
    }

    #[test]
    fn sieve_values() {
        let t = tables();
        assert_eq!(t.lambda()[8], LN_2);
        assert_eq!(t.lambda()[12], 0.0);
        assert_eq!(t.divisor()[6], 4);
        assert_eq!(t.mobius()[30], -1);
        assert_eq!(t.mobius()[12], 0);
        let l3 = 3f64.ln();
        assert!((t.lambda_k(2).unwrap()[6] - 2.0 * LN_2 * l3).abs() < 1e-15);
        assert_eq!(t.lambda_k(0).unwrap()[1], 1.0);
        assert_eq!(t.lambda_k(0).unwrap()[2], 0.0);
        for n in 2..300 {
            assert!((t.lambda()[n] - naive_lambda(n)).abs() < 1e-15, "{n}");
            let d = (1..=n).filter(|d| n % d == 0).count() as u32;
            assert_eq!(t.divisor()[n], d);
        }
    }

    #[test]
    fn identity_examples() {
        let t = tables();
        for n in [2, 4, 6, 9, 12] {
            assert!(t.mobius_identity_check(n).unwrap());
            assert!(t.selberg_identity_check(n).unwrap());
        }
        let l2 = t.lambda_k(2).unwrap();
        assert!((l2[4] + 4f64.ln() * t.lambda()[4] - 3.0 * LN_2 * LN_2).abs() < 1e-14);
        assert!(t.mobius_identity_check(1).is_err());
        assert!(t.mobius_identity_check(2001).is_err());
    }

    #[test]
    fn suite_passes() {
        let rep = identity_suite(&tables()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn a_k_bruteforce_matches_double_loop() {
        let t = tables();
        assert_eq!(t.a_k_bruteforce(1, 1.5).unwrap(), 0.0);
        assert_eq!(t.a_k_bruteforce(2, 3.9).unwrap(), 0.0);
        let d = |m: usize| (1..=m).filter(|x| m.is_multiple_of(*x)).count() as f64;
        let mut oracle = 0.0;
        for n1 in 2..=100 {
            let l = naive_lambda(n1);
            for m in 1..=100 / n1 {
                oracle += l * (n1 as f64).ln() * d(m);
            }
        }
        let v = t.a_k_bruteforce(1, 100.0).unwrap();
        assert!((v - oracle).abs() < 1e-10 * oracle, "{v} vs {oracle}");
        let mut oracle2 = 0.0;
        for n1 in 2..=100 {
            for n2 in 2..=100 / n1 {
                for m in 1..=100 / (n1 * n2) {
                    oracle2 += naive_lambda(n1) * (n1 as f64).ln() * naive_lambda(n2) * d(m);
                }
            }
        }
        let v2 = t.a_k_bruteforce(2, 100.0).unwrap();
        assert!((v2 - oracle2).abs() < 1e-10 * oracle2);
        assert!(matches!(t.a_k_bruteforce(1, 2001.0), Err(Error::Range(_))));
    }

    #[test]
    fn capacity_error() {
        let err = ArithmeticTables::build(100_000_000, 50).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn expansion_base_cases() {
        let t = tables();
        let s = Complex64::new(3.0, 200.0);
        let one = dirichlet_expansion_partial(&t, s, 2, 1).unwrap();
        assert_eq!(one.value, Complex64::new(0.0, 0.0));
        let base = dirichlet_expansion_partial(&t, s, 0, 500).unwrap();
        let direct: Complex64 = (2..=500)
            .map(|n| -naive_lambda(n) * (-s * (n as f64).ln()).exp())
            .sum();
        assert!((base.value - direct).norm() < 1e-14);
    }

    #[test]
    fn direct_and_expansion_agree() {
        let t = tables();
        let s = Complex64::new(3.0, 200.0);
        let d = z1_logderiv_direct(s, 2000).unwrap();
        let e = dirichlet_expansion_partial(&t, s, 4, 2000).unwrap();
        let allowance = 10.0 / (s.im * s.im.ln());
        assert!((d.value - e.value).norm() < d.tail + e.tail + allowance);
        let d2 = z1_logderiv_direct(s, 4000).unwrap();
        assert!((d2.value - d.value).norm() <= d.tail);
        assert!(e.tail < 1e-3, "{}", e.tail);
    }

    #[test]
    fn direct_far_up() {
        let s = Complex64::new(5.0, 1e6);
        let d = z1_logderiv_direct(s, 200).unwrap();
        assert!(d.value.norm() < 0.2);
        assert!(matches!(
            z1_logderiv_direct(Complex64::new(1.2, 200.0), 100),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            z1_logderiv_direct(Complex64::new(1.5, 100.0), 100),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn telescoping() {
        let t = tables();
        let r = telescoping_check(&t, Complex64::new(3.0, 200.0), 2000, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
