//! Double-precision complex special functions: digamma, trigamma,
//! log-gamma, the chi factor's logarithmic derivative, and an
//! Euler–Maclaurin zeta evaluator.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::stieltjes::bernoulli_numbers;

const ASYMPTOTIC_SHIFT: f64 = 12.0;

/// `B_0 ..= B_120` as doubles.
pub fn bernoulli_f64() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| {
        bernoulli_numbers(120)
            .iter()
            .map(|b| b.to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

fn shift_up(mut z: Complex64, mut per_step: impl FnMut(Complex64)) -> Complex64 {
    while z.re < ASYMPTOTIC_SHIFT || z.norm() < ASYMPTOTIC_SHIFT {
        per_step(z);
        z += 1.0;
    }
    z
}

/// Digamma `psi(z)`.
pub fn digamma(z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let w = shift_up(z, |x| acc -= x.inv());
    let b = bernoulli_f64();
    let w2 = (w * w).inv();
    let mut pow = w2;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=10 {
        series += pow * (b[2 * k] / (2 * k) as f64);
        pow *= w2;
    }
    acc + w.ln() - 0.5 * w.inv() - series
}

/// Trigamma `psi'(z)`.
pub fn trigamma(z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let w = shift_up(z, |x| acc += (x * x).inv());
    let b = bernoulli_f64();
    let inv = w.inv();
    let w2 = inv * inv;
    let mut pow = w2 * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=10 {
        series += pow * b[2 * k];
        pow *= w2;
    }
    acc + inv + 0.5 * w2 + series
}

/// `ln Gamma(z)` on the branch continuous from the positive real axis,
/// for `Re z > 0`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let w = shift_up(z, |x| acc -= x.ln());
    let b = bernoulli_f64();
    let inv = w.inv();
    let w2 = inv * inv;
    let mut pow = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=10 {
        series += pow * (b[2 * k] / ((2 * k) * (2 * k - 1)) as f64);
        pow *= w2;
    }
    acc + (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series
}

/// `cot(w)`, stable for large `|Im w|`.
pub fn cot(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    if w.im >= 0.0 {
        let q = (2.0 * i * w).exp();
        i * (q + 1.0) / (q - 1.0)
    } else {
        let q = (-2.0 * i * w).exp();
        i * (1.0 + q) / (1.0 - q)
    }
}

fn check_chi_domain(s: Complex64) -> Result<()> {
    if s.im.abs() < 1.0 || s.re.abs() > 10.0 {
        return Err(Error::Domain(format!(
            "chi'/chi needs |Im s| >= 1 and |Re s| <= 10, got {s}"
        )));
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Singularity {
            re: s.re,
            im: s.im,
        });
    }
    Ok(())
}

/// `chi'/chi(s)` for `chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s)`.
pub fn chi_logderiv(s: Complex64) -> Result<Complex64> {
    check_chi_domain(s)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(LN_2 + PI.ln() + 0.5 * PI * cot(0.5 * PI * s) - digamma(one - s))
}

/// Derivative of `chi'/chi` in `s`.
pub fn chi_logderiv_prime(s: Complex64) -> Result<Complex64> {
    check_chi_domain(s)?;
    let one = Complex64::new(1.0, 0.0);
    let c = cot(0.5 * PI * s);
    let csc2 = one + c * c;
    Ok(-0.25 * PI * PI * csc2 + trigamma(one - s))
}

/// `f(s) = -chi'/chi(s) / 2`.
pub fn f_of_s(s: Complex64) -> Result<Complex64> {
    Ok(-0.5 * chi_logderiv(s)?)
}

pub fn f_prime(s: Complex64) -> Result<Complex64> {
    Ok(-0.5 * chi_logderiv_prime(s)?)
}

/// `zeta(s)` by Euler–Maclaurin summation, `s != 1`.
pub fn zeta_em(s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if (s - one).norm() < 1e-12 {
        return Err(Error::Singularity { re: 1.0, im: 0.0 });
    }
    let n = (s.im.abs().max(s.re.abs()) + 30.0).ceil() as u64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_s = (-s * ln_n).exp();
    sum += n_s * nf / (s - one) + 0.5 * n_s;
    let b = bernoulli_f64();
    // term_k = B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    let mut rising = s;
    let mut npow = n_s / nf;
    let mut fact = 2.0;
    for k in 1..=40 {
        let term = rising * npow * (b[2 * k] / fact);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        let a = (2 * k - 1) as f64;
        rising = rising * (s + a) * (s + a + 1.0);
        npow /= nf * nf;
        fact *= (2 * k + 1) as f64 * (2 * k + 2) as f64;
    }
    Ok(sum)
}

/// `[zeta(s), zeta'(s), ..., zeta^(m)(s)]` from a trapezoidal Cauchy
/// integral of [`zeta_em`] on a circle around `s`.
pub fn zeta_derivatives(s: Complex64, m: usize) -> Result<Vec<Complex64>> {
    let dist = (s - 1.0).norm();
    if dist < 1e-3 {
        return Err(Error::Singularity { re: 1.0, im: 0.0 });
    }
    let r = (0.5 * dist).min(0.5);
    let points = 64;
    let mut acc = vec![Complex64::new(0.0, 0.0); m + 1];
    for j in 0..points {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64);
        let z = zeta_em(s + r * w)?;
        let mut wp = Complex64::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += z / wp;
            wp *= w;
        }
    }
    let mut fact = 1.0;
    let mut rp = 1.0;
    for (k, a) in acc.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
            rp *= r;
        }
        *a *= fact / (rp * points as f64);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(c(1.0, 0.0)).re + euler).abs() < 1e-14);
        assert!((digamma(c(0.5, 0.0)).re - (-euler - 2.0 * LN_2)).abs() < 1e-14);
        // Im psi(1/2 + i y) = (pi/2) tanh(pi y)
        let y = 3.7;
        let v = digamma(c(0.5, y));
        assert!((v.im - 0.5 * PI * (PI * y).tanh()).abs() < 1e-13);
    }

    #[test]
    fn trigamma_known_values() {
        assert!((trigamma(c(1.0, 0.0)).re - PI * PI / 6.0).abs() < 1e-13);
        // central difference of digamma
        let z = c(-2.5, 7.0);
        let h = 1e-5;
        let fd = (digamma(z + h) - digamma(z - h)) / (2.0 * h);
        assert!((fd - trigamma(z)).norm() < 1e-8);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(c(5.0, 0.0)).re - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(c(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-13);
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
        let y = 2.0;
        let g = ln_gamma(c(0.5, y));
        assert!((2.0 * g.re - (PI / (PI * y).cosh()).ln()).abs() < 1e-12);
    }

    #[test]
    fn cot_matches_definition_and_is_stable() {
        let w = c(0.3, 0.7);
        let direct = w.cos() / w.sin();
        assert!((cot(w) - direct).norm() < 1e-14);
        let w = c(0.3, -0.7);
        assert!((cot(w) - w.cos() / w.sin()).norm() < 1e-14);
        let far = cot(c(1.0, 1e6));
        assert!((far - c(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn chi_logderiv_on_critical_line() {
        let t = 1e6;
        let v = chi_logderiv(c(0.5, t)).unwrap();
        assert!((v.re + (t / (2.0 * PI)).ln()).abs() < 1e-5);
        let s = c(2.0, 1e4);
        let f = f_of_s(s).unwrap();
        assert!((f - 0.5 * (1e4 / (2.0 * PI)).ln()).norm() < 1e-3);
    }

    #[test]
    fn chi_logderiv_symmetry() {
        // chi(s) chi(1-s) = 1 gives chi'/chi(s) = chi'/chi(1-s)
        for &(re, im) in &[(0.5, 14.0), (0.2, 100.0), (2.0, 50.0), (-1.5, 3.0)] {
            let s = c(re, im);
            let a = chi_logderiv(s).unwrap();
            let b = chi_logderiv(c(1.0, 0.0) - s).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm(), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn chi_logderiv_prime_matches_difference() {
        let s = c(0.5, 40.0);
        let h = 1e-5;
        let fd = (chi_logderiv(s + h).unwrap() - chi_logderiv(s - h).unwrap()) / (2.0 * h);
        assert!((fd - chi_logderiv_prime(s).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn chi_domain() {
        assert!(matches!(chi_logderiv(c(0.5, 0.5)), Err(Error::Domain(_))));
        assert!(matches!(chi_logderiv(c(11.0, 5.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn zeta_em_known_values() {
        let z2 = zeta_em(c(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z = zeta_em(c(0.0, 0.0)).unwrap();
        assert!((z.re + 0.5).abs() < 1e-13);
        let z = zeta_em(c(-1.0, 0.0)).unwrap();
        assert!((z.re + 1.0 / 12.0).abs() < 1e-13);
        // first zero
        let z = zeta_em(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.norm() < 1e-12);
        assert!(zeta_em(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn zeta_derivatives_at_two() {
        let d = zeta_derivatives(c(2.0, 0.0), 2).unwrap();
        assert!((d[0].re - PI * PI / 6.0).abs() < 1e-13);
        // mpmath zeta(2, derivative=1), zeta(2, derivative=2)
        assert!((d[1].re + 0.937_548_254_315_843_8).abs() < 1e-12);
        assert!((d[2].re - 1.989_280_234_298_901).abs() < 1e-11);
        assert!(zeta_derivatives(c(1.0, 0.0), 1).is_err());
    }
}
