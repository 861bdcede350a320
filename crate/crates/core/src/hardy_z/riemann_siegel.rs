//! Riemann–Siegel theta and the Hardy Z-function.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::dd::{self, Dd, TWO_PI};
use crate::error::{Error, Result};
use crate::scalar::{with_digits, BigReal, RealScalar, Scalar};
use crate::series::LaurentSeries;
use crate::special::zeta_em;

/// Lower end of the range where the asymptotic phase is trusted.
pub const T_MIN: f64 = 10.0;

const LN_TABLE_LEN: usize = 4096;

fn check_t(t: f64) -> Result<()> {
    if !(t >= T_MIN) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} is below {T_MIN}")));
    }
    Ok(())
}

fn theta_corrections(t: f64) -> f64 {
    let u = 1.0 / t;
    let u2 = u * u;
    -PI / 8.0
        + u * (1.0 / 48.0
            + u2 * (7.0 / 5760.0
                + u2 * (31.0 / 80640.0 + u2 * (127.0 / 430080.0 + u2 * (511.0 / 1216512.0)))))
}

/// Riemann–Siegel theta for `t >= 10`.
pub fn theta(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(theta_unchecked(t))
}

pub(crate) fn theta_unchecked(t: f64) -> f64 {
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t + theta_corrections(t)
}

/// Theta in double-double, reduced modulo `2 pi`.
pub(crate) fn theta_dd_reduced(t: f64) -> Dd {
    let l = dd::ln_dd(Dd::from_f64(t).div(TWO_PI));
    let main = l.mul_f64(0.5 * t) - Dd::from_f64(0.5 * t);
    (main.rem_two_pi() + Dd::from_f64(theta_corrections(t))).rem_two_pi()
}

/// `theta'(t)` from the same expansion.
pub fn theta_prime(t: f64) -> f64 {
    let u = 1.0 / t;
    let u2 = u * u;
    0.5 * (t / (2.0 * PI)).ln()
        - u2 * (1.0 / 48.0 + u2 * (21.0 / 5760.0 + u2 * (155.0 / 80640.0)))
}

struct Tables {
    ln: Vec<Dd>,
    rsqrt: Vec<f64>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let ln = (0..=LN_TABLE_LEN)
            .map(|n| if n == 0 { Dd::from_f64(0.0) } else { dd::ln(n as f64) })
            .collect();
        let rsqrt = (0..=LN_TABLE_LEN)
            .map(|n| if n == 0 { 0.0 } else { 1.0 / (n as f64).sqrt() })
            .collect();
        Tables { ln, rsqrt }
    })
}

/// Remainder polynomials `C_0 .. C_3` as power series in `z = 2p - 1`.
pub struct RemainderPolys {
    pub c: [Vec<f64>; 4],
}

const GEN_DIGITS: u32 = 120;
const GEN_DEGREE: usize = 110;

fn cos_sin_big(x: &BigReal) -> (BigReal, BigReal) {
    let eps = BigReal::epsilon();
    let x2 = x.clone() * x.clone();
    let mut c = BigReal::one();
    let mut s = x.clone();
    let mut tc = BigReal::one();
    let mut ts = x.clone();
    let mut k = 1i64;
    loop {
        tc = -(tc * x2.clone()) / BigReal::from_i64((2 * k - 1) * (2 * k));
        ts = -(ts * x2.clone()) / BigReal::from_i64((2 * k) * (2 * k + 1));
        c = c + tc.clone();
        s = s + ts.clone();
        if tc.abs() < eps && ts.abs() < eps {
            break;
        }
        k += 1;
    }
    (c, s)
}

fn power_series(coeffs: Vec<BigReal>) -> LaurentSeries<BigReal> {
    LaurentSeries::new(0, coeffs).expect("non-empty")
}

fn coeff_vec(s: &LaurentSeries<BigReal>, degree: usize) -> Vec<BigReal> {
    (0..=degree as i64)
        .map(|e| {
            if e < s.lowest_order() {
                BigReal::zero()
            } else {
                s.coeff(e).cloned().unwrap_or_else(BigReal::zero)
            }
        })
        .collect()
}

fn generate_polys() -> RemainderPolys {
    with_digits(GEN_DIGITS, || {
        let pi = BigReal::pi();
        let d = GEN_DEGREE;
        // cos(pi z)
        let mut cos_pz = vec![BigReal::zero(); d + 1];
        let mut term = BigReal::one();
        for m in 0..=d / 2 {
            if m > 0 {
                term = -(term * pi.clone() * pi.clone())
                    / BigReal::from_i64((2 * m as i64 - 1) * (2 * m as i64));
            }
            cos_pz[2 * m] = term.clone();
        }
        // cos(pi z^2 / 2), sin(pi z^2 / 2)
        let half_pi = pi.clone() / BigReal::from_i64(2);
        let mut cos_q = vec![BigReal::zero(); d + 1];
        let mut sin_q = vec![BigReal::zero(); d + 1];
        let mut term = BigReal::one();
        let mut j = 0usize;
        while 2 * j <= d {
            // term = (pi/2)^j / j!
            let sign = if (j / 2).is_multiple_of(2) { 1 } else { -1 };
            let v = if sign > 0 { term.clone() } else { -term.clone() };
            if j.is_multiple_of(2) {
                cos_q[2 * j] = v;
            } else {
                sin_q[2 * j] = v;
            }
            j += 1;
            term = term * half_pi.clone() / BigReal::from_i64(j as i64);
        }
        let five_pi_8 = pi.clone() * BigReal::from_i64(5) / BigReal::from_i64(8);
        let (c58, s58) = cos_sin_big(&five_pi_8);
        let numer: Vec<BigReal> = cos_q
            .iter()
            .zip(&sin_q)
            .map(|(a, b)| -(c58.clone() * a.clone() + s58.clone() * b.clone()))
            .collect();
        let psi = power_series(numer).mul(&power_series(cos_pz).inv().expect("cos invertible"));
        // derivatives in p: d/dp = 2 d/dz
        let mut derivs = vec![psi.clone()];
        for m in 1..=9 {
            let prev: &LaurentSeries<BigReal> = &derivs[m - 1];
            derivs.push(prev.diff().expect("diff").scale(&BigReal::from_i64(2)));
        }
        let keep = d - 9;
        let deriv = |m: usize| coeff_vec(&derivs[m], keep);
        let pi2 = pi.clone() * pi.clone();
        let pi4 = pi2.clone() * pi2.clone();
        let pi6 = pi4.clone() * pi2.clone();
        let lin = |terms: &[(usize, BigReal)]| -> Vec<f64> {
            let mut acc = vec![BigReal::zero(); keep + 1];
            for (m, w) in terms {
                for (slot, c) in acc.iter_mut().zip(deriv(*m)) {
                    *slot = slot.clone() + w.clone() * c;
                }
            }
            let mut out: Vec<f64> = acc.iter().map(Scalar::to_f64).collect();
            while out.len() > 1 && out.last().is_some_and(|c| c.abs() < 1e-24) {
                out.pop();
            }
            out
        };
        let inv = |x: BigReal| BigReal::one() / x;
        let c0 = lin(&[(0, BigReal::one())]);
        let c1 = lin(&[(3, -inv(BigReal::from_i64(96) * pi2.clone()))]);
        let c2 = lin(&[
            (2, inv(BigReal::from_i64(64) * pi2.clone())),
            (6, inv(BigReal::from_i64(18432) * pi4.clone())),
        ]);
        let c3 = lin(&[
            (1, -inv(BigReal::from_i64(64) * pi2.clone())),
            (5, -inv(BigReal::from_i64(3840) * pi4.clone())),
            (9, -inv(BigReal::from_i64(5308416) * pi6.clone())),
        ]);
        RemainderPolys {
            c: [c0, c1, c2, c3],
        }
    })
}

pub fn remainder_polys() -> &'static RemainderPolys {
    static P: OnceLock<RemainderPolys> = OnceLock::new();
    P.get_or_init(generate_polys)
}

fn horner(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * z + x)
}

/// Hardy Z-function by the Riemann–Siegel formula with remainder terms
/// `C_0 .. C_3`.
pub fn z_eval(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(z_unchecked(t))
}

/// Height below which [`z_value`] evaluates zeta by Euler–Maclaurin
/// summation instead of the Riemann–Siegel remainder.
pub const EM_SWITCH: f64 = 1000.0;

/// Z(t) as used by the zero and extremum searches: Euler–Maclaurin zeta
/// rotated by theta below [`EM_SWITCH`], Riemann–Siegel above.
pub fn z_value(t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(z_fast(t))
}

pub(crate) fn z_fast(t: f64) -> f64 {
    if t < EM_SWITCH {
        let zeta = zeta_em(Complex64::new(0.5, t)).expect("off the pole");
        let th = theta_dd_reduced(t).to_f64();
        (Complex64::from_polar(1.0, th) * zeta).re
    } else {
        z_unchecked(t)
    }
}

pub(crate) fn z_unchecked(t: f64) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = a - n as f64;
    let th = theta_dd_reduced(t);
    let tab = tables();
    let mut sum = 0.0;
    for k in 1..=n {
        let (lnk, rs) = if k <= LN_TABLE_LEN {
            (tab.ln[k], tab.rsqrt[k])
        } else {
            (dd::ln(k as f64), 1.0 / (k as f64).sqrt())
        };
        let phase = (th - lnk.mul_f64(t)).rem_two_pi().to_f64();
        sum += rs * phase.cos();
    }
    let polys = remainder_polys();
    let z = 2.0 * p - 1.0;
    let inv_a = 1.0 / a;
    let mut r = 0.0;
    for c in polys.c.iter().rev() {
        r = r * inv_a + horner(c, z);
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * sum + sign * r / a.sqrt()
}
