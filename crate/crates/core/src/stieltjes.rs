//! Stieltjes constants and the Laurent expansion of zeta about `s = 1`.
//!
//! Two backends: a bundled 50-digit table and an Euler–Maclaurin evaluator
//! that regenerates it.

use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{with_digits, working_digits, BigReal, RealScalar, Scalar};
use crate::series::LaurentSeries;

/// Largest supported index.
pub const J_MAX: usize = 40;
/// Significant digits carried by the bundled table.
pub const TABLE_DIGITS: u32 = 50;
/// Precision ceiling for the computed backend.
pub const COMPUTED_DIGITS_MAX: u32 = 400;

const BUNDLED: &str = include_str!("../data/stieltjes.tsv");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StieltjesSource {
    BundledTable,
    File,
    Computed,
}

#[derive(Clone, Debug)]
pub struct StieltjesTable {
    values: Vec<BigReal>,
    digits: u32,
    source: StieltjesSource,
}

impl StieltjesTable {
    /// The table shipped with the crate, parsed at the current working
    /// precision.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED, TABLE_DIGITS, StieltjesSource::BundledTable)
            .expect("bundled Stieltjes table is well formed")
    }

    /// Reads a `j<TAB>decimal` table. Its precision is taken as
    /// [`TABLE_DIGITS`].
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, TABLE_DIGITS, StieltjesSource::File)
    }

    pub fn parse(text: &str, digits: u32, source: StieltjesSource) -> Result<Self> {
        let mut values = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| Error::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (idx, val) = line.split_once('\t').ok_or_else(|| bad("expected j<TAB>value"))?;
            let j: usize = idx.trim().parse().map_err(|_| bad("bad index"))?;
            if j != values.len() {
                return Err(bad(&format!("expected index {}, found {j}", values.len())));
            }
            let v = BigReal::parse_decimal(val).ok_or_else(|| bad("bad decimal"))?;
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::Parse {
                line: 0,
                reason: "empty Stieltjes table".into(),
            });
        }
        Ok(StieltjesTable {
            values,
            digits,
            source,
        })
    }

    /// Computes `gamma_0 ..= gamma_{j_max}` with the Euler–Maclaurin backend.
    pub fn computed(j_max: usize, digits: u32) -> Result<Self> {
        if digits > COMPUTED_DIGITS_MAX {
            return Err(Error::PrecisionCeiling {
                requested: digits,
                ceiling: COMPUTED_DIGITS_MAX,
            });
        }
        let out_digits = working_digits();
        let values = euler_maclaurin_gammas(j_max, digits)
            .into_iter()
            .map(|v| with_digits(out_digits, || v.with_precision_bits(BigReal::one().precision_bits())))
            .collect();
        Ok(StieltjesTable {
            values,
            digits,
            source: StieltjesSource::Computed,
        })
    }

    pub fn get(&self, j: usize) -> Result<&BigReal> {
        self.values.get(j).ok_or(Error::UnsupportedIndex {
            index: j,
            max: self.values.len().saturating_sub(1),
        })
    }

    pub fn values(&self) -> &[BigReal] {
        &self.values
    }

    pub fn j_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn source(&self) -> StieltjesSource {
        self.source
    }

    /// Renders the table in the `j<TAB>decimal` file format.
    pub fn render(&self, sig: usize) -> String {
        let mut out = String::new();
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{j}\t{}\n", v.to_scientific(sig)));
        }
        out
    }

    /// Laurent expansion `1/(s-1) + sum_j (-1)^j gamma_j/j! (s-1)^j`
    /// through `(s-1)^trunc`.
    pub fn zeta_series(&self, trunc: i64) -> Result<LaurentSeries<BigReal>> {
        if trunc < -1 {
            return Err(Error::TruncationUnderflow(format!(
                "zeta series needs trunc >= -1, got {trunc}"
            )));
        }
        let mut coeffs = vec![BigReal::one()];
        let mut fact = BigReal::one();
        for j in 0..=trunc {
            let j = j as usize;
            if j > 0 {
                fact = fact * BigReal::from_i64(j as i64);
            }
            let g = self.get(j)?.clone() / fact.clone();
            coeffs.push(if j.is_multiple_of(2) { g } else { -g });
        }
        LaurentSeries::new(-1, coeffs)
    }
}

static BUNDLED_CACHE: OnceLock<Vec<String>> = OnceLock::new();

/// `gamma_j` to `digits` significant digits from the bundled table.
pub fn stieltjes(j: usize, digits: u32) -> Result<BigReal> {
    if j > J_MAX {
        return Err(Error::UnsupportedIndex {
            index: j,
            max: J_MAX,
        });
    }
    if digits > TABLE_DIGITS {
        return Err(Error::PrecisionCeiling {
            requested: digits,
            ceiling: TABLE_DIGITS,
        });
    }
    let lines = BUNDLED_CACHE.get_or_init(|| {
        BUNDLED
            .lines()
            .filter_map(|l| l.split_once('\t').map(|(_, v)| v.trim().to_string()))
            .collect()
    });
    let v = with_digits(digits.max(working_digits()), || {
        BigReal::parse_decimal(&lines[j]).expect("bundled value parses")
    });
    Ok(with_digits(digits, || v.with_precision_bits(BigReal::one().precision_bits())))
}

/// `gamma_j` from the Euler–Maclaurin backend.
pub fn stieltjes_computed(j: usize, digits: u32) -> Result<BigReal> {
    let t = with_digits(digits, || StieltjesTable::computed(j, digits))?;
    Ok(t.values[j].clone())
}

/// Exact Bernoulli numbers `B_0 ..= B_n` (with `B_1 = -1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut binom_row: Vec<BigInt> = vec![BigInt::one()];
    for m in 0..=n {
        // row m+1 of Pascal's triangle
        let mut next = vec![BigInt::one(); m + 2];
        for i in 1..=m {
            next[i] = &binom_row[i - 1] + &binom_row[i];
        }
        binom_row = next;
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // sum_{i=0}^{m} C(m+1, i) B_i = 0
        let mut acc = BigRational::zero();
        for (i, bi) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom_row[i].clone()) * bi;
        }
        b.push(-acc / BigRational::from_integer(binom_row[m].clone()));
    }
    b
}

// gamma_j = sum_{k<N} f(k) - (ln N)^{j+1}/(j+1) + f(N)/2
//           - sum_m B_{2m}/(2m)! f^{(2m-1)}(N),   f(x) = (ln x)^j / x
fn euler_maclaurin_gammas(j_max: usize, digits: u32) -> Vec<BigReal> {
    let n = 50 + 2 * j_max as i64 + digits as i64 / 2;
    let m_terms = 40 + digits as usize;
    let work = digits * 2 + 60;
    let bern = bernoulli_numbers(2 * m_terms);
    with_digits(work, || {
        let ln_n = BigReal::from_i64(n).ln();
        let mut partial = vec![BigReal::zero(); j_max + 1];
        for k in 2..n {
            let lk = BigReal::from_i64(k).ln();
            let inv_k = BigReal::one() / BigReal::from_i64(k);
            let mut p = inv_k;
            for slot in partial.iter_mut().take(j_max + 1) {
                *slot = slot.clone() + p.clone();
                p = p * lk.clone();
            }
        }
        partial[0] = partial[0].clone() + BigReal::one();

        let n_real = BigReal::from_i64(n);
        let mut ln_pows = vec![BigReal::one()];
        for i in 1..=j_max + 1 {
            ln_pows.push(ln_pows[i - 1].clone() * ln_n.clone());
        }

        let mut out = Vec::with_capacity(j_max + 1);
        for j in 0..=j_max {
            let mut g = partial[j].clone()
                - ln_pows[j + 1].clone() / BigReal::from_i64(j as i64 + 1)
                + ln_pows[j].clone() / (n_real.clone() * BigReal::from_i64(2));
            // P_r as integer coefficient vectors in y = ln x
            let mut poly: Vec<BigInt> = vec![BigInt::zero(); j + 1];
            poly[j] = BigInt::one();
            let mut x_pow = n_real.clone(); // N^{1+r}
            let mut fact = BigRational::one(); // (2m)!
            for r in 0..(2 * m_terms) {
                // P_{r+1} = P_r' - (1+r) P_r
                let mut next = vec![BigInt::zero(); j + 1];
                for (d, c) in poly.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    next[d] -= c * BigInt::from(r as i64 + 1);
                    if d > 0 {
                        next[d - 1] += c * BigInt::from(d as i64);
                    }
                }
                poly = next;
                x_pow = x_pow * n_real.clone();
                let order = r + 1;
                if order % 2 == 1 {
                    let two_m = order + 1;
                    fact *= BigRational::from_integer(BigInt::from((two_m * (two_m - 1)) as i64));
                    let coef = &bern[two_m] / &fact;
                    if coef.is_zero() {
                        continue;
                    }
                    let mut pv = BigReal::zero();
                    for d in (0..=j).rev() {
                        pv = pv * ln_n.clone() + BigReal::from_bigint(&poly[d]);
                    }
                    let deriv = pv / x_pow.clone();
                    let coef_r = BigReal::from_rational(&coef);
                    g = g - coef_r * deriv;
                }
            }
            out.push(g);
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const G0: &str = "0.5772156649015328606065120900824024310421593359399235988";
    const G1: &str = "-0.0728158454836767248605863758749013191377363383343379525990066";
    const G2: &str = "-0.00969036319287231848453038603521252935";
    const G10: &str = "0.000205332814909064794683722289237065302959853774166764303840209";

    fn close(a: &BigReal, lit: &str, tol: &str) -> bool {
        let b = BigReal::parse_decimal(lit).unwrap();
        (a.clone() - b).abs() < BigReal::parse_decimal(tol).unwrap()
    }

    // defining limit, f64, with two Euler–Maclaurin end corrections
    fn gamma_f64(j: i32, n: u32) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=n {
            let x = k as f64;
            let term = x.ln().powi(j) / x - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        let x = n as f64;
        let l = x.ln();
        let f = l.powi(j) / x;
        let df = if j == 0 {
            -1.0 / (x * x)
        } else {
            (j as f64 * l.powi(j - 1) - l.powi(j)) / (x * x)
        };
        sum - l.powi(j + 1) / (j as f64 + 1.0) - f / 2.0 - df / 12.0
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(12);
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(b[1], r(-1, 2));
        assert_eq!(b[2], r(1, 6));
        assert_eq!(b[4], r(-1, 30));
        assert_eq!(b[3], r(0, 1));
        assert_eq!(b[12], r(-691, 2730));
    }

    #[test]
    fn bundled_examples() {
        let g0 = stieltjes(0, 15).unwrap();
        assert!((g0.to_f64() - 0.577215664901533).abs() < 1e-15);
        let g1 = stieltjes(1, 12).unwrap();
        assert_eq!(g1.to_scientific(12), "-7.28158454837e-2");
        let g2 = stieltjes(2, 10).unwrap();
        assert_eq!(g2.to_scientific(7), "-9.690363e-3");
        assert!(matches!(
            stieltjes(41, 10),
            Err(Error::UnsupportedIndex { .. })
        ));
        assert!(matches!(
            stieltjes(0, 60),
            Err(Error::PrecisionCeiling { .. })
        ));
    }

    #[test]
    fn bundled_matches_published_values() {
        with_digits(50, || {
            let t = StieltjesTable::bundled();
            assert_eq!(t.j_max(), J_MAX);
            assert!(close(t.get(0).unwrap(), G0, "1e-49"));
            assert!(close(t.get(1).unwrap(), G1, "1e-50"));
            assert!(close(t.get(2).unwrap(), G2, "1e-38"));
            assert!(close(t.get(10).unwrap(), G10, "1e-52"));
        });
    }

    #[test]
    fn f64_limit_oracle_agrees() {
        let t = StieltjesTable::bundled();
        for j in 0..4 {
            let oracle = gamma_f64(j, 20000);
            let v = t.get(j as usize).unwrap().to_f64();
            assert!((oracle - v).abs() < 1e-11, "j={j}: {oracle} vs {v}");
        }
    }

    #[test]
    fn computed_backend_reproduces_table() {
        with_digits(50, || {
            let bundled = StieltjesTable::bundled();
            let computed = StieltjesTable::computed(12, 50).unwrap();
            for j in 0..=12 {
                let d = (bundled.get(j).unwrap().clone() - computed.get(j).unwrap().clone()).abs();
                let scale = bundled.get(j).unwrap().abs();
                assert!(
                    d <= scale * BigReal::parse_decimal("1e-45").unwrap(),
                    "j={j} differs by {d:?}"
                );
            }
        });
    }

    #[test]
    fn zeta_series_construction() {
        with_digits(50, || {
            let t = StieltjesTable::bundled();
            let z = t.zeta_series(-1).unwrap();
            assert_eq!(z, LaurentSeries::monomial(-1, BigReal::one()));
            let z = t.zeta_series(0).unwrap();
            assert_eq!(z.coeffs(), &[BigReal::one(), t.get(0).unwrap().clone()]);
            let z = t.zeta_series(6).unwrap();
            assert_eq!(z.lowest_order(), -1);
            assert_eq!(z.trunc_order(), 6);
            let mut fact = BigReal::one();
            for j in 0..=6usize {
                if j > 0 {
                    fact = fact * BigReal::from_i64(j as i64);
                }
                let expect = t.get(j).unwrap().clone() / fact.clone();
                let expect = if j % 2 == 1 { -expect } else { expect };
                assert_eq!(z.coeff(j as i64).unwrap(), &expect);
            }
            assert!(t.zeta_series(-2).is_err());
        });
    }

    #[test]
    fn zeta_squared_and_logderiv() {
        with_digits(50, || {
            let t = StieltjesTable::bundled();
            let (g0, g1, g2) = (
                t.get(0).unwrap().clone(),
                t.get(1).unwrap().clone(),
                t.get(2).unwrap().clone(),
            );
            let z = t.zeta_series(2).unwrap();
            let z2 = z.mul(&z);
            let tol = BigReal::parse_decimal("1e-42").unwrap();
            assert_eq!(z2.lowest_order(), -2);
            assert!((z2.coeffs()[1].clone() - g0.clone() * BigReal::from_i64(2)).abs() < tol);
            let c = g0.clone() * g0.clone() - g1.clone() * BigReal::from_i64(2);
            assert!((z2.coeffs()[2].clone() - c).abs() < tol);

            // (zeta'/zeta)' = 1/(s-1)^2 + (-2g1 - g0^2) + (6 g0 g1 + 3 g2 + 2 g0^3)(s-1)
            let z = t.zeta_series(4).unwrap();
            let ld = z.diff().unwrap().mul(&z.inv().unwrap());
            let d = ld.diff().unwrap();
            assert_eq!(d.lowest_order(), -2);
            assert!((d.coeff(-2).unwrap().clone() - BigReal::one()).abs() < tol);
            assert!(d.coeff(-1).unwrap().abs() < tol);
            let c0 = -(g1.clone() * BigReal::from_i64(2)) - g0.clone() * g0.clone();
            assert!((d.coeff(0).unwrap().clone() - c0).abs() < tol);
            let c1 = g0.clone() * g1 * BigReal::from_i64(6)
                + g2 * BigReal::from_i64(3)
                + g0.clone() * g0.clone() * g0 * BigReal::from_i64(2);
            assert!((d.coeff(1).unwrap().clone() - c1).abs() < tol);
        });
    }

    #[test]
    fn parse_rejects_out_of_order_rows() {
        let err = StieltjesTable::parse("0\t0.5\n2\t0.1\n", 50, StieltjesSource::File).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(StieltjesTable::parse("", 50, StieltjesSource::File).is_err());
    }
}
