//! Cumulative sums of `Z(t_n)^2` over the extrema, comparison with the
//! asymptotic expansion, and the two mean-value cross-checks.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficients::{asymptotic_value, AlphaSet};
use crate::error::{Error, Result};
use crate::hardy_z::riemann_siegel::{z_fast, EM_SWITCH};
use crate::hardy_z::{find_zeros, gap_outcome, ExtremumRecord, GapOutcome};
use crate::special::{chi_logderiv, zeta_em};

/// Relative tolerance per quadrature panel.
pub const QUAD_REL_TOL: f64 = 1e-8;
const QUAD_MAX_DEPTH: u32 = 40;
/// Smallest and largest `T` accepted by the moment checks.
pub const MOMENT_T_RANGE: (f64, f64) = (100.0, 1e5);
/// Left end of the moment integrals.
pub const MOMENT_T_START: f64 = 1.0;
const HEAD_END: f64 = 10.0;

/// Neumaier accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum in a fixed balanced binary tree, compensated at the leaves.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        let mut acc = CompensatedSum::default();
        v.iter().for_each(|&x| acc.add(x));
        return acc.value();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Clone, Debug, Default)]
pub struct CumulativeSeries {
    pub records: Vec<ExtremumRecord>,
    pub prefix: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl CumulativeSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `prefix[m]` recomputed from scratch, summing from `m` down to 0.
    pub fn reverse_prefix(&self, m: usize) -> f64 {
        let mut acc = CompensatedSum::default();
        self.records[..=m].iter().rev().for_each(|r| acc.add(r.z2));
        acc.value()
    }
}

/// Compensated prefix sums of `z2` over records ordered by `t_star`.
pub fn cumulative(records: &[ExtremumRecord]) -> Result<CumulativeSeries> {
    if let Some(w) = records.windows(2).find(|w| !(w[0].t_star < w[1].t_star)) {
        return Err(Error::Ordering(format!(
            "extremum at {} does not follow {}",
            w[1].t_star, w[0].t_star
        )));
    }
    let mut acc = CompensatedSum::default();
    let prefix = records
        .iter()
        .map(|r| {
            acc.add(r.z2);
            acc.value()
        })
        .collect();
    Ok(CumulativeSeries {
        records: records.to_vec(),
        prefix,
        t_values: records.iter().map(|r| r.t_star).collect(),
    })
}

/// One extremum per gap between consecutive ordinates; record `i` (from 1)
/// lies between `zeros[i-1]` and `zeros[i]`.
pub fn gap_outcomes(zeros: &[f64], first_index: usize) -> Result<Vec<GapOutcome>> {
    zeros
        .par_windows(2)
        .enumerate()
        .map(|(i, w)| gap_outcome(first_index + i, w[0], w[1]))
        .collect()
}

/// Error of the asymptotic formula at the reference height, for each `N`.
/// Sign convention: `error = true_sum - asymptotic`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTable {
    pub t_ref: f64,
    pub true_sum: f64,
    pub rows: Vec<(i64, f64)>,
}

pub fn error_table(series: &CumulativeSeries, alphas: &AlphaSet, n_list: &[i64]) -> Result<ErrorTable> {
    let (Some(&t_ref), Some(&true_sum)) = (series.t_values.last(), series.prefix.last()) else {
        return Err(Error::Range("error table needs at least one record".into()));
    };
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let rows = ns
        .into_iter()
        .map(|n| Ok((n, true_sum - asymptotic_value(t_ref, alphas, n)?)))
        .collect::<Result<_>>()?;
    Ok(ErrorTable {
        t_ref,
        true_sum,
        rows,
    })
}

impl ErrorTable {
    pub fn get(&self, n: i64) -> Option<f64> {
        self.rows.iter().find(|r| r.0 == n).map(|r| r.1)
    }

    /// First `N` with `|error(N)| < 2 |error(M)|` for every listed
    /// `N < M <= N + 5`.
    pub fn plateau_onset(&self) -> Option<i64> {
        self.rows.iter().find_map(|&(n, e)| {
            let later: Vec<f64> = self
                .rows
                .iter()
                .filter(|r| r.0 > n && r.0 <= n + 5)
                .map(|r| r.1.abs())
                .collect();
            (!later.is_empty() && later.iter().all(|&m| e.abs() < 2.0 * m)).then_some(n)
        })
    }

    /// `round(0.186 log T)` at the reference height.
    pub fn predicted_onset(&self) -> i64 {
        (0.186 * self.t_ref.ln()).round() as i64
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "# T_ref = {:.2}, true sum = {:.6e}, error = true - asymptotic\nN\terror\n",
            self.t_ref, self.true_sum
        );
        for (n, e) in &self.rows {
            s.push_str(&format!("{n}\t{e:.2}\n"));
        }
        s
    }
}

/// CSV with columns `t,true_cumulative,asym_N..,err_N..`, one row for every
/// `stride`-th record (records `stride`, `2 stride`, ...).
pub fn write_figure_data(
    series: &CumulativeSeries,
    alphas: &AlphaSet,
    n_list: &[i64],
    stride: usize,
    out: &mut impl Write,
) -> Result<()> {
    let stride = stride.max(1);
    let mut header = String::from("t,true_cumulative");
    for n in n_list {
        header.push_str(&format!(",asym_N{n}"));
    }
    for n in n_list {
        header.push_str(&format!(",err_N{n}"));
    }
    writeln!(out, "{header}")?;
    for i in (stride - 1..series.len()).step_by(stride) {
        let t = series.t_values[i];
        let truth = series.prefix[i];
        let asym = n_list
            .iter()
            .map(|&n| asymptotic_value(t, alphas, n))
            .collect::<Result<Vec<_>>>()?;
        let mut line = format!("{t:.16e},{truth:.16e}");
        for a in &asym {
            line.push_str(&format!(",{a:.16e}"));
        }
        for a in &asym {
            line.push_str(&format!(",{:.16e}", truth - a));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn emit_figure_data(
    series: &CumulativeSeries,
    alphas: &AlphaSet,
    n_list: &[i64],
    stride: usize,
    path: &Path,
) -> Result<()> {
    let mut buf = Vec::new();
    write_figure_data(series, alphas, n_list, stride, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point
/// Gauss rule.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Result<f64> {
    let (k, err) = gk15(f, a, b);
    if err <= QUAD_REL_TOL * k.abs() || err <= 1e-15 * (b - a) {
        return Ok(k);
    }
    if depth == 0 {
        return Err(Error::Accuracy {
            tail: err,
            target: QUAD_REL_TOL * k.abs(),
        });
    }
    let m = 0.5 * (a + b);
    Ok(adaptive(f, a, m, depth - 1)? + adaptive(f, m, b, depth - 1)?)
}

/// Result of a moment cross-check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentCheck {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

fn moment_panels(t: f64, quad_points: usize) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = MOMENT_T_RANGE;
    if !(lo..=hi).contains(&t) {
        return Err(Error::Domain(format!("T = {t} outside [{lo}, {hi}]")));
    }
    let mut cuts = vec![HEAD_END, EM_SWITCH.min(t), t];
    cuts.extend(find_zeros(14.0, t)?.ordinates);
    let mut m = ((EM_SWITCH / TAU).sqrt().ceil()) as u64;
    loop {
        let g = TAU * (m * m) as f64;
        if g >= t {
            break;
        }
        cuts.push(g);
        m += 1;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = quad_points.max(1);
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let step = (w[1] - w[0]) / pieces as f64;
        for i in 0..pieces {
            let a = w[0] + step * i as f64;
            let b = if i + 1 == pieces { w[1] } else { a + step };
            panels.push((a, b));
        }
    }
    Ok(panels)
}

/// `int_1^T weight(t) |zeta(1/2+it)|^2 dt`: Euler–Maclaurin zeta on
/// `[1, 10]`, Z on gap-aligned panels beyond, each split into `quad_points`
/// equal pieces before adaptive refinement.
fn weighted_moment(t: f64, quad_points: usize, weight: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
    let panels = moment_panels(t, quad_points)?;
    let head = |u: f64| {
        let z = zeta_em(Complex64::new(0.5, u)).map(|z| z.norm_sqr()).unwrap_or(f64::NAN);
        weight(u) * z
    };
    let body = |u: f64| {
        let z = z_fast(u);
        weight(u) * z * z
    };
    let pieces = quad_points.max(1);
    let step = (HEAD_END - MOMENT_T_START) / pieces as f64;
    let mut parts: Vec<f64> = (0..pieces)
        .map(|i| {
            let a = MOMENT_T_START + step * i as f64;
            adaptive(&head, a, a + step, QUAD_MAX_DEPTH)
        })
        .collect::<Result<_>>()?;
    let body_parts = panels
        .par_iter()
        .map(|&(a, b)| adaptive(&body, a, b, QUAD_MAX_DEPTH))
        .collect::<Result<Vec<_>>>()?;
    parts.extend(body_parts);
    Ok(pairwise_sum(&parts))
}

/// `int_1^T Z(t)^2 dt` against `T log(T/2pi) + (2 gamma_0 - 1) T`.
pub fn ingham_check(t: f64, quad_points: usize, gamma0: f64) -> Result<MomentCheck> {
    let lhs = weighted_moment(t, quad_points, |_| 1.0)?;
    let rhs = t * (t / TAU).ln() + (2.0 * gamma0 - 1.0) * t;
    Ok(MomentCheck {
        t,
        lhs,
        rhs,
        diff: lhs - rhs,
    })
}

/// `-(1/2pi) int_1^T Re(chi'/chi(1/2+it)) Z(t)^2 dt` against
/// `(T/2pi) L^2 + (T/2pi) L (-2 + 2 gamma_0) + (T/2pi)(2 - 2 gamma_0)`.
pub fn twisted_check(t: f64, quad_points: usize, gamma0: f64) -> Result<MomentCheck> {
    let weight = |u: f64| {
        let c = chi_logderiv(Complex64::new(0.5, u)).map(|c| c.re).unwrap_or(f64::NAN);
        -c / (2.0 * PI)
    };
    let lhs = weighted_moment(t, quad_points, weight)?;
    let x = t / TAU;
    let l = x.ln();
    let rhs = x * l * l + x * l * (-2.0 + 2.0 * gamma0) + x * (2.0 - 2.0 * gamma0);
    Ok(MomentCheck {
        t,
        lhs,
        rhs,
        diff: lhs - rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(i: usize, t: f64, z2: f64) -> ExtremumRecord {
        ExtremumRecord {
            index: i,
            gamma_lo: t - 0.5,
            gamma_hi: t + 0.5,
            t_star: t,
            z2,
            location_tol: 1e-5,
        }
    }

    #[test]
    fn cumulative_basics() {
        assert!(cumulative(&[]).unwrap().is_empty());
        let s = cumulative(&[rec(1, 20.0, 2.5)]).unwrap();
        assert_eq!(s.prefix, vec![2.5]);
        let err = cumulative(&[rec(1, 20.0, 1.0), rec(2, 19.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::Ordering(_)));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut acc = CompensatedSum::default();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        assert_eq!(acc.value(), 1.0 + 1e-15);
        let v: Vec<f64> = (0..1000).map(|i| 0.1 * i as f64).collect();
        assert!((pairwise_sum(&v) - 49_950.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn prefix_is_order_robust(zs in proptest::collection::vec(0.0f64..1e3, 1..300)) {
            let recs: Vec<_> = zs.iter().enumerate().map(|(i, &z)| rec(i, 20.0 + i as f64, z)).collect();
            let s = cumulative(&recs).unwrap();
            for w in s.prefix.windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
            for m in [0, s.len() / 2, s.len() - 1] {
                let r = s.reverse_prefix(m);
                prop_assert!((r - s.prefix[m]).abs() <= 1e-9 * r.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn gk15_is_exact_for_polynomials() {
        let sum: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((sum - 2.0).abs() < 1e-15);
        let (k, _) = gk15(&|x: f64| x.powi(22), 0.0, 1.0);
        assert!((k - 1.0 / 23.0).abs() < 1e-15);
        let (k, err) = gk15(&|x: f64| x.sin(), 0.0, PI);
        assert!((k - 2.0).abs() < 1e-14);
        assert!(err < 1e-6);
    }

    #[test]
    fn error_table_sign_and_plateau() {
        let alphas = AlphaSet::from_f64(&[1.0, 0.0, 0.0, 0.0]);
        let s = cumulative(&[rec(1, 100.0, 50.0)]).unwrap();
        let tab = error_table(&s, &alphas, &[-2, 0]).unwrap();
        let x = 100.0 / TAU;
        assert!((tab.get(-2).unwrap() - (50.0 - x * x.ln().powi(2))).abs() < 1e-12);
        let printed = ErrorTable {
            t_ref: 600_269.96,
            true_sum: 1.53778e7,
            rows: vec![
                (-2, 371_166.05),
                (-1, -33_026.28),
                (0, 7412.69),
                (1, -1072.47),
                (2, 113.86),
                (3, -91.45),
                (4, -54.63),
                (5, -62.32),
                (6, -60.88),
                (7, -61.27),
                (8, -61.23),
            ],
        };
        assert_eq!(printed.plateau_onset(), Some(3));
        assert_eq!(printed.predicted_onset(), 2);
    }

    #[test]
    fn figure_csv_shape() {
        let alphas = AlphaSet::from_f64(&[1.2, 0.4]);
        let recs: Vec<_> = (0..10).map(|i| rec(i, 20.0 + i as f64, 1.0)).collect();
        let s = cumulative(&recs).unwrap();
        let mut a = Vec::new();
        write_figure_data(&s, &alphas, &[-2], 3, &mut a).unwrap();
        let text = String::from_utf8(a.clone()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,true_cumulative,asym_N-2,err_N-2");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("2.2000000000000000e1,3.0000000000000000e0,"));
        let mut b = Vec::new();
        write_figure_data(&s, &alphas, &[-2], 3, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn moment_domain() {
        assert!(matches!(ingham_check(50.0, 1, 0.5772), Err(Error::Domain(_))));
    }
}
