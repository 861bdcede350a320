use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use zx_core::arithmetic::{
    a_k_residue, dirichlet_expansion_partial, identity_suite, telescoping_check,
    z1_logderiv_direct, ArithmeticTables,
};
use zx_core::coefficients::{
    alpha_0_closed, alpha_minus1_closed, alpha_minus2_closed, alpha_via_beta, build_c_table,
    render_alpha_table, AlphaSet, CoefficientTable,
};
use zx_core::experiment::{cumulative, error_table, gap_outcomes, write_figure_data};
use zx_core::hardy_z::{find_zeros, first_zeros, load_zeros, ExtremumRecord, GapOutcome};
use zx_core::scalar::with_digits;
use zx_core::stieltjes::{StieltjesTable, TABLE_DIGITS};
use zx_core::{Error, Scalar};

use crate::config::{ensure_dir, Extent, RunConfig, ZeroSource};

/// Gaps per checkpoint shard.
pub const SHARD_GAPS: usize = 10_000;
/// Every n-th ordinate of a zeros file is checked for a sign change.
pub const ZEROS_FILE_SAMPLE: usize = 100;
pub const EXTREMA_HEADER: &str = "index,gamma_lo,gamma_hi,t_star,z2,location_tol";
const SHARD_DIR: &str = "extrema.ckpt";
/// Calibration height of the residue comparison.
pub const RESIDUE_CALIBRATION_X: f64 = 1e3;

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Verify(Vec<String>),
    Config(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    /// 1 I/O, 2 non-convergence or accuracy, 3 verification failure, 4 missed
    /// zero, 5 data integrity, 6 invalid configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Verify(_) => 3,
            Failure::Config(_) => 6,
            Failure::Core(e) => match e {
                Error::Io(_) => 1,
                Error::NonConvergence { .. }
                | Error::Accuracy { .. }
                | Error::ExpansionInvalid { .. }
                | Error::Singularity { .. }
                | Error::NonInvertible
                | Error::TruncationUnderflow(_) => 2,
                Error::MissedZero { .. } => 4,
                Error::DataIntegrity { .. } | Error::Parse { .. } | Error::Ordering(_) => 5,
                _ => 6,
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Verify(names) => format!("verification failed: {}", names.join(", ")),
            Failure::Config(m) => format!("invalid configuration: {m}"),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn append_report<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> CmdResult {
    let Some(path) = &cfg.report else {
        return Ok(());
    };
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| Failure::Core(Error::Io(e.into())))?;
        writeln!(f, "{line}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    status: &'a str,
    detail: String,
}

fn stieltjes_for(cfg: &RunConfig, j_max: usize) -> Result<StieltjesTable, Error> {
    match &cfg.stieltjes_table {
        Some(p) => StieltjesTable::from_path(p),
        None if cfg.digits > TABLE_DIGITS => {
            with_digits(cfg.digits, || StieltjesTable::computed(j_max, cfg.digits))
        }
        None => Ok(StieltjesTable::bundled()),
    }
}

fn coefficient_setup(cfg: &RunConfig, n_max: i64) -> Result<(CoefficientTable, AlphaSet), Error> {
    let l_max = (n_max.max(0) + 2) as usize;
    let st = stieltjes_for(cfg, l_max)?;
    with_digits(cfg.digits, || {
        let table = build_c_table(cfg.k_max, l_max, &st)?;
        let set = AlphaSet::compute(&table, n_max, cfg.tail_tol)?;
        Ok((table, set))
    })
}

pub fn cmd_coeffs(cfg: &RunConfig) -> CmdResult {
    let (_, set) = coefficient_setup(cfg, cfg.n_max)?;
    ensure_dir(&cfg.output_dir)?;
    let sig = (cfg.digits as usize).saturating_sub(10).max(17);
    let mut csv = String::from("n,alpha\n");
    for (n, a) in &set.alpha {
        let _ = writeln!(csv, "{n},{}", a.to_scientific(sig));
    }
    fs::write(cfg.path("alphas.csv"), csv)?;
    fs::write(cfg.path("alphas.txt"), render_alpha_table(&set))?;
    let detail = format!(
        "alpha_-2..alpha_{} at {} digits, k truncation {}, tail bound {:.1e}",
        cfg.n_max, cfg.digits, set.k_truncation_used, set.tail_bound
    );
    println!("coeffs: {detail}");
    println!("wrote {}", cfg.path("alphas.csv").display());
    append_report(cfg, &[Summary { command: "coeffs", status: "ok", detail }])
}

#[derive(Serialize, Debug)]
pub struct PropertyLine {
    pub property: String,
    pub status: &'static str,
    pub detail: String,
}

fn prop(name: &str, ok: Option<bool>, detail: String) -> PropertyLine {
    PropertyLine {
        property: name.to_string(),
        status: match ok {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        },
        detail,
    }
}

/// `alpha_via_beta(n)` for `n in {-2, -1, 0}` against the closed forms,
/// with `gamma_0`, `gamma_1` recomputed by Euler–Maclaurin rather than read
/// from the active Stieltjes table.
fn closed_form_check(cfg: &RunConfig) -> Result<PropertyLine, Error> {
    let st = stieltjes_for(cfg, 4)?;
    let digits = cfg.digits;
    let tol = 10f64.powf(-0.4 * digits as f64);
    let worst = with_digits(digits, || -> Result<f64, Error> {
        let table = build_c_table(cfg.k_max, 4, &st)?;
        let reference = StieltjesTable::computed(1, digits)?;
        let (g0, g1) = (reference.get(0)?, reference.get(1)?);
        let closed = [
            alpha_minus2_closed(),
            alpha_minus1_closed(g0),
            alpha_0_closed(g0, g1),
        ];
        let mut worst = 0.0f64;
        for (n, c) in (-2..=0).zip(closed) {
            let v = alpha_via_beta(n, &table, cfg.tail_tol)?.value;
            worst = worst.max((v - c).abs().to_f64());
        }
        Ok(worst)
    })?;
    Ok(prop(
        "closed_forms",
        Some(worst < tol),
        format!("max |alpha_via_beta - closed form| = {worst:.2e}, n = -2..0, tol {tol:.0e}"),
    ))
}

pub fn verify_lines(cfg: &RunConfig) -> Result<Vec<PropertyLine>, Error> {
    let x_max = cfg.x_max;
    let tables = ArithmeticTables::build(x_max, 4)?;
    let rep = identity_suite(&tables)?;
    let mut out = vec![
        prop("mobius", Some(rep.mobius_failures == 0), format!("n ≤ {x_max}")),
        prop("selberg", Some(rep.selberg_failures == 0), format!("n ≤ {x_max}")),
        prop("a1_identity", Some(rep.a1_failures == 0), format!("n ≤ {x_max}")),
        prop(
            "convolution",
            Some(rep.convolution_failures == 0),
            format!("Lambda_j * Lambda_k = Lambda_(j+k), j+k ≤ 4, n ≤ {}", rep.convolution_n_hi),
        ),
    ];
    let s = Complex64::new(3.0, 200.0);
    let n_exp = x_max.min(20_000);
    if n_exp >= 100 {
        let t = telescoping_check(&tables, s, n_exp, 3)?;
        out.push(prop(
            "telescoping",
            Some(t.passed()),
            format!("s = 3+200i, n ≤ {n_exp}: diff {:.2e} vs bound {:.2e}", t.diff, t.bound),
        ));
        let d = z1_logderiv_direct(s, n_exp)?;
        let e = dirichlet_expansion_partial(&tables, s, 4, n_exp)?;
        let allow = d.tail + e.tail + 10.0 / (s.im * s.im.ln());
        let diff = (d.value - e.value).norm();
        out.push(prop(
            "dirichlet_expansion",
            Some(diff <= allow),
            format!("s = 3+200i: |direct - expansion| {diff:.2e} vs {allow:.2e}"),
        ));
    } else {
        out.push(prop("telescoping", None, "needs x-max ≥ 100".into()));
        out.push(prop("dirichlet_expansion", None, "needs x-max ≥ 100".into()));
    }
    let (table, _) = coefficient_setup(cfg, 3)?;
    for k in 1..=3 {
        let name = format!("residue_k{k}");
        if (x_max as f64) < RESIDUE_CALIBRATION_X * 10.0 {
            out.push(prop(&name, None, "needs x-max ≥ 10000".into()));
            continue;
        }
        let scaled = |x: f64| -> Result<f64, Error> {
            Ok((tables.a_k_bruteforce(k, x)? - a_k_residue(k, x, &table)?).abs() / x.powf(0.6))
        };
        let c = scaled(RESIDUE_CALIBRATION_X)?;
        let mut ok = true;
        let mut detail = format!("C = {c:.4} at x = 1e3");
        let mut x = RESIDUE_CALIBRATION_X * 10.0;
        while x <= x_max as f64 {
            let r = scaled(x)?;
            ok &= r <= c;
            let _ = write!(detail, "; {r:.4} at x = {x:.0e}");
            x *= 10.0;
        }
        out.push(prop(&name, Some(ok), detail));
    }
    out.push(closed_form_check(cfg)?);
    Ok(out)
}

pub fn cmd_verify(cfg: &RunConfig) -> CmdResult {
    let lines = verify_lines(cfg)?;
    for l in &lines {
        println!("{}: {} ({})", l.property, l.status, l.detail);
    }
    append_report(cfg, &lines)?;
    let failed: Vec<String> = lines
        .iter()
        .filter(|l| l.status == "FAIL")
        .map(|l| l.property.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(failed))
    }
}

/// Zero ordinates for the configured extent, plus `extra` beyond a count.
fn resolve_zeros(cfg: &RunConfig, extra: usize) -> Result<Vec<f64>, Error> {
    match (&cfg.zero_source, cfg.extent) {
        (ZeroSource::Compute, Extent::ZeroCount(n)) => {
            Ok(first_zeros(if n == 0 { 0 } else { n + extra })?.ordinates)
        }
        (ZeroSource::Compute, Extent::TMax(t)) => Ok(find_zeros(14.0, t)?.ordinates),
        (ZeroSource::File(p), extent) => {
            let mut z = load_zeros(p, ZEROS_FILE_SAMPLE)?.ordinates;
            match extent {
                Extent::ZeroCount(0) => z.clear(),
                Extent::ZeroCount(n) => {
                    if z.len() < n + extra {
                        return Err(Error::DataIntegrity {
                            line: z.len(),
                            reason: format!("file holds {} zeros, {} needed", z.len(), n + extra),
                        });
                    }
                    z.truncate(n + extra);
                }
                Extent::TMax(t) => z.retain(|&g| g <= t),
            }
            Ok(z)
        }
    }
}

pub fn cmd_zeros(cfg: &RunConfig) -> CmdResult {
    let zeros = resolve_zeros(cfg, 0)?;
    ensure_dir(&cfg.output_dir)?;
    let mut text = String::from("# zero ordinates gamma_n, ascending\n");
    for g in &zeros {
        text.push_str(&f17(*g));
        text.push('\n');
    }
    fs::write(cfg.path("zeros.txt"), text)?;
    let detail = format!(
        "{} zeros up to {:.6}",
        zeros.len(),
        zeros.last().copied().unwrap_or(0.0)
    );
    println!("zeros: {detail}");
    append_report(cfg, &[Summary { command: "zeros", status: "ok", detail }])
}

fn outcome_line(o: &GapOutcome) -> String {
    match o {
        GapOutcome::Found(r) => format!(
            "{},{},{},{},{},{}",
            r.index,
            f17(r.gamma_lo),
            f17(r.gamma_hi),
            f17(r.t_star),
            f17(r.z2),
            f17(r.location_tol)
        ),
        GapOutcome::Flagged {
            index,
            gamma_lo,
            gamma_hi,
        } => format!("{index},{},{},flagged,,", f17(*gamma_lo), f17(*gamma_hi)),
    }
}

fn shard_is_complete(path: &Path, first_index: usize, first_lo: f64, rows: usize) -> bool {
    let Ok(text) = fs::read_to_string(path) else {
        return false;
    };
    let lines: Vec<&str> = text.lines().collect();
    lines.len() == rows
        && lines.first().is_some_and(|l| {
            let mut it = l.split(',');
            it.next() == Some(first_index.to_string().as_str()) && it.next() == Some(f17(first_lo).as_str())
        })
}

/// Extremum lines for every gap of `zeros`, computed in shards of
/// [`SHARD_GAPS`] that are written under the output directory and reused by
/// a rerun.
fn extrema_lines(cfg: &RunConfig, zeros: &[f64]) -> Result<Vec<String>, Failure> {
    let gaps = zeros.len().saturating_sub(1);
    let dir = cfg.path(SHARD_DIR);
    let mut lines = Vec::with_capacity(gaps);
    if gaps == 0 {
        return Ok(lines);
    }
    ensure_dir(&dir)?;
    for (k, start) in (0..gaps).step_by(SHARD_GAPS).enumerate() {
        let end = (start + SHARD_GAPS).min(gaps);
        let path = dir.join(format!("shard-{k:06}.csv"));
        if !shard_is_complete(&path, start + 1, zeros[start], end - start) {
            let outcomes = gap_outcomes(&zeros[start..=end], start + 1)?;
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&outcome_line(o));
                text.push('\n');
            }
            let tmp = dir.join(format!("shard-{k:06}.tmp"));
            fs::write(&tmp, text)?;
            fs::rename(&tmp, &path)?;
        }
        lines.extend(fs::read_to_string(&path)?.lines().map(str::to_string));
    }
    Ok(lines)
}

pub fn cmd_extrema(cfg: &RunConfig) -> CmdResult {
    let zeros = resolve_zeros(cfg, 1)?;
    ensure_dir(&cfg.output_dir)?;
    let lines = extrema_lines(cfg, &zeros)?;
    let mut found = format!("{EXTREMA_HEADER}\n");
    let mut flagged = String::from("index,gamma_lo,gamma_hi\n");
    let mut n_found = 0usize;
    let mut n_flagged = 0usize;
    let mut worst = 0.0f64;
    for l in &lines {
        let f: Vec<&str> = l.split(',').collect();
        if f[3] == "flagged" {
            n_flagged += 1;
            let _ = writeln!(flagged, "{},{},{}", f[0], f[1], f[2]);
        } else {
            n_found += 1;
            let parse = |s: &str| s.parse::<f64>().unwrap_or(f64::NAN);
            worst = worst.max(parse(f[5]) / (parse(f[2]) - parse(f[1])));
            found.push_str(l);
            found.push('\n');
        }
    }
    fs::write(cfg.path("extrema.csv"), found)?;
    fs::write(cfg.path("flagged.csv"), flagged)?;
    let _ = fs::remove_dir_all(cfg.path(SHARD_DIR));
    let detail = format!(
        "{n_found} records, {n_flagged} flagged gaps, max location_tol/gap {worst:.2e}"
    );
    println!("extrema: {detail}");
    append_report(cfg, &[Summary { command: "extrema", status: "ok", detail }])
}

pub fn parse_extrema_csv(text: &str) -> Result<Vec<ExtremumRecord>, Error> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let bad = |reason: &str| Error::Parse {
            line: i + 1,
            reason: reason.to_string(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad("expected 6 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        out.push(ExtremumRecord {
            index: f[0].parse().map_err(|_| bad("bad index"))?,
            gamma_lo: num(f[1])?,
            gamma_hi: num(f[2])?,
            t_star: num(f[3])?,
            z2: num(f[4])?,
            location_tol: num(f[5])?,
        });
    }
    Ok(out)
}

/// Records from `<output-dir>/extrema.csv` when it covers the configured
/// extent, otherwise from a fresh extrema run.
fn load_or_run_extrema(cfg: &RunConfig) -> Result<Vec<ExtremumRecord>, Failure> {
    let path: PathBuf = cfg.path("extrema.csv");
    if let Ok(text) = fs::read_to_string(&path) {
        let mut recs = parse_extrema_csv(&text)?;
        match cfg.extent {
            Extent::ZeroCount(n) if recs.len() >= n => {
                recs.truncate(n);
                return Ok(recs);
            }
            Extent::TMax(t) if recs.last().is_some_and(|r| r.gamma_hi >= t) => {
                recs.retain(|r| r.gamma_hi <= t);
                return Ok(recs);
            }
            _ => {}
        }
    }
    cmd_extrema(cfg)?;
    Ok(parse_extrema_csv(&fs::read_to_string(&path)?)?)
}

fn alphas_for_list(cfg: &RunConfig) -> Result<AlphaSet, Error> {
    let top = cfg.n_list.iter().copied().max().unwrap_or(-2).max(0);
    Ok(coefficient_setup(cfg, top)?.1)
}

pub fn cmd_tables(cfg: &RunConfig) -> CmdResult {
    let recs = load_or_run_extrema(cfg)?;
    let series = cumulative(&recs)?;
    let alphas = alphas_for_list(cfg)?;
    let table = error_table(&series, &alphas, &cfg.n_list)?;
    let mut csv = String::from("N,error\n");
    for (n, e) in &table.rows {
        let _ = writeln!(csv, "{n},{}", f17(*e));
    }
    fs::write(cfg.path("error_table.csv"), csv)?;
    fs::write(cfg.path("error_table.txt"), table.render())?;
    write_figure(cfg, &series, &alphas)?;
    print!("{}", table.render());
    let detail = format!(
        "{} records, T_ref {:.2}, true sum {:.6e}",
        series.len(),
        table.t_ref,
        table.true_sum
    );
    append_report(cfg, &[Summary { command: "tables", status: "ok", detail }])
}

fn write_figure(
    cfg: &RunConfig,
    series: &zx_core::experiment::CumulativeSeries,
    alphas: &AlphaSet,
) -> CmdResult {
    let mut buf = Vec::new();
    write_figure_data(series, alphas, &cfg.n_list, cfg.stride, &mut buf)?;
    fs::write(cfg.path("figure.csv"), buf)?;
    Ok(())
}

pub fn cmd_figure(cfg: &RunConfig) -> CmdResult {
    let recs = load_or_run_extrema(cfg)?;
    let series = cumulative(&recs)?;
    let alphas = alphas_for_list(cfg)?;
    write_figure(cfg, &series, &alphas)?;
    let detail = format!("{} records, stride {}", series.len(), cfg.stride);
    println!("figure: {detail}");
    append_report(cfg, &[Summary { command: "figure", status: "ok", detail }])
}
