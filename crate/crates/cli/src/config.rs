//! Run configuration: flags > `ZX_` environment variables > config file
//! (`key=value` lines) > defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use zx_core::coefficients::{DEFAULT_K_MAX, DEFAULT_N_MAX, DEFAULT_TAIL_TOL};
use zx_core::stieltjes::COMPUTED_DIGITS_MAX;

pub const DEFAULT_DIGITS: u32 = 50;
pub const DEFAULT_X_MAX: usize = 100_000;
pub const DEFAULT_ZERO_COUNT: usize = 1000;
pub const DEFAULT_OUTPUT_DIR: &str = "zx-out";
pub const DEFAULT_N_LIST: &str = "-2,-1,0,1,2,3,4,5,6,7,8,9,10";

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// Working precision in significant decimal digits [default: 50]
    #[arg(long, global = true, env = "ZX_DIGITS")]
    pub digits: Option<u32>,
    /// Largest k in the coefficient k-sum [default: 80]
    #[arg(long, global = true, env = "ZX_K_MAX")]
    pub k_max: Option<usize>,
    /// Largest n for alpha_n [default: 22]
    #[arg(long, global = true, env = "ZX_N_MAX")]
    pub n_max: Option<i64>,
    /// Worker threads [default: available cores]
    #[arg(long, global = true, env = "ZX_WORKERS")]
    pub workers: Option<usize>,
    /// Directory for all outputs [default: zx-out]
    #[arg(long, global = true, env = "ZX_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,
    /// Read zero ordinates from this file (one per line) instead of computing them
    #[arg(long, global = true, env = "ZX_ZEROS_FILE")]
    pub zeros_file: Option<PathBuf>,
    /// Number of zeros (and extremum records) to use [default: 1000]
    #[arg(long, global = true, env = "ZX_ZERO_COUNT")]
    pub zero_count: Option<usize>,
    /// Use all zeros up to this height instead of a count
    #[arg(long, global = true, env = "ZX_T_MAX")]
    pub t_max: Option<f64>,
    /// Keep every stride-th record in figure data [default: 1]
    #[arg(long, global = true, env = "ZX_STRIDE")]
    pub stride: Option<usize>,
    /// Append a JSON-lines report to this file
    #[arg(long, global = true, env = "ZX_REPORT")]
    pub report: Option<PathBuf>,
    /// Relative tail tolerance of the k-sums [default: 1e-18]
    #[arg(long, global = true, env = "ZX_TAIL_TOL")]
    pub tail_tol: Option<f64>,
    /// Sieve limit for the arithmetic identity suites [default: 100000]
    #[arg(long, global = true, env = "ZX_X_MAX")]
    pub x_max: Option<usize>,
    /// Comma-separated truncation orders N [default: -2..10]
    #[arg(long, global = true, env = "ZX_N_LIST", allow_hyphen_values = true)]
    pub n_list: Option<String>,
    /// Stieltjes constants file (`j<TAB>value` lines) replacing the bundled table
    #[arg(long, global = true, env = "ZX_STIELTJES_TABLE")]
    pub stieltjes_table: Option<PathBuf>,
    /// Config file of key=value lines, keys named like the long flags
    #[arg(long, global = true, env = "ZX_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroSource {
    Compute,
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extent {
    ZeroCount(usize),
    TMax(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub digits: u32,
    pub k_max: usize,
    pub n_max: i64,
    pub x_max: usize,
    pub tail_tol: f64,
    pub zero_source: ZeroSource,
    pub extent: Extent,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub stride: usize,
    pub report: Option<PathBuf>,
    pub n_list: Vec<i64>,
    pub stieltjes_table: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

const KEYS: [&str; 14] = [
    "digits",
    "k-max",
    "n-max",
    "workers",
    "output-dir",
    "zeros-file",
    "zero-count",
    "t-max",
    "stride",
    "report",
    "tail-tol",
    "x-max",
    "n-list",
    "stieltjes-table",
];

/// Parses `key=value` lines; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError(format!("config line {}: unknown key `{key}`", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ConfigError> {
    map.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| ConfigError(format!("config key `{key}`: cannot parse `{v}`")))
        })
        .transpose()
}

pub fn parse_n_list(s: &str) -> Result<Vec<i64>, ConfigError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let n: i64 = part
            .parse()
            .map_err(|_| ConfigError(format!("n-list entry `{part}` is not an integer")))?;
        if n < -2 {
            return Err(ConfigError(format!("n-list entry {n} is below -2")));
        }
        out.push(n);
    }
    if out.is_empty() {
        return Err(ConfigError("n-list is empty".into()));
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError(format!("cannot read config {}: {e}", p.display())))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        macro_rules! pick {
            ($field:ident, $key:literal, $default:expr) => {
                match args.$field.clone() {
                    Some(v) => v,
                    None => from_file(&file, $key)?.unwrap_or($default),
                }
            };
        }
        let digits: u32 = pick!(digits, "digits", DEFAULT_DIGITS);
        let k_max: usize = pick!(k_max, "k-max", DEFAULT_K_MAX);
        let n_max: i64 = pick!(n_max, "n-max", DEFAULT_N_MAX);
        let workers: usize = pick!(
            workers,
            "workers",
            std::thread::available_parallelism().map_or(1, |n| n.get())
        );
        let output_dir: PathBuf = pick!(output_dir, "output-dir", PathBuf::from(DEFAULT_OUTPUT_DIR));
        let stride: usize = pick!(stride, "stride", 1);
        let tail_tol: f64 = pick!(tail_tol, "tail-tol", DEFAULT_TAIL_TOL);
        let x_max: usize = pick!(x_max, "x-max", DEFAULT_X_MAX);
        let n_list_text: String = pick!(n_list, "n-list", DEFAULT_N_LIST.to_string());
        let report = match &args.report {
            Some(p) => Some(p.clone()),
            None => from_file(&file, "report")?,
        };
        let stieltjes_table = match &args.stieltjes_table {
            Some(p) => Some(p.clone()),
            None => from_file(&file, "stieltjes-table")?,
        };
        let zeros_file: Option<PathBuf> = match &args.zeros_file {
            Some(p) => Some(p.clone()),
            None => from_file(&file, "zeros-file")?,
        };
        let layer = |count: Option<usize>, t: Option<f64>| match (count, t) {
            (Some(_), Some(_)) => Err(ConfigError(
                "set only one of zero-count and t-max".into(),
            )),
            (Some(c), None) => Ok(Some(Extent::ZeroCount(c))),
            (None, Some(t)) => Ok(Some(Extent::TMax(t))),
            (None, None) => Ok(None),
        };
        let extent = match layer(args.zero_count, args.t_max)? {
            Some(e) => e,
            None => layer(from_file(&file, "zero-count")?, from_file(&file, "t-max")?)?
                .unwrap_or(Extent::ZeroCount(DEFAULT_ZERO_COUNT)),
        };
        let cfg = RunConfig {
            digits,
            k_max,
            n_max,
            x_max,
            tail_tol,
            zero_source: zeros_file.map_or(ZeroSource::Compute, ZeroSource::File),
            extent,
            workers,
            output_dir,
            stride,
            report,
            n_list: parse_n_list(&n_list_text)?,
            stieltjes_table,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError(m));
        if self.n_max > 10 && self.digits < 30 {
            return fail(format!("n-max {} needs digits >= 30", self.n_max));
        }
        if self.digits < 16 || self.digits > COMPUTED_DIGITS_MAX {
            return fail(format!("digits must lie in [16, {COMPUTED_DIGITS_MAX}]"));
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if self.stride == 0 {
            return fail("stride must be at least 1".into());
        }
        if self.k_max == 0 {
            return fail("k-max must be at least 1".into());
        }
        if self.n_max < -2 {
            return fail("n-max must be at least -2".into());
        }
        if self.x_max < 2 {
            return fail("x-max must be at least 2".into());
        }
        if !(self.tail_tol > 0.0) {
            return fail("tail-tol must be positive".into());
        }
        if let Extent::TMax(t) = self.extent {
            if !(t.is_finite() && t > 14.0) {
                return fail(format!("t-max {t} must exceed 14"));
            }
        }
        Ok(())
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

pub fn ensure_dir(p: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&GlobalArgs {
            workers: Some(1),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.digits, 50);
        assert_eq!(cfg.extent, Extent::ZeroCount(DEFAULT_ZERO_COUNT));
        assert_eq!(cfg.n_list, (-2..=10).collect::<Vec<_>>());
        assert_eq!(cfg.zero_source, ZeroSource::Compute);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("zx.conf");
        std::fs::write(&p, "# run\ndigits = 60\nk_max=40\nt-max=500\n").unwrap();
        let cfg = RunConfig::resolve(&GlobalArgs {
            config: Some(p.clone()),
            digits: Some(55),
            workers: Some(2),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.digits, 55);
        assert_eq!(cfg.k_max, 40);
        assert_eq!(cfg.extent, Extent::TMax(500.0));
        let cfg = RunConfig::resolve(&GlobalArgs {
            config: Some(p),
            zero_count: Some(7),
            workers: Some(2),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.extent, Extent::ZeroCount(7));
    }

    #[test]
    fn invalid_configs() {
        let bad = |a: GlobalArgs| RunConfig::resolve(&a).is_err();
        assert!(bad(GlobalArgs {
            digits: Some(20),
            n_max: Some(12),
            ..Default::default()
        }));
        assert!(bad(GlobalArgs {
            workers: Some(0),
            ..Default::default()
        }));
        assert!(bad(GlobalArgs {
            zero_count: Some(5),
            t_max: Some(100.0),
            ..Default::default()
        }));
        assert!(parse_config_file("colour=blue").is_err());
        assert!(parse_config_file("digits").is_err());
        assert!(parse_n_list("-3").is_err());
        assert_eq!(parse_n_list("-2").unwrap(), vec![-2]);
    }
}
