//! Run configuration and the `key = value` file format.
//!
//! ```text
//! # comment
//! [torus]
//! eps = 1e-2
//! mode = flat
//! [kummer]
//! t = 0.008, 0.004, 0.002, 0.001
//! ```
//!
//! Sections are `eh`, `cone`, `rates`, `kummer`, `torus` and `output`.
//! Unknown sections and keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use g2glue_core::cone_spectral::Rational;
use g2glue_core::torus_solver::OperatorMode;
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            _ => Err(format!("expected json, csv or both, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    Naive,
    Refined,
}

impl FromStr for Table {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Table::Naive),
            "refined" => Ok(Table::Refined),
            _ => Err(format!("expected naive or refined, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EhConfig {
    /// Random `(k, r)` points for the identity checks.
    pub samples: usize,
    pub seed: u64,
    /// Parameters of the decay table.
    pub k: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    /// Radii per `k` in the decay table.
    pub points: usize,
}

impl Default for EhConfig {
    fn default() -> Self {
        EhConfig { samples: 1000, seed: 2, k: vec![1.0, 1e-2, 1e-4], r_min: 1.01, r_max: 1e4, points: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeConfig {
    pub degree: usize,
    #[serde(serialize_with = "ser_display")]
    pub from: Rational,
    #[serde(serialize_with = "ser_display")]
    pub to: Rational,
}

impl Default for ConeConfig {
    fn default() -> Self {
        ConeConfig { degree: 2, from: Rational::from_integer((-4).into()), to: Rational::from_integer(0.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatesConfig {
    pub table: Table,
    #[serde(serialize_with = "ser_display")]
    pub beta: Rational,
    #[serde(rename = "B", serialize_with = "ser_display")]
    pub big_b: Rational,
    /// Small exponent loss in the refined table.
    #[serde(serialize_with = "ser_display")]
    pub gamma: Rational,
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig {
            table: Table::Naive,
            beta: parse_rational("-1/20").unwrap(),
            big_b: parse_rational("-1/5").unwrap(),
            gamma: parse_rational("1/100").unwrap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KummerConfig {
    pub t: Vec<f64>,
    pub samples: usize,
    pub beta: f64,
    /// `b^2(T^7 / Gamma)`; computed when absent.
    pub b2: Option<usize>,
}

impl Default for KummerConfig {
    fn default() -> Self {
        KummerConfig { t: vec![0.2, 0.1, 0.05, 0.025], samples: 20_000, beta: -0.05, b2: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusConfig {
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub mode: OperatorMode,
    pub dump: Option<PathBuf>,
}

impl Default for TorusConfig {
    fn default() -> Self {
        TorusConfig { n: 6, eps: 1e-2, seed: 7, tol: 1e-8, max_iter: 50, mode: OperatorMode::Flat, dump: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputConfig {
    /// Directory for report files; stdout only when absent.
    pub dir: Option<PathBuf>,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: None, format: Format::Json }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub eh: EhConfig,
    pub cone: ConeConfig,
    pub rates: RatesConfig,
    pub kummer: KummerConfig,
    pub torus: TorusConfig,
    pub output: OutputConfig,
}

fn ser_display<S: serde::Serializer, D: std::fmt::Display>(x: &D, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Exact rational from `a/b`, an integer or a decimal such as `-0.05` or `1e-2`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let bad = || format!("expected a rational number, got `{s}`");
    if s.contains('/') {
        return Rational::from_str(s).map_err(|_| bad());
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = exp - frac.len() as i32;
    let mut num = format!("{sign}{int}{frac}");
    let mut den = String::from("1");
    let zeros = "0".repeat(scale.unsigned_abs() as usize);
    if scale >= 0 {
        num.push_str(&zeros);
    } else {
        den.push_str(&zeros);
    }
    Rational::from_str(&format!("{num}/{den}")).map_err(|_| bad())
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| format!("cannot parse list entry `{}`", x.trim())))
        .collect()
}

fn parse<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| format!("cannot parse `{s}`: {e}"))
}

impl RunConfig {
    /// Sets `section.key` from its textual value.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), CliError> {
        let invalid = |msg: String| CliError::Config(format!("{section}.{key}: {msg}"));
        let v = value.trim().trim_matches('"');
        let r: Result<(), String> = match (section, key) {
            ("eh", "samples") => parse(v).map(|x| self.eh.samples = x),
            ("eh", "seed") => parse(v).map(|x| self.eh.seed = x),
            ("eh", "k") => parse_list(v).map(|x| self.eh.k = x),
            ("eh", "r_min") => parse(v).map(|x| self.eh.r_min = x),
            ("eh", "r_max") => parse(v).map(|x| self.eh.r_max = x),
            ("eh", "points") => parse(v).map(|x| self.eh.points = x),
            ("cone", "degree") => parse(v).map(|x| self.cone.degree = x),
            ("cone", "from") => parse_rational(v).map(|x| self.cone.from = x),
            ("cone", "to") => parse_rational(v).map(|x| self.cone.to = x),
            ("rates", "table") => parse(v).map(|x| self.rates.table = x),
            ("rates", "beta") => parse_rational(v).map(|x| self.rates.beta = x),
            ("rates", "B") => parse_rational(v).map(|x| self.rates.big_b = x),
            ("rates", "gamma") => parse_rational(v).map(|x| self.rates.gamma = x),
            ("kummer", "t") => parse_list(v).map(|x| self.kummer.t = x),
            ("kummer", "samples") => parse(v).map(|x| self.kummer.samples = x),
            ("kummer", "beta") => parse(v).map(|x| self.kummer.beta = x),
            ("kummer", "b2") => parse(v).map(|x| self.kummer.b2 = Some(x)),
            ("torus", "n") => parse(v).map(|x| self.torus.n = x),
            ("torus", "eps") => parse(v).map(|x| self.torus.eps = x),
            ("torus", "seed") => parse(v).map(|x| self.torus.seed = x),
            ("torus", "tol") => parse(v).map(|x| self.torus.tol = x),
            ("torus", "max_iter") => parse(v).map(|x| self.torus.max_iter = x),
            ("torus", "mode") => parse(v).map(|x| self.torus.mode = x),
            ("torus", "dump") => Ok(self.torus.dump = Some(PathBuf::from(v))),
            ("output", "dir") => Ok(self.output.dir = Some(PathBuf::from(v))),
            ("output", "format") => parse(v).map(|x| self.output.format = x),
            _ => return Err(CliError::Config(format!("unknown key `{key}` in section [{section}]"))),
        };
        r.map_err(invalid)
    }

    /// Parses the file format; returns defaults for an empty input.
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        const SECTIONS: [&str; 6] = ["eh", "cone", "rates", "kummer", "torus", "output"];
        let mut cfg = RunConfig::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Parse { line: line_no, msg: format!("unterminated section header `{line}`") })?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(CliError::Parse { line: line_no, msg: format!("unknown section [{name}]") });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Parse { line: line_no, msg: format!("expected `key = value`, got `{line}`") })?;
            let Some(sec) = &section else {
                return Err(CliError::Parse { line: line_no, msg: format!("key `{}` outside of a section", key.trim()) });
            };
            cfg.set(sec, key.trim(), value).map_err(|e| match e {
                CliError::Config(msg) => CliError::Parse { line: line_no, msg },
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Domain checks, naming the offending key.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |key: &str, msg: String| Err(CliError::Config(format!("{key}: {msg}")));
        let zero = Rational::from_integer(0.into());
        let minus_four = Rational::from_integer((-4).into());
        if self.eh.samples == 0 {
            return fail("eh.samples", "must be positive".into());
        }
        if let Some(k) = self.eh.k.iter().find(|&&k| !(k > 0.0 && k <= 1.0)) {
            return fail("eh.k", format!("{k} is outside (0, 1]"));
        }
        if !(self.eh.r_min > 1.0 && self.eh.r_max > self.eh.r_min && self.eh.r_max.is_finite()) {
            return fail("eh.r_min", format!("need 1 < r_min < r_max, got {} and {}", self.eh.r_min, self.eh.r_max));
        }
        if self.eh.points < 2 {
            return fail("eh.points", "need at least 2 radii".into());
        }
        if self.cone.degree > 4 {
            return fail("cone.degree", format!("{} exceeds the cone dimension 4", self.cone.degree));
        }
        if self.cone.from >= self.cone.to {
            return fail("cone.from", format!("need from < to, got {} and {}", self.cone.from, self.cone.to));
        }
        if !(self.rates.beta > minus_four && self.rates.beta < zero) {
            return fail("rates.beta", format!("{} is outside (-4, 0)", self.rates.beta));
        }
        if !(self.rates.big_b >= Rational::from_integer((-1).into()) && self.rates.big_b <= zero) {
            return fail("rates.B", format!("{} is outside [-1, 0]", self.rates.big_b));
        }
        if !(self.rates.gamma > zero) {
            return fail("rates.gamma", format!("{} must be positive", self.rates.gamma));
        }
        if !(self.kummer.beta > -4.0 && self.kummer.beta < 0.0) {
            return fail("kummer.beta", format!("{} is outside (-4, 0)", self.kummer.beta));
        }
        if let Some(t) = self.kummer.t.iter().find(|&&t| !(t > 0.0 && t <= 0.3)) {
            return fail("kummer.t", format!("{t} is outside (0, 0.3]"));
        }
        if self.kummer.t.len() < 4 {
            return fail("kummer.t", format!("need at least 4 values, got {}", self.kummer.t.len()));
        }
        if self.kummer.samples < 8 {
            return fail("kummer.samples", "need at least 8 samples".into());
        }
        if ![4, 6, 8].contains(&self.torus.n) {
            return fail("torus.n", format!("{} is not one of 4, 6, 8", self.torus.n));
        }
        if !(self.torus.eps >= 0.0 && self.torus.eps.is_finite()) {
            return fail("torus.eps", format!("{} must be non-negative", self.torus.eps));
        }
        if !(self.torus.tol > 0.0) {
            return fail("torus.tol", format!("{} must be positive", self.torus.tol));
        }
        if self.torus.max_iter == 0 {
            return fail("torus.max_iter", "must be positive".into());
        }
        if self.torus.mode == OperatorMode::CurvedCg && self.torus.n != 4 {
            return fail("torus.mode", "the curved mode is limited to n = 4".into());
        }
        Ok(())
    }
}
