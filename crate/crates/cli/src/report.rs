//! Verification reports and their JSON/CSV emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA: &str = "g2glue-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Value,
    pub expected: Value,
    pub tolerance: Option<f64>,
    /// The property being verified, in words.
    pub law: String,
}

/// A CSV table: fixed header and rows of preformatted cells.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub suite: String,
    pub checks: Vec<Check>,
    /// Suite payload: rate lists, counts, solver reports.
    pub data: Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub timing: Timing,
    pub environment: Environment,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report {
            schema: SCHEMA,
            suite: suite.into(),
            checks: Vec::new(),
            data: Value::Null,
            tables: Vec::new(),
            timing: Timing { seconds: 0.0 },
            environment: Environment::current(),
        }
    }

    fn push(&mut self, name: &str, status: Status, measured: Value, expected: Value, tolerance: Option<f64>, law: &str) {
        self.checks.push(Check { name: name.into(), status, measured, expected, tolerance, law: law.into() });
    }

    /// `measured <= bound`.
    pub fn at_most(&mut self, name: &str, measured: f64, bound: f64, law: &str) {
        let status = if measured <= bound { Status::Pass } else { Status::Fail };
        self.push(name, status, measured.into(), bound.into(), None, law);
    }

    /// `|measured - expected| <= tolerance`.
    pub fn near(&mut self, name: &str, measured: f64, expected: f64, tolerance: f64, law: &str) {
        let status = if (measured - expected).abs() <= tolerance { Status::Pass } else { Status::Fail };
        self.push(name, status, measured.into(), expected.into(), Some(tolerance), law);
    }

    /// Exact equality of serialisable values.
    pub fn equal<T: Serialize + PartialEq>(&mut self, name: &str, measured: T, expected: T, law: &str) {
        let status = if measured == expected { Status::Pass } else { Status::Fail };
        self.push(name, status, json(&measured), json(&expected), None, law);
    }

    pub fn holds(&mut self, name: &str, ok: bool, measured: Value, law: &str) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(name, status, measured, Value::Bool(true), None, law);
    }

    /// A failed computation, recorded instead of aborting the suite.
    pub fn error(&mut self, name: &str, err: impl std::fmt::Display, law: &str) {
        self.push(name, Status::Fail, Value::String(err.to_string()), Value::Null, None, law);
    }

    pub fn reported(&mut self, name: &str, measured: Value, expected: Value, law: &str) {
        self.push(name, Status::Reported, measured, expected, None, law);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Appends another report's checks under `prefix/`.
    pub fn absorb(&mut self, other: Report) {
        for mut c in other.checks {
            c.name = format!("{}/{}", other.suite, c.name);
            self.checks.push(c);
        }
        for mut t in other.tables {
            t.name = format!("{}-{}", other.suite, t.name);
            self.tables.push(t);
        }
        if let Value::Object(map) = &mut self.data {
            map.insert(other.suite, other.data);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    /// Writes `<suite>.json` and/or one `<suite>-<table>.csv` per table into `dir`.
    pub fn write(&self, dir: &Path, format: Format) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let stem = self.suite.replace(' ', "-");
        if matches!(format, Format::Json | Format::Both) {
            write_atomic(&dir.join(format!("{stem}.json")), self.to_json().as_bytes())?;
        }
        if matches!(format, Format::Csv | Format::Both) {
            for t in &self.tables {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&t.header).map_err(|e| CliError::Io(e.to_string()))?;
                for row in &t.rows {
                    w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                write_atomic(&dir.join(format!("{stem}-{}.csv", t.name)), &bytes)?;
            }
        }
        Ok(())
    }
}

pub fn json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("value serialises")
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
