use std::fmt;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub const SEED_VAR: &str = "FRACDISK_SEED";
pub const THREADS_VAR: &str = "FRACDISK_THREADS";

/// A failed run, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration, flags or paths (exit 2).
    Config(String),
    /// The computation itself failed (exit 3).
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<fracdisk::Error> for Failure {
    fn from(e: fracdisk::Error) -> Self {
        use fracdisk::Error as E;
        match e {
            E::Domain(_) | E::InvalidArgument(_) | E::InversionTerms(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Raw config object: the file (if any) with flag overrides applied on top.
pub struct Layered {
    root: Map<String, Value>,
}

impl Layered {
    pub fn load(path: Option<&Path>) -> Outcome<Self> {
        let root = match path {
            None => Map::new(),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
                match serde_json::from_str(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => {
                        return Err(Failure::Config(format!(
                            "{}: top level must be a JSON object",
                            p.display()
                        )))
                    }
                    Err(e) => return Err(Failure::Config(format!("{}: {e}", p.display()))),
                }
            }
        };
        Ok(Self { root })
    }

    /// Overrides `key` when the flag was given.
    pub fn set<T: Serialize>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.root.insert(
                key.to_string(),
                serde_json::to_value(v).expect("plain data"),
            );
        }
    }

    /// Overrides `spec.key`, creating a stable spec if none is present.
    pub fn set_spec<T: Serialize>(&mut self, key: &str, value: Option<T>) {
        let Some(v) = value else { return };
        let spec = self
            .root
            .entry("spec")
            .or_insert_with(|| serde_json::json!({ "family": "stable" }));
        if let Value::Object(m) = spec {
            m.insert(
                key.to_string(),
                serde_json::to_value(v).expect("plain data"),
            );
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.root.get(key).is_some_and(|v| !v.is_null())
    }

    /// Schema check: unknown and missing fields are rejected here.
    pub fn resolve<T: DeserializeOwned>(self) -> Outcome<T> {
        serde_json::from_value(Value::Object(self.root)).map_err(|e| Failure::Config(e.to_string()))
    }
}

/// Seed from the flag or config, then `FRACDISK_SEED`, else a fresh one
/// reported on standard error.
pub fn resolve_seed(given: Option<u64>) -> Outcome<u64> {
    if let Some(s) = given {
        return Ok(s);
    }
    if let Ok(v) = std::env::var(SEED_VAR) {
        return v.trim().parse().map_err(|_| {
            Failure::Config(format!("{SEED_VAR} must be an unsigned integer, got {v:?}"))
        });
    }
    let s: u64 = rand::random();
    eprintln!("seed: {s}");
    Ok(s)
}

/// Sizes the worker pool from `FRACDISK_THREADS` when set.
pub fn init_threads() -> Outcome<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::Config(format!(
            "{THREADS_VAR} must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

/// Writes `body` to `out`, or standard output.
pub fn emit(out: Option<&str>, body: &str) -> Outcome<()> {
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(p) => fs::write(p, body).map_err(|e| Failure::Config(format!("{p}: {e}"))),
    }
}

/// CSV output: the resolved config goes to `<out>.config.json`, or to
/// standard error when the CSV itself goes to standard output.
pub fn emit_csv<C: Serialize>(out: Option<&str>, csv: &str, config: &C) -> Outcome<()> {
    let cfg = serde_json::to_string_pretty(config).expect("plain data");
    emit(out, csv)?;
    match out {
        None => {
            eprintln!("{}", serde_json::to_string(config).expect("plain data"));
            Ok(())
        }
        Some(p) => {
            let side = format!("{p}.config.json");
            fs::write(&side, cfg + "\n").map_err(|e| Failure::Config(format!("{side}: {e}")))
        }
    }
}

/// JSON output with the resolved config embedded under `"config"`.
pub fn emit_json<C: Serialize, R: Serialize>(
    out: Option<&str>,
    config: &C,
    result: &R,
) -> Outcome<()> {
    let mut doc = Map::new();
    doc.insert(
        "config".into(),
        serde_json::to_value(config).expect("plain data"),
    );
    match serde_json::to_value(result).expect("plain data") {
        Value::Object(m) => doc.extend(m),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(doc)).expect("plain data");
    emit(out, &(text + "\n"))
}
