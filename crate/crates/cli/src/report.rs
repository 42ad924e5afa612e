use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;
pub const EXIT_NEGATIVE: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self { code: EXIT_PRECONDITION, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ballcover::Error> for CliError {
    fn from(e: ballcover::Error) -> Self {
        use ballcover::Error as E;
        let code = match &e {
            _ if e.is_internal() => EXIT_INTERNAL,
            E::CertificateFailed { .. } | E::NotFoundWithin { .. } => EXIT_NEGATIVE,
            _ => EXIT_PRECONDITION,
        };
        Self { code, message: e.to_string() }
    }
}

/// Structured result of one invocation; `timings` is the only part that may
/// differ between identical runs.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub verdicts: Map<String, Value>,
    pub exit_code: i32,
    pub timings: BTreeMap<String, f64>,
    pub version: String,
}

/// Accumulates the pieces of a [`RunReport`] and the human-readable lines.
pub struct Run {
    command: String,
    inputs: Vec<(String, Value)>,
    verdicts: Map<String, Value>,
    timings: BTreeMap<String, f64>,
    lines: Vec<String>,
}

impl Run {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            verdicts: Map::new(),
            timings: BTreeMap::new(),
            lines: Vec::new(),
        }
    }

    /// Records an input for the digest. File contents should be passed as
    /// parsed JSON so formatting does not affect the hash.
    pub fn input(&mut self, key: &str, value: Value) {
        self.inputs.push((key.to_string(), value));
    }

    pub fn verdict(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("verdicts serialize");
        self.verdicts.insert(key.to_string(), v);
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.insert(phase.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn finish(self, exit_code: i32) -> RunReport {
        // serde_json's map is ordered by key, so this is a canonical form.
        let canonical = serde_json::to_string(&Value::Array(vec![
            Value::String(self.command.clone()),
            Value::Array(self.inputs.into_iter().map(|(k, v)| Value::Array(vec![Value::String(k), v])).collect()),
        ]))
        .expect("inputs serialize");
        let digest = Sha256::digest(canonical.as_bytes());
        let inputs_digest = digest.iter().map(|b| format!("{b:02x}")).collect();
        RunReport {
            command: self.command,
            inputs_digest,
            verdicts: self.verdicts,
            exit_code,
            timings: self.timings,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}
