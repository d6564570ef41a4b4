//! Verification reports and their deterministic JSON serialization.
//!
//! Every verifier samples a point set and aggregates per-axiom residual
//! statistics. A check records the worst offender (point + residual) for
//! debuggability. Reports serialize with 17 significant digits so that a
//! rerun with the same seed is byte-identical.

use serde::{Deserialize, Serialize};

/// Residual-budget configuration. Algebraic identities carry no derivative
/// error; jet-based identities consume one exact derivative level;
/// finite-difference identities (reduced fields, ∇ of derived tensors) get
/// the coarsest budget.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub jet: f64,
    pub fd: f64,
    pub nondegenerate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-10,
            jet: 1e-8,
            fd: 1e-4,
            nondegenerate: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_name: String,
    pub samples: usize,
    /// Worst statistic over the samples: a max residual for residual
    /// checks, a minimum for `min_statistic` checks (nondegeneracy).
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Vec<f64>,
    /// True when the check passes by *exceeding* the tolerance
    /// (min |det ♭|, metric eigenvalue floors).
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub min_statistic: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flagged: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub name: String,
    pub pass: bool,
    pub degenerate: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(name: &str) -> VerificationReport {
        VerificationReport {
            schema: 1,
            name: name.to_string(),
            pass: true,
            degenerate: false,
            checks: Vec::new(),
        }
    }

    pub fn degenerate(name: &str, note: &str) -> VerificationReport {
        let mut r = VerificationReport::new(name);
        r.degenerate = true;
        r.checks.push(CheckResult {
            check_name: format!("degenerate: {note}"),
            samples: 0,
            max_residual: 0.0,
            tolerance: 0.0,
            pass: true,
            worst_point: Vec::new(),
            min_statistic: false,
            flagged: Vec::new(),
        });
        r
    }

    pub fn push(&mut self, check: CheckResult) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn merge(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.check_name = format!("{prefix}.{}", c.check_name);
            self.push(c);
        }
        self.degenerate |= other.degenerate;
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    /// Max residual over residual-style checks (min-statistic checks like
    /// nondegeneracy floors are excluded: their statistic is not an error).
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| !c.min_statistic)
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }
}

/// Accumulates the max residual over samples for one named check.
pub struct ResidualTracker {
    name: String,
    tolerance: f64,
    samples: usize,
    max: f64,
    worst: Vec<f64>,
    flagged: Vec<String>,
}

impl ResidualTracker {
    pub fn new(name: &str, tolerance: f64) -> ResidualTracker {
        ResidualTracker {
            name: name.to_string(),
            tolerance,
            samples: 0,
            max: 0.0,
            worst: Vec::new(),
            flagged: Vec::new(),
        }
    }

    pub fn record(&mut self, point: &[f64], residual: f64) {
        self.samples += 1;
        if residual > self.max || self.worst.is_empty() {
            self.max = residual;
            self.worst = point.to_vec();
        }
    }

    pub fn flag(&mut self, note: String) {
        self.flagged.push(note);
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            check_name: self.name,
            samples: self.samples,
            max_residual: self.max,
            pass: self.max <= self.tolerance,
            tolerance: self.tolerance,
            worst_point: self.worst,
            min_statistic: false,
            flagged: self.flagged,
        }
    }

    /// Finish a check whose statistic must *exceed* the tolerance
    /// (nondegeneracy: min |det ♭| over samples).
    pub fn finish_min_above(self) -> CheckResult {
        CheckResult {
            check_name: self.name,
            samples: self.samples,
            max_residual: self.max,
            pass: self.max > self.tolerance,
            tolerance: self.tolerance,
            worst_point: self.worst,
            min_statistic: true,
            flagged: self.flagged,
        }
    }

    pub fn record_min(&mut self, point: &[f64], statistic: f64) {
        self.samples += 1;
        if statistic < self.max || self.worst.is_empty() {
            self.max = statistic;
            self.worst = point.to_vec();
        }
    }
}

mod fmt17 {
    use serde_json::ser::Formatter;
    use std::io;

    /// JSON formatter printing every f64 with 17 significant digits, which
    /// makes serialization injective on doubles and reports byte-stable.
    pub struct SigDigits17;

    impl Formatter for SigDigits17 {
        fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
            write!(writer, "{:.16e}", value)
        }
    }
}

/// Serialize any report-like value with the 17-significant-digit float
/// format (deterministic, byte-stable across runs).
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt17::SigDigits17);
    value.serialize(&mut ser).expect("serialize report");
    String::from_utf8(buf).expect("utf8 json")
}

/// Pretty variant used for files meant to be read by humans; still
/// 17-significant-digit floats.
pub fn to_json_17_pretty<T: Serialize>(value: &T) -> String {
    // serde_json's PrettyFormatter is generic over the base formatter only
    // through composition; simplest deterministic route: re-indent compact.
    let compact = to_json_17(value);
    let parsed: serde_json::Value = serde_json::from_str(&compact).expect("reparse");
    reformat(&parsed, 0)
}

fn reformat(v: &serde_json::Value, indent: usize) -> String {
    let pad = "  ".repeat(indent);
    let pad_in = "  ".repeat(indent + 1);
    match v {
        serde_json::Value::Object(map) => {
            if map.is_empty() {
                return "{}".into();
            }
            let items: Vec<String> = map
                .iter()
                .map(|(k, val)| format!("{pad_in}\"{k}\": {}", reformat(val, indent + 1)))
                .collect();
            format!("{{\n{}\n{pad}}}", items.join(",\n"))
        }
        serde_json::Value::Array(items) => {
            if items.is_empty() {
                return "[]".into();
            }
            let parts: Vec<String> = items.iter().map(|x| reformat(x, indent + 1)).collect();
            let one_line = parts.join(", ");
            if one_line.len() < 90 && !one_line.contains('\n') {
                format!("[{one_line}]")
            } else {
                let inner: Vec<String> = parts.iter().map(|p| format!("{pad_in}{p}")).collect();
                format!("[\n{}\n{pad}]", inner.join(",\n"))
            }
        }
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    return format!("{:.16e}", f);
                }
            }
            n.to_string()
        }
        other => other.to_string(),
    }
}
