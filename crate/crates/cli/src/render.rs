//! Report envelope and value formatting for both scalar modes.

use netkit::linalg::Matrix;
use netkit::netlist::format_real;
use netkit::{BigRational, Complex64, ExactComplex, Scalar};
use num_integer::Integer;
use serde_json::{json, Map, Value};

/// Scalars the CLI can print as text and as JSON.
pub trait CliScalar: Scalar {
    fn to_json(&self) -> Value;
    fn to_text(&self) -> String;
    /// Magnitude formatted the same way in both modes.
    fn size_text(&self) -> String {
        format!("{:e}", self.magnitude())
    }
}

impl CliScalar for Complex64 {
    fn to_json(&self) -> Value {
        json!({ "re": self.re, "im": self.im })
    }

    fn to_text(&self) -> String {
        if self.im == 0.0 {
            return format!("{}", self.re);
        }
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{} {} {} j", self.re, sign, self.im.abs())
    }
}

impl CliScalar for ExactComplex {
    fn to_json(&self) -> Value {
        json!({ "re": format_real(&self.re), "im": format_real(&self.im) })
    }

    /// Both parts over the least common denominator: `500/54020 + 5251/54020 j`.
    fn to_text(&self) -> String {
        if self.im == BigRational::from_integer(0.into()) {
            return format_real(&self.re);
        }
        let zero = BigRational::from_integer(0.into());
        let d = if self.re == zero { self.im.denom().clone() } else { self.re.denom().lcm(self.im.denom()) };
        let over = |v: &BigRational| {
            if *v == zero {
                return "0".to_string();
            }
            let n = v.numer() * (&d / v.denom());
            if d == 1.into() {
                n.to_string()
            } else {
                format!("{n}/{d}")
            }
        };
        let neg = self.im < BigRational::from_integer(0.into());
        let im = if neg { -self.im.clone() } else { self.im.clone() };
        format!("{} {} {} j", over(&self.re), if neg { '-' } else { '+' }, over(&im))
    }
}

pub fn matrix_json<T: CliScalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(CliScalar::to_json).collect())).collect())
}

pub fn matrix_text<T: CliScalar>(m: &Matrix<T>) -> Vec<String> {
    (0..m.rows()).map(|r| m.row(r).iter().map(CliScalar::to_text).collect::<Vec<_>>().join("\t")).collect()
}

/// Everything a command produces. JSON output serialises the first six
/// fields; text output prints `lines` followed by the violations.
#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Map<String, Value>,
    pub residuals: Map<String, Value>,
    pub violations: Vec<Value>,
    pub diagnostics: Vec<String>,
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), v.into());
        self
    }

    pub fn result(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.results.insert(key.into(), v.into());
        self
    }

    pub fn residual(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.residuals.insert(key.into(), v.into());
        self
    }

    pub fn violation(&mut self, check: &str, detail: Value, text: String) -> &mut Self {
        self.violations.push(json!({ "check": check, "detail": detail, "message": text }));
        self
    }

    pub fn line(&mut self, text: impl Into<String>) -> &mut Self {
        self.lines.push(text.into());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.diagnostics.push(text.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "residuals": self.residuals,
            "violations": self.violations,
            "diagnostics": self.diagnostics,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for v in &self.violations {
            out.push_str("violation: ");
            out.push_str(v["message"].as_str().unwrap_or_default());
            out.push('\n');
        }
        for d in &self.diagnostics {
            out.push_str("note: ");
            out.push_str(d);
            out.push('\n');
        }
        out
    }

    /// 2 when any check failed, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }
}
