use std::fmt::Write as _;

use driftlab::combinatorial::{euler_bound, euler_bound_internal, mst_bound, sssp_bound};
use driftlab::linear::LinearBound;
use serde_json::{json, Value};

use crate::{num, CliResult, Report};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    /// Only the leading term of an asymptotic result.
    pub asymptotic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub n: usize,
    pub m: Option<usize>,
    pub w_max: Option<u64>,
    pub entries: Vec<BoundEntry>,
}

/// Linear-function bounds at `n`; with `m` and `w_max`, also the MST, SSSP
/// and Eulerian-cycle bounds.
pub fn cmd_bounds(n: usize, m: Option<usize>, w_max: Option<u64>) -> CliResult<BoundsReport> {
    let mut entries = Vec::new();
    for b in LinearBound::ALL {
        entries.push(BoundEntry {
            name: b.name().into(),
            value: b.value(n)?,
            asymptotic: b.is_asymptotic(),
        });
    }
    let mut push = |name: &str, value: f64| {
        entries.push(BoundEntry {
            name: name.into(),
            value,
            asymptotic: false,
        })
    };
    if let Some(w) = w_max {
        push("sssp_bound", sssp_bound(n, w)?);
        if let Some(m) = m {
            push("mst_bound", mst_bound(m, w)?);
        }
    }
    if let Some(m) = m.filter(|&m| m >= 3) {
        push("euler_bound", euler_bound(m)?);
        push("euler_bound_internal", euler_bound_internal(m)?);
    }
    Ok(BoundsReport {
        n,
        m,
        w_max,
        entries,
    })
}

impl Report for BoundsReport {
    fn passed(&self) -> bool {
        true
    }

    fn render(&self) -> String {
        let mut out = format!("n = {}", self.n);
        if let Some(m) = self.m {
            let _ = write!(out, ", m = {m}");
        }
        if let Some(w) = self.w_max {
            let _ = write!(out, ", w_max = {w}");
        }
        out.push('\n');
        for e in &self.entries {
            let tag = if e.asymptotic { "  (leading term)" } else { "" };
            let _ = writeln!(out, "{:<26} {:>16.4}{tag}", e.name, e.value);
        }
        out
    }

    fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| json!({"name": e.name, "value": num(e.value), "asymptotic": e.asymptotic}))
            .collect();
        json!({
            "command": "bounds",
            "n": self.n,
            "m": self.m,
            "w_max": self.w_max,
            "bounds": entries,
        })
    }
}
