use driftlab::linear::{ordering_test, FunctionSelection, OrderingTestResult};
use serde_json::{json, Value};

use crate::{num, status, CliResult, Report};

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub other: String,
    pub seed: u64,
    pub result: OrderingTestResult,
}

pub fn cmd_ordering_test(n: usize, reps: u64, other: &str, seed: u64) -> CliResult<OrderingReport> {
    let selection = FunctionSelection::from_name(other)?;
    let result = ordering_test(n, reps, &selection, seed)?;
    Ok(OrderingReport {
        other: selection.name().to_string(),
        seed,
        result,
    })
}

impl Report for OrderingReport {
    fn passed(&self) -> bool {
        self.result.passed
    }

    fn render(&self) -> String {
        let r = &self.result;
        format!(
            "onemax vs {} at n={}, {} paired runs\n  mean onemax {:.2}\n  mean {} {:.2}\n  relative gap {:.4}\n  one-sided p {:.3e}\n  capped pairs {}\n{}\n",
            self.other,
            r.n,
            r.reps,
            r.mean_onemax,
            self.other,
            r.mean_other,
            r.relative_gap,
            r.one_sided_p,
            r.capped,
            status(r.passed),
        )
    }

    fn to_json(&self) -> Value {
        let r = &self.result;
        json!({
            "command": "ordering-test",
            "other": self.other,
            "seed": self.seed,
            "n": r.n,
            "reps": r.reps,
            "mean_onemax": num(r.mean_onemax),
            "mean_other": num(r.mean_other),
            "relative_gap": num(r.relative_gap),
            "std_error": num(r.std_error),
            "one_sided_p": num(r.one_sided_p),
            "significant": r.significant,
            "capped": r.capped,
            "passed": r.passed,
        })
    }
}
