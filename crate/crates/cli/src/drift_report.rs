use std::f64::consts::E;
use std::fmt::Write as _;

use driftlab::combinatorial::{mst_drift_check, sssp_drift_check, MstProblem, SsspProblem, WeightedGraph};
use driftlab::drift::{Bucketing, DriftAccumulator, DriftEstimate};
use driftlab::ea::{run, run_reps, BitString, RunConfig};
use driftlab::linear::{exact_pointwise_drift, lemma4_bound, FunctionSelection, Potential};
use serde::Serialize;
use serde_json::{json, Value};

use crate::graph_run::GraphProblem;
use crate::{csv_bytes, status, CliError, CliResult, Report};

/// Largest `n` for the exhaustive table (`4^n` work).
pub const MAX_EXHAUSTIVE_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftMode {
    MonteCarlo,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReportSpec {
    pub function: FunctionSelection,
    pub potential: String,
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    pub mode: DriftMode,
    /// Levels with fewer observations are reported but not tested.
    pub min_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftRow {
    /// Search point, in exhaustive mode.
    pub point: String,
    pub level: f64,
    pub mean_decrease: f64,
    pub ci_halfwidth: f64,
    pub samples: u64,
    pub bound: Option<f64>,
    pub status: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub title: String,
    pub bound_name: Option<String>,
    pub rows: Vec<DriftRow>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl DriftReport {
    pub fn csv(&self) -> CliResult<Vec<u8>> {
        csv_bytes(&self.rows)
    }
}

fn row_status(tested: bool, ok: bool) -> &'static str {
    match (tested, ok) {
        (false, _) => "untested",
        (true, true) => "pass",
        (true, false) => "fail",
    }
}

fn estimate_row(e: &DriftEstimate, bound: Option<f64>, min_samples: u64) -> DriftRow {
    let tested = bound.is_some() && e.sample_count >= min_samples;
    let ok = bound.is_none_or(|b| e.mean_decrease + 2.0 * e.ci_halfwidth >= b);
    DriftRow {
        point: String::new(),
        level: e.level,
        mean_decrease: e.mean_decrease,
        ci_halfwidth: e.ci_halfwidth,
        samples: e.sample_count,
        bound,
        status: row_status(tested, ok),
    }
}

/// Drift of a potential under the EA on a linear function, either exactly
/// at every point or estimated per level from runs. The OneMax potential is
/// compared to `(e - 2) k / (e n)` and the weighted potential to
/// `g / (4 e n)`; other potentials are tabulated without a bound.
pub fn cmd_drift_report(spec: &DriftReportSpec) -> CliResult<DriftReport> {
    let n = spec.n;
    let f = spec.function.instantiate(n, spec.seed)?;
    let g = Potential::from_name(&spec.potential, Some(&f))?;
    let nf = n as f64;
    let (bound_name, bound): (Option<&str>, Box<dyn Fn(f64) -> f64>) = match g {
        Potential::OneMax => (Some("(e-2)k/(en)"), Box::new(move |k| lemma4_bound(n, k))),
        Potential::WeightedG => (Some("g/(4en)"), Box::new(move |v| v / (4.0 * E * nf))),
        _ => (None, Box::new(|_| f64::NAN)),
    };
    let bound_at = |level: f64| bound_name.map(|_| bound(level));

    let rows: Vec<DriftRow> = match spec.mode {
        DriftMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(CliError::Config(format!(
                    "exhaustive mode supports n <= {MAX_EXHAUSTIVE_N}, got {n}"
                )));
            }
            (1u64..1 << n)
                .map(|mask| -> CliResult<DriftRow> {
                    let x = BitString::from_mask(n, mask);
                    let level = g.eval(&x)?;
                    let drift = exact_pointwise_drift(&f, &g, &x)?;
                    let b = bound_at(level);
                    Ok(DriftRow {
                        point: x.to_string(),
                        level,
                        mean_decrease: drift,
                        ci_halfwidth: 0.0,
                        samples: 1,
                        bound: b,
                        status: row_status(b.is_some(), b.is_none_or(|b| drift >= b)),
                    })
                })
                .collect::<CliResult<_>>()?
        }
        DriftMode::MonteCarlo => {
            if spec.reps == 0 {
                return Err(CliError::Config("reps must be at least 1".into()));
            }
            let config = RunConfig::new(n, spec.seed).with_potential(g.as_fn());
            let mut acc = DriftAccumulator::new();
            for part in run_reps(spec.reps, spec.seed, |_, s| -> driftlab::Result<DriftAccumulator> {
                let r = run(&f, &config.clone().with_seed(s))?;
                let mut a = DriftAccumulator::new();
                if let Some(t) = &r.trace {
                    a.observe_trace(t);
                }
                Ok(a)
            }) {
                acc.merge(&part?);
            }
            acc.estimates(Bucketing::Auto)?
                .iter()
                .map(|e| estimate_row(e, bound_at(e.level), spec.min_samples))
                .collect()
        }
    };
    let passed = rows.iter().all(|r| r.status != "fail");
    let mode = match spec.mode {
        DriftMode::Exhaustive => "exact",
        DriftMode::MonteCarlo => "monte-carlo",
    };
    Ok(DriftReport {
        title: format!("{mode} drift of {} on {} (n={n})", g.name(), spec.function.name()),
        bound_name: bound_name.map(str::to_string),
        rows,
        notes: Vec::new(),
        passed,
    })
}

/// Drift of the distance to the optimum for the graph problems: MST against
/// `1/(e m^2)` and SSSP against `1 - 1/(3 n^3)`. The SSSP comparison is
/// informational and never fails the report.
pub fn cmd_graph_drift_report(
    problem: GraphProblem,
    graph: &WeightedGraph,
    source: usize,
    reps: u64,
    seed: u64,
    min_samples: u64,
) -> CliResult<DriftReport> {
    match problem {
        GraphProblem::Mst => {
            let p = MstProblem::new(graph.clone())?;
            let r = mst_drift_check(&p, reps, seed, min_samples)?;
            let rows = r
                .estimates
                .iter()
                .map(|e| estimate_row(e, Some(r.delta * e.level), 0))
                .collect();
            Ok(DriftReport {
                title: format!("drift of w(x) - w_opt for MST (m={})", graph.m()),
                bound_name: Some("(w - w_opt)/(e m^2)".into()),
                rows,
                notes: vec![format!("capped runs: {}", r.capped_runs)],
                passed: r.passed(),
            })
        }
        GraphProblem::Sssp => {
            let p = SsspProblem::new(graph, source)?;
            let r = sssp_drift_check(&p, reps, seed, min_samples)?;
            let delta = 1.0 - r.required_ratio;
            let rows = r
                .estimates
                .iter()
                .map(|e| estimate_row(e, Some(delta * e.level), 0))
                .collect();
            let notes = vec![
                format!("required gap ratio: {:.6}", r.required_ratio),
                format!(
                    "worst observed ratio: {:.6}",
                    r.ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                ),
                format!("measured constant c in 1/(c n^3): {:.4}", r.measured_constant),
                format!(
                    "diagnostic only (reconstructed mutation operator): {}",
                    status(r.passed())
                ),
            ];
            Ok(DriftReport {
                title: format!("gap ratio for SSSP (n={}, source {source})", graph.n_vertices()),
                bound_name: Some("gap / (3 n^3)".into()),
                rows,
                notes,
                passed: true,
            })
        }
    }
}

impl Report for DriftReport {
    fn passed(&self) -> bool {
        self.passed
    }

    fn render(&self) -> String {
        let mut out = format!("{}\n", self.title);
        if let Some(b) = &self.bound_name {
            let _ = writeln!(out, "bound: {b}");
        }
        let exhaustive = self.rows.first().is_some_and(|r| !r.point.is_empty());
        let key = if exhaustive { "point" } else { "level" };
        let _ = writeln!(
            out,
            "{key:>24} {:>14} {:>12} {:>8} {:>12} {:>9}",
            "drift", "ci95", "samples", "bound", "status"
        );
        for r in &self.rows {
            let id = if exhaustive {
                r.point.clone()
            } else {
                format!("{:.4}", r.level)
            };
            let bound = r.bound.map_or("-".to_string(), |b| format!("{b:.6}"));
            let _ = writeln!(
                out,
                "{id:>24} {:>14.6e} {:>12.3e} {:>8} {bound:>12} {:>9}",
                r.mean_decrease, r.ci_halfwidth, r.samples, r.status
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "{note}");
        }
        let _ = writeln!(out, "{}", status(self.passed));
        out
    }

    fn to_json(&self) -> Value {
        json!({
            "command": "drift-report",
            "title": self.title,
            "bound": self.bound_name,
            "rows": self.rows,
            "notes": self.notes,
            "passed": self.passed,
        })
    }
}
