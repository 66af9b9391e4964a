use std::collections::BTreeMap;
use std::fmt::Write as _;

use driftlab::ea::{run, run_reps, BatchSummary, RunConfig, RunRecord};
use driftlab::linear::{FunctionSelection, LinearBound};
use driftlab::rng::derive_seed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{csv_bytes, num, CliError, CliResult, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `n = 20, 40, ..., 200`, 100 runs per cell.
    Quick,
    /// `n = 20, 40, ..., 1000`, 1000 runs per cell.
    Paper,
}

impl Preset {
    pub fn from_name(name: &str) -> CliResult<Self> {
        match name {
            "quick" => Ok(Self::Quick),
            "paper" => Ok(Self::Paper),
            other => Err(CliError::Config(format!("unknown preset {other:?}"))),
        }
    }

    pub fn n_values(self) -> Vec<usize> {
        let top = match self {
            Self::Quick => 200,
            Self::Paper => 1000,
        };
        (20..=top).step_by(20).collect()
    }

    pub fn reps(self) -> u64 {
        match self {
            Self::Quick => 100,
            Self::Paper => 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub functions: Vec<FunctionSelection>,
    pub n_values: Vec<usize>,
    pub reps: u64,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn new(
        functions: Vec<FunctionSelection>,
        n_values: Vec<usize>,
        reps: u64,
        master_seed: u64,
    ) -> CliResult<Self> {
        if functions.is_empty() {
            return Err(CliError::Config("no functions selected".into()));
        }
        if n_values.is_empty() || n_values.contains(&0) {
            return Err(CliError::Config("n values must be a non-empty list of positive integers".into()));
        }
        if reps == 0 {
            return Err(CliError::Config("reps must be at least 1".into()));
        }
        Ok(Self {
            functions,
            n_values,
            reps,
            master_seed,
        })
    }

    /// OneMax, BinVal and random linear functions over the preset's grid.
    pub fn from_preset(preset: Preset, master_seed: u64) -> Self {
        Self {
            functions: vec![
                FunctionSelection::OneMax,
                FunctionSelection::BinVal,
                FunctionSelection::RandomLinear,
            ],
            n_values: preset.n_values(),
            reps: preset.reps(),
            master_seed,
        }
    }
}

/// One CSV line per run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRow {
    pub function: String,
    pub n: usize,
    pub rep: u64,
    pub seed: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub function: String,
    pub n: usize,
    pub reps: u64,
    pub capped: u64,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub std_error: f64,
    pub ci_halfwidth: f64,
    pub bounds: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub spec: ExperimentSpec,
    pub rows: Vec<RunRow>,
    pub cells: Vec<CellSummary>,
}

impl SweepOutput {
    pub fn csv(&self) -> CliResult<Vec<u8>> {
        csv_bytes(&self.rows)
    }

    pub fn capped_runs(&self) -> u64 {
        self.cells.iter().map(|c| c.capped).sum()
    }
}

/// Runs every (function, n) cell. Cell `c` in row-major order uses seed
/// `derive_seed(master_seed, c)` and run `r` within it
/// `derive_seed(cell_seed, r)`; random functions are drawn from the run seed.
pub fn cmd_sweep(spec: &ExperimentSpec) -> CliResult<SweepOutput> {
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    let mut cell = 0;
    for selection in &spec.functions {
        for &n in &spec.n_values {
            let cell_seed = derive_seed(spec.master_seed, cell);
            cell += 1;
            let config = RunConfig::new(n, cell_seed);
            let records = run_reps(spec.reps, cell_seed, |_, seed| -> driftlab::Result<RunRecord> {
                let f = selection.instantiate(n, seed)?;
                let mut r = run(&f, &config.clone().with_seed(seed))?;
                r.trace = None;
                Ok(r)
            })
            .into_iter()
            .collect::<driftlab::Result<Vec<_>>>()?;
            for (rep, r) in records.iter().enumerate() {
                rows.push(RunRow {
                    function: selection.name().to_string(),
                    n,
                    rep: rep as u64,
                    seed: derive_seed(cell_seed, rep as u64),
                    t: r.optimization_time,
                    capped: r.capped,
                });
            }
            let s = BatchSummary::from_records(records);
            cells.push(CellSummary {
                function: selection.name().to_string(),
                n,
                reps: s.reps,
                capped: s.capped,
                mean: s.mean,
                median: s.median,
                sd: s.sd,
                std_error: s.std_error,
                ci_halfwidth: s.ci_halfwidth,
                bounds: LinearBound::ALL
                    .iter()
                    .filter_map(|b| b.value(n).ok().map(|v| (b.name(), v)))
                    .collect(),
            });
        }
    }
    Ok(SweepOutput {
        spec: spec.clone(),
        rows,
        cells,
    })
}

impl Report for SweepOutput {
    /// A sweep only fails when some cell has no uncapped run.
    fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.capped < c.reps)
    }

    fn render(&self) -> String {
        let mut out = format!(
            "{:<14} {:>6} {:>6} {:>12} {:>10} {:>10} {:>7}\n",
            "function", "n", "reps", "mean", "ci95", "median", "capped"
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:<14} {:>6} {:>6} {:>12.2} {:>10.2} {:>10.1} {:>7}",
                c.function, c.n, c.reps, c.mean, c.ci_halfwidth, c.median, c.capped
            );
        }
        if self.capped_runs() > 0 {
            let _ = writeln!(out, "warning: {} runs hit the iteration cap", self.capped_runs());
        }
        out
    }

    fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| {
                let bounds: serde_json::Map<String, Value> =
                    c.bounds.iter().map(|(k, v)| (k.to_string(), num(*v))).collect();
                json!({
                    "function": c.function,
                    "n": c.n,
                    "reps": c.reps,
                    "capped": c.capped,
                    "mean": num(c.mean),
                    "median": num(c.median),
                    "sd": num(c.sd),
                    "std_error": num(c.std_error),
                    "ci95_halfwidth": num(c.ci_halfwidth),
                    "bounds": bounds,
                })
            })
            .collect();
        json!({
            "command": "sweep",
            "master_seed": self.spec.master_seed,
            "reps": self.spec.reps,
            "n_values": self.spec.n_values,
            "functions": self.spec.functions.iter().map(|f| f.name()).collect::<Vec<_>>(),
            "cells": cells,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_specs() {
        assert!(ExperimentSpec::new(vec![], vec![10], 1, 0).is_err());
        assert!(ExperimentSpec::new(vec![FunctionSelection::OneMax], vec![], 1, 0).is_err());
        assert!(ExperimentSpec::new(vec![FunctionSelection::OneMax], vec![0], 1, 0).is_err());
        assert!(ExperimentSpec::new(vec![FunctionSelection::OneMax], vec![5], 0, 0).is_err());
    }

    #[test]
    fn presets() {
        assert_eq!(Preset::Quick.n_values().len(), 10);
        assert_eq!(Preset::Paper.n_values().last(), Some(&1000));
        assert!(Preset::from_name("full").is_err());
    }

    #[test]
    fn rows_carry_their_seeds() {
        let spec = ExperimentSpec::new(vec![FunctionSelection::RandomLinear], vec![8], 5, 3).unwrap();
        let out = cmd_sweep(&spec).unwrap();
        for row in &out.rows {
            let f = FunctionSelection::RandomLinear.instantiate(8, row.seed).unwrap();
            let again = run(&f, &RunConfig::new(8, row.seed)).unwrap();
            assert_eq!(again.optimization_time, row.t);
        }
    }
}
