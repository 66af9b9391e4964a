use std::fmt::Write as _;

use driftlab::combinatorial::{
    mst_bound, mst_fitness, mst_run, sssp_run, MstProblem, SsspConfig, SsspProblem, TreeStart,
    WeightedGraph,
};
use driftlab::ea::run_reps;
use driftlab::rng::{derive_seed, rng_from_seed};
use driftlab::stats::{median, Moments};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{csv_bytes, num, status, CliError, CliResult, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphProblem {
    /// Undirected edges; minimum spanning tree.
    Mst,
    /// Directed arcs; shortest paths from a source.
    Sssp,
}

impl GraphProblem {
    pub fn from_name(name: &str) -> CliResult<Self> {
        match name {
            "mst" => Ok(Self::Mst),
            "sssp" => Ok(Self::Sssp),
            other => Err(CliError::Config(format!("unknown graph problem {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mst => "mst",
            Self::Sssp => "sssp",
        }
    }

    /// A random instance: connected simple graph for MST, digraph reachable
    /// from `source` for SSSP.
    pub fn random_instance(
        self,
        n: usize,
        m: usize,
        w_max: u64,
        source: usize,
        seed: u64,
    ) -> CliResult<WeightedGraph> {
        let mut rng = rng_from_seed(seed);
        Ok(match self {
            Self::Mst => WeightedGraph::random_connected(n, m, w_max, &mut rng)?,
            Self::Sssp => WeightedGraph::random_reachable_digraph(n, m, w_max, source, &mut rng)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphRunSpec {
    pub problem: GraphProblem,
    pub graph: WeightedGraph,
    pub source: usize,
    pub reps: u64,
    pub seed: u64,
    /// MST only: start from a maximum spanning tree.
    pub worst_start: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphRunRow {
    pub problem: &'static str,
    pub rep: u64,
    pub seed: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub capped: bool,
    pub final_value: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphRunReport {
    pub spec: GraphRunSpec,
    pub optimum: u64,
    pub bound: f64,
    pub rows: Vec<GraphRunRow>,
    pub mean: f64,
    pub median: f64,
    pub std_error: f64,
    pub ci_halfwidth: f64,
    pub capped: u64,
    /// Uncapped runs whose final value differs from the oracle's.
    pub mismatches: u64,
}

impl GraphRunReport {
    pub fn csv(&self) -> CliResult<Vec<u8>> {
        csv_bytes(&self.rows)
    }

    pub fn within_bound(&self) -> bool {
        self.mean <= self.bound
    }
}

/// Runs the MST or SSSP algorithm `reps` times; run `r` uses seed
/// `derive_seed(seed, r)`.
pub fn cmd_graph_run(spec: &GraphRunSpec) -> CliResult<GraphRunReport> {
    if spec.reps == 0 {
        return Err(CliError::Config("reps must be at least 1".into()));
    }
    let g = &spec.graph;
    let (optimum, bound, outcomes) = match spec.problem {
        GraphProblem::Mst => {
            let start = if spec.worst_start {
                TreeStart::Worst
            } else {
                TreeStart::Random
            };
            let p = MstProblem::new(g.clone())?.with_start(start);
            let outcomes = run_reps(spec.reps, spec.seed, |_, s| -> driftlab::Result<(u64, bool, u64)> {
                let r = mst_run(&p, &p.config(s))?;
                Ok((r.optimization_time, r.capped, mst_fitness(&r.final_point, g) as u64))
            });
            (p.w_opt(), mst_bound(g.m(), g.w_max())?, outcomes)
        }
        GraphProblem::Sssp => {
            let p = SsspProblem::new(g, spec.source)?;
            let outcomes = run_reps(spec.reps, spec.seed, |_, s| -> driftlab::Result<(u64, bool, u64)> {
                let r = sssp_run(&p, &SsspConfig::new(s))?;
                Ok((r.optimization_time, r.capped, p.fitness(&r.final_point)))
            });
            (p.optimum(), p.bound(), outcomes)
        }
    };
    let mut rows = Vec::with_capacity(outcomes.len());
    for (rep, o) in outcomes.into_iter().enumerate() {
        let (t, capped, final_value) = o?;
        rows.push(GraphRunRow {
            problem: spec.problem.name(),
            rep: rep as u64,
            seed: derive_seed(spec.seed, rep as u64),
            t,
            capped,
            final_value,
        });
    }
    let times: Vec<f64> = rows.iter().filter(|r| !r.capped).map(|r| r.t as f64).collect();
    let m: Moments = times.iter().copied().collect();
    Ok(GraphRunReport {
        spec: spec.clone(),
        optimum,
        bound,
        mean: if times.is_empty() { f64::NAN } else { m.mean() },
        median: median(&times).unwrap_or(f64::NAN),
        std_error: m.std_error(),
        ci_halfwidth: m.ci_halfwidth(),
        capped: rows.iter().filter(|r| r.capped).count() as u64,
        mismatches: rows.iter().filter(|r| !r.capped && r.final_value != optimum).count() as u64,
        rows,
    })
}

impl Report for GraphRunReport {
    fn passed(&self) -> bool {
        self.mismatches == 0 && self.within_bound()
    }

    fn render(&self) -> String {
        let g = &self.spec.graph;
        let mut out = format!(
            "{} on n={}, m={}, w_max={} ({} runs)\n",
            self.spec.problem.name(),
            g.n_vertices(),
            g.m(),
            g.w_max(),
            self.spec.reps
        );
        let _ = writeln!(out, "  optimum      {}", self.optimum);
        let _ = writeln!(out, "  mean T       {:.2} +- {:.2}", self.mean, self.ci_halfwidth);
        let _ = writeln!(out, "  median T     {:.1}", self.median);
        let _ = writeln!(out, "  bound        {:.2}", self.bound);
        let _ = writeln!(out, "  capped runs  {}", self.capped);
        let _ = writeln!(out, "  mismatches   {}", self.mismatches);
        let _ = writeln!(out, "{}", status(self.passed()));
        out
    }

    fn to_json(&self) -> Value {
        let g = &self.spec.graph;
        json!({
            "command": "graph-run",
            "problem": self.spec.problem.name(),
            "n": g.n_vertices(),
            "m": g.m(),
            "w_max": g.w_max(),
            "source": self.spec.source,
            "seed": self.spec.seed,
            "reps": self.spec.reps,
            "optimum": self.optimum,
            "bound": num(self.bound),
            "mean": num(self.mean),
            "median": num(self.median),
            "std_error": num(self.std_error),
            "ci95_halfwidth": num(self.ci_halfwidth),
            "capped": self.capped,
            "mismatches": self.mismatches,
            "passed": self.passed(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_both_problems() {
        for problem in [GraphProblem::Mst, GraphProblem::Sssp] {
            let graph = problem.random_instance(6, 10, 5, 0, 3).unwrap();
            let spec = GraphRunSpec {
                problem,
                graph,
                source: 0,
                reps: 20,
                seed: 1,
                worst_start: problem == GraphProblem::Mst,
            };
            let r = cmd_graph_run(&spec).unwrap();
            assert_eq!(r.rows.len(), 20);
            assert_eq!(r.mismatches, 0);
            assert!(r.passed(), "{}", r.render());
        }
    }
}
