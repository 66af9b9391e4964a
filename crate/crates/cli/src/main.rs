use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use driftlab::combinatorial::WeightedGraph;
use driftlab::linear::FunctionSelection;
use driftlab_cli::{
    cmd_bounds, cmd_drift_report, cmd_graph_drift_report, cmd_graph_run, cmd_ordering_test,
    cmd_sweep, cmd_verify, exit, read_file, write_file, write_json, CliResult,
    DriftMode, DriftReportSpec, ExperimentSpec, GraphProblem, GraphRunSpec, Preset, Report,
};

#[derive(Parser)]
#[command(name = "driftlab", version, about = "Runtime experiments for the (1+1) EA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write a JSON summary here.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct GraphSource {
    /// Graph file: "n m" then m lines "u v w".
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Problem: mst (undirected) or sssp (directed).
    #[arg(long, default_value = "mst")]
    problem: String,
    /// Source vertex for sssp.
    #[arg(long, default_value_t = 0)]
    source: usize,
    /// Vertices of the random instance used without --graph-file.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Edges of the random instance.
    #[arg(long, default_value_t = 30)]
    m: usize,
    /// Largest weight of the random instance.
    #[arg(long, default_value_t = 10)]
    w_max: u64,
    /// Save the random instance here.
    #[arg(long)]
    save_graph: Option<PathBuf>,
}

impl GraphSource {
    fn load(&self, seed: u64) -> CliResult<(GraphProblem, WeightedGraph)> {
        let problem = GraphProblem::from_name(&self.problem)?;
        let graph = match &self.graph_file {
            Some(path) => WeightedGraph::parse(&read_file(path)?)?,
            None => problem.random_instance(self.n, self.m, self.w_max, self.source, seed)?,
        };
        if let Some(path) = &self.save_graph {
            write_file(path, graph.to_text().as_bytes())?;
        }
        Ok((problem, graph))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimization times over a grid of functions and sizes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: onemax, binval, random-linear.
        #[arg(long, value_delimiter = ',')]
        function: Vec<String>,
        /// Comma-separated problem sizes.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        reps: Option<u64>,
        /// Defaults for n and reps: quick or paper.
        #[arg(long, default_value = "paper")]
        preset: String,
        /// One row per run: function,n,rep,seed,T,capped.
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Paired comparison of a function against OneMax.
    OrderingTest {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        #[arg(long, default_value = "binval")]
        function: String,
    },
    /// Conditional drift per level, or exactly per point.
    DriftReport {
        #[command(flatten)]
        common: Common,
        /// onemax, binval, random-linear, or mst / sssp (uses the graph options).
        #[arg(long, default_value = "onemax")]
        function: String,
        /// weighted-g, droste, he-yao[:c], onemax or identity.
        #[arg(long, default_value = "onemax")]
        potential: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        /// Levels with fewer observations are not tested (graph problems pool them).
        #[arg(long, default_value_t = 500)]
        min_samples: u64,
        /// Exact drift at every point instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        graph_file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Run a named verification suite, or "all".
    Verify {
        #[command(flatten)]
        common: Common,
        suite: String,
        #[arg(long, default_value = "paper")]
        preset: String,
    },
    /// Closed-form runtime bounds.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        w_max: Option<u64>,
    },
    /// Repeated MST or SSSP runs on one instance.
    GraphRun {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, default_value_t = 100)]
        reps: u64,
        /// MST: start from a maximum spanning tree.
        #[arg(long)]
        worst_start: bool,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
}

fn finish(report: &dyn Report, common: &Common) -> CliResult<bool> {
    print!("{}", report.render());
    if let Some(path) = &common.out_json {
        write_json(path, &report.to_json())?;
    }
    Ok(report.passed())
}

fn execute(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Sweep {
            common,
            function,
            n,
            reps,
            preset,
            out_csv,
        } => {
            let base = ExperimentSpec::from_preset(Preset::from_name(&preset)?, common.seed);
            let functions = if function.is_empty() {
                base.functions
            } else {
                function
                    .iter()
                    .map(|f| FunctionSelection::from_name(f))
                    .collect::<driftlab::Result<_>>()?
            };
            let n_values = if n.is_empty() { base.n_values } else { n };
            let spec = ExperimentSpec::new(functions, n_values, reps.unwrap_or(base.reps), common.seed)?;
            let out = cmd_sweep(&spec)?;
            if let Some(path) = &out_csv {
                write_file(path, &out.csv()?)?;
            }
            if out.capped_runs() > 0 {
                eprintln!("warning: {} runs hit the iteration cap", out.capped_runs());
            }
            finish(&out, &common)
        }
        Command::OrderingTest {
            common,
            n,
            reps,
            function,
        } => finish(&cmd_ordering_test(n, reps, &function, common.seed)?, &common),
        Command::DriftReport {
            common,
            function,
            potential,
            n,
            reps,
            min_samples,
            exhaustive,
            graph_file,
            source,
            out_csv,
        } => {
            let report = if function == "mst" || function == "sssp" {
                let problem = GraphProblem::from_name(&function)?;
                let graph = match &graph_file {
                    Some(path) => WeightedGraph::parse(&read_file(path)?)?,
                    None => problem.random_instance(n.min(10), 30, 10, source, common.seed)?,
                };
                cmd_graph_drift_report(problem, &graph, source, reps, common.seed, min_samples)?
            } else {
                let spec = DriftReportSpec {
                    function: FunctionSelection::from_name(&function)?,
                    potential,
                    n,
                    reps,
                    seed: common.seed,
                    mode: if exhaustive {
                        DriftMode::Exhaustive
                    } else {
                        DriftMode::MonteCarlo
                    },
                    min_samples,
                };
                cmd_drift_report(&spec)?
            };
            if let Some(path) = &out_csv {
                write_file(path, &report.csv()?)?;
            }
            finish(&report, &common)
        }
        Command::Verify {
            common,
            suite,
            preset,
        } => finish(&cmd_verify(&suite, Preset::from_name(&preset)?, common.seed)?, &common),
        Command::Bounds { common, n, m, w_max } => finish(&cmd_bounds(n, m, w_max)?, &common),
        Command::GraphRun {
            common,
            graph,
            reps,
            worst_start,
            out_csv,
        } => {
            let (problem, g) = graph.load(common.seed)?;
            let spec = GraphRunSpec {
                problem,
                graph: g,
                source: graph.source,
                reps,
                seed: common.seed,
                worst_start,
            };
            let report = cmd_graph_run(&spec)?;
            if let Some(path) = &out_csv {
                write_file(path, &report.csv()?)?;
            }
            finish(&report, &common)
        }
    }
}

fn main() -> ExitCode {
    let code = match execute(Cli::parse()) {
        Ok(true) => exit::PASSED,
        Ok(false) => exit::FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    };
    ExitCode::from(code as u8)
}
