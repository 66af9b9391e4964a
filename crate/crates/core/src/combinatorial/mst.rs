use std::f64::consts::E;
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::combinatorial::{DisjointSets, WeightedGraph};
use crate::drift::{check_multiplicative_condition, DriftAccumulator, DriftEstimate, MultiplicativeCheck};
use crate::ea::{run, run_reps, BitString, FitnessOracle, Init, RunConfig, RunRecord};
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

/// Kruskal's algorithm; ties are broken by edge index. Returns the weight
/// of the tree and its edge set. Fails only on edgeless graphs.
pub fn kruskal(g: &WeightedGraph) -> Result<(u64, BitString)> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&i| g.edges()[i].weight);
    greedy_tree(g, &order)
}

pub fn maximum_spanning_tree(g: &WeightedGraph) -> Result<BitString> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(g.edges()[i].weight));
    Ok(greedy_tree(g, &order)?.1)
}

/// Greedy tree over a uniformly shuffled edge order.
pub fn random_spanning_tree(g: &WeightedGraph, rng: &mut Rng) -> Result<BitString> {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(rng);
    Ok(greedy_tree(g, &order)?.1)
}

fn greedy_tree(g: &WeightedGraph, order: &[usize]) -> Result<(u64, BitString)> {
    if g.m() == 0 {
        return Err(Error::EmptyInput("graph has no edges".into()));
    }
    let n = g.n_vertices();
    let mut dsu = DisjointSets::new(n);
    let mut bits = vec![false; g.m()];
    let mut weight = 0;
    for &i in order {
        if dsu.components() == 1 {
            break;
        }
        let e = g.edges()[i];
        if dsu.union(e.u, e.v) {
            bits[i] = true;
            weight += e.weight;
        }
    }
    Ok((weight, BitString::from_bits(bits)?))
}

/// `|x| = n - 1` and the selected edges are acyclic.
pub fn is_spanning_tree(g: &WeightedGraph, x: &BitString) -> bool {
    if x.len() != g.m() || x.count_ones() + 1 != g.n_vertices() {
        return false;
    }
    let mut dsu = DisjointSets::new(g.n_vertices());
    x.ones_positions().all(|i| {
        let e = g.edges()[i];
        dsu.union(e.u, e.v)
    })
}

/// Total weight of a spanning tree; `+inf` for every other edge set.
pub fn mst_fitness(x: &BitString, g: &WeightedGraph) -> f64 {
    if !is_spanning_tree(g, x) {
        return f64::INFINITY;
    }
    x.ones_positions().map(|i| g.edges()[i].weight).sum::<u64>() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeStart {
    #[default]
    Random,
    /// Maximum-weight spanning tree.
    Worst,
}

/// The MST problem over edge bit strings of length `m`, with non-trees
/// always rejected.
#[derive(Debug, Clone)]
pub struct MstProblem {
    graph: Arc<WeightedGraph>,
    w_opt: u64,
    start: TreeStart,
}

impl MstProblem {
    pub fn new(graph: WeightedGraph) -> Result<Self> {
        let w_opt = kruskal(&graph)?.0;
        Ok(Self {
            graph: Arc::new(graph),
            w_opt,
            start: TreeStart::Random,
        })
    }

    pub fn with_start(mut self, start: TreeStart) -> Self {
        self.start = start;
        self
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn w_opt(&self) -> u64 {
        self.w_opt
    }

    /// Run configuration with an iteration cap of twenty times the
    /// expected-time bound.
    pub fn config(&self, seed: u64) -> RunConfig {
        mst_config(self, seed)
    }
}

impl FitnessOracle for MstProblem {
    fn len(&self) -> usize {
        self.graph.m()
    }

    fn evaluate(&self, x: &BitString) -> f64 {
        mst_fitness(x, &self.graph)
    }

    fn optimum_value(&self) -> f64 {
        self.w_opt as f64
    }

    fn description(&self) -> String {
        format!(
            "mst(n={}, m={}, w_max={})",
            self.graph.n_vertices(),
            self.graph.m(),
            self.graph.w_max()
        )
    }

    fn difference(&self, offspring: &BitString, flipped: &[usize]) -> f64 {
        if !is_spanning_tree(&self.graph, offspring) {
            return f64::INFINITY;
        }
        flipped
            .iter()
            .map(|&i| {
                let w = self.graph.edges()[i].weight as f64;
                if offspring.get(i) {
                    w
                } else {
                    -w
                }
            })
            .sum()
    }

    fn initial_point(&self, rng: &mut Rng) -> BitString {
        match self.start {
            TreeStart::Random => random_spanning_tree(&self.graph, rng),
            TreeStart::Worst => maximum_spanning_tree(&self.graph),
        }
        .expect("MST instances have edges")
    }
}

/// `2 e m^2 (1 + ln m + ln w_max)`.
pub fn mst_bound(m: usize, w_max: u64) -> Result<f64> {
    if m == 0 || w_max == 0 {
        return Err(invalid(format!("need m >= 1 and w_max >= 1, got m={m}, w_max={w_max}")));
    }
    let m = m as f64;
    Ok(2.0 * E * m * m * (1.0 + m.ln() + (w_max as f64).ln()))
}

pub fn mst_config(problem: &MstProblem, seed: u64) -> RunConfig {
    let g = problem.graph();
    let bound = mst_bound(g.m(), g.w_max()).expect("validated graph");
    RunConfig::new(g.m(), seed).with_max_iters((20.0 * bound).ceil() as u64)
}

/// Runs the EA from a spanning tree until a minimum spanning tree is found.
pub fn mst_run(problem: &MstProblem, config: &RunConfig) -> Result<RunRecord> {
    if let Init::Explicit(x) = &config.init {
        if !is_spanning_tree(problem.graph(), x) {
            return Err(invalid("initial edge set is not a spanning tree"));
        }
    }
    run(problem, config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstDriftReport {
    pub reps: u64,
    pub capped_runs: u64,
    pub delta: f64,
    pub estimates: Vec<DriftEstimate>,
    pub check: MultiplicativeCheck,
}

impl MstDriftReport {
    pub fn passed(&self) -> bool {
        self.check.passed
    }
}

/// Estimates the drift of `w(x) - w_opt` over `reps` runs and compares it to
/// `(w(x) - w_opt) / (e m^2)`. Levels with fewer than `min_samples`
/// observations are pooled with their neighbours.
pub fn mst_drift_check(
    problem: &MstProblem,
    reps: u64,
    seed: u64,
    min_samples: u64,
) -> Result<MstDriftReport> {
    if reps < 100 {
        return Err(invalid(format!("at least 100 runs required, got {reps}")));
    }
    let graph = Arc::clone(&problem.graph);
    let w_opt = problem.w_opt as f64;
    let config = mst_config(problem, seed)
        .with_potential(Arc::new(move |x: &BitString| mst_fitness(x, &graph) - w_opt));
    let partial = run_reps(reps, seed, |_, s| -> Result<(DriftAccumulator, bool)> {
        let record = mst_run(problem, &config.clone().with_seed(s))?;
        let mut acc = DriftAccumulator::new();
        if let Some(trace) = &record.trace {
            acc.observe_trace(trace);
        }
        Ok((acc, record.capped))
    });
    let mut acc = DriftAccumulator::new();
    let mut capped_runs = 0;
    for p in partial {
        let (a, capped) = p?;
        acc.merge(&a);
        capped_runs += u64::from(capped);
    }
    let m = problem.graph.m() as f64;
    let delta = 1.0 / (E * m * m);
    let estimates = acc.pooled_estimates(min_samples)?;
    let check = check_multiplicative_condition(&estimates, delta)?;
    Ok(MstDriftReport {
        reps,
        capped_runs,
        delta,
        estimates,
        check,
    })
}
