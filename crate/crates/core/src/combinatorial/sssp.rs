use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};

use crate::combinatorial::WeightedGraph;
use crate::drift::{
    check_multiplicative_condition, DriftAccumulator, DriftEstimate, MultiplicativeCheck,
    PotentialTrace,
};
use crate::ea::{run_reps, RunRecord};
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// Shortest distances from `source` along arcs `u -> v`; `None` for
/// unreachable vertices.
pub fn dijkstra(g: &WeightedGraph, source: usize) -> Result<Vec<Option<u64>>> {
    let n = g.n_vertices();
    if source >= n {
        return Err(invalid(format!("source {source} out of range for {n} vertices")));
    }
    let mut out = vec![Vec::new(); n];
    for e in g.edges() {
        out[e.u].push((e.v, e.weight));
    }
    let mut dist = vec![None; n];
    let mut heap = BinaryHeap::from([Reverse((0u64, source))]);
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some() {
            continue;
        }
        dist[u] = Some(d);
        for &(v, w) in &out[u] {
            if dist[v].is_none() {
                heap.push(Reverse((d + w, v)));
            }
        }
    }
    Ok(dist)
}

/// Predecessor assignment for every vertex other than the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredecessorTree {
    source: usize,
    pred: Vec<Option<usize>>,
}

impl PredecessorTree {
    pub fn unset(n: usize, source: usize) -> Result<Self> {
        Self::from_preds(source, vec![None; n])
    }

    pub fn from_preds(source: usize, pred: Vec<Option<usize>>) -> Result<Self> {
        let n = pred.len();
        if source >= n {
            return Err(invalid(format!("source {source} out of range for {n} vertices")));
        }
        if pred[source].is_some() {
            return Err(invalid("the source has no predecessor"));
        }
        if let Some(v) = pred.iter().position(|p| p.is_some_and(|u| u >= n)) {
            return Err(invalid(format!("predecessor of vertex {v} out of range")));
        }
        Ok(Self { source, pred })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn len(&self) -> usize {
        self.pred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pred.is_empty()
    }

    pub fn pred(&self, v: usize) -> Option<usize> {
        self.pred[v]
    }

    pub fn preds(&self) -> &[Option<usize>] {
        &self.pred
    }
}

/// A shortest-path tree; each vertex takes the smallest-index predecessor
/// that is tight.
pub fn shortest_path_tree(g: &WeightedGraph, source: usize) -> Result<PredecessorTree> {
    let dist = dijkstra(g, source)?;
    let mut pred = vec![None; g.n_vertices()];
    for e in g.edges() {
        if e.v == source {
            continue;
        }
        if let (Some(du), Some(dv)) = (dist[e.u], dist[e.v]) {
            if du + e.weight == dv && pred[e.v].is_none_or(|p| e.u < p) {
                pred[e.v] = Some(e.u);
            }
        }
    }
    PredecessorTree::from_preds(source, pred)
}

/// SSSP instance: a digraph in which every vertex is reachable from the
/// source, with its Dijkstra optimum.
#[derive(Debug, Clone)]
pub struct SsspProblem {
    n: usize,
    source: usize,
    /// Lightest arc weight `u -> v`, stored at `u * n + v`.
    arc: Vec<Option<u64>>,
    in_neighbors: Vec<Vec<usize>>,
    distances: Vec<u64>,
    optimum: u64,
    penalty: u64,
    w_max: u64,
}

impl SsspProblem {
    pub fn new(g: &WeightedGraph, source: usize) -> Result<Self> {
        let n = g.n_vertices();
        if source >= n {
            return Err(invalid(format!("source {source} out of range for {n} vertices")));
        }
        if !g.reachable_from(source) {
            return Err(Error::InvalidGraph(format!(
                "not every vertex is reachable from {source}"
            )));
        }
        let mut arc: Vec<Option<u64>> = vec![None; n * n];
        for e in g.edges() {
            let slot = &mut arc[e.u * n + e.v];
            *slot = Some(slot.map_or(e.weight, |w| w.min(e.weight)));
        }
        let in_neighbors = (0..n)
            .map(|v| (0..n).filter(|&u| arc[u * n + v].is_some()).collect())
            .collect();
        let distances: Vec<u64> = dijkstra(g, source)?
            .into_iter()
            .map(|d| d.expect("reachable"))
            .collect();
        Ok(Self {
            n,
            source,
            arc,
            in_neighbors,
            optimum: distances.iter().sum(),
            distances,
            penalty: n as u64 * g.w_max(),
            w_max: g.w_max(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn w_max(&self) -> u64 {
        self.w_max
    }

    /// Sum of shortest distances.
    pub fn optimum(&self) -> u64 {
        self.optimum
    }

    pub fn distances(&self) -> &[u64] {
        &self.distances
    }

    /// Weight charged to a vertex without a valid path to the source.
    pub fn penalty(&self) -> u64 {
        self.penalty
    }

    /// Per-vertex path weight to the source along `t`, `None` where the path
    /// is broken by an unset entry, a non-arc or a cycle.
    pub fn path_weights(&self, t: &PredecessorTree) -> Vec<Option<u64>> {
        const UNSEEN: u8 = 0;
        const ON_STACK: u8 = 1;
        const DONE: u8 = 2;
        let mut state = vec![UNSEEN; self.n];
        let mut weight = vec![None; self.n];
        state[t.source] = DONE;
        weight[t.source] = Some(0);
        let mut stack = Vec::with_capacity(self.n);
        for start in 0..self.n {
            let mut v = start;
            let base = loop {
                if state[v] == DONE {
                    break weight[v];
                }
                if state[v] == ON_STACK {
                    break None;
                }
                state[v] = ON_STACK;
                stack.push(v);
                match t.pred[v] {
                    Some(u) if self.arc[u * self.n + v].is_some() => v = u,
                    _ => break None,
                }
            };
            let mut acc = base;
            while let Some(v) = stack.pop() {
                acc = acc.map(|a| {
                    let u = t.pred[v].expect("on a valid path");
                    a + self.arc[u * self.n + v].expect("checked arc")
                });
                weight[v] = acc;
                state[v] = DONE;
            }
        }
        weight
    }

    pub fn fitness(&self, t: &PredecessorTree) -> u64 {
        self.path_weights(t)
            .into_iter()
            .enumerate()
            .filter(|&(v, _)| v != t.source)
            .map(|(_, w)| w.unwrap_or(self.penalty))
            .sum()
    }

    /// Uniform in-neighbor for every non-source vertex.
    pub fn random_tree(&self, rng: &mut Rng) -> PredecessorTree {
        let pred = (0..self.n)
            .map(|v| (v != self.source).then(|| self.random_in_neighbor(v, rng)))
            .collect();
        PredecessorTree {
            source: self.source,
            pred,
        }
    }

    fn random_in_neighbor(&self, v: usize, rng: &mut Rng) -> usize {
        let ins = &self.in_neighbors[v];
        ins[rng.random_range(0..ins.len())]
    }

    /// `6 n^3 (1 + 2 ln n + ln w_max)` for this instance.
    pub fn bound(&self) -> f64 {
        sssp_bound(self.n, self.w_max).expect("validated instance")
    }

    fn check_tree(&self, t: &PredecessorTree) -> Result<()> {
        if t.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: t.len(),
            });
        }
        if t.source != self.source {
            return Err(invalid("tree is rooted at a different source"));
        }
        Ok(())
    }
}

/// Total path weight of `t` over the non-source vertices, charging
/// `n * w_max` for every vertex without a valid path.
pub fn sssp_fitness(t: &PredecessorTree, g: &WeightedGraph) -> Result<u64> {
    let problem = SsspProblem::new(g, t.source())?;
    problem.check_tree(t)?;
    Ok(problem.fitness(t))
}

/// `6 n^3 (1 + 2 ln n + ln w_max)`.
pub fn sssp_bound(n: usize, w_max: u64) -> Result<f64> {
    if n == 0 || w_max == 0 {
        return Err(invalid(format!("need n >= 1 and w_max >= 1, got n={n}, w_max={w_max}")));
    }
    let nf = n as f64;
    Ok(6.0 * nf.powi(3) * (1.0 + 2.0 * nf.ln() + (w_max as f64).ln()))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SsspInit {
    #[default]
    Random,
    Unset,
    Explicit(PredecessorTree),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsspConfig {
    pub seed: u64,
    /// Defaults to twenty times the expected-time bound.
    pub max_iters: Option<u64>,
    pub init: SsspInit,
    /// Record the gap to the optimum after every iteration.
    pub record_gap: bool,
}

impl SsspConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_iters: None,
            init: SsspInit::Random,
            record_gap: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: u64) -> Self {
        self.max_iters = Some(max_iters);
        self
    }

    pub fn with_init(mut self, init: SsspInit) -> Self {
        self.init = init;
        self
    }

    pub fn with_gap_trace(mut self) -> Self {
        self.record_gap = true;
        self
    }
}

/// Each iteration applies `1 + Poisson(1)` elementary moves; a move resets
/// the predecessor of a uniform non-source vertex to a uniform in-neighbor.
/// The offspring replaces the parent unless its fitness is larger.
pub fn sssp_run(problem: &SsspProblem, config: &SsspConfig) -> Result<RunRecord<PredecessorTree>> {
    let max_iters = config
        .max_iters
        .unwrap_or_else(|| (20.0 * problem.bound()).ceil() as u64);
    if max_iters == 0 {
        return Err(invalid("max_iters must be at least 1"));
    }
    let mut rng = rng_from_seed(config.seed);
    let mut x = match &config.init {
        SsspInit::Random => problem.random_tree(&mut rng),
        SsspInit::Unset => PredecessorTree::unset(problem.n, problem.source)?,
        SsspInit::Explicit(t) => {
            problem.check_tree(t)?;
            t.clone()
        }
    };
    let poisson = Poisson::new(1.0).expect("valid rate");
    let others: Vec<usize> = (0..problem.n).filter(|&v| v != problem.source).collect();
    let mut value = problem.fitness(&x);
    let mut gaps = Vec::new();
    if config.record_gap {
        gaps.push((value - problem.optimum) as f64);
    }
    let mut undo: Vec<(usize, Option<usize>)> = Vec::new();
    let mut t = 0;
    let capped = loop {
        if value == problem.optimum {
            break false;
        }
        if t == max_iters {
            break true;
        }
        let moves = 1 + poisson.sample(&mut rng) as u64;
        undo.clear();
        for _ in 0..moves {
            let v = others[rng.random_range(0..others.len())];
            undo.push((v, x.pred[v]));
            x.pred[v] = Some(problem.random_in_neighbor(v, &mut rng));
        }
        let candidate = problem.fitness(&x);
        if candidate <= value {
            value = candidate;
        } else {
            for &(v, old) in undo.iter().rev() {
                x.pred[v] = old;
            }
        }
        t += 1;
        if config.record_gap {
            gaps.push((value - problem.optimum) as f64);
        }
    };
    let trace = if config.record_gap {
        Some(PotentialTrace::new(gaps, capped)?)
    } else {
        None
    };
    Ok(RunRecord {
        optimization_time: t,
        capped,
        evaluations: t + 1,
        final_point: x,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsspDriftReport {
    pub reps: u64,
    pub capped_runs: u64,
    pub estimates: Vec<DriftEstimate>,
    /// Estimated `E[g(t+1) | g(t)] / g(t)` for each estimate.
    pub ratios: Vec<f64>,
    /// `1 - 1 / (3 n^3)`.
    pub required_ratio: f64,
    pub check: MultiplicativeCheck,
    /// `c` such that the smallest observed relative drift equals
    /// `1 / (c n^3)`.
    pub measured_constant: f64,
}

impl SsspDriftReport {
    pub fn passed(&self) -> bool {
        self.check.passed
    }
}

/// Estimates the conditional gap ratio over `reps` runs and compares it to
/// `1 - 1/(3 n^3)`. Levels are pooled until each has `min_samples`
/// observations.
pub fn sssp_drift_check(
    problem: &SsspProblem,
    reps: u64,
    seed: u64,
    min_samples: u64,
) -> Result<SsspDriftReport> {
    if reps < 100 {
        return Err(invalid(format!("at least 100 runs required, got {reps}")));
    }
    let config = SsspConfig::new(seed).with_gap_trace();
    let partial = run_reps(reps, seed, |_, s| -> Result<(DriftAccumulator, bool)> {
        let record = sssp_run(problem, &config.clone().with_seed(s))?;
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
    let n3 = (problem.n as f64).powi(3);
    let estimates = acc.pooled_estimates(min_samples)?;
    let check = check_multiplicative_condition(&estimates, 1.0 / (3.0 * n3))?;
    Ok(SsspDriftReport {
        reps,
        capped_runs,
        ratios: estimates.iter().map(|e| 1.0 - e.relative_drift()).collect(),
        estimates,
        required_ratio: 1.0 - 1.0 / (3.0 * n3),
        measured_constant: 1.0 / (check.worst_relative_drift * n3),
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn bellman_ford(g: &WeightedGraph, source: usize) -> Vec<Option<u64>> {
        let mut dist = vec![None; g.n_vertices()];
        dist[source] = Some(0);
        for _ in 0..g.n_vertices() {
            for e in g.edges() {
                if let Some(du) = dist[e.u] {
                    if dist[e.v].is_none_or(|dv: u64| du + e.weight < dv) {
                        dist[e.v] = Some(du + e.weight);
                    }
                }
            }
        }
        dist
    }

    fn diamond() -> WeightedGraph {
        WeightedGraph::parse("4 5\n0 1 1\n0 2 4\n1 2 2\n1 3 6\n2 3 1\n").unwrap()
    }

    #[test]
    fn dijkstra_basics() {
        let path = WeightedGraph::parse("4 3\n0 1 2\n1 2 3\n2 3 4\n").unwrap();
        assert_eq!(dijkstra(&path, 0).unwrap(), vec![Some(0), Some(2), Some(5), Some(9)]);
        assert_eq!(dijkstra(&path, 2).unwrap(), vec![None, None, Some(0), Some(4)]);
        assert_eq!(
            dijkstra(&diamond(), 0).unwrap(),
            vec![Some(0), Some(1), Some(3), Some(4)]
        );
        assert!(dijkstra(&path, 4).is_err());
    }

    #[test]
    fn dijkstra_matches_bellman_ford() {
        let mut rng = rng_from_seed(31);
        for n in 2..=8 {
            for _ in 0..20 {
                let m = rng.random_range(n - 1..=n * (n - 1));
                let g = WeightedGraph::random_reachable_digraph(n, m, 20, 0, &mut rng).unwrap();
                for s in 0..n {
                    assert_eq!(dijkstra(&g, s).unwrap(), bellman_ford(&g, s));
                }
            }
        }
    }

    #[test]
    fn fitness_examples() {
        let g = diamond();
        let p = SsspProblem::new(&g, 0).unwrap();
        let opt = shortest_path_tree(&g, 0).unwrap();
        assert_eq!(opt.preds(), &[None, Some(0), Some(1), Some(2)]);
        assert_eq!(p.fitness(&opt), 8);
        assert_eq!(p.optimum(), 8);
        assert_eq!(p.penalty(), 24);

        let unset = PredecessorTree::unset(4, 0).unwrap();
        assert_eq!(sssp_fitness(&unset, &g).unwrap(), 3 * 24);

        // 1 -> 2 and 2 -> 1 would form a cycle, but only 1 -> 2 is an arc.
        let t = PredecessorTree::from_preds(0, vec![None, Some(2), Some(1), Some(2)]).unwrap();
        assert_eq!(p.fitness(&t), 3 * 24);

        let g2 = WeightedGraph::parse("3 4\n0 1 1\n1 2 1\n2 1 1\n0 2 5\n").unwrap();
        let p2 = SsspProblem::new(&g2, 0).unwrap();
        let cycle = PredecessorTree::from_preds(0, vec![None, Some(2), Some(1)]).unwrap();
        assert_eq!(p2.fitness(&cycle), 2 * p2.penalty());
        let half = PredecessorTree::from_preds(0, vec![None, Some(0), Some(1)]).unwrap();
        assert_eq!(p2.fitness(&half), 1 + 2);
    }

    #[test]
    fn rejects_unreachable_and_bad_trees() {
        let g = WeightedGraph::parse("3 2\n0 1 1\n2 1 1\n").unwrap();
        assert!(matches!(SsspProblem::new(&g, 0), Err(Error::InvalidGraph(_))));
        assert!(PredecessorTree::from_preds(0, vec![Some(1), None]).is_err());
        assert!(PredecessorTree::from_preds(0, vec![None, Some(5)]).is_err());
        let p = SsspProblem::new(&diamond(), 0).unwrap();
        let wrong = PredecessorTree::unset(4, 1).unwrap();
        assert!(sssp_run(&p, &SsspConfig::new(1).with_init(SsspInit::Explicit(wrong))).is_err());
    }

    #[test]
    fn fitness_bounds_on_random_states() {
        let mut rng = rng_from_seed(5);
        let g = WeightedGraph::random_reachable_digraph(8, 20, 10, 0, &mut rng).unwrap();
        let p = SsspProblem::new(&g, 0).unwrap();
        for _ in 0..2000 {
            let pred = (0..8)
                .map(|v| (v != 0 && rng.random_bool(0.9)).then(|| rng.random_range(0..8)))
                .collect();
            let t = PredecessorTree::from_preds(0, pred).unwrap();
            let f = p.fitness(&t);
            assert!(f >= p.optimum());
            assert!(f <= 64 * g.w_max());
        }
    }

    #[test]
    fn bound_values() {
        assert!((sssp_bound(10, 10).unwrap() - 47446.53).abs() < 0.01);
        assert_eq!(sssp_bound(1, 1).unwrap(), 6.0);
        assert!(sssp_bound(11, 10).unwrap() > sssp_bound(10, 10).unwrap());
        assert!(sssp_bound(10, 11).unwrap() > sssp_bound(10, 10).unwrap());
        assert!(sssp_bound(0, 1).is_err());
    }

    #[test]
    fn optimal_start_takes_no_time() {
        let g = diamond();
        let p = SsspProblem::new(&g, 0).unwrap();
        let opt = shortest_path_tree(&g, 0).unwrap();
        let r = sssp_run(&p, &SsspConfig::new(3).with_init(SsspInit::Explicit(opt))).unwrap();
        assert_eq!(r.optimization_time, 0);
        assert!(!r.capped);
    }

    #[test]
    fn runs_reach_shortest_paths() {
        let mut rng = rng_from_seed(6);
        let g = WeightedGraph::random_reachable_digraph(8, 24, 10, 0, &mut rng).unwrap();
        let p = SsspProblem::new(&g, 0).unwrap();
        let expected: Vec<Option<u64>> = dijkstra(&g, 0).unwrap();
        for seed in 0..30 {
            let init = if seed % 2 == 0 { SsspInit::Random } else { SsspInit::Unset };
            let r = sssp_run(&p, &SsspConfig::new(seed).with_init(init).with_gap_trace()).unwrap();
            assert!(!r.capped);
            assert_eq!(p.path_weights(&r.final_point), expected);
            let gaps = r.trace.unwrap();
            assert!(gaps.values().windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(gaps.hitting_time(), Some(r.optimization_time as usize));
        }
    }

    #[test]
    fn single_vertex_instance() {
        let g = WeightedGraph::new(1, vec![]).unwrap();
        let p = SsspProblem::new(&g, 0).unwrap();
        let r = sssp_run(&p, &SsspConfig::new(0)).unwrap();
        assert_eq!(r.optimization_time, 0);
    }

    #[test]
    fn drift_check_on_small_graph() {
        let mut rng = rng_from_seed(8);
        let g = WeightedGraph::random_reachable_digraph(8, 24, 10, 0, &mut rng).unwrap();
        let p = SsspProblem::new(&g, 0).unwrap();
        let report = sssp_drift_check(&p, 200, 2, 500).unwrap();
        assert!(report.ratios.iter().all(|&r| r <= 1.0));
        assert!(report.passed(), "{:?}", report.check);
        assert!(report.measured_constant.is_finite() && report.measured_constant > 0.0);
    }
}
