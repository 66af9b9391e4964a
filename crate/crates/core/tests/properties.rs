use std::sync::Arc;

use driftlab::combinatorial::{
    dijkstra, kruskal, mst_fitness, mst_run, random_spanning_tree, shortest_path_tree,
    sssp_fitness, sssp_run, MstProblem, SsspConfig, SsspProblem, WeightedGraph,
};
use driftlab::drift::{ideal_potential, synthetic_hitting_time, verify_unit_drift, AbsorbingChain};
use driftlab::ea::{run, BitString, RunConfig};
use driftlab::linear::{exact_pointwise_drift, LinearFunction, Potential};
use driftlab::rng::rng_from_seed;
use proptest::prelude::*;

fn weights(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..100.0, 1..=max_n)
}

fn function_and_point(max_n: usize) -> impl Strategy<Value = (LinearFunction, BitString)> {
    weights(max_n).prop_flat_map(|w| {
        let n = w.len();
        (
            Just(LinearFunction::from_weights(w).unwrap()),
            prop::collection::vec(any::<bool>(), n).prop_map(|b| BitString::from_bits(b).unwrap()),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fitness_never_increases_in_expectation((f, x) in function_and_point(10)) {
        let d = exact_pointwise_drift(&f, &Potential::Identity(f.clone()), &x).unwrap();
        prop_assert!(d >= -1e-12 * f.weights().iter().sum::<f64>());
    }

    #[test]
    fn weighted_drift_ignores_fitness_scale((f, x) in function_and_point(10), c in 0.1f64..50.0) {
        let g = Potential::WeightedG;
        let a = exact_pointwise_drift(&f, &g, &x).unwrap();
        let b = exact_pointwise_drift(&f.scaled(c).unwrap(), &g, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn weighted_drift_is_positive_off_the_optimum((f, x) in function_and_point(10)) {
        let d = exact_pointwise_drift(&f, &Potential::WeightedG, &x).unwrap();
        prop_assert_eq!(d > 0.0, !x.is_zero());
    }

    #[test]
    fn ea_fitness_trace_is_monotone(w in weights(30), seed in any::<u64>()) {
        let f = LinearFunction::from_weights(w).unwrap();
        let n = f.len();
        let h = f.clone();
        let config = RunConfig::new(n, seed)
            .with_potential(Arc::new(move |x: &BitString| h.eval(x).unwrap()));
        let record = run(&f, &config).unwrap();
        prop_assert!(!record.capped);
        prop_assert!(record.final_point.is_zero());
        prop_assert_eq!(record.evaluations, record.optimization_time + 1);
        let trace = record.trace.unwrap();
        prop_assert_eq!(trace.values().len() as u64, record.optimization_time + 1);
        prop_assert!(trace.values().windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn runs_are_reproducible(seed in any::<u64>()) {
        let f = LinearFunction::binval(16).unwrap();
        let config = RunConfig::new(16, seed);
        prop_assert_eq!(run(&f, &config).unwrap(), run(&f, &config).unwrap());
    }

    #[test]
    fn ideal_potential_has_unit_drift(states in 3usize..15, seed in any::<u64>()) {
        let absorbing = 1 + (seed as usize) % (states - 1);
        let chain = AbsorbingChain::random(states, absorbing.min(states - 1), &mut rng_from_seed(seed)).unwrap();
        let mu = ideal_potential(&chain).unwrap();
        prop_assert!(verify_unit_drift(&chain, &mu).unwrap() <= 1e-9);
        for s in chain.absorbing_states() {
            prop_assert_eq!(mu[s], 0.0);
        }
        for s in chain.transient_states() {
            prop_assert!(mu[s] >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn synthetic_process_takes_at_least_s0_steps(s0 in 1u64..200, seed in any::<u64>()) {
        let delta = 0.5 / s0 as f64;
        let t = synthetic_hitting_time(s0, delta, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(t >= s0);
    }
}

fn graph(directed: bool) -> impl Strategy<Value = WeightedGraph> {
    (3usize..9, any::<u64>(), 1u64..20).prop_flat_map(move |(n, seed, w_max)| {
        let max_m = n * (n - 1) / 2;
        (n - 1..=max_m).prop_map(move |m| {
            let mut rng = rng_from_seed(seed);
            if directed {
                WeightedGraph::random_reachable_digraph(n, m, w_max, 0, &mut rng).unwrap()
            } else {
                WeightedGraph::random_connected(n, m, w_max, &mut rng).unwrap()
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spanning_trees_weigh_at_least_the_optimum(g in graph(false), seed in any::<u64>()) {
        let (w_opt, opt) = kruskal(&g).unwrap();
        prop_assert_eq!(mst_fitness(&opt, &g), w_opt as f64);
        let t = random_spanning_tree(&g, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(t.count_ones(), g.n_vertices() - 1);
        prop_assert!(mst_fitness(&t, &g) >= w_opt as f64);
        prop_assert_eq!(mst_fitness(&BitString::zeros(g.m()), &g), f64::INFINITY);
    }

    #[test]
    fn mst_runs_reach_the_optimum(g in graph(false), seed in any::<u64>()) {
        let p = MstProblem::new(g.clone()).unwrap();
        let record = mst_run(&p, &p.config(seed)).unwrap();
        prop_assert!(!record.capped);
        prop_assert_eq!(mst_fitness(&record.final_point, &g), p.w_opt() as f64);
    }

    #[test]
    fn sssp_fitness_is_bounded(g in graph(true), seed in any::<u64>()) {
        let p = SsspProblem::new(&g, 0).unwrap();
        let n = g.n_vertices() as u64;
        let t = p.random_tree(&mut rng_from_seed(seed));
        let value = sssp_fitness(&t, &g).unwrap();
        prop_assert!(value >= p.optimum());
        prop_assert!(value <= (n - 1) * n * g.w_max());
        let best = shortest_path_tree(&g, 0).unwrap();
        prop_assert_eq!(sssp_fitness(&best, &g).unwrap(), p.optimum());
        let d = dijkstra(&g, 0).unwrap();
        prop_assert_eq!(p.path_weights(&best), d);
    }

    #[test]
    fn sssp_gap_trace_is_monotone(g in graph(true), seed in any::<u64>()) {
        let p = SsspProblem::new(&g, 0).unwrap();
        let record = sssp_run(&p, &SsspConfig::new(seed).with_gap_trace()).unwrap();
        prop_assert!(!record.capped);
        prop_assert_eq!(p.fitness(&record.final_point), p.optimum());
        let trace = record.trace.unwrap();
        prop_assert!(trace.values().windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*trace.values().last().unwrap(), 0.0);
    }
}
