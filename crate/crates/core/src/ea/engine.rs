use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::drift::PotentialTrace;
use crate::ea::{BitString, FitnessOracle, Mutator};
use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::stats::{median, Moments};

/// A potential evaluated along a run.
pub type PotentialFn = Arc<dyn Fn(&BitString) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Delegates to [`FitnessOracle::initial_point`] (uniform for plain
    /// pseudo-Boolean functions).
    Random,
    Explicit(BitString),
}

/// `ceil(100 e n ln(n + 2))`.
pub fn default_max_iters(n: usize) -> u64 {
    let n = n as f64;
    (100.0 * std::f64::consts::E * n * (n + 2.0).ln()).ceil() as u64
}

#[derive(Clone)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub max_iters: u64,
    pub record_potential: Option<PotentialFn>,
    pub record_stride: u64,
    pub init: Init,
}

impl fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunConfig")
            .field("n", &self.n)
            .field("seed", &self.seed)
            .field("max_iters", &self.max_iters)
            .field("record_potential", &self.record_potential.is_some())
            .field("record_stride", &self.record_stride)
            .field("init", &self.init)
            .finish()
    }
}

impl RunConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            max_iters: default_max_iters(n),
            record_potential: None,
            record_stride: 1,
            init: Init::Random,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: u64) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_potential(mut self, potential: PotentialFn) -> Self {
        self.record_potential = Some(potential);
        self
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn validate(&self, f: &dyn FitnessOracle) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        if self.n != f.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                found: self.n,
            });
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        if self.record_stride == 0 {
            return Err(invalid("record_stride must be at least 1"));
        }
        if let Init::Explicit(x) = &self.init {
            x.check_len(self.n)?;
        }
        Ok(())
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<P = BitString> {
    /// First iteration at which the current point is optimal; for capped
    /// runs, the number of iterations performed.
    pub optimization_time: u64,
    pub capped: bool,
    /// Fitness evaluations, counting the initial point.
    pub evaluations: u64,
    pub final_point: P,
    pub trace: Option<PotentialTrace>,
}

/// One iteration: mutate, then keep the offspring iff it is not worse.
pub fn step(x: &BitString, f: &dyn FitnessOracle, rng: &mut Rng) -> BitString {
    let mutator = Mutator::new(x.len());
    let mut flips = Vec::new();
    mutator.sample_positions(rng, &mut flips);
    let mut y = x.clone();
    y.flip_all(&flips);
    if f.difference(&y, &flips) <= 0.0 {
        y
    } else {
        x.clone()
    }
}

struct Recorder {
    potential: Option<PotentialFn>,
    stride: u64,
    values: Vec<f64>,
    last: Option<u64>,
}

impl Recorder {
    fn new(config: &RunConfig) -> Self {
        Self {
            potential: config.record_potential.clone(),
            stride: config.record_stride,
            values: Vec::new(),
            last: None,
        }
    }

    fn record(&mut self, t: u64, x: &BitString, force: bool) {
        if let Some(g) = &self.potential {
            if self.last != Some(t) && (force || t % self.stride == 0) {
                self.values.push(g(x));
                self.last = Some(t);
            }
        }
    }

    fn finish(self, capped: bool) -> Result<Option<PotentialTrace>> {
        match self.potential {
            None => Ok(None),
            Some(_) => PotentialTrace::new(self.values, capped).map(Some),
        }
    }
}

fn evolve(
    f: &dyn FitnessOracle,
    config: &RunConfig,
    stop_at_optimum: bool,
) -> Result<RunRecord> {
    config.validate(f)?;
    let mut rng = rng_from_seed(config.seed);
    let mut x = match &config.init {
        Init::Random => f.initial_point(&mut rng),
        Init::Explicit(x) => x.clone(),
    };
    let mut value = f.evaluate(&x);
    let mutator = Mutator::new(config.n);
    let mut flips = Vec::with_capacity(8);
    let mut recorder = Recorder::new(config);
    recorder.record(0, &x, true);

    let mut t = 0;
    let capped = loop {
        if stop_at_optimum && f.is_optimal(&x, value) {
            break false;
        }
        if t == config.max_iters {
            break true;
        }
        mutator.sample_positions(&mut rng, &mut flips);
        x.flip_all(&flips);
        let d = f.difference(&x, &flips);
        if d <= 0.0 {
            value += d;
        } else {
            x.flip_all(&flips);
        }
        t += 1;
        recorder.record(t, &x, false);
    };
    recorder.record(t, &x, true);

    Ok(RunRecord {
        optimization_time: t,
        capped,
        evaluations: t + 1,
        final_point: x,
        trace: recorder.finish(capped)?,
    })
}

/// Runs the (1+1) EA until the optimum is found or `max_iters` iterations
/// have been performed.
pub fn run(f: &dyn FitnessOracle, config: &RunConfig) -> Result<RunRecord> {
    evolve(f, config, true)
}

/// The search point after exactly `t` iterations, without stopping at the
/// optimum.
pub fn state_at(f: &dyn FitnessOracle, config: &RunConfig, t: u64) -> Result<BitString> {
    if t == 0 {
        config.clone().with_max_iters(1).validate(f)?;
        let mut rng = rng_from_seed(config.seed);
        return Ok(match &config.init {
            Init::Random => f.initial_point(&mut rng),
            Init::Explicit(x) => x.clone(),
        });
    }
    let cfg = RunConfig {
        max_iters: t,
        record_potential: None,
        ..config.clone()
    };
    Ok(evolve(f, &cfg, false)?.final_point)
}

/// Evaluates `task(rep, seed)` for every repetition, in parallel, with
/// `seed = derive_seed(master_seed, rep)`. Output order follows `rep`.
pub fn run_reps<T, F>(reps: u64, master_seed: u64, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|rep| task(rep, derive_seed(master_seed, rep)))
        .collect()
}

/// Statistics over the uncapped runs of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary<P = BitString> {
    pub reps: u64,
    pub capped: u64,
    pub mean: f64,
    /// Sample standard deviation (zero for a single run).
    pub sd: f64,
    pub std_error: f64,
    pub ci_halfwidth: f64,
    pub median: f64,
    /// False when every run hit the iteration cap.
    pub valid: bool,
    pub records: Vec<RunRecord<P>>,
}

impl<P> BatchSummary<P> {
    pub fn from_records(records: Vec<RunRecord<P>>) -> Self {
        let times: Vec<f64> = records
            .iter()
            .filter(|r| !r.capped)
            .map(|r| r.optimization_time as f64)
            .collect();
        let m: Moments = times.iter().copied().collect();
        let valid = !times.is_empty();
        Self {
            reps: records.len() as u64,
            capped: records.iter().filter(|r| r.capped).count() as u64,
            mean: if valid { m.mean() } else { f64::NAN },
            sd: m.sd(),
            std_error: m.std_error(),
            ci_halfwidth: m.ci_halfwidth(),
            median: median(&times).unwrap_or(f64::NAN),
            valid,
            records,
        }
    }

    pub fn times(&self) -> impl Iterator<Item = u64> + '_ {
        self.records.iter().map(|r| r.optimization_time)
    }
}

/// `reps` independent runs; run `i` uses seed `derive_seed(config.seed, i)`.
pub fn run_batch(f: &dyn FitnessOracle, config: &RunConfig, reps: u64) -> Result<BatchSummary> {
    if reps == 0 {
        return Err(invalid("reps must be at least 1"));
    }
    config.validate(f)?;
    let records = run_reps(reps, config.seed, |_, seed| {
        run(f, &config.clone().with_seed(seed))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(BatchSummary::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{LinearFunction, Potential};

    #[test]
    fn onemax_single_bit_expected_time() {
        // T = 0 with probability 1/2, otherwise the forced flip finishes in one step.
        let f = LinearFunction::onemax(1).unwrap();
        let s = run_batch(&f, &RunConfig::new(1, 123), 100_000).unwrap();
        assert_eq!(s.capped, 0);
        assert!(s.times().all(|t| t <= 1));
        assert!((s.mean - 0.5).abs() < 3.0 * s.std_error, "mean {}", s.mean);
    }

    #[test]
    fn optimal_start_takes_no_time() {
        let f = LinearFunction::onemax(30).unwrap();
        let cfg = RunConfig::new(30, 1).with_init(Init::Explicit(BitString::zeros(30)));
        let r = run(&f, &cfg).unwrap();
        assert_eq!(r.optimization_time, 0);
        assert_eq!(r.evaluations, 1);
        assert!(!r.capped);
    }

    #[test]
    fn optimum_is_absorbing_under_step() {
        let f = LinearFunction::onemax(8).unwrap();
        let x = BitString::zeros(8);
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            assert_eq!(step(&x, &f, &mut rng), x);
        }
    }

    #[test]
    fn single_rep_summary() {
        let f = LinearFunction::onemax(20).unwrap();
        let s = run_batch(&f, &RunConfig::new(20, 5), 1).unwrap();
        assert_eq!(s.mean, s.records[0].optimization_time as f64);
        assert_eq!(s.sd, 0.0);
        assert!(s.valid);
    }

    #[test]
    fn batches_are_deterministic() {
        let f = LinearFunction::binval(40).unwrap();
        let cfg = RunConfig::new(40, 77);
        let a = run_batch(&f, &cfg, 64).unwrap();
        let b = run_batch(&f, &cfg, 64).unwrap();
        assert_eq!(a, b);
        let solo = run(&f, &cfg.clone().with_seed(derive_seed(77, 5))).unwrap();
        assert_eq!(solo, a.records[5]);
    }

    #[test]
    fn all_capped_is_invalid() {
        let f = LinearFunction::onemax(200).unwrap();
        let cfg = RunConfig::new(200, 2)
            .with_max_iters(1)
            .with_init(Init::Explicit(BitString::ones(200)));
        let s = run_batch(&f, &cfg, 3).unwrap();
        assert_eq!(s.capped, 3);
        assert!(!s.valid);
        assert!(s.records.iter().all(|r| r.capped && r.optimization_time == 1));
    }

    #[test]
    fn fitness_never_increases() {
        let f = LinearFunction::binval(25).unwrap();
        let cfg = RunConfig::new(25, 9).with_potential(Potential::Identity(f.clone()).as_fn());
        for seed in 0..20 {
            let r = run(&f, &cfg.clone().with_seed(seed)).unwrap();
            let trace = r.trace.unwrap();
            assert!(trace.values().windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(trace.values().len() as u64, r.optimization_time + 1);
            assert!(f.eval(&r.final_point).unwrap() == 0.0);
        }
    }

    #[test]
    fn strided_trace_keeps_endpoints() {
        let f = LinearFunction::onemax(30).unwrap();
        let cfg = RunConfig::new(30, 4)
            .with_potential(Potential::OneMax.as_fn())
            .with_stride(10);
        let r = run(&f, &cfg).unwrap();
        let trace = r.trace.unwrap();
        let expected = r.optimization_time / 10 + 1 + u64::from(r.optimization_time % 10 != 0);
        assert_eq!(trace.values().len() as u64, expected);
        assert_eq!(*trace.values().last().unwrap(), 0.0);
    }

    #[test]
    fn config_validation() {
        let f = LinearFunction::onemax(5).unwrap();
        assert!(run(&f, &RunConfig::new(6, 0)).is_err());
        assert!(run(&f, &RunConfig::new(5, 0).with_max_iters(0)).is_err());
        assert!(run(&f, &RunConfig::new(5, 0).with_stride(0)).is_err());
        assert!(run(&f, &RunConfig::new(5, 0).with_init(Init::Explicit(BitString::zeros(4)))).is_err());
        assert!(run_batch(&f, &RunConfig::new(5, 0), 0).is_err());
    }

    #[test]
    fn state_at_zero_is_the_initial_point() {
        let f = LinearFunction::binval(16).unwrap();
        let cfg = RunConfig::new(16, 31).with_potential(Potential::OneMax.as_fn());
        let x0 = state_at(&f, &cfg, 0).unwrap();
        let r = run(&f, &cfg).unwrap();
        assert_eq!(r.trace.unwrap().values()[0], x0.count_ones() as f64);
    }

    #[test]
    fn default_cap_formula() {
        assert_eq!(default_max_iters(1), (100.0 * std::f64::consts::E * 3f64.ln()).ceil() as u64);
        assert!(default_max_iters(100) > 30 * 1336);
    }
}
