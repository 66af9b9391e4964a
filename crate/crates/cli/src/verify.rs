//! Named verification suites. Every suite lists each inequality it checks
//! with the measured and the required value.

use std::f64::consts::E;
use std::fmt::Write as _;

use driftlab::combinatorial::{
    dijkstra, euler_bound, euler_surrogate_hitting_time, mst_bound, mst_drift_check, mst_fitness,
    mst_run, sssp_bound, sssp_drift_check, sssp_run, MstProblem, SsspConfig, SsspProblem,
    WeightedGraph,
};
use driftlab::drift::{
    ideal_potential, monte_carlo_hitting_time, multiplicative_bound, synthetic_hitting_time,
    verify_unit_drift, AbsorbingChain, BoundSpec,
};
use driftlab::ea::{run_batch, BitString, Mutator, RunConfig};
use driftlab::linear::{
    exact_pointwise_drift, lemma3_exhaustive_check, lemma4_mc_check, lemma5_monotonicity_check,
    ordering_test, random_linear, theorem5_bit_probability_check, FunctionSelection, LevelStatus,
    LinearFunction, Potential,
};
use driftlab::rng::{derive_seed, rng_from_seed};
use driftlab::stats::{chi_square_gof, Moments};
use serde_json::{json, Value};

use crate::sweep::Preset;
use crate::{num, status, CliError, CliResult, Report};

pub const SUITES: [&str; 14] = [
    "theorem2-synthetic",
    "lemma1",
    "lemma3",
    "binval-corner",
    "lemma5",
    "onemax-runtime",
    "linear-runtime",
    "ordering",
    "lemma4-theorem5",
    "mst",
    "sssp",
    "sssp-drift",
    "euler",
    "mutation",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub label: String,
    pub measured: f64,
    pub relation: &'static str,
    pub required: f64,
    pub passed: bool,
    /// Reported, but not counted towards the verdict.
    pub diagnostic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suites: Vec<&'static str>,
    pub checks: Vec<Check>,
}

struct Checks {
    suite: &'static str,
    out: Vec<Check>,
}

impl Checks {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            out: Vec::new(),
        }
    }

    fn push(&mut self, label: impl Into<String>, measured: f64, relation: &'static str, required: f64) {
        let passed = match relation {
            "<=" => measured <= required,
            ">=" => measured >= required,
            "==" => measured == required,
            _ => unreachable!("unknown relation {relation}"),
        };
        self.out.push(Check {
            suite: self.suite,
            label: label.into(),
            measured,
            relation,
            required,
            passed,
            diagnostic: false,
        });
    }

    fn diagnostic(&mut self, label: impl Into<String>, measured: f64, relation: &'static str, required: f64) {
        self.push(label, measured, relation, required);
        self.out.last_mut().expect("just pushed").diagnostic = true;
    }
}

/// Large sizes under [`Preset::Paper`], reduced ones under [`Preset::Quick`].
fn pick<T>(preset: Preset, quick: T, full: T) -> T {
    match preset {
        Preset::Quick => quick,
        Preset::Paper => full,
    }
}

/// Runs one or more suites by name (`all` selects every suite).
pub fn cmd_verify(name: &str, preset: Preset, seed: u64) -> CliResult<SuiteReport> {
    let suites: Vec<&'static str> = if name == "all" {
        SUITES.to_vec()
    } else {
        vec![SUITES
            .iter()
            .copied()
            .find(|s| *s == name)
            .ok_or_else(|| {
                CliError::Config(format!("unknown suite {name:?}; known: all, {}", SUITES.join(", ")))
            })?]
    };
    let mut checks = Vec::new();
    for (i, suite) in suites.iter().enumerate() {
        let s = derive_seed(seed, i as u64);
        let mut c = Checks::new(suite);
        match *suite {
            "theorem2-synthetic" => synthetic(&mut c, preset, s)?,
            "lemma1" => chains(&mut c, preset, s)?,
            "lemma3" => weighted_potential(&mut c, s)?,
            "binval-corner" => binval_corner(&mut c)?,
            "lemma5" => level_monotonicity(&mut c)?,
            "onemax-runtime" => onemax_runtime(&mut c, preset, s)?,
            "linear-runtime" => linear_runtime(&mut c, preset, s)?,
            "ordering" => ordering(&mut c, preset, s)?,
            "lemma4-theorem5" => binval_levels(&mut c, preset, s)?,
            "mst" => mst(&mut c, preset, s)?,
            "sssp" => sssp(&mut c, preset, s)?,
            "euler" => euler(&mut c, preset, s)?,
            "mutation" => mutation(&mut c, preset, s),
            "sssp-drift" => sssp_drift(&mut c, preset, s)?,
            _ => unreachable!(),
        }
        checks.extend(c.out);
    }
    Ok(SuiteReport { suites, checks })
}

fn synthetic(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let (s0, delta) = (1000u64, 0.001);
    let runs = pick(preset, 2_000u64, 10_000);
    let exact: f64 = (1..=s0).map(|s| 1.0 / (delta * s as f64)).sum();
    let bound = multiplicative_bound(&BoundSpec::new(delta, s0 as f64, 1.0)?);
    let mut rng = rng_from_seed(seed);
    let mut m = Moments::new();
    for _ in 0..runs {
        m.push(synthetic_hitting_time(s0, delta, &mut rng)? as f64);
    }
    let se = m.std_error();
    c.push("|mean T - harmonic sum| / SE", (m.mean() - exact).abs() / se, "<=", 3.0);
    c.push("mean T - 3 SE", m.mean() - 3.0 * se, "<=", bound);
    Ok(())
}

fn chains(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let count = pick(preset, 5u64, 20);
    let runs = pick(preset, 10_000u64, 100_000);
    let mut worst_residual: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    for i in 0..count {
        let mut rng = rng_from_seed(derive_seed(seed, i));
        let chain = AbsorbingChain::random(30, 3, &mut rng)?;
        let mu = ideal_potential(&chain)?;
        worst_residual = worst_residual.max(verify_unit_drift(&chain, &mu)?);
        let (m, capped) = monte_carlo_hitting_time(&chain, 0, runs, derive_seed(seed, 1000 + i), u64::MAX);
        if capped > 0 {
            return Err(CliError::Config("chain simulation hit its step cap".into()));
        }
        worst_z = worst_z.max((m.mean() - mu[0]).abs() / m.std_error());
    }
    c.push("max unit-drift residual of the solved potential", worst_residual, "<=", 1e-9);
    c.push("max |MC mean - solved| / SE over chains", worst_z, "<=", 3.0);
    Ok(())
}

fn weighted_potential(c: &mut Checks, seed: u64) -> CliResult<()> {
    let n = 10;
    let mut fs = vec![
        ("onemax".to_string(), LinearFunction::onemax(n)?),
        ("binval".to_string(), LinearFunction::binval(n)?),
    ];
    let mut rng = rng_from_seed(seed);
    for i in 0..5 {
        fs.push((format!("random #{i}"), random_linear(n, &mut rng)?));
    }
    for (name, f) in fs {
        let r = lemma3_exhaustive_check(&f)?;
        c.push(format!("{name}: min drift * 4en / g over all points"), r.worst_ratio, ">=", 1.0);
    }
    Ok(())
}

fn binval_corner(c: &mut Checks) -> CliResult<()> {
    for n in [4, 8, 16] {
        let f = LinearFunction::binval(n)?;
        let mut x = BitString::zeros(n);
        x.set(n - 1, true);
        let d = exact_pointwise_drift(&f, &Potential::OneMax, &x)?;
        let target = 1.0 / (n * n) as f64;
        c.push(format!("n={n}: |onemax drift - 1/n^2|"), (d - target).abs(), "<=", 1e-12);
    }
    Ok(())
}

fn level_monotonicity(c: &mut Checks) -> CliResult<()> {
    let r = lemma5_monotonicity_check(12)?;
    let diff = r.max_enumeration_diff.unwrap_or(f64::INFINITY);
    c.push("n=12: max |closed form - enumeration|", diff, "<=", 1e-12);
    c.push("n=12: tightest P(k,j) - P(k',j)", r.tightest_margin, ">=", 0.0);
    c.push("n=12: monotone", f64::from(u8::from(r.monotone)), "==", 1.0);
    Ok(())
}

fn onemax_runtime(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let n = 100;
    let f = LinearFunction::onemax(n)?;
    let s = run_batch(&f, &RunConfig::new(n, seed), pick(preset, 200, 1000))?;
    let nf = n as f64;
    c.push("n=100: mean T", s.mean, ">=", 0.5 * E * nf * nf.ln());
    c.push("n=100: mean T", s.mean, "<=", E * nf * (1.0 + (nf / 2.0).ln()));
    if preset == Preset::Paper {
        let n = 500;
        let f = LinearFunction::onemax(n)?;
        let s = run_batch(&f, &RunConfig::new(n, derive_seed(seed, 1)), 200)?;
        let nf = n as f64;
        c.push("n=500: mean T", s.mean, "<=", E * nf * (1.0 + (nf / 2.0).ln()));
    }
    Ok(())
}

fn linear_runtime(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let reps = pick(preset, 50, 200);
    let ns: &[usize] = pick(preset, &[100], &[100, 500]);
    for (k, &n) in ns.iter().enumerate() {
        let nf = n as f64;
        let limit = 1.25 * E / (E - 2.0) * nf * nf.ln();
        let mut rng = rng_from_seed(derive_seed(seed, k as u64));
        let mut fs = vec![("binval".to_string(), LinearFunction::binval(n)?)];
        for i in 0..5 {
            fs.push((format!("random #{i}"), random_linear(n, &mut rng)?));
        }
        for (i, (name, f)) in fs.iter().enumerate() {
            let cfg = RunConfig::new(n, derive_seed(seed, 100 + (k * 10 + i) as u64));
            let s = run_batch(f, &cfg, reps)?;
            c.push(format!("n={n} {name}: mean T"), s.mean, "<=", limit);
        }
    }
    Ok(())
}

fn ordering(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let r = ordering_test(100, pick(preset, 300, 1000), &FunctionSelection::BinVal, seed)?;
    c.push("binval vs onemax at n=100: one-sided p", r.one_sided_p, "<=", 0.05);
    c.push("relative gap", r.relative_gap, ">=", 0.0);
    c.push("relative gap", r.relative_gap, "<=", 0.2);
    Ok(())
}

fn binval_levels(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let f = LinearFunction::binval(50)?;
    let reps = pick(preset, 1000, 2000);
    let r = lemma4_mc_check(&f, reps, seed, 500)?;
    let failed = r.levels.iter().filter(|l| l.status == LevelStatus::Failed).count();
    let worst = r
        .tested()
        .map(|l| (l.estimate.mean_decrease + 2.0 * l.estimate.ci_halfwidth) / l.bound)
        .fold(f64::INFINITY, f64::min);
    c.push("onemax drift under binval: levels failing", failed as f64, "==", 0.0);
    c.push("min (mean + 2 CI) / bound over tested levels", worst, ">=", 1.0);
    let t5 = theorem5_bit_probability_check(&f, 100, reps, derive_seed(seed, 1))?;
    c.push(
        "bit-zero probability order violations at t=100",
        t5.violations.len() as f64,
        "==",
        0.0,
    );
    Ok(())
}

fn mst(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let graphs = pick(preset, 3u64, 10);
    let bound = mst_bound(30, 10)?;
    for i in 0..graphs {
        let mut rng = rng_from_seed(derive_seed(seed, i));
        let g = WeightedGraph::random_connected(10, 30, 10, &mut rng)?;
        let p = MstProblem::new(g.clone())?;
        let outcomes = driftlab::ea::run_reps(100, derive_seed(seed, 100 + i), |_, s| mst_run(&p, &p.config(s)));
        let mut m = Moments::new();
        let mut wrong = 0;
        for r in outcomes {
            let r = r?;
            if !r.capped {
                m.push(r.optimization_time as f64);
                wrong += u64::from(mst_fitness(&r.final_point, &g) != p.w_opt() as f64);
            }
        }
        c.push(format!("graph {i}: runs not ending at w_opt"), wrong as f64, "==", 0.0);
        c.push(format!("graph {i}: mean T"), m.mean(), "<=", bound);
        let d = mst_drift_check(&p, 100, derive_seed(seed, 200 + i), 500)?;
        c.push(
            format!("graph {i}: levels below 1/(e m^2) drift"),
            d.check.violations.len() as f64,
            "==",
            0.0,
        );
    }
    Ok(())
}

fn sssp_instances(preset: Preset, seed: u64) -> CliResult<Vec<WeightedGraph>> {
    (0..pick(preset, 3u64, 10))
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i));
            Ok(WeightedGraph::random_reachable_digraph(10, 30, 10, 0, &mut rng)?)
        })
        .collect()
}

fn sssp(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let bound = sssp_bound(10, 10)?;
    for (i, g) in sssp_instances(preset, seed)?.iter().enumerate() {
        let p = SsspProblem::new(g, 0)?;
        let expected = dijkstra(g, 0)?;
        let outcomes = driftlab::ea::run_reps(100, derive_seed(seed, 100 + i as u64), |_, s| {
            sssp_run(&p, &SsspConfig::new(s))
        });
        let mut m = Moments::new();
        let mut wrong = 0;
        for r in outcomes {
            let r = r?;
            if !r.capped {
                m.push(r.optimization_time as f64);
                wrong += u64::from(p.path_weights(&r.final_point) != expected);
            }
        }
        c.push(format!("graph {i}: runs not matching dijkstra"), wrong as f64, "==", 0.0);
        c.push(format!("graph {i}: mean T"), m.mean(), "<=", bound);
    }
    Ok(())
}

fn sssp_drift(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    for (i, g) in sssp_instances(preset, seed)?.iter().enumerate() {
        let p = SsspProblem::new(g, 0)?;
        let r = sssp_drift_check(&p, 100, derive_seed(seed, 300 + i as u64), 500)?;
        c.diagnostic(
            format!("graph {i}: measured c in 1/(c n^3)"),
            r.measured_constant,
            "<=",
            3.0,
        );
    }
    Ok(())
}

fn euler(c: &mut Checks, preset: Preset, seed: u64) -> CliResult<()> {
    let m = 300;
    let runs = pick(preset, 2_000u64, 10_000);
    let mut rng = rng_from_seed(seed);
    let mut t = Moments::new();
    for _ in 0..runs {
        t.push(euler_surrogate_hitting_time(m, &mut rng)? as f64);
    }
    c.push("m=300: mean T - 3 SE", t.mean() - 3.0 * t.std_error(), "<=", euler_bound(m)?);
    Ok(())
}

fn mutation(c: &mut Checks, preset: Preset, seed: u64) {
    let n = 20;
    let samples = pick(preset, 200_000u64, 1_000_000);
    let mutator = Mutator::new(n);
    let mut rng = rng_from_seed(seed);
    let mut counts = vec![0u64; n + 1];
    let mut per_position = vec![0u64; n];
    let mut flips = Vec::new();
    for _ in 0..samples {
        mutator.sample_positions(&mut rng, &mut flips);
        counts[flips.len()] += 1;
        for &i in &flips {
            per_position[i] += 1;
        }
    }
    let p = 1.0 / n as f64;
    let probs: Vec<f64> = binomial_pmf(n, p);
    let test = chi_square_gof(&counts, &probs, 0.001);
    c.push("flip-count chi-square statistic", test.statistic, "<=", test.critical);
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    let worst = per_position
        .iter()
        .map(|&k| (k as f64 - samples as f64 * p).abs() / sigma)
        .fold(0.0, f64::max);
    c.push("max per-position |rate - 1/n| in sigmas", worst, "<=", 4.0);
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut coeff = 1.0;
    for k in 0..=n {
        if k > 0 {
            coeff *= (n - k + 1) as f64 / k as f64;
        }
        out.push(coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32));
    }
    out
}

fn fmt_value(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

impl Report for SuiteReport {
    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.diagnostic)
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for ch in &self.checks {
            let verdict = if ch.diagnostic {
                format!("{} (diagnostic)", status(ch.passed))
            } else {
                status(ch.passed).to_string()
            };
            let _ = writeln!(
                out,
                "[{}] {}: {} {} {}  {verdict}",
                ch.suite,
                ch.label,
                fmt_value(ch.measured),
                ch.relation,
                fmt_value(ch.required)
            );
        }
        let _ = writeln!(out, "{}", status(self.passed()));
        out
    }

    fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "suite": c.suite,
                    "label": c.label,
                    "measured": num(c.measured),
                    "relation": c.relation,
                    "required": num(c.required),
                    "passed": c.passed,
                    "diagnostic": c.diagnostic,
                })
            })
            .collect();
        json!({
            "command": "verify",
            "suites": self.suites,
            "checks": checks,
            "passed": self.passed(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_sums_to_one() {
        let s: f64 = binomial_pmf(20, 0.05).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_suites_pass() {
        for name in ["lemma3", "binval-corner", "lemma5"] {
            let r = cmd_verify(name, Preset::Quick, 42).unwrap();
            assert!(r.passed(), "{}", r.render());
        }
        assert!(cmd_verify("nope", Preset::Quick, 42).is_err());
    }
}
