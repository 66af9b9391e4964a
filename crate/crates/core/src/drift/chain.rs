//! Homogeneous absorbing Markov chains and their exact hitting times.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::stats::{CompensatedSum, Moments};

/// Largest chain accepted by [`ideal_potential`].
pub const DEFAULT_STATE_CAP: usize = 10_000;

const ROW_SUM_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingChain {
    transition: Vec<Vec<f64>>,
    absorbing: Vec<bool>,
}

impl AbsorbingChain {
    /// Validates and builds a chain.
    ///
    /// Rows must be stochastic, absorbing states must loop onto themselves
    /// with probability one, and every transient state must reach some
    /// absorbing state.
    pub fn new(transition: Vec<Vec<f64>>, absorbing: &[usize]) -> Result<Self> {
        let k = transition.len();
        if k == 0 {
            return Err(Error::InvalidChain("chain has no states".into()));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidChain(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            if let Some(p) = row.iter().find(|p| !(p.is_finite() && (0.0..=1.0).contains(*p))) {
                return Err(Error::InvalidChain(format!("row {i} has invalid probability {p}")));
            }
            let sum: f64 = row.iter().copied().collect::<CompensatedSum>().value();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChain(format!("row {i} sums to {sum}")));
            }
        }
        if absorbing.is_empty() {
            return Err(Error::InvalidChain("no absorbing state".into()));
        }
        let mut is_absorbing = vec![false; k];
        for &a in absorbing {
            if a >= k {
                return Err(Error::InvalidChain(format!("absorbing index {a} out of range")));
            }
            if (transition[a][a] - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChain(format!(
                    "absorbing state {a} has self-transition {}",
                    transition[a][a]
                )));
            }
            is_absorbing[a] = true;
        }

        // Backward search from the absorbing set.
        let mut reaches = is_absorbing.clone();
        let mut queue: VecDeque<usize> = absorbing.iter().copied().collect();
        while let Some(t) = queue.pop_front() {
            for s in 0..k {
                if !reaches[s] && transition[s][t] > 0.0 {
                    reaches[s] = true;
                    queue.push_back(s);
                }
            }
        }
        if let Some(s) = reaches.iter().position(|r| !r) {
            return Err(Error::InvalidChain(format!("state {s} cannot reach an absorbing state")));
        }

        Ok(Self {
            transition,
            absorbing: is_absorbing,
        })
    }

    /// Parses the text format: state count, absorbing indices, then one row
    /// of probabilities per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, message: String| Error::Parse { line, message };

        let (line, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing state count".into()))?;
        let k: usize = first
            .parse()
            .map_err(|e| parse_err(line, format!("bad state count: {e}")))?;

        let (line, second) = lines
            .next()
            .ok_or_else(|| parse_err(line + 1, "missing absorbing indices".into()))?;
        let absorbing = second
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(line, format!("bad absorbing index: {e}")))?;

        let mut rows = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, text) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("expected {k} transition rows")))?;
            let row = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_err(line, format!("bad probability: {e}")))?;
            rows.push(row);
        }
        if let Some((line, _)) = lines.next() {
            return Err(parse_err(line, "trailing content after transition rows".into()));
        }
        Self::new(rows, &absorbing)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.state_count());
        let abs: Vec<String> = self.absorbing_states().map(|a| a.to_string()).collect();
        out.push_str(&abs.join(" "));
        out.push('\n');
        for row in &self.transition {
            let cells: Vec<String> = row.iter().map(|p| format!("{p:?}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// A random chain on `states` states whose last `absorbing` states are
    /// absorbing. Each transient row spreads its mass over a random subset
    /// of states and always keeps some mass on an absorbing state.
    pub fn random(states: usize, absorbing: usize, rng: &mut Rng) -> Result<Self> {
        if absorbing == 0 || absorbing > states {
            return Err(Error::InvalidChain(format!(
                "need 1..={states} absorbing states, got {absorbing}"
            )));
        }
        let first_absorbing = states - absorbing;
        let mut rows = vec![vec![0.0; states]; states];
        for (s, row) in rows.iter_mut().enumerate() {
            if s >= first_absorbing {
                row[s] = 1.0;
                continue;
            }
            for p in row.iter_mut() {
                if rng.random_bool(0.3) {
                    *p = rng.random::<f64>();
                }
            }
            let exit = first_absorbing + rng.random_range(0..absorbing);
            row[exit] += 0.05 + 0.2 * rng.random::<f64>();
            let total: f64 = row.iter().sum();
            for p in row.iter_mut() {
                *p /= total;
            }
            // Push the rounding error of the normalisation onto the exit entry.
            let drift: f64 = row.iter().copied().collect::<CompensatedSum>().value() - 1.0;
            row[exit] -= drift;
        }
        let absorbing: Vec<usize> = (first_absorbing..states).collect();
        Self::new(rows, &absorbing)
    }

    pub fn state_count(&self) -> usize {
        self.transition.len()
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.transition[from][to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.transition[from]
    }

    pub fn is_absorbing(&self, s: usize) -> bool {
        self.absorbing[s]
    }

    pub fn absorbing_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.state_count()).filter(|&s| self.absorbing[s])
    }

    pub fn transient_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.state_count()).filter(|&s| !self.absorbing[s])
    }

    /// Inverse-CDF sampler over the rows.
    pub fn sampler(&self) -> ChainSampler {
        let cumulative = self
            .transition
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                row.iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect()
            })
            .collect();
        ChainSampler {
            cumulative,
            absorbing: self.absorbing.clone(),
        }
    }
}

/// Precomputed cumulative rows for simulating a chain.
#[derive(Debug, Clone)]
pub struct ChainSampler {
    cumulative: Vec<Vec<f64>>,
    absorbing: Vec<bool>,
}

impl ChainSampler {
    pub fn next_state(&self, from: usize, rng: &mut Rng) -> usize {
        let row = &self.cumulative[from];
        let u = rng.random::<f64>() * row[row.len() - 1];
        row.partition_point(|&c| c <= u).min(row.len() - 1)
    }

    /// Steps until absorption, or `None` after `max_steps` steps.
    pub fn hitting_time(&self, start: usize, rng: &mut Rng, max_steps: u64) -> Option<u64> {
        let mut s = start;
        let mut t = 0;
        while !self.absorbing[s] {
            if t == max_steps {
                return None;
            }
            s = self.next_state(s, rng);
            t += 1;
        }
        Some(t)
    }
}

/// Monte-Carlo estimate of the hitting time from `start` over `runs`
/// independent runs. Runs that exceed `max_steps` are dropped and counted in
/// the second component.
pub fn monte_carlo_hitting_time(
    chain: &AbsorbingChain,
    start: usize,
    runs: u64,
    seed: u64,
    max_steps: u64,
) -> (Moments, u64) {
    use rayon::prelude::*;

    const CHUNK: u64 = 4096;
    let sampler = chain.sampler();
    let chunks = runs.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from_seed(derive_seed(seed, c));
            let mut m = Moments::new();
            let mut capped = 0;
            let len = CHUNK.min(runs - c * CHUNK);
            for _ in 0..len {
                match sampler.hitting_time(start, &mut rng, max_steps) {
                    Some(t) => m.push(t as f64),
                    None => capped += 1,
                }
            }
            (m, capped)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((Moments::new(), 0), |(mut acc, cap), (m, c)| {
            acc.merge(&m);
            (acc, cap + c)
        })
}

/// Expected hitting time of the absorbing set from every state.
pub fn ideal_potential(chain: &AbsorbingChain) -> Result<Vec<f64>> {
    ideal_potential_with_cap(chain, DEFAULT_STATE_CAP)
}

/// Solves `mu = 1 + Q mu` on the transient states (`Q` the transient block)
/// by LU decomposition with one round of iterative refinement. Absorbing
/// states get zero.
pub fn ideal_potential_with_cap(chain: &AbsorbingChain, cap: usize) -> Result<Vec<f64>> {
    let k = chain.state_count();
    if k > cap {
        return Err(Error::TooLarge(format!("{k} states exceed the cap of {cap}")));
    }
    let transient: Vec<usize> = chain.transient_states().collect();
    let mut potential = vec![0.0; k];
    if transient.is_empty() {
        return Ok(potential);
    }
    let t = transient.len();
    let system = DMatrix::from_fn(t, t, |r, c| {
        let identity = if r == c { 1.0 } else { 0.0 };
        identity - chain.probability(transient[r], transient[c])
    });
    let ones = DVector::from_element(t, 1.0);
    let lu = system.clone().lu();
    let mut mu = lu
        .solve(&ones)
        .ok_or(Error::SingularSystem { residual: f64::INFINITY })?;
    let correction = lu
        .solve(&(&ones - &system * &mu))
        .ok_or(Error::SingularSystem { residual: f64::INFINITY })?;
    mu += correction;

    for (i, &s) in transient.iter().enumerate() {
        potential[s] = mu[i];
    }
    let residual = verify_unit_drift(chain, &potential)?;
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::SingularSystem { residual });
    }
    Ok(potential)
}

/// Largest deviation from unit drift over the transient states:
/// `max_s |g(s) - (1 + sum_s' P(s, s') g(s'))|`.
pub fn verify_unit_drift(chain: &AbsorbingChain, potential: &[f64]) -> Result<f64> {
    let k = chain.state_count();
    if potential.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: potential.len(),
        });
    }
    let worst = chain
        .transient_states()
        .map(|s| {
            let mut next = CompensatedSum::new();
            next.add(1.0);
            for (p, g) in chain.row(s).iter().zip(potential) {
                next.add(p * g);
            }
            (potential[s] - next.value()).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forced_step() -> AbsorbingChain {
        AbsorbingChain::new(vec![vec![0.0, 1.0], vec![0.0, 1.0]], &[1]).unwrap()
    }

    #[test]
    fn one_forced_step() {
        assert_eq!(ideal_potential(&forced_step()).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn geometric_self_loop() {
        let chain = AbsorbingChain::new(vec![vec![0.5, 0.5], vec![0.0, 1.0]], &[1]).unwrap();
        let mu = ideal_potential(&chain).unwrap();
        assert!((mu[0] - 2.0).abs() < 1e-12);
        assert_eq!(mu[1], 0.0);
    }

    #[test]
    fn rejects_bad_rows() {
        let err = AbsorbingChain::new(vec![vec![0.5, 0.4], vec![0.0, 1.0]], &[1]).unwrap_err();
        assert!(matches!(err, Error::InvalidChain(_)));
        let err = AbsorbingChain::new(vec![vec![1.5, -0.5], vec![0.0, 1.0]], &[1]).unwrap_err();
        assert!(matches!(err, Error::InvalidChain(_)));
    }

    #[test]
    fn rejects_leaky_absorbing_state() {
        let err = AbsorbingChain::new(vec![vec![0.0, 1.0], vec![0.5, 0.5]], &[1]).unwrap_err();
        assert!(matches!(err, Error::InvalidChain(_)));
    }

    #[test]
    fn rejects_unreachable_absorption() {
        // States 0 and 1 swap forever.
        let rows = vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert!(AbsorbingChain::new(rows, &[2]).is_err());
    }

    #[test]
    fn zero_potential_deviates_by_one() {
        let chain = forced_step();
        assert_eq!(verify_unit_drift(&chain, &[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch() {
        let chain = forced_step();
        assert!(matches!(
            verify_unit_drift(&chain, &[0.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn doubled_potential_deviates_by_one_everywhere() {
        let mut rng = rng_from_seed(5);
        let chain = AbsorbingChain::random(12, 2, &mut rng).unwrap();
        let mu = ideal_potential(&chain).unwrap();
        let doubled: Vec<f64> = mu.iter().map(|m| 2.0 * m).collect();
        let dev = verify_unit_drift(&chain, &doubled).unwrap();
        assert!((dev - 1.0).abs() < 1e-9, "deviation {dev}");
    }

    #[test]
    fn ideal_potential_positive_exactly_on_transient_states() {
        let mut rng = rng_from_seed(11);
        for _ in 0..10 {
            let chain = AbsorbingChain::random(25, 3, &mut rng).unwrap();
            let mu = ideal_potential(&chain).unwrap();
            for s in 0..chain.state_count() {
                if chain.is_absorbing(s) {
                    assert_eq!(mu[s], 0.0);
                } else {
                    assert!(mu[s] > 0.0);
                }
            }
        }
    }

    #[test]
    fn state_cap() {
        let chain = forced_step();
        assert!(matches!(ideal_potential_with_cap(&chain, 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn text_round_trip() {
        let mut rng = rng_from_seed(3);
        let chain = AbsorbingChain::random(6, 2, &mut rng).unwrap();
        let parsed = AbsorbingChain::parse(&chain.to_text()).unwrap();
        assert_eq!(parsed, chain);
    }

    #[test]
    fn parse_example_file() {
        let text = "3\n2\n0.5 0.25 0.25\n0 0.5 0.5\n0 0 1\n";
        let chain = AbsorbingChain::parse(text).unwrap();
        let mu = ideal_potential(&chain).unwrap();
        // mu1 = 2, mu0 = (1 + 0.25*2)/0.5 = 3
        assert!((mu[1] - 2.0).abs() < 1e-12);
        assert!((mu[0] - 3.0).abs() < 1e-12);
        assert!(AbsorbingChain::parse("2\n1\n0.5 0.5\n").is_err());
        assert!(AbsorbingChain::parse("x\n").is_err());
    }

    #[test]
    fn monte_carlo_agrees_on_small_chain() {
        let chain = AbsorbingChain::new(vec![vec![0.75, 0.25], vec![0.0, 1.0]], &[1]).unwrap();
        let (m, capped) = monte_carlo_hitting_time(&chain, 0, 20_000, 1, 10_000);
        assert_eq!(capped, 0);
        assert!((m.mean() - 4.0).abs() < 3.0 * m.std_error());
    }
}
