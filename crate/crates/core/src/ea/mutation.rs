use rand_distr::{Distribution, Geometric};

use crate::ea::BitString;
use crate::rng::Rng;

/// Standard bit mutation with rate `1/n`.
///
/// Flip positions are produced by geometric skipping: the gap to the next
/// flipped position is the number of failures before a success in Bernoulli
/// trials with parameter `1/n`. This yields exactly the distribution of
/// independent per-bit flips while costing time proportional to the number
/// of flips.
#[derive(Debug, Clone)]
pub struct Mutator {
    n: usize,
    gap: Geometric,
}

impl Mutator {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let gap = Geometric::new(1.0 / n as f64).expect("1/n is a valid probability");
        Self { n, gap }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes the sorted flip positions of one mutation into `out`.
    pub fn sample_positions(&self, rng: &mut Rng, out: &mut Vec<usize>) {
        out.clear();
        let mut pos: u64 = 0;
        let n = self.n as u64;
        loop {
            pos = pos.saturating_add(self.gap.sample(rng));
            if pos >= n {
                break;
            }
            out.push(pos as usize);
            pos += 1;
        }
    }
}

/// Returns a copy of `x` with every bit flipped independently with
/// probability `1/n`.
pub fn mutate(x: &BitString, rng: &mut Rng) -> BitString {
    let m = Mutator::new(x.len());
    let mut flips = Vec::new();
    m.sample_positions(rng, &mut flips);
    let mut y = x.clone();
    y.flip_all(&flips);
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn single_bit_always_flips() {
        let mut rng = rng_from_seed(1);
        let x = BitString::zeros(1);
        for _ in 0..100 {
            assert_eq!(mutate(&x, &mut rng).count_ones(), 1);
        }
    }

    #[test]
    fn unchanged_probability_n4() {
        // P[y = x] = (3/4)^4
        let exact = 0.316_406_25;
        let mut rng = rng_from_seed(2);
        let m = Mutator::new(4);
        let mut flips = Vec::new();
        let trials = 200_000;
        let mut same = 0;
        for _ in 0..trials {
            m.sample_positions(&mut rng, &mut flips);
            if flips.is_empty() {
                same += 1;
            }
        }
        let p = same as f64 / trials as f64;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((p - exact).abs() < 4.0 * se, "p={p}");
    }

    #[test]
    fn mean_flip_count_is_one() {
        let mut rng = rng_from_seed(3);
        for n in [2usize, 7, 100, 1000] {
            let m = Mutator::new(n);
            let mut flips = Vec::new();
            let trials = 50_000;
            let mut total = 0usize;
            for _ in 0..trials {
                m.sample_positions(&mut rng, &mut flips);
                assert!(flips.windows(2).all(|w| w[0] < w[1]));
                assert!(flips.iter().all(|&i| i < n));
                total += flips.len();
            }
            let mean = total as f64 / trials as f64;
            let sd = (1.0 - 1.0 / n as f64).sqrt();
            assert!((mean - 1.0).abs() < 4.0 * sd / (trials as f64).sqrt(), "n={n} mean={mean}");
        }
    }
}
