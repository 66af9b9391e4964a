use crate::ea::BitString;
use crate::rng::Rng;

/// A black-box pseudo-Boolean function to be minimised.
///
/// Implementations are deterministic and immutable, so one oracle can be
/// shared by all repetitions of a batch.
pub trait FitnessOracle: Send + Sync {
    /// Length of the search points.
    fn len(&self) -> usize;

    fn evaluate(&self, x: &BitString) -> f64;

    /// The known minimum, used only to stop a run.
    fn optimum_value(&self) -> f64;

    fn description(&self) -> String;

    /// `f(offspring) - f(parent)` where the parent is `offspring` with the
    /// `flipped` positions toggled back.
    ///
    /// Override when the difference is cheaper (or more exact) to compute
    /// from the flipped positions alone.
    fn difference(&self, offspring: &BitString, flipped: &[usize]) -> f64 {
        let mut parent = offspring.clone();
        parent.flip_all(flipped);
        self.evaluate(offspring) - self.evaluate(&parent)
    }

    /// Whether `x`, whose fitness is `value`, is optimal.
    fn is_optimal(&self, _x: &BitString, value: f64) -> bool {
        value <= self.optimum_value()
    }

    /// Starting point of a run; uniform by default.
    fn initial_point(&self, rng: &mut Rng) -> BitString {
        BitString::random(self.len(), rng)
    }
}
