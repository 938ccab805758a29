//! The 16-pattern click distribution over `(T_A, R_A, T_B, R_B)`.

use crate::error::{Error, Result};
use crate::modes::{ModeSet, Port};
use crate::scalar::Real;

/// Probabilities of all click patterns, indexed by the [`ModeSet`] of
/// detectors that clicked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution<T> {
    probs: [T; 16],
}

impl<T: Real> OutcomeDistribution<T> {
    /// Wraps raw pattern probabilities after checking that each lies in
    /// `[0, 1]` and that they sum to one (both up to [`Real::prob_slack`]).
    pub fn new(probs: [T; 16]) -> Result<Self> {
        let slack = T::prob_slack();
        for (bits, &p) in probs.iter().enumerate() {
            if !(p >= -slack && p <= T::one() + slack) {
                return Err(Error::Numerical(format!(
                    "click pattern {:04b} has probability {}",
                    bits, p
                )));
            }
        }
        let sum = probs.iter().fold(T::zero(), |a, &b| a + b);
        if (sum - T::one()).abs() > slack {
            return Err(Error::Consistency { sum: sum.as_f64() });
        }
        Ok(Self { probs })
    }

    /// Builds the pattern distribution from no-click weights `W(M)`, the
    /// expectation of the product of no-click POVM elements over ports `M`.
    /// Each pattern with click set `C` is
    /// `sum_{U subset C} (-1)^|U| W(U + complement(C))`.
    pub fn from_no_click_weights(weights: &[T; 16]) -> Result<Self> {
        let mut probs = [T::zero(); 16];
        for clicks in ModeSet::all() {
            let silent = clicks.complement();
            let mut p = T::zero();
            for u in clicks.subsets() {
                let w = weights[u.union(silent).bits() as usize];
                if u.len() % 2 == 0 {
                    p = p + w;
                } else {
                    p = p - w;
                }
            }
            probs[clicks.bits() as usize] = p;
        }
        Self::new(probs)
    }

    #[inline]
    pub fn get(&self, clicks: ModeSet) -> T {
        self.probs[clicks.bits() as usize]
    }

    /// Probability that exactly `ports` click.
    #[inline]
    pub fn exactly(&self, ports: &[Port]) -> T {
        self.get(ModeSet::of(ports))
    }

    pub fn probs(&self) -> &[T; 16] {
        &self.probs
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Probability that no detector clicks.
    pub fn no_click(&self) -> T {
        self.get(ModeSet::EMPTY)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeSet, T)> + '_ {
        ModeSet::all().map(move |m| (m, self.get(m)))
    }

    /// Maximum absolute pattern-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.probs
            .iter()
            .zip(other.probs.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_weights_give_certain_silence() {
        let w = [1.0_f64; 16];
        let d = OutcomeDistribution::from_no_click_weights(&w).unwrap();
        assert_eq!(d.no_click(), 1.0);
        assert_eq!(d.total(), 1.0);
    }

    #[test]
    fn independent_dark_counts() {
        // Vacuum with dark counts: W(M) = exp(-|M| nu), detectors independent.
        let nu: f64 = 0.3;
        let mut w = [0.0; 16];
        for m in ModeSet::all() {
            w[m.bits() as usize] = (-(m.len() as f64) * nu).exp();
        }
        let d = OutcomeDistribution::from_no_click_weights(&w).unwrap();
        let q = 1.0 - (-nu).exp();
        for (m, p) in d.iter() {
            let expect = q.powi(m.len() as i32) * (1.0 - q).powi(4 - m.len() as i32);
            assert!((p - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_negative_and_unnormalized() {
        let mut p = [0.0_f64; 16];
        p[0] = 1.0 + 1e-3;
        assert!(matches!(
            OutcomeDistribution::new(p),
            Err(Error::Numerical(_)) | Err(Error::Consistency { .. })
        ));
        let mut p = [0.0_f64; 16];
        p[0] = 1.5;
        p[1] = -0.5;
        assert!(matches!(OutcomeDistribution::new(p), Err(Error::Numerical(_))));
    }
}
