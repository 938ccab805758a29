//! Photon-pair source models.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Largest TMSV tail weight a fixed truncation may discard.
pub const MAX_TRUNCATION_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    /// `(|HH> + |VV>)/sqrt(2)`
    PhiPlus,
    /// `(|HV> - |VH>)/sqrt(2)`
    PsiMinus,
}

/// How the Fock engine truncates a two-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation<T> {
    /// Smallest pair cutoff whose discarded weight is below `tail`.
    Auto { tail: T },
    /// Explicit pair cutoff; rejected if it discards [`MAX_TRUNCATION_TAIL`] or more.
    Fixed(usize),
}

impl<T: Real> Default for Truncation<T> {
    fn default() -> Self {
        Truncation::Auto {
            tail: T::lit(MAX_TRUNCATION_TAIL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceModel<T> {
    IdealBell {
        which: BellState,
    },
    /// Phase-modified Bell state `(|HH> + e^{-i fss}|VV>)/sqrt(2)` mixed with
    /// white noise: `p |.><.| + (1-p)/4 I`.
    QuantumDot {
        fss_phase: T,
        p: T,
    },
    /// Polarization-entangled two-mode squeezed vacuum with squeezing `xi`.
    Spdc {
        xi: T,
        truncation: Truncation<T>,
    },
}

impl<T: Real> SourceModel<T> {
    pub fn phi_plus() -> Self {
        SourceModel::IdealBell {
            which: BellState::PhiPlus,
        }
    }

    pub fn quantum_dot(fss_phase: T, p: T) -> Result<Self> {
        let s = SourceModel::QuantumDot { fss_phase, p };
        s.validate()?;
        Ok(s)
    }

    pub fn spdc(xi: T) -> Result<Self> {
        let s = SourceModel::Spdc {
            xi,
            truncation: Truncation::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceModel::IdealBell { .. } => Ok(()),
            SourceModel::QuantumDot { fss_phase, p } => {
                if !fss_phase.is_finite() {
                    return Err(domain("fss", fss_phase.as_f64(), "must be finite"));
                }
                if !(p >= T::zero() && p <= T::one()) {
                    return Err(domain("p", p.as_f64(), "must lie in [0, 1]"));
                }
                Ok(())
            }
            SourceModel::Spdc { xi, truncation } => {
                if !(xi > T::zero() && xi.is_finite()) {
                    return Err(domain("xi", xi.as_f64(), "must be finite and > 0"));
                }
                match truncation {
                    Truncation::Auto { tail } if !(tail > T::zero() && tail < T::one()) => Err(
                        domain("truncation_tail", tail.as_f64(), "must lie in (0, 1)"),
                    ),
                    Truncation::Fixed(0) => Err(domain("n_max", 0.0, "must be >= 1")),
                    _ => Ok(()),
                }
            }
        }
    }

    /// True when click statistics depend on the analyzer angles only through
    /// `theta_a - theta_b` (the TMSV is invariant under a common rotation).
    pub fn difference_only(&self) -> bool {
        matches!(self, SourceModel::Spdc { .. })
    }
}

/// `tanh^2(xi)`, the geometric ratio of successive pair terms.
fn tmsv_ratio<T: Real>(xi: T) -> T {
    let t = xi.tanh();
    t * t
}

/// Normalized weight of the `n`-pair component, `(n+1) tanh^{2n} xi / cosh^4 xi`.
pub fn tmsv_pair_weight<T: Real>(xi: T, n: usize) -> T {
    let x = tmsv_ratio(xi);
    let one_minus = T::one() - x;
    T::from_usize_lossy(n + 1) * x.powi(n as i32) * one_minus * one_minus
}

/// Total weight of all components with more than `n_max` pairs.
pub fn tmsv_tail<T: Real>(xi: T, n_max: usize) -> T {
    let x = tmsv_ratio(xi);
    let n = T::from_usize_lossy(n_max);
    x.powi(n_max as i32 + 1) * (n + T::lit(2.0) - (n + T::one()) * x)
}

/// Smallest pair cutoff `n_max >= 1` with discarded weight below `tail`.
pub fn tmsv_cutoff<T: Real>(xi: T, tail: T) -> Result<usize> {
    if !(tail > T::zero()) {
        return Err(domain("truncation_tail", tail.as_f64(), "must be > 0"));
    }
    let mut n = 1usize;
    while tmsv_tail(xi, n) >= tail {
        n += 1;
        if n > 100_000 {
            return Err(Error::Numerical(format!(
                "no TMSV cutoff reaches tail {} at xi = {}",
                tail, xi
            )));
        }
    }
    Ok(n)
}

/// Resolves a truncation rule to a pair cutoff.
pub fn resolve_cutoff<T: Real>(xi: T, truncation: Truncation<T>) -> Result<usize> {
    match truncation {
        Truncation::Auto { tail } => tmsv_cutoff(xi, tail),
        Truncation::Fixed(n_max) => {
            let tail = tmsv_tail(xi, n_max);
            if tail >= T::lit(MAX_TRUNCATION_TAIL) {
                return Err(Error::Truncation {
                    n_max,
                    tail: tail.as_f64(),
                    limit: MAX_TRUNCATION_TAIL,
                });
            }
            Ok(n_max)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_weights_sum_to_one() {
        let xi = 0.7_f64;
        let s: f64 = (0..400).map(|n| tmsv_pair_weight(xi, n)).sum();
        assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn one_pair_weight_at_xi_0_3() {
        // 2 tanh^2(0.3) / cosh^4(0.3)
        let w = tmsv_pair_weight(0.3_f64, 1);
        assert!((w - 0.142_141_457_621_215).abs() < 1e-12);
        assert!((tmsv_pair_weight(0.3_f64, 0) - 1.0 / 0.3_f64.cosh().powi(4)).abs() < 1e-15);
    }

    #[test]
    fn tail_matches_direct_sum() {
        let xi = 0.5_f64;
        for n_max in [1usize, 3, 10] {
            let direct: f64 = (n_max + 1..2000).map(|n| tmsv_pair_weight(xi, n)).sum();
            assert!((tmsv_tail(xi, n_max) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn cutoff_is_minimal() {
        for xi in [0.05_f64, 0.3, 0.8, 1.2] {
            let n = tmsv_cutoff(xi, 1e-12).unwrap();
            assert!(tmsv_tail(xi, n) < 1e-12);
            if n > 1 {
                assert!(tmsv_tail(xi, n - 1) >= 1e-12);
            }
        }
    }

    #[test]
    fn fixed_truncation_rejected_when_too_short() {
        assert!(matches!(
            resolve_cutoff(0.5_f64, Truncation::Fixed(3)),
            Err(Error::Truncation { .. })
        ));
        assert_eq!(resolve_cutoff(1e-4_f64, Truncation::Fixed(2)).unwrap(), 2);
    }

    #[test]
    fn source_validation() {
        assert!(SourceModel::quantum_dot(0.0_f64, 1.2).is_err());
        assert!(SourceModel::spdc(0.0_f64).is_err());
        assert!(SourceModel::spdc(-0.1_f64).is_err());
        assert!(SourceModel::spdc(0.3_f64).unwrap().difference_only());
        assert!(!SourceModel::<f64>::phi_plus().difference_only());
    }
}
