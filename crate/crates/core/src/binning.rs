//! Assignment of the 16 click patterns to the four logical outcomes.

use crate::error::{Error, Result};
use crate::modes::Port::{RA, RB, TA, TB};
use crate::modes::{ModeSet, Side};
use crate::outcomes::OutcomeDistribution;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinningStrategy {
    /// Inconclusive events spread evenly over the logical outcomes.
    Standard,
    /// A side reads `-1` only on a clean transmitted click; everything else
    /// (no click, reflected click, double click) reads `+1`.
    TransmittedOnly,
}

/// Logical outcome probabilities `(T_A T_B, T_A R_B, R_A T_B, R_A R_B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalDistribution<T> {
    pub p_tt: T,
    pub p_tr: T,
    pub p_rt: T,
    pub p_rr: T,
}

impl<T: Real> LogicalDistribution<T> {
    pub fn new(p_tt: T, p_tr: T, p_rt: T, p_rr: T) -> Result<Self> {
        let d = Self { p_tt, p_tr, p_rt, p_rr };
        let slack = T::prob_slack();
        if [p_tt, p_tr, p_rt, p_rr].iter().any(|&p| !(p >= -slack)) {
            return Err(Error::Numerical(format!("negative logical probability in {:?}", d)));
        }
        let sum = d.total();
        if (sum - T::one()).abs() > slack {
            return Err(Error::Consistency { sum: sum.as_f64() });
        }
        Ok(d)
    }

    pub fn total(&self) -> T {
        self.p_tt + self.p_tr + self.p_rt + self.p_rr
    }

    pub fn same(&self) -> T {
        self.p_tt + self.p_rr
    }

    pub fn diff(&self) -> T {
        self.p_tr + self.p_rt
    }
}

pub fn bin<T: Real>(
    dist: &OutcomeDistribution<T>,
    strategy: BinningStrategy,
) -> Result<LogicalDistribution<T>> {
    match strategy {
        BinningStrategy::Standard => bin_standard(dist),
        BinningStrategy::TransmittedOnly => bin_transmitted_only(dist),
    }
}

pub fn bin_standard<T: Real>(dist: &OutcomeDistribution<T>) -> Result<LogicalDistribution<T>> {
    let p = |ports: &[crate::modes::Port]| dist.exactly(ports);
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let shared = quarter * (p(&[TA, RA]) + p(&[TB, RB]) + p(&[]) + p(&[TA, RA, TB, RB]));
    let p_tt = p(&[TA, TB]) + shared + half * (p(&[TA]) + p(&[TB]) + p(&[TA, TB, RA]) + p(&[TA, TB, RB]));
    let p_tr = p(&[TA, RB]) + shared + half * (p(&[TA]) + p(&[RB]) + p(&[TA, RB, TB]) + p(&[TA, RB, RA]));
    let p_rt = p(&[RA, TB]) + shared + half * (p(&[RA]) + p(&[TB]) + p(&[RA, TB, TA]) + p(&[RA, TB, RB]));
    let p_rr = p(&[RA, RB]) + shared + half * (p(&[RA]) + p(&[RB]) + p(&[RA, RB, TA]) + p(&[RA, RB, TB]));
    LogicalDistribution::new(p_tt, p_tr, p_rt, p_rr)
}

/// `true` when the side reads `-1`.
fn clean_transmitted(clicks: ModeSet, side: Side) -> bool {
    let (t, r) = match side {
        Side::A => (TA, RA),
        Side::B => (TB, RB),
    };
    clicks.contains(t) && !clicks.contains(r)
}

pub fn bin_transmitted_only<T: Real>(dist: &OutcomeDistribution<T>) -> Result<LogicalDistribution<T>> {
    let z = T::zero();
    let (mut tt, mut tr, mut rt, mut rr) = (z, z, z, z);
    for (clicks, p) in dist.iter() {
        match (clean_transmitted(clicks, Side::A), clean_transmitted(clicks, Side::B)) {
            (true, true) => tt = tt + p,
            (true, false) => tr = tr + p,
            (false, true) => rt = rt + p,
            (false, false) => rr = rr + p,
        }
    }
    LogicalDistribution::new(tt, tr, rt, rr)
}
