//! Detector ports, detector parameters and analyzer settings.

use std::fmt;

use crate::error::{domain, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

/// Output port of a polarization analyzer. The discriminant is the port's
/// bit position in a [`ModeSet`] and its slot in a four-mode occupation tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    TA = 0,
    RA = 1,
    TB = 2,
    RB = 3,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::TA, Port::RA, Port::TB, Port::RB];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn side(self) -> Side {
        match self {
            Port::TA | Port::RA => Side::A,
            Port::TB | Port::RB => Side::B,
        }
    }

    pub fn is_transmitted(self) -> bool {
        matches!(self, Port::TA | Port::TB)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Port::TA => "T_A",
            Port::RA => "R_A",
            Port::TB => "T_B",
            Port::RB => "R_B",
        };
        f.write_str(s)
    }
}

/// Subset of the four output ports, as a 4-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ModeSet(u8);

impl ModeSet {
    pub const EMPTY: ModeSet = ModeSet(0);
    pub const FULL: ModeSet = ModeSet(0b1111);

    pub fn from_bits(bits: u8) -> Self {
        ModeSet(bits & 0b1111)
    }

    pub fn of(ports: &[Port]) -> Self {
        ModeSet(ports.iter().fold(0, |acc, p| acc | (1 << p.index())))
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn contains(self, port: Port) -> bool {
        self.0 & (1 << port.index()) != 0
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn complement(self) -> Self {
        ModeSet(!self.0 & 0b1111)
    }

    #[inline]
    pub fn union(self, other: ModeSet) -> Self {
        ModeSet(self.0 | other.0)
    }

    pub fn ports(self) -> impl Iterator<Item = Port> {
        Port::ALL.into_iter().filter(move |p| self.contains(*p))
    }

    /// Every subset of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = ModeSet> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & full) };
            Some(ModeSet(cur))
        })
    }

    /// All 16 subsets of the four ports in bit order.
    pub fn all() -> impl Iterator<Item = ModeSet> {
        (0u8..16).map(ModeSet)
    }
}

/// On/off detector with efficiency `eta` and dark-count exponent `nu`
/// (the dark-click probability on vacuum is `1 - exp(-nu)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel<T> {
    pub eta: T,
    pub nu: T,
}

impl<T: Real> DetectorModel<T> {
    pub fn new(eta: T, nu: T) -> Result<Self> {
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(domain("eta", eta.as_f64(), "must lie in [0, 1]"));
        }
        if !(nu >= T::zero() && nu.is_finite()) {
            return Err(domain("nu", nu.as_f64(), "must be finite and >= 0"));
        }
        Ok(Self { eta, nu })
    }

    pub fn ideal() -> Self {
        Self {
            eta: T::one(),
            nu: T::zero(),
        }
    }
}

/// Half-wave-plate angles of the two analyzers, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSettings<T> {
    pub theta_a: T,
    pub theta_b: T,
}

impl<T: Real> AnalyzerSettings<T> {
    pub fn new(theta_a: T, theta_b: T) -> Result<Self> {
        if !theta_a.is_finite() {
            return Err(domain("theta_a", theta_a.as_f64(), "must be finite"));
        }
        if !theta_b.is_finite() {
            return Err(domain("theta_b", theta_b.as_f64(), "must be finite"));
        }
        Ok(Self { theta_a, theta_b })
    }

    pub fn zero() -> Self {
        Self {
            theta_a: T::zero(),
            theta_b: T::zero(),
        }
    }

    /// Same settings with both angles reduced to `[0, pi)`.
    pub fn canonical(self) -> Self {
        Self {
            theta_a: wrap_angle(self.theta_a),
            theta_b: wrap_angle(self.theta_b),
        }
    }
}

/// Reduces an analyzer angle to `[0, pi)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let r = theta % pi;
    let r = if r < T::zero() { r + pi } else { r };
    if r >= pi {
        T::zero()
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate_power_set() {
        let set = ModeSet::of(&[Port::TA, Port::TB, Port::RB]);
        let subs: Vec<_> = set.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.bits() & !set.bits() == 0));
        assert_eq!(ModeSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn complement_and_union() {
        let a = ModeSet::of(&[Port::TA]);
        assert_eq!(a.complement().len(), 3);
        assert_eq!(a.union(a.complement()), ModeSet::FULL);
        assert!(!a.complement().contains(Port::TA));
    }

    #[test]
    fn detector_validation() {
        assert!(DetectorModel::new(1.1_f64, 0.0).is_err());
        assert!(DetectorModel::new(0.5_f64, -1e-3).is_err());
        assert!(DetectorModel::new(0.0_f64, 0.0).is_ok());
    }

    #[test]
    fn wrap_angle_range() {
        let pi = std::f64::consts::PI;
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(-0.1) - (pi - 0.1)).abs() < 1e-15);
        assert!((wrap_angle(3.0 * pi + 0.2) - 0.2).abs() < 1e-12);
        assert!(wrap_angle(pi) < 1e-15);
    }
}
