//! Angle canonicalization and symmetry-aware comparison.

use crate::modes::wrap_angle;
use crate::scalar::Real;

/// Reduces CHSH angles `(a1, a2, b1, b2)` to `[0, pi)`. With
/// `difference_only`, all four are first shifted so that `b1 = 0`.
pub fn canonicalize<T: Real>(angles: [T; 4], difference_only: bool) -> [T; 4] {
    let shift = if difference_only { angles[2] } else { T::zero() };
    angles.map(|a| wrap_angle(a - shift))
}

/// Distance on the circle of circumference `pi`.
fn circular_distance<T: Real>(a: T, b: T) -> T {
    let d = wrap_angle(a - b);
    d.min(T::PI() - d)
}

/// Differences `(a1-b1, a1-b2, a2-b1, a2-b2)`.
pub fn setting_differences<T: Real>(angles: &[T; 4]) -> [T; 4] {
    let [a1, a2, b1, b2] = *angles;
    [a1 - b1, a1 - b2, a2 - b1, a2 - b2]
}

/// Whether two CHSH angle sets give the same correlators for a source whose
/// correlator depends only on `theta_a - theta_b` through an even,
/// `pi`-periodic function: equal differences mod `pi`, up to a global sign.
pub fn equivalent_for_difference_only<T: Real>(x: &[T; 4], y: &[T; 4], tol: T) -> bool {
    let dx = setting_differences(x);
    let dy = setting_differences(y);
    let direct = dx.iter().zip(&dy).all(|(a, b)| circular_distance(*a, *b) <= tol);
    let mirrored = dx.iter().zip(&dy).all(|(a, b)| circular_distance(*a, -*b) <= tol);
    direct || mirrored
}

/// Exchanges the parties' roles: `(a1, a2, b1, b2) -> (b1, b2, a1, a2)`.
/// For a party-symmetric source this maps a CHSH form with the minus on
/// `E(a2, b1)` to one with the minus on `E(a1, b2)`.
pub fn swap_parties<T: Real>(angles: [T; 4]) -> [T; 4] {
    [angles[2], angles[3], angles[0], angles[1]]
}
