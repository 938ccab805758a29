//! Binary entropy and Devetak-Winter key-rate bounds.
//!
//! Rates are in bits per channel use and may be negative; a negative value
//! means no key can be distilled at that operating point.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// QBER and CHSH value feeding a device-independent rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateInput<T> {
    pub qber: T,
    pub bell_s: T,
}

impl<T: Real> KeyRateInput<T> {
    pub fn new(qber: T, bell_s: T) -> Result<Self> {
        let input = Self { qber, bell_s };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        check_qber(self.qber)?;
        let tsirelson = T::lit(2.0) * T::SQRT_2();
        let slack = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
        if !(self.bell_s >= T::zero() && self.bell_s <= tsirelson + slack) {
            return Err(domain(
                "bell_s",
                self.bell_s.as_f64(),
                "must lie in [0, 2*sqrt(2)]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult<T> {
    pub rate: T,
    pub secure: bool,
}

impl<T: Real> KeyRateResult<T> {
    fn from_rate(rate: T) -> Self {
        Self {
            rate,
            secure: rate > T::zero(),
        }
    }
}

fn check_qber<T: Real>(q: T) -> Result<()> {
    if !(q >= T::zero() && q <= T::lit(0.5)) {
        return Err(domain("qber", q.as_f64(), "must lie in [0, 1/2]"));
    }
    Ok(())
}

/// `h(q) = -(1-q) log2(1-q) - q log2(q)` with `0 log 0 = 0`.
pub fn binary_entropy<T: Real>(q: T) -> Result<T> {
    if !(q >= T::zero() && q <= T::one()) {
        return Err(domain("q", q.as_f64(), "must lie in [0, 1]"));
    }
    let term = |x: T| if x > T::zero() { -x * x.log2() } else { T::zero() };
    Ok(term(q) + term(T::one() - q))
}

/// Eve's information term `h((1 + sqrt((S/2)^2 - 1)) / 2)`; equals 1 when
/// there is no Bell violation (`S <= 2`).
pub fn eve_information<T: Real>(bell_s: T) -> Result<T> {
    let two = T::lit(2.0);
    if bell_s <= two {
        return Ok(T::one());
    }
    let s = bell_s.min(two * T::SQRT_2());
    let half = s / two;
    let root = (half * half - T::one()).max(T::zero()).sqrt().min(T::one());
    binary_entropy((T::one() + root) / two)
}

/// `1 - h(Q) - h((1 + sqrt((S/2)^2 - 1)) / 2)`.
pub fn di_key_rate<T: Real>(input: KeyRateInput<T>) -> Result<KeyRateResult<T>> {
    input.validate()?;
    let rate = T::one() - binary_entropy(input.qber)? - eve_information(input.bell_s)?;
    Ok(KeyRateResult::from_rate(rate))
}

/// `1 - 2 h(Q)` for a symmetric channel.
pub fn bb84_key_rate<T: Real>(qber: T) -> Result<KeyRateResult<T>> {
    check_qber(qber)?;
    Ok(KeyRateResult::from_rate(
        T::one() - T::lit(2.0) * binary_entropy(qber)?,
    ))
}

/// Bisection for a sign change of `f` on `[lo, hi]`. Returns `None` when the
/// endpoints do not bracket a root.
pub fn bisect<T: Real>(mut lo: T, mut hi: T, f: impl Fn(T) -> T) -> Option<T> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Some(lo);
    }
    if f_hi == T::zero() {
        return Some(hi);
    }
    if (f_lo > T::zero()) == (f_hi > T::zero()) {
        return None;
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Some(mid);
        }
        if (f_mid > T::zero()) == (f_lo > T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) / T::lit(2.0))
}

/// Smallest Bell value giving a non-negative DI rate at the given QBER.
pub fn di_min_bell<T: Real>(qber: T) -> Result<T> {
    check_qber(qber)?;
    let two = T::lit(2.0);
    let top = two * T::SQRT_2();
    let h_q = binary_entropy(qber)?;
    let root = bisect(two, top, |s| {
        T::one() - h_q - eve_information(s).unwrap_or(T::one())
    });
    // h(Q) <= 1 always brackets a root on [2, 2*sqrt(2)].
    Ok(root.unwrap_or(top))
}

/// Largest QBER giving a non-negative DI rate at the given Bell value, or
/// `None` when no QBER is tolerable (`S <= 2`).
pub fn di_max_qber<T: Real>(bell_s: T) -> Result<Option<T>> {
    KeyRateInput::new(T::zero(), bell_s)?;
    let eve = eve_information(bell_s)?;
    if eve >= T::one() {
        return Ok(None);
    }
    Ok(bisect(T::zero(), T::lit(0.5), |q| {
        T::one() - binary_entropy(q).unwrap_or(T::one()) - eve
    }))
}

/// QBER at which `1 - 2 h(Q)` crosses zero (about 11%).
pub fn bb84_max_qber<T: Real>() -> T {
    bisect(T::zero(), T::lit(0.5), |q| {
        T::one() - T::lit(2.0) * binary_entropy(q).unwrap_or(T::one())
    })
    .expect("1 - 2h(Q) changes sign on [0, 1/2]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_endpoints_and_maximum() {
        assert_eq!(binary_entropy(0.0_f64).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0_f64).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5_f64).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn entropy_at_eleven_percent() {
        // 50-digit evaluation: h(0.11) = 0.49991595816452801...
        assert_abs_diff_eq!(
            binary_entropy(0.11_f64).unwrap(),
            0.499_915_958_164_528,
            epsilon = 1e-12
        );
    }

    #[test]
    fn entropy_rejects_out_of_range() {
        assert!(binary_entropy(-1e-9_f64).is_err());
        assert!(binary_entropy(1.0_f64 + 1e-9).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn di_rate_examples() {
        let max = di_key_rate(KeyRateInput::new(0.0, 2.0 * 2f64.sqrt()).unwrap()).unwrap();
        assert_abs_diff_eq!(max.rate, 1.0, epsilon = 1e-12);
        assert!(max.secure);

        let classical = di_key_rate(KeyRateInput::new(0.0, 2.0).unwrap()).unwrap();
        assert_eq!(classical.rate, 0.0);
        assert!(!classical.secure);

        // Direct evaluation of the rate formula at these inputs.
        let r = di_key_rate(KeyRateInput::new(0.0599, 2.49).unwrap()).unwrap();
        assert_abs_diff_eq!(r.rate, 0.117_762_598_170_426, epsilon = 1e-12);
        assert!(r.secure);
    }

    #[test]
    fn below_classical_bound_rate_is_minus_entropy() {
        let r = di_key_rate(KeyRateInput::new(0.1_f64, 1.5).unwrap()).unwrap();
        assert_abs_diff_eq!(r.rate, -binary_entropy(0.1).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn bb84_rate_examples() {
        assert_eq!(bb84_key_rate(0.0_f64).unwrap().rate, 1.0);
        let half = bb84_key_rate(0.5_f64).unwrap();
        assert_abs_diff_eq!(half.rate, -1.0, epsilon = 1e-15);
        assert!(!half.secure);

        let r = bb84_key_rate(0.11_f64).unwrap();
        assert_abs_diff_eq!(r.rate, 1.680_836_709_44e-4, epsilon = 1e-12);
        assert!(r.secure);
        assert!(!bb84_key_rate(0.112_f64).unwrap().secure);
        assert!(bb84_key_rate(0.51_f64).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(KeyRateInput::new(0.6_f64, 2.5).is_err());
        assert!(KeyRateInput::new(0.1_f64, 2.9).is_err());
        assert!(KeyRateInput::new(0.1_f64, -0.1).is_err());
        assert!(KeyRateInput::new(0.1_f64, 2.0 * 2f64.sqrt() + 1e-13).is_ok());
    }

    #[test]
    fn thresholds_are_roots() {
        let q = bb84_max_qber::<f64>();
        assert!((0.11..0.111).contains(&q));
        assert_abs_diff_eq!(bb84_key_rate(q).unwrap().rate, 0.0, epsilon = 1e-12);

        let s = di_min_bell(0.06_f64).unwrap();
        let r = di_key_rate(KeyRateInput::new(0.06, s).unwrap()).unwrap();
        assert_abs_diff_eq!(r.rate, 0.0, epsilon = 1e-9);

        let qmax = di_max_qber(2.6_f64).unwrap().unwrap();
        let r = di_key_rate(KeyRateInput::new(qmax, 2.6).unwrap()).unwrap();
        assert_abs_diff_eq!(r.rate, 0.0, epsilon = 1e-12);
        assert_eq!(di_max_qber(1.9_f64).unwrap(), None);
    }

    #[test]
    fn single_precision_agrees() {
        let r32 = di_key_rate(KeyRateInput::new(0.05_f32, 2.6).unwrap()).unwrap();
        let r64 = di_key_rate(KeyRateInput::new(0.05_f64, 2.6).unwrap()).unwrap();
        assert!((r32.rate as f64 - r64.rate).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn entropy_is_symmetric(q in 0.0_f64..=1.0) {
            let a = binary_entropy(q).unwrap();
            let b = binary_entropy(1.0 - q).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn di_rate_at_max_violation_dominates_bb84(q in 0.0_f64..=0.5) {
            let di = di_key_rate(KeyRateInput::new(q, 2.0 * 2f64.sqrt()).unwrap()).unwrap().rate;
            let bb = bb84_key_rate(q).unwrap().rate;
            prop_assert!((di - (1.0 - binary_entropy(q).unwrap())).abs() < 1e-7);
            prop_assert!(di >= bb - 1e-12);
        }
    }

    #[test]
    fn di_rate_monotone_on_grid() {
        let qs: Vec<f64> = (0..=25).map(|i| 0.5 * i as f64 / 25.0).collect();
        let ss: Vec<f64> = (0..=40).map(|i| 2.0 * 2f64.sqrt() * i as f64 / 40.0).collect();
        let rate = |q: f64, s: f64| di_key_rate(KeyRateInput::new(q, s).unwrap()).unwrap().rate;
        for &s in &ss {
            for w in qs.windows(2) {
                assert!(rate(w[1], s) <= rate(w[0], s) + 1e-12);
            }
        }
        for &q in &qs {
            for w in ss.windows(2) {
                assert!(rate(q, w[1]) >= rate(q, w[0]) - 1e-12);
            }
        }
    }
}
