//! Floating-point abstraction shared by every engine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the engines are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the implemented types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute slack for probability bookkeeping checks (sums, negativity).
    /// `1e-10` in double precision, widened to the machine epsilon in single.
    #[inline]
    fn prob_slack() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(1e3))
    }
}

impl Real for f32 {}
impl Real for f64 {}
