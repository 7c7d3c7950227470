//! Scalar abstractions.
//!
//! Tree algebra (averages, jumps, truncation, counting sums) only needs field
//! operations and comparisons, so it is written against [`Scalar`] and runs on
//! `f32`, `f64` and the exact rational [`Exact`]. Anything that takes a square
//! root or a logarithm asks for [`Real`] instead.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational arithmetic used for interval endpoints, filtration shifts and
/// exact re-runs of the tree algorithms.
pub type Exact = Ratio<i128>;

pub trait Scalar:
    Copy + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `numerator / 2^exp`, exact for every implementor as long as the value is
    /// representable.
    fn dyadic(numerator: i64, exp: u32) -> Self {
        let num = Self::from_i64(numerator).expect("numerator representable");
        num / Self::pow2(exp)
    }

    fn pow2(exp: u32) -> Self {
        let mut out = Self::one();
        let two = Self::one() + Self::one();
        for _ in 0..exp {
            out = out * two;
        }
        out
    }

    fn from_exact(value: Exact) -> Self {
        let num = Self::from_i128(*value.numer()).expect("numerator representable");
        let den = Self::from_i128(*value.denom()).expect("denominator representable");
        num / den
    }

    fn to_f64_lossy(self) -> f64;

    fn is_finite_value(self) -> bool {
        true
    }

    /// Relative slack for identities that hold exactly in exact arithmetic.
    fn relative_slack() -> Self {
        Self::zero()
    }

    fn ln2() -> Self {
        Self::from_f64(std::f64::consts::LN_2).expect("ln 2 representable")
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }

    fn relative_slack() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn dyadic(numerator: i64, exp: u32) -> Self {
        numerator as f64 * (-(exp as f64)).exp2()
    }

    fn pow2(exp: u32) -> Self {
        (exp as f64).exp2()
    }

    fn to_f64_lossy(self) -> f64 {
        self
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }

    fn relative_slack() -> Self {
        1e-12
    }
}

impl Scalar for Exact {
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    // A short rational keeps i128 denominators small; the factor is applied
    // once per sum so comparisons between sums stay exact.
    fn ln2() -> Self {
        Ratio::new(6_931_471_805_599_453, 10_000_000_000_000_000)
    }
}

/// Floating point scalars: everything that needs `sqrt`, `ln` or `powf`.
pub trait Real: Scalar + Float + FloatConst {}

impl Real for f32 {}
impl Real for f64 {}

/// Floor of an exact rational.
pub(crate) fn floor_exact(value: Exact) -> i128 {
    value.floor().to_integer()
}

pub(crate) fn exact_pow2(exp: i32) -> Exact {
    if exp >= 0 {
        Exact::from_integer(1i128 << exp)
    } else {
        Exact::new(1, 1i128 << (-exp))
    }
}
