use std::fmt;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Entry type of a stochastic matrix: `f64`, or exact rationals.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + FromPrimitive + ToPrimitive + Send + Sync
{
    const EXACT: bool;

    /// Slack allowed on row sums when validating.
    fn row_tolerance() -> Self;

    /// Magnitude below which a pivot counts as zero.
    fn pivot_epsilon() -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn of_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("integer fits the scalar type")
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn row_tolerance() -> Self {
        1e-12
    }

    fn pivot_epsilon() -> Self {
        1e-14
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn row_tolerance() -> Self {
        Rational::zero()
    }

    fn pivot_epsilon() -> Self {
        Rational::zero()
    }
}

pub fn mode_name<T: Scalar>() -> &'static str {
    if T::EXACT {
        "rational"
    } else {
        "float"
    }
}
