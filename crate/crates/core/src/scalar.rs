//! Numeric types metrics can be computed in.
//!
//! Ratios of counts are computed generically so the same code yields `f32`,
//! `f64` or an exact [`num_rational::Ratio`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Num + FromPrimitive + ToPrimitive + Clone + PartialOrd + Debug {
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable in scalar type")
    }

    /// `num / den`, or `None` when `den` is zero.
    fn ratio(num: u64, den: u64) -> Option<Self> {
        (den != 0).then(|| Self::from_count(num) / Self::from_count(den))
    }
}

impl<T> Scalar for T where T: Num + FromPrimitive + ToPrimitive + Clone + PartialOrd + Debug {}

/// Exact ratio of counts.
pub type Exact = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Drop digits past the last place.
    Truncate,
    /// Round half away from zero.
    HalfUp,
}

/// Formats a non-negative exact ratio with a fixed number of decimal places.
pub fn format_decimal(value: &Exact, places: u32, rounding: Rounding) -> String {
    let num = u128::from(*value.numer());
    let den = u128::from(*value.denom());
    let scale = 10u128.pow(places);
    let scaled = match rounding {
        Rounding::Truncate => num * scale / den,
        Rounding::HalfUp => (2 * num * scale + den) / (2 * den),
    };
    let int = scaled / scale;
    if places == 0 {
        return int.to_string();
    }
    let frac = scaled % scale;
    format!("{int}.{frac:0width$}", width = places as usize)
}
