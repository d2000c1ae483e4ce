//! Scalar distance type shared by every algorithm.
//!
//! Travel times are unsigned integers with a reserved `INF` sentinel equal to
//! the largest representable value. All additions saturate, so `INF + x == INF`
//! and dummy edges of infinite length can be relaxed without special cases.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};

/// Unsigned integer distance with saturating arithmetic.
pub trait Weight:
    PrimInt
    + Unsigned
    + Hash
    + Debug
    + Display
    + Default
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Sentinel for "unreachable". Never a valid finite distance.
    const INF: Self;

    #[inline(always)]
    fn add_sat(self, other: Self) -> Self {
        self.saturating_add(other)
    }

    #[inline(always)]
    fn is_inf(self) -> bool {
        self == Self::INF
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        self != Self::INF
    }

    /// Lossless widening used for hashing and reporting.
    fn as_u64(self) -> u64;

    /// Narrowing conversion; `None` if the value does not fit below `INF`.
    fn from_u64(v: u64) -> Option<Self>;
}

macro_rules! impl_weight {
    ($($t:ty),*) => {$(
        impl Weight for $t {
            const INF: Self = <$t>::MAX;

            #[inline(always)]
            fn as_u64(self) -> u64 {
                self as u64
            }

            #[inline]
            fn from_u64(v: u64) -> Option<Self> {
                <$t>::try_from(v).ok().filter(|x| *x != Self::INF)
            }
        }
    )*};
}

impl_weight!(u32, u64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation() {
        assert_eq!(u32::INF.add_sat(5), u32::INF);
        assert_eq!(7u32.add_sat(u32::INF), u32::INF);
        assert_eq!((u32::MAX - 1).add_sat(3), u32::INF);
        assert_eq!(3u64.add_sat(4), 7);
    }

    #[test]
    fn conversions() {
        assert_eq!(u32::from_u64(17), Some(17));
        assert_eq!(u32::from_u64(u32::MAX as u64), None);
        assert_eq!(u32::from_u64(1 << 40), None);
        assert_eq!(u64::from_u64(1 << 40), Some(1 << 40));
    }
}
