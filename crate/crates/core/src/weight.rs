use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{NumCast, PrimInt, Signed, ToPrimitive};

/// Signed integer type used for capacities, term values and flows.
///
/// All arithmetic in the solver is exact; `i64` is the default choice and
/// `i128` can be used when an instance does not fit the 64-bit headroom.
pub trait Weight:
    PrimInt + Signed + Debug + Display + Hash + Default + Send + Sync + 'static
{
    /// Converts a count (a set size, an index) into the weight type.
    #[inline]
    fn of(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("count does not fit in weight type")
    }

    #[inline]
    fn wide(self) -> i128 {
        ToPrimitive::to_i128(&self).expect("weight does not fit in i128")
    }

    /// Largest magnitude allowed for intermediate values: half the type's range.
    fn headroom() -> i128 {
        Self::max_value().wide() / 2 + 1
    }
}

impl<T> Weight for T where
    T: PrimInt + Signed + Debug + Display + Hash + Default + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headroom_matches_62_bits_for_i64() {
        assert_eq!(<i64 as Weight>::headroom(), 1i128 << 62);
        assert_eq!(<i32 as Weight>::headroom(), 1i128 << 30);
    }

    #[test]
    fn counts_convert() {
        assert_eq!(<i64 as Weight>::of(17), 17);
        assert_eq!(<i128 as Weight>::of(3).wide(), 3);
    }
}
