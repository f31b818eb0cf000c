//! Scaling parameter of a phase.
//!
//! The scaling parameter `Δ` runs through `2^l` for `l = ..., 1, 0, -1`, so it
//! is stored as the integer `2Δ`. The last phase has `2Δ = 1`, i.e. `Δ = 1/2`,
//! where every threshold collapses to plain positivity.

use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Phase<W> {
    two_delta: W,
}

impl<W: Weight> Phase<W> {
    /// Phase with the given `2Δ`. Panics unless it is a positive power of two.
    pub fn from_two_delta(two_delta: W) -> Self {
        assert!(
            two_delta > W::zero() && (two_delta & (two_delta - W::one())) == W::zero(),
            "2Δ must be a positive power of two, got {two_delta}"
        );
        Phase { two_delta }
    }

    /// First phase for value bound `bound`: `Δ = 2^⌈log₂ bound⌉`.
    pub fn initial(bound: W) -> Self {
        let mut delta = W::one();
        while delta < bound {
            delta = delta + delta;
        }
        Phase::from_two_delta(delta + delta)
    }

    /// The final `Δ = 1/2` phase.
    pub fn last() -> Self {
        Phase { two_delta: W::one() }
    }

    pub fn two_delta(self) -> W {
        self.two_delta
    }

    /// `⌈Δ⌉`, the amount moved by every augmentation in this phase.
    pub fn ceil_delta(self) -> W {
        (self.two_delta + W::one()) / (W::one() + W::one())
    }

    pub fn is_last(self) -> bool {
        self.two_delta == W::one()
    }

    /// The following phase, or `None` after the last one.
    pub fn next(self) -> Option<Self> {
        if self.is_last() {
            None
        } else {
            Some(Phase {
                two_delta: self.two_delta / (W::one() + W::one()),
            })
        }
    }

    /// Smallest integer `x` with `x ≥ 3Δ/2`, i.e. `4x ≥ 3·2Δ`.
    pub fn three_halves_ceil(self) -> W {
        let four = W::of(4);
        self.two_delta - self.two_delta / four
    }

    /// `x ≥ 3Δ/2` for an integer `x`.
    pub fn meets_three_halves(self, x: W) -> bool {
        x >= self.three_halves_ceil()
    }

    /// Iwata's rounding of a nonnegative value `value` on a set of size `size`
    /// inside a ground set of size `ground`:
    /// `Δ·⌊value/Δ⌋ + Δ·size·(ground − size)` for integral `Δ`, identity for `Δ = 1/2`.
    pub fn round(self, value: W, size: usize, ground: usize) -> W {
        if self.is_last() {
            return value;
        }
        let delta = self.two_delta / (W::one() + W::one());
        debug_assert!(value >= W::zero());
        delta * (value / delta) + delta * W::of(size * (ground - size))
    }
}
