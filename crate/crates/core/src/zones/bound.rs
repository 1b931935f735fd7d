//! DBM bounds packed into one integer: `raw = 2 * value + (weak as i32)`.
//!
//! The ordering of raw values coincides with bound ordering: `(<, v) < (<=, v) < (<, v + 1)`.

use core::fmt;

/// A bound `(≺, v)` on a clock difference.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound(i32);

/// Guard constants and extrapolation limits must stay below this value.
pub const MAX_CONSTANT: i32 = 1 << 24;

impl Bound {
    pub const INF: Bound = Bound(i32::MAX);
    pub const LE_ZERO: Bound = Bound(1);
    pub const LT_ZERO: Bound = Bound(0);

    pub fn weak(v: i32) -> Bound {
        Bound((v << 1) | 1)
    }

    pub fn strict(v: i32) -> Bound {
        Bound(v << 1)
    }

    pub fn new(v: i32, is_weak: bool) -> Bound {
        if is_weak {
            Bound::weak(v)
        } else {
            Bound::strict(v)
        }
    }

    pub fn raw(self) -> i32 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self == Bound::INF
    }

    pub fn is_weak(self) -> bool {
        !self.is_inf() && self.0 & 1 == 1
    }

    pub fn is_strict(self) -> bool {
        !self.is_weak()
    }

    /// The constant; meaningless for `INF`.
    pub fn value(self) -> i32 {
        self.0 >> 1
    }

    pub fn add(self, other: Bound) -> Bound {
        if self.is_inf() || other.is_inf() {
            Bound::INF
        } else {
            Bound((self.0 + other.0) - ((self.0 | other.0) & 1))
        }
    }

    /// The bound of the complementary constraint, read on the transposed entry:
    /// `¬(xi - xj ≺ v)` is `xj - xi ≺' -v`.
    pub fn negate(self) -> Bound {
        debug_assert!(!self.is_inf());
        Bound(1 - self.0)
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "<inf")
        } else if self.is_weak() {
            write!(f, "<={}", self.value())
        } else {
            write!(f, "<{}", self.value())
        }
    }
}
