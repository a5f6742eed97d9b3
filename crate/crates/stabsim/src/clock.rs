//! Bounded clock domain and its algebra.
//!
//! A clock domain with tail depth `alpha` and cycle size `k` is the value set
//! `{-alpha, …, 0, …, k-1}`: a linear "tail" of initial values `{-alpha, …, 0}`
//! glued to a modular cycle of correct values `{0, …, k-1}`. Incrementing
//! walks up the tail until 0, then rotates mod `k`. Protocol resets send a
//! register back to `-alpha`, the deepest tail value, which is what lets the
//! convergence argument bound how far a recovering register can be behind.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClockError {
    #[error("tail depth must be >= 1, got {0}")]
    BadAlpha(i32),
    #[error("cycle size must be >= 2, got {0}")]
    BadCycle(i32),
    #[error("value {value} outside clock domain [{min}, {max}]")]
    OutOfDomain { value: i32, min: i32, max: i32 },
}

/// The parameter pair `(alpha, k)` of a bounded clock.
///
/// `alpha >= 1` is the depth of the initial tail, `k >= 2` the size of the
/// modular cycle. Copyable so protocol closures can capture it by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockDomain {
    alpha: i32,
    k: i32,
}

/// A value known to lie inside its domain; constructed only through
/// [`ClockDomain::value`], [`ClockDomain::increment`] and
/// [`ClockDomain::reset_value`], so domain membership is checked at every
/// construction site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClockValue(i32);

impl ClockValue {
    pub fn get(self) -> i32 {
        self.0
    }
}

/// Membership flags of a value in the four distinguished subsets:
/// initial values `{-alpha..=0}`, strictly-initial `{-alpha..=-1}`,
/// correct values `{0..=k-1}`, strictly-correct `{1..=k-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueClass {
    pub init: bool,
    pub init_strict: bool,
    pub stab: bool,
    pub stab_strict: bool,
}

impl ClockDomain {
    pub fn new(alpha: i32, k: i32) -> Result<Self, ClockError> {
        if alpha < 1 {
            return Err(ClockError::BadAlpha(alpha));
        }
        if k < 2 {
            return Err(ClockError::BadCycle(k));
        }
        Ok(ClockDomain { alpha, k })
    }

    pub fn alpha(self) -> i32 {
        self.alpha
    }

    pub fn k(self) -> i32 {
        self.k
    }

    /// Number of values in the domain: `alpha + k`.
    pub fn len(self) -> usize {
        (self.alpha + self.k) as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, c: i32) -> bool {
        -self.alpha <= c && c <= self.k - 1
    }

    /// Wraps `c` as a checked domain value.
    pub fn value(self, c: i32) -> Result<ClockValue, ClockError> {
        if self.contains(c) {
            Ok(ClockValue(c))
        } else {
            Err(ClockError::OutOfDomain {
                value: c,
                min: -self.alpha,
                max: self.k - 1,
            })
        }
    }

    /// All domain values in increasing order, `-alpha..=k-1`.
    pub fn values(self) -> impl Iterator<Item = i32> {
        -self.alpha..=self.k - 1
    }

    /// The increment step: `c+1` on the tail, `(c+1) mod k` on the cycle.
    pub fn increment(self, c: ClockValue) -> ClockValue {
        debug_assert!(self.contains(c.0));
        if c.0 < 0 {
            ClockValue(c.0 + 1)
        } else {
            ClockValue((c.0 + 1) % self.k)
        }
    }

    /// The value a reset writes: `-alpha`.
    pub fn reset_value(self) -> ClockValue {
        ClockValue(-self.alpha)
    }

    /// Reduction of an arbitrary integer to `[0, k)`.
    pub fn reduce(self, c: i32) -> i32 {
        (c as i64).rem_euclid(self.k as i64) as i32
    }

    /// Circular distance on the cycle: `min((c - c2) mod k, (c2 - c) mod k)`.
    ///
    /// Defined on all integers via reduction mod `k`; the result lies in
    /// `[0, k/2]`.
    pub fn distance(self, c: i32, c2: i32) -> i32 {
        let d = self.reduce(c - c2);
        d.min(self.k - d)
    }

    /// Two values are locally comparable when their circular distance is at
    /// most 1.
    pub fn locally_comparable(self, c: i32, c2: i32) -> bool {
        self.distance(c, c2) <= 1
    }

    /// Local order: `c <= c2` locally iff `(c2 - c) mod k` is 0 or 1.
    pub fn local_leq(self, c: i32, c2: i32) -> bool {
        let d = self.reduce(c2 - c);
        d == 0 || d == 1
    }

    /// Order on initial values: the natural integer order.
    pub fn init_leq(self, c: i32, c2: i32) -> bool {
        c <= c2
    }

    pub fn in_init(self, c: i32) -> bool {
        -self.alpha <= c && c <= 0
    }

    pub fn in_init_strict(self, c: i32) -> bool {
        -self.alpha <= c && c < 0
    }

    pub fn in_stab(self, c: i32) -> bool {
        0 <= c && c <= self.k - 1
    }

    pub fn in_stab_strict(self, c: i32) -> bool {
        0 < c && c <= self.k - 1
    }

    pub fn classify(self, c: ClockValue) -> ValueClass {
        ValueClass {
            init: self.in_init(c.0),
            init_strict: self.in_init_strict(c.0),
            stab: self.in_stab(c.0),
            stab_strict: self.in_stab_strict(c.0),
        }
    }
}
