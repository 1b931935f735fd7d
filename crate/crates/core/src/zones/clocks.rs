use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use super::Q;

/// Index of a clock inside a [`ClockMap`]. Index 0 is the reference clock.
pub type ClockId = usize;

/// Ordered set of clock names. The clock named at position `i` has id `i + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockMap {
    names: Vec<String>,
}

impl ClockMap {
    pub fn new() -> Self {
        ClockMap { names: Vec::new() }
    }

    /// Builds a map from names, dropping duplicates but keeping first-seen order.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut m = ClockMap::new();
        for n in names {
            m.insert(n.into());
        }
        m
    }

    /// Adds a clock if absent and returns its id.
    pub fn insert(&mut self, name: String) -> ClockId {
        if let Some(i) = self.id(&name) {
            return i;
        }
        self.names.push(name);
        self.names.len()
    }

    pub fn id(&self, name: &str) -> Option<ClockId> {
        self.names.iter().position(|n| n == name).map(|p| p + 1)
    }

    /// Name of clock `id`; `"0"` for the reference clock.
    pub fn name(&self, id: ClockId) -> &str {
        if id == 0 {
            "0"
        } else {
            &self.names[id - 1]
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of user clocks.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// DBM dimension: clocks plus the reference clock.
    pub fn dim(&self) -> usize {
        self.names.len() + 1
    }

    /// Clocks of `self` followed by the clocks of `other` not already present.
    pub fn join(&self, other: &ClockMap) -> ClockMap {
        let mut m = self.clone();
        for n in &other.names {
            m.insert(n.clone());
        }
        m
    }

    pub fn is_disjoint(&self, other: &ClockMap) -> bool {
        self.names.iter().all(|n| other.id(n).is_none())
    }

    /// For each clock of `self`, its id in `target` (index 0 maps to 0).
    pub fn embedding(&self, target: &ClockMap) -> Option<Vec<ClockId>> {
        let mut map = Vec::with_capacity(self.dim());
        map.push(0);
        for n in &self.names {
            map.push(target.id(n)?);
        }
        Some(map)
    }
}

/// A clock valuation: `values[i]` is the value of clock `i`; `values[0]` is always 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Valuation {
    values: Vec<Q>,
}

impl Valuation {
    /// The valuation mapping every clock to zero.
    pub fn zero(dim: usize) -> Self {
        Valuation {
            values: alloc::vec![Q::zero(); dim.max(1)],
        }
    }

    /// Builds a valuation from the user clocks' values (reference clock excluded).
    ///
    /// Negative values are clamped to zero.
    pub fn from_values(values: Vec<Q>) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(Q::zero());
        for x in values {
            v.push(if x.is_negative() { Q::zero() } else { x });
        }
        Valuation { values: v }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, id: ClockId) -> &Q {
        &self.values[id]
    }

    pub fn set(&mut self, id: ClockId, v: Q) {
        if id != 0 {
            self.values[id] = v;
        }
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// `ν + δ`.
    pub fn delayed(&self, delta: &Q) -> Valuation {
        let mut values = self.values.clone();
        for v in values.iter_mut().skip(1) {
            *v += delta;
        }
        Valuation { values }
    }

    /// `ν[R]`: the clocks in `resets` set to zero.
    pub fn reset(&self, resets: &[ClockId]) -> Valuation {
        let mut out = self.clone();
        for &r in resets {
            out.set(r, Q::zero());
        }
        out
    }

    /// Re-indexes into a larger clock space; unmapped clocks are zero.
    pub fn embed(&self, map: &[ClockId], dim: usize) -> Valuation {
        let mut out = Valuation::zero(dim);
        for (i, &j) in map.iter().enumerate().skip(1) {
            out.values[j] = self.values[i].clone();
        }
        out
    }

    /// Projects back along an embedding produced by [`ClockMap::embedding`].
    pub fn project(&self, map: &[ClockId]) -> Valuation {
        Valuation {
            values: map.iter().map(|&j| self.values[j].clone()).collect(),
        }
    }

    /// Concatenation of two valuations over joined disjoint clock maps.
    pub fn concat(&self, other: &Valuation) -> Valuation {
        let mut values = self.values.clone();
        values.extend(other.values.iter().skip(1).cloned());
        Valuation { values }
    }

    /// Splits a valuation over `left.join(right)` back into two parts.
    pub fn split(&self, left_len: usize) -> (Valuation, Valuation) {
        let l = Valuation {
            values: self.values[..=left_len].to_vec(),
        };
        let mut r = alloc::vec![Q::zero()];
        r.extend(self.values[left_len + 1..].iter().cloned());
        (l, Valuation { values: r })
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.values.iter().enumerate().skip(1) {
            if i > 1 {
                write!(f, ", ")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, "]")
    }
}
