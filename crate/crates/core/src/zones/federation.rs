use alloc::vec::Vec;

use super::bound::Bound;
use super::clocks::{ClockId, Valuation};
use super::dbm::{Dbm, Window};

/// A finite union of canonical non-empty DBMs of the same dimension.
#[derive(Clone, Debug, Hash, PartialOrd, Ord, PartialEq, Eq)]
pub struct Federation {
    dim: usize,
    parts: Vec<Dbm>,
}

impl Federation {
    /// ∅.
    pub fn empty(dim: usize) -> Federation {
        Federation {
            dim,
            parts: Vec::new(),
        }
    }

    /// Val: every valuation.
    pub fn universe(dim: usize) -> Federation {
        Federation {
            dim,
            parts: alloc::vec![Dbm::universe(dim)],
        }
    }

    /// `{ν₀}`.
    pub fn zero(dim: usize) -> Federation {
        Federation {
            dim,
            parts: alloc::vec![Dbm::zero(dim)],
        }
    }

    pub fn from_dbm(d: Dbm) -> Federation {
        Federation {
            dim: d.dim(),
            parts: alloc::vec![d],
        }
    }

    pub fn from_parts(dim: usize, parts: Vec<Dbm>) -> Federation {
        let mut f = Federation::empty(dim);
        for p in parts {
            f.add_part(p);
        }
        f
    }

    /// A single constraint `xi - xj ≺ b`.
    pub fn constraint(dim: usize, i: usize, j: usize, b: Bound) -> Federation {
        match Dbm::universe(dim).constrain(i, j, b) {
            Some(d) => Federation::from_dbm(d),
            None => Federation::empty(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parts(&self) -> &[Dbm] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    fn add_part(&mut self, d: Dbm) {
        debug_assert_eq!(d.dim(), self.dim);
        if self.parts.iter().any(|p| p.includes(&d)) {
            return;
        }
        self.parts.retain(|p| !d.includes(p));
        self.parts.push(d);
    }

    fn map_parts<F: Fn(&Dbm) -> Option<Dbm>>(&self, f: F) -> Federation {
        let mut out = Federation::empty(self.dim);
        for p in &self.parts {
            if let Some(d) = f(p) {
                out.add_part(d);
            }
        }
        out
    }

    pub fn union(&self, other: &Federation) -> Federation {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        for p in &other.parts {
            out.add_part(p.clone());
        }
        out
    }

    pub fn intersect(&self, other: &Federation) -> Federation {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = Federation::empty(self.dim);
        for a in &self.parts {
            for b in &other.parts {
                if let Some(d) = a.intersect(b) {
                    out.add_part(d);
                }
            }
        }
        out
    }

    pub fn intersect_dbm(&self, d: &Dbm) -> Federation {
        self.map_parts(|p| p.intersect(d))
    }

    /// Set difference via disjoint splitting of each part.
    pub fn subtract(&self, other: &Federation) -> Federation {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut cur: Vec<Dbm> = self.parts.clone();
        for b in &other.parts {
            let mut next = Vec::new();
            for a in &cur {
                dbm_minus(a, b, &mut next);
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        Federation::from_parts(self.dim, cur)
    }

    /// `Val \ F`.
    pub fn complement(&self) -> Federation {
        Federation::universe(self.dim).subtract(self)
    }

    /// `self ⊇ other`, decided by emptiness of `other \ self`.
    pub fn includes(&self, other: &Federation) -> bool {
        if other.parts.iter().all(|b| self.parts.iter().any(|a| a.includes(b))) {
            return true;
        }
        other.subtract(self).is_empty()
    }

    /// Semantic equality.
    pub fn set_eq(&self, other: &Federation) -> bool {
        self.includes(other) && other.includes(self)
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        self.parts.iter().any(|p| p.contains(v))
    }

    /// `{ν | ∃δ ≥ 0. ν + δ ∈ F}`.
    pub fn past(&self) -> Federation {
        self.map_parts(|p| Some(p.down()))
    }

    /// `{ν + δ | ν ∈ F, δ ≥ 0}`.
    pub fn future(&self) -> Federation {
        self.map_parts(|p| Some(p.up()))
    }

    /// `{ν[R] | ν ∈ F}`.
    pub fn reset(&self, clocks: &[ClockId]) -> Federation {
        self.map_parts(|p| {
            let mut d = p.clone();
            for &x in clocks {
                d = d.reset(x);
            }
            Some(d)
        })
    }

    /// `{ν | ν[R] ∈ F}`, computed as `free_R(F ∩ {R = 0})`.
    pub fn inverse_reset(&self, clocks: &[ClockId]) -> Federation {
        if clocks.is_empty() {
            return self.clone();
        }
        self.map_parts(|p| {
            let mut d = p.clone();
            for &x in clocks {
                d = d.constrain(x, 0, Bound::LE_ZERO)?;
            }
            for &x in clocks {
                d = d.free(x);
            }
            Some(d)
        })
    }

    pub fn extrapolate(&self, max: &[i32]) -> Federation {
        self.map_parts(|p| Some(p.extrapolate(max)))
    }

    pub fn embed(&self, map: &[ClockId], dim: usize) -> Federation {
        let mut out = Federation::empty(dim);
        for p in &self.parts {
            out.add_part(p.embed(map, dim));
        }
        out
    }

    /// Existential projection onto the listed clocks.
    pub fn project(&self, map: &[ClockId]) -> Federation {
        let mut out = Federation::empty(map.len());
        for p in &self.parts {
            out.add_part(p.project(map));
        }
        out
    }

    /// A deterministic member of the first part, or `None` on ∅.
    pub fn sample(&self) -> Option<Valuation> {
        self.parts.first().map(|p| p.sample())
    }

    /// Delay windows into each part, in part order.
    pub fn delay_windows(&self, v: &Valuation) -> Vec<Window> {
        self.parts.iter().filter_map(|p| p.delay_window(v)).collect()
    }

    pub fn max_constant(&self) -> i32 {
        self.parts.iter().map(|p| p.max_constant()).max().unwrap_or(0)
    }

    pub fn is_canonical(&self) -> bool {
        self.parts.iter().all(|p| p.is_canonical())
    }

    pub fn has_diagonal(&self) -> bool {
        self.parts.iter().any(|p| p.has_diagonal())
    }
}

/// Pushes the disjoint pieces of `a \ b` onto `out`.
fn dbm_minus(a: &Dbm, b: &Dbm, out: &mut Vec<Dbm>) {
    if a.intersect(b).is_none() {
        out.push(a.clone());
        return;
    }
    let mut rest = a.clone();
    for (i, j, bnd) in b.constraints() {
        if bnd >= rest.get(i, j) {
            continue;
        }
        if let Some(piece) = rest.clone().constrain(j, i, bnd.negate()) {
            out.push(piece);
        }
        match rest.constrain(i, j, bnd) {
            Some(r) => rest = r,
            None => return,
        }
    }
}
