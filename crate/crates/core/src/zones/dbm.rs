use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::bound::Bound;
use super::clocks::{ClockId, Valuation};
use super::Q;

/// A difference bound matrix. Entry `(i, j)` bounds `xi - xj`.
///
/// Values of this type are kept canonical and non-empty; operations that may
/// produce the empty set return `Option<Dbm>`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dbm {
    dim: usize,
    m: Vec<Bound>,
}

/// The set of delays `δ >= 0` leading a valuation into a zone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Q,
    pub lo_strict: bool,
    /// `None` means unbounded.
    pub hi: Option<Q>,
    pub hi_strict: bool,
}

impl Window {
    pub fn contains(&self, d: &Q) -> bool {
        let lo_ok = if self.lo_strict { *d > self.lo } else { *d >= self.lo };
        let hi_ok = match &self.hi {
            None => true,
            Some(h) => {
                if self.hi_strict {
                    d < h
                } else {
                    d <= h
                }
            }
        };
        lo_ok && hi_ok
    }

    /// A deterministic member: the lower end if closed, otherwise nudged
    /// inside by `min(1/2, width/2)`.
    pub fn pick(&self) -> Q {
        if !self.lo_strict {
            return self.lo.clone();
        }
        let half = Q::new(1.into(), 2.into());
        let step = match &self.hi {
            None => half,
            Some(h) => {
                let w = (h - &self.lo) / Q::from_integer(2.into());
                if w < half {
                    w
                } else {
                    half
                }
            }
        };
        &self.lo + step
    }
}

impl Dbm {
    /// All valuations: every clock nonnegative.
    pub fn universe(dim: usize) -> Dbm {
        let mut m = vec![Bound::INF; dim * dim];
        for j in 0..dim {
            m[j] = Bound::LE_ZERO;
            m[j * dim + j] = Bound::LE_ZERO;
        }
        Dbm { dim, m }
    }

    /// The single valuation with every clock at zero.
    pub fn zero(dim: usize) -> Dbm {
        Dbm {
            dim,
            m: vec![Bound::LE_ZERO; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    /// Builds a canonical DBM from raw entries; `None` if empty.
    pub fn from_raw(dim: usize, entries: Vec<Bound>) -> Option<Dbm> {
        assert_eq!(entries.len(), dim * dim);
        let mut d = Dbm { dim, m: entries };
        for i in 0..dim {
            if d.get(i, i) > Bound::LE_ZERO {
                d.set(i, i, Bound::LE_ZERO);
            }
        }
        if d.close() {
            Some(d)
        } else {
            None
        }
    }

    /// Floyd-Warshall closure. Returns false if the matrix denotes ∅.
    pub fn close(&mut self) -> bool {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let ik = self.get(i, k);
                if ik.is_inf() {
                    continue;
                }
                for j in 0..n {
                    let kj = self.get(k, j);
                    if kj.is_inf() {
                        continue;
                    }
                    let s = ik.add(kj);
                    if s < self.get(i, j) {
                        self.set(i, j, s);
                    }
                }
            }
            if self.get(k, k) < Bound::LE_ZERO {
                return false;
            }
        }
        (0..n).all(|i| self.get(i, i) >= Bound::LE_ZERO)
    }

    /// Intersects with `xi - xj ≺ b`, keeping canonical form.
    pub fn constrain(mut self, i: usize, j: usize, b: Bound) -> Option<Dbm> {
        if b >= self.get(i, j) {
            return Some(self);
        }
        if self.get(j, i).add(b) < Bound::LE_ZERO {
            return None;
        }
        self.set(i, j, b);
        let n = self.dim;
        for k in 0..n {
            let ki = self.get(k, i);
            if ki.is_inf() {
                continue;
            }
            let kij = ki.add(b);
            for l in 0..n {
                let jl = self.get(j, l);
                if jl.is_inf() {
                    continue;
                }
                let s = kij.add(jl);
                if s < self.get(k, l) {
                    self.set(k, l, s);
                }
            }
        }
        Some(self)
    }

    pub fn intersect(&self, other: &Dbm) -> Option<Dbm> {
        debug_assert_eq!(self.dim, other.dim);
        let mut d = self.clone();
        let mut changed = false;
        for (a, b) in d.m.iter_mut().zip(other.m.iter()) {
            if *b < *a {
                *a = *b;
                changed = true;
            }
        }
        if !changed {
            return Some(d);
        }
        if d.close() {
            Some(d)
        } else {
            None
        }
    }

    /// `self ⊇ other`, both canonical.
    pub fn includes(&self, other: &Dbm) -> bool {
        self.m.iter().zip(other.m.iter()).all(|(a, b)| b <= a)
    }

    /// Time elapse: removes upper bounds.
    pub fn up(&self) -> Dbm {
        let mut d = self.clone();
        for i in 1..d.dim {
            d.set(i, 0, Bound::INF);
        }
        d
    }

    /// Past: removes lower bounds while keeping clock differences.
    pub fn down(&self) -> Dbm {
        let mut d = self.clone();
        for j in 1..d.dim {
            let mut b = Bound::LE_ZERO;
            for i in 1..d.dim {
                let v = d.get(i, j);
                if v < b {
                    b = v;
                }
            }
            d.set(0, j, b);
        }
        let ok = d.close();
        debug_assert!(ok);
        d
    }

    /// Existentially quantifies clock `x` (any value >= 0).
    pub fn free(&self, x: ClockId) -> Dbm {
        let mut d = self.clone();
        for i in 0..d.dim {
            if i != x {
                d.set(x, i, Bound::INF);
                let b = d.get(i, 0);
                d.set(i, x, b);
            }
        }
        d
    }

    /// Sets clock `x` to zero.
    pub fn reset(&self, x: ClockId) -> Dbm {
        let mut d = self.clone();
        for i in 0..d.dim {
            if i != x {
                let r = d.get(0, i);
                d.set(x, i, r);
                let c = d.get(i, 0);
                d.set(i, x, c);
            }
        }
        d
    }

    /// Classic `Extra_M` with per-clock limits; `max[0]` is ignored.
    pub fn extrapolate(&self, max: &[i32]) -> Dbm {
        let mut d = self.clone();
        let n = d.dim;
        let limit = |k: usize| if k == 0 { 0 } else { max[k] };
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let b = d.get(i, j);
                if b.is_inf() {
                    continue;
                }
                if b > Bound::weak(limit(i)) {
                    d.set(i, j, Bound::INF);
                    changed = true;
                } else if b < Bound::strict(-limit(j)) {
                    d.set(i, j, Bound::strict(-limit(j)));
                    changed = true;
                }
            }
        }
        if changed {
            let ok = d.close();
            debug_assert!(ok);
        }
        d
    }

    /// Adds unconstrained clocks: clock `i` of `self` becomes clock `map[i]`
    /// of a DBM of dimension `dim`.
    pub fn embed(&self, map: &[ClockId], dim: usize) -> Dbm {
        let mut d = Dbm::universe(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let (a, b) = (map[i], map[j]);
                let v = self.get(i, j);
                if v < d.get(a, b) {
                    d.set(a, b, v);
                }
            }
        }
        let ok = d.close();
        debug_assert!(ok);
        d
    }

    /// Keeps the clocks listed in `map` (new clock `k` is old clock `map[k]`).
    pub fn project(&self, map: &[ClockId]) -> Dbm {
        let n = map.len();
        let mut m = Vec::with_capacity(n * n);
        for &i in map {
            for &j in map {
                m.push(self.get(i, j));
            }
        }
        Dbm { dim: n, m }
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let b = self.get(i, j);
                if i == j || b.is_inf() {
                    continue;
                }
                let diff = v.get(i) - v.get(j);
                let c = Q::from_integer(b.value().into());
                let ok = if b.is_weak() { diff <= c } else { diff < c };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Delays `δ >= 0` such that `v + δ` lies in this zone.
    pub fn delay_window(&self, v: &Valuation) -> Option<Window> {
        let n = self.dim;
        for i in 1..n {
            for j in 1..n {
                let b = self.get(i, j);
                if i == j || b.is_inf() {
                    continue;
                }
                let diff = v.get(i) - v.get(j);
                let c = Q::from_integer(b.value().into());
                if !(if b.is_weak() { diff <= c } else { diff < c }) {
                    return None;
                }
            }
        }
        let mut w = Window {
            lo: Q::zero(),
            lo_strict: false,
            hi: None,
            hi_strict: false,
        };
        for i in 1..n {
            let up = self.get(i, 0);
            if !up.is_inf() {
                let h = Q::from_integer(up.value().into()) - v.get(i);
                let strict = up.is_strict();
                let tighter = match &w.hi {
                    None => true,
                    Some(cur) => h < *cur || (h == *cur && strict),
                };
                if tighter {
                    w.hi = Some(h);
                    w.hi_strict = strict;
                }
            }
            let lo = self.get(0, i);
            let l = -Q::from_integer(lo.value().into()) - v.get(i);
            let strict = lo.is_strict();
            if l > w.lo || (l == w.lo && strict) {
                w.lo = l;
                w.lo_strict = strict;
            }
        }
        if let Some(h) = &w.hi {
            if *h < w.lo || (*h == w.lo && (w.hi_strict || w.lo_strict)) {
                return None;
            }
        }
        Some(w)
    }

    /// A deterministic member: clocks are fixed in index order, each at its
    /// lowest admissible value, nudged into open intervals.
    pub fn sample(&self) -> Valuation {
        let n = self.dim;
        let mut vals = vec![Q::zero(); n];
        let half = Q::new(One::one(), 2.into());
        for i in 1..n {
            let mut lo = Q::zero();
            let mut lo_strict = false;
            let mut hi: Option<(Q, bool)> = None;
            for j in 0..i {
                let lb = self.get(j, i);
                if !lb.is_inf() {
                    let l = &vals[j] - Q::from_integer(lb.value().into());
                    if l > lo || (l == lo && lb.is_strict()) {
                        lo = l;
                        lo_strict = lb.is_strict();
                    }
                }
                let ub = self.get(i, j);
                if !ub.is_inf() {
                    let h = &vals[j] + Q::from_integer(ub.value().into());
                    let tighter = match &hi {
                        None => true,
                        Some((c, _)) => h < *c || (h == *c && ub.is_strict()),
                    };
                    if tighter {
                        hi = Some((h, ub.is_strict()));
                    }
                }
            }
            vals[i] = if !lo_strict {
                lo
            } else {
                let step = match &hi {
                    None => half.clone(),
                    Some((h, _)) => {
                        let w = (h - &lo) / Q::from_integer(2.into());
                        if w < half {
                            w
                        } else {
                            half.clone()
                        }
                    }
                };
                lo + step
            };
        }
        let mut v = Valuation::zero(n);
        for (i, x) in vals.into_iter().enumerate() {
            v.set(i, x);
        }
        v
    }

    /// Triangle inequality and diagonal checks.
    pub fn is_canonical(&self) -> bool {
        let n = self.dim;
        for i in 0..n {
            if self.get(i, i) != Bound::LE_ZERO || self.get(0, i) > Bound::LE_ZERO {
                return false;
            }
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, j) > self.get(i, k).add(self.get(k, j)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Largest absolute finite constant.
    pub fn max_constant(&self) -> i32 {
        self.m
            .iter()
            .filter(|b| !b.is_inf())
            .map(|b| b.value().abs())
            .max()
            .unwrap_or(0)
    }

    /// Entries that constrain more than the universe does.
    pub fn constraints(&self) -> Vec<(usize, usize, Bound)> {
        let u = Dbm::universe(self.dim);
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j && self.get(i, j) < u.get(i, j) {
                    out.push((i, j, self.get(i, j)));
                }
            }
        }
        out
    }

    /// Whether some finite constraint relates two non-reference clocks.
    pub fn has_diagonal(&self) -> bool {
        (1..self.dim).any(|i| (1..self.dim).any(|j| i != j && !self.get(i, j).is_inf()))
    }
}

impl core::fmt::Debug for Dbm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Dbm[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
