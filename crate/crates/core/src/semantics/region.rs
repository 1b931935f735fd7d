//! Finite quotients of timed transition systems by region equivalence.
//!
//! A state is a discrete part plus a point valuation. Points are normalised to
//! a canonical representative of their region, so that the reachable part of
//! the quotient can be explored by plain graph search.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::zones::{ClockId, Valuation, Q};

/// A timed system whose discrete transitions and delays only depend on the
/// region of the current valuation.
pub trait RegionSystem {
    type State: Clone + Ord;

    /// Joint clock dimension, reference clock included.
    fn dim(&self) -> usize;

    fn initial(&self) -> Self::State;

    /// Discrete successors at `v`, each with the clocks it resets.
    fn actions(&self, s: &Self::State, v: &Valuation) -> Vec<(Self::State, Vec<ClockId>)>;

    /// Whether `v` lies in the (past-closed) set of valuations time may reach.
    fn may_delay_to(&self, s: &Self::State, v: &Valuation) -> bool;

    fn is_success(&self, s: &Self::State) -> bool;

    /// Clocks whose value may still be read before being reset; `mask[0]` is ignored.
    fn active(&self, s: &Self::State) -> Vec<bool>;
}

/// How valuations are abstracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionScheme {
    /// Diagonal-free guards: per-clock maximal constants.
    PerClock(Vec<i32>),
    /// Guards with clock differences: one global constant for values and differences.
    Diagonal(i32),
}

impl RegionScheme {
    fn bound(&self, x: ClockId) -> i32 {
        match self {
            RegionScheme::PerClock(m) => m[x],
            RegionScheme::Diagonal(d) => *d,
        }
    }

    /// The canonical representative of the region of `v`, ignoring inactive clocks.
    pub fn normalize(&self, v: &Valuation, active: &[bool]) -> Valuation {
        let n = v.dim();
        let mut vals: Vec<Q> = (0..n)
            .map(|i| if i > 0 && active[i] { v.get(i).clone() } else { Q::zero() })
            .collect();
        match self {
            RegionScheme::PerClock(m) => {
                for i in 1..n {
                    if vals[i] > Q::from_integer(m[i].into()) {
                        vals[i] = Q::from_integer((m[i] + 1).into());
                    }
                }
            }
            RegionScheme::Diagonal(d) => compress_gaps(&mut vals, active, *d),
        }
        rank_fractions(&mut vals, active, self);
        let mut out = Valuation::zero(n);
        for (i, x) in vals.into_iter().enumerate() {
            out.set(i, x);
        }
        out
    }

    /// Whether some bounded active clock sits on an integer.
    fn on_boundary(&self, v: &Valuation, active: &[bool]) -> bool {
        (1..v.dim()).any(|i| {
            active[i] && *v.get(i) <= Q::from_integer(self.bound(i).into()) && v.get(i).is_integer()
        })
    }

    /// The least positive delay at which a bounded active clock hits an integer.
    fn next_event(&self, v: &Valuation, active: &[bool]) -> Option<Q> {
        let mut best: Option<Q> = None;
        for i in 1..v.dim() {
            if !active[i] {
                continue;
            }
            let x = v.get(i);
            let next = x.floor() + Q::one();
            if next > Q::from_integer(self.bound(i).into()) {
                continue;
            }
            let d = next - x;
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
        best
    }
}

/// Shrinks every gap wider than `d + 1` between consecutive values of
/// `{0} ∪ active clocks`, by whole units. Differences of at most `d`, and all
/// fractional parts, are preserved.
fn compress_gaps(vals: &mut [Q], active: &[bool], d: i32) {
    let mut order: Vec<usize> = (1..vals.len()).filter(|&i| active[i]).collect();
    order.sort_by(|&a, &b| vals[a].cmp(&vals[b]));
    let limit = Q::from_integer((d + 1).into());
    let mut prev_orig = Q::zero();
    let mut prev_new = Q::zero();
    for i in order {
        let orig = vals[i].clone();
        let gap = &orig - &prev_orig;
        let new_gap = if gap > limit {
            let shrink = gap.floor() - &limit;
            gap - shrink
        } else {
            gap
        };
        let new = &prev_new + new_gap;
        prev_orig = orig;
        prev_new = new.clone();
        vals[i] = new;
    }
}

/// Replaces fractional parts of the clocks that regions distinguish by
/// `rank / (m + 1)`, keeping integer parts and zero fractions.
fn rank_fractions(vals: &mut [Q], active: &[bool], scheme: &RegionScheme) {
    let tracked: Vec<usize> = (1..vals.len())
        .filter(|&i| {
            active[i]
                && match scheme {
                    RegionScheme::PerClock(m) => vals[i] <= Q::from_integer(m[i].into()),
                    RegionScheme::Diagonal(_) => true,
                }
        })
        .collect();
    let mut fracs: Vec<Q> = tracked
        .iter()
        .map(|&i| fract(&vals[i]))
        .filter(|f| !f.is_zero())
        .collect();
    fracs.sort();
    fracs.dedup();
    let m = fracs.len() as i64;
    for &i in &tracked {
        let f = fract(&vals[i]);
        if f.is_zero() {
            continue;
        }
        let rank = fracs.binary_search(&f).expect("fraction was collected") as i64 + 1;
        vals[i] = vals[i].floor() + Q::new(rank.into(), (m + 1).into());
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("region graph exceeds {0} nodes")]
    TooLarge(usize),
}

/// The explored region quotient.
#[derive(Clone, Debug)]
pub struct RegionGraph<S> {
    pub nodes: Vec<(S, Valuation)>,
    /// Discrete successors.
    pub tau: Vec<Vec<usize>>,
    /// The next region reachable by letting time pass, if time may pass.
    pub delay: Vec<Option<usize>>,
    /// BFS parent of every node but the root.
    pub parent: Vec<Option<usize>>,
    pub success: Vec<bool>,
    pub deadlock: Vec<bool>,
}

impl<S> RegionGraph<S> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The first deadlocked node in exploration order.
    pub fn first_deadlock(&self) -> Option<usize> {
        self.deadlock.iter().position(|&d| d)
    }

    /// Node indices from the root to `n`.
    pub fn path_to(&self, mut n: usize) -> Vec<usize> {
        let mut path = vec![n];
        while let Some(p) = self.parent[n] {
            path.push(p);
            n = p;
        }
        path.reverse();
        path
    }
}

fn delay_successor<Y: RegionSystem>(sys: &Y, scheme: &RegionScheme, s: &Y::State, v: &Valuation) -> Option<Valuation> {
    let active = sys.active(s);
    let delta = match scheme.next_event(v, &active) {
        Some(e) if scheme.on_boundary(v, &active) => e / Q::from_integer(2.into()),
        Some(e) => e,
        None if scheme.on_boundary(v, &active) => Q::new(One::one(), 2.into()),
        // Every clock is past its bound: delaying stays in this region.
        None => return None,
    };
    let w = v.delayed(&delta);
    if !sys.may_delay_to(s, &w) {
        return None;
    }
    Some(scheme.normalize(&w, &active))
}

/// Breadth-first exploration of the region quotient from `(initial, 0)`.
pub fn explore<Y: RegionSystem>(sys: &Y, scheme: &RegionScheme, limit: usize) -> Result<RegionGraph<Y::State>, OracleError> {
    let mut index: BTreeMap<(Y::State, Valuation), usize> = BTreeMap::new();
    let mut g = RegionGraph {
        nodes: Vec::new(),
        tau: Vec::new(),
        delay: Vec::new(),
        parent: Vec::new(),
        success: Vec::new(),
        deadlock: Vec::new(),
    };
    let s0 = sys.initial();
    let v0 = scheme.normalize(&Valuation::zero(sys.dim()), &sys.active(&s0));
    let mut intern = |g: &mut RegionGraph<Y::State>, s: Y::State, v: Valuation, parent: Option<usize>| -> Result<usize, OracleError> {
        if let Some(&i) = index.get(&(s.clone(), v.clone())) {
            return Ok(i);
        }
        if g.nodes.len() >= limit {
            return Err(OracleError::TooLarge(limit));
        }
        let i = g.nodes.len();
        index.insert((s.clone(), v.clone()), i);
        g.success.push(sys.is_success(&s));
        g.nodes.push((s, v));
        g.tau.push(Vec::new());
        g.delay.push(None);
        g.parent.push(parent);
        Ok(i)
    };
    intern(&mut g, s0, v0, None)?;
    let mut next = 0;
    while next < g.nodes.len() {
        let (s, v) = g.nodes[next].clone();
        let mut succ = Vec::new();
        for (t, resets) in sys.actions(&s, &v) {
            let w = scheme.normalize(&v.reset(&resets), &sys.active(&t));
            succ.push(intern(&mut g, t, w, Some(next))?);
        }
        succ.sort_unstable();
        succ.dedup();
        g.tau[next] = succ;
        if let Some(w) = delay_successor(sys, scheme, &s, &v) {
            if w != v {
                let j = intern(&mut g, s, w, Some(next))?;
                g.delay[next] = Some(j);
            }
        }
        next += 1;
    }
    g.deadlock = deadlocks(&g);
    Ok(g)
}

/// A node deadlocks if it is not successful and neither it nor any node along
/// its delay chain has a discrete successor.
fn deadlocks<S>(g: &RegionGraph<S>) -> Vec<bool> {
    let n = g.len();
    // 0 unknown, 1 can move, 2 stuck
    let mut memo = vec![0u8; n];
    for start in 0..n {
        if memo[start] != 0 {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = Some(start);
        let mut verdict = 2u8;
        while let Some(c) = cur {
            if memo[c] != 0 {
                verdict = memo[c];
                break;
            }
            if chain.contains(&c) {
                break;
            }
            chain.push(c);
            if !g.tau[c].is_empty() {
                verdict = 1;
                break;
            }
            cur = g.delay[c];
        }
        for c in chain {
            memo[c] = verdict;
        }
    }
    (0..n).map(|i| !g.success[i] && memo[i] == 2).collect()
}

fn fract(x: &Q) -> Q {
    x - x.floor()
}
