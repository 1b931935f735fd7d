use alloc::string::String;
use alloc::vec::Vec;

use crate::semantics::{Side, TimedStep};
use crate::zones::{fed_to_guard, ClockId, ClockMap, Federation, Valuation, Q};

use super::network::{Move, NetState, Network};

/// One symbolic step of a counterexample: the move taken and the exact zone
/// reached after it (time elapsed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicStep {
    /// `None` for the initial state.
    pub mv: Option<Move>,
    pub description: String,
    pub left: String,
    pub right: String,
    pub zone: String,
}

/// A counterexample: the symbolic path into a deadlocking state and one
/// concrete timed trace following it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// The initial state first.
    pub symbolic: Vec<SymbolicStep>,
    pub trace: Vec<TimedStep>,
}

/// Rebuilds the exact zones along `path` in `net` and extracts a concrete
/// run ending in a deadlocked valuation. `net` must contain a clock that no
/// guard mentions and no edge resets; it records absolute time.
pub(crate) fn extract(net: &Network, path: &[usize]) -> Option<Counterexample> {
    let dim = net.dim();
    // forward: elapsed zones F and post zones P
    let init = net.initial();
    let zero = Federation::zero(dim).intersect(net.invariant(init.locs));
    let mut states = alloc::vec![init];
    let mut posts = alloc::vec![zero];
    let mut moves = Vec::with_capacity(path.len());
    for &ti in path {
        let s = states.last().expect("nonempty");
        let t = net.transitions(s.locs)[ti].clone();
        let p = net.post(&s.zone, &t);
        if p.is_empty() {
            return None;
        }
        states.push(NetState {
            locs: t.target,
            zone: net.elapse(t.target, &p),
        });
        posts.push(p);
        moves.push(t);
    }
    let k = path.len();
    // backward: B_i are the elapsed valuations that lead to the deadlock,
    // B'_i the post valuations that delay into B_i
    let mut b = alloc::vec![Federation::empty(dim); k + 1];
    let mut bp = alloc::vec![Federation::empty(dim); k + 1];
    b[k] = net.deadlock_zone(&states[k]);
    for i in (0..=k).rev() {
        bp[i] = if net.is_urgent(states[i].locs) {
            posts[i].intersect(&b[i])
        } else {
            posts[i].intersect(&b[i].past())
        };
        if i > 0 {
            let t = &moves[i - 1];
            b[i - 1] = states[i - 1]
                .zone
                .intersect(&t.guard)
                .intersect(&bp[i].inverse_reset(&t.resets));
        }
    }
    if bp[0].is_empty() {
        return None;
    }
    // forward again with concrete valuations
    let mut v = Valuation::zero(dim);
    let mut trace: Vec<TimedStep> = Vec::new();
    for i in 0..=k {
        let d = delay_into(&b[i], &v)?;
        if d > Q::from_integer(0.into()) {
            v = v.delayed(&d);
            match trace.last_mut() {
                Some(TimedStep::Delay(prev)) => *prev += d,
                _ => trace.push(TimedStep::Delay(d)),
            }
        }
        if i < k {
            let t = &moves[i];
            v = v.reset(&t.resets);
            if let Some(l) = net.label_of(t.mv) {
                trace.push(TimedStep::Act(l));
            }
        }
    }
    // clocks whose name starts with `@` are internal and not shown
    let keep: Vec<ClockId> = (0..dim).filter(|&i| i == 0 || !net.clocks.name(i).starts_with('@')).collect();
    let shown = ClockMap::from_names(keep[1..].iter().map(|&i| net.clocks.name(i)));
    let step = |s: &NetState, mv: Option<Move>| SymbolicStep {
        mv,
        description: mv.map(|m| net.describe(m)).unwrap_or_default(),
        left: alloc::format!("{}", net.location_name(Side::Left, s.locs.0)),
        right: alloc::format!("{}", net.location_name(Side::Right, s.locs.1)),
        zone: alloc::format!("{}", fed_to_guard(&s.zone.project(&keep), &shown)),
    };
    let mut symbolic = alloc::vec![step(&states[0], None)];
    for (i, t) in moves.iter().enumerate() {
        symbolic.push(step(&states[i + 1], Some(t.mv)));
    }
    Some(Counterexample { symbolic, trace })
}

/// The least convenient delay taking `v` into `target`: zero when already
/// inside, otherwise a member of the earliest window.
fn delay_into(target: &Federation, v: &Valuation) -> Option<Q> {
    if target.contains(v) {
        return Some(Q::from_integer(0.into()));
    }
    let windows = target.delay_windows(v);
    let w = windows
        .iter()
        .min_by(|a, b| a.lo.cmp(&b.lo).then(a.lo_strict.cmp(&b.lo_strict)))?;
    Some(w.pick())
}
