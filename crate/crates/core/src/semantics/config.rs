use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::syntax::{Branch, CommittedTst, Guard, Tst};
use crate::zones::{clock_ids, fed_from_guard, ClockId, ClockMap, Federation, Valuation, Q};

/// One of the two participants of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// `A` for the left participant, `B` for the right one.
    pub fn name(self) -> char {
        match self {
            Side::Left => 'A',
            Side::Right => 'B',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("clock `{0}` is not declared by its endpoint")]
    UndeclaredClock(String),
    #[error("clock `{0}` is shared by both endpoints")]
    SharedClock(String),
    #[error("valuation has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

/// `(p, ν)`: a runtime term with its own clocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endpoint {
    term: CommittedTst,
    clocks: ClockMap,
    val: Valuation,
}

impl Endpoint {
    /// `(p, ν₀)` over the clocks of `p`, in sorted order.
    pub fn new(p: &Tst) -> Endpoint {
        let clocks = ClockMap::from_names(p.clocks());
        let val = Valuation::zero(clocks.dim());
        Endpoint {
            term: CommittedTst::Plain(p.clone()),
            clocks,
            val,
        }
    }

    pub fn with_valuation(term: CommittedTst, clocks: ClockMap, val: Valuation) -> Result<Endpoint, SemanticsError> {
        if val.dim() != clocks.dim() {
            return Err(SemanticsError::Dimension {
                expected: clocks.dim(),
                found: val.dim(),
            });
        }
        let used = match &term {
            CommittedTst::Plain(t) => t.clocks(),
            CommittedTst::Committed(b) => {
                let mut c = b.cont.clocks();
                c.extend(b.guard.clocks());
                c.extend(b.resets.iter().cloned());
                c
            }
        };
        if let Some(x) = used.into_iter().find(|x| clocks.id(x).is_none()) {
            return Err(SemanticsError::UndeclaredClock(x));
        }
        Ok(Endpoint { term, clocks, val })
    }

    pub fn term(&self) -> &CommittedTst {
        &self.term
    }

    pub fn clocks(&self) -> &ClockMap {
        &self.clocks
    }

    pub fn valuation(&self) -> &Valuation {
        &self.val
    }

    pub fn is_success(&self) -> bool {
        matches!(&self.term, CommittedTst::Plain(t) if t.head_normal() == Tst::Success)
    }

    fn holds(&self, g: &Guard) -> bool {
        g.eval(&|x| self.clocks.id(x).map(|i| self.val.get(i).clone()))
            .expect("endpoint clocks cover its term")
    }

    fn fed(&self, g: &Guard) -> Federation {
        fed_from_guard(g, &self.clocks).expect("endpoint clocks cover its term")
    }

    fn resets(&self, b: &Branch) -> Vec<ClockId> {
        clock_ids(&self.clocks, &b.resets).expect("endpoint clocks cover its term")
    }

    fn with(&self, term: CommittedTst, val: Valuation) -> Endpoint {
        Endpoint {
            term,
            clocks: self.clocks.clone(),
            val,
        }
    }

    /// `rdy` of the current term over this endpoint's clocks.
    pub fn rdy(&self) -> Federation {
        rdy(&self.term, &self.clocks).expect("endpoint clocks cover its term")
    }

    /// `(p, ν) -τ-> ([!a{g;R}]p', ν)` for every enabled branch of an internal choice.
    fn commits(&self) -> Vec<(String, Endpoint)> {
        match &self.term {
            CommittedTst::Plain(t) => match t.head_normal() {
                Tst::Internal(bs) => bs
                    .iter()
                    .filter(|b| self.holds(&b.guard))
                    .map(|b| (b.action.clone(), self.with(CommittedTst::Committed(b.clone()), self.val.clone())))
                    .collect(),
                _ => Vec::new(),
            },
            CommittedTst::Committed(_) => Vec::new(),
        }
    }

    /// The committed output `!a` and the endpoint after firing it.
    fn output(&self) -> Option<(String, Endpoint)> {
        match &self.term {
            CommittedTst::Committed(b) => {
                let v = self.val.reset(&self.resets(b));
                Some((b.action.clone(), self.with(CommittedTst::Plain(b.cont.clone()), v)))
            }
            CommittedTst::Plain(_) => None,
        }
    }

    fn input_branch(&self, a: &str) -> Option<Branch> {
        match &self.term {
            CommittedTst::Plain(t) => match t.head_normal() {
                Tst::External(bs) => bs.into_iter().find(|b| b.action == a),
                _ => None,
            },
            CommittedTst::Committed(_) => None,
        }
    }

    /// `(p, ν) -?a-> (p', ν[R])` if the branch exists and its guard holds.
    fn input(&self, a: &str) -> Option<Endpoint> {
        let b = self.input_branch(a)?;
        if !self.holds(&b.guard) {
            return None;
        }
        let v = self.val.reset(&self.resets(&b));
        Some(self.with(CommittedTst::Plain(b.cont), v))
    }

    fn delayed(&self, delta: &Q) -> Endpoint {
        self.with(self.term.clone(), self.val.delayed(delta))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.term, self.val)
    }
}

/// `rdy(p)`: past of the guards for an internal choice, everything for
/// success and external choices, nothing for a committed choice.
pub fn rdy(p: &CommittedTst, clocks: &ClockMap) -> Result<Federation, crate::zones::ZoneError> {
    let dim = clocks.dim();
    match p {
        CommittedTst::Committed(_) => Ok(Federation::empty(dim)),
        CommittedTst::Plain(t) => match t.head_normal() {
            Tst::Internal(bs) => {
                let mut u = Federation::empty(dim);
                for b in &bs {
                    u = u.union(&fed_from_guard(&b.guard, clocks)?);
                }
                Ok(u.past())
            }
            _ => Ok(Federation::universe(dim)),
        },
    }
}

/// A discrete transition of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// An internal choice commits to `!a`.
    Commit(Side, String),
    /// The committed `!a` of the given sender meets the peer's `?a`.
    Sync(Side, String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Commit(s, a) => write!(f, "{} commits !{}", s.name(), a),
            Label::Sync(s, a) => write!(f, "{} !{} | {} ?{}", s.name(), a, s.other().name(), a),
        }
    }
}

/// `(p, ν) | (q, η)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub left: Endpoint,
    pub right: Endpoint,
}

/// A way out of the current configuration: wait `delay`, then fire `label`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Escape {
    pub delay: Q,
    pub label: Label,
}

impl Configuration {
    /// `(p, ν₀) | (q, η₀)`; the clocks of `p` and `q` must be disjoint.
    pub fn initial(p: &Tst, q: &Tst) -> Result<Configuration, SemanticsError> {
        Configuration::new(Endpoint::new(p), Endpoint::new(q))
    }

    pub fn new(left: Endpoint, right: Endpoint) -> Result<Configuration, SemanticsError> {
        if let Some(x) = left.clocks.names().iter().find(|x| right.clocks.id(x).is_some()) {
            return Err(SemanticsError::SharedClock(x.clone()));
        }
        Ok(Configuration { left, right })
    }

    pub fn get(&self, s: Side) -> &Endpoint {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn with(&self, s: Side, e: Endpoint) -> Configuration {
        match s {
            Side::Left => Configuration {
                left: e,
                right: self.right.clone(),
            },
            Side::Right => Configuration {
                left: self.left.clone(),
                right: e,
            },
        }
    }

    pub fn is_success(&self) -> bool {
        self.left.is_success() && self.right.is_success()
    }

    /// Left clocks followed by right clocks.
    pub fn joint_clocks(&self) -> ClockMap {
        self.left.clocks.join(&self.right.clocks)
    }

    pub fn joint_valuation(&self) -> Valuation {
        self.left.val.concat(&self.right.val)
    }

    fn embed(&self, s: Side, f: &Federation) -> Federation {
        let n = self.left.clocks.len();
        let dim = self.left.clocks.dim() + self.right.clocks.len();
        let map: Vec<ClockId> = match s {
            Side::Left => (0..self.left.clocks.dim()).collect(),
            Side::Right => core::iter::once(0).chain((1..self.right.clocks.dim()).map(|i| i + n)).collect(),
        };
        f.embed(&map, dim)
    }

    /// `[S-Del]`: both sides let `delta > 0` pass.
    pub fn delay(&self, delta: &Q) -> Option<Configuration> {
        if *delta <= Q::zero() {
            return None;
        }
        let l = self.left.delayed(delta);
        let r = self.right.delayed(delta);
        if l.rdy().contains(&l.val) && r.rdy().contains(&r.val) {
            Some(Configuration { left: l, right: r })
        } else {
            None
        }
    }

    /// All discrete successors.
    pub fn step(&self) -> Vec<(Label, Configuration)> {
        let mut out = Vec::new();
        for s in [Side::Left, Side::Right] {
            for (a, e) in self.get(s).commits() {
                out.push((Label::Commit(s, a), self.with(s, e)));
            }
        }
        for s in [Side::Left, Side::Right] {
            if let Some((a, sender)) = self.get(s).output() {
                if let Some(receiver) = self.get(s.other()).input(&a) {
                    let c = self.with(s, sender).with(s.other(), receiver);
                    out.push((Label::Sync(s, a), c));
                }
            }
        }
        out
    }

    /// Applies one discrete transition by label.
    pub fn fire(&self, l: &Label) -> Option<Configuration> {
        self.step().into_iter().find(|(m, _)| m == l).map(|(_, c)| c)
    }

    /// For every discrete transition, the joint valuations enabling it.
    fn enabling(&self) -> Vec<(Label, Federation)> {
        let mut out = Vec::new();
        for s in [Side::Left, Side::Right] {
            let e = self.get(s);
            if let CommittedTst::Plain(t) = &e.term {
                if let Tst::Internal(bs) = t.head_normal() {
                    for b in &bs {
                        out.push((Label::Commit(s, b.action.clone()), self.embed(s, &e.fed(&b.guard))));
                    }
                }
            }
        }
        for s in [Side::Left, Side::Right] {
            if let CommittedTst::Committed(b) = &self.get(s).term {
                let peer = self.get(s.other());
                if let Some(ib) = peer.input_branch(&b.action) {
                    out.push((Label::Sync(s, b.action.clone()), self.embed(s.other(), &peer.fed(&ib.guard))));
                }
            }
        }
        out
    }

    /// The least delay after which some transition fires, if any.
    ///
    /// A positive delay must keep both sides within `rdy`; since `rdy` is
    /// closed under past, checking the endpoint suffices.
    pub fn escape(&self) -> Option<Escape> {
        let v = self.joint_valuation();
        let ready = self.embed(Side::Left, &self.left.rdy()).intersect(&self.embed(Side::Right, &self.right.rdy()));
        let mut best: Option<Escape> = None;
        for (label, f) in self.enabling() {
            let cand = if f.contains(&v) {
                Some(Q::zero())
            } else {
                f.intersect(&ready).delay_windows(&v).iter().map(|w| w.pick()).min()
            };
            if let Some(d) = cand {
                if best.as_ref().map_or(true, |b| d < b.delay) {
                    best = Some(Escape { delay: d, label });
                }
            }
        }
        best
    }

    /// Not both successful, and no delay followed by a transition.
    pub fn is_deadlock(&self) -> bool {
        !self.is_success() && self.escape().is_none()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.left, self.right)
    }
}

/// An event of a timed trace of the configuration semantics.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimedStep {
    Delay(Q),
    Act(Label),
}

impl fmt::Display for TimedStep {
    /// Trace-file form: a commit is the sender's `!a`, a synchronisation is
    /// the receiver's `?a`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimedStep::Delay(d) => write!(f, "delay {}", d),
            TimedStep::Act(Label::Commit(s, a)) => write!(f, "{} !{}", s.name(), a),
            TimedStep::Act(Label::Sync(s, a)) => write!(f, "{} ?{}", s.other().name(), a),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {index} (`{step}`) is not enabled")]
pub struct ReplayError {
    pub index: usize,
    pub step: TimedStep,
}

/// Runs a timed trace from `c`.
pub fn replay(c: &Configuration, steps: &[TimedStep]) -> Result<Configuration, ReplayError> {
    let mut cur = c.clone();
    for (index, step) in steps.iter().enumerate() {
        let next = match step {
            TimedStep::Delay(d) => cur.delay(d),
            TimedStep::Act(l) => cur.fire(l),
        };
        cur = next.ok_or_else(|| ReplayError {
            index,
            step: step.clone(),
        })?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn conf(p: &str, q: &str) -> Configuration {
        Configuration::initial(&parse(p).unwrap(), &parse(q).unwrap()).unwrap()
    }

    #[test]
    fn rdy_examples() {
        let c = ClockMap::from_names(["c", "t"]);
        let one = CommittedTst::Plain(Tst::Success);
        assert!(rdy(&one, &c).unwrap().set_eq(&Federation::universe(3)));
        let p = parse("rec X . ( !a{c==2; c} . X (+) !b{t<7} )").unwrap();
        let expect = fed_from_guard(&crate::syntax::parse_guard("c<=2 || t<7").unwrap(), &c).unwrap();
        assert!(rdy(&CommittedTst::Plain(p.clone()), &c).unwrap().set_eq(&expect));
        let Tst::Internal(bs) = p.head_normal() else { unreachable!() };
        assert!(rdy(&CommittedTst::Committed(bs[0].clone()), &c).unwrap().is_empty());
    }

    #[test]
    fn successful_computation() {
        // wait 7, commit to b, synchronise
        let c = conf("!a (+) !b{t>2}", "?b{s>5}");
        let c = c.delay(&q(7, 1)).unwrap();
        let c = c.fire(&Label::Commit(Side::Left, "b".into())).unwrap();
        assert_eq!(c.step().len(), 1);
        let c = c.fire(&Label::Sync(Side::Left, "b".into())).unwrap();
        assert!(c.is_success());
        assert!(c.step().is_empty());
        assert!(!c.is_deadlock());
    }

    #[test]
    fn committed_blocks_time_and_other_actions() {
        let c = conf("!a (+) !b{t>2}", "?b{s>5}");
        let c = c.fire(&Label::Commit(Side::Left, "a".into())).unwrap();
        assert!(c.delay(&q(1, 1)).is_none());
        assert!(c.step().is_empty());
        assert!(c.is_deadlock());
    }

    #[test]
    fn commit_at_the_wrong_time() {
        let c = conf("!a (+) !b{t>2}", "?b{s>5}").delay(&q(3, 1)).unwrap();
        let c = c.fire(&Label::Commit(Side::Left, "b".into())).unwrap();
        assert!(c.is_deadlock());
    }

    #[test]
    fn escape_finds_least_delay() {
        let c = conf("?a{t<5} . !b{t<3}", "!a{s>2 && s<4} . ?b");
        let e = c.escape().unwrap();
        assert_eq!(e.label, Label::Commit(Side::Right, "a".into()));
        assert_eq!(e.delay, q(5, 2));
    }

    #[test]
    fn delay_must_be_positive() {
        let c = conf("?a", "?b");
        assert!(c.delay(&Q::zero()).is_none());
        assert!(c.delay(&q(100, 1)).is_some());
        assert!(c.is_deadlock());
    }

    #[test]
    fn replay_reports_the_failing_step() {
        let c = conf("!a (+) !b{t>2}", "?b{s>5}");
        let ok = [
            TimedStep::Delay(q(6, 1)),
            TimedStep::Act(Label::Commit(Side::Left, "b".into())),
            TimedStep::Act(Label::Sync(Side::Left, "b".into())),
        ];
        assert!(replay(&c, &ok).unwrap().is_success());
        assert_eq!(alloc::format!("{}", ok[2]), "B ?b");
        let bad = [TimedStep::Act(Label::Sync(Side::Left, "b".into()))];
        assert_eq!(replay(&c, &bad).unwrap_err().index, 0);
    }

    #[test]
    fn shared_clocks_are_rejected() {
        let r = Configuration::initial(&parse("!a{x<1}").unwrap(), &parse("?a{x<1}").unwrap());
        assert_eq!(r, Err(SemanticsError::SharedClock("x".into())));
    }
}
