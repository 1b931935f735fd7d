use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::semantics::{rdy, Side};
use crate::syntax::{make_disjoint, CommittedTst, Polarity, Tst};
use crate::zones::{clock_ids, fed_from_guard, ClockMap, Valuation, Q};

/// An event of a timed trace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Delay(Q),
    Act(Side, Polarity, String),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Delay(d) => write!(f, "delay {}", d),
            Event::Act(s, p, a) => write!(f, "{} {}{}", s.name(), p.sigil(), a),
        }
    }
}

/// The rule applied by a monitoring step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `[M-⊕]`
    Output,
    /// `[M-+]`
    Input,
    /// `[M-Del]`
    Delay,
    /// `[M-FailA]`, or an action by an already culpable participant.
    FailAct(Side),
    /// `[M-FailD]` for each listed participant.
    FailDelay(Vec<Side>),
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Output => write!(f, "M-Out"),
            Rule::Input => write!(f, "M-In"),
            Rule::Delay => write!(f, "M-Del"),
            Rule::FailAct(s) => write!(f, "M-FailA({})", s.name()),
            Rule::FailDelay(ss) => {
                let names: String = ss.iter().map(|s| s.name()).collect();
                write!(f, "M-FailD({})", names)
            }
        }
    }
}

/// `(p, c, ν)`; a culpable participant has term `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorEndpoint {
    term: Option<Tst>,
    buffer: Option<String>,
    clocks: ClockMap,
    val: Valuation,
}

impl MonitorEndpoint {
    pub fn new(p: &Tst) -> MonitorEndpoint {
        let clocks = ClockMap::from_names(p.clocks());
        MonitorEndpoint {
            term: Some(p.clone()),
            buffer: None,
            val: Valuation::zero(clocks.dim()),
            clocks,
        }
    }

    /// `None` once culpable.
    pub fn term(&self) -> Option<&Tst> {
        self.term.as_ref()
    }

    /// The output waiting to be read by the peer.
    pub fn buffer(&self) -> Option<&str> {
        self.buffer.as_deref()
    }

    pub fn clocks(&self) -> &ClockMap {
        &self.clocks
    }

    pub fn valuation(&self) -> &Valuation {
        &self.val
    }

    pub fn is_culpable(&self) -> bool {
        self.term.is_none()
    }

    pub fn is_success(&self) -> bool {
        matches!(self.term.as_ref().map(Tst::head_normal), Some(Tst::Success))
    }

    fn is_internal(&self) -> bool {
        matches!(self.term.as_ref().map(Tst::head_normal), Some(Tst::Internal(_)))
    }

    /// Whether `ν + δ ∈ rdy(p)`; a culpable endpoint never blocks time.
    fn ready_after(&self, delta: &Q) -> bool {
        let Some(t) = &self.term else { return true };
        let v = self.val.delayed(delta);
        rdy(&CommittedTst::Plain(t.clone()), &self.clocks)
            .map(|r| r.contains(&v))
            .unwrap_or(false)
    }

    /// The branch of polarity `pol` labelled `a` whose guard holds now,
    /// with its continuation and resets applied.
    fn fire(&self, pol: Polarity, a: &str) -> Option<(Tst, Valuation)> {
        let t = self.term.as_ref()?.head_normal();
        let (p, bs) = t.branches()?;
        if p != pol {
            return None;
        }
        let b = bs.iter().find(|b| b.action == a)?;
        let g = fed_from_guard(&b.guard, &self.clocks).ok()?;
        if !g.contains(&self.val) {
            return None;
        }
        let r = clock_ids(&self.clocks, &b.resets).ok()?;
        Some((b.cont.clone(), self.val.reset(&r)))
    }
}

impl fmt::Display for MonitorEndpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.term {
            Some(t) => write!(f, "({}, ", t)?,
            None => write!(f, "(⊥, ")?,
        }
        match &self.buffer {
            Some(a) => write!(f, "[!{}], ", a)?,
            None => write!(f, "[], ")?,
        }
        write!(f, "{{")?;
        for (i, name) in self.clocks.names().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", name, self.val.get(i + 1))?;
        }
        write!(f, "}})")
    }
}

/// `γ = (p, c, ν) ‖ (q, d, η)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorConfig {
    pub a: MonitorEndpoint,
    pub b: MonitorEndpoint,
}

impl MonitorConfig {
    /// Both buffers empty, clocks at zero. Clocks shared by name are renamed apart.
    pub fn initial(p: &Tst, q: &Tst) -> MonitorConfig {
        let (p, q) = make_disjoint(p, q);
        MonitorConfig {
            a: MonitorEndpoint::new(&p),
            b: MonitorEndpoint::new(&q),
        }
    }

    pub fn get(&self, s: Side) -> &MonitorEndpoint {
        match s {
            Side::Left => &self.a,
            Side::Right => &self.b,
        }
    }

    fn get_mut(&mut self, s: Side) -> &mut MonitorEndpoint {
        match s {
            Side::Left => &mut self.a,
            Side::Right => &mut self.b,
        }
    }

    pub fn is_success(&self) -> bool {
        self.a.is_success() && self.b.is_success()
    }

    fn act(&self, s: Side, pol: Polarity, a: &str) -> Option<(MonitorConfig, Rule)> {
        let me = self.get(s);
        let peer = self.get(s.other());
        match pol {
            Polarity::Out => {
                if me.buffer.is_some() || peer.buffer.is_some() {
                    return None;
                }
                let (cont, val) = me.fire(pol, a)?;
                let mut next = self.clone();
                let e = next.get_mut(s);
                e.term = Some(cont);
                e.val = val;
                e.buffer = Some(a.into());
                Some((next, Rule::Output))
            }
            Polarity::In => {
                if me.buffer.is_some() || peer.buffer.as_deref() != Some(a) {
                    return None;
                }
                let (cont, val) = me.fire(pol, a)?;
                let mut next = self.clone();
                next.get_mut(s.other()).buffer = None;
                let e = next.get_mut(s);
                e.term = Some(cont);
                e.val = val;
                Some((next, Rule::Input))
            }
        }
    }

    fn must_fail_on_delay(&self, s: Side, delta: &Q) -> bool {
        let me = self.get(s);
        if me.is_culpable() {
            return false;
        }
        match self.get(s.other()).buffer {
            Some(_) => true,
            None => !me.ready_after(delta),
        }
    }
}

impl fmt::Display for MonitorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ‖ {}", self.a, self.b)
    }
}

/// One monitoring step. Total: every event yields exactly one successor.
pub fn mstep(g: &MonitorConfig, e: &Event) -> (MonitorConfig, Rule) {
    match e {
        Event::Act(s, pol, a) => {
            if g.get(*s).is_culpable() {
                return (g.clone(), Rule::FailAct(*s));
            }
            if let Some(r) = g.act(*s, *pol, a) {
                return r;
            }
            let mut next = g.clone();
            next.get_mut(*s).term = None;
            (next, Rule::FailAct(*s))
        }
        Event::Delay(d) => {
            let failing: Vec<Side> = [Side::Left, Side::Right]
                .into_iter()
                .filter(|&s| g.must_fail_on_delay(s, d))
                .collect();
            let mut next = g.clone();
            for s in [Side::Left, Side::Right] {
                let ep = next.get_mut(s);
                ep.val = ep.val.delayed(d);
            }
            if failing.is_empty() {
                return (next, Rule::Delay);
            }
            for &s in &failing {
                next.get_mut(s).term = None;
            }
            (next, Rule::FailDelay(failing))
        }
    }
}

/// Participants whose term is `⊥`.
pub fn culpable(g: &MonitorConfig) -> Vec<Side> {
    [Side::Left, Side::Right]
        .into_iter()
        .filter(|&s| g.get(s).is_culpable())
        .collect()
}

/// Participants expected to move next: not culpable, and either holding an
/// internal choice with an empty own buffer, or facing a non-empty peer buffer.
pub fn on_duty(g: &MonitorConfig) -> Vec<Side> {
    [Side::Left, Side::Right]
        .into_iter()
        .filter(|&s| {
            let me = g.get(s);
            !me.is_culpable() && ((me.is_internal() && me.buffer.is_none()) || g.get(s.other()).buffer.is_some())
        })
        .collect()
}

/// The outcome of a replay.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub success: bool,
    pub culpable: Vec<Side>,
    pub on_duty: Vec<Side>,
}

impl Report {
    pub fn of(g: &MonitorConfig) -> Report {
        Report {
            success: g.is_success(),
            culpable: culpable(g),
            on_duty: on_duty(g),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Replay {
    /// Each event with the rule it triggered and the configuration reached.
    pub steps: Vec<(Event, Rule, MonitorConfig)>,
    pub initial: MonitorConfig,
    pub report: Report,
}

impl Replay {
    pub fn last(&self) -> &MonitorConfig {
        self.steps.last().map(|s| &s.2).unwrap_or(&self.initial)
    }
}

/// Folds [`mstep`] over `events` from the initial configuration of `p` and `q`.
pub fn replay(p: &Tst, q: &Tst, events: &[Event]) -> Replay {
    let initial = MonitorConfig::initial(p, q);
    let mut steps = Vec::with_capacity(events.len());
    let mut cur = initial.clone();
    for e in events {
        let (next, rule) = mstep(&cur, e);
        steps.push((e.clone(), rule, next.clone()));
        cur = next;
    }
    Replay {
        report: Report::of(&cur),
        steps,
        initial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn out(s: Side, a: &str) -> Event {
        Event::Act(s, Polarity::Out, a.into())
    }

    fn inp(s: Side, a: &str) -> Event {
        Event::Act(s, Polarity::In, a.into())
    }

    const A: Side = Side::Left;
    const B: Side = Side::Right;

    fn pair() -> (Tst, Tst) {
        (
            parse("!a{2<t && t<4}").unwrap(),
            parse("?a{2<t && t<5} + ?b{2<t && t<5}").unwrap(),
        )
    }

    #[test]
    fn correct_interaction() {
        let (p, q2) = pair();
        let r = replay(&p, &q2, &[Event::Delay(q(3, 1)), out(A, "a"), inp(B, "a")]);
        assert!(r.report.success);
        assert!(r.report.culpable.is_empty());
        assert!(r.report.on_duty.is_empty());
        let rules: Vec<Rule> = r.steps.iter().map(|s| s.1.clone()).collect();
        assert_eq!(rules, [Rule::Delay, Rule::Output, Rule::Input]);
    }

    #[test]
    fn output_outside_its_guard() {
        // 1.2 is outside 2<t<4, so the output itself is the violation
        let (p, q2) = pair();
        let r = replay(&p, &q2, &[Event::Delay(q(6, 5)), out(A, "a"), inp(B, "a")]);
        assert_eq!(r.steps[1].1, Rule::FailAct(A));
        assert_eq!(r.steps[2].1, Rule::FailAct(B));
        assert_eq!(r.report.culpable, [A, B]);
    }

    #[test]
    fn early_output() {
        let (p, q2) = pair();
        let r = replay(&p, &q2, &[Event::Delay(q(1, 1)), out(A, "a")]);
        assert_eq!(r.report.culpable, [A]);
        assert_eq!(r.last().a.valuation().get(1), &q(1, 1));
    }

    #[test]
    fn expired_choice() {
        let (p, q2) = pair();
        let r = replay(&p, &q2, &[Event::Delay(q(6, 1))]);
        assert_eq!(r.report.culpable, [A]);
        assert_eq!(r.steps[0].1, Rule::FailDelay(alloc::vec![A]));
    }

    #[test]
    fn unread_message() {
        let (p, q2) = pair();
        let r = replay(&p, &q2, &[Event::Delay(q(5, 2)), out(A, "a"), Event::Delay(q(4, 1))]);
        assert_eq!(r.report.culpable, [B]);
        let end = r.last();
        assert!(end.a.is_success());
        assert_eq!(end.a.buffer(), Some("a"));
        assert_eq!(end.b.valuation().get(1), &q(13, 2));
    }

    #[test]
    fn both_culpable() {
        let (p, q2) = (parse("!a").unwrap(), parse("?a").unwrap());
        let r = replay(&p, &q2, &[inp(A, "b"), inp(B, "b")]);
        assert_eq!(r.report.culpable, [A, B]);
        assert!(r.report.on_duty.is_empty());
        // a culpable participant stays culpable
        let r = replay(&p, &q2, &[inp(A, "b"), out(A, "a")]);
        assert!(r.last().a.term().is_none());
    }

    #[test]
    fn duty() {
        let (p, q2) = (parse("!a{t<3}").unwrap(), parse("?a{s<4}").unwrap());
        let g = MonitorConfig::initial(&p, &q2);
        assert_eq!(on_duty(&g), [A]);
        let (g, _) = mstep(&g, &out(A, "a"));
        assert_eq!(on_duty(&g), [B]);
        let one = MonitorConfig::initial(&Tst::Success, &Tst::Success);
        assert!(on_duty(&one).is_empty() && culpable(&one).is_empty() && one.is_success());
        assert!(replay(&Tst::Success, &Tst::Success, &[]).report.success);
    }

    #[test]
    fn recursion_unfolds() {
        let (p, q2) = (parse("rec X . !a{x<=1} . X").unwrap(), parse("rec Y . ?a{y<=1; y} . Y").unwrap());
        let mut ev = Vec::new();
        for _ in 0..3 {
            ev.extend([out(A, "a"), inp(B, "a"), Event::Delay(q(1, 4))]);
        }
        let r = replay(&p, &q2, &ev);
        assert!(r.report.culpable.is_empty());
        assert_eq!(r.report.on_duty, [A]);
        // x is never reset: the fourth round is too late
        let r = replay(&p, &q2, &[Event::Delay(q(2, 1))]);
        assert_eq!(r.report.culpable, [A]);
    }
}
