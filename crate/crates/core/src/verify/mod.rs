//! Zone-graph exploration of two-automata networks and the compliance check
//! built on it.

mod explore;
mod network;
mod witness;

use alloc::vec;

pub use explore::{search, Abstraction, CheckOptions, Node, Search, SearchError, SearchOrder};
pub use network::{Move, NetState, Network, Transition};
pub use witness::{Counterexample, SymbolicStep};

use crate::encoding::{encode_with_clocks, EncodingError, TimedAutomaton};
use crate::syntax::{make_disjoint, to_denf, FreshVars, Tst};
use crate::zones::{ClockMap, ZoneError};

/// Name of the internal clock measuring absolute time in counterexamples.
const GLOBAL_CLOCK: &str = "@t";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("term is not closed")]
    Open,
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Zone(#[from] ZoneError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Result of a compliance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub compliant: bool,
    /// Symbolic states stored during the search.
    pub states: usize,
    /// Present exactly when not compliant.
    pub counterexample: Option<Counterexample>,
}

/// The automaton of `p` over its own clocks, with equation variables drawn
/// from `prefix`.
pub fn automaton(p: &Tst, prefix: &str) -> Result<TimedAutomaton, VerifyError> {
    if !p.is_closed() {
        return Err(VerifyError::Open);
    }
    let d = to_denf(p, &mut FreshVars::for_tst(prefix, p));
    Ok(encode_with_clocks(&d, &ClockMap::from_names(p.clocks()))?)
}

/// The network of a pair after renaming clocks apart, with the renamed terms.
pub fn network(p: &Tst, q: &Tst, extra: &[&str]) -> Result<(Network, Tst, Tst), VerifyError> {
    let (p, q) = make_disjoint(p, q);
    let a = automaton(&p, "L")?;
    let b = automaton(&q, "R")?;
    let net = Network::new(&a, &b, extra)?;
    Ok((net, p, q))
}

/// Extrapolation with per-clock maximal constants; split normalisation when
/// some guard relates two clocks.
pub fn abstraction_for(net: &Network, p: &Tst, q: &Tst) -> Abstraction {
    let mut max = vec![0i32; net.dim()];
    for t in [p, q] {
        for (x, c) in t.clock_constants() {
            if let Some(i) = net.clocks.id(&x) {
                max[i] = max[i].max(c as i32);
            }
        }
    }
    let diagonals = net.diagonal_constraints();
    if diagonals.is_empty() {
        Abstraction::Extrapolate(max)
    } else {
        Abstraction::Split { max, diagonals }
    }
}

/// Decides `p ⋈ q`, without a state budget.
pub fn compliant(p: &Tst, q: &Tst) -> Result<Verdict, VerifyError> {
    check_with(p, q, &CheckOptions::default())
}

/// Decides `p ⋈ q` with explicit search options.
pub fn check_with(p: &Tst, q: &Tst, opts: &CheckOptions) -> Result<Verdict, VerifyError> {
    let (net, p2, q2) = network(p, q, &[])?;
    let abs = abstraction_for(&net, &p2, &q2);
    let s = search(&net, &abs, opts)?;
    let Some(dead) = s.deadlock else {
        return Ok(Verdict {
            compliant: true,
            states: s.nodes.len(),
            counterexample: None,
        });
    };
    let path = s.path_to(dead);
    let (timed, _, _) = network(p, q, &[GLOBAL_CLOCK])?;
    Ok(Verdict {
        compliant: false,
        states: s.nodes.len(),
        counterexample: witness::extract(&timed, &path),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{oracle_compliant, replay, Configuration};
    use crate::syntax::parse;

    fn check(p: &str, q: &str) -> Verdict {
        compliant(&parse(p).unwrap(), &parse(q).unwrap()).unwrap()
    }

    fn replays_to_deadlock(p: &str, q: &str, v: &Verdict) -> bool {
        let (p, q) = make_disjoint(&parse(p).unwrap(), &parse(q).unwrap());
        let c = Configuration::initial(&p, &q).unwrap();
        let cx = v.counterexample.as_ref().expect("counterexample");
        replay(&c, &cx.trace).map(|end| end.is_deadlock()).unwrap_or(false)
    }

    const PAIRS: &[(&str, &str, bool)] = &[
        ("?a{t<5} . !b{t<3}", "!a{t<2} . ?b{t<3}", true),
        ("?a{t<5} . !b{t<3}", "!a{t<5} . ?b{t<3}", false),
        ("rec X . ( !a (+) !b{x<=1} . ?c . X )", "?a + ?b{y<=1} . !c{y>1} . ?a", true),
        ("rec X . ( !a{c==2; c} . X (+) !b{t<7} )", "rec Y . ( ?a{r>1 && r<5; r} . Y + ?b{r<7} )", true),
        ("?zip{;x} . ( !weather{5<x && x<10} (+) !abort{x<1} )", "!zip{;y} . ( ?weather{y<7} + ?abort{y<5} )", false),
        ("rec X . !a{x<=1} . X", "rec X . ?a{x<=1; x} . X", true),
        ("!a{x<=2} . !b{x<=1}", "?a{x<=2} . ?b{x<=1}", false),
        ("1", "1", true),
        ("!a", "1", false),
        ("?a{; y} . !b{x-y<1 && x<3}", "!a{z<1} . ?b", true),
        ("?a{; y} . !b{x-y>=1 && x<3}", "!a{z<1} . ?b", false),
    ];

    #[test]
    fn verdicts() {
        for &(p, q, expect) in PAIRS {
            let v = check(p, q);
            assert_eq!(v.compliant, expect, "{} vs {}", p, q);
            assert_eq!(v.counterexample.is_some(), !expect);
        }
    }

    #[test]
    fn agrees_with_region_oracle() {
        for &(p, q, _) in PAIRS {
            let (p, q) = (parse(p).unwrap(), parse(q).unwrap());
            assert_eq!(compliant(&p, &q).unwrap().compliant, oracle_compliant(&p, &q).unwrap());
        }
    }

    #[test]
    fn counterexamples_replay() {
        for &(p, q, expect) in PAIRS {
            if !expect {
                assert!(replays_to_deadlock(p, q, &check(p, q)), "{} vs {}", p, q);
            }
        }
    }

    #[test]
    fn counterexample_shape() {
        let v = check("?a{t<5} . !b{t<3}", "!a{t<5} . ?b{t<3}");
        let cx = v.counterexample.unwrap();
        assert!(cx.symbolic[0].mv.is_none());
        assert!(cx.symbolic.iter().all(|s| !s.zone.contains('@')));
        let text: Vec<String> = cx.trace.iter().map(|s| alloc::format!("{}", s)).collect();
        assert!(text.contains(&"B !a".into()), "{:?}", text);
        assert!(text.contains(&"A ?a".into()), "{:?}", text);
    }

    #[test]
    fn order_and_abstraction_do_not_change_verdicts() {
        for &(p, q, expect) in PAIRS {
            let (p, q) = (parse(p).unwrap(), parse(q).unwrap());
            let dfs = CheckOptions {
                order: SearchOrder::DepthFirst,
                ..CheckOptions::default()
            };
            assert_eq!(check_with(&p, &q, &dfs).unwrap().compliant, expect);
            let exact = CheckOptions {
                abstraction: false,
                max_states: 5_000,
                ..CheckOptions::default()
            };
            if let Ok(v) = check_with(&p, &q, &exact) {
                assert_eq!(v.compliant, expect);
            }
        }
    }

    #[test]
    fn budget() {
        let (p, q) = (parse("rec X . !a{x<=1} . X").unwrap(), parse("rec X . ?a{x<=1; x} . X").unwrap());
        let opts = CheckOptions {
            max_states: 2,
            ..CheckOptions::default()
        };
        assert_eq!(check_with(&p, &q, &opts), Err(VerifyError::Search(SearchError::Budget(2))));
        assert_eq!(compliant(&Tst::var("X"), &p), Err(VerifyError::Open));
    }

    #[test]
    fn success_states_never_deadlock() {
        let (net, _, _) = network(&parse("1").unwrap(), &parse("1").unwrap(), &[]).unwrap();
        let s = net.initial();
        assert!(net.is_success(s.locs));
        assert!(net.deadlock_zone(&s).is_empty());
        assert!(net.successors(&s).is_empty());
    }

    #[test]
    fn urgent_locations_do_not_elapse() {
        let (net, _, _) = network(&parse("!a{x<3}").unwrap(), &parse("?a").unwrap(), &[]).unwrap();
        let s = net.initial();
        assert!(net.is_urgent(s.locs));
        assert!(s.zone.set_eq(&crate::zones::Federation::zero(net.dim())));
        let succ = net.successors(&s);
        assert_eq!(succ.len(), 1);
        // at τX time passes up to the invariant x<3
        assert!(!net.is_urgent(succ[0].1.locs));
        assert!(!succ[0].1.zone.set_eq(&crate::zones::Federation::zero(net.dim())));
    }
}
