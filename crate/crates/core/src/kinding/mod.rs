//! Kind inference, admissibility of a compliant, the canonical compliant and
//! subtyping.
//!
//! The kind of `p` is the set of clock valuations from which `p` admits a
//! compliant partner.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{Branch, Guard, Tst};
use crate::verify::{compliant, VerifyError};
use crate::zones::{clock_ids, fed_from_guard, fed_to_guard, ClockMap, Federation, Valuation, ZoneError};

/// Upper bound on recursion fixpoint iterations. The iterates form a
/// decreasing chain in a finite lattice, so this is never expected to trip.
pub const FIXPOINT_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KindError {
    #[error("unbound recursion variable `{0}`")]
    Unbound(String),
    #[error("no fixpoint for `{0}` after {cap} iterations", cap = FIXPOINT_CAP)]
    NoFixpoint(String),
    #[error(transparent)]
    Zone(#[from] ZoneError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// `Γ`: kinds of free recursion variables.
#[derive(Clone, Debug, Default)]
pub struct KindEnv {
    map: BTreeMap<String, Federation>,
}

impl KindEnv {
    pub fn new() -> KindEnv {
        KindEnv::default()
    }

    pub fn get(&self, x: &str) -> Option<&Federation> {
        self.map.get(x)
    }

    pub fn bind(&self, x: &str, k: Federation) -> KindEnv {
        let mut e = self.clone();
        e.map.insert(x.into(), k);
        e
    }
}

/// A kind together with the clocks it ranges over.
#[derive(Clone, Debug)]
pub struct Kind {
    pub clocks: ClockMap,
    pub set: Federation,
}

impl Kind {
    pub fn contains_zero(&self) -> bool {
        self.set.contains(&Valuation::zero(self.clocks.dim()))
    }

    pub fn to_guard(&self) -> Guard {
        fed_to_guard(&self.set, &self.clocks)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_guard())
    }
}

/// Records every iterate of each recursion fixpoint, for inspection.
pub trait FixpointObserver {
    fn iterate(&mut self, var: &str, k: &Federation);
}

impl FixpointObserver for () {
    fn iterate(&mut self, _: &str, _: &Federation) {}
}

struct Inference<'a> {
    clocks: &'a ClockMap,
    observer: &'a mut dyn FixpointObserver,
}

impl Inference<'_> {
    fn dim(&self) -> usize {
        self.clocks.dim()
    }

    /// `⟦g⟧` and `K↓R⁻¹` for one branch.
    fn branch_sets(&mut self, b: &Branch, env: &KindEnv) -> Result<(Federation, Federation), KindError> {
        let g = fed_from_guard(&b.guard, self.clocks)?;
        let k = self.infer(&b.cont, env)?;
        let r = clock_ids(self.clocks, &b.resets)?;
        Ok((g, k.inverse_reset(&r)))
    }

    fn infer(&mut self, p: &Tst, env: &KindEnv) -> Result<Federation, KindError> {
        let dim = self.dim();
        match p {
            Tst::Success => Ok(Federation::universe(dim)),
            Tst::External(bs) => {
                let mut k = Federation::empty(dim);
                for b in bs {
                    let (g, kr) = self.branch_sets(b, env)?;
                    k = k.union(&g.intersect(&kr).past());
                }
                Ok(k)
            }
            Tst::Internal(bs) => {
                let mut ready = Federation::empty(dim);
                let mut errors = Federation::empty(dim);
                for b in bs {
                    let (g, kr) = self.branch_sets(b, env)?;
                    ready = ready.union(&g.past());
                    errors = errors.union(&g.subtract(&kr).past());
                }
                Ok(ready.subtract(&errors))
            }
            Tst::Var(x) => env.get(x).cloned().ok_or_else(|| KindError::Unbound(x.clone())),
            Tst::Rec(x, body) => self.fixpoint(x, body, env),
        }
    }

    /// `⊓ᵢ F̂ⁱ(Val)`: iterates from `Val` until two successive ones coincide.
    fn fixpoint(&mut self, x: &str, body: &Tst, env: &KindEnv) -> Result<Federation, KindError> {
        let mut k = Federation::universe(self.dim());
        for _ in 0..FIXPOINT_CAP {
            let next = self.infer(body, &env.bind(x, k.clone()))?;
            debug_assert!(k.includes(&next), "kind iterates must decrease");
            let next = next.intersect(&k);
            self.observer.iterate(x, &next);
            if next.includes(&k) {
                return Ok(k);
            }
            k = next;
        }
        Err(KindError::NoFixpoint(x.into()))
    }

    fn dual(&mut self, p: &Tst, env: &KindEnv) -> Result<Tst, KindError> {
        Ok(match p {
            Tst::Success => Tst::Success,
            Tst::Var(x) => {
                if env.get(x).is_none() {
                    return Err(KindError::Unbound(x.clone()));
                }
                Tst::Var(x.clone())
            }
            Tst::Internal(bs) => {
                let mut out = Vec::with_capacity(bs.len());
                for b in bs {
                    out.push(Branch {
                        cont: self.dual(&b.cont, env)?,
                        ..b.clone()
                    });
                }
                Tst::External(out)
            }
            Tst::External(bs) => {
                let mut out = Vec::with_capacity(bs.len());
                for b in bs {
                    let k = self.infer(&b.cont, env)?;
                    let r = clock_ids(self.clocks, &b.resets)?;
                    let extra = k.inverse_reset(&r);
                    let own = fed_from_guard(&b.guard, self.clocks)?;
                    // keep the printed guard small when one side implies the other
                    let guard = if extra.includes(&own) {
                        b.guard.clone()
                    } else if own.includes(&extra) {
                        fed_to_guard(&extra, self.clocks)
                    } else {
                        Guard::and_simplified(b.guard.clone(), fed_to_guard(&extra, self.clocks))
                    };
                    out.push(Branch {
                        action: b.action.clone(),
                        guard,
                        resets: b.resets.clone(),
                        cont: self.dual(&b.cont, env)?,
                    });
                }
                Tst::Internal(out)
            }
            Tst::Rec(x, body) => {
                let k = self.fixpoint(x, body, env)?;
                Tst::Rec(x.clone(), Box::new(self.dual(body, &env.bind(x, k))?))
            }
        })
    }
}

/// The kind of `p` under `env`, over `clocks` (which must cover the clocks of `p`).
pub fn kind_infer(p: &Tst, env: &KindEnv, clocks: &ClockMap) -> Result<Federation, KindError> {
    Inference { clocks, observer: &mut () }.infer(p, env)
}

/// Like [`kind_infer`], reporting every fixpoint iterate to `observer`.
pub fn kind_infer_observed(
    p: &Tst,
    env: &KindEnv,
    clocks: &ClockMap,
    observer: &mut dyn FixpointObserver,
) -> Result<Federation, KindError> {
    Inference { clocks, observer }.infer(p, env)
}

/// The kind of a closed term over its own clocks.
pub fn kind(p: &Tst) -> Result<Kind, KindError> {
    let clocks = ClockMap::from_names(p.clocks());
    let set = kind_infer(p, &KindEnv::new(), &clocks)?;
    Ok(Kind { clocks, set })
}

/// Whether some TST is compliant with `p`: the initial valuation is in its kind.
pub fn admits_compliant(p: &Tst) -> Result<(bool, Kind), KindError> {
    let k = kind(p)?;
    Ok((k.contains_zero(), k))
}

/// `co(p)`, the canonical compliant of a closed term. Clocks are shared with
/// `p`; the compliance checker renames them apart.
pub fn dual(p: &Tst) -> Result<Tst, KindError> {
    let clocks = ClockMap::from_names(p.clocks());
    Inference {
        clocks: &clocks,
        observer: &mut (),
    }
    .dual(p, &KindEnv::new())
}

/// `p ⊑ q`: every compliant of `q` is a compliant of `p`.
pub fn subtype(p: &Tst, q: &Tst) -> Result<bool, KindError> {
    if !admits_compliant(q)?.0 {
        return Ok(true);
    }
    Ok(compliant(p, &dual(q)?)?.compliant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_guard};

    fn fed(g: &str, clocks: &ClockMap) -> Federation {
        fed_from_guard(&parse_guard(g).unwrap(), clocks).unwrap()
    }

    fn kind_of(p: &str) -> Kind {
        kind(&parse(p).unwrap()).unwrap()
    }

    #[test]
    fn success_is_everything() {
        let k = kind_of("1");
        assert!(k.set.set_eq(&Federation::universe(1)));
        assert!(k.contains_zero());
    }

    #[test]
    fn internal_choice_with_error_branch() {
        let k = kind_of("!a{x<=2} (+) !b{x<=1} . ?a{x<=0}");
        assert!(k.set.set_eq(&fed("x>1 && x<=2", &k.clocks)));
        assert!(!k.contains_zero());
    }

    #[test]
    fn external_sequence() {
        let k = kind_of("?a{x<=2} . ?b{x<=1}");
        assert!(k.set.set_eq(&fed("x<=1", &k.clocks)));
    }

    #[test]
    fn inadmissible_terms() {
        for p in [
            "!a{x<=2} . !b{x<=1}",
            "rec X . ?a{x<=1 && y<=1} . !a{x<=1; x} . X",
            "!zip{y<10} . ( ?weather{y<7} + ?abort{y<5} )",
        ] {
            assert!(!admits_compliant(&parse(p).unwrap()).unwrap().0, "{}", p);
        }
    }

    #[test]
    fn recursion_reaches_a_fixpoint() {
        struct Count(usize, Vec<Federation>);
        impl FixpointObserver for Count {
            fn iterate(&mut self, _: &str, k: &Federation) {
                self.0 += 1;
                self.1.push(k.clone());
            }
        }
        let p = parse("rec X . ?a{x<=1 && y<=1} . !a{x<=1; x} . X").unwrap();
        let clocks = ClockMap::from_names(p.clocks());
        let mut c = Count(0, Vec::new());
        let k = kind_infer_observed(&p, &KindEnv::new(), &clocks, &mut c).unwrap();
        assert!(k.is_empty());
        assert!(c.0 >= 2);
        for w in c.1.windows(2) {
            assert!(w[0].includes(&w[1]));
        }
    }

    #[test]
    fn unbound_variables() {
        let p = parse("rec X . !a . X").unwrap();
        let Tst::Rec(_, body) = p else { unreachable!() };
        let c = ClockMap::new();
        assert_eq!(kind_infer(&body, &KindEnv::new(), &c), Err(KindError::Unbound("X".into())));
        let k = kind_infer(&body, &KindEnv::new().bind("X", Federation::universe(1)), &c).unwrap();
        assert!(k.set_eq(&Federation::universe(1)));
    }

    #[test]
    fn dual_of_external_sequence() {
        let q = parse("?a{x<=2} . ?b{x<=1}").unwrap();
        let d = dual(&q).unwrap();
        let Tst::Internal(bs) = &d else { panic!("{}", d) };
        let c = ClockMap::from_names(["x"]);
        assert!(fed_from_guard(&bs[0].guard, &c).unwrap().set_eq(&fed("x<=1", &c)));
        let Tst::Internal(bs2) = &bs[0].cont else { panic!() };
        assert!(fed_from_guard(&bs2[0].guard, &c).unwrap().set_eq(&fed("x<=1", &c)));
        assert!(compliant(&q, &d).unwrap().compliant);
    }

    #[test]
    fn dual_keeps_output_guards() {
        let p = parse("!a{x<3; x} . ?b{x>1}").unwrap();
        let d = dual(&p).unwrap();
        let Tst::External(bs) = &d else { panic!() };
        assert_eq!(bs[0].guard, parse_guard("x<3").unwrap());
        assert_eq!(dual(&Tst::Success).unwrap(), Tst::Success);
    }

    #[test]
    fn subtyping() {
        let p1 = parse("!a{x<=2} . !b{x<=1}").unwrap();
        let r = parse("?a{t<5} . !b{t<3}").unwrap();
        assert!(subtype(&r, &p1).unwrap());
        assert!(subtype(&r, &r).unwrap());
        let q1 = parse("?a{x<=2} . ?b{x<=1}").unwrap();
        let prompt = parse("!a{x<=1} . !b{x<=1}").unwrap();
        assert!(subtype(&q1, &dual(&prompt).unwrap()).unwrap());
    }
}
