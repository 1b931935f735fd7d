use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::guard::Guard;

/// Polarity of a choice: outputs form internal choices, inputs external ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Out,
    In,
}

impl Polarity {
    pub fn sigil(self) -> char {
        match self {
            Polarity::Out => '!',
            Polarity::In => '?',
        }
    }

    pub fn dual(self) -> Polarity {
        match self {
            Polarity::Out => Polarity::In,
            Polarity::In => Polarity::Out,
        }
    }
}

/// One branch `a{g; R}.p` of a choice.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub action: String,
    pub guard: Guard,
    pub resets: BTreeSet<String>,
    pub cont: Tst,
}

impl Branch {
    pub fn new(action: &str, guard: Guard, resets: &[&str], cont: Tst) -> Branch {
        Branch {
            action: action.into(),
            guard,
            resets: resets.iter().map(|r| String::from(*r)).collect(),
            cont,
        }
    }
}

/// Timed session types.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tst {
    Success,
    Internal(Vec<Branch>),
    External(Vec<Branch>),
    Rec(String, Box<Tst>),
    Var(String),
}

impl Tst {
    pub fn rec(x: &str, body: Tst) -> Tst {
        Tst::Rec(x.into(), Box::new(body))
    }

    pub fn var(x: &str) -> Tst {
        Tst::Var(x.into())
    }

    pub fn choice(pol: Polarity, branches: Vec<Branch>) -> Tst {
        match pol {
            Polarity::Out => Tst::Internal(branches),
            Polarity::In => Tst::External(branches),
        }
    }

    pub fn branches(&self) -> Option<(Polarity, &[Branch])> {
        match self {
            Tst::Internal(bs) => Some((Polarity::Out, bs)),
            Tst::External(bs) => Some((Polarity::In, bs)),
            _ => None,
        }
    }

    /// Clock names used in guards or resets, sorted.
    pub fn clocks(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.walk_branches(&mut |b| {
            b.guard.collect_clocks(&mut s);
            s.extend(b.resets.iter().cloned());
        });
        s
    }

    /// Largest guard constant, 0 if none.
    pub fn max_constant(&self) -> u32 {
        let mut m = 0;
        self.walk_branches(&mut |b| m = m.max(b.guard.max_constant()));
        m
    }

    pub fn has_diagonal(&self) -> bool {
        let mut d = false;
        self.walk_branches(&mut |b| d |= b.guard.has_diagonal());
        d
    }

    /// Largest constant compared with each clock.
    pub fn clock_constants(&self) -> BTreeMap<String, u32> {
        let mut m = BTreeMap::new();
        self.walk_branches(&mut |b| b.guard.clock_constants(&mut m));
        m
    }

    /// Visits every branch, outermost first.
    pub fn walk_branches<'a>(&'a self, f: &mut dyn FnMut(&'a Branch)) {
        match self {
            Tst::Success | Tst::Var(_) => {}
            Tst::Rec(_, b) => b.walk_branches(f),
            Tst::Internal(bs) | Tst::External(bs) => {
                for b in bs {
                    f(b);
                    b.cont.walk_branches(f);
                }
            }
        }
    }

    /// Every variable name occurring in the term, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.collect_vars(&mut s);
        s
    }

    fn collect_vars(&self, s: &mut BTreeSet<String>) {
        match self {
            Tst::Success => {}
            Tst::Var(x) => {
                s.insert(x.clone());
            }
            Tst::Rec(x, b) => {
                s.insert(x.clone());
                b.collect_vars(s);
            }
            Tst::Internal(bs) | Tst::External(bs) => {
                for b in bs {
                    b.cont.collect_vars(s);
                }
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Tst::Success => BTreeSet::new(),
            Tst::Var(x) => {
                let mut s = BTreeSet::new();
                s.insert(x.clone());
                s
            }
            Tst::Rec(x, b) => {
                let mut s = b.free_vars();
                s.remove(x);
                s
            }
            Tst::Internal(bs) | Tst::External(bs) => {
                bs.iter().flat_map(|b| b.cont.free_vars()).collect()
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding substitution `self{x ↦ s}`.
    pub fn subst(&self, x: &str, s: &Tst) -> Tst {
        match self {
            Tst::Success => Tst::Success,
            Tst::Var(y) => {
                if y == x {
                    s.clone()
                } else {
                    self.clone()
                }
            }
            Tst::Rec(y, body) => {
                if y == x {
                    return self.clone();
                }
                let fv = s.free_vars();
                if fv.contains(y) && body.free_vars().contains(x) {
                    let mut avoid = fv;
                    avoid.extend(body.all_vars());
                    avoid.insert(x.into());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.subst(y, &Tst::Var(fresh.clone()));
                    Tst::Rec(fresh, Box::new(renamed.subst(x, s)))
                } else {
                    Tst::Rec(y.clone(), Box::new(body.subst(x, s)))
                }
            }
            Tst::Internal(bs) => Tst::Internal(subst_branches(bs, x, s)),
            Tst::External(bs) => Tst::External(subst_branches(bs, x, s)),
        }
    }

    /// One unfolding step: `rec X.p` becomes `p{X ↦ rec X.p}`; other terms are unchanged.
    pub fn unfold(&self) -> Tst {
        match self {
            Tst::Rec(x, body) => body.subst(x, self),
            _ => self.clone(),
        }
    }

    /// Unfolds until the head is not a recursion binder.
    ///
    /// Terminates on valid terms since recursion is guarded.
    pub fn head_normal(&self) -> Tst {
        let mut t = self.clone();
        let mut fuel = 1024;
        while let Tst::Rec(..) = t {
            t = t.unfold();
            fuel -= 1;
            assert!(fuel > 0, "unguarded recursion");
        }
        t
    }

    /// Appends `suffix` to every clock name.
    pub fn rename_clocks(&self, suffix: &str) -> Tst {
        self.map_clocks(&|c| format!("{}{}", c, suffix))
    }

    pub fn map_clocks(&self, f: &dyn Fn(&str) -> String) -> Tst {
        let map_bs = |bs: &[Branch]| {
            bs.iter()
                .map(|b| Branch {
                    action: b.action.clone(),
                    guard: b.guard.rename_clocks(f),
                    resets: b.resets.iter().map(|r| f(r)).collect(),
                    cont: b.cont.map_clocks(f),
                })
                .collect()
        };
        match self {
            Tst::Success | Tst::Var(_) => self.clone(),
            Tst::Rec(x, b) => Tst::Rec(x.clone(), Box::new(b.map_clocks(f))),
            Tst::Internal(bs) => Tst::Internal(map_bs(bs)),
            Tst::External(bs) => Tst::External(map_bs(bs)),
        }
    }

    /// Nesting depth of prefixes.
    pub fn depth(&self) -> usize {
        match self {
            Tst::Success | Tst::Var(_) => 0,
            Tst::Rec(_, b) => b.depth(),
            Tst::Internal(bs) | Tst::External(bs) => {
                1 + bs.iter().map(|b| b.cont.depth()).max().unwrap_or(0)
            }
        }
    }
}

fn subst_branches(bs: &[Branch], x: &str, s: &Tst) -> Vec<Branch> {
    bs.iter()
        .map(|b| Branch {
            action: b.action.clone(),
            guard: b.guard.clone(),
            resets: b.resets.clone(),
            cont: b.cont.subst(x, s),
        })
        .collect()
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut i = 0usize;
    loop {
        let cand = format!("{}_{}", base, i);
        if !avoid.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// A runtime term: a plain TST or a committed choice `[!a{g;R}]p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CommittedTst {
    Plain(Tst),
    Committed(Branch),
}

impl From<Tst> for CommittedTst {
    fn from(t: Tst) -> Self {
        CommittedTst::Plain(t)
    }
}

/// Clocks of both terms would clash: returns the pair renamed with `_L`/`_R`
/// suffixes, or the inputs unchanged when already disjoint.
pub fn make_disjoint(p: &Tst, q: &Tst) -> (Tst, Tst) {
    let cp = p.clocks();
    let cq = q.clocks();
    if cp.is_disjoint(&cq) {
        (p.clone(), q.clone())
    } else {
        (p.rename_clocks("_L"), q.rename_clocks("_R"))
    }
}
