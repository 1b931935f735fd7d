use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::guard::Guard;
use super::tst::{Polarity, Tst};

/// A flat branch `a{g; R}.X` of a defining equation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DenfBranch {
    pub action: String,
    pub guard: Guard,
    pub resets: BTreeSet<String>,
    pub target: String,
}

/// Right-hand side of a defining equation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DenfBody {
    Success,
    Internal(Vec<DenfBranch>),
    External(Vec<DenfBranch>),
}

impl DenfBody {
    pub fn branches(&self) -> &[DenfBranch] {
        match self {
            DenfBody::Success => &[],
            DenfBody::Internal(bs) | DenfBody::External(bs) => bs,
        }
    }

    pub fn polarity(&self) -> Option<Polarity> {
        match self {
            DenfBody::Success => None,
            DenfBody::Internal(_) => Some(Polarity::Out),
            DenfBody::External(_) => Some(Polarity::In),
        }
    }

    fn rename(&mut self, from: &str, to: &str) {
        if let DenfBody::Internal(bs) | DenfBody::External(bs) = self {
            for b in bs {
                if b.target == from {
                    b.target = to.into();
                }
            }
        }
    }
}

/// Defining-equation normal form: a start variable and its equations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Denf {
    pub start: String,
    pub equations: BTreeMap<String, DenfBody>,
}

/// A problem found by [`Denf::check`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DenfError {
    #[error("variable `{0}` is used but not defined")]
    Undefined(String),
    #[error("equation `{0}` has an empty choice")]
    EmptyChoice(String),
    #[error("equation `{0}` repeats action `{1}`")]
    DuplicateAction(String, String),
}

impl Denf {
    /// Closedness and branch-set conditions.
    pub fn check(&self) -> Result<(), DenfError> {
        if !self.equations.contains_key(&self.start) {
            return Err(DenfError::Undefined(self.start.clone()));
        }
        for (x, body) in &self.equations {
            if let DenfBody::Internal(bs) | DenfBody::External(bs) = body {
                if bs.is_empty() {
                    return Err(DenfError::EmptyChoice(x.clone()));
                }
                let mut seen = BTreeSet::new();
                for b in bs {
                    if !seen.insert(&b.action) {
                        return Err(DenfError::DuplicateAction(x.clone(), b.action.clone()));
                    }
                    if !self.equations.contains_key(&b.target) {
                        return Err(DenfError::Undefined(b.target.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn body(&self, x: &str) -> &DenfBody {
        &self.equations[x]
    }

    /// Equations reachable from the start variable, in breadth-first order.
    pub fn reachable(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(self.start.clone());
        seen.insert(self.start.clone());
        while let Some(x) = queue.pop_front() {
            for b in self.equations[&x].branches() {
                if seen.insert(b.target.clone()) {
                    queue.push_back(b.target.clone());
                }
            }
            order.push(x);
        }
        order
    }
}

impl fmt::Display for Denf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {}", self.start)?;
        for (x, body) in &self.equations {
            write!(f, "{} = ", x)?;
            match body {
                DenfBody::Success => write!(f, "1")?,
                DenfBody::Internal(bs) | DenfBody::External(bs) => {
                    let (sig, sep) = if matches!(body, DenfBody::Internal(_)) {
                        ('!', " (+) ")
                    } else {
                        ('?', " + ")
                    };
                    for (i, b) in bs.iter().enumerate() {
                        if i > 0 {
                            write!(f, "{}", sep)?;
                        }
                        write!(f, "{}{}", sig, b.action)?;
                        if !b.guard.is_true() || !b.resets.is_empty() {
                            write!(f, "{{")?;
                            if !b.guard.is_true() {
                                write!(f, "{}", b.guard)?;
                            }
                            if !b.resets.is_empty() {
                                let rs: Vec<&str> = b.resets.iter().map(|s| s.as_str()).collect();
                                write!(f, "; {}", rs.join(","))?;
                            }
                            write!(f, "}}")?;
                        }
                        write!(f, " . {}", b.target)?;
                    }
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Deterministic supply of variable names `{prefix}{n}` avoiding a given set.
#[derive(Clone, Debug)]
pub struct FreshVars {
    prefix: String,
    next: usize,
    avoid: BTreeSet<String>,
}

impl FreshVars {
    pub fn new(prefix: &str, avoid: BTreeSet<String>) -> FreshVars {
        FreshVars {
            prefix: prefix.into(),
            next: 0,
            avoid,
        }
    }

    /// A supply avoiding every variable of `p`.
    pub fn for_tst(prefix: &str, p: &Tst) -> FreshVars {
        FreshVars::new(prefix, p.all_vars())
    }

    pub fn next_var(&mut self) -> String {
        loop {
            let v = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if !self.avoid.contains(&v) {
                return v;
            }
        }
    }
}

/// The normal-form transformation: one equation per choice and per success,
/// recursion binders replaced by the start variable of their body.
pub fn to_denf(p: &Tst, fresh: &mut FreshVars) -> Denf {
    let mut eqs = BTreeMap::new();
    let start = nf(p, fresh, &mut eqs);
    Denf {
        start,
        equations: eqs,
    }
}

/// Convenience wrapper with prefix `X`.
pub fn to_denf_default(p: &Tst) -> Denf {
    to_denf(p, &mut FreshVars::for_tst("X", p))
}

fn nf(p: &Tst, fresh: &mut FreshVars, eqs: &mut BTreeMap<String, DenfBody>) -> String {
    match p {
        Tst::Success => {
            let x = fresh.next_var();
            eqs.insert(x.clone(), DenfBody::Success);
            x
        }
        Tst::Var(x) => x.clone(),
        Tst::Rec(x, body) => {
            let mut inner = BTreeMap::new();
            let start = nf(body, fresh, &mut inner);
            for b in inner.values_mut() {
                b.rename(x, &start);
            }
            eqs.extend(inner);
            start
        }
        Tst::Internal(bs) | Tst::External(bs) => {
            let x0 = fresh.next_var();
            let flat: Vec<DenfBranch> = bs
                .iter()
                .map(|b| DenfBranch {
                    action: b.action.clone(),
                    guard: b.guard.clone(),
                    resets: b.resets.clone(),
                    target: nf(&b.cont, fresh, eqs),
                })
                .collect();
            let body = if matches!(p, Tst::Internal(_)) {
                DenfBody::Internal(flat)
            } else {
                DenfBody::External(flat)
            };
            eqs.insert(x0.clone(), body);
            x0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse;

    #[test]
    fn flat_choice() {
        let d = to_denf_default(&parse("!a (+) !b").unwrap());
        assert_eq!(d.start, "X0");
        assert_eq!(d.equations.len(), 3);
        let bs = d.body("X0").branches();
        assert_eq!((bs[0].target.as_str(), bs[1].target.as_str()), ("X1", "X2"));
        assert_eq!(d.body("X1"), &DenfBody::Success);
        d.check().unwrap();
    }

    #[test]
    fn nested_recursion() {
        let d = to_denf_default(&parse("rec X . !a . rec Y . ( !b . X (+) !c . Y )").unwrap());
        assert_eq!(d.equations.len(), 2);
        let s = &d.start;
        let x1 = &d.body(s).branches()[0].target;
        let bs = d.body(x1).branches();
        assert_eq!(&bs[0].target, s);
        assert_eq!(&bs[1].target, x1);
        d.check().unwrap();
    }

    #[test]
    fn shadowed_binder() {
        let d = to_denf_default(&parse("rec X . ( !a . (rec X . !b . X) (+) !c . X )").unwrap());
        let s = d.start.clone();
        let bs = d.body(&s).branches();
        assert_eq!(bs[1].target, s);
        let inner = &bs[0].target;
        assert_eq!(&d.body(inner).branches()[0].target, inner);
    }

    #[test]
    fn fresh_names_avoid_term_variables() {
        let d = to_denf_default(&parse("rec X0 . !a . X0").unwrap());
        assert_eq!(d.start, "X1");
        d.check().unwrap();
    }
}
