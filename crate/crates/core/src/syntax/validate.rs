use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::tst::{Branch, Tst};

/// A well-formedness violation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, thiserror::Error)]
pub enum Violation {
    #[error("empty choice")]
    EmptyChoice,
    #[error("duplicate action `{0}` in choice")]
    DuplicateAction(String),
    #[error("unguarded recursion on `{0}`")]
    UnguardedRecursion(String),
    #[error("free variable `{0}`")]
    FreeVariable(String),
}

/// Checks non-empty choices, distinct actions, guarded recursion and closedness.
pub fn validate(p: &Tst) -> Vec<Violation> {
    let mut out = Vec::new();
    check(p, &mut Vec::new(), &mut out);
    for x in p.free_vars() {
        out.push(Violation::FreeVariable(x));
    }
    out
}

/// `chain` holds the binders not yet separated from the current point by a prefix.
fn check(p: &Tst, chain: &mut Vec<String>, out: &mut Vec<Violation>) {
    match p {
        Tst::Success => {}
        Tst::Var(x) => {
            if chain.iter().any(|y| y == x) {
                out.push(Violation::UnguardedRecursion(x.clone()));
            }
        }
        Tst::Rec(x, body) => {
            if !chain.is_empty() {
                out.push(Violation::UnguardedRecursion(x.clone()));
            }
            chain.push(x.clone());
            check(body, chain, out);
            chain.pop();
        }
        Tst::Internal(bs) | Tst::External(bs) => check_branches(bs, out),
    }
}

fn check_branches(bs: &[Branch], out: &mut Vec<Violation>) {
    if bs.is_empty() {
        out.push(Violation::EmptyChoice);
    }
    let mut seen = BTreeSet::new();
    for b in bs {
        if !seen.insert(b.action.as_str()) {
            out.push(Violation::DuplicateAction(b.action.clone()));
        }
        check(&b.cont, &mut Vec::new(), out);
    }
}
