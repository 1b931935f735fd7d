//! Guards and timed session types: abstract syntax, concrete syntax,
//! well-formedness and the defining-equation normal form.

mod denf;
mod guard;
mod parse;
mod print;
mod tst;
mod validate;

pub use denf::{to_denf, to_denf_default, Denf, DenfBody, DenfBranch, DenfError, FreshVars};
pub use guard::{CmpOp, Guard};
pub use parse::{parse, parse_guard, parse_unchecked, Pos, SyntaxError, MAX_GUARD_CONSTANT};
pub use tst::{make_disjoint, Branch, CommittedTst, Polarity, Tst};
pub use validate::{validate, Violation};

/// One unfolding step of a recursion binder.
pub fn unfold(p: &Tst) -> Tst {
    p.unfold()
}

/// Largest guard constant of `p`.
pub fn max_constant(p: &Tst) -> u32 {
    p.max_constant()
}

/// Appends `suffix` to every clock of `p`.
pub fn rename_clocks(p: &Tst, suffix: &str) -> Tst {
    p.rename_clocks(suffix)
}
