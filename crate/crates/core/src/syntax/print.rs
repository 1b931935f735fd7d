use core::fmt;

use super::tst::{Branch, CommittedTst, Polarity, Tst};

fn fmt_annotation(b: &Branch, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if b.guard.is_true() && b.resets.is_empty() {
        return Ok(());
    }
    write!(f, "{{")?;
    if !b.guard.is_true() {
        write!(f, "{}", b.guard)?;
    }
    if !b.resets.is_empty() {
        write!(f, "; ")?;
        for (i, r) in b.resets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", r)?;
        }
    }
    write!(f, "}}")
}

fn fmt_branch(pol: Polarity, b: &Branch, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}{}", pol.sigil(), b.action)?;
    fmt_annotation(b, f)?;
    if b.cont != Tst::Success {
        write!(f, " . ")?;
        fmt_cont(&b.cont, f)?;
    }
    Ok(())
}

/// Continuations are single prefixes; anything wider gets parentheses.
fn fmt_cont(t: &Tst, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Tst::Internal(bs) | Tst::External(bs) if bs.len() == 1 => fmt_tst(t, f),
        Tst::Success | Tst::Var(_) => fmt_tst(t, f),
        _ => {
            write!(f, "( ")?;
            fmt_tst(t, f)?;
            write!(f, " )")
        }
    }
}

fn fmt_tst(t: &Tst, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Tst::Success => write!(f, "1"),
        Tst::Var(x) => write!(f, "{}", x),
        Tst::Rec(x, body) => {
            write!(f, "rec {} . ", x)?;
            fmt_tst(body, f)
        }
        Tst::Internal(bs) | Tst::External(bs) => {
            let (pol, sep) = match t {
                Tst::Internal(_) => (Polarity::Out, " (+) "),
                _ => (Polarity::In, " + "),
            };
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    write!(f, "{}", sep)?;
                }
                fmt_branch(pol, b, f)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Tst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tst(self, f)
    }
}

impl fmt::Display for CommittedTst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommittedTst::Plain(t) => fmt_tst(t, f),
            CommittedTst::Committed(b) => {
                write!(f, "[")?;
                write!(f, "!{}", b.action)?;
                fmt_annotation(b, f)?;
                write!(f, "] ")?;
                fmt_cont(&b.cont, f)
            }
        }
    }
}
