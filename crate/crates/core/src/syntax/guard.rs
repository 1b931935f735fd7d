use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

use crate::zones::Q;

/// Comparison operators of atomic constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    /// The operator with swapped operands: `c < x` is `x > c`.
    pub fn flip(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
        }
    }

    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }
}

/// Clock constraints: `true`, negation, conjunction, disjunction sugar and
/// atoms `x ∘ c`, `x - y ∘ c` with natural `c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Guard {
    True,
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
    Atom(String, CmpOp, u32),
    Diag(String, String, CmpOp, u32),
}

impl Guard {
    pub fn ff() -> Guard {
        Guard::Not(Box::new(Guard::True))
    }

    pub fn atom(x: &str, op: CmpOp, c: u32) -> Guard {
        Guard::Atom(x.into(), op, c)
    }

    pub fn diag(x: &str, y: &str, op: CmpOp, c: u32) -> Guard {
        Guard::Diag(x.into(), y.into(), op, c)
    }

    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        Guard::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction that drops `true` operands.
    pub fn and_simplified(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::True, g) | (g, Guard::True) => g,
            (a, b) => Guard::and(a, b),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Guard::True)
    }

    pub fn clocks(&self) -> BTreeSet<String> {
        let mut s = BTreeSet::new();
        self.collect_clocks(&mut s);
        s
    }

    pub(crate) fn collect_clocks(&self, s: &mut BTreeSet<String>) {
        match self {
            Guard::True => {}
            Guard::Not(g) => g.collect_clocks(s),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.collect_clocks(s);
                b.collect_clocks(s);
            }
            Guard::Atom(x, _, _) => {
                s.insert(x.clone());
            }
            Guard::Diag(x, y, _, _) => {
                s.insert(x.clone());
                s.insert(y.clone());
            }
        }
    }

    pub fn max_constant(&self) -> u32 {
        match self {
            Guard::True => 0,
            Guard::Not(g) => g.max_constant(),
            Guard::And(a, b) | Guard::Or(a, b) => a.max_constant().max(b.max_constant()),
            Guard::Atom(_, _, c) | Guard::Diag(_, _, _, c) => *c,
        }
    }

    pub fn has_diagonal(&self) -> bool {
        match self {
            Guard::True | Guard::Atom(..) => false,
            Guard::Diag(..) => true,
            Guard::Not(g) => g.has_diagonal(),
            Guard::And(a, b) | Guard::Or(a, b) => a.has_diagonal() || b.has_diagonal(),
        }
    }

    /// Largest constant compared against each clock (diagonals count for both).
    pub fn clock_constants(&self, out: &mut alloc::collections::BTreeMap<String, u32>) {
        match self {
            Guard::True => {}
            Guard::Not(g) => g.clock_constants(out),
            Guard::And(a, b) | Guard::Or(a, b) => {
                a.clock_constants(out);
                b.clock_constants(out);
            }
            Guard::Atom(x, _, c) => {
                let e = out.entry(x.clone()).or_insert(0);
                *e = (*e).max(*c);
            }
            Guard::Diag(x, y, _, c) => {
                for z in [x, y] {
                    let e = out.entry(z.clone()).or_insert(0);
                    *e = (*e).max(*c);
                }
            }
        }
    }

    /// Evaluates the guard; `value` returns `None` for unknown clocks,
    /// which makes the whole evaluation `None`.
    pub fn eval(&self, value: &dyn Fn(&str) -> Option<Q>) -> Option<bool> {
        Some(match self {
            Guard::True => true,
            Guard::Not(g) => !g.eval(value)?,
            Guard::And(a, b) => a.eval(value)? & b.eval(value)?,
            Guard::Or(a, b) => a.eval(value)? | b.eval(value)?,
            Guard::Atom(x, op, c) => op.holds(&value(x)?, &Q::from_integer((*c).into())),
            Guard::Diag(x, y, op, c) => {
                op.holds(&(value(x)? - value(y)?), &Q::from_integer((*c).into()))
            }
        })
    }

    pub fn rename_clocks(&self, f: &dyn Fn(&str) -> String) -> Guard {
        match self {
            Guard::True => Guard::True,
            Guard::Not(g) => Guard::not(g.rename_clocks(f)),
            Guard::And(a, b) => Guard::and(a.rename_clocks(f), b.rename_clocks(f)),
            Guard::Or(a, b) => Guard::or(a.rename_clocks(f), b.rename_clocks(f)),
            Guard::Atom(x, op, c) => Guard::Atom(f(x), *op, *c),
            Guard::Diag(x, y, op, c) => Guard::Diag(f(x), f(y), *op, *c),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec: 0 top, 1 inside ||, 2 inside &&
        match self {
            Guard::True => write!(f, "true"),
            Guard::Atom(x, op, c) => write!(f, "{}{}{}", x, op.symbol(), c),
            Guard::Diag(x, y, op, c) => write!(f, "{}-{}{}{}", x, y, op.symbol(), c),
            Guard::Not(g) => match **g {
                Guard::True => write!(f, "!true"),
                _ => {
                    write!(f, "!(")?;
                    g.fmt_prec(f, 0)?;
                    write!(f, ")")
                }
            },
            Guard::Or(a, b) => {
                let paren = prec > 0;
                if paren {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 1)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Guard::And(a, b) => {
                let paren = prec > 1;
                if paren {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 2)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
