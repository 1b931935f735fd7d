use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::guard::{CmpOp, Guard};
use super::tst::{Branch, Polarity, Tst};
use super::validate::{validate, Violation};

/// Position of a syntax error (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{}:{}: {msg}", pos.line, pos.col)]
    Parse { pos: Pos, msg: String },
    #[error("invalid TST: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    parts.join("; ")
}

/// Upper bound for guard constants, keeping DBM arithmetic in range.
pub const MAX_GUARD_CONSTANT: u32 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Bang,
    Query,
    Dot,
    LBrace,
    RBrace,
    Semi,
    Comma,
    LParen,
    RParen,
    IntSep,
    ExtSep,
    AndAnd,
    OrOr,
    Cmp(CmpOp),
    Minus,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{}`", s),
        Tok::Nat(n) => format!("number `{}`", n),
        Tok::Bang => "`!`".into(),
        Tok::Query => "`?`".into(),
        Tok::Dot => "`.`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::IntSep => "`(+)`".into(),
        Tok::ExtSep => "`+`".into(),
        Tok::AndAnd => "`&&`".into(),
        Tok::OrOr => "`||`".into(),
        Tok::Cmp(op) => format!("`{}`", op.symbol()),
        Tok::Minus => "`-`".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| SyntaxError::Parse {
        pos: Pos { line, col },
        msg,
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' if chars.get(i + 1) == Some(&'+') && chars.get(i + 2) == Some(&')') => {
                adv = 3;
                Some(Tok::IntSep)
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '+' => Some(Tok::ExtSep),
            '-' => Some(Tok::Minus),
            '?' => Some(Tok::Query),
            '&' if chars.get(i + 1) == Some(&'&') => {
                adv = 2;
                Some(Tok::AndAnd)
            }
            '|' if chars.get(i + 1) == Some(&'|') => {
                adv = 2;
                Some(Tok::OrOr)
            }
            '!' => Some(Tok::Bang),
            '<' | '>' | '=' => {
                let eq = chars.get(i + 1) == Some(&'=');
                if eq {
                    adv = 2;
                }
                Some(Tok::Cmp(match (c, eq) {
                    ('<', false) => CmpOp::Lt,
                    ('<', true) => CmpOp::Le,
                    ('>', false) => CmpOp::Gt,
                    ('>', true) => CmpOp::Ge,
                    _ => CmpOp::Eq,
                }))
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                let mut n: u64 = 0;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    n = n * 10 + chars[j].to_digit(10).unwrap() as u64;
                    if n > MAX_GUARD_CONSTANT as u64 {
                        return Err(err(line, col, "constant too large".into()));
                    }
                    j += 1;
                }
                adv = j - i;
                Some(Tok::Nat(n as u32))
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                adv = j - i;
                Some(Tok::Ident(chars[i..j].iter().collect()))
            }
            other => return Err(err(line, col, format!("unexpected character `{}`", other))),
        };
        if let Some(t) = tok {
            out.push((t, pos));
        }
        i += adv;
        col += adv;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1.clone()
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: String) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse {
            pos: self.pos(),
            msg,
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", describe(&t), describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "rec" && s != "true" => {
                self.bump();
                Ok(s)
            }
            t => self.fail(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn tst(&mut self) -> Result<Tst, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if s == "rec" => self.rec(),
            Tok::Bang | Tok::Query => self.choice(),
            _ => self.atom_tst(),
        }
    }

    fn rec(&mut self) -> Result<Tst, SyntaxError> {
        self.bump();
        let x = self.ident()?;
        self.expect(Tok::Dot)?;
        let body = self.tst()?;
        Ok(Tst::Rec(x, Box::new(body)))
    }

    fn atom_tst(&mut self) -> Result<Tst, SyntaxError> {
        match self.peek().clone() {
            Tok::Nat(1) => {
                self.bump();
                Ok(Tst::Success)
            }
            Tok::Ident(s) if s != "rec" && s != "true" => {
                self.bump();
                Ok(Tst::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.tst()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => self.fail(format!("expected a TST, found {}", describe(&t))),
        }
    }

    /// A continuation: a single prefix, a binder, or an atomic term.
    fn cont(&mut self) -> Result<Tst, SyntaxError> {
        match self.peek() {
            Tok::Ident(s) if s == "rec" => self.rec(),
            Tok::Bang | Tok::Query => {
                let (pol, b) = self.branch()?;
                Ok(Tst::choice(pol, alloc::vec![b]))
            }
            _ => self.atom_tst(),
        }
    }

    fn choice(&mut self) -> Result<Tst, SyntaxError> {
        let (pol, first) = self.branch()?;
        let mut bs = alloc::vec![first];
        let mut sep: Option<Tok> = None;
        loop {
            let t = self.peek().clone();
            if t != Tok::IntSep && t != Tok::ExtSep {
                break;
            }
            if let Some(s) = &sep {
                if *s != t {
                    return self.fail("mixed `(+)` and `+` in one choice".into());
                }
            }
            let want = if pol == Polarity::Out { Tok::IntSep } else { Tok::ExtSep };
            if t != want {
                return self.fail(format!(
                    "{} separates {} branches",
                    describe(&t),
                    if pol == Polarity::Out { "output" } else { "input" }
                ));
            }
            sep = Some(t);
            self.bump();
            let pos = self.pos();
            let (p2, b) = self.branch()?;
            if p2 != pol {
                return Err(SyntaxError::Parse {
                    pos,
                    msg: "inputs and outputs mixed in one choice".into(),
                });
            }
            bs.push(b);
        }
        Ok(Tst::choice(pol, bs))
    }

    fn branch(&mut self) -> Result<(Polarity, Branch), SyntaxError> {
        let pol = match self.bump() {
            Tok::Bang => Polarity::Out,
            Tok::Query => Polarity::In,
            t => return self.fail(format!("expected `!` or `?`, found {}", describe(&t))),
        };
        let action = self.ident()?;
        let (guard, resets) = if *self.peek() == Tok::LBrace {
            self.annotation()?
        } else {
            (Guard::True, BTreeSet::new())
        };
        let cont = if *self.peek() == Tok::Dot {
            self.bump();
            self.cont()?
        } else {
            Tst::Success
        };
        Ok((
            pol,
            Branch {
                action,
                guard,
                resets,
                cont,
            },
        ))
    }

    fn annotation(&mut self) -> Result<(Guard, BTreeSet<String>), SyntaxError> {
        self.expect(Tok::LBrace)?;
        let guard = match self.peek() {
            Tok::Semi | Tok::RBrace => Guard::True,
            _ => self.guard()?,
        };
        let mut resets = BTreeSet::new();
        if *self.peek() == Tok::Semi {
            self.bump();
            if *self.peek() != Tok::RBrace {
                resets.insert(self.ident()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    resets.insert(self.ident()?);
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok((guard, resets))
    }

    fn guard(&mut self) -> Result<Guard, SyntaxError> {
        let mut g = self.conj()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let r = self.conj()?;
            g = Guard::or(g, r);
        }
        Ok(g)
    }

    fn conj(&mut self) -> Result<Guard, SyntaxError> {
        let mut g = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let r = self.unary()?;
            g = Guard::and(g, r);
        }
        Ok(g)
    }

    fn unary(&mut self) -> Result<Guard, SyntaxError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Guard::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Guard::True)
            }
            _ => self.comparison(),
        }
    }

    fn cterm(&mut self) -> Result<CTerm, SyntaxError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(CTerm::Const(n))
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                if *self.peek() == Tok::Minus {
                    self.bump();
                    let y = self.ident()?;
                    Ok(CTerm::Diff(x, y))
                } else {
                    Ok(CTerm::Clock(x))
                }
            }
            t => self.fail(format!("expected a clock or constant, found {}", describe(&t))),
        }
    }

    /// `t0 op t1 [op t2 ...]`; each adjacent pair forms one atom.
    fn comparison(&mut self) -> Result<Guard, SyntaxError> {
        let pos = self.pos();
        let mut lhs = self.cterm()?;
        let mut atoms: Vec<Guard> = Vec::new();
        while let Tok::Cmp(op) = self.peek().clone() {
            self.bump();
            let rhs = self.cterm()?;
            let atom = match (&lhs, &rhs) {
                (CTerm::Clock(x), CTerm::Const(c)) => Guard::Atom(x.clone(), op, *c),
                (CTerm::Const(c), CTerm::Clock(x)) => Guard::Atom(x.clone(), op.flip(), *c),
                (CTerm::Diff(x, y), CTerm::Const(c)) => Guard::Diag(x.clone(), y.clone(), op, *c),
                (CTerm::Const(c), CTerm::Diff(x, y)) => {
                    Guard::Diag(x.clone(), y.clone(), op.flip(), *c)
                }
                (CTerm::Clock(x), CTerm::Clock(y)) => Guard::Diag(x.clone(), y.clone(), op, 0),
                _ => {
                    return Err(SyntaxError::Parse {
                        pos,
                        msg: "a comparison needs one clock side and one constant side".into(),
                    })
                }
            };
            atoms.push(atom);
            lhs = rhs;
        }
        let mut it = atoms.into_iter();
        let first = match it.next() {
            Some(a) => a,
            None => {
                return Err(SyntaxError::Parse {
                    pos,
                    msg: "expected a comparison".into(),
                })
            }
        };
        Ok(it.fold(first, Guard::and))
    }
}

enum CTerm {
    Const(u32),
    Clock(String),
    Diff(String, String),
}

/// Parses a TST without validating it.
pub fn parse_unchecked(src: &str) -> Result<Tst, SyntaxError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let t = p.tst()?;
    if *p.peek() != Tok::Eof {
        return p.fail(format!("unexpected {}", describe(p.peek())));
    }
    Ok(t)
}

/// Parses and validates a closed TST.
pub fn parse(src: &str) -> Result<Tst, SyntaxError> {
    let t = parse_unchecked(src)?;
    let v = validate(&t);
    if v.is_empty() {
        Ok(t)
    } else {
        Err(SyntaxError::Invalid(v))
    }
}

/// Parses a guard on its own.
pub fn parse_guard(src: &str) -> Result<Guard, SyntaxError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let g = p.guard()?;
    if *p.peek() != Tok::Eof {
        return p.fail(format!("unexpected {}", describe(p.peek())));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn success_literal() {
        assert_eq!(parse("1").unwrap(), Tst::Success);
    }

    #[test]
    fn prefix_binds_tighter_than_choice() {
        let t = parse("rec X . ( !a . X (+) !b )").unwrap();
        match t {
            Tst::Rec(_, body) => match *body {
                Tst::Internal(bs) => {
                    assert_eq!(bs.len(), 2);
                    assert_eq!(bs[0].cont, Tst::var("X"));
                }
                other => panic!("{:?}", other),
            },
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn chained_comparison_and_flip() {
        let g = parse_guard("5<x<10").unwrap();
        assert_eq!(
            g,
            Guard::and(Guard::atom("x", CmpOp::Gt, 5), Guard::atom("x", CmpOp::Lt, 10))
        );
        assert_eq!(parse_guard("x-y>=3").unwrap(), Guard::diag("x", "y", CmpOp::Ge, 3));
        assert_eq!(parse_guard("c=2").unwrap(), Guard::atom("c", CmpOp::Eq, 2));
    }

    #[test]
    fn mixed_separators_rejected() {
        assert!(parse("!a (+) !b + !c").is_err());
        assert!(parse("!a (+) ?b").is_err());
        assert!(parse("?a (+) ?b").is_err());
    }

    #[test]
    fn error_position() {
        match parse("!a{x<}") {
            Err(SyntaxError::Parse { pos, .. }) => assert_eq!((pos.line, pos.col), (1, 6)),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(parse("// nothing\n1 // done").unwrap(), Tst::Success);
    }
}
