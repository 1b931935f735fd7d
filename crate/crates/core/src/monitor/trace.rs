use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::semantics::{Side, TimedStep};
use crate::syntax::Polarity;
use crate::zones::Q;

use super::machine::Event;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct TraceError {
    pub line: usize,
    pub msg: String,
}

/// Parses `12`, `1.25` or `5/4`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Q::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !frac.chars().all(|c| c.is_ascii_digit()) || int.starts_with('+') {
        return None;
    }
    let neg = int.starts_with('-');
    let digits = alloc::format!("{}{}", int.trim_start_matches('-'), frac);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let d = BigInt::from(10u32).pow(frac.len() as u32);
    let q = Q::new(n, d);
    Some(if neg { -q } else { q })
}

/// Parses a trace: one event per line, `delay δ`, `@t` (absolute time),
/// `A !a` or `B ?a`; `#` starts a comment.
pub fn parse_trace(src: &str) -> Result<Vec<Event>, TraceError> {
    let mut out = Vec::new();
    let mut now = Q::zero();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| TraceError {
            line,
            msg: msg.to_string(),
        };
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('@') {
            let t = parse_rational(rest).ok_or_else(|| err("bad time stamp"))?;
            if t < now {
                return Err(err("time stamps must not decrease"));
            }
            if t > now {
                out.push(Event::Delay(&t - &now));
                now = t;
            }
            continue;
        }
        let mut words = text.split_whitespace();
        let head = words.next().unwrap_or("");
        let arg = words.next().ok_or_else(|| err("missing argument"))?;
        if words.next().is_some() {
            return Err(err("trailing input"));
        }
        let ev = match head {
            "delay" => {
                let d = parse_rational(arg).ok_or_else(|| err("bad delay"))?;
                if !d.is_positive() {
                    return Err(err("delays must be positive"));
                }
                now += &d;
                Event::Delay(d)
            }
            "A" | "B" => {
                let side = if head == "A" { Side::Left } else { Side::Right };
                let pol = match arg.chars().next() {
                    Some('!') => Polarity::Out,
                    Some('?') => Polarity::In,
                    _ => return Err(err("expected `!a` or `?a`")),
                };
                let a = &arg[1..];
                if a.is_empty() || !a.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(err("bad action name"));
                }
                Event::Act(side, pol, a.into())
            }
            _ => return Err(err("expected `delay`, `@`, `A` or `B`")),
        };
        out.push(ev);
    }
    Ok(out)
}

/// Renders events in the trace format accepted by [`parse_trace`].
pub fn format_trace(events: &[Event]) -> String {
    let mut s = String::new();
    for e in events {
        s.push_str(&alloc::format!("{}\n", e));
    }
    s
}

/// The monitor events of a timed trace of the configuration semantics:
/// a commit is the sender writing its buffer, a synchronisation the receiver
/// reading it.
pub fn events_of(steps: &[TimedStep]) -> Vec<Event> {
    steps
        .iter()
        .map(|s| match s {
            TimedStep::Delay(d) => Event::Delay(d.clone()),
            TimedStep::Act(crate::semantics::Label::Commit(side, a)) => Event::Act(*side, Polarity::Out, a.clone()),
            TimedStep::Act(crate::semantics::Label::Sync(side, a)) => Event::Act(side.other(), Polarity::In, a.clone()),
        })
        .collect()
}
