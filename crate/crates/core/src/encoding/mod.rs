//! Timed automata, composition patterns, and the translation of defining
//! equations into automata.

mod ta;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

pub use ta::{br, idle, pfx, union, BrBranch, Edge, EdgeLabel, EncodingError, LocName, Location, TimedAutomaton};

use crate::syntax::{Denf, DenfBody};
use crate::zones::{clock_ids, fed_from_guard, fed_to_guard, ClockMap, Federation};

/// Clocks mentioned by the equations, in sorted order.
pub fn denf_clocks(d: &Denf) -> ClockMap {
    let mut s = BTreeSet::new();
    for body in d.equations.values() {
        for b in body.branches() {
            s.extend(b.guard.clocks());
            s.extend(b.resets.iter().cloned());
        }
    }
    ClockMap::from_names(s)
}

/// The automaton of a closed DENF over its own clocks.
pub fn encode(d: &Denf) -> Result<TimedAutomaton, EncodingError> {
    encode_with_clocks(d, &denf_clocks(d))
}

/// The automaton of a closed DENF over the given clocks.
pub fn encode_with_clocks(d: &Denf, clocks: &ClockMap) -> Result<TimedAutomaton, EncodingError> {
    let mut parts = Vec::with_capacity(d.equations.len());
    for (x, body) in &d.equations {
        parts.push(encode_equation(x, body, clocks)?);
    }
    union(&parts, &LocName::Var(d.start.clone()))
}

fn encode_equation(x: &str, body: &DenfBody, clocks: &ClockMap) -> Result<TimedAutomaton, EncodingError> {
    let var = |y: &str| LocName::Var(y.into());
    match body {
        DenfBody::Success => Ok(idle(var(x), clocks)),
        DenfBody::External(bs) => {
            let mut branches = Vec::with_capacity(bs.len());
            for b in bs {
                branches.push(BrBranch {
                    label: EdgeLabel::In(b.action.clone()),
                    guard: b.guard.clone(),
                    resets: clock_ids(clocks, &b.resets)?,
                    automaton: idle(var(&b.target), clocks),
                });
            }
            br(var(x), Federation::universe(clocks.dim()), clocks, &branches)
        }
        DenfBody::Internal(bs) => {
            let mut rdy = Federation::empty(clocks.dim());
            let mut branches = Vec::with_capacity(bs.len());
            for b in bs {
                rdy = rdy.union(&fed_from_guard(&b.guard, clocks)?);
                let committed = LocName::Committed {
                    action: b.action.clone(),
                    guard: b.guard.clone(),
                    resets: b.resets.clone(),
                    target: b.target.clone(),
                };
                let a = pfx(
                    committed,
                    EdgeLabel::Out(b.action.clone()),
                    &clock_ids(clocks, &b.resets)?,
                    &idle(var(&b.target), clocks),
                )?;
                branches.push(BrBranch {
                    label: EdgeLabel::Tau,
                    guard: b.guard.clone(),
                    resets: Vec::new(),
                    automaton: a,
                });
            }
            let inner = br(LocName::Tau(x.into()), rdy.past(), clocks, &branches)?;
            pfx(var(x), EdgeLabel::Tau, &[], &inner)
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// GraphViz rendering. Nodes and edges are emitted in sorted order.
pub fn export_dot(a: &TimedAutomaton) -> String {
    let mut order: Vec<usize> = (0..a.locations.len()).collect();
    order.sort_by(|&i, &j| a.locations[i].name.cmp(&a.locations[j].name));
    let mut id = alloc::vec![0usize; a.locations.len()];
    for (k, &i) in order.iter().enumerate() {
        id[i] = k;
    }
    let mut out = String::new();
    out.push_str("digraph ta {\n  rankdir=LR;\n  init [shape=point];\n");
    for &i in &order {
        let l = &a.locations[i];
        let mut label = dot_escape(&alloc::format!("{}", l.name));
        if !l.invariant.set_eq(&Federation::universe(a.clocks.dim())) {
            let inv = alloc::format!("{}", fed_to_guard(&l.invariant, &a.clocks));
            let _ = write!(label, "\\n{}", dot_escape(&inv));
        }
        let shape = if l.urgent { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  l{} [shape={}, label=\"{}\"];", id[i], shape, label);
    }
    let _ = writeln!(out, "  init -> l{};", id[a.initial]);
    let mut edges: Vec<(usize, usize, String)> = a
        .edges
        .iter()
        .map(|e| {
            let mut label = alloc::format!("{}", e.label);
            if !e.guard.is_true() {
                let _ = write!(label, " {{{}}}", e.guard);
            }
            if !e.resets.is_empty() {
                let rs: Vec<&str> = e.resets.iter().map(|&r| a.clocks.name(r)).collect();
                let _ = write!(label, " [{}]", rs.join(","));
            }
            (id[e.source], id[e.target], label)
        })
        .collect();
    edges.sort();
    for (s, t, label) in edges {
        let _ = writeln!(out, "  l{} -> l{} [label=\"{}\"];", s, t, dot_escape(&label));
    }
    out.push_str("}\n");
    out
}
