use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::Guard;
use crate::zones::{ClockId, ClockMap, Federation};

/// Location names of encoded DENFs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocName {
    /// The location of a defining variable.
    Var(String),
    /// `τX`: the internal choice of `X` before committing.
    Tau(String),
    /// `[!a{g;R}]X`: a committed branch.
    Committed {
        action: String,
        guard: Guard,
        resets: BTreeSet<String>,
        target: String,
    },
}

impl fmt::Display for LocName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocName::Var(x) => write!(f, "{}", x),
            LocName::Tau(x) => write!(f, "τ{}", x),
            LocName::Committed {
                action,
                guard,
                resets,
                target,
            } => {
                write!(f, "[!{}", action)?;
                if !guard.is_true() || !resets.is_empty() {
                    write!(f, "{{")?;
                    if !guard.is_true() {
                        write!(f, "{}", guard)?;
                    }
                    if !resets.is_empty() {
                        let rs: Vec<&str> = resets.iter().map(|s| s.as_str()).collect();
                        write!(f, "; {}", rs.join(","))?;
                    }
                    write!(f, "}}")?;
                }
                write!(f, "]{}", target)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Tau,
    Out(String),
    In(String),
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Tau => write!(f, "τ"),
            EdgeLabel::Out(a) => write!(f, "!{}", a),
            EdgeLabel::In(a) => write!(f, "?{}", a),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub name: LocName,
    pub urgent: bool,
    pub invariant: Federation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub label: EdgeLabel,
    pub guard: Guard,
    pub resets: Vec<ClockId>,
    pub target: usize,
}

/// `(L, U, l₀, E, I)` over a fixed set of clocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub clocks: ClockMap,
    pub locations: Vec<Location>,
    pub initial: usize,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("initial location `{0}` not found")]
    InitNotFound(String),
    #[error("location `{0}` already exists with outgoing edges")]
    NameClash(String),
    #[error(transparent)]
    Zone(#[from] crate::zones::ZoneError),
}

impl TimedAutomaton {
    pub fn find(&self, name: &LocName) -> Option<usize> {
        self.locations.iter().position(|l| &l.name == name)
    }

    pub fn outgoing(&self, l: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == l)
    }

    /// Locations without outgoing edges.
    pub fn is_final(&self, l: usize) -> bool {
        self.outgoing(l).next().is_none()
    }

    pub fn initial_name(&self) -> &LocName {
        &self.locations[self.initial].name
    }

    fn dim(&self) -> usize {
        self.clocks.dim()
    }

    /// Adds a location, or merges it into an existing one of the same name:
    /// urgent if either is, invariants intersected.
    fn merge_location(&mut self, loc: Location) -> usize {
        match self.find(&loc.name) {
            Some(i) => {
                let l = &mut self.locations[i];
                l.urgent |= loc.urgent;
                l.invariant = l.invariant.intersect(&loc.invariant);
                i
            }
            None => {
                self.locations.push(loc);
                self.locations.len() - 1
            }
        }
    }

    /// Copies `other` into `self`, collapsing same-named locations.
    fn absorb(&mut self, other: &TimedAutomaton) -> Vec<usize> {
        let map: Vec<usize> = other.locations.iter().map(|l| self.merge_location(l.clone())).collect();
        for e in &other.edges {
            let e2 = Edge {
                source: map[e.source],
                label: e.label.clone(),
                guard: e.guard.clone(),
                resets: e.resets.clone(),
                target: map[e.target],
            };
            if !self.edges.contains(&e2) {
                self.edges.push(e2);
            }
        }
        map
    }

    /// A new initial location `l`. A same-named location already present is
    /// reused when it has no outgoing edges, so that a variable can be
    /// defined after being used as a target.
    fn add_head(&mut self, l: LocName, urgent: bool, invariant: Federation) -> Result<usize, EncodingError> {
        if let Some(i) = self.find(&l) {
            if !self.is_final(i) {
                return Err(EncodingError::NameClash(alloc::format!("{}", l)));
            }
        }
        Ok(self.merge_location(Location {
            name: l,
            urgent,
            invariant,
        }))
    }
}

/// `⊔ Aᵢ` with initial location `init`.
pub fn union(automata: &[TimedAutomaton], init: &LocName) -> Result<TimedAutomaton, EncodingError> {
    let clocks = automata.iter().fold(ClockMap::new(), |m, a| m.join(&a.clocks));
    let mut out = TimedAutomaton {
        clocks: clocks.clone(),
        locations: Vec::new(),
        initial: 0,
        edges: Vec::new(),
    };
    for a in automata {
        out.absorb(&a.with_clocks(&clocks));
    }
    out.initial = out
        .find(init)
        .ok_or_else(|| EncodingError::InitNotFound(alloc::format!("{}", init)))?;
    Ok(out)
}

impl TimedAutomaton {
    /// The same automaton over a larger clock set.
    pub fn with_clocks(&self, clocks: &ClockMap) -> TimedAutomaton {
        let map = self.clocks.embedding(clocks).expect("clock set is a superset");
        TimedAutomaton {
            clocks: clocks.clone(),
            locations: self
                .locations
                .iter()
                .map(|l| Location {
                    name: l.name.clone(),
                    urgent: l.urgent,
                    invariant: l.invariant.embed(&map, clocks.dim()),
                })
                .collect(),
            initial: self.initial,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    resets: e.resets.iter().map(|&r| map[r]).collect(),
                    ..e.clone()
                })
                .collect(),
        }
    }
}

/// A single non-urgent location without edges.
pub fn idle(l: LocName, clocks: &ClockMap) -> TimedAutomaton {
    TimedAutomaton {
        clocks: clocks.clone(),
        locations: alloc::vec![Location {
            name: l,
            urgent: false,
            invariant: Federation::universe(clocks.dim()),
        }],
        initial: 0,
        edges: Vec::new(),
    }
}

/// A new urgent initial location `l` with a true-guarded edge into `a`.
pub fn pfx(l: LocName, label: EdgeLabel, resets: &[ClockId], a: &TimedAutomaton) -> Result<TimedAutomaton, EncodingError> {
    let mut out = a.clone();
    let target = out.initial;
    let dim = out.dim();
    let i = out.add_head(l, true, Federation::universe(dim))?;
    out.edges.push(Edge {
        source: i,
        label,
        guard: Guard::True,
        resets: resets.to_vec(),
        target,
    });
    out.initial = i;
    Ok(out)
}

/// A branch of [`br`].
pub struct BrBranch {
    pub label: EdgeLabel,
    pub guard: Guard,
    pub resets: Vec<ClockId>,
    pub automaton: TimedAutomaton,
}

/// A new initial location `l` with invariant `inv` and one guarded edge into
/// each branch automaton. Urgency of the branches is unchanged.
pub fn br(l: LocName, inv: Federation, clocks: &ClockMap, branches: &[BrBranch]) -> Result<TimedAutomaton, EncodingError> {
    let mut out = TimedAutomaton {
        clocks: clocks.clone(),
        locations: Vec::new(),
        initial: 0,
        edges: Vec::new(),
    };
    let mut targets = Vec::new();
    for b in branches {
        let map = out.absorb(&b.automaton);
        targets.push(map[b.automaton.initial]);
    }
    let i = out.add_head(l, false, inv)?;
    for (b, t) in branches.iter().zip(targets) {
        out.edges.push(Edge {
            source: i,
            label: b.label.clone(),
            guard: b.guard.clone(),
            resets: b.resets.clone(),
            target: t,
        });
    }
    out.initial = i;
    Ok(out)
}
