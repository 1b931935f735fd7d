use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::zones::{Bound, Dbm, Federation};

use super::network::{NetState, Network};

/// How zones are kept finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Abstraction {
    /// Exact zones; exploration may not terminate.
    None,
    /// `Extra_M` with per-clock constants.
    Extrapolate(Vec<i32>),
    /// For guards with clock differences: split along each difference
    /// constraint, extrapolate every piece, then restore the piece's side of
    /// each constraint.
    Split { max: Vec<i32>, diagonals: Vec<(usize, usize, Bound)> },
}

impl Abstraction {
    pub fn apply(&self, f: &Federation) -> Federation {
        match self {
            Abstraction::None => f.clone(),
            Abstraction::Extrapolate(m) => f.extrapolate(m),
            Abstraction::Split { max, diagonals } => {
                let mut pieces: Vec<(Dbm, Vec<(usize, usize, Bound)>)> =
                    f.parts().iter().map(|d| (d.clone(), Vec::new())).collect();
                for &(i, j, b) in diagonals {
                    let mut next = Vec::with_capacity(pieces.len() * 2);
                    for (d, sides) in pieces {
                        for c in [(i, j, b), (j, i, b.negate())] {
                            if let Some(p) = d.clone().constrain(c.0, c.1, c.2) {
                                let mut s = sides.clone();
                                s.push(c);
                                next.push((p, s));
                            }
                        }
                    }
                    pieces = next;
                }
                let mut out = Federation::empty(f.dim());
                for (d, sides) in pieces {
                    let mut e = Some(d.extrapolate(max));
                    for (i, j, b) in sides {
                        e = e.and_then(|e| e.constrain(i, j, b));
                    }
                    if let Some(e) = e {
                        out = out.union(&Federation::from_dbm(e));
                    }
                }
                out
            }
        }
    }
}

/// Exploration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    BreadthFirst,
    DepthFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    /// Abort after storing this many symbolic states.
    pub max_states: usize,
    pub order: SearchOrder,
    /// Apply the abstraction of the network; when off, zones are exact.
    pub abstraction: bool,
    /// Worker threads for successor computation (breadth-first only).
    pub jobs: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_states: usize::MAX,
            order: SearchOrder::BreadthFirst,
            abstraction: true,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("state budget of {0} exhausted")]
    Budget(usize),
}

/// A stored symbolic state and how it was reached.
#[derive(Clone, Debug)]
pub struct Node {
    pub state: NetState,
    /// Parent node and the index of the transition taken from it.
    pub parent: Option<(usize, usize)>,
}

/// Outcome of a search: the stored states and, if found, a node whose exact
/// zone intersects the deadlock zone.
#[derive(Clone, Debug)]
pub struct Search {
    pub nodes: Vec<Node>,
    pub deadlock: Option<usize>,
}

impl Search {
    /// Transition indices from the initial state to node `n`.
    pub fn path_to(&self, mut n: usize) -> Vec<usize> {
        let mut path = Vec::new();
        while let Some((p, t)) = self.nodes[n].parent {
            path.push(t);
            n = p;
        }
        path.reverse();
        path
    }
}

/// A successor candidate, computed independently of the others.
struct Candidate {
    from: usize,
    transition: usize,
    state: NetState,
    deadlocked: bool,
}

fn expand(net: &Network, abs: &Abstraction, from: usize, s: &NetState) -> Vec<Candidate> {
    net.successors(s)
        .into_iter()
        .map(|(transition, exact)| {
            let deadlocked = !net.deadlock_zone(&exact).is_empty();
            Candidate {
                from,
                transition,
                state: NetState {
                    locs: exact.locs,
                    zone: abs.apply(&exact.zone),
                },
                deadlocked,
            }
        })
        .collect()
}

struct Store {
    nodes: Vec<Node>,
    visited: BTreeMap<(usize, usize), Federation>,
    max_states: usize,
}

impl Store {
    /// Adds a state unless an already stored zone covers it.
    fn admit(&mut self, state: NetState, parent: Option<(usize, usize)>) -> Result<Option<usize>, SearchError> {
        let seen = self
            .visited
            .entry(state.locs)
            .or_insert_with(|| Federation::empty(state.zone.dim()));
        if seen.includes(&state.zone) {
            return Ok(None);
        }
        if self.nodes.len() >= self.max_states {
            return Err(SearchError::Budget(self.max_states));
        }
        *seen = seen.union(&state.zone);
        self.nodes.push(Node { state, parent });
        Ok(Some(self.nodes.len() - 1))
    }
}

/// Explores the zone graph until a deadlock is found or every state is covered.
pub fn search(net: &Network, abs: &Abstraction, opts: &CheckOptions) -> Result<Search, SearchError> {
    let abs = if opts.abstraction { abs.clone() } else { Abstraction::None };
    let init = net.initial();
    let mut store = Store {
        nodes: Vec::new(),
        visited: BTreeMap::new(),
        max_states: opts.max_states.max(1),
    };
    let init_dead = !net.deadlock_zone(&init).is_empty();
    let root = NetState {
        locs: init.locs,
        zone: abs.apply(&init.zone),
    };
    store.admit(root, None)?;
    if init_dead {
        return Ok(Search {
            nodes: store.nodes,
            deadlock: Some(0),
        });
    }
    let found = match opts.order {
        SearchOrder::BreadthFirst => bfs(net, &abs, opts.jobs, &mut store)?,
        SearchOrder::DepthFirst => dfs(net, &abs, &mut store)?,
    };
    Ok(Search {
        nodes: store.nodes,
        deadlock: found,
    })
}

fn bfs(net: &Network, abs: &Abstraction, jobs: usize, store: &mut Store) -> Result<Option<usize>, SearchError> {
    let mut layer: Vec<usize> = alloc::vec![0];
    while !layer.is_empty() {
        let batches = expand_layer(net, abs, jobs, &store.nodes, &layer);
        let mut next = Vec::new();
        for batch in batches {
            for c in batch {
                if c.deadlocked {
                    store.nodes.push(Node {
                        state: c.state,
                        parent: Some((c.from, c.transition)),
                    });
                    return Ok(Some(store.nodes.len() - 1));
                }
                if let Some(i) = store.admit(c.state, Some((c.from, c.transition)))? {
                    next.push(i);
                }
            }
        }
        layer = next;
    }
    Ok(None)
}

#[cfg(feature = "parallel")]
fn expand_layer(net: &Network, abs: &Abstraction, jobs: usize, nodes: &[Node], layer: &[usize]) -> Vec<Vec<Candidate>> {
    use rayon::prelude::*;
    if jobs <= 1 || layer.len() < 2 {
        return layer.iter().map(|&i| expand(net, abs, i, &nodes[i].state)).collect();
    }
    let work = || layer.par_iter().map(|&i| expand(net, abs, i, &nodes[i].state)).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn expand_layer(net: &Network, abs: &Abstraction, _jobs: usize, nodes: &[Node], layer: &[usize]) -> Vec<Vec<Candidate>> {
    layer.iter().map(|&i| expand(net, abs, i, &nodes[i].state)).collect()
}

fn dfs(net: &Network, abs: &Abstraction, store: &mut Store) -> Result<Option<usize>, SearchError> {
    let mut stack: Vec<usize> = alloc::vec![0];
    while let Some(n) = stack.pop() {
        let cands = expand(net, abs, n, &store.nodes[n].state);
        for c in cands.into_iter().rev() {
            if c.deadlocked {
                store.nodes.push(Node {
                    state: c.state,
                    parent: Some((c.from, c.transition)),
                });
                return Ok(Some(store.nodes.len() - 1));
            }
            if let Some(i) = store.admit(c.state, Some((c.from, c.transition)))? {
                stack.push(i);
            }
        }
    }
    Ok(None)
}
