use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::encoding::{EdgeLabel, LocName, TimedAutomaton};
use crate::semantics::{Label, Side};
use crate::zones::{fed_from_guard, Bound, ClockId, ClockMap, Federation, ZoneError};

/// A discrete move of a two-automata network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    /// A `τ` edge of one automaton.
    Tau(Side, usize),
    /// An output edge of `sender` with a matching input edge of the peer.
    Sync { sender: Side, out_edge: usize, in_edge: usize },
}

/// A move from a location pair, with everything needed to fire it.
#[derive(Clone, Debug)]
pub struct Transition {
    pub mv: Move,
    /// Conjunction of the guards involved, over the joint clocks.
    pub guard: Federation,
    pub resets: Vec<ClockId>,
    pub target: (usize, usize),
    /// Valuations from which the move fires: guard, and target invariants after reset.
    pub enabling: Federation,
}

struct PairInfo {
    transitions: Vec<Transition>,
    invariant: Federation,
    urgent: bool,
    success: bool,
    /// Valuations from which some move fires after an allowed delay.
    escape: Federation,
}

/// `(l₁, l₂, Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetState {
    pub locs: (usize, usize),
    pub zone: Federation,
}

/// Two automata over one joint clock set.
pub struct Network {
    pub clocks: ClockMap,
    pub automata: [TimedAutomaton; 2],
    edge_guards: [Vec<Federation>; 2],
    pairs: Vec<PairInfo>,
}

impl Network {
    /// Joins the clocks of both automata (which should be disjoint) plus `extra`.
    pub fn new(a: &TimedAutomaton, b: &TimedAutomaton, extra: &[&str]) -> Result<Network, ZoneError> {
        let mut clocks = a.clocks.join(&b.clocks);
        for x in extra {
            clocks.insert((*x).into());
        }
        let automata = [a.with_clocks(&clocks), b.with_clocks(&clocks)];
        let mut edge_guards: [Vec<Federation>; 2] = [Vec::new(), Vec::new()];
        for (k, aut) in automata.iter().enumerate() {
            for e in &aut.edges {
                edge_guards[k].push(fed_from_guard(&e.guard, &clocks)?);
            }
        }
        let mut net = Network {
            clocks,
            automata,
            edge_guards,
            pairs: Vec::new(),
        };
        let (n1, n2) = (net.automata[0].locations.len(), net.automata[1].locations.len());
        let mut pairs = Vec::with_capacity(n1 * n2);
        for l1 in 0..n1 {
            for l2 in 0..n2 {
                pairs.push(net.pair_info((l1, l2)));
            }
        }
        net.pairs = pairs;
        Ok(net)
    }

    pub fn dim(&self) -> usize {
        self.clocks.dim()
    }

    fn aut(&self, s: Side) -> &TimedAutomaton {
        &self.automata[side_index(s)]
    }

    fn info(&self, locs: (usize, usize)) -> &PairInfo {
        &self.pairs[locs.0 * self.automata[1].locations.len() + locs.1]
    }

    pub fn initial_locs(&self) -> (usize, usize) {
        (self.automata[0].initial, self.automata[1].initial)
    }

    pub fn location_name(&self, s: Side, l: usize) -> &LocName {
        &self.aut(s).locations[l].name
    }

    fn invariant_of(&self, locs: (usize, usize)) -> Federation {
        self.automata[0].locations[locs.0]
            .invariant
            .intersect(&self.automata[1].locations[locs.1].invariant)
    }

    fn pair_info(&self, locs: (usize, usize)) -> PairInfo {
        let invariant = self.invariant_of(locs);
        let urgent = self.automata[0].locations[locs.0].urgent || self.automata[1].locations[locs.1].urgent;
        let success = self.automata[0].is_final(locs.0) && self.automata[1].is_final(locs.1);
        let mut transitions = Vec::new();
        for s in [Side::Left, Side::Right] {
            let k = side_index(s);
            let l = if k == 0 { locs.0 } else { locs.1 };
            for (ei, e) in self.automata[k].edges.iter().enumerate() {
                if e.source == l && e.label == EdgeLabel::Tau {
                    let target = if k == 0 { (e.target, locs.1) } else { (locs.0, e.target) };
                    transitions.push(self.transition(Move::Tau(s, ei), self.edge_guards[k][ei].clone(), e.resets.clone(), target));
                }
            }
        }
        for s in [Side::Left, Side::Right] {
            let (ko, ki) = (side_index(s), side_index(s.other()));
            let (lo, li) = if ko == 0 { (locs.0, locs.1) } else { (locs.1, locs.0) };
            for (eo, out) in self.automata[ko].edges.iter().enumerate() {
                let EdgeLabel::Out(a) = &out.label else { continue };
                if out.source != lo {
                    continue;
                }
                for (ei, inp) in self.automata[ki].edges.iter().enumerate() {
                    if inp.source != li || inp.label != EdgeLabel::In(a.clone()) {
                        continue;
                    }
                    let guard = self.edge_guards[ko][eo].intersect(&self.edge_guards[ki][ei]);
                    let mut resets = out.resets.clone();
                    resets.extend(inp.resets.iter().copied());
                    let target = if ko == 0 { (out.target, inp.target) } else { (inp.target, out.target) };
                    let mv = Move::Sync {
                        sender: s,
                        out_edge: eo,
                        in_edge: ei,
                    };
                    transitions.push(self.transition(mv, guard, resets, target));
                }
            }
        }
        let mut e = Federation::empty(self.dim());
        for t in &transitions {
            e = e.union(&t.enabling);
        }
        let escape = if urgent { e } else { e.union(&e.intersect(&invariant).past()) };
        PairInfo {
            transitions,
            invariant,
            urgent,
            success,
            escape,
        }
    }

    fn transition(&self, mv: Move, guard: Federation, resets: Vec<ClockId>, target: (usize, usize)) -> Transition {
        let enabling = guard.intersect(&self.invariant_of(target).inverse_reset(&resets));
        Transition {
            mv,
            guard,
            resets,
            target,
            enabling,
        }
    }

    pub fn transitions(&self, locs: (usize, usize)) -> &[Transition] {
        &self.info(locs).transitions
    }

    pub fn invariant(&self, locs: (usize, usize)) -> &Federation {
        &self.info(locs).invariant
    }

    pub fn is_urgent(&self, locs: (usize, usize)) -> bool {
        self.info(locs).urgent
    }

    /// Both locations have no outgoing edges.
    pub fn is_success(&self, locs: (usize, usize)) -> bool {
        self.info(locs).success
    }

    /// Letting time pass: the endpoint of each delay must satisfy both invariants.
    pub fn elapse(&self, locs: (usize, usize), z: &Federation) -> Federation {
        if self.is_urgent(locs) {
            z.clone()
        } else {
            z.future().intersect(self.invariant(locs))
        }
    }

    /// The initial state, time elapsed.
    pub fn initial(&self) -> NetState {
        let locs = self.initial_locs();
        let z = Federation::zero(self.dim()).intersect(self.invariant(locs));
        NetState {
            locs,
            zone: self.elapse(locs, &z),
        }
    }

    /// Firing `t` from `z`, before any delay at the target.
    pub fn post(&self, z: &Federation, t: &Transition) -> Federation {
        z.intersect(&t.guard).reset(&t.resets).intersect(self.invariant(t.target))
    }

    /// Symbolic successors of an elapsed state, each elapsed again.
    pub fn successors(&self, s: &NetState) -> Vec<(usize, NetState)> {
        let mut out = Vec::new();
        for (i, t) in self.transitions(s.locs).iter().enumerate() {
            let p = self.post(&s.zone, t);
            if p.is_empty() {
                continue;
            }
            out.push((
                i,
                NetState {
                    locs: t.target,
                    zone: self.elapse(t.target, &p),
                },
            ));
        }
        out
    }

    /// The valuations of `s` from which no delay followed by a move exists;
    /// empty on success states.
    pub fn deadlock_zone(&self, s: &NetState) -> Federation {
        let info = self.info(s.locs);
        if info.success {
            return Federation::empty(self.dim());
        }
        s.zone.subtract(&info.escape)
    }

    /// Constraints between two clocks occurring in guards or invariants,
    /// sorted and without duplicates.
    pub fn diagonal_constraints(&self) -> Vec<(usize, usize, Bound)> {
        let mut out = BTreeSet::new();
        let feds = self.edge_guards.iter().flatten().chain(
            self.automata
                .iter()
                .flat_map(|a| a.locations.iter().map(|l| &l.invariant)),
        );
        for f in feds {
            for d in f.parts() {
                out.extend(d.constraints().into_iter().filter(|&(i, j, _)| i != 0 && j != 0));
            }
        }
        out.into_iter().collect()
    }

    /// The event of the configuration semantics a move stands for, if any.
    pub fn label_of(&self, mv: Move) -> Option<Label> {
        match mv {
            Move::Tau(s, e) => {
                let aut = self.aut(s);
                let edge = &aut.edges[e];
                match &aut.locations[edge.target].name {
                    LocName::Committed { action, .. } => Some(Label::Commit(s, action.clone())),
                    _ => None,
                }
            }
            Move::Sync { sender, out_edge, .. } => match &self.aut(sender).edges[out_edge].label {
                EdgeLabel::Out(a) => Some(Label::Sync(sender, a.clone())),
                _ => None,
            },
        }
    }

    /// A readable description of a move.
    pub fn describe(&self, mv: Move) -> String {
        match mv {
            Move::Tau(s, e) => {
                let aut = self.aut(s);
                let edge = &aut.edges[e];
                alloc::format!(
                    "{}: {} -τ-> {}",
                    s.name(),
                    aut.locations[edge.source].name,
                    aut.locations[edge.target].name
                )
            }
            Move::Sync {
                sender,
                out_edge,
                in_edge,
            } => {
                let (ao, ai) = (self.aut(sender), self.aut(sender.other()));
                let (eo, ei) = (&ao.edges[out_edge], &ai.edges[in_edge]);
                alloc::format!(
                    "{}: {} -{}-> {} | {}: {} -{}-> {}",
                    sender.name(),
                    ao.locations[eo.source].name,
                    eo.label,
                    ao.locations[eo.target].name,
                    sender.other().name(),
                    ai.locations[ei.source].name,
                    ei.label,
                    ai.locations[ei.target].name
                )
            }
        }
    }
}

fn side_index(s: Side) -> usize {
    match s {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("clocks", &self.clocks)
            .field("left", &self.automata[0].locations.len())
            .field("right", &self.automata[1].locations.len())
            .finish()
    }
}
