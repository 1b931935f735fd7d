use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::syntax::{make_disjoint, to_denf, Denf, DenfBody, FreshVars, Tst};
use crate::zones::{clock_ids, fed_from_guard, ClockId, ClockMap, Federation, Valuation, ZoneError};

use super::region::{explore, OracleError, RegionGraph, RegionScheme, RegionSystem};

/// Default node budget of the reference oracle.
pub const ORACLE_LIMIT: usize = 200_000;

/// A flat branch with its guard and resets over the joint clocks.
#[derive(Clone, Debug)]
pub struct TableBranch {
    pub action: String,
    pub guard: Federation,
    pub resets: Vec<ClockId>,
    pub target: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Success,
    Internal,
    External,
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub name: String,
    pub kind: TableKind,
    pub branches: Vec<TableBranch>,
    /// `rdy` of the body.
    pub rdy: Federation,
    /// Clocks read before being reset from this equation on.
    pub active: Vec<bool>,
}

/// The equations of one DENF, indexed, with guards embedded in a joint clock space.
#[derive(Clone, Debug)]
pub struct EquationTable {
    pub entries: Vec<TableEntry>,
    pub start: usize,
}

impl EquationTable {
    /// `map` sends this side's clock ids to joint ids.
    pub fn new(d: &Denf, clocks: &ClockMap, map: &[ClockId], dim: usize) -> Result<EquationTable, ZoneError> {
        let names: Vec<&String> = d.equations.keys().collect();
        let idx: BTreeMap<&String, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut entries = Vec::with_capacity(names.len());
        for (x, body) in &d.equations {
            let kind = match body {
                DenfBody::Success => TableKind::Success,
                DenfBody::Internal(_) => TableKind::Internal,
                DenfBody::External(_) => TableKind::External,
            };
            let mut branches = Vec::new();
            let mut guards = Federation::empty(dim);
            let mut active = vec![false; dim];
            for b in body.branches() {
                let g = fed_from_guard(&b.guard, clocks)?.embed(map, dim);
                for c in b.guard.clocks() {
                    active[map[clocks.id(&c).ok_or_else(|| ZoneError::UnknownClock(c.clone()))?]] = true;
                }
                guards = guards.union(&g);
                branches.push(TableBranch {
                    action: b.action.clone(),
                    guard: g,
                    resets: clock_ids(clocks, &b.resets)?.into_iter().map(|r| map[r]).collect(),
                    target: idx[&b.target],
                });
            }
            let rdy = match kind {
                TableKind::Internal => guards.past(),
                _ => Federation::universe(dim),
            };
            entries.push(TableEntry {
                name: x.clone(),
                kind,
                branches,
                rdy,
                active,
            });
        }
        let mut t = EquationTable {
            entries,
            start: idx[&d.start],
        };
        t.close_active();
        Ok(t)
    }

    /// Least fixpoint of `active(X) ⊇ active(Xᵢ) \ Rᵢ`.
    fn close_active(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.entries.len() {
                for bi in 0..self.entries[i].branches.len() {
                    let add = self.after_branch(i, bi);
                    for (c, on) in add.into_iter().enumerate() {
                        if on && !self.entries[i].active[c] {
                            self.entries[i].active[c] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// Clocks active once branch `bi` of equation `i` has fired.
    pub fn after_branch(&self, i: usize, bi: usize) -> Vec<bool> {
        let b = &self.entries[i].branches[bi];
        let mut a = self.entries[b.target].active.clone();
        for &r in &b.resets {
            a[r] = false;
        }
        a
    }
}

/// Builds both equation tables over the joint clocks of a clock-disjoint pair.
pub fn joint_tables(p: &Tst, q: &Tst) -> Result<(EquationTable, EquationTable, ClockMap), ZoneError> {
    let cp = ClockMap::from_names(p.clocks());
    let cq = ClockMap::from_names(q.clocks());
    let joint = cp.join(&cq);
    let dp = to_denf(p, &mut FreshVars::for_tst("L", p));
    let dq = to_denf(q, &mut FreshVars::for_tst("R", q));
    let mp = cp.embedding(&joint).expect("joined");
    let mq = cq.embedding(&joint).expect("joined");
    let tp = EquationTable::new(&dp, &cp, &mp, joint.dim())?;
    let tq = EquationTable::new(&dq, &cq, &mq, joint.dim())?;
    Ok((tp, tq, joint))
}

/// The abstraction used for a pair: per-clock constants, or a global one when
/// some guard compares two clocks.
pub fn scheme_for(p: &Tst, q: &Tst, joint: &ClockMap) -> RegionScheme {
    if p.has_diagonal() || q.has_diagonal() {
        return RegionScheme::Diagonal(p.max_constant().max(q.max_constant()) as i32);
    }
    let mut m = vec![0i32; joint.dim()];
    for t in [p, q] {
        for (x, c) in t.clock_constants() {
            let i = joint.id(&x).expect("clock of the pair");
            m[i] = m[i].max(c as i32);
        }
    }
    RegionScheme::PerClock(m)
}

/// A DENF side of a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SideState {
    Plain(usize),
    /// Equation index and the branch its internal choice committed to.
    Committed(usize, usize),
}

/// The configuration semantics over a pair of equation tables.
pub struct TstSystem {
    pub left: EquationTable,
    pub right: EquationTable,
    pub dim: usize,
}

impl TstSystem {
    fn side(&self, right: bool) -> &EquationTable {
        if right {
            &self.right
        } else {
            &self.left
        }
    }

    fn rdy_contains(&self, t: &EquationTable, s: SideState, v: &Valuation) -> bool {
        match s {
            SideState::Plain(x) => t.entries[x].rdy.contains(v),
            SideState::Committed(..) => false,
        }
    }

    fn side_active(&self, t: &EquationTable, s: SideState) -> Vec<bool> {
        match s {
            SideState::Plain(x) => t.entries[x].active.clone(),
            SideState::Committed(x, b) => t.after_branch(x, b),
        }
    }
}

impl RegionSystem for TstSystem {
    type State = (SideState, SideState);

    fn dim(&self) -> usize {
        self.dim
    }

    fn initial(&self) -> Self::State {
        (SideState::Plain(self.left.start), SideState::Plain(self.right.start))
    }

    fn actions(&self, s: &Self::State, v: &Valuation) -> Vec<(Self::State, Vec<ClockId>)> {
        let mut out = Vec::new();
        let pair = [s.0, s.1];
        for side in 0..2 {
            let t = self.side(side == 1);
            let set = |x: SideState| if side == 0 { (x, s.1) } else { (s.0, x) };
            match pair[side] {
                SideState::Plain(x) if t.entries[x].kind == TableKind::Internal => {
                    for (bi, b) in t.entries[x].branches.iter().enumerate() {
                        if b.guard.contains(v) {
                            out.push((set(SideState::Committed(x, bi)), Vec::new()));
                        }
                    }
                }
                SideState::Committed(x, bi) => {
                    let b = &t.entries[x].branches[bi];
                    let peer = self.side(side == 0);
                    if let SideState::Plain(y) = pair[1 - side] {
                        let e = &peer.entries[y];
                        if e.kind == TableKind::External {
                            if let Some(pb) = e.branches.iter().find(|pb| pb.action == b.action) {
                                if pb.guard.contains(v) {
                                    let mut resets = b.resets.clone();
                                    resets.extend(pb.resets.iter().copied());
                                    let (l, r) = if side == 0 { (b.target, pb.target) } else { (pb.target, b.target) };
                                    out.push(((SideState::Plain(l), SideState::Plain(r)), resets));
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn may_delay_to(&self, s: &Self::State, v: &Valuation) -> bool {
        self.rdy_contains(&self.left, s.0, v) && self.rdy_contains(&self.right, s.1, v)
    }

    fn is_success(&self, s: &Self::State) -> bool {
        let ok = |t: &EquationTable, x: SideState| matches!(x, SideState::Plain(i) if t.entries[i].kind == TableKind::Success);
        ok(&self.left, s.0) && ok(&self.right, s.1)
    }

    fn active(&self, s: &Self::State) -> Vec<bool> {
        let a = self.side_active(&self.left, s.0);
        let b = self.side_active(&self.right, s.1);
        a.iter().zip(b.iter()).map(|(x, y)| *x || *y).collect()
    }
}

/// Builds the region graph of a pair.
pub fn region_graph(p: &Tst, q: &Tst, limit: usize) -> Result<(TstSystem, RegionGraph<(SideState, SideState)>), OracleError> {
    let (p, q) = make_disjoint(p, q);
    let (left, right, joint) = joint_tables(&p, &q).expect("clocks are collected from the terms");
    let scheme = scheme_for(&p, &q, &joint);
    let sys = TstSystem {
        left,
        right,
        dim: joint.dim(),
    };
    let g = explore(&sys, &scheme, limit)?;
    Ok((sys, g))
}

/// Compliance decided on the region quotient of the configuration semantics.
pub fn oracle_compliant(p: &Tst, q: &Tst) -> Result<bool, OracleError> {
    oracle_compliant_with_limit(p, q, ORACLE_LIMIT)
}

pub fn oracle_compliant_with_limit(p: &Tst, q: &Tst, limit: usize) -> Result<bool, OracleError> {
    let (_, g) = region_graph(p, q, limit)?;
    Ok(g.first_deadlock().is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn oracle(p: &str, q: &str) -> bool {
        oracle_compliant(&parse(p).unwrap(), &parse(q).unwrap()).unwrap()
    }

    #[test]
    fn small_pairs() {
        assert!(oracle("?a{t<5} . !b{t<3}", "!a{s<2} . ?b{s<3}"));
        assert!(!oracle("?a{t<5} . !b{t<3}", "!a{s<5} . ?b{s<3}"));
        assert!(oracle("1", "1"));
        assert!(!oracle("!a", "1"));
        assert!(!oracle("?a", "?a"));
        assert!(oracle("rec X . ( !a (+) !b{x<=1} . ?c . X )", "?a + ?b{y<=1} . !c{y>1} . ?a"));
    }

    #[test]
    fn symmetric() {
        for (p, q) in [("?a{t<5} . !b{t<3}", "!a{s<5} . ?b{s<3}"), ("!a{x<=2} . !b{x<=1}", "?a{y<=2} . ?b{y<=1}")] {
            assert_eq!(oracle(p, q), oracle(q, p));
        }
    }

    #[test]
    fn shared_clock_names_are_separated() {
        assert!(oracle("!a{x<2}", "?a{x<3}"));
        assert!(!oracle("!a{x<3}", "?a{x<2}"));
    }

    #[test]
    fn diagonal_guards() {
        assert!(oracle("?a{; y} . !b{x-y<1 && x<3}", "!a{z<1} . ?b"));
        assert!(!oracle("?a{; y} . !b{x-y>=1 && x<3}", "!a{z<1} . ?b"));
    }

    #[test]
    fn budget_is_reported() {
        let r = oracle_compliant_with_limit(&parse("?a{t<5}").unwrap(), &parse("!a{s<5}").unwrap(), 1);
        assert_eq!(r, Err(OracleError::TooLarge(1)));
    }
}
