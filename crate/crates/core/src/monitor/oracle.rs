use alloc::string::String;
use alloc::vec::Vec;

use crate::semantics::{explore, joint_tables, scheme_for, EquationTable, OracleError, RegionSystem, TableKind};
use crate::syntax::{make_disjoint, Tst};
use crate::zones::{ClockId, Valuation};

/// A monitoring configuration without failures: equation of each side and
/// the output each side has written but the peer not yet read.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BufferedState {
    pub eq: [usize; 2],
    pub buffer: [Option<String>; 2],
}

/// The honest fragment of the monitoring semantics over equation tables.
pub struct BufferedSystem {
    tables: [EquationTable; 2],
    dim: usize,
}

impl RegionSystem for BufferedSystem {
    type State = BufferedState;

    fn dim(&self) -> usize {
        self.dim
    }

    fn initial(&self) -> BufferedState {
        BufferedState {
            eq: [self.tables[0].start, self.tables[1].start],
            buffer: [None, None],
        }
    }

    fn actions(&self, s: &BufferedState, v: &Valuation) -> Vec<(BufferedState, Vec<ClockId>)> {
        let mut out = Vec::new();
        let empty = s.buffer[0].is_none() && s.buffer[1].is_none();
        for k in 0..2 {
            let e = &self.tables[k].entries[s.eq[k]];
            match e.kind {
                TableKind::Internal if empty => {
                    for b in &e.branches {
                        if b.guard.contains(v) {
                            let mut n = s.clone();
                            n.eq[k] = b.target;
                            n.buffer[k] = Some(b.action.clone());
                            out.push((n, b.resets.clone()));
                        }
                    }
                }
                TableKind::External if s.buffer[k].is_none() => {
                    let Some(a) = &s.buffer[1 - k] else { continue };
                    for b in e.branches.iter().filter(|b| &b.action == a) {
                        if b.guard.contains(v) {
                            let mut n = s.clone();
                            n.eq[k] = b.target;
                            n.buffer[1 - k] = None;
                            out.push((n, b.resets.clone()));
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    fn may_delay_to(&self, s: &BufferedState, v: &Valuation) -> bool {
        s.buffer.iter().all(Option::is_none) && (0..2).all(|k| self.tables[k].entries[s.eq[k]].rdy.contains(v))
    }

    fn is_success(&self, s: &BufferedState) -> bool {
        (0..2).all(|k| self.tables[k].entries[s.eq[k]].kind == TableKind::Success)
    }

    fn active(&self, s: &BufferedState) -> Vec<bool> {
        let a = &self.tables[0].entries[s.eq[0]].active;
        let b = &self.tables[1].entries[s.eq[1]].active;
        a.iter().zip(b).map(|(x, y)| *x || *y).collect()
    }
}

/// `p ⋈ₘ q`, decided on the region quotient of the monitoring semantics
/// restricted to moves that blame nobody.
pub fn monitor_compliant(p: &Tst, q: &Tst, limit: usize) -> Result<bool, OracleError> {
    let (p, q) = make_disjoint(p, q);
    let (tp, tq, joint) = joint_tables(&p, &q).expect("clocks of the pair are declared");
    let scheme = scheme_for(&p, &q, &joint);
    let sys = BufferedSystem {
        tables: [tp, tq],
        dim: joint.dim(),
    };
    Ok(explore(&sys, &scheme, limit)?.first_deadlock().is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{oracle_compliant, ORACLE_LIMIT};
    use crate::syntax::parse;

    #[test]
    fn agrees_with_configuration_semantics() {
        for (p, q) in [
            ("?a{t<5} . !b{t<3}", "!a{t<2} . ?b{t<3}"),
            ("?a{t<5} . !b{t<3}", "!a{t<5} . ?b{t<3}"),
            ("!a{2<t && t<4}", "?a{2<t && t<5} + ?b{2<t && t<5}"),
            ("rec X . ( !a (+) !b{x<=1} . ?c . X )", "?a + ?b{y<=1} . !c{y>1} . ?a"),
            ("!a{x<=2} . !b{x<=1}", "?a{x<=2} . ?b{x<=1}"),
            ("?a", "?a"),
        ] {
            let (p, q) = (parse(p).unwrap(), parse(q).unwrap());
            assert_eq!(
                monitor_compliant(&p, &q, ORACLE_LIMIT).unwrap(),
                oracle_compliant(&p, &q).unwrap()
            );
        }
    }
}
