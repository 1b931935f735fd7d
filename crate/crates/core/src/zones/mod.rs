//! Sets of clock valuations: DBMs, federations, and their conversion from and
//! to guards.

mod bound;
mod clocks;
mod dbm;
mod federation;

use alloc::string::String;
use alloc::vec::Vec;

pub use bound::{Bound, MAX_CONSTANT};
pub use clocks::{ClockId, ClockMap, Valuation};
pub use dbm::{Dbm, Window};
pub use federation::Federation;

use crate::syntax::{CmpOp, Guard};

/// Exact rationals used for valuations and delays.
pub type Q = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ZoneError {
    #[error("unknown clock `{0}`")]
    UnknownClock(String),
}

fn atom_constraints(i: usize, j: usize, op: CmpOp, c: u32) -> Vec<(usize, usize, Bound)> {
    let c = c as i32;
    match op {
        CmpOp::Lt => alloc::vec![(i, j, Bound::strict(c))],
        CmpOp::Le => alloc::vec![(i, j, Bound::weak(c))],
        CmpOp::Gt => alloc::vec![(j, i, Bound::strict(-c))],
        CmpOp::Ge => alloc::vec![(j, i, Bound::weak(-c))],
        CmpOp::Eq => alloc::vec![(i, j, Bound::weak(c)), (j, i, Bound::weak(-c))],
    }
}

fn atom_fed(dim: usize, cons: Vec<(usize, usize, Bound)>) -> Federation {
    let mut d = Some(Dbm::universe(dim));
    for (i, j, b) in cons {
        d = d.and_then(|d| d.constrain(i, j, b));
    }
    match d {
        Some(d) => Federation::from_dbm(d),
        None => Federation::empty(dim),
    }
}

/// `⟦g⟧` over the given clocks.
pub fn fed_from_guard(g: &Guard, clocks: &ClockMap) -> Result<Federation, ZoneError> {
    let dim = clocks.dim();
    let id = |x: &String| clocks.id(x).ok_or_else(|| ZoneError::UnknownClock(x.clone()));
    Ok(match g {
        Guard::True => Federation::universe(dim),
        Guard::Not(a) => fed_from_guard(a, clocks)?.complement(),
        Guard::And(a, b) => fed_from_guard(a, clocks)?.intersect(&fed_from_guard(b, clocks)?),
        Guard::Or(a, b) => fed_from_guard(a, clocks)?.union(&fed_from_guard(b, clocks)?),
        Guard::Atom(x, op, c) => atom_fed(dim, atom_constraints(id(x)?, 0, *op, *c)),
        Guard::Diag(x, y, op, c) => atom_fed(dim, atom_constraints(id(x)?, id(y)?, *op, *c)),
    })
}

/// Drops constraints implied by the others.
fn minimal_constraints(d: &Dbm) -> Vec<(usize, usize, Bound)> {
    let mut cons = d.constraints();
    let mut k = 0;
    while k < cons.len() {
        let mut rebuilt = Some(Dbm::universe(d.dim()));
        for (idx, &(i, j, b)) in cons.iter().enumerate() {
            if idx != k {
                rebuilt = rebuilt.and_then(|r| r.constrain(i, j, b));
            }
        }
        if rebuilt.as_ref() == Some(d) {
            cons.remove(k);
        } else {
            k += 1;
        }
    }
    cons
}

fn dbm_to_guard(d: &Dbm, clocks: &ClockMap) -> Guard {
    let cons = minimal_constraints(d);
    let mut used = alloc::vec![false; cons.len()];
    let mut atoms: Vec<Guard> = Vec::new();
    for (k, &(i, j, b)) in cons.iter().enumerate() {
        if used[k] {
            continue;
        }
        used[k] = true;
        // Pair xi - xj <= c with xj - xi <= -c into an equality.
        let partner = cons
            .iter()
            .enumerate()
            .position(|(m, &(i2, j2, b2))| {
                !used[m] && i2 == j && j2 == i && b.is_weak() && b2.is_weak() && b2.value() == -b.value()
            });
        if let Some(m) = partner {
            used[m] = true;
            let (hi, lo, v) = if b.value() >= 0 { (i, j, b.value()) } else { (j, i, -b.value()) };
            atoms.push(if lo == 0 {
                Guard::Atom(clocks.name(hi).into(), CmpOp::Eq, v as u32)
            } else if hi == 0 {
                Guard::Atom(clocks.name(lo).into(), CmpOp::Eq, 0)
            } else {
                Guard::Diag(clocks.name(hi).into(), clocks.name(lo).into(), CmpOp::Eq, v as u32)
            });
            continue;
        }
        let v = b.value();
        let weak = b.is_weak();
        atoms.push(if j == 0 {
            Guard::Atom(clocks.name(i).into(), if weak { CmpOp::Le } else { CmpOp::Lt }, v as u32)
        } else if i == 0 {
            Guard::Atom(clocks.name(j).into(), if weak { CmpOp::Ge } else { CmpOp::Gt }, (-v) as u32)
        } else if v >= 0 {
            Guard::Diag(
                clocks.name(i).into(),
                clocks.name(j).into(),
                if weak { CmpOp::Le } else { CmpOp::Lt },
                v as u32,
            )
        } else {
            Guard::Diag(
                clocks.name(j).into(),
                clocks.name(i).into(),
                if weak { CmpOp::Ge } else { CmpOp::Gt },
                (-v) as u32,
            )
        });
    }
    let mut it = atoms.into_iter();
    match it.next() {
        None => Guard::True,
        Some(first) => it.fold(first, Guard::and),
    }
}

/// A guard denoting exactly `f`: a disjunction of per-DBM conjunctions.
pub fn fed_to_guard(f: &Federation, clocks: &ClockMap) -> Guard {
    let parts: Vec<Guard> = f.parts().iter().map(|d| dbm_to_guard(d, clocks)).collect();
    if parts.iter().any(Guard::is_true) {
        return Guard::True;
    }
    let mut it = parts.into_iter();
    match it.next() {
        None => Guard::ff(),
        Some(first) => it.fold(first, Guard::or),
    }
}

/// `↓F`.
pub fn past(f: &Federation) -> Federation {
    f.past()
}

/// `F↓R⁻¹ = {ν | ν[R] ∈ F}`.
pub fn inverse_reset(f: &Federation, resets: &[ClockId]) -> Federation {
    f.inverse_reset(resets)
}

/// Looks up clock ids of `names`.
pub fn clock_ids<'a, I>(clocks: &ClockMap, names: I) -> Result<Vec<ClockId>, ZoneError>
where
    I: IntoIterator<Item = &'a String>,
{
    names
        .into_iter()
        .map(|n| clocks.id(n).ok_or_else(|| ZoneError::UnknownClock(n.clone())))
        .collect()
}
