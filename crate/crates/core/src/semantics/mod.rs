//! The configuration semantics of pairs of timed session types, deadlock, and
//! a region-quotient reference decision procedure for compliance.

mod config;
mod oracle;
mod region;

pub use config::{rdy, replay, Configuration, Endpoint, Escape, Label, ReplayError, SemanticsError, Side, TimedStep};
pub use oracle::{
    joint_tables, oracle_compliant, oracle_compliant_with_limit, region_graph, scheme_for, EquationTable, SideState,
    TableBranch, TableEntry, TableKind, TstSystem, ORACLE_LIMIT,
};
pub use region::{explore, OracleError, RegionGraph, RegionScheme, RegionSystem};

/// Every discrete successor of `c`.
pub fn step(c: &Configuration) -> alloc::vec::Vec<(Label, Configuration)> {
    c.step()
}

/// Deadlock of a configuration.
pub fn is_deadlock(c: &Configuration) -> bool {
    c.is_deadlock()
}
