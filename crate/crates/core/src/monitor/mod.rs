//! Runtime monitoring: one-slot buffers, blame assignment on delays and
//! forbidden actions, and replay of timed traces.

mod machine;
mod oracle;
mod trace;

pub use machine::{culpable, mstep, on_duty, replay, Event, MonitorConfig, MonitorEndpoint, Replay, Report, Rule};
pub use oracle::{monitor_compliant, BufferedState, BufferedSystem};
pub use trace::{events_of, format_trace, parse_rational, parse_trace, TraceError};
