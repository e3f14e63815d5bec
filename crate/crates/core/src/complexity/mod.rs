//! Bound values, audits and exponent fits.

pub mod audit;
mod bounds;
mod fit;
pub mod inputs;

pub use audit::{audit, AuditOptions, AuditReport, AuditRow, AuditSummary, Violation, ViolationKind};
pub use bounds::{bound_time, bound_value_size, decimal, time_bound, value_size_bound, Measurement};
pub use fit::{fit_exponent, Fit};
