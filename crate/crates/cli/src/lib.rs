//! Frontend for the `powalt` binary: argument grammar, budget profiles and
//! reports with text and JSON renderings.
//!
//! Exit codes: 0 for a definite verdict, 2 when a budget or oracle runs out
//! (or a certificate is rejected), 1 for input errors.

pub mod args;
pub mod commands;
pub mod report;

pub use args::{Cli, Limits, Profile};
pub use commands::{run, Failure};
pub use report::{Report, Status, REPORT_SCHEMA_VERSION};
