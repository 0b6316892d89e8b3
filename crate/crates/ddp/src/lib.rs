//! Frontend plumbing for the `ddp` binary: file loading, JSON records and
//! text rendering of verdicts and survey reports.

pub mod cli;
pub mod dto;
pub mod io;
pub mod report;
