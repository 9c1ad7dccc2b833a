//! Library half of the `pilotopt` command: sweeps, figure data, output
//! formats and the verification report.

pub mod figures;
pub mod output;
pub mod physical;
pub mod sweep;
pub mod verify;
