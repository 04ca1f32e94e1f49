//! Spec files, reports and CSV output for the `symphonic` command.

pub mod report;
pub mod specfile;
pub mod table;
