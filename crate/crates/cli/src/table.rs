//! CSV output: header line, then one row per record with every value in
//! shortest round-trip decimal form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flowbox_core::Trajectory;

use crate::CliError;

pub fn write_rows(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// `t,x1,...,xn`.
pub fn trajectory_header(dimension: usize) -> Vec<String> {
    std::iter::once("t".to_string()).chain((1..=dimension).map(|i| format!("x{i}"))).collect()
}

pub fn trajectory_rows(trajectory: &Trajectory) -> Vec<Vec<f64>> {
    trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .map(|(t, x)| std::iter::once(*t).chain(x.iter().copied()).collect())
        .collect()
}

pub fn write_trajectory(path: &Path, trajectory: &Trajectory) -> Result<(), CliError> {
    let n = trajectory.states.first().map_or(0, Vec::len);
    write_rows(path, &trajectory_header(n), &trajectory_rows(trajectory))
}
