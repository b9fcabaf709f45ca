//! CSV writers for measures, plans, potentials and chamber maps.
//!
//! Every file starts with a header row. Floats are written with 17
//! significant digits so they round-trip exactly.

use std::io::Write;

use crate::error::Result;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn coord_header(prefix: &str, len: usize) -> Vec<String> {
    (0..len).map(|i| format!("{prefix}{i}")).collect()
}

pub(crate) fn write_row<W: Write>(out: &mut W, cells: &[String]) -> Result<()> {
    writeln!(out, "{}", cells.join(","))?;
    Ok(())
}

pub(crate) fn floats(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_f64(v)).collect()
}
