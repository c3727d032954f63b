//! Per-step run diagnostics and their CSV form.

use std::io::{self, Write};

/// Quantities recorded at one step of a time evolution.
///
/// `charge_drift` is |Q(t) − Q(0)| (largest matrix entry) relative to
/// max(|Q(0)|, Σ|j⁰|Δx) at the start; residuals are maxima over the slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub ddw_hamiltonian: f64,
    pub charge_trace: f64,
    pub charge_drift: f64,
    pub gauss_residual: f64,
    pub maxwell_residual: f64,
    pub noether_divergence: f64,
}

pub const CSV_HEADER: &str =
    "step,time,energy,ddw_hamiltonian,charge_trace,charge_drift,gauss_residual,maxwell_residual,noether_divergence";

impl DiagnosticsRecord {
    pub fn is_finite(&self) -> bool {
        [
            self.time,
            self.energy,
            self.ddw_hamiltonian,
            self.charge_trace,
            self.charge_drift,
            self.gauss_residual,
            self.maxwell_residual,
            self.noether_divergence,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// One CSV line; floats use shortest round-trip formatting so output is reproducible.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.step,
            self.time,
            self.energy,
            self.ddw_hamiltonian,
            self.charge_trace,
            self.charge_drift,
            self.gauss_residual,
            self.maxwell_residual,
            self.noether_divergence
        )
    }
}

pub fn write_csv<W: Write>(mut out: W, records: &[DiagnosticsRecord]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Largest value of a field over a run.
pub fn max_of(records: &[DiagnosticsRecord], field: impl Fn(&DiagnosticsRecord) -> f64) -> f64 {
    records.iter().map(field).fold(0.0, f64::max)
}
