//! Plain CSV tables written by the CLI.

use std::fmt::Write as _;

use crate::analysis::{CondSweepRow, TwoPointRow};
use crate::solver::SolveDiagnostics;

pub const COND_HEADER: &str = "num_points,separation_px,separation_superpx,condition_number";
pub const TWO_POINT_HEADER: &str = "separation_px,resolved,dip_ratio";
pub const SPECTRUM_HEADER: &str = "wavelength_nm,value";
pub const OBJECTIVE_HEADER: &str = "iteration,objective,data_fidelity";

/// Written in place of a condition number for lattices that do not fit.
pub const SKIPPED: &str = "skipped";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn condition_csv(rows: &[CondSweepRow]) -> String {
    let mut s = format!("{COND_HEADER}\n");
    for r in rows {
        let cond = r.condition_number.map_or_else(|| SKIPPED.to_string(), |c| c.to_string());
        writeln!(s, "{},{},{},{}", r.num_points, r.separation_px, r.separation_superpx, cond).unwrap();
    }
    s
}

pub fn two_point_csv(rows: &[TwoPointRow]) -> String {
    let mut s = format!("{TWO_POINT_HEADER}\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.separation_px, r.resolved, opt(r.dip_ratio)).unwrap();
    }
    s
}

pub fn spectrum_csv(wavelengths_nm: &[f64], values: &[f64]) -> String {
    let mut s = format!("{SPECTRUM_HEADER}\n");
    for (w, v) in wavelengths_nm.iter().zip(values) {
        writeln!(s, "{w},{v}").unwrap();
    }
    s
}

pub fn objective_csv(diag: &SolveDiagnostics) -> String {
    let mut s = format!("{OBJECTIVE_HEADER}\n");
    for ((i, f), d) in diag
        .logged_iterations
        .iter()
        .zip(&diag.objective_history)
        .zip(&diag.data_fidelity_history)
    {
        writeln!(s, "{i},{f},{d}").unwrap();
    }
    s
}
