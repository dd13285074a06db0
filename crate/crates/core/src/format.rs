//! Shared text formatting for CSV outputs.

/// First line of every CSV file written by this crate.
pub const CSV_HEADER: &str = "# polar-fault-lab v1";

/// Formats a float with 17 significant digits, which round-trips any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}
