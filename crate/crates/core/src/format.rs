//! Number formatting shared by the CSV writers.

/// 17 significant digits in scientific notation; round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}
