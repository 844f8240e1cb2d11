//! Fit log N(t) against t for the (−1, 2, 2, 3) gasket.

use gasket::enumerate::{count_growth, growth_slope};
use gasket::geometry::DescartesQuadruple;

fn main() -> gasket::Result<()> {
    let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0])?;
    let (lo, hi) = (100f64.ln(), 100_000f64.ln());
    let grid: Vec<f64> = (0..=30).map(|k| lo + (hi - lo) * k as f64 / 30.0).collect();
    let rows = count_growth(&root, &grid)?;
    for &(t, n) in rows.iter().step_by(5) {
        println!("t={t:.4} N={n}");
    }
    let slope = growth_slope(&rows, lo, hi).expect("at least two rows");
    println!("slope {slope:.4} (reference {})", gasket::stats::DELTA);
    Ok(())
}
