//! Central-difference derivative of P_t.

use std::f64::consts::PI;

use gasket::enumerate::enumerate;
use gasket::geometry::{solve_root_quadruple, GasketSpec};
use gasket::stats::{empirical_derivative, pair_correlation, xi_grid, Region};

fn main() -> gasket::Result<()> {
    let root = solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0)?)?;
    let cs = enumerate(&root, 10.0)?;
    let p = pair_correlation(&cs, &Region::whole_plane(), &xi_grid(0.0, 10.0, 0.05)?)?;
    let d = empirical_derivative(&p, 0.1)?;
    for (xi, v) in d.xi.iter().zip(&d.values).step_by(20) {
        println!("{xi:5.2} {v:.4}");
    }
    Ok(())
}
