//! Smoothed pair and spacing statistics, and how they bracket the sharp ones.

use std::f64::consts::PI;

use gasket::enumerate::enumerate;
use gasket::geometry::{solve_root_quadruple, GasketSpec};
use gasket::stats::{
    mixed_moment_nn, mixed_moment_pair, nn_spacing, pair_correlation, xi_grid, MixedOptions, Region, WindowCounter,
};

fn main() -> gasket::Result<()> {
    let root = solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0)?)?;
    let cs = enumerate(&root, 8.0)?;
    let plane = Region::whole_plane();
    let eps = 0.05;
    let grid = xi_grid(0.0, 10.0, eps)?;
    let p = pair_correlation(&cs, &plane, &grid)?;
    let q = nn_spacing(&cs, &plane, &grid)?;
    let counter = WindowCounter::new(&cs)?;
    let opts = MixedOptions::default();
    for xi in [3.0, 5.0] {
        let pe = mixed_moment_pair(&counter, &plane, xi, eps, &opts)?;
        let qe = mixed_moment_nn(&counter, &plane, xi, eps, &opts)?;
        println!(
            "ξ={xi}: {:.4} ≤ Pε {pe:.4} ≤ {:.4}   {:.4} ≤ Qε {qe:.4} ≤ {:.4}",
            p.at(xi - eps).unwrap(),
            p.at(xi + eps).unwrap(),
            q.at(xi - eps).unwrap(),
            q.at(xi + eps).unwrap()
        );
    }
    Ok(())
}
