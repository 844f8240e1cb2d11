//! Pair correlation P_t(ξ) at several thresholds; the curves settle as t grows.

use std::f64::consts::PI;

use gasket::enumerate::enumerate;
use gasket::geometry::{solve_root_quadruple, GasketSpec};
use gasket::stats::{default_xi_grid, pair_correlation, Region};

fn main() -> gasket::Result<()> {
    let root = solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0)?)?;
    let all = enumerate(&root, 10.0)?;
    let grid = default_xi_grid();
    let plane = Region::whole_plane();
    let mut prev = None;
    for t in [8.0, 9.0, 10.0] {
        let cs = all.truncate(t);
        let p = pair_correlation(&cs, &plane, &grid)?;
        print!(
            "t={t} N={} P(2)={:.4} P(5)={:.4} P(10)={:.4}",
            cs.len(),
            p.at(2.0).unwrap(),
            p.at(5.0).unwrap(),
            p.at(10.0).unwrap()
        );
        if let Some(q) = &prev {
            print!("  sup change {:.5}", p.sup_distance(q, 2.0, 10.0)?);
        }
        println!();
        prev = Some(p);
    }
    Ok(())
}
