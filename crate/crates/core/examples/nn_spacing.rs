//! Nearest-neighbor spacing Q_t(ξ) on the plane, a half-plane and a quadrant.

use std::f64::consts::PI;

use gasket::enumerate::enumerate;
use gasket::geometry::{solve_root_quadruple, GasketSpec};
use gasket::stats::{default_xi_grid, nn_spacing, Region};

fn main() -> gasket::Result<()> {
    let root = solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0)?)?;
    let cs = enumerate(&root, 10.0)?;
    let grid = default_xi_grid();
    let plane = nn_spacing(&cs, &Region::whole_plane(), &grid)?;
    for spec in ["halfplane:re>0", "quadrant:0,0", "disk:0,0,0.5"] {
        let region: Region = spec.parse()?;
        let q = nn_spacing(&cs, &region, &grid)?;
        println!(
            "{spec:<16} Q(2)={:.4} Q(4)={:.4}  sup vs plane {:.5}",
            q.at(2.0).unwrap(),
            q.at(4.0).unwrap(),
            q.sup_distance(&plane, 0.0, 10.0)?
        );
    }
    Ok(())
}
