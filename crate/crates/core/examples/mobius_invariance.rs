//! Möbius images keep tangency; dilating a center set leaves P_t unchanged.

use gasket::enumerate::enumerate;
use gasket::geometry::{apply_mobius, Complex, DescartesQuadruple, MobiusMap};
use gasket::stats::{default_xi_grid, pair_correlation, Region};

fn main() -> gasket::Result<()> {
    let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0])?;
    let m = MobiusMap::new(
        Complex::new(1.0, 0.5),
        Complex::new(0.2, 0.0),
        Complex::new(0.3, -0.1),
        Complex::new(1.0, 0.0),
    )?;
    let images: Vec<_> = root.circles.iter().map(|c| apply_mobius(&m, c)).collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            worst = worst.max(images[i].tangency_residual(&images[j]));
        }
    }
    println!("image curvatures {:?}", images.iter().map(|c| c.curvature).collect::<Vec<_>>());
    println!("worst tangency residual after the map: {worst:.2e}");

    let cs = enumerate(&root, 7.0)?;
    let grid = default_xi_grid();
    let plane = Region::whole_plane();
    let p = pair_correlation(&cs, &plane, &grid)?;
    let p2 = pair_correlation(&cs.dilate(2.0), &plane, &grid)?;
    println!("P after dilation by 2: sup change {}", p.sup_distance(&p2, 0.0, 10.0)?);
    Ok(())
}
