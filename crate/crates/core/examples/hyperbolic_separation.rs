//! Apexes of gasket circles in H³ are pairwise at distance ≥ acosh 3.

use std::f64::consts::PI;

use gasket::enumerate::enumerate;
use gasket::geometry::{solve_root_quadruple, Circle, GasketSpec, MobiusMap};
use gasket::hyperbolic::{apex_of_circle, apex_of_image, cosh_distance, Apex, APEX_SEPARATION};

fn main() -> gasket::Result<()> {
    let root = solve_root_quadruple(&GasketSpec::new(2.0 * PI / 3.0, 4.0 * PI / 3.0)?)?;
    let cs = enumerate(&root, 100f64.ln())?;
    let apexes: Vec<_> = cs
        .points
        .iter()
        .filter(|p| p.curvature > 0.0)
        .filter_map(|p| match apex_of_circle(&Circle::new(p.center, p.curvature).ok()?) {
            Apex::Finite(q) => Some(q),
            Apex::AtInfinity => None,
        })
        .collect();
    let mut min = f64::INFINITY;
    for (i, p) in apexes.iter().enumerate() {
        for q in &apexes[i + 1..] {
            min = min.min(cosh_distance(p, q));
        }
    }
    println!("{} apexes, min cosh d = {min:.12} (bound 3, d ≥ {APEX_SEPARATION})", apexes.len());

    // 1/z sends the unit circle's interior circle through 0 to a line.
    let through_origin = Circle::from_center_radius(gasket::geometry::Complex::new(0.5, 0.0), 0.5)?;
    println!("image under 1/z: {:?}", apex_of_image(&MobiusMap::reciprocal(), &through_origin)?);
    Ok(())
}
