//! Enumerate a gasket and write its circles as CSV.
//!
//!     cargo run --release --example generate_gasket -- 1.8849555921538759 3.8746309394274117 10

use std::env;
use std::io::stdout;

use gasket::enumerate::enumerate_with;
use gasket::geometry::{solve_root_quadruple, GasketSpec};

fn main() -> gasket::Result<()> {
    let args: Vec<f64> = env::args().skip(1).map(|a| a.parse().expect("number")).collect();
    let (theta1, theta2, t) = match args[..] {
        [a, b, t] => (a, b, t),
        _ => (std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 3.0),
    };
    let root = solve_root_quadruple(&GasketSpec::new(theta1, theta2)?)?;
    eprintln!("root curvatures {:?}", root.curvatures());
    let e = enumerate_with(&root, t, Default::default())?;
    eprintln!("{} circles, depth {}, {:.3}s", e.stats.circles_emitted, e.stats.max_tree_depth, e.stats.wall_time);
    e.centers.write_csv(stdout().lock())?;
    Ok(())
}
