//! Joint window moments M_t, scaled by e^{(2−δ)t}.

use std::f64::consts::PI;

use gasket::enumerate::enumerate;
use gasket::geometry::{solve_root_quadruple, GasketSpec};
use gasket::stats::{
    joint_indicator_moment, joint_power_moment, CountIndex, MomentOptions, PowerIndex, Region, Window, WindowCounter,
};

fn main() -> gasket::Result<()> {
    let root = solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0)?)?;
    let all = enumerate(&root, 9.0)?;
    let plane = Region::whole_plane();
    let opts = MomentOptions::default();
    let disk = [Window::disk(2.0)?];
    for t in [7.0, 8.0, 9.0] {
        let cs = all.truncate(t);
        let counter = WindowCounter::new(&cs)?;
        let m = joint_indicator_moment(&counter, &disk, &CountIndex(vec![1]), &plane, &opts)?;
        let p = joint_power_moment(&counter, &disk, &PowerIndex::new(vec![1.0])?, &plane, &opts)?;
        println!("t={t} P(n=1) scaled {:.4}   E[n] scaled {:.4}", m.scaled_estimate, p.scaled_estimate);
    }
    Ok(())
}
