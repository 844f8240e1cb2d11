#![allow(dead_code)]

use std::f64::consts::PI;

use gasket::enumerate::{CenterPoint, CenterSet};
use gasket::geometry::{solve_root_quadruple, Complex, DescartesQuadruple, GasketSpec};
use gasket::stats::{window_count, Region, Window};

pub fn standard_root() -> DescartesQuadruple {
    DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap()
}

pub fn figure_root() -> DescartesQuadruple {
    solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0).unwrap()).unwrap()
}

pub fn symmetric_root() -> DescartesQuadruple {
    solve_root_quadruple(&GasketSpec::new(2.0 * PI / 3.0, 4.0 * PI / 3.0).unwrap()).unwrap()
}

/// A center set from bare points, all given curvature `1` (only the
/// centers and `t` matter to the statistics).
pub fn point_set(centers: &[Complex], t: f64) -> CenterSet {
    let points = centers.iter().map(|&center| CenterPoint { center, curvature: 1.0 }).collect();
    CenterSet { points, t, root: standard_root() }
}

fn members(cs: &CenterSet, region: &Region) -> Vec<Complex> {
    cs.points.iter().map(|p| p.center).filter(|&z| region.contains(z)).collect()
}

/// Unordered pair counts at each `ξ`, by scanning all pairs.
pub fn brute_pair_counts(cs: &CenterSet, region: &Region, grid: &[f64]) -> (Vec<u64>, usize) {
    let m = members(cs, region);
    let scale = cs.scale();
    let mut counts = vec![0u64; grid.len()];
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let s = scale * (m[i] - m[j]).norm();
            for (k, &xi) in grid.iter().enumerate() {
                if s < xi {
                    counts[k] += 1;
                }
            }
        }
    }
    (counts, m.len())
}

/// Rescaled nearest-neighbor distance of each center in `E`, over all centers.
pub fn brute_nn(cs: &CenterSet, region: &Region) -> Vec<f64> {
    let scale = cs.scale();
    let mut out = Vec::new();
    for (i, p) in cs.points.iter().enumerate() {
        if !region.contains(p.center) {
            continue;
        }
        let mut best = f64::INFINITY;
        for (j, q) in cs.points.iter().enumerate() {
            if i != j {
                best = best.min((p.center - q.center).norm());
            }
        }
        out.push(scale * best);
    }
    out
}

pub fn brute_nn_counts(cs: &CenterSet, region: &Region, grid: &[f64]) -> (Vec<u64>, usize) {
    let d = brute_nn(cs, region);
    let counts = grid.iter().map(|&xi| d.iter().filter(|&&s| s < xi).count() as u64).collect();
    (counts, d.len())
}

/// Midpoint rule over every cell of a bounded region, counting windows by
/// exhaustive scan.
pub fn brute_integral(cs: &CenterSet, region: &Region, h: f64, windows: &[Window], f: impl Fn(&[u32]) -> f64) -> f64 {
    let (lo, hi) = region.bounding_box().expect("bounded region");
    let i0 = (lo.re / h - 0.5).floor() as i64 - 1;
    let i1 = (hi.re / h - 0.5).ceil() as i64 + 1;
    let j0 = (lo.im / h - 0.5).floor() as i64 - 1;
    let j1 = (hi.im / h - 0.5).ceil() as i64 + 1;
    let mut total = 0.0;
    let mut counts = vec![0u32; windows.len()];
    for j in j0..=j1 {
        for i in i0..=i1 {
            let z = Complex::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            if !region.contains(z) {
                continue;
            }
            for (k, w) in windows.iter().enumerate() {
                counts[k] = window_count(cs, w, z) as u32;
            }
            total += f(&counts);
        }
    }
    total * h * h
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
