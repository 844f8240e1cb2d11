//! Pair correlation, nearest-neighbor spacing and their sampled curves.

use std::io::Write;

use rayon::prelude::*;

use crate::enumerate::CenterSet;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::spatial::{GridIndex, NearestIndex};
use crate::stats::region::Region;

/// A statistic sampled on an increasing `ξ` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub xi: Vec<f64>,
    pub values: Vec<f64>,
}

impl Curve {
    pub fn new(xi: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xi.len() != values.len() {
            return Err(Error::GridMismatch(format!("{} grid points, {} values", xi.len(), values.len())));
        }
        check_grid(&xi)?;
        Ok(Curve { xi, values })
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Value at a grid point equal to `xi` within 1e-9.
    pub fn at(&self, xi: f64) -> Option<f64> {
        self.xi.iter().position(|&x| (x - xi).abs() < 1e-9).map(|i| self.values[i])
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// `sup |self − other|` over shared grid points with `lo ≤ ξ ≤ hi`.
    pub fn sup_distance(&self, other: &Curve, lo: f64, hi: f64) -> Result<f64> {
        if self.xi.len() != other.xi.len() || self.xi.iter().zip(&other.xi).any(|(a, b)| (a - b).abs() > 1e-9) {
            return Err(Error::GridMismatch("curves are sampled on different grids".into()));
        }
        Ok(self
            .xi
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(x, _)| **x >= lo - 1e-12 && **x <= hi + 1e-12)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// CSV with header `xi,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "xi,value")?;
        for (x, v) in self.xi.iter().zip(&self.values) {
            writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*v))?;
        }
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Curve> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "xi,value" => {}
            other => return Err(Error::Parse(format!("unexpected curve header {other:?}"))),
        }
        let mut xi = Vec::new();
        let mut values = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (a, b) = line.split_once(',').ok_or_else(|| Error::Parse(format!("bad row {line:?}")))?;
            xi.push(a.trim().parse().map_err(|e| Error::Parse(format!("{e}")))?);
            values.push(b.trim().parse().map_err(|e| Error::Parse(format!("{e}")))?);
        }
        Curve::new(xi, values)
    }
}

fn check_grid(xi: &[f64]) -> Result<()> {
    if xi.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::GridMismatch("ξ values must be finite and nonnegative".into()));
    }
    if xi.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::GridMismatch("ξ grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `min, min + step, …` up to `max` inclusive (within half a step).
pub fn xi_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && min >= 0.0 && max >= min && max.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad ξ grid {min}..{max} step {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

/// Default grid: 0 to 10 in steps of 0.05.
pub fn default_xi_grid() -> Vec<f64> {
    xi_grid(0.0, 10.0, 0.05).expect("valid default grid")
}

fn region_members(cs: &CenterSet, region: &Region) -> Vec<usize> {
    cs.points.iter().enumerate().filter(|(_, p)| region.contains(p.center)).map(|(i, _)| i).collect()
}

/// `P_{E,t}(ξ)`: half the ordered-pair count of centers in `E` at rescaled
/// distance `e^t |p − q| < ξ`, divided by `#(𝒞_t ∩ E)`. Equivalently the
/// unordered count over the same denominator.
pub fn pair_correlation(cs: &CenterSet, region: &Region, xi_grid: &[f64]) -> Result<Curve> {
    check_grid(xi_grid)?;
    let members = region_members(cs, region);
    if members.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let scale = cs.scale();
    let xi_max = xi_grid.last().copied().unwrap_or(0.0);
    let mut scaled = if xi_max > 0.0 && members.len() > 1 {
        let centers: Vec<_> = members.iter().map(|&i| cs.points[i].center).collect();
        let reach = xi_max / scale * (1.0 + 1e-9);
        let idx = GridIndex::build(&centers, reach)?;
        idx.pair_stream(reach).into_iter().map(|(_, _, d)| scale * d).filter(|&s| s < xi_max).collect::<Vec<f64>>()
    } else {
        Vec::new()
    };
    scaled.par_sort_unstable_by(f64::total_cmp);
    let n = members.len() as f64;
    let values = xi_grid.iter().map(|&xi| scaled.partition_point(|&s| s < xi) as f64 / n).collect();
    Curve::new(xi_grid.to_vec(), values)
}

/// Rescaled nearest-neighbor distances `e^t d_t(p)` for the centers in `E`,
/// with `d_t` minimized over all of `𝒞_t`.
pub fn nn_distances(cs: &CenterSet, region: &Region) -> Result<Vec<f64>> {
    if cs.len() < 2 {
        return Err(Error::Singleton(cs.len()));
    }
    let members = region_members(cs, region);
    if members.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let scale = cs.scale();
    let idx = NearestIndex::build(&cs.centers(), 4.0 / scale)?;
    members.par_iter().map(|&i| idx.nearest_neighbor(i).map(|(_, d)| scale * d)).collect()
}

/// `Q_{E,t}(ξ)`: fraction of centers in `E` whose rescaled nearest-neighbor
/// distance is `< ξ`.
pub fn nn_spacing(cs: &CenterSet, region: &Region, xi_grid: &[f64]) -> Result<Curve> {
    check_grid(xi_grid)?;
    let mut d = nn_distances(cs, region)?;
    d.par_sort_unstable_by(f64::total_cmp);
    let n = d.len() as f64;
    let values = xi_grid.iter().map(|&xi| d.partition_point(|&s| s < xi) as f64 / n).collect();
    Curve::new(xi_grid.to_vec(), values)
}

/// Central difference `(P(ξ + s/2) − P(ξ − s/2)) / s` on the interior of a
/// uniform grid whose spacing divides `s/2`.
pub fn empirical_derivative(curve: &Curve, step: f64) -> Result<Curve> {
    if !(step > 0.0) {
        return Err(Error::GridMismatch(format!("step must be positive, got {step}")));
    }
    if curve.len() < 2 {
        return Err(Error::GridMismatch("need at least two grid points".into()));
    }
    let h = (curve.xi[curve.len() - 1] - curve.xi[0]) / (curve.len() - 1) as f64;
    for (i, w) in curve.xi.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::GridMismatch(format!("grid is not uniform at index {i}")));
        }
    }
    let k = step / (2.0 * h);
    let kr = k.round();
    if kr < 1.0 || (k - kr).abs() > 1e-6 {
        return Err(Error::GridMismatch(format!("half step {} is not a multiple of the grid spacing {h}", step / 2.0)));
    }
    let k = kr as usize;
    if curve.len() <= 2 * k {
        return Err(Error::GridMismatch("grid too short for the requested step".into()));
    }
    let (xi, values) =
        (k..curve.len() - k).map(|i| (curve.xi[i], (curve.values[i + k] - curve.values[i - k]) / step)).unzip();
    Curve::new(xi, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{CenterPoint, CenterSet};
    use crate::geometry::{Complex, DescartesQuadruple};

    fn two_points(d: f64, t: f64) -> CenterSet {
        CenterSet {
            points: vec![
                CenterPoint { center: Complex::new(0.0, 0.0), curvature: 10.0 },
                CenterPoint { center: Complex::new(d, 0.0), curvature: 10.0 },
            ],
            t,
            root: DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap(),
        }
    }

    #[test]
    fn two_point_pair_correlation() {
        let cs = two_points(0.1, 2.0);
        let cut = 2f64.exp() * 0.1;
        let grid = xi_grid(0.0, 2.0, 0.01).unwrap();
        let p = pair_correlation(&cs, &Region::whole_plane(), &grid).unwrap();
        for (x, v) in p.xi.iter().zip(&p.values) {
            assert_eq!(*v, if *x > cut { 0.5 } else { 0.0 }, "ξ = {x}");
        }
        let q = nn_spacing(&cs, &Region::whole_plane(), &grid).unwrap();
        for (x, v) in q.xi.iter().zip(&q.values) {
            assert_eq!(*v, if *x > cut { 1.0 } else { 0.0 }, "ξ = {x}");
        }
    }

    #[test]
    fn empty_region_and_singleton() {
        let cs = two_points(0.1, 2.0);
        let far = Region::disk(Complex::new(5.0, 5.0), 0.1).unwrap();
        assert_eq!(pair_correlation(&cs, &far, &[1.0]).unwrap_err(), Error::EmptyRegion);
        assert_eq!(nn_spacing(&cs, &far, &[1.0]).unwrap_err(), Error::EmptyRegion);
        let mut one = cs.clone();
        one.points.truncate(1);
        assert_eq!(nn_spacing(&one, &Region::whole_plane(), &[1.0]).unwrap_err(), Error::Singleton(1));
        // A single point has a well-defined, identically zero pair correlation.
        let p = pair_correlation(&one, &Region::whole_plane(), &[1.0, 2.0]).unwrap();
        assert_eq!(p.values, vec![0.0, 0.0]);
    }

    #[test]
    fn derivative_of_constant_and_identity() {
        let grid = xi_grid(0.0, 3.0, 0.05).unwrap();
        let flat = Curve::new(grid.clone(), vec![0.7; grid.len()]).unwrap();
        let d = empirical_derivative(&flat, 0.1).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
        assert_eq!(d.xi.first().copied(), Some(grid[1]));
        let ident = Curve::new(grid.clone(), grid.clone()).unwrap();
        let d = empirical_derivative(&ident, 0.1).unwrap();
        assert!(d.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let d = empirical_derivative(&ident, 0.2).unwrap();
        assert_eq!(d.len(), grid.len() - 4);
    }

    #[test]
    fn derivative_grid_mismatch() {
        let grid = xi_grid(0.0, 3.0, 0.05).unwrap();
        let c = Curve::new(grid.clone(), grid.clone()).unwrap();
        assert!(matches!(empirical_derivative(&c, 0.07), Err(Error::GridMismatch(_))));
        assert!(matches!(empirical_derivative(&c, 0.05), Err(Error::GridMismatch(_))));
        assert!(matches!(empirical_derivative(&c, 0.0), Err(Error::GridMismatch(_))));
        let uneven = Curve::new(vec![0.0, 0.1, 0.3], vec![0.0; 3]).unwrap();
        assert!(matches!(empirical_derivative(&uneven, 0.2), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn grid_construction() {
        let g = default_xi_grid();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert!((g[200] - 10.0).abs() < 1e-12);
        assert!(xi_grid(1.0, 0.0, 0.1).is_err());
        assert!(Curve::new(vec![1.0, 0.5], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn curve_csv_round_trip() {
        let c = Curve::new(vec![0.0, 0.05, 0.1], vec![0.0, 0.25, 1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(Curve::read_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), c);
        assert!(Curve::read_csv("x,y\n").is_err());
    }
}
