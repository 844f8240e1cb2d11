//! Curvature-bounded enumeration of gasket circles.
//!
//! Every circle of the gasket other than the four root circles is produced
//! exactly once by a reduced reflection word applied to the root quadruple,
//! so the enumeration is a tree walk that never undoes the previous move.
//! A branch is pruned as soon as its new circle reaches the curvature bound:
//! the circle inscribed in a curvilinear gap is the largest circle inside it.

use std::cmp::Ordering;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::geometry::{Complex, DescartesQuadruple};

pub const DEFAULT_CAPACITY: usize = 50_000_000;

// Depth at which the walk is split into independent subtrees.
const SPLIT_DEPTH: usize = 6;

/// One circle of the gasket, identified by its center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterPoint {
    pub center: Complex,
    pub curvature: f64,
}

impl CenterPoint {
    pub fn radius(&self) -> f64 {
        1.0 / self.curvature.abs()
    }
}

/// Centers of all circles with curvature `< e^t`, in canonical order.
#[derive(Clone, Debug)]
pub struct CenterSet {
    pub points: Vec<CenterPoint>,
    pub t: f64,
    pub root: DescartesQuadruple,
}

impl CenterSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Scale factor `e^t` applied to distances by the statistics.
    pub fn scale(&self) -> f64 {
        self.t.exp()
    }

    pub fn centers(&self) -> Vec<Complex> {
        self.points.iter().map(|p| p.center).collect()
    }

    /// Restriction to a smaller threshold `t' ≤ t`.
    pub fn truncate(&self, t: f64) -> CenterSet {
        let bound = t.exp();
        let n = self.points.partition_point(|p| p.curvature < bound);
        CenterSet { points: self.points[..n].to_vec(), t, root: self.root }
    }

    /// The configuration dilated by `λ > 0`, with `t` shifted by `−log λ` so
    /// that the same circles stay above the radius threshold.
    pub fn dilate(&self, lambda: f64) -> CenterSet {
        let points = self
            .points
            .iter()
            .map(|p| CenterPoint { center: p.center * lambda, curvature: p.curvature / lambda })
            .collect();
        let mut root = self.root;
        for c in root.circles.iter_mut() {
            c.center *= lambda;
            c.curvature /= lambda;
        }
        CenterSet { points, t: self.t - lambda.ln(), root }
    }

    /// CSV with header `curvature,center_re,center_im,radius`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "curvature,center_re,center_im,radius")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(p.curvature),
                fmt_f64(p.center.re),
                fmt_f64(p.center.im),
                fmt_f64(p.radius())
            )?;
        }
        Ok(())
    }

    /// Reads the CSV written by [`CenterSet::write_csv`]. The root quadruple
    /// is not stored in the file; the caller supplies it.
    pub fn read_csv(text: &str, t: f64, root: DescartesQuadruple) -> Result<CenterSet> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "curvature,center_re,center_im,radius" => {}
            other => return Err(Error::Parse(format!("unexpected circles header {other:?}"))),
        }
        let mut points = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 fields", n + 2)));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", n + 2)));
            points.push(CenterPoint {
                curvature: num(fields[0])?,
                center: Complex::new(num(fields[1])?, num(fields[2])?),
            });
        }
        Ok(CenterSet { points, t, root })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumerationStats {
    pub circles_emitted: usize,
    pub max_tree_depth: usize,
    pub wall_time: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub capacity: usize,
    /// Track the worst Descartes residual over every visited quadruple.
    pub check_residuals: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { capacity: DEFAULT_CAPACITY, check_residuals: false }
    }
}

/// Canonical order: curvature, then center lexicographically.
pub fn canonical_cmp(a: &CenterPoint, b: &CenterPoint) -> Ordering {
    a.curvature
        .total_cmp(&b.curvature)
        .then(a.center.re.total_cmp(&b.center.re))
        .then(a.center.im.total_cmp(&b.center.im))
}

struct Walk<'a> {
    bound: f64,
    capacity: usize,
    emitted: &'a AtomicUsize,
    check: bool,
}

#[derive(Default)]
struct WalkOutput {
    points: Vec<CenterPoint>,
    max_depth: usize,
    worst_residual: f64,
}

impl Walk<'_> {
    fn emit(&self, out: &mut WalkOutput, q: &DescartesQuadruple, i: usize) -> Result<()> {
        let c = q.circles[i];
        out.points.push(CenterPoint { center: c.center, curvature: c.curvature });
        if self.emitted.fetch_add(1, AtomicOrdering::Relaxed) + 1 > self.capacity {
            return Err(Error::CapacityExceeded { limit: self.capacity });
        }
        if self.check {
            let (r1, t1) = q.descartes_residual();
            let (r2, t2) = q.complex_descartes_residual();
            out.worst_residual = out.worst_residual.max(r1 / t1).max(r2 / t2);
        }
        Ok(())
    }

    fn children(&self, q: &DescartesQuadruple) -> impl Iterator<Item = DescartesQuadruple> + '_ {
        let q = *q;
        (0..4).filter(move |&i| Some(i) != q.last_swapped).map(move |i| q.reflect(i)).filter(move |child| {
            let i = child.last_swapped.unwrap();
            child.circles[i].curvature < self.bound
        })
    }

    fn descend(&self, start: DescartesQuadruple, depth: usize, out: &mut WalkOutput) -> Result<()> {
        let mut stack = vec![(start, depth)];
        while let Some((q, d)) = stack.pop() {
            self.emit(out, &q, q.last_swapped.unwrap())?;
            out.max_depth = out.max_depth.max(d);
            for child in self.children(&q) {
                stack.push((child, d + 1));
            }
        }
        Ok(())
    }
}

/// Result of a walk including the worst normalized Descartes residual seen
/// (residual divided by its tolerance; `≤ 1` means every check passed).
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub centers: CenterSet,
    pub stats: EnumerationStats,
    pub worst_residual_ratio: f64,
}

/// Every circle with curvature `< e^t`, each exactly once, sorted.
pub fn enumerate(root: &DescartesQuadruple, t: f64) -> Result<CenterSet> {
    Ok(enumerate_with(root, t, EnumerateOptions::default())?.centers)
}

pub fn enumerate_with(root: &DescartesQuadruple, t: f64, opts: EnumerateOptions) -> Result<Enumeration> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold t must be finite and ≥ 0, got {t}")));
    }
    root.check()?;
    let started = Instant::now();
    let bound = t.exp();
    let emitted = AtomicUsize::new(0);
    let walk = Walk { bound, capacity: opts.capacity, emitted: &emitted, check: opts.check_residuals };

    let mut head = WalkOutput::default();
    let mut root_q = *root;
    root_q.last_swapped = None;
    for i in 0..4 {
        if root_q.circles[i].curvature < bound {
            walk.emit(&mut head, &root_q, i)?;
        }
    }

    // Breadth-first down to SPLIT_DEPTH, then independent subtrees.
    let mut frontier: Vec<DescartesQuadruple> =
        (0..4).map(|i| root_q.reflect(i)).filter(|c| c.circles[c.last_swapped.unwrap()].curvature < bound).collect();
    let mut depth = 1;
    while depth < SPLIT_DEPTH && !frontier.is_empty() {
        let mut next = Vec::with_capacity(frontier.len() * 3);
        for q in &frontier {
            walk.emit(&mut head, q, q.last_swapped.unwrap())?;
            head.max_depth = head.max_depth.max(depth);
            next.extend(walk.children(q));
        }
        frontier = next;
        depth += 1;
    }

    let parts: Vec<Result<WalkOutput>> = frontier
        .par_iter()
        .map(|q| {
            let mut out = WalkOutput::default();
            walk.descend(*q, depth, &mut out)?;
            Ok(out)
        })
        .collect();

    let mut points = head.points;
    let mut max_depth = head.max_depth;
    let mut worst = head.worst_residual;
    for part in parts {
        let part = part?;
        points.extend(part.points);
        max_depth = max_depth.max(part.max_depth);
        worst = worst.max(part.worst_residual);
    }
    points.par_sort_unstable_by(canonical_cmp);

    let stats = EnumerationStats {
        circles_emitted: points.len(),
        max_tree_depth: max_depth,
        wall_time: started.elapsed().as_secs_f64(),
    };
    Ok(Enumeration { centers: CenterSet { points, t, root: *root }, stats, worst_residual_ratio: worst })
}

/// `N(ℂ, t)` for each `t` of an increasing grid, from a single walk at the
/// largest threshold.
pub fn count_growth(root: &DescartesQuadruple, t_grid: &[f64]) -> Result<Vec<(f64, usize)>> {
    if t_grid.is_empty() {
        return Ok(Vec::new());
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("t grid must be strictly increasing".into()));
    }
    let t_max = *t_grid.last().unwrap();
    let set = enumerate(root, t_max)?;
    Ok(counts_at(&set, t_grid))
}

/// Counts at each threshold of `t_grid` from an already enumerated set.
pub fn counts_at(set: &CenterSet, t_grid: &[f64]) -> Vec<(f64, usize)> {
    t_grid
        .iter()
        .map(|&t| {
            let bound = t.exp();
            (t, set.points.partition_point(|p| p.curvature < bound))
        })
        .collect()
}

/// Least-squares slope of `log N` against `t` over the rows with
/// `t_lo ≤ t ≤ t_hi`; `None` with fewer than two usable rows.
pub fn growth_slope(rows: &[(f64, usize)], t_lo: f64, t_hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|(t, n)| *t >= t_lo && *t <= t_hi && *n > 0).map(|&(t, n)| (t, (n as f64).ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
