// Uniform grid over point centers for fixed-radius and nearest-neighbor
// queries. Cells are square with side `cell_size`; the cell of a point is
// floor(p / cell_size) componentwise. Point ids are stored contiguously per
// cell (sorted by cell key, then id) so a cell lookup yields a slice.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::geometry::Complex;

pub type CellKey = (i64, i64);

/// Euclidean distance used by every query and by the reference checks.
#[inline]
pub fn distance(a: Complex, b: Complex) -> f64 {
    (a - b).norm()
}

#[derive(Clone, Debug)]
pub struct GridIndex {
    cell_size: f64,
    inv_cell_size: f64,
    points: Vec<Complex>,
    ids: Vec<u32>,
    cells: FxHashMap<CellKey, (u32, u32)>,
    cell_lo: CellKey,
    cell_hi: CellKey,
}

impl GridIndex {
    pub fn build(points: &[Complex], cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidArgument(format!("cell_size must be positive, got {cell_size}")));
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidArgument("too many points for the grid index".into()));
        }
        let inv = 1.0 / cell_size;
        let key_of = |z: Complex| ((z.re * inv).floor() as i64, (z.im * inv).floor() as i64);
        let mut keyed: Vec<(CellKey, u32)> = points.iter().enumerate().map(|(i, &z)| (key_of(z), i as u32)).collect();
        keyed.sort_unstable();

        let mut cells = FxHashMap::default();
        cells.reserve(keyed.len());
        let mut ids = Vec::with_capacity(keyed.len());
        let mut cell_lo = (i64::MAX, i64::MAX);
        let mut cell_hi = (i64::MIN, i64::MIN);
        let mut start = 0usize;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == key {
                ids.push(keyed[end].1);
                end += 1;
            }
            cells.insert(key, (start as u32, end as u32));
            cell_lo = (cell_lo.0.min(key.0), cell_lo.1.min(key.1));
            cell_hi = (cell_hi.0.max(key.0), cell_hi.1.max(key.1));
            start = end;
        }
        Ok(GridIndex { cell_size, inv_cell_size: inv, points: points.to_vec(), ids, cells, cell_lo, cell_hi })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn point(&self, id: usize) -> Complex {
        self.points[id]
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn cell_of(&self, z: Complex) -> CellKey {
        ((z.re * self.inv_cell_size).floor() as i64, (z.im * self.inv_cell_size).floor() as i64)
    }

    /// Occupied cells and their point ids.
    pub fn cells(&self) -> impl Iterator<Item = (CellKey, &[u32])> + '_ {
        self.cells.iter().map(move |(&k, &(s, e))| (k, &self.ids[s as usize..e as usize]))
    }

    fn cell(&self, key: CellKey) -> &[u32] {
        match self.cells.get(&key) {
            Some(&(s, e)) => &self.ids[s as usize..e as usize],
            None => &[],
        }
    }

    /// Calls `f(id)` for every point whose cell meets the box `[lo, hi]`.
    /// Candidates only; the caller applies the exact predicate.
    pub fn for_each_candidate_in_box<F: FnMut(usize)>(&self, lo: Complex, hi: Complex, mut f: F) {
        if self.points.is_empty() {
            return;
        }
        let (x0, y0) = self.cell_of(lo);
        let (x1, y1) = self.cell_of(hi);
        let (x0, y0) = (x0.max(self.cell_lo.0), y0.max(self.cell_lo.1));
        let (x1, y1) = (x1.min(self.cell_hi.0), y1.min(self.cell_hi.1));
        for cx in x0..=x1 {
            for cy in y0..=y1 {
                for &id in self.cell((cx, cy)) {
                    f(id as usize);
                }
            }
        }
    }

    /// Calls `f(id, dist)` for every point with `dist(z, p) < radius`.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, z: Complex, radius: f64, mut f: F) {
        let pad = Complex::new(radius, radius);
        self.for_each_candidate_in_box(z - pad, z + pad, |id| {
            let d = distance(z, self.points[id]);
            if d < radius {
                f(id, d);
            }
        });
    }

    pub fn count_within(&self, z: Complex, radius: f64) -> usize {
        let mut n = 0;
        self.for_each_within(z, radius, |_, _| n += 1);
        n
    }

    /// Number of unordered pairs `{p, q}`, `p ≠ q`, with `|p − q| < radius`.
    pub fn pairs_within(&self, radius: f64) -> u64 {
        (0..self.points.len())
            .into_par_iter()
            .map(|i| {
                let mut n = 0u64;
                self.for_each_within(self.points[i], radius, |j, _| {
                    if j > i {
                        n += 1;
                    }
                });
                n
            })
            .sum()
    }

    /// Every unordered pair closer than `radius`, as `(i, j, dist)` with
    /// `i < j`, sorted by `(i, j)`.
    pub fn pair_stream(&self, radius: f64) -> Vec<(u32, u32, f64)> {
        let per_point: Vec<Vec<(u32, u32, f64)>> = (0..self.points.len())
            .into_par_iter()
            .map(|i| {
                let mut v = Vec::new();
                self.for_each_within(self.points[i], radius, |j, d| {
                    if j > i {
                        v.push((i as u32, j as u32, d));
                    }
                });
                v.sort_unstable_by_key(|&(_, j, _)| j);
                v
            })
            .collect();
        per_point.into_iter().flatten().collect()
    }

    /// Closest other point by expanding square rings of cells; ties go to
    /// the smaller id.
    pub fn nearest_neighbor(&self, id: usize) -> Result<(usize, f64)> {
        if self.points.len() < 2 {
            return Err(Error::Singleton(self.points.len()));
        }
        Ok(self.nearest_in_rings(id, i64::MAX).expect("unbounded search finds a neighbor"))
    }

    /// Ring search limited to `max_ring` rings; `None` unless the answer is
    /// certified within that range.
    pub fn nearest_in_rings(&self, id: usize, max_ring: i64) -> Option<(usize, f64)> {
        let p = self.points[id];
        let (cx, cy) = self.cell_of(p);
        let extent = [
            (cx - self.cell_lo.0).abs(),
            (self.cell_hi.0 - cx).abs(),
            (cy - self.cell_lo.1).abs(),
            (self.cell_hi.1 - cy).abs(),
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
        let last = extent.min(max_ring);
        let mut best: Option<(f64, usize)> = None;
        let consider = |best: &mut Option<(f64, usize)>, q: u32| {
            let q = q as usize;
            if q == id {
                return;
            }
            let d = distance(p, self.points[q]);
            match *best {
                Some((bd, bq)) if (d, q) >= (bd, bq) => {}
                _ => *best = Some((d, q)),
            }
        };
        for k in 0..=last {
            if k == 0 {
                for &q in self.cell((cx, cy)) {
                    consider(&mut best, q);
                }
            } else {
                for dx in -k..=k {
                    for &q in self.cell((cx + dx, cy - k)) {
                        consider(&mut best, q);
                    }
                    for &q in self.cell((cx + dx, cy + k)) {
                        consider(&mut best, q);
                    }
                }
                for dy in (-k + 1)..k {
                    for &q in self.cell((cx - k, cy + dy)) {
                        consider(&mut best, q);
                    }
                    for &q in self.cell((cx + k, cy + dy)) {
                        consider(&mut best, q);
                    }
                }
            }
            // Points in ring k + 1 or beyond are at least k cells away.
            if let Some((bd, q)) = best {
                if bd < k as f64 * self.cell_size {
                    return Some((q, bd));
                }
            }
        }
        // Every occupied cell was scanned.
        if last == extent {
            return best.map(|(d, q)| (q, d));
        }
        None
    }
}

/// Stack of grids with cell sizes growing by a factor 16, for nearest
/// neighbors in sets whose spacing varies over many scales.
#[derive(Clone, Debug)]
pub struct NearestIndex {
    levels: Vec<GridIndex>,
}

impl NearestIndex {
    const FACTOR: f64 = 16.0;
    const RINGS: i64 = 4;

    pub fn build(points: &[Complex], finest_cell: f64) -> Result<Self> {
        let mut levels = vec![GridIndex::build(points, finest_cell)?];
        loop {
            let top = levels.last().unwrap();
            if top.is_empty() {
                break;
            }
            let span = (top.cell_hi.0 - top.cell_lo.0).max(top.cell_hi.1 - top.cell_lo.1);
            if span <= 2 * Self::RINGS {
                break;
            }
            let next = GridIndex::build(points, top.cell_size * Self::FACTOR)?;
            levels.push(next);
        }
        Ok(NearestIndex { levels })
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].is_empty()
    }

    /// Same result as [`GridIndex::nearest_neighbor`].
    pub fn nearest_neighbor(&self, id: usize) -> Result<(usize, f64)> {
        let n = self.len();
        if n < 2 {
            return Err(Error::Singleton(n));
        }
        let (last, finer) = self.levels.split_last().unwrap();
        for level in finer {
            if let Some(r) = level.nearest_in_rings(id, Self::RINGS) {
                return Ok(r);
            }
        }
        last.nearest_neighbor(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn standard_centers() -> Vec<Complex> {
        vec![c(0.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 2.0 / 3.0), c(0.0, -2.0 / 3.0)]
    }

    #[test]
    fn empty_index() {
        let idx = GridIndex::build(&[], 1.0).unwrap();
        assert!(idx.is_empty());
        assert_eq!(idx.pairs_within(10.0), 0);
        assert_eq!(idx.cells().count(), 0);
        assert_eq!(idx.nearest_neighbor(0).unwrap_err(), Error::Singleton(0));
    }

    #[test]
    fn standard_centers_fall_in_small_cells() {
        let idx = GridIndex::build(&standard_centers(), 1.0).unwrap();
        for (key, ids) in idx.cells() {
            assert!((-1..=0).contains(&key.0) && (-1..=0).contains(&key.1), "{key:?}");
            assert!(!ids.is_empty());
        }
        assert_eq!(idx.cells().map(|(_, ids)| ids.len()).sum::<usize>(), 5);
    }

    #[test]
    fn strict_radius() {
        let idx = GridIndex::build(&[c(0.0, 0.0), c(1.0, 0.0)], 0.3).unwrap();
        assert_eq!(idx.pairs_within(1.0), 0);
        assert_eq!(idx.pairs_within(1.0001), 1);
        assert_eq!(idx.nearest_neighbor(0).unwrap(), (1, 1.0));
        assert_eq!(idx.nearest_neighbor(1).unwrap(), (0, 1.0));
    }

    #[test]
    fn standard_pairs_and_nearest() {
        let pts = standard_centers();
        let brute = pts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| pts[i + 1..].iter().map(move |&q| distance(p, q)))
            .filter(|&d| d < 0.9)
            .count() as u64;
        assert_eq!(brute, 8);
        for cell in [0.05, 0.3, 1.0, 7.0] {
            let idx = GridIndex::build(&pts, cell).unwrap();
            assert_eq!(idx.pairs_within(0.9), 8);
            let (q, d) = idx.nearest_neighbor(0).unwrap();
            assert_eq!((q, d), (1, 0.5));
        }
    }

    #[test]
    fn layered_nearest_matches_single_grid() {
        let mut pts = vec![c(0.0, 0.0), c(0.9, 0.9), c(-0.7, 0.2)];
        for k in 0..200 {
            let a = k as f64 * 0.37;
            pts.push(c(0.3 + 1e-3 * a.cos() * k as f64 / 50.0, -0.2 + 1e-3 * a.sin()));
        }
        let flat = GridIndex::build(&pts, 1e-4).unwrap();
        let layered = NearestIndex::build(&pts, 1e-4).unwrap();
        for i in 0..pts.len() {
            assert_eq!(layered.nearest_neighbor(i).unwrap(), flat.nearest_neighbor(i).unwrap());
        }
        assert_eq!(NearestIndex::build(&pts[..1], 1.0).unwrap().nearest_neighbor(0).unwrap_err(), Error::Singleton(1));
        assert!(NearestIndex::build(&[], 1.0).unwrap().is_empty());
    }

    #[test]
    fn singleton_has_no_neighbor() {
        let idx = GridIndex::build(&[c(0.1, 0.2)], 1.0).unwrap();
        assert_eq!(idx.nearest_neighbor(0).unwrap_err(), Error::Singleton(1));
    }

    #[test]
    fn bad_cell_size() {
        assert!(GridIndex::build(&[], 0.0).is_err());
        assert!(GridIndex::build(&[], f64::NAN).is_err());
    }
}
