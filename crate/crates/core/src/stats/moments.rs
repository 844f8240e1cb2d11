//! Window counts `𝒩_t(Ω, z) = #((e^{-t}Ω + z) ∩ 𝒞_t)` and integrals of
//! functions of them over `z`, evaluated by the midpoint rule.
//!
//! The quadrature grid has cell centers `((i + ½)h, (j + ½)h)`. An integrand
//! `f(counts)` differs from its value at all-zero counts only on cells where
//! some window of a designated support set is occupied, i.e. within a window
//! reach of some center. Those cells are visited per center, and each is
//! charged to the smallest center id occupying a support window there, so
//! every cell is evaluated exactly once. The constant part is added as
//! `f(0,…,0)` times the number of grid cells in the integration domain.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::enumerate::CenterSet;
use crate::error::{Error, Result};
use crate::geometry::Complex;
use crate::spatial::GridIndex;
use crate::stats::region::Region;

/// Hausdorff dimension of the Apollonian gasket.
pub const DELTA: f64 = 1.305688;

// Points per parallel work unit; fixed so sums are independent of threads.
const CHUNK: usize = 256;

/// A bounded open window `Ω`, shrunk by `e^{-t}` and translated to `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    /// Open disk of the given radius about the origin.
    Disk { radius: f64 },
    /// Open rectangle `lo < w < hi` componentwise.
    Rect { lo: Complex, hi: Complex },
}

impl Window {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("window radius must be positive, got {radius}")));
        }
        Ok(Window::Disk { radius })
    }

    pub fn rect(lo: Complex, hi: Complex) -> Result<Self> {
        if !(lo.re < hi.re && lo.im < hi.im) {
            return Err(Error::InvalidArgument(format!("empty window {lo} .. {hi}")));
        }
        Ok(Window::Rect { lo, hi })
    }

    /// Membership of a rescaled offset `w = e^t (p − z)`.
    #[inline]
    pub fn contains(&self, w: Complex) -> bool {
        match *self {
            Window::Disk { radius } => w.norm() < radius,
            Window::Rect { lo, hi } => lo.re < w.re && w.re < hi.re && lo.im < w.im && w.im < hi.im,
        }
    }

    /// Diameter `𝒟(Ω)`.
    pub fn diameter(&self) -> f64 {
        match *self {
            Window::Disk { radius } => 2.0 * radius,
            Window::Rect { lo, hi } => (hi - lo).norm(),
        }
    }

    /// `sup |w|` over the window.
    pub fn reach(&self) -> f64 {
        match *self {
            Window::Disk { radius } => radius,
            Window::Rect { lo, hi } => {
                let x = lo.re.abs().max(hi.re.abs());
                let y = lo.im.abs().max(hi.im.abs());
                x.hypot(y)
            }
        }
    }

    /// Lebesgue measure of the window.
    pub fn area(&self) -> f64 {
        match *self {
            Window::Disk { radius } => PI * radius * radius,
            Window::Rect { lo, hi } => (hi.re - lo.re) * (hi.im - lo.im),
        }
    }

    /// Bound from disjointness of the unit disks around centers at mutual
    /// rescaled distance `> 2`: a window holds fewer than `(𝒟 + 1)²` of them.
    pub fn packing_bound(&self) -> f64 {
        (self.diameter() + 1.0).powi(2)
    }
}

impl std::str::FromStr for Window {
    type Err = Error;

    /// `disk:r` or `rect:x0,y0,x1,y1`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.trim().split_once(':').ok_or_else(|| Error::Parse(format!("bad window {s:?}")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("window: {e}")))?;
        match (kind, nums.as_slice()) {
            ("disk", [r]) => Window::disk(*r),
            ("rect", [a, b, c, d]) => Window::rect(Complex::new(*a, *b), Complex::new(*c, *d)),
            _ => Err(Error::Parse(format!("bad window {s:?}"))),
        }
    }
}

/// `𝒩_t(Ω, z)` by scanning every center; the reference for
/// [`WindowCounter`].
pub fn window_count(cs: &CenterSet, window: &Window, z: Complex) -> usize {
    let scale = cs.scale();
    cs.points.iter().filter(|p| window.contains((p.center - z) * scale)).count()
}

/// Indexed window counts over a fixed center set.
pub struct WindowCounter<'a> {
    cs: &'a CenterSet,
    idx: GridIndex,
    scale: f64,
}

impl<'a> WindowCounter<'a> {
    pub fn new(cs: &'a CenterSet) -> Result<Self> {
        let scale = cs.scale();
        let idx = GridIndex::build(&cs.centers(), 2.0 / scale)?;
        Ok(WindowCounter { cs, idx, scale })
    }

    pub fn center_set(&self) -> &CenterSet {
        self.cs
    }

    pub fn index(&self) -> &GridIndex {
        &self.idx
    }

    pub fn count(&self, window: &Window, z: Complex) -> usize {
        let r = window.reach() / self.scale * (1.0 + 1e-9);
        let pad = Complex::new(r, r);
        let mut n = 0;
        self.idx.for_each_candidate_in_box(z - pad, z + pad, |id| {
            if window.contains((self.idx.point(id) - z) * self.scale) {
                n += 1;
            }
        });
        n
    }
}

/// Multi-index `r` for indicator moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountIndex(pub Vec<u32>);

/// Multi-index `β` for power moments; at least one component nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerIndex(Vec<f64>);

impl PowerIndex {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(Error::InvalidArgument("β components must be finite and ≥ 0".into()));
        }
        if beta.iter().all(|&b| b == 0.0) {
            return Err(Error::InvalidArgument("at least one β component must be nonzero".into()));
        }
        Ok(PowerIndex(beta))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }
}

/// Quadrature settings for the moment integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentOptions {
    /// Grid spacing; defaults to `e^{-t}/4`.
    pub spacing: Option<f64>,
    /// Exponent in the `e^{(2−δ)t}` normalization.
    pub delta: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions { spacing: None, delta: DELTA }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub t: f64,
    pub estimate: f64,
    pub scaled_estimate: f64,
}

/// Integrand over `z` expressed through the window counts at `z`.
pub struct Integrand<'a> {
    pub windows: &'a [Window],
    /// Windows at least one of which is occupied wherever `f` differs from
    /// `zero_value`.
    pub support: &'a [usize],
    pub zero_value: f64,
    pub f: &'a (dyn Fn(&[u32]) -> f64 + Sync),
    /// Maximal admissible count in one window, checked at every cell.
    pub cap: Option<(usize, u32)>,
}

/// Midpoint-rule integral of `χ_E(z) f(𝒩_t(Ω₁, z), …)` with spacing `h`.
///
/// For unbounded `E` and nonzero `zero_value` the domain is clipped to the
/// square `[−L, L]²`, `L = 1 + m` enlarged to cover every center by `m`,
/// where `m` is the largest window reach plus one cell.
pub fn integrate(counter: &WindowCounter<'_>, region: &Region, h: f64, integrand: &Integrand<'_>) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("quadrature spacing must be positive, got {h}")));
    }
    if integrand.windows.is_empty() || integrand.support.is_empty() {
        return Err(Error::InvalidArgument("integrand needs at least one window".into()));
    }
    let cs = counter.cs;
    let scale = counter.scale;
    let windows = integrand.windows;
    let support_reach = integrand.support.iter().map(|&i| windows[i].reach()).fold(0.0, f64::max) / scale;
    let all_reach = windows.iter().map(|w| w.reach()).fold(0.0, f64::max) / scale;
    let cand_radius = (support_reach + all_reach) * (1.0 + 1e-9) + 1e-300;
    let mut in_support = vec![false; windows.len()];
    for &i in integrand.support {
        in_support[i] = true;
    }

    let idx = &counter.idx;
    let n = cs.len();
    let chunk_sums: Vec<Result<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = 0.0;
            let mut cand: Vec<(usize, Complex)> = Vec::new();
            let mut counts = vec![0u32; windows.len()];
            for p in chunk * CHUNK..((chunk + 1) * CHUNK).min(n) {
                let pc = idx.point(p);
                cand.clear();
                idx.for_each_within(pc, cand_radius, |q, _| cand.push((q, idx.point(q))));
                let i0 = ((pc.re - support_reach) / h - 0.5).floor() as i64;
                let i1 = ((pc.re + support_reach) / h - 0.5).ceil() as i64;
                let j0 = ((pc.im - support_reach) / h - 0.5).floor() as i64;
                let j1 = ((pc.im + support_reach) / h - 0.5).ceil() as i64;
                for j in j0..=j1 {
                    let y = (j as f64 + 0.5) * h;
                    for i in i0..=i1 {
                        let z = Complex::new((i as f64 + 0.5) * h, y);
                        counts.iter_mut().for_each(|c| *c = 0);
                        let mut owner = usize::MAX;
                        for &(q, qc) in &cand {
                            let w = (qc - z) * scale;
                            for (k, win) in windows.iter().enumerate() {
                                if win.contains(w) {
                                    counts[k] += 1;
                                    if in_support[k] && q < owner {
                                        owner = q;
                                    }
                                }
                            }
                        }
                        if owner != p {
                            continue;
                        }
                        if let Some((k, max)) = integrand.cap {
                            if counts[k] > max {
                                return Err(Error::SeparationViolated { count: counts[k] });
                            }
                        }
                        let v = (integrand.f)(&counts) - integrand.zero_value;
                        if v != 0.0 && region.contains(z) {
                            acc += v;
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for s in chunk_sums {
        total += s?;
    }
    let mut integral = total * h * h;

    if integrand.zero_value != 0.0 {
        let cells = domain_cell_count(cs, region, h, all_reach + h)?;
        integral += integrand.zero_value * cells as f64 * h * h;
    }
    Ok(integral)
}

/// Number of quadrature cells whose center lies in the integration domain.
fn domain_cell_count(cs: &CenterSet, region: &Region, h: f64, margin: f64) -> Result<u64> {
    let (lo, hi) = match region.bounding_box() {
        Some(b) => b,
        None if region.is_bounded() => return Ok(0),
        None => {
            let mut l = 1.0 + margin;
            for p in &cs.points {
                l = l.max(p.center.re.abs() + margin).max(p.center.im.abs() + margin);
            }
            (Complex::new(-l, -l), Complex::new(l, l))
        }
    };
    let clip = !region.is_bounded();
    let first = |a: f64| (a / h - 0.5).ceil() as i64;
    let last = |b: f64| (b / h - 0.5).floor() as i64;
    let (j0, j1) = (first(lo.im), last(hi.im));
    let (bi0, bi1) = (first(lo.re), last(hi.re));
    let rows = (j1 - j0 + 1).max(0) as usize;
    if rows > 50_000_000 {
        return Err(Error::InvalidArgument("quadrature domain too large for the grid spacing".into()));
    }
    let counts: Vec<u64> = (j0..=j1)
        .into_par_iter()
        .map(|j| {
            let y = (j as f64 + 0.5) * h;
            let Some((a, b)) = region.row_interval(y) else { return 0 };
            let (mut i0, mut i1) =
                (if a.is_finite() { first(a) } else { bi0 }, if b.is_finite() { last(b) } else { bi1 });
            if clip {
                i0 = i0.max(bi0);
                i1 = i1.min(bi1);
            }
            let inside = |i: i64| region.contains(Complex::new((i as f64 + 0.5) * h, y));
            // Reconcile the closed-form interval with the membership test.
            while i0 <= i1 && !inside(i0) {
                i0 += 1;
            }
            while i0 > i64::MIN && (!clip || i0 > bi0) && inside(i0 - 1) {
                i0 -= 1;
            }
            while i1 >= i0 && !inside(i1) {
                i1 -= 1;
            }
            while (!clip || i1 < bi1) && inside(i1 + 1) {
                i1 += 1;
            }
            (i1 - i0 + 1).max(0) as u64
        })
        .collect();
    Ok(counts.iter().sum())
}

fn default_spacing(cs: &CenterSet, opts: &MomentOptions) -> f64 {
    opts.spacing.unwrap_or_else(|| (-cs.t).exp() / 4.0)
}

fn smallest_reach(windows: &[Window], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    candidates.min_by(|&a, &b| windows[a].reach().total_cmp(&windows[b].reach()))
}

/// `∫ ∏ᵢ 𝟙{𝒩_t(Ωᵢ, z) = rᵢ} χ_E(z) dz`, also scaled by `e^{(2−δ)t}`.
pub fn joint_indicator_moment(
    counter: &WindowCounter<'_>,
    windows: &[Window],
    r: &CountIndex,
    region: &Region,
    opts: &MomentOptions,
) -> Result<MomentEstimate> {
    if windows.is_empty() || windows.len() != r.0.len() {
        return Err(Error::InvalidArgument(format!("{} windows but {} count targets", windows.len(), r.0.len())));
    }
    let cs = counter.cs;
    let targets = r.0.clone();
    let f = move |c: &[u32]| if c.iter().zip(&targets).all(|(a, b)| a == b) { 1.0 } else { 0.0 };
    let (support, zero_value) = match smallest_reach(windows, (0..windows.len()).filter(|&i| r.0[i] > 0)) {
        Some(j) => (vec![j], 0.0),
        None => ((0..windows.len()).collect(), 1.0),
    };
    let integrand = Integrand { windows, support: &support, zero_value, f: &f, cap: None };
    let estimate = integrate(counter, region, default_spacing(cs, opts), &integrand)?;
    Ok(MomentEstimate { t: cs.t, estimate, scaled_estimate: estimate * ((2.0 - opts.delta) * cs.t).exp() })
}

/// `∫ ∏ᵢ 𝒩_t(Ωᵢ, z)^{βᵢ} χ_E(z) dz`, also scaled by `e^{(2−δ)t}`.
pub fn joint_power_moment(
    counter: &WindowCounter<'_>,
    windows: &[Window],
    beta: &PowerIndex,
    region: &Region,
    opts: &MomentOptions,
) -> Result<MomentEstimate> {
    let beta = beta.components().to_vec();
    if windows.is_empty() || windows.len() != beta.len() {
        return Err(Error::InvalidArgument(format!("{} windows but {} exponents", windows.len(), beta.len())));
    }
    let cs = counter.cs;
    let j = smallest_reach(windows, (0..windows.len()).filter(|&i| beta[i] > 0.0)).expect("nonzero β");
    let f = move |c: &[u32]| c.iter().zip(&beta).map(|(&n, &b)| (n as f64).powf(b)).product::<f64>();
    let integrand = Integrand { windows, support: &[j], zero_value: 0.0, f: &f, cap: None };
    let estimate = integrate(counter, region, default_spacing(cs, opts), &integrand)?;
    Ok(MomentEstimate { t: cs.t, estimate, scaled_estimate: estimate * ((2.0 - opts.delta) * cs.t).exp() })
}

/// Quadrature settings for the mixed moments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MixedOptions {
    /// Grid spacing; defaults to `ε e^{-t}/8`.
    pub spacing: Option<f64>,
}

impl MixedOptions {
    pub fn spacing_for(&self, t: f64, eps: f64) -> f64 {
        self.spacing.unwrap_or(eps * (-t).exp() / 8.0)
    }
}

fn check_eps(xi: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.1 && eps < xi / 10.0) {
        return Err(Error::InvalidArgument(format!("need 0 < ε < min(1/10, ξ/10), got ε = {eps}, ξ = {xi}")));
    }
    Ok(())
}

fn members(cs: &CenterSet, region: &Region) -> Result<usize> {
    let n = cs.points.iter().filter(|p| region.contains(p.center)).count();
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(n)
}

/// Weight of one quadrature cell in the mixed pair moment: the fraction of
/// an `ε`-disk (halved, as in the normalization) one cell represents.
pub fn mixed_cell_mass(t: f64, eps: f64, spacing: f64) -> f64 {
    (2.0 * t).exp() * spacing * spacing / (2.0 * PI * eps * eps)
}

/// `P_{E,t,ε}(ξ) = e^{2t} / (2π ε² #(𝒞_t ∩ E)) ∫ χ_E 𝒩_t(B_ε, z) 𝒩_t(B_ξ, z) dz − ½`.
pub fn mixed_moment_pair(
    counter: &WindowCounter<'_>,
    region: &Region,
    xi: f64,
    eps: f64,
    opts: &MixedOptions,
) -> Result<f64> {
    check_eps(xi, eps)?;
    let cs = counter.cs;
    let n_e = members(cs, region)?;
    let windows = [Window::disk(eps)?, Window::disk(xi)?];
    let f = |c: &[u32]| (c[0] * c[1]) as f64;
    let integrand = Integrand { windows: &windows, support: &[0], zero_value: 0.0, f: &f, cap: Some((0, 1)) };
    let integral = integrate(counter, region, opts.spacing_for(cs.t, eps), &integrand)?;
    Ok((2.0 * cs.t).exp() / (2.0 * PI * eps * eps * n_e as f64) * integral - 0.5)
}

/// `Q_{E,t,ε}(ξ) = 1 − e^{2t} / (π ε² #(𝒞_t ∩ E)) ∫ χ_E 𝟙{𝒩_t(B_ε, z) = 1} 𝟙{𝒩_t(B_ξ, z) = 1} dz`.
pub fn mixed_moment_nn(
    counter: &WindowCounter<'_>,
    region: &Region,
    xi: f64,
    eps: f64,
    opts: &MixedOptions,
) -> Result<f64> {
    check_eps(xi, eps)?;
    let cs = counter.cs;
    let n_e = members(cs, region)?;
    let windows = [Window::disk(eps)?, Window::disk(xi)?];
    let f = |c: &[u32]| if c[0] == 1 && c[1] == 1 { 1.0 } else { 0.0 };
    let integrand = Integrand { windows: &windows, support: &[0], zero_value: 0.0, f: &f, cap: Some((0, 1)) };
    let integral = integrate(counter, region, opts.spacing_for(cs.t, eps), &integrand)?;
    Ok(1.0 - (2.0 * cs.t).exp() / (PI * eps * eps * n_e as f64) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate, CenterPoint};
    use crate::geometry::DescartesQuadruple;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn root() -> DescartesQuadruple {
        DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn window_basics() {
        let d = Window::disk(1.5).unwrap();
        assert_eq!(d.diameter(), 3.0);
        assert_eq!(d.packing_bound(), 16.0);
        assert!(d.contains(c(1.0, 1.0)) && !d.contains(c(1.5, 0.0)));
        let r = Window::rect(c(-1.0, -2.0), c(2.0, 2.0)).unwrap();
        assert_eq!(r.diameter(), 5.0);
        assert!((r.reach() - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!("disk:2".parse::<Window>().unwrap(), Window::disk(2.0).unwrap());
        assert!("disk:-1".parse::<Window>().is_err());
        assert!(Window::rect(c(0.0, 0.0), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn window_count_examples() {
        let cs = enumerate(&root(), 5.0).unwrap();
        let counter = WindowCounter::new(&cs).unwrap();
        let w = Window::disk(1.0).unwrap();
        assert_eq!(window_count(&cs, &w, c(10.0, 10.0)), 0);
        assert_eq!(counter.count(&w, c(10.0, 10.0)), 0);
        for p in &cs.points {
            let n = counter.count(&w, p.center);
            assert!(n >= 1);
            assert_eq!(n, window_count(&cs, &w, p.center));
        }
    }

    #[test]
    fn power_index_rejects_all_zero() {
        assert!(PowerIndex::new(vec![0.0, 0.0]).is_err());
        assert!(PowerIndex::new(vec![-1.0]).is_err());
        assert!(PowerIndex::new(vec![0.0, 1.5]).is_ok());
    }

    #[test]
    fn far_rect_with_zero_target_measures_its_area() {
        let cs = enumerate(&root(), 4.0).unwrap();
        let counter = WindowCounter::new(&cs).unwrap();
        let h = (-4.0f64).exp() / 4.0;
        // Grid-aligned rectangle far from every center: the indicator is 1.
        let lo = c((5.0 / h).round() * h, (5.0 / h).round() * h);
        let region = Region::rect(lo, lo + c(64.0 * h, 32.0 * h)).unwrap();
        let est = joint_indicator_moment(
            &counter,
            &[Window::disk(1.0).unwrap()],
            &CountIndex(vec![0]),
            &region,
            &MomentOptions::default(),
        )
        .unwrap();
        let area = 64.0 * 32.0 * h * h;
        assert!((est.estimate - area).abs() < 1e-9 * area, "{} vs {area}", est.estimate);
        let scaled = area * ((2.0 - DELTA) * 4.0).exp();
        assert!((est.scaled_estimate - scaled).abs() < 1e-9 * scaled);
    }

    #[test]
    fn impossible_count_integrates_to_zero() {
        let cs = enumerate(&root(), 5.0).unwrap();
        let counter = WindowCounter::new(&cs).unwrap();
        let w = Window::disk(1.0).unwrap();
        let r = CountIndex(vec![w.packing_bound() as u32 + 1]);
        let est =
            joint_indicator_moment(&counter, &[w], &r, &Region::whole_plane(), &MomentOptions::default()).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn eps_range_enforced() {
        let cs = enumerate(&root(), 3.0).unwrap();
        let counter = WindowCounter::new(&cs).unwrap();
        let plane = Region::whole_plane();
        let o = MixedOptions::default();
        assert!(mixed_moment_pair(&counter, &plane, 3.0, 0.1, &o).is_err());
        assert!(mixed_moment_pair(&counter, &plane, 0.5, 0.06, &o).is_err());
        assert!(mixed_moment_nn(&counter, &plane, 3.0, 0.0, &o).is_err());
        let far = Region::disk(c(9.0, 9.0), 0.1).unwrap();
        assert_eq!(mixed_moment_pair(&counter, &far, 3.0, 0.05, &o).unwrap_err(), Error::EmptyRegion);
    }

    #[test]
    fn separation_cap_is_enforced() {
        // Two centers far closer than the gasket allows.
        let cs = CenterSet {
            points: vec![
                CenterPoint { center: c(0.0, 0.0), curvature: 5.0 },
                CenterPoint { center: c(1e-4, 0.0), curvature: 5.0 },
            ],
            t: 2.0,
            root: root(),
        };
        let counter = WindowCounter::new(&cs).unwrap();
        let err = mixed_moment_pair(&counter, &Region::whole_plane(), 3.0, 0.05, &MixedOptions::default());
        assert!(matches!(err, Err(Error::SeparationViolated { count: 2 })));
    }
}
