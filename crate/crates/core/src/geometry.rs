//! Plane geometry: oriented circles, Descartes quadruples, Möbius maps and
//! the root-quadruple solver for the gasket family indexed by two tangency
//! angles on the unit circle.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Residual tolerance for both Descartes identities and pairwise tangency.
pub const DESCARTES_TOL: f64 = 1e-9;

const ROOT_NEWTON_TOL: f64 = 1e-12;
const ROOT_NEWTON_MAX_ITER: usize = 100;
const ROOT_INITIAL_RADIUS: f64 = 0.3;

/// An oriented circle: center plus signed curvature.
///
/// Enclosing circles carry negative curvature so that the Descartes
/// identities hold without case analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Complex,
    pub curvature: f64,
}

impl Circle {
    pub fn new(center: Complex, curvature: f64) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidArgument("circle center must be finite".into()));
        }
        if !curvature.is_finite() || curvature == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "circle curvature must be finite and nonzero, got {curvature}"
            )));
        }
        Ok(Circle { center, curvature })
    }

    /// Positively oriented circle (interior is the bounded disk).
    pub fn from_center_radius(center: Complex, radius: f64) -> Result<Self> {
        Circle::new(center, 1.0 / radius)
    }

    /// The unit circle as an enclosing circle.
    pub fn unit_bounding() -> Self {
        Circle { center: Complex::new(0.0, 0.0), curvature: -1.0 }
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.curvature.abs()
    }

    pub fn is_bounding(&self) -> bool {
        self.curvature < 0.0
    }

    /// Point on the circle at the given polar angle about its center.
    pub fn point_at(&self, angle: f64) -> Complex {
        self.center + Complex::from_polar(self.radius(), angle)
    }

    /// Curvature times center, the quantity the complex Descartes identity
    /// is stated in.
    pub fn weighted_center(&self) -> Complex {
        self.center * self.curvature
    }

    /// Distance from tangency: zero when the two circles touch, external or
    /// internal depending on the orientations.
    pub fn tangency_residual(&self, other: &Circle) -> f64 {
        let d = (self.center - other.center).norm();
        let target = if self.is_bounding() != other.is_bounding() {
            (self.radius() - other.radius()).abs()
        } else {
            self.radius() + other.radius()
        };
        (d - target).abs()
    }
}

/// Circle through three points, or `None` when they are collinear.
pub fn circumcircle(a: Complex, b: Complex, c: Complex) -> Option<(Complex, f64)> {
    let ab = b - a;
    let ac = c - a;
    let cross = ab.re * ac.im - ab.im * ac.re;
    let scale = ab.norm_sqr().max(ac.norm_sqr());
    if !(cross.abs() > 1e-14 * scale) {
        return None;
    }
    let ab2 = ab.norm_sqr();
    let ac2 = ac.norm_sqr();
    let ux = (ac.im * ab2 - ab.im * ac2) / (2.0 * cross);
    let uy = (ab.re * ac2 - ac.re * ab2) / (2.0 * cross);
    let offset = Complex::new(ux, uy);
    let center = a + offset;
    let radius = offset.norm();
    if !(radius.is_finite() && center.re.is_finite() && center.im.is_finite()) {
        return None;
    }
    Some((center, radius))
}

/// Four mutually tangent oriented circles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescartesQuadruple {
    pub circles: [Circle; 4],
    /// Index replaced by the reflection that produced this quadruple.
    pub last_swapped: Option<usize>,
}

impl DescartesQuadruple {
    /// Validates both Descartes identities and all six tangencies.
    pub fn new(circles: [Circle; 4]) -> Result<Self> {
        let q = DescartesQuadruple { circles, last_swapped: None };
        q.check()?;
        Ok(q)
    }

    /// Builds a quadruple from curvatures and centers, e.g. `(-1, 2, 2, 3)`.
    pub fn from_parts(curvatures: [f64; 4], centers: [Complex; 4]) -> Result<Self> {
        let mut circles = [Circle::unit_bounding(); 4];
        for i in 0..4 {
            circles[i] = Circle::new(centers[i], curvatures[i])?;
        }
        DescartesQuadruple::new(circles)
    }

    /// Solves for the centers of a quadruple given only its curvatures,
    /// assuming the first curvature is the enclosing unit circle at the
    /// origin. The first two inner circles are placed on the real axis.
    pub fn from_curvatures(curvatures: [f64; 4]) -> Result<Self> {
        let [b0, b1, b2, b3] = curvatures;
        let scale = 1.0 / -b0;
        if !(b0 < 0.0 && b1 > 0.0 && b2 > 0.0 && b3 > 0.0) {
            return Err(Error::InvalidSpec(
                "expected one negative (enclosing) curvature followed by three positive".into(),
            ));
        }
        let r0 = scale;
        let (r1, r2, r3) = (1.0 / b1, 1.0 / b2, 1.0 / b3);
        let c0 = Complex::new(0.0, 0.0);
        let c1 = Complex::new(-(r0 - r1), 0.0);
        // c2 lies at distance r0 - r2 from the origin and r1 + r2 from c1.
        let c2 = locate(c0, r0 - r2, c1, r1 + r2, 1.0)
            .ok_or_else(|| Error::InvalidSpec("curvatures are not a Descartes quadruple".into()))?;
        let c3 = locate(c0, r0 - r3, c1, r1 + r3, 1.0)
            .ok_or_else(|| Error::InvalidSpec("curvatures are not a Descartes quadruple".into()))?;
        let c2 = if c2.im.abs() < 1e-15 { Complex::new(c2.re, 0.0) } else { c2 };
        let c3 = if c3.im.abs() < 1e-15 {
            Complex::new(c3.re, 0.0)
        } else if (c3 - c2).norm() < 1e-12 || ((c3 - c2).norm() - (r2 + r3)).abs() > 1e-9 {
            c3.conj()
        } else {
            c3
        };
        DescartesQuadruple::from_parts(curvatures, [c0, c1, c2, c3])
    }

    pub fn curvatures(&self) -> [f64; 4] {
        self.circles.map(|c| c.curvature)
    }

    /// `|(Σb)² − 2Σb²|` together with the allowed tolerance.
    pub fn descartes_residual(&self) -> (f64, f64) {
        let b = self.curvatures();
        let sum: f64 = b.iter().sum();
        let sum_sq: f64 = b.iter().map(|x| x * x).sum();
        ((sum * sum - 2.0 * sum_sq).abs(), DESCARTES_TOL * sum_sq.max(1.0))
    }

    /// Complex Descartes identity on curvature-weighted centers.
    pub fn complex_descartes_residual(&self) -> (f64, f64) {
        let w = self.circles.map(|c| c.weighted_center());
        let sum: Complex = w.iter().sum();
        let sum_sq: Complex = w.iter().map(|x| x * x).sum();
        let scale: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        ((sum * sum - sum_sq * 2.0).norm(), DESCARTES_TOL * scale.max(1.0))
    }

    pub fn max_tangency_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in (i + 1)..4 {
                worst = worst.max(self.circles[i].tangency_residual(&self.circles[j]));
            }
        }
        worst
    }

    pub fn check(&self) -> Result<()> {
        let (res, tol) = self.descartes_residual();
        if !(res <= tol) {
            return Err(Error::InvalidSpec(format!("Descartes residual {res:e} exceeds {tol:e}")));
        }
        let (res, tol) = self.complex_descartes_residual();
        if !(res <= tol) {
            return Err(Error::InvalidSpec(format!("complex Descartes residual {res:e} exceeds {tol:e}")));
        }
        let tang = self.max_tangency_residual();
        if !(tang <= DESCARTES_TOL) {
            return Err(Error::InvalidSpec(format!("tangency residual {tang:e}")));
        }
        Ok(())
    }

    /// Replaces circle `i` by the other circle tangent to the remaining three.
    pub fn reflect(&self, i: usize) -> DescartesQuadruple {
        let mut b_others = 0.0;
        let mut w_others = Complex::new(0.0, 0.0);
        for (j, c) in self.circles.iter().enumerate() {
            if j != i {
                b_others += c.curvature;
                w_others += c.weighted_center();
            }
        }
        let old = self.circles[i];
        let b = 2.0 * b_others - old.curvature;
        let w = w_others * 2.0 - old.weighted_center();
        let mut circles = self.circles;
        circles[i] = Circle { center: w / b, curvature: b };
        DescartesQuadruple { circles, last_swapped: Some(i) }
    }
}

// Intersection of two circles |z - a| = ra, |z - b| = rb; `side` picks the
// solution with positive (or negative) cross product.
fn locate(a: Complex, ra: f64, b: Complex, rb: f64, side: f64) -> Option<Complex> {
    let d = (b - a).norm();
    if d == 0.0 {
        return None;
    }
    let x = (ra * ra - rb * rb + d * d) / (2.0 * d);
    let h2 = ra * ra - x * x;
    if h2 < -1e-9 * ra.max(1.0) {
        return None;
    }
    let h = h2.max(0.0).sqrt();
    let u = (b - a) / d;
    let perp = Complex::new(-u.im, u.re);
    Some(a + u * x + perp * (side * h))
}

/// Gasket bounded by the unit circle whose three largest inner circles touch
/// it at `1`, `e^{iθ₁}` and `e^{iθ₂}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasketSpec {
    pub theta1: f64,
    pub theta2: f64,
}

impl GasketSpec {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        for (name, th) in [("theta1", theta1), ("theta2", theta2)] {
            if !(th > 0.0 && th < TAU) {
                return Err(Error::InvalidSpec(format!("{name} = {th} must lie in (0, 2π)")));
            }
        }
        let p0 = Complex::new(1.0, 0.0);
        let p1 = Complex::from_polar(1.0, theta1);
        let p2 = Complex::from_polar(1.0, theta2);
        let min_sep = (p0 - p1).norm().min((p0 - p2).norm()).min((p1 - p2).norm());
        if !(min_sep > 1e-9) {
            return Err(Error::InvalidSpec(format!(
                "tangency points 1, e^(i{theta1}), e^(i{theta2}) are not distinct"
            )));
        }
        Ok(GasketSpec { theta1, theta2 })
    }

    pub fn angles(&self) -> [f64; 3] {
        [0.0, self.theta1, self.theta2]
    }
}

impl fmt::Display for GasketSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({}, {})", self.theta1, self.theta2)
    }
}

fn tangency_system(angles: &[f64; 3], r: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let mut f = [0.0; 3];
    let mut jac = [[0.0; 3]; 3];
    for (row, &(i, j)) in PAIRS.iter().enumerate() {
        let cos = (angles[i] - angles[j]).cos();
        let (ui, uj) = (1.0 - r[i], 1.0 - r[j]);
        let s = r[i] + r[j];
        f[row] = ui * ui + uj * uj - 2.0 * ui * uj * cos - s * s;
        jac[row][i] = -2.0 * ui + 2.0 * uj * cos - 2.0 * s;
        jac[row][j] = -2.0 * uj + 2.0 * ui * cos - 2.0 * s;
    }
    (f, jac)
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |a: &[[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    if !(d.abs() > 1e-300) {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut a = *m;
        for row in 0..3 {
            a[row][col] = rhs[row];
        }
        *slot = det(&a) / d;
    }
    Some(out)
}

fn max_abs(v: &[f64; 3]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Root quadruple `(C₀, C₁, C₂, C₃)` of the gasket: `C₀` is the unit circle
/// with curvature −1 and `Cⱼ` touches it internally at `e^{iθⱼ}` (θ₀ = 0).
///
/// Damped Newton on the three pairwise tangency equations in the radii.
pub fn solve_root_quadruple(spec: &GasketSpec) -> Result<DescartesQuadruple> {
    let spec = GasketSpec::new(spec.theta1, spec.theta2)?;
    let angles = spec.angles();
    let mut r = [ROOT_INITIAL_RADIUS; 3];
    let (mut f, mut jac) = tangency_system(&angles, &r);
    let mut residual = max_abs(&f);
    let mut iterations = 0;
    while residual > ROOT_NEWTON_TOL {
        if iterations == ROOT_NEWTON_MAX_ITER {
            return Err(Error::NoConvergence { iterations, residual });
        }
        iterations += 1;
        let step = solve3(&jac, &f).ok_or(Error::NoConvergence { iterations, residual })?;
        let mut lambda = 1.0;
        loop {
            let trial = [r[0] - lambda * step[0], r[1] - lambda * step[1], r[2] - lambda * step[2]];
            let inside = trial.iter().all(|&x| x > 0.0 && x < 1.0);
            if inside {
                let (tf, tj) = tangency_system(&angles, &trial);
                let tres = max_abs(&tf);
                if tres < residual || lambda < 1e-3 {
                    r = trial;
                    f = tf;
                    jac = tj;
                    residual = tres;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::NoConvergence { iterations, residual });
            }
        }
    }
    let mut circles = [Circle::unit_bounding(); 4];
    for k in 0..3 {
        let center = Complex::from_polar(1.0 - r[k], angles[k]);
        circles[k + 1] = Circle::new(center, 1.0 / r[k])?;
    }
    DescartesQuadruple::new(circles).map_err(|_| Error::NoConvergence { iterations, residual })
}

/// Element of PSL(2, ℂ) acting on the Riemann sphere, normalized to
/// `ad − bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl MobiusMap {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() >= 1e-12) {
            return Err(Error::InvalidArgument(format!("degenerate Möbius map, det = {det}")));
        }
        let s = det.sqrt();
        Ok(MobiusMap { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        MobiusMap { a: one, b: zero, c: zero, d: one }
    }

    /// `z ↦ λz` for complex `λ ≠ 0` (dilation plus rotation).
    pub fn scaling(lambda: Complex) -> Result<Self> {
        MobiusMap::new(lambda, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
    }

    pub fn translation(w: Complex) -> Self {
        let one = Complex::new(1.0, 0.0);
        MobiusMap { a: one, b: w, c: Complex::new(0.0, 0.0), d: one }
    }

    /// `z ↦ 1/z`.
    pub fn reciprocal() -> Self {
        let zero = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        MobiusMap::new(zero, one, one, zero).expect("nondegenerate")
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Image of a finite point; `None` for the pole.
    pub fn apply(&self, z: Complex) -> Option<Complex> {
        let den = self.c * z + self.d;
        if den.norm() == 0.0 {
            return None;
        }
        let w = (self.a * z + self.b) / den;
        (w.re.is_finite() && w.im.is_finite()).then_some(w)
    }

    /// Preimage of ∞, if finite.
    pub fn pole(&self) -> Option<Complex> {
        (self.c.norm() > 0.0).then(|| -self.d / self.c)
    }
}

/// Image of a circle, refit through the images of three points at angles
/// 0, 2π/3, 4π/3. Orientation is kept unless the pole lies inside the disk.
pub fn apply_mobius(m: &MobiusMap, circle: &Circle) -> Result<Circle> {
    let angles = [0.0, TAU / 3.0, 2.0 * TAU / 3.0];
    let mut images = [Complex::new(0.0, 0.0); 3];
    for (k, &a) in angles.iter().enumerate() {
        images[k] = m.apply(circle.point_at(a)).ok_or(Error::LineImage)?;
    }
    let (center, radius) = circumcircle(images[0], images[1], images[2]).ok_or(Error::LineImage)?;
    // Refit radius beyond 1e12 of the transported points' spread means a line.
    let spread = (images[0] - images[1]).norm().max((images[0] - images[2]).norm());
    if radius > 1e12 * spread.max(f64::MIN_POSITIVE) {
        return Err(Error::LineImage);
    }
    let pole_inside = m.pole().map(|p| (p - circle.center).norm() < circle.radius()).unwrap_or(false);
    let sign = circle.curvature.signum() * if pole_inside { -1.0 } else { 1.0 };
    Circle::new(center, sign / radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    pub(crate) fn standard_root() -> DescartesQuadruple {
        DescartesQuadruple::from_parts(
            [-1.0, 2.0, 2.0, 3.0],
            [c(0.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 2.0 / 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_root_radii() {
        let q = solve_root_quadruple(&GasketSpec::new(2.0 * PI / 3.0, 4.0 * PI / 3.0).unwrap()).unwrap();
        let r = 2.0 * 3f64.sqrt() - 3.0;
        assert_eq!(q.circles[0].curvature, -1.0);
        for k in 1..4 {
            assert!((q.circles[k].radius() - r).abs() < 1e-12);
            assert!((q.circles[k].curvature - 2.1547005383792515).abs() < 1e-9);
            let expected = Complex::from_polar(4.0 - 2.0 * 3f64.sqrt(), [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0][k - 1]);
            assert!((q.circles[k].center - expected).norm() < 1e-12);
        }
        let b: f64 = q.curvatures().iter().sum();
        assert!((b * b - 29.856406460551018).abs() < 1e-6);
        let (res, tol) = q.descartes_residual();
        assert!(res <= tol);
    }

    #[test]
    fn coincident_angles_rejected() {
        assert!(matches!(GasketSpec::new(1.0, 1.0), Err(Error::InvalidSpec(_))));
        assert!(matches!(GasketSpec::new(0.0, 1.0), Err(Error::InvalidSpec(_))));
        assert!(matches!(GasketSpec::new(1.0, TAU), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn root_is_symmetric_in_angle_order() {
        let a = solve_root_quadruple(&GasketSpec::new(1.8 * PI / 3.0, 3.7 * PI / 3.0).unwrap()).unwrap();
        let b = solve_root_quadruple(&GasketSpec::new(3.7 * PI / 3.0, 1.8 * PI / 3.0).unwrap()).unwrap();
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            assert!((a.circles[i].center - b.circles[j].center).norm() < 1e-12);
            assert!((a.circles[i].curvature - b.circles[j].curvature).abs() < 1e-9);
        }
    }

    #[test]
    fn reflect_examples() {
        let q = standard_root();
        let r0 = q.reflect(0);
        assert!((r0.circles[0].curvature - 15.0).abs() < 1e-12);
        assert_eq!(r0.last_swapped, Some(0));
        let r3 = q.reflect(3);
        assert!((r3.circles[3].curvature - 3.0).abs() < 1e-12);
        assert!((r3.circles[3].center - c(0.0, -2.0 / 3.0)).norm() < 1e-12);
        r0.check().unwrap();
        r3.check().unwrap();
    }

    #[test]
    fn reflect_is_involution() {
        let q = standard_root();
        for i in 0..4 {
            let back = q.reflect(i).reflect(i);
            for k in 0..4 {
                assert!((back.circles[k].center - q.circles[k].center).norm() < 1e-9);
                assert!((back.circles[k].curvature - q.circles[k].curvature).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn from_curvatures_recovers_standard_root() {
        let q = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
        q.check().unwrap();
        assert!((q.circles[3].center.norm() - 2.0 / 3.0).abs() < 1e-12);
        assert!(DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 4.0]).is_err());
    }

    #[test]
    fn mobius_examples() {
        let unit = Circle::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        let id = apply_mobius(&MobiusMap::identity(), &unit).unwrap();
        assert!((id.center - unit.center).norm() < 1e-12 && (id.curvature - 1.0).abs() < 1e-12);

        let doubled = apply_mobius(&MobiusMap::scaling(c(2.0, 0.0)).unwrap(), &unit).unwrap();
        assert!(doubled.center.norm() < 1e-12);
        assert!((doubled.curvature - 0.5).abs() < 1e-12);

        let inv =
            apply_mobius(&MobiusMap::reciprocal(), &Circle::from_center_radius(c(3.0, 0.0), 1.0).unwrap()).unwrap();
        assert!((inv.center - c(3.0 / 8.0, 0.0)).norm() < 1e-12);
        assert!((inv.radius() - 1.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn circle_through_pole_is_a_line() {
        let through_origin = Circle::from_center_radius(c(1.0, 0.0), 1.0).unwrap();
        assert_eq!(apply_mobius(&MobiusMap::reciprocal(), &through_origin), Err(Error::LineImage));
    }

    #[test]
    fn degenerate_map_rejected() {
        let one = c(1.0, 0.0);
        assert!(MobiusMap::new(one, one, one, one).is_err());
        let m = MobiusMap::new(c(2.0, 1.0), c(0.5, 0.0), c(0.0, 1.0), c(3.0, 0.0)).unwrap();
        assert!((m.determinant() - one).norm() < 1e-12);
    }
}
