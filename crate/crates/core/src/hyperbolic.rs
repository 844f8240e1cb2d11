//! Upper half-space model of hyperbolic 3-space.
//!
//! Points are `z + r·j` with `z ∈ ℂ` and height `r > 0`. Hemispheres over
//! gasket circles are represented by their apices; two hemispheres over
//! disjoint disks have apices at least `arccosh 3` apart.

use crate::error::{Error, Result};
use crate::geometry::{apply_mobius, Circle, Complex, MobiusMap};

/// `arccosh(3)`, the minimal distance between apices of hemispheres over
/// circles with disjoint interiors.
pub const APEX_SEPARATION: f64 = 1.762_747_174_039_086;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct H3Point {
    pub z: Complex,
    pub r: f64,
}

impl H3Point {
    pub fn new(z: Complex, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!("height must be positive, got {r}")));
        }
        Ok(H3Point { z, r })
    }

    /// The point `j` (origin of the plane, height 1).
    pub fn j() -> Self {
        H3Point { z: Complex::new(0.0, 0.0), r: 1.0 }
    }

    pub fn re(&self) -> Complex {
        self.z
    }

    pub fn im(&self) -> f64 {
        self.r
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Apex {
    Finite(H3Point),
    AtInfinity,
}

/// Action of `[[a, b], [c, d]]` on `z + r·j`.
pub fn act(m: &MobiusMap, p: &H3Point) -> H3Point {
    let (a, b, c, d) = (m.a, m.b, m.c, m.d);
    let z = p.z;
    let r2 = p.r * p.r;
    let den = (c * z + d).norm_sqr() + r2 * c.norm_sqr();
    let num =
        a * c.conj() * z.norm_sqr() + a * d.conj() * z + b * c.conj() * z.conj() + b * d.conj() + a * c.conj() * r2;
    H3Point { z: num / den, r: p.r / den }
}

/// `cosh` of the hyperbolic distance, `1 + |p − q|² / (2 Im p Im q)`.
pub fn cosh_distance(p: &H3Point, q: &H3Point) -> f64 {
    let dz = (p.z - q.z).norm_sqr();
    let dr = p.r - q.r;
    1.0 + (dz + dr * dr) / (2.0 * p.r * q.r)
}

pub fn hyp_distance(p: &H3Point, q: &H3Point) -> f64 {
    let c = cosh_distance(p, q);
    // acosh(1 + x) loses precision near x = 0; use ln1p form.
    let x = c - 1.0;
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

/// Busemann function at ∞ based at `j`: the log of the height.
pub fn busemann_infinity(q: &H3Point) -> f64 {
    q.r.ln()
}

/// Top of the hemisphere over the circle.
pub fn apex_of_circle(c: &Circle) -> Apex {
    Apex::Finite(H3Point { z: c.center, r: c.radius() })
}

/// Apex of the hemisphere over the image of `c` under `m`; at infinity when
/// the image circle passes through ∞.
pub fn apex_of_image(m: &MobiusMap, c: &Circle) -> Result<Apex> {
    match apply_mobius(m, c) {
        Ok(image) => Ok(apex_of_circle(&image)),
        Err(Error::LineImage) => Ok(Apex::AtInfinity),
        Err(e) => Err(e),
    }
}
