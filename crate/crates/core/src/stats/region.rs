//! Open regions `E ⊆ ℂ` used to restrict statistics, with closed-form
//! erosion and dilation `E_{ε−} ⊆ E ⊆ E_{ε+}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Complex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    WholePlane,
    /// `{z : ⟨normal, z⟩ > offset}` with a unit normal.
    HalfPlane {
        normal: Complex,
        offset: f64,
    },
    Disk {
        center: Complex,
        radius: f64,
    },
    Rect {
        lo: Complex,
        hi: Complex,
    },
    /// `{z : Re z > Re corner, Im z > Im corner}`.
    Quadrant {
        corner: Complex,
    },
}

/// A convex open region: the points whose signed distance to `shape` is
/// below `margin`. Margin 0 is the shape itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    shape: Shape,
    margin: f64,
}

impl Region {
    pub fn whole_plane() -> Self {
        Region { shape: Shape::WholePlane, margin: 0.0 }
    }

    pub fn half_plane(normal: Complex, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidArgument("half-plane needs a nonzero finite normal".into()));
        }
        Ok(Region { shape: Shape::HalfPlane { normal: normal / n, offset: offset / n }, margin: 0.0 })
    }

    pub fn disk(center: Complex, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Region { shape: Shape::Disk { center, radius }, margin: 0.0 })
    }

    pub fn rect(lo: Complex, hi: Complex) -> Result<Self> {
        if !(lo.re < hi.re && lo.im < hi.im) {
            return Err(Error::InvalidArgument(format!("empty rectangle {lo} .. {hi}")));
        }
        Ok(Region { shape: Shape::Rect { lo, hi }, margin: 0.0 })
    }

    pub fn quadrant(corner: Complex) -> Self {
        Region { shape: Shape::Quadrant { corner }, margin: 0.0 }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// `E_{ε+} = {x : d(x, E) < ε}`.
    pub fn dilated(&self, eps: f64) -> Region {
        Region { shape: self.shape, margin: self.margin + eps }
    }

    /// `E_{ε−} = {x : d(x, ℂ∖E) > ε}`.
    pub fn eroded(&self, eps: f64) -> Region {
        Region { shape: self.shape, margin: self.margin - eps }
    }

    pub fn is_whole_plane(&self) -> bool {
        matches!(self.shape, Shape::WholePlane)
    }

    /// Signed distance to the boundary of the shape, negative inside.
    pub fn signed_distance(&self, z: Complex) -> f64 {
        match self.shape {
            Shape::WholePlane => f64::NEG_INFINITY,
            Shape::HalfPlane { normal, offset } => offset - (normal.re * z.re + normal.im * z.im),
            Shape::Disk { center, radius } => (z - center).norm() - radius,
            Shape::Rect { lo, hi } => {
                let c = (lo + hi) * 0.5;
                let half = (hi - lo) * 0.5;
                box_sdf((z.re - c.re).abs() - half.re, (z.im - c.im).abs() - half.im)
            }
            Shape::Quadrant { corner } => box_sdf(corner.re - z.re, corner.im - z.im),
        }
    }

    pub fn contains(&self, z: Complex) -> bool {
        if self.margin != 0.0 {
            return self.signed_distance(z) < self.margin;
        }
        match self.shape {
            Shape::WholePlane => true,
            Shape::HalfPlane { normal, offset } => normal.re * z.re + normal.im * z.im > offset,
            Shape::Disk { center, radius } => (z - center).norm() < radius,
            Shape::Rect { lo, hi } => lo.re < z.re && z.re < hi.re && lo.im < z.im && z.im < hi.im,
            Shape::Quadrant { corner } => z.re > corner.re && z.im > corner.im,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.shape, Shape::Disk { .. } | Shape::Rect { .. })
    }

    /// Axis-aligned box containing the region, when bounded.
    pub fn bounding_box(&self) -> Option<(Complex, Complex)> {
        let m = Complex::new(self.margin, self.margin);
        match self.shape {
            Shape::Disk { center, radius } => {
                let r = radius + self.margin;
                (r > 0.0).then(|| (center - Complex::new(r, r), center + Complex::new(r, r)))
            }
            Shape::Rect { lo, hi } => {
                let (lo, hi) = (lo - m, hi + m);
                (lo.re < hi.re && lo.im < hi.im).then_some((lo, hi))
            }
            _ => None,
        }
    }

    /// The open interval of `x` with `x + iy` inside the region, if any.
    /// Ends may be infinite.
    pub fn row_interval(&self, y: f64) -> Option<(f64, f64)> {
        let m = self.margin;
        match self.shape {
            Shape::WholePlane => Some((f64::NEG_INFINITY, f64::INFINITY)),
            Shape::HalfPlane { normal, offset } => {
                let rhs = offset - m - normal.im * y;
                if normal.re > 0.0 {
                    Some((rhs / normal.re, f64::INFINITY))
                } else if normal.re < 0.0 {
                    Some((f64::NEG_INFINITY, rhs / normal.re))
                } else if 0.0 > rhs {
                    Some((f64::NEG_INFINITY, f64::INFINITY))
                } else {
                    None
                }
            }
            Shape::Disk { center, radius } => {
                let r = radius + m;
                let dy = y - center.im;
                (r > 0.0 && dy.abs() < r).then(|| {
                    let w = (r * r - dy * dy).sqrt();
                    (center.re - w, center.re + w)
                })
            }
            Shape::Rect { lo, hi } => {
                let c = (lo + hi) * 0.5;
                let half = (hi - lo) * 0.5;
                let w = rounded_half_width(half.re, (y - c.im).abs() - half.im, m)?;
                Some((c.re - w, c.re + w))
            }
            Shape::Quadrant { corner } => {
                let w = rounded_half_width(0.0, corner.im - y, m)?;
                Some((corner.re - w, f64::INFINITY))
            }
        }
    }
}

fn box_sdf(qx: f64, qy: f64) -> f64 {
    qx.max(0.0).hypot(qy.max(0.0)) + qx.max(qy).min(0.0)
}

// Half-width along x of {sd < m} for a box of x-half-width `hx`, at a row
// whose y-excess over the box is `dy` (negative inside).
fn rounded_half_width(hx: f64, dy: f64, m: f64) -> Option<f64> {
    if m >= 0.0 {
        if dy <= 0.0 {
            Some(hx + m)
        } else if dy < m {
            Some(hx + (m * m - dy * dy).sqrt())
        } else {
            None
        }
    } else {
        (dy < m).then_some(hx + m).filter(|&w| w > 0.0 || hx == 0.0)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            Shape::WholePlane => write!(f, "plane")?,
            Shape::HalfPlane { normal, offset } => write!(f, "halfplane:{},{},{}", normal.re, normal.im, offset)?,
            Shape::Disk { center, radius } => write!(f, "disk:{},{},{}", center.re, center.im, radius)?,
            Shape::Rect { lo, hi } => write!(f, "rect:{},{},{},{}", lo.re, lo.im, hi.re, hi.im)?,
            Shape::Quadrant { corner } => write!(f, "quadrant:{},{}", corner.re, corner.im)?,
        }
        if self.margin != 0.0 {
            write!(f, "@{}", self.margin)?;
        }
        Ok(())
    }
}

fn parse_numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    if v.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} numbers, got {}", v.len())));
    }
    Ok(v)
}

impl FromStr for Region {
    type Err = Error;

    /// `plane`, `halfplane:re>0` (also `re<c`, `im>c`, `im<c`),
    /// `halfplane:nx,ny,offset`, `disk:cx,cy,r`, `rect:x0,y0,x1,y1`,
    /// `quadrant:cx,cy`; an optional `@margin` suffix.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, margin) = match s.split_once('@') {
            Some((b, m)) => (b, m.trim().parse::<f64>().map_err(|e| Error::Parse(format!("margin: {e}")))?),
            None => (s, 0.0),
        };
        let (kind, args) = body.split_once(':').unwrap_or((body, ""));
        let region = match kind {
            "plane" | "whole" => Region::whole_plane(),
            "halfplane" => {
                let a = args.replace(' ', "");
                let simple = [("re>", 1.0, 0.0), ("re<", -1.0, 0.0), ("im>", 0.0, 1.0), ("im<", 0.0, -1.0)];
                match simple.iter().find(|(p, _, _)| a.starts_with(p)) {
                    Some(&(p, nx, ny)) => {
                        let c: f64 =
                            a[p.len()..].parse().map_err(|e| Error::Parse(format!("halfplane offset: {e}")))?;
                        let sign = if nx + ny > 0.0 { 1.0 } else { -1.0 };
                        Region::half_plane(Complex::new(nx, ny), sign * c)?
                    }
                    None => {
                        let v = parse_numbers(&a, 3, "halfplane")?;
                        Region::half_plane(Complex::new(v[0], v[1]), v[2])?
                    }
                }
            }
            "disk" => {
                let v = parse_numbers(args, 3, "disk")?;
                Region::disk(Complex::new(v[0], v[1]), v[2])?
            }
            "rect" => {
                let v = parse_numbers(args, 4, "rect")?;
                Region::rect(Complex::new(v[0], v[1]), Complex::new(v[2], v[3]))?
            }
            "quadrant" => {
                let v = parse_numbers(args, 2, "quadrant")?;
                Region::quadrant(Complex::new(v[0], v[1]))
            }
            other => return Err(Error::Parse(format!("unknown region kind {other:?}"))),
        };
        Ok(Region { margin, ..region })
    }
}
