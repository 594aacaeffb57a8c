//! Points, balls, cubes and axis-aligned boxes in ambient dimension 1..=4.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest supported ambient dimension (tensor quadrature cost grows as
/// `m^n`, so higher dimensions are rejected at construction).
pub const MAX_DIM: usize = 4;

/// A point of `R^n`, `1 <= n <= MAX_DIM`. Stored inline so it is `Copy`.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    dim: usize,
    xs: [f64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGeometry(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite coordinate".into()));
        }
        let mut xs = [0.0; MAX_DIM];
        xs[..dim].copy_from_slice(coords);
        Ok(Point { dim, xs })
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM);
        Point {
            dim,
            xs: [0.0; MAX_DIM],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.xs[..self.dim]
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> f64 {
        debug_assert!(axis < self.dim);
        self.xs[axis]
    }

    #[inline]
    pub fn set_coord(&mut self, axis: usize, v: f64) {
        debug_assert!(axis < self.dim);
        self.xs[axis] = v;
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for d in 0..self.dim {
            let t = self.xs[d] - other.xs[d];
            s += t * t;
        }
        s.sqrt()
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for d in 0..self.dim {
            s += self.xs[d] * self.xs[d];
        }
        s.sqrt()
    }

    /// `self + t * dir`, `dir` given as a slice of length `dim`.
    pub fn offset(&self, dir: &[f64], t: f64) -> Point {
        let mut p = *self;
        for d in 0..self.dim {
            p.xs[d] += t * dir[d];
        }
        p
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            Err(Error::DimensionMismatch {
                expected,
                got: self.dim,
            })
        } else {
            Ok(())
        }
    }
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Point{:?}", self.coords())
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(deserializer)?;
        Point::new(&coords).map_err(serde::de::Error::custom)
    }
}

/// Euclidean open ball `B(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "ball radius {radius} must be positive and finite"
            )));
        }
        Ok(Ball { center, radius })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Open-ball membership (strict inequality).
    #[inline]
    pub fn contains(&self, x: &Point) -> bool {
        self.center.dist(x) < self.radius
    }

    pub fn scaled(&self, factor: f64) -> Ball {
        Ball {
            center: self.center,
            radius: self.radius * factor,
        }
    }

    pub fn bounding_box(&self) -> BBox {
        let mut lo = self.center;
        let mut hi = self.center;
        for d in 0..self.dim() {
            lo.set_coord(d, self.center.coord(d) - self.radius);
            hi.set_coord(d, self.center.coord(d) + self.radius);
        }
        BBox { lo, hi }
    }

    /// Volume of the ball (Lebesgue measure).
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }
}

/// Axis-aligned cube given by its minimal corner and edge length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub anchor: Point,
    pub side: f64,
}

impl Cube {
    pub fn new(anchor: Point, side: f64) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "cube side {side} must be positive and finite"
            )));
        }
        Ok(Cube { anchor, side })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.anchor.dim()
    }

    pub fn center(&self) -> Point {
        let mut c = self.anchor;
        for d in 0..self.dim() {
            c.set_coord(d, self.anchor.coord(d) + 0.5 * self.side);
        }
        c
    }

    /// Euclidean distance from `x` to the (closed) cube; zero inside.
    pub fn dist_to(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for d in 0..self.dim() {
            let lo = self.anchor.coord(d);
            let hi = lo + self.side;
            let v = x.coord(d);
            let t = if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            };
            s += t * t;
        }
        s.sqrt()
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim()).all(|d| {
            let v = x.coord(d);
            let lo = self.anchor.coord(d);
            v >= lo && v <= lo + self.side
        })
    }

    /// Radius of the circumscribed ball, `sqrt(n) * side / 2`.
    pub fn circumradius(&self) -> f64 {
        (self.dim() as f64).sqrt() * self.side * 0.5
    }

    pub fn circumscribed_ball(&self) -> Ball {
        Ball {
            center: self.center(),
            radius: self.circumradius(),
        }
    }
}

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_n, hi_n]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub lo: Point,
    pub hi: Point,
}

impl BBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        lo.check_dim(hi.dim())?;
        for d in 0..lo.dim() {
            if !(lo.coord(d) < hi.coord(d)) {
                return Err(Error::InvalidGeometry(format!(
                    "degenerate box on axis {d}: [{}, {}]",
                    lo.coord(d),
                    hi.coord(d)
                )));
            }
        }
        Ok(BBox { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        let l = Point::new(&vec![lo; dim])?;
        let h = Point::new(&vec![hi; dim])?;
        BBox::new(l, h)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn side(&self, d: usize) -> f64 {
        self.hi.coord(d) - self.lo.coord(d)
    }

    pub fn center(&self) -> Point {
        let mut c = self.lo;
        for d in 0..self.dim() {
            c.set_coord(d, 0.5 * (self.lo.coord(d) + self.hi.coord(d)));
        }
        c
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|d| self.side(d)).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|d| self.side(d) * self.side(d))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim()).all(|d| x.coord(d) >= self.lo.coord(d) && x.coord(d) <= self.hi.coord(d))
    }

    /// Distance from `x` to the box; zero inside.
    pub fn dist_to(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for d in 0..self.dim() {
            let v = x.coord(d);
            let lo = self.lo.coord(d);
            let hi = self.hi.coord(d);
            let t = if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            };
            s += t * t;
        }
        s.sqrt()
    }

    /// Largest distance from `x` to a point of the box.
    pub fn max_dist_to(&self, x: &Point) -> f64 {
        let mut s = 0.0;
        for d in 0..self.dim() {
            let v = x.coord(d);
            let t = (v - self.lo.coord(d)).abs().max((v - self.hi.coord(d)).abs());
            s += t * t;
        }
        s.sqrt()
    }

    pub fn grow(&self, margin: f64) -> BBox {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for d in 0..self.dim() {
            lo.set_coord(d, lo.coord(d) - margin);
            hi.set_coord(d, hi.coord(d) + margin);
        }
        BBox { lo, hi }
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &BBox) -> BBox {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for d in 0..self.dim() {
            lo.set_coord(d, lo.coord(d).min(other.lo.coord(d)));
            hi.set_coord(d, hi.coord(d).max(other.hi.coord(d)));
        }
        BBox { lo, hi }
    }
}

/// Volume of the unit ball of `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        4 => std::f64::consts::PI * std::f64::consts::PI / 2.0,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Surface area of the unit sphere `S^{n-1}`, i.e. `n * omega_n`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_validation() {
        assert!(Point::new(&[]).is_err());
        assert!(Point::new(&[0.0; 5]).is_err());
        assert!(Point::new(&[f64::NAN]).is_err());
        let p = Point::new(&[1.0, 2.0]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.coords(), &[1.0, 2.0]);
    }

    #[test]
    fn ball_membership_is_strict() {
        let b = Ball::new(Point::zero(2), 1.0).unwrap();
        assert!(b.contains(&Point::new(&[0.5, 0.0]).unwrap()));
        assert!(!b.contains(&Point::new(&[1.0, 0.0]).unwrap()));
    }

    #[test]
    fn cube_distance_clamps() {
        let c = Cube::new(Point::zero(2), 1.0).unwrap();
        assert_eq!(c.dist_to(&Point::new(&[0.5, 0.5]).unwrap()), 0.0);
        let d = c.dist_to(&Point::new(&[2.0, 0.5]).unwrap());
        assert!((d - 1.0).abs() < 1e-15);
        let d = c.dist_to(&Point::new(&[2.0, 2.0]).unwrap());
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn ball_volumes() {
        let b = Ball::new(Point::zero(3), 1.0).unwrap();
        assert!((b.volume() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        let b = Ball::new(Point::zero(2), 2.0).unwrap();
        assert!((b.volume() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn bbox_distances() {
        let bx = BBox::cube(2, 0.0, 1.0).unwrap();
        let p = Point::new(&[2.0, 0.5]).unwrap();
        assert!((bx.dist_to(&p) - 1.0).abs() < 1e-15);
        assert!((bx.max_dist_to(&p) - (4.0f64 + 0.25).sqrt()).abs() < 1e-15);
    }
}
