//! Finite atomic nonnegative measures.

use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, Ball, Point};
use crate::{Error, Result};

/// One atom of a discrete measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: Point,
    pub m: f64,
}

/// A finite atomic nonnegative measure. The cached total mass is kept in
/// sync with the atom list (compensated summation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
    total: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        DiscreteMeasure::new(r.atoms)
    }
}

impl From<DiscreteMeasure> for MeasureRepr {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureRepr { atoms: m.atoms }
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut dim = None;
        for a in &atoms {
            if !(a.m >= 0.0) || !a.m.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "atom mass {} must be finite and nonnegative",
                    a.m
                )));
            }
            match dim {
                None => dim = Some(a.x.dim()),
                Some(d) => a.x.check_dim(d)?,
            }
        }
        let total = compensated_sum(atoms.iter().map(|a| a.m));
        Ok(DiscreteMeasure { atoms, total })
    }

    pub fn empty() -> Self {
        DiscreteMeasure {
            atoms: Vec::new(),
            total: 0.0,
        }
    }

    pub fn unit_atom(x: Point) -> Self {
        DiscreteMeasure {
            atoms: vec![Atom { x, m: 1.0 }],
            total: 1.0,
        }
    }

    /// Arc-length measure of the segment `[a, b]`, discretized to `count`
    /// atoms of equal mass placed at segment midpoints. Total mass equals
    /// the segment length.
    pub fn segment(a: &Point, b: &Point, count: usize) -> Result<Self> {
        a.check_dim(b.dim())?;
        if count == 0 {
            return Err(Error::InvalidInput("segment needs at least one atom".into()));
        }
        let len = a.dist(b);
        let dir: Vec<f64> = (0..a.dim()).map(|d| b.coord(d) - a.coord(d)).collect();
        let mass = len / count as f64;
        let atoms = (0..count)
            .map(|i| {
                let t = (i as f64 + 0.5) / count as f64;
                Atom {
                    x: a.offset(&dir, t),
                    m: mass,
                }
            })
            .collect();
        DiscreteMeasure::new(atoms)
    }

    #[inline]
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_zero(&self) -> bool {
        self.total == 0.0
    }

    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(|a| a.x.dim())
    }

    /// Mass carried by the open ball (strict inequality; boundary atoms
    /// count as outside).
    pub fn mass_in_ball(&self, ball: &Ball) -> f64 {
        compensated_sum(
            self.atoms
                .iter()
                .filter(|a| a.x.dist(&ball.center) < ball.radius)
                .map(|a| a.m),
        )
    }

    /// Rescale all masses by `t >= 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("scale {t} must be >= 0")));
        }
        DiscreteMeasure::new(
            self.atoms
                .iter()
                .map(|a| Atom { x: a.x, m: a.m * t })
                .collect(),
        )
    }

    /// Bounding box of the support, or `None` for the zero measure.
    pub fn support_bbox(&self) -> Option<BBox> {
        let first = self.atoms.first()?;
        let mut lo = first.x;
        let mut hi = first.x;
        for a in &self.atoms {
            for d in 0..a.x.dim() {
                lo.set_coord(d, lo.coord(d).min(a.x.coord(d)));
                hi.set_coord(d, hi.coord(d).max(a.x.coord(d)));
            }
        }
        Some(BBox { lo, hi })
    }

    /// Diameter of the support bounding box.
    pub fn support_diameter(&self) -> f64 {
        self.support_bbox().map(|b| b.diameter()).unwrap_or(0.0)
    }

    /// Smallest positive nearest-neighbor distance between atoms, or
    /// `None` when fewer than two distinct atom locations exist.
    pub fn min_atom_spacing(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                let d = a.x.dist(&b.x);
                if d > 0.0 {
                    best = Some(best.map_or(d, |cur: f64| cur.min(d)));
                }
            }
        }
        best
    }
}

/// Neumaier compensated summation; deterministic for a fixed iteration
/// order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_is_compensated() {
        let atoms: Vec<Atom> = (0..1000)
            .map(|_| Atom {
                x: Point::zero(2),
                m: 0.1,
            })
            .collect();
        let mu = DiscreteMeasure::new(atoms).unwrap();
        assert!((mu.total() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn ball_mass_open() {
        let mu = DiscreteMeasure::unit_atom(Point::zero(2));
        let b = Ball::new(Point::zero(2), 1.0).unwrap();
        assert_eq!(mu.mass_in_ball(&b), 1.0);
        let b = Ball::new(Point::new(&[2.0, 0.0]).unwrap(), 1.0).unwrap();
        assert_eq!(mu.mass_in_ball(&b), 0.0);
        // boundary atom is outside
        let b = Ball::new(Point::new(&[1.0, 0.0]).unwrap(), 1.0).unwrap();
        assert_eq!(mu.mass_in_ball(&b), 0.0);
    }

    #[test]
    fn segment_measure_has_length_total() {
        let a = Point::new(&[0.0, 0.0]).unwrap();
        let b = Point::new(&[1.0, 0.0]).unwrap();
        let mu = DiscreteMeasure::segment(&a, &b, 200).unwrap();
        assert_eq!(mu.atoms().len(), 200);
        assert!((mu.total() - 1.0).abs() < 1e-12);
        assert!((mu.min_atom_spacing().unwrap() - 0.005).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let a = Point::new(&[0.25, 0.5]).unwrap();
        let mu = DiscreteMeasure::new(vec![Atom { x: a, m: 0.5 }]).unwrap();
        let s = serde_json::to_string(&mu).unwrap();
        assert!(s.contains("\"atoms\""));
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, mu);
    }
}
