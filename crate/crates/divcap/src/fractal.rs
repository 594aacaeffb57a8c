//! Self-similar corner Cantor sets.
//!
//! `E(lambda)` is built from the unit cube by keeping, at every step, the
//! `2^n` corner cubes scaled by `lambda < 1/2`. Generation `k` consists of
//! `2^{kn}` cubes of side `lambda^k`; the limit set is their intersection
//! over all generations. Every vertex of every generation cube belongs to
//! the limit set, which is what makes an exact branch-and-bound distance
//! oracle possible.

use serde::{Deserialize, Serialize};

use crate::geometry::{Cube, Point};
use crate::measure::{Atom, DiscreteMeasure};
use crate::{Error, Result};

/// Default cap on `2^{kn}` for enumeration-style operations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Parameters of the corner Cantor family: ambient dimension, contraction
/// ratio and working generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CantorRepr", into = "CantorRepr")]
pub struct CantorSpec {
    n: usize,
    lambda: f64,
    k: u32,
}

#[derive(Serialize, Deserialize)]
struct CantorRepr {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    k: u32,
}

impl TryFrom<CantorRepr> for CantorSpec {
    type Error = Error;
    fn try_from(r: CantorRepr) -> Result<Self> {
        match (r.lambda, r.s) {
            (Some(l), None) => CantorSpec::new(r.n, l, r.k),
            (None, Some(s)) => CantorSpec::from_dimension(r.n, s, r.k),
            _ => Err(Error::InvalidInput(
                "specify exactly one of `lambda` or `s`".into(),
            )),
        }
    }
}

impl From<CantorSpec> for CantorRepr {
    fn from(c: CantorSpec) -> Self {
        CantorRepr {
            n: c.n,
            lambda: Some(c.lambda),
            s: None,
            k: c.k,
        }
    }
}

impl CantorSpec {
    pub fn new(n: usize, lambda: f64, k: u32) -> Result<Self> {
        if n == 0 || n > crate::geometry::MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "ambient dimension {n} outside 1..={}",
                crate::geometry::MAX_DIM
            )));
        }
        if !(lambda > 0.0 && lambda < 0.5) {
            return Err(Error::InvalidInput(format!(
                "contraction ratio {lambda} outside (0, 1/2)"
            )));
        }
        Ok(CantorSpec { n, lambda, k })
    }

    /// Build the family with prescribed similarity dimension `s` in
    /// `(0, n)`, i.e. `lambda = 2^{-n/s}`.
    pub fn from_dimension(n: usize, s: f64, k: u32) -> Result<Self> {
        if !(s > 0.0) || s >= n as f64 {
            return Err(Error::InvalidInput(format!(
                "similarity dimension {s} outside (0, {n})"
            )));
        }
        let lambda = 2f64.powf(-(n as f64) / s);
        CantorSpec::new(n, lambda, k)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn generation(&self) -> u32 {
        self.k
    }

    pub fn with_generation(&self, k: u32) -> Self {
        CantorSpec { k, ..*self }
    }

    /// `s = n ln 2 / ln(1/lambda)`.
    pub fn similarity_dimension(&self) -> f64 {
        self.n as f64 * std::f64::consts::LN_2 / (1.0 / self.lambda).ln()
    }

    /// Side length `lambda^g` of generation-`g` cubes.
    pub fn side_at(&self, generation: u32) -> f64 {
        self.lambda.powi(generation as i32)
    }

    /// Side length of the working-generation cubes.
    pub fn side(&self) -> f64 {
        self.side_at(self.k)
    }

    /// Number of generation-`k` cubes, `2^{kn}`.
    pub fn cube_count(&self) -> u128 {
        1u128 << (self.k as usize * self.n)
    }

    fn check_enumeration_cap(&self, cap: u64) -> Result<()> {
        let count = self.k as usize * self.n;
        if count >= 64 || (1u64 << count) > cap {
            return Err(Error::EnumerationCap {
                requested: if count >= 64 {
                    u64::MAX
                } else {
                    1u64 << count
                },
                cap,
            });
        }
        Ok(())
    }

    /// Enumerate the generation-`k` cubes in lexicographic order of the
    /// corner-choice bit string (depth-first, children visited in
    /// increasing bit-mask order).
    pub fn cubes(&self) -> Result<Vec<Cube>> {
        self.cubes_capped(DEFAULT_ENUMERATION_CAP)
    }

    pub fn cubes_capped(&self, cap: u64) -> Result<Vec<Cube>> {
        self.check_enumeration_cap(cap)?;
        let mut out = Vec::with_capacity(self.cube_count() as usize);
        let root = Cube::new(Point::zero(self.n), 1.0)?;
        self.collect_cubes(&root, self.k, &mut out);
        Ok(out)
    }

    fn collect_cubes(&self, cube: &Cube, levels_left: u32, out: &mut Vec<Cube>) {
        if levels_left == 0 {
            out.push(*cube);
            return;
        }
        let child_side = cube.side * self.lambda;
        let shift = cube.side - child_side;
        for bits in 0u32..(1 << self.n) {
            let mut anchor = cube.anchor;
            for d in 0..self.n {
                if bits >> d & 1 == 1 {
                    anchor.set_coord(d, anchor.coord(d) + shift);
                }
            }
            let child = Cube {
                anchor,
                side: child_side,
            };
            self.collect_cubes(&child, levels_left - 1, out);
        }
    }

    /// Exact Euclidean distance from `x` to the generation-`k` set `E_k`
    /// (the union of the generation cubes; zero inside them). This is a
    /// lower bound for the distance to the limit set, off by at most
    /// `sqrt(n) * lambda^k`.
    pub fn distance_at_generation(&self, x: &Point) -> f64 {
        debug_assert_eq!(x.dim(), self.n);
        let root = Cube {
            anchor: Point::zero(self.n),
            side: 1.0,
        };
        let mut best = f64::INFINITY;
        self.descend_generation(&root, self.k, x, &mut best);
        best
    }

    fn descend_generation(&self, cube: &Cube, levels_left: u32, x: &Point, best: &mut f64) {
        let lb = cube.dist_to(x);
        if lb >= *best {
            return;
        }
        if levels_left == 0 {
            *best = lb;
            return;
        }
        let child_side = cube.side * self.lambda;
        let shift = cube.side - child_side;
        // visit children closest-first for tighter pruning
        let mut order: [(f64, u32); 16] = [(0.0, 0); 16];
        let count = 1usize << self.n;
        for bits in 0..count as u32 {
            let mut anchor = cube.anchor;
            for d in 0..self.n {
                if bits >> d & 1 == 1 {
                    anchor.set_coord(d, anchor.coord(d) + shift);
                }
            }
            let child = Cube {
                anchor,
                side: child_side,
            };
            order[bits as usize] = (child.dist_to(x), bits);
        }
        order[..count].sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(lb_child, bits) in &order[..count] {
            if lb_child >= *best {
                break;
            }
            let mut anchor = cube.anchor;
            for d in 0..self.n {
                if bits >> d & 1 == 1 {
                    anchor.set_coord(d, anchor.coord(d) + shift);
                }
            }
            let child = Cube {
                anchor,
                side: child_side,
            };
            self.descend_generation(&child, levels_left - 1, x, best);
        }
    }

    /// Distance from `x` to the limit set, within absolute tolerance
    /// `tol`. Uses branch-and-bound on the cube hierarchy: cube distances
    /// are lower bounds and cube vertices (all of which belong to the
    /// limit set) provide upper bounds.
    pub fn distance_to_limit(&self, x: &Point, tol: f64) -> f64 {
        self.nearest_limit_point(x, tol).0
    }

    /// Distance to the limit set together with a witness point of the
    /// set realizing it within the tolerance.
    pub fn nearest_limit_point(&self, x: &Point, tol: f64) -> (f64, Point) {
        debug_assert_eq!(x.dim(), self.n);
        let tol = tol.max(1e-15);
        let root = Cube {
            anchor: Point::zero(self.n),
            side: 1.0,
        };
        let mut witness = nearest_vertex(&root, x);
        let mut best = witness.dist(x);
        self.descend_limit(&root, x, tol, &mut best, &mut witness);
        (best, witness)
    }

    fn descend_limit(&self, cube: &Cube, x: &Point, tol: f64, best: &mut f64, witness: &mut Point) {
        let lb = cube.dist_to(x);
        if lb + tol >= *best {
            return;
        }
        let v = nearest_vertex(cube, x);
        let vmin = v.dist(x);
        if vmin < *best {
            *best = vmin;
            *witness = v;
        }
        // the subtree cannot improve on its own vertices by more than a
        // cube diameter
        if cube.side * (self.n as f64).sqrt() <= tol || cube.side < 1e-300 {
            return;
        }
        let child_side = cube.side * self.lambda;
        let shift = cube.side - child_side;
        let count = 1usize << self.n;
        let mut order: [(f64, u32); 16] = [(0.0, 0); 16];
        for bits in 0..count as u32 {
            let mut anchor = cube.anchor;
            for d in 0..self.n {
                if bits >> d & 1 == 1 {
                    anchor.set_coord(d, anchor.coord(d) + shift);
                }
            }
            let child = Cube {
                anchor,
                side: child_side,
            };
            order[bits as usize] = (child.dist_to(x), bits);
        }
        order[..count].sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for &(lb_child, bits) in &order[..count] {
            if lb_child + tol >= *best {
                break;
            }
            let mut anchor = cube.anchor;
            for d in 0..self.n {
                if bits >> d & 1 == 1 {
                    anchor.set_coord(d, anchor.coord(d) + shift);
                }
            }
            let child = Cube {
                anchor,
                side: child_side,
            };
            self.descend_limit(&child, x, tol, best, witness);
        }
    }

    /// Uniform measure on generation-`k`: one atom at each cube center
    /// with mass `2^{-kn}`; the total is exactly 1.
    pub fn natural_measure(&self) -> Result<DiscreteMeasure> {
        self.natural_measure_capped(DEFAULT_ENUMERATION_CAP)
    }

    pub fn natural_measure_capped(&self, cap: u64) -> Result<DiscreteMeasure> {
        let cubes = self.cubes_capped(cap)?;
        let mass = 2f64.powi(-((self.k as i32) * self.n as i32));
        DiscreteMeasure::new(
            cubes
                .iter()
                .map(|c| Atom {
                    x: c.center(),
                    m: mass,
                })
                .collect(),
        )
    }
}

fn nearest_vertex(cube: &Cube, x: &Point) -> Point {
    // per-axis independent choice of the nearer vertex coordinate
    let mut v = cube.anchor;
    for d in 0..cube.dim() {
        let lo = cube.anchor.coord(d);
        let hi = lo + cube.side;
        let c = x.coord(d);
        v.set_coord(d, if (c - lo).abs() <= (c - hi).abs() { lo } else { hi });
    }
    v
}
