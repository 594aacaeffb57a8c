//! Deterministic low-discrepancy sampling and seeded RNG helpers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{BBox, Point};

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Van der Corput radical inverse in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut frac = inv;
    while index > 0 {
        result += (index % base) as f64 * frac;
        index /= base;
        frac *= inv;
    }
    result
}

/// `dim`-dimensional Halton point (index starts at 0; a fixed offset
/// skips the degenerate origin).
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|d| radical_inverse(index + 17, PRIMES[d]))
        .collect()
}

/// Halton point mapped into a box.
pub fn halton_in_box(index: u64, region: &BBox) -> Point {
    let u = halton(index, region.dim());
    let mut p = region.lo;
    for d in 0..region.dim() {
        p.set_coord(d, region.lo.coord(d) + u[d] * region.side(d));
    }
    p
}

/// Log-uniform value in `[lo, hi]` driven by a Halton coordinate.
pub fn halton_log_uniform(index: u64, prime_slot: usize, lo: f64, hi: f64) -> f64 {
    let u = radical_inverse(index + 17, PRIMES[prime_slot]);
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

/// Deterministic per-task RNG: mixes the global seed with a task index so
/// results do not depend on scheduling.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ task.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base2() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn halton_fills_box() {
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let pts: Vec<Point> = (0..64).map(|i| halton_in_box(i, &region)).collect();
        assert!(pts.iter().all(|p| region.contains(p)));
        // crude equidistribution: both half-boxes are hit
        let left = pts.iter().filter(|p| p.coord(0) < 0.0).count();
        assert!(left > 16 && left < 48);
    }

    #[test]
    fn task_rng_is_reproducible() {
        use rand::Rng;
        let mut a = task_rng(42, 7);
        let mut b = task_rng(42, 7);
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
    }
}
