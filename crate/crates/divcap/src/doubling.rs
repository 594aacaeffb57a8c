//! Sampled estimation of the doubling constant and of the growth trend
//! of the ball gauge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, Ball};
use crate::quad::{integrate_ball, QuadratureConfig};
use crate::sampling::{halton_in_box, halton_log_uniform};
use crate::weight::Weight;
use crate::{Error, Result};

/// Sampled lower bound for the doubling constant of a weight: the
/// supremum of `∫_{B(x,2r)} w / ∫_{B(x,r)} w` cannot be overshot by
/// sampling, so the estimate is a lower bound for the true constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DoublingEstimate {
    pub c_d: f64,
    /// `log2(c_d)`, the doubling dimension of the weighted space.
    pub s_d: f64,
    pub samples: usize,
    pub region: BBox,
    pub worst_ball: Ball,
}

/// Radii are drawn log-uniformly from `[RADIUS_SPAN_LOW * diam, diam]`.
const RADIUS_SPAN_LOW: f64 = 1e-3;

/// Estimate the doubling constant by a deterministic low-discrepancy
/// sweep of `(center, radius)` pairs in `region`.
pub fn estimate_doubling(
    w: &Weight,
    region: &BBox,
    n_samples: usize,
    cfg: &QuadratureConfig,
) -> Result<DoublingEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let n = region.dim();
    w.check_dim(n)?;
    let diam = region.diameter();

    let ratios: Vec<(f64, Ball)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, Ball)> {
            let center = halton_in_box(i, region);
            let radius = halton_log_uniform(i, n, RADIUS_SPAN_LOW * diam, diam);
            let inner = Ball::new(center, radius)?;
            let outer = inner.scaled(2.0);
            let small = integrate_ball(w, &inner, cfg)?;
            let big = integrate_ball(w, &outer, cfg)?;
            if !(small.value > 0.0) {
                return Err(Error::Integration {
                    center: center.coords().to_vec(),
                    radius,
                    reason: "vanishing inner integral".into(),
                });
            }
            Ok((big.value / small.value, inner))
        })
        .collect::<Result<Vec<_>>>()?;

    // deterministic reduction: first index attaining the max wins
    let mut best = 0usize;
    for i in 1..ratios.len() {
        if ratios[i].0 > ratios[best].0 {
            best = i;
        }
    }
    let c_d = ratios[best].0;
    Ok(DoublingEstimate {
        c_d,
        s_d: c_d.log2(),
        samples: n_samples,
        region: *region,
        worst_ball: ratios[best].1,
    })
}

/// Trend of the gauge `(1/r) ∫_{B(x,r)} w` as `r` grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Diverging,
    Bounded,
    Undecided,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub slope: f64,
    pub trend: Trend,
    /// `(r, gauge)` pairs entering the fit (the largest decade).
    pub fitted_points: Vec<(f64, f64)>,
}

/// Fit `log gauge` against `log r` over the largest decade of the given
/// radii and classify the trend. `margin` is the slope threshold
/// separating "diverging" from "bounded".
pub fn check_growth(
    w: &Weight,
    x: &crate::geometry::Point,
    radii: &[f64],
    margin: f64,
    cfg: &QuadratureConfig,
) -> Result<GrowthReport> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii".into()));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rmin = sorted[0];
    let rmax = *sorted.last().unwrap();
    if !(rmin > 0.0) || rmax / rmin < 100.0 {
        return Err(Error::InvalidInput(
            "radii must span at least two decades".into(),
        ));
    }

    let gauges: Vec<(f64, f64)> = sorted
        .par_iter()
        .map(|&r| -> Result<(f64, f64)> {
            let ball = Ball::new(*x, r)?;
            let g = crate::quad::gauge(w, &ball, cfg)?;
            Ok((r, g.value))
        })
        .collect::<Result<Vec<_>>>()?;

    let top: Vec<(f64, f64)> = gauges
        .iter()
        .copied()
        .filter(|(r, g)| *r >= rmax / 10.0 && *g > 0.0)
        .collect();
    if top.len() < 2 {
        return Ok(GrowthReport {
            slope: 0.0,
            trend: Trend::Undecided,
            fitted_points: top,
        });
    }
    let slope = log_log_slope(&top);
    let trend = if slope > margin {
        Trend::Diverging
    } else if slope.abs() <= margin {
        Trend::Bounded
    } else {
        Trend::Undecided
    };
    Ok(GrowthReport {
        slope,
        trend,
        fitted_points: top,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn decades(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
            .collect()
    }

    #[test]
    fn constant_weight_doubles_like_volume() {
        for n in [2usize, 3] {
            let region = BBox::cube(n, -1.0, 1.0).unwrap();
            let est = estimate_doubling(&Weight::one(), &region, 16, &cfg()).unwrap();
            let expect = 2f64.powi(n as i32);
            assert!(
                (est.c_d - expect).abs() / expect < 1e-10,
                "n={n}: {}",
                est.c_d
            );
            assert!((est.s_d - n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn origin_ratio_for_radial_weight() {
        // closed form: ratio at origin-centered balls is 2^{n+eta}
        let w = Weight::radial_power(-1.0, Point::zero(2)).unwrap();
        let inner = Ball::new(Point::zero(2), 0.5).unwrap();
        let outer = inner.scaled(2.0);
        let a = integrate_ball(&w, &inner, &cfg()).unwrap().value;
        let b = integrate_ball(&w, &outer, &cfg()).unwrap().value;
        assert!((b / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn radial_weight_estimate_band() {
        let w = Weight::radial_power(-1.0, Point::zero(2)).unwrap();
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let est = estimate_doubling(&w, &region, 128, &cfg().coarser(1e-2, 20_000)).unwrap();
        assert!(
            est.c_d >= 3.5 && est.c_d <= 8.0,
            "estimate {} outside [3.5, 8]",
            est.c_d
        );
    }

    #[test]
    fn estimates_grow_with_samples() {
        let w = Weight::radial_power(-0.5, Point::zero(2)).unwrap();
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let small = estimate_doubling(&w, &region, 8, &cfg().coarser(1e-2, 20_000)).unwrap();
        let large = estimate_doubling(&w, &region, 32, &cfg().coarser(1e-2, 20_000)).unwrap();
        assert!(large.c_d >= small.c_d - 1e-12);
    }

    #[test]
    fn doubling_iteration_bound() {
        // iterated inequality with a 1.05 safety factor on the sampled
        // constant
        let w = Weight::radial_power(-0.5, Point::zero(2)).unwrap();
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let est = estimate_doubling(&w, &region, 64, &cfg().coarser(1e-2, 20_000)).unwrap();
        let c = est.c_d * 1.05;
        let s = c.log2();
        let q = cfg().coarser(1e-3, 40_000);
        for i in 0..8u64 {
            let x = halton_in_box(i, &region);
            let r = halton_log_uniform(i, 2, 0.05, 0.5);
            let base = integrate_ball(&w, &Ball::new(x, r).unwrap(), &q).unwrap().value;
            for t in [2.0f64, 4.0, 8.0] {
                let big = integrate_ball(&w, &Ball::new(x, t * r).unwrap(), &q)
                    .unwrap()
                    .value;
                assert!(
                    big <= c * t.powf(s) * base * 1.02,
                    "iterate bound failed at x={:?} r={r} t={t}",
                    x.coords()
                );
            }
        }
    }

    #[test]
    fn growth_trends_for_radial_weights() {
        let radii = decades(1.0, 1000.0, 12);
        // h = pi r for the unit weight in the plane: diverging, slope 1
        let g = check_growth(&Weight::one(), &Point::zero(2), &radii, 0.1, &cfg()).unwrap();
        assert_eq!(g.trend, Trend::Diverging);
        assert!((g.slope - 1.0).abs() < 0.05);
        // eta = -1: gauge constant, bounded
        let w = Weight::radial_power(-1.0, Point::zero(2)).unwrap();
        let g = check_growth(&w, &Point::zero(2), &radii, 0.1, &cfg()).unwrap();
        assert_eq!(g.trend, Trend::Bounded);
        assert!(g.slope.abs() < 0.05);
        // eta = -1/2: slope 1/2
        let w = Weight::radial_power(-0.5, Point::zero(2)).unwrap();
        let g = check_growth(&w, &Point::zero(2), &radii, 0.1, &cfg()).unwrap();
        assert_eq!(g.trend, Trend::Diverging);
        assert!((g.slope - 0.5).abs() < 0.05);
    }

    #[test]
    fn growth_needs_two_decades() {
        let radii = vec![1.0, 2.0, 4.0];
        assert!(check_growth(&Weight::one(), &Point::zero(2), &radii, 0.1, &cfg()).is_err());
    }
}
