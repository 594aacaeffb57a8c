//! Sampled Muckenhoupt constants.
//!
//! For `p > 1` the product `(avg_B w)(avg_B w^{1/(1-p)})^{p-1}` is
//! sampled over low-discrepancy balls; for `p = 1` the dual factor is the
//! essential supremum of `1/w`, approximated from below by `1/min` over
//! quadrature nodes (or computed exactly for symbolic weights). Sampling
//! a supremum cannot overshoot, so finite estimates are lower bounds of
//! the true constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{BBox, Ball};
use crate::quad::{integrate_ball, QuadratureConfig};
use crate::sampling::{halton_in_box, halton_log_uniform};
use crate::weight::Weight;
use crate::{Error, Result};

/// Default blow-up threshold: a sampled product above this which keeps
/// growing under one refinement step is reported as infinite.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MuckenhouptEstimate {
    pub p: f64,
    /// Sampled supremum of the A_p product; `f64::INFINITY` when flagged.
    pub value: f64,
    pub infinite: bool,
    pub samples: usize,
    pub worst_ball: Ball,
}

impl MuckenhouptEstimate {
    pub fn is_infinite(&self) -> bool {
        self.infinite || self.value.is_infinite()
    }
}

/// Estimate the `A_p` constant of `w` over balls sampled in `region`.
/// `p = 1` uses the `A_1` form.
pub fn estimate_muckenhoupt(
    w: &Weight,
    p: f64,
    region: &BBox,
    n_samples: usize,
    cfg: &QuadratureConfig,
    blowup_threshold: f64,
) -> Result<MuckenhouptEstimate> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("exponent {p} must be >= 1")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let n = region.dim();
    w.check_dim(n)?;
    let diam = region.diameter();

    // the dual weight w^{1/(1-p)} for p > 1; a validation failure means
    // the dual power is not locally integrable, i.e. the constant is
    // infinite
    let dual = if p > 1.0 {
        match w.powf(1.0 / (1.0 - p)) {
            Ok(dw) => Some(dw),
            Err(_) => {
                return Ok(MuckenhouptEstimate {
                    p,
                    value: f64::INFINITY,
                    infinite: true,
                    samples: 0,
                    worst_ball: Ball::new(region.center(), diam * 0.5).unwrap(),
                })
            }
        }
    } else {
        None
    };

    let products: Vec<(f64, bool, Ball)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| -> Result<(f64, bool, Ball)> {
            let center = halton_in_box(i, region);
            let radius = halton_log_uniform(i, n, 1e-3 * diam, diam);
            let ball = Ball::new(center, radius)?;
            let (product, infinite) = ball_product(w, dual.as_ref(), p, &ball, cfg)?;
            if infinite {
                return Ok((f64::INFINITY, true, ball));
            }
            if product > blowup_threshold {
                // refine once; still growing => flag as infinite
                let fine = cfg.coarser(cfg.rel_tol * 0.5, cfg.max_cells.saturating_mul(2));
                let (refined, inf2) = ball_product(w, dual.as_ref(), p, &ball, &fine)?;
                if inf2 || refined > product {
                    return Ok((f64::INFINITY, true, ball));
                }
            }
            Ok((product, false, ball))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0usize;
    let mut infinite = false;
    for i in 0..products.len() {
        if products[i].1 {
            infinite = true;
            best = i;
            break;
        }
        if products[i].0 > products[best].0 {
            best = i;
        }
    }
    Ok(MuckenhouptEstimate {
        p,
        value: if infinite {
            f64::INFINITY
        } else {
            products[best].0
        },
        infinite,
        samples: n_samples,
        worst_ball: products[best].2,
    })
}

fn ball_product(
    w: &Weight,
    dual: Option<&Weight>,
    p: f64,
    ball: &Ball,
    cfg: &QuadratureConfig,
) -> Result<(f64, bool)> {
    let vol = ball.volume();
    let direct = integrate_ball(w, ball, cfg)?;
    let avg = direct.value / vol;
    match dual {
        Some(dw) => {
            let dres = integrate_ball(dw, ball, cfg)?;
            if dres.diverging {
                return Ok((f64::INFINITY, true));
            }
            let davg = dres.value / vol;
            Ok((avg * davg.powf(p - 1.0), false))
        }
        None => {
            // A_1: ess sup of 1/w over the ball
            match w.ess_inf_on_ball(ball) {
                Some(inf) if inf == 0.0 => Ok((f64::INFINITY, true)),
                Some(inf) => Ok((avg / inf, false)),
                None => {
                    // fall back to the minimum over quadrature nodes; an
                    // under-estimate of ess sup(1/w), keeping the product
                    // a lower bound
                    if !(direct.node_min > 0.0) || !direct.node_min.is_finite() {
                        return Ok((f64::INFINITY, true));
                    }
                    Ok((avg / direct.node_min, false))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default().coarser(1e-2, 20_000)
    }

    #[test]
    fn constant_weight_is_a1_with_constant_one() {
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let est = estimate_muckenhoupt(&Weight::one(), 1.0, &region, 32, &cfg(), 1e6).unwrap();
        assert!((est.value - 1.0).abs() < 1e-9, "A1 = {}", est.value);
        let est = estimate_muckenhoupt(&Weight::one(), 2.0, &region, 32, &cfg(), 1e6).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "A2 = {}", est.value);
    }

    #[test]
    fn origin_ball_product_for_radial_weight() {
        // closed forms: avg of |x|^{-1} on B(0,r) is 2/r, ess sup of
        // 1/w is r, so the product is exactly 2
        let w = Weight::radial_power(-1.0, Point::zero(2)).unwrap();
        let ball = Ball::new(Point::zero(2), 0.25).unwrap();
        let (product, infinite) = ball_product(&w, None, 1.0, &ball, &cfg()).unwrap();
        assert!(!infinite);
        assert!((product - 2.0).abs() < 1e-10, "product {product}");
    }

    #[test]
    fn radial_weight_estimate_at_least_two() {
        let w = Weight::radial_power(-1.0, Point::zero(2)).unwrap();
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let est = estimate_muckenhoupt(&w, 1.0, &region, 128, &cfg(), 1e6).unwrap();
        assert!(!est.infinite);
        assert!(est.value >= 2.0 - 1e-6, "estimate {}", est.value);
    }

    #[test]
    fn growing_radial_weight_is_not_a1() {
        // ess inf of |x| vanishes on balls containing the origin
        let w = Weight::radial_power(1.0, Point::zero(2)).unwrap();
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        let est = estimate_muckenhoupt(&w, 1.0, &region, 64, &cfg(), 1e6).unwrap();
        assert!(est.is_infinite());
    }

    #[test]
    fn products_are_at_least_one() {
        // Jensen: the A_p product of any weight on any ball is >= 1
        let region = BBox::cube(2, -1.0, 1.0).unwrap();
        for w in [
            Weight::one(),
            Weight::radial_power(-0.5, Point::zero(2)).unwrap(),
            Weight::radial_power(0.5, Point::zero(2)).unwrap(),
        ] {
            let est = estimate_muckenhoupt(&w, 2.0, &region, 48, &cfg(), 1e6).unwrap();
            assert!(est.value >= 1.0 - 1e-6, "estimate {}", est.value);
        }
    }
}
