use divcap::fractal::CantorSpec;
use divcap::quad::{integrate_ball, QuadratureConfig};
use divcap::weight::Weight;
use std::time::Instant;

fn main() {
    let spec = CantorSpec::from_dimension(2, 0.5, 3).unwrap();
    let w = Weight::cantor_weight(spec, 0.25).unwrap();
    let cubes = spec.cubes().unwrap();
    let b = cubes[0].circumscribed_ball();
    for max_cells in [1000usize, 8000, 30000] {
        let cfg = QuadratureConfig { rel_tol: 1e-2, max_cells, ..Default::default() };
        let t0 = Instant::now();
        let r = integrate_ball(&w, &b, &cfg).unwrap();
        println!(
            "cells<={max_cells}: val {:.6e} err {:.2e} cells {} evals {} conv {} {:?}",
            r.value, r.error_est, r.cells, r.evals, r.converged, t0.elapsed()
        );
    }
}
