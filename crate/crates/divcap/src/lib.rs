//! divcap: numerical estimation of weighted codimension-1 Hausdorff
//! contents, doubling and Muckenhoupt constants, weighted Sobolev
//! capacities and Riesz-potential energies, combined into removability
//! certificates for the divergence equation `div v = 0` in weighted
//! Lebesgue spaces.
//!
//! The crate is organized around a small set of symbolic weight families
//! (constants, radial powers, distance powers to a self-similar corner
//! Cantor set, and products thereof) for which ball integrals, singular
//! loci and essential bounds are computable. Everything downstream —
//! cover sums, Frostman ratios, capacity energies, divergence checks —
//! reduces to adaptive quadrature against these weights.
//!
//! Entry points:
//! - [`weight::Weight`] and [`quad`] for ball integrals and the gauge
//!   `(1/r) ∫_B w`,
//! - [`doubling`] / [`muckenhoupt`] for weight characteristics,
//! - [`fractal::CantorSpec`] for the corner Cantor family,
//! - [`content`] / [`frostman`] for upper and lower content bounds,
//! - [`capacity`] for the variational grid solver and its condenser oracle,
//! - [`potentials`] for Riesz potentials, divergence fields and witness
//!   cutoffs,
//! - [`certify`] and [`config`] for verdicts, parameter sweeps and the
//!   CLI-facing configuration format.

pub mod capacity;
pub mod certify;
pub mod config;
pub mod content;
pub mod doubling;
pub mod fractal;
pub mod frostman;
pub mod geometry;
pub mod measure;
pub mod muckenhoupt;
pub mod potentials;
pub mod quad;
pub mod sampling;
pub mod weight;

mod error;

pub use error::{Error, Result};
