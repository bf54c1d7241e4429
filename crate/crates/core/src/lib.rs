//! `folmetlab`: a desk-scale laboratory for the leafwise Poincaré metric of
//! hyperbolic singular holomorphic foliations on domains of `C^N`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: symbolic open sets, grid sampling, Hausdorff and `ρ`
//!   distances, kernels of domain sequences and kernel convergence.
//! - [`planar`]: Poincaré densities (curvature −1) of planar model domains
//!   and the covering maps that relate them.
//! - [`foliation`]: polynomial vector fields, singular sets, catalog leaf
//!   charts, complex-time leaf tracing and the transversal-type cone test.
//! - [`eta`]: the modulus of uniformization `η`, exactly on catalog leaves
//!   and by a certified lower/upper sandwich elsewhere.
//! - [`lab`]: defective sets, removability, pointwise and uniform
//!   convergence experiments, Hausdorff ⇒ kernel checks and the
//!   dense-defective construction.
//! - [`config`] and [`report`]: the structured config syntax, experiment
//!   dispatch, CSV and SVG output.
//!
//! Runnable walkthroughs live in `examples/`; the `folmetlab` binary is a
//! thin batch front end over [`report::run_config`].

pub mod config;
pub mod error;
pub mod eta;
pub mod foliation;
pub mod geometry;
pub mod lab;
pub mod planar;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
