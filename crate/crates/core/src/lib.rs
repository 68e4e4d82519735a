//! Numerical laboratory for dumbbell-shaped surfaces of revolution.
//!
//! A dumbbell is two round caps of radius `R` joined by a thin cylinder of
//! radius `eps` and length `L` through smooth neck regions. As `eps` shrinks
//! the first nonzero Laplace–Beltrami eigenvalue collapses while the area,
//! the diameter and the `L^p` average of the curvature deficiency stay
//! bounded. The modules here build the surfaces and measure all of those
//! quantities:
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`smoothstep`] | flat-tailed step `s(x)` and stable derivatives |
//! | [`profile`] | profile curve `g_eps`, meridian arc-length grids |
//! | [`geometry`] | Gaussian curvature, area, Gauss–Bonnet, closed-form bounds |
//! | [`integral_curvature`] | `rho_K`, `kbar(p, K)` and the neck majorants |
//! | [`spectrum`] | Fourier-mode Sturm–Liouville eigenvalues |
//! | [`rayleigh`] | plateau/ramp test function and its Rayleigh quotient |
//! | [`claims`] | sampled checks of the step and profile inequalities |
//! | [`sweep`] | one row of measurements per neck radius |

// `!(a <= b)` is used on purpose so that NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod claims;
pub mod error;
pub mod geometry;
pub mod integral_curvature;
pub mod profile;
pub mod quadrature;
pub mod rayleigh;
pub mod smoothstep;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use profile::{DumbbellParams, MeridianGrid, ProfileCurve, RoundSphere};
