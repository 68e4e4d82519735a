//! Plateau/ramp test function and its Rayleigh quotient.
//!
//! On the full dumbbell, with `x` running from one pole to the other, take
//!
//! ```text
//! f(x) = -c              x <= -x1
//! f(x) = c x / x1        |x| < x1
//! f(x) = c               x >= x1
//! ```
//!
//! It is odd under the mirror, so it has mean zero, and its gradient lives
//! only on the cylinder, where it equals `2c/L`. Hence
//! `∫|∇f|² = 8 pi eps c² / L` while `∫f² >= 4 pi R² c²`, which bounds
//! `lambda1 <= 2 eps / (L R²)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::neck_area;
use crate::profile::{DumbbellParams, MeridianGrid, ProfileCurve};
use crate::quadrature::Quadrature;
use crate::spectrum::ModeOperator;

/// Integrals of the test function with amplitude `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestQuotient {
    pub c: f64,
    /// `∫|∇f|² dS`.
    pub dirichlet: f64,
    /// `∫f² dS`.
    pub mass: f64,
    /// `∫f dS`.
    pub mean: f64,
    pub quotient: f64,
}

/// Value of the test function at signed axial position `x`.
pub fn test_function(params: &DumbbellParams, c: f64, x: f64) -> f64 {
    c * (x / params.x1()).clamp(-1.0, 1.0)
}

pub fn test_quotient(curve: &ProfileCurve, c: f64, quad: &Quadrature) -> Result<TestQuotient> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "test function amplitude {c} must be positive"
        )));
    }
    let p = curve.params();
    let x1 = p.x1();
    let slope = c / x1;
    // |∇f|² dS = (f'/|γ'|)² 2 pi g |γ'| dx; only the cylinder contributes.
    let dirichlet = 2.0
        * quad
            .integrate(
                |x| {
                    let j = curve.jet(x);
                    let speed = j.d1.hypot(1.0);
                    2.0 * PI * j.value * slope * slope / speed
                },
                0.0,
                x1,
            )?
            .value;
    let ramp = |x: f64| {
        let j = curve.jet(x.abs());
        2.0 * PI * j.value * j.d1.hypot(1.0)
    };
    let ramp_sq = quad
        .integrate(|x| test_function(p, c, x).powi(2) * ramp(x), 0.0, x1)?
        .value;
    let ramp_mean = quad
        .integrate_with_breaks(|x| test_function(p, c, x) * ramp(x), &[-x1, 0.0, x1])?
        .value;
    let plateau = neck_area(curve, quad)? + 2.0 * PI * p.radius() * p.radius();
    let mass = 2.0 * (ramp_sq + c * c * plateau);
    // The two plateaus carry -c and +c over congruent halves and cancel.
    Ok(TestQuotient {
        c,
        dirichlet,
        mass,
        mean: ramp_mean,
        quotient: dirichlet / mass,
    })
}

/// `2 eps / (L R²)`.
pub fn rayleigh_bound(params: &DumbbellParams) -> f64 {
    2.0 * params.eps() / (params.length() * params.radius().powi(2))
}

/// `(eps, 2 eps / (L R²))` for a descending list of neck radii.
pub fn sweep_bound(radius: f64, length: f64, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParams("neck radii must be positive".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams(
            "neck radii must be strictly descending".into(),
        ));
    }
    eps.iter()
        .map(|&e| Ok((e, rayleigh_bound(&DumbbellParams::new(radius, length, e)?))))
        .collect()
}

/// Test function sampled at the interior grid nodes.
///
/// On the cylinder the arc length from the plane of symmetry equals `x`;
/// beyond it the function is constant, so the node offset alone decides
/// the value.
pub fn discrete_test_vector(grid: &MeridianGrid, params: &DumbbellParams, c: f64) -> Vec<f64> {
    (1..=grid.n())
        .map(|j| test_function(params, c, grid.center_offset(j)))
        .collect()
}

/// Discrete Rayleigh quotient of [`discrete_test_vector`] for the `m = 0`
/// operator.
pub fn discrete_test_quotient(grid: &MeridianGrid, params: &DumbbellParams) -> f64 {
    let f = discrete_test_vector(grid, params, 1.0);
    ModeOperator::for_grid(grid, 0).rayleigh_quotient(&f)
}
