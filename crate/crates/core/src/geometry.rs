//! Curvature, area and length of dumbbell surfaces.
//!
//! For the surface generated by rotating `g` about the `x` axis,
//!
//! ```text
//! kappa = -g'' / (g (1 + g'^2)^2),      dS/dx = 2 pi g sqrt(1 + g'^2).
//! ```
//!
//! The caps beyond `x2` are exact hemispheres, so their contributions are
//! taken in closed form instead of integrating up to the pole, where `g`
//! vanishes and `g'` blows up.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{DumbbellParams, HalfMeridian, ProfileCurve, RoundSphere};
use crate::quadrature::{graded_breaks, Quadrature};

/// Levels of geometric grading toward `x1` used for neck integrals.
pub(crate) const NECK_GRADING: u32 = 24;

/// Gaussian curvature at `x`; undefined at the poles.
pub fn gaussian_curvature(curve: &ProfileCurve, x: f64) -> Result<f64> {
    let j = curve.eval(x)?;
    if !(j.value > 0.0) {
        return Err(Error::Domain {
            what: "gaussian_curvature at a pole",
            value: x,
        });
    }
    let q = 1.0 + j.d1 * j.d1;
    Ok(-j.d2 / (j.value * q * q))
}

/// Area density `dS/dx = 2 pi g sqrt(1 + g'^2)`.
pub fn area_element(curve: &ProfileCurve, x: f64) -> Result<f64> {
    let j = curve.eval(x)?;
    if j.value == 0.0 {
        return Ok(2.0 * PI * curve.params().radius());
    }
    Ok(2.0 * PI * j.value * j.d1.hypot(1.0))
}

pub(crate) fn neck_breaks(params: &DumbbellParams) -> Vec<f64> {
    graded_breaks(params.x1(), params.x2(), NECK_GRADING)
}

/// Area of one neck, `x1 <= x <= x2`.
pub fn neck_area(curve: &ProfileCurve, quad: &Quadrature) -> Result<f64> {
    let est = quad.integrate_with_breaks(
        |x| {
            let j = curve.jet(x);
            2.0 * PI * j.value * j.d1.hypot(1.0)
        },
        &neck_breaks(curve.params()),
    )?;
    Ok(est.value)
}

/// Total surface area of the closed dumbbell.
pub fn surface_area(curve: &ProfileCurve, quad: &Quadrature) -> Result<f64> {
    let p = curve.params();
    let cylinder = quad.integrate(|x| area_element(curve, x).unwrap_or(f64::NAN), 0.0, p.x1())?;
    let hemisphere = 2.0 * PI * p.radius() * p.radius();
    Ok(2.0 * (cylinder.value + neck_area(curve, quad)? + hemisphere))
}

/// Length of one neck, by adaptive quadrature of `sqrt(1 + g'^2)`.
pub fn neck_length(curve: &ProfileCurve, quad: &Quadrature) -> Result<f64> {
    Ok(quad
        .integrate_with_breaks(|x| curve.speed(x), &neck_breaks(curve.params()))?
        .value)
}

/// Pole-to-pole meridian length `L + 2 * neck + pi R`.
pub fn meridian_length(curve: &ProfileCurve, quad: &Quadrature) -> Result<f64> {
    let p = curve.params();
    Ok(p.length() + 2.0 * neck_length(curve, quad)? + PI * p.radius())
}

/// `∫ kappa dS` over the closed surface; `4 pi` for a topological sphere.
pub fn gauss_bonnet_total(curve: &ProfileCurve, quad: &Quadrature) -> Result<f64> {
    let neck = quad.integrate_with_breaks(
        |x| {
            let j = curve.jet(x);
            let q = 1.0 + j.d1 * j.d1;
            // kappa * dS/dx with the factor g cancelled
            -2.0 * PI * j.d2 / (q * q.sqrt())
        },
        &neck_breaks(curve.params()),
    )?;
    // a hemisphere carries 2 pi of curvature; the cylinder carries none
    Ok(2.0 * (neck.value + 2.0 * PI))
}

/// Area of a round sphere by quadrature over the polar angle.
pub fn sphere_area(sphere: &RoundSphere, quad: &Quadrature) -> Result<f64> {
    let r = sphere.radius;
    Ok(quad
        .integrate(|theta| 2.0 * PI * r * theta.sin() * r, 0.0, PI)?
        .value)
}

/// Total curvature of a round sphere by quadrature over the polar angle.
pub fn sphere_gauss_bonnet(sphere: &RoundSphere, quad: &Quadrature) -> Result<f64> {
    let r = sphere.radius;
    Ok(quad
        .integrate(|theta| 2.0 * PI * theta.sin() * r * r / (r * r), 0.0, PI)?
        .value)
}

/// Closed-form diameter bound `(2 pi + 8) R + 2 L`.
pub fn diameter_bound(params: &DumbbellParams) -> f64 {
    (2.0 * PI + 8.0) * params.radius() + 2.0 * params.length()
}

/// Closed-form area bound `10 pi R^2 + 2 pi L`.
pub fn area_bound(params: &DumbbellParams) -> f64 {
    10.0 * PI * params.radius() * params.radius() + 2.0 * PI * params.length()
}

/// Length bound `(b - a) + |g(b) - g(a)|` for a monotone piece, applied to
/// the neck.
pub fn neck_length_bound(params: &DumbbellParams) -> f64 {
    params.neck_width() + (params.radius() - params.eps())
}

/// Area bound `2 pi max(g) (b - a) + pi |g(b)^2 - g(a)^2|` for the neck.
pub fn neck_area_bound(params: &DumbbellParams) -> f64 {
    let (r, e) = (params.radius(), params.eps());
    2.0 * PI * r * params.neck_width() + PI * (r * r - e * e)
}

/// Area, lengths, total curvature and the closed-form bounds of one surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub area: f64,
    pub meridian_length: f64,
    pub diam_bound: f64,
    pub area_bound: f64,
    pub gauss_bonnet: f64,
    pub neck_length: f64,
    pub neck_length_bound: f64,
    pub neck_area: f64,
    pub neck_area_bound: f64,
}

/// Assembles [`GeometrySummary`]; needs `eps <= 1` and checks each neck
/// against the monotone-piece length and area bounds.
pub fn bounds_summary(curve: &ProfileCurve, quad: &Quadrature) -> Result<GeometrySummary> {
    let p = curve.params();
    if p.eps() > 1.0 {
        return Err(Error::Hypothesis(format!(
            "closed-form bounds need eps <= 1, got {}",
            p.eps()
        )));
    }
    let neck_len = neck_length(curve, quad)?;
    let neck_a = neck_area(curve, quad)?;
    let summary = GeometrySummary {
        area: surface_area(curve, quad)?,
        meridian_length: p.length() + 2.0 * neck_len + PI * p.radius(),
        diam_bound: diameter_bound(p),
        area_bound: area_bound(p),
        gauss_bonnet: gauss_bonnet_total(curve, quad)?,
        neck_length: neck_len,
        neck_length_bound: neck_length_bound(p),
        neck_area: neck_a,
        neck_area_bound: neck_area_bound(p),
    };
    if summary.neck_length > summary.neck_length_bound {
        return Err(Error::Hypothesis(format!(
            "neck length {} exceeds monotone-piece bound {}",
            summary.neck_length, summary.neck_length_bound
        )));
    }
    if summary.neck_area > summary.neck_area_bound {
        return Err(Error::Hypothesis(format!(
            "neck area {} exceeds monotone-piece bound {}",
            summary.neck_area, summary.neck_area_bound
        )));
    }
    Ok(summary)
}

/// Neck length from the tabulated arc-length map, an independent route to
/// [`neck_length`].
pub fn tabulated_neck_length(curve: &ProfileCurve) -> f64 {
    HalfMeridian::new(*curve).neck_length()
}
