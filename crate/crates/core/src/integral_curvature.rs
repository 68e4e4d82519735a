//! Integral curvature norms.
//!
//! On a surface the smallest Ricci eigenvalue is the Gaussian curvature, so
//! the deficiency below level `K` is `rho_K = max(K - kappa, 0)` and
//!
//! ```text
//! kbar(p, K) = ( (1/area) ∫ rho_K^p dS )^(1/p).
//! ```
//!
//! [`neck_bound_integrals`] evaluates the eps-independent majorants used to
//! bound `kbar(3/2, 0)` uniformly along the family.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{neck_breaks, surface_area, NECK_GRADING};
use crate::profile::{DumbbellParams, Jet, ProfileCurve, RoundSphere};
use crate::quadrature::{graded_breaks, Quadrature};
use crate::smoothstep::{ln_step_derivative, step_eval};

/// Exponent used when none is given.
pub const DEFAULT_EXPONENT: f64 = 1.5;

/// Curvature deficiency below `level`.
#[inline]
pub fn rho_k(kappa: f64, level: f64) -> f64 {
    (level - kappa).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralCurvatureResult {
    pub p: f64,
    pub level: f64,
    pub area: f64,
    pub rho_integral: f64,
    pub kbar: f64,
}

fn check_exponents(p: f64, level: f64) -> Result<()> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidParams(format!(
            "exponent p = {p} must lie in (1, 2]"
        )));
    }
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "curvature level K = {level} must be >= 0"
        )));
    }
    Ok(())
}

fn finish(p: f64, level: f64, area: f64, rho_integral: f64) -> IntegralCurvatureResult {
    IntegralCurvatureResult {
        p,
        level,
        area,
        rho_integral,
        kbar: (rho_integral / area).powf(1.0 / p),
    }
}

/// `kbar(p, K)` of a dumbbell.
pub fn kbar(
    curve: &ProfileCurve,
    p: f64,
    level: f64,
    quad: &Quadrature,
) -> Result<IntegralCurvatureResult> {
    check_exponents(p, level)?;
    let params = curve.params();
    let area = surface_area(curve, quad)?;
    let density = |x: f64| {
        let j = curve.jet(x);
        let q = 1.0 + j.d1 * j.d1;
        let kappa = -j.d2 / (j.value * q * q);
        let rho = rho_k(kappa, level);
        if rho == 0.0 {
            0.0
        } else {
            rho.powf(p) * 2.0 * PI * j.value * q.sqrt()
        }
    };
    let cylinder = level.powf(p) * 2.0 * PI * params.eps() * params.x1();
    let neck = quad
        .integrate_with_breaks(density, &neck_breaks(params))?
        .value;
    let r = params.radius();
    let cap = rho_k(1.0 / (r * r), level).powf(p) * 2.0 * PI * r * r;
    Ok(finish(p, level, area, 2.0 * (cylinder + neck + cap)))
}

/// `kbar(p, K)` of a round sphere.
pub fn sphere_kbar(
    sphere: &RoundSphere,
    p: f64,
    level: f64,
    quad: &Quadrature,
) -> Result<IntegralCurvatureResult> {
    check_exponents(p, level)?;
    let r = sphere.radius;
    let rho = rho_k(1.0 / (r * r), level).powf(p);
    let area = quad
        .integrate(|t| 2.0 * PI * r * r * t.sin(), 0.0, PI)?
        .value;
    let integral = quad
        .integrate(|t| rho * 2.0 * PI * r * r * t.sin(), 0.0, PI)?
        .value;
    Ok(finish(p, level, area, integral))
}

/// The eps-independent majorant `U(x)` of `g_eps''` near `x1`, built on the
/// pinched profile `g_0`:
///
/// ```text
/// U(x) = 4/(sqrt(3) R) c0'(x) s'(2(x-x1)/R) + 4/(3 R^2) c0(x) s''(2(x-x1)/R)
/// ```
///
/// where `c0` is the circle of radius `R` centred at `(x1 + R, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeckMajorant {
    radius: f64,
    x1: f64,
}

impl NeckMajorant {
    pub fn new(params: &DumbbellParams) -> Self {
        Self {
            radius: params.radius(),
            x1: params.x1(),
        }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    /// `x1 + R/4`.
    pub fn x_m(&self) -> f64 {
        self.x1 + 0.25 * self.radius
    }

    fn circle(&self, x: f64) -> Jet {
        let r = self.radius;
        let d = x - self.x1 - r;
        let c = ((r - d) * (r + d)).max(0.0).sqrt();
        Jet::new(c, -d / c, -(r * r) / (c * c * c))
    }

    fn coefficients(&self) -> (f64, f64) {
        let r = self.radius;
        (4.0 / (3f64.sqrt() * r), 4.0 / (3.0 * r * r))
    }

    fn check(&self, x: f64) -> Result<()> {
        if !(x > self.x1 && x <= self.x_m()) {
            return Err(Error::Domain {
                what: "neck majorant",
                value: x,
            });
        }
        Ok(())
    }

    /// `U(x)` evaluated directly; underflows to 0 close to `x1`.
    pub fn u(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (a, b) = self.coefficients();
        let c = self.circle(x);
        let st = step_eval(2.0 * (x - self.x1) / self.radius);
        Ok(a * c.d1 * st.s1 + b * c.value * st.s2)
    }

    /// `ln U(x)`, resolvable down to `x - x1 ~ 1e-6 R`.
    pub fn ln_u(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (a, b) = self.coefficients();
        let c = self.circle(x);
        let y = 2.0 * (x - self.x1) / self.radius;
        let ln_p = a.ln() + c.d1.ln() + ln_step_derivative(1, y).expect("0 < y <= 1/2");
        match ln_step_derivative(2, y) {
            Some(ln_s2) => {
                let ln_q = b.ln() + c.value.ln() + ln_s2;
                let hi = ln_p.max(ln_q);
                Ok(hi + ((ln_p - hi).exp() + (ln_q - hi).exp()).ln())
            }
            // s''(y) <= 0 only at y = 1/2, where nothing underflows
            None => Ok(self.u(x)?.ln()),
        }
    }

    /// `ln( U^3 / (c0 s((x - x1)/R)) )`.
    pub fn ln_ratio(&self, x: f64) -> Result<f64> {
        let ln_s = ln_step_derivative(0, (x - self.x1) / self.radius).ok_or(Error::Domain {
            what: "neck majorant",
            value: x,
        })?;
        Ok(3.0 * self.ln_u(x)? - self.circle(x).value.ln() - ln_s)
    }

    /// `U^3 / (c0 s((x - x1)/R))` without logarithms.
    pub fn ratio_naive(&self, x: f64) -> Result<f64> {
        let u = self.u(x)?;
        Ok(u * u * u / (self.circle(x).value * step_eval((x - self.x1) / self.radius).s))
    }

    /// Integrand of `M1`, `sqrt(U^3 / (c0 s))`, zero at and below `x1`.
    pub fn m1_integrand(&self, x: f64) -> f64 {
        if x <= self.x1 {
            return 0.0;
        }
        self.ln_ratio(x)
            .map(|l| (0.5 * l).exp())
            .unwrap_or(f64::NAN)
    }
}

/// Majorants of the negative curvature on one neck, split at `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeckBounds {
    pub xi: f64,
    /// `∫_{x1}^{xi} sqrt(U^3 / (c0 s((x - x1)/R))) dx`, independent of eps.
    pub m1: f64,
    /// `∫_{xi}^{x1 + R} sqrt(|g''|^3 / g) dx`.
    pub m2: f64,
    /// `∫_{x1}^{xi} sqrt(|g''|^3 / g) dx`, bounded by `m1`.
    pub inner: f64,
    /// `∫_{xi}^{x2} sqrt(|g''|^3 / g) dx`, bounded by `m2`.
    pub outer: f64,
    /// `∫ (kappa^-)^{3/2} dS` over one neck.
    pub neck_norm: f64,
    /// `[(m1 + m2) / (2 R^2)]^{2/3}`.
    pub kbar_majorant: f64,
}

impl NeckBounds {
    /// `2 pi (m1 + m2)`.
    pub fn neck_majorant(&self) -> f64 {
        2.0 * PI * (self.m1 + self.m2)
    }

    /// Every link of
    /// `neck_norm <= 2 pi (inner + outer) <= 2 pi (m1 + m2)` holds.
    pub fn chain_holds(&self) -> bool {
        let tol = 1e-9 * self.neck_majorant();
        self.neck_norm <= 2.0 * PI * (self.inner + self.outer) + tol
            && self.inner <= self.m1 + tol
            && self.outer <= self.m2 + tol
    }
}

/// Split point `x1 + R/8` used when none is given.
pub fn default_split(params: &DumbbellParams) -> f64 {
    params.x1() + 0.125 * params.radius()
}

/// Evaluates `M1`, `M2` and the directly integrated neck quantities they
/// bound. Requires `x1 < xi <= x1 + R/4`.
pub fn neck_bound_integrals(
    params: &DumbbellParams,
    xi: f64,
    quad: &Quadrature,
) -> Result<NeckBounds> {
    let (x1, x2) = (params.x1(), params.x2());
    let r = params.radius();
    if !(xi > x1 && xi <= params.x_m()) {
        return Err(Error::Domain {
            what: "neck split abscissa",
            value: xi,
        });
    }
    let majorant = NeckMajorant::new(params);
    let curve = ProfileCurve::new(*params);
    let sqrt_cube_over = |x: f64| {
        let j = curve.jet(x);
        (j.d2.abs().powi(3) / j.value).sqrt()
    };

    let m1 = quad
        .integrate_with_breaks(
            |x| majorant.m1_integrand(x),
            &graded_breaks(x1, xi, NECK_GRADING),
        )?
        .value;
    let m2 = quad
        .integrate_with_breaks(sqrt_cube_over, &[xi, x2, x1 + r])?
        .value;
    let inner = quad
        .integrate_with_breaks(sqrt_cube_over, &graded_breaks(x1, xi, NECK_GRADING))?
        .value;
    let outer = quad.integrate(sqrt_cube_over, xi, x2)?.value;
    let neck_norm = quad
        .integrate_with_breaks(
            |x| {
                let j = curve.jet(x);
                let q = 1.0 + j.d1 * j.d1;
                let kappa = -j.d2 / (j.value * q * q);
                rho_k(kappa, 0.0).powf(1.5) * 2.0 * PI * j.value * q.sqrt()
            },
            &neck_breaks(params),
        )?
        .value;
    Ok(NeckBounds {
        xi,
        m1,
        m2,
        inner,
        outer,
        neck_norm,
        kbar_majorant: ((m1 + m2) / (2.0 * r * r)).powf(2.0 / 3.0),
    })
}
