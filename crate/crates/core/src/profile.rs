//! Dumbbell profile curves and meridian grids.
//!
//! The right half of the profile, for `x >= 0`, is
//!
//! ```text
//! g(x) = eps                                        0 <= x < x1
//! g(x) = eps + (c(x) - eps) s((x - x1) / w)         x1 <= x <= x2
//! g(x) = c(x)                                       x2 < x <= x2 + R
//! ```
//!
//! with `x1 = L/2`, `w = sqrt(R^2 - eps^2)`, `x2 = x1 + w` and `c` the upper
//! semicircle of radius `R` centred at `(x2, 0)`, so `c(x1) = eps`. The
//! left half is the mirror image.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_panel;
use crate::smoothstep::{step_eval, step_log_ratios};

/// Smallest interior node count accepted for a meridian grid.
pub const MIN_GRID_NODES: usize = 100;
/// Interior node count used when none is given.
pub const DEFAULT_GRID_NODES: usize = 4000;

/// A value with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Self { value, d1, d2 }
    }
}

/// Cap radius `R`, cylinder length `L` and neck radius `eps` of one dumbbell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DumbbellParams {
    radius: f64,
    length: f64,
    eps: f64,
}

impl DumbbellParams {
    /// Requires `R > 0`, `L > 0` and `0 < eps < R/2`.
    pub fn new(radius: f64, length: f64, eps: f64) -> Result<Self> {
        Self::check_frame(radius, length)?;
        if !(eps > 0.0 && eps < 0.5 * radius) {
            return Err(Error::InvalidParams(format!(
                "neck radius {eps} must lie in (0, R/2) = (0, {})",
                0.5 * radius
            )));
        }
        Ok(Self {
            radius,
            length,
            eps,
        })
    }

    /// The `eps -> 0` limit, whose neck pinches to a point at `x1`.
    pub fn pinched(radius: f64, length: f64) -> Result<Self> {
        Self::check_frame(radius, length)?;
        Ok(Self {
            radius,
            length,
            eps: 0.0,
        })
    }

    /// Member `i` of the family `eps = 1/i`.
    pub fn from_index(radius: f64, length: f64, index: u32) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidParams("family index must be positive".into()));
        }
        Self::new(radius, length, 1.0 / f64::from(index))
    }

    fn check_frame(radius: f64, length: f64) -> Result<()> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "cap radius {radius} must be positive"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "cylinder length {length} must be positive"
            )));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// End of the cylinder, `L/2`.
    pub fn x1(&self) -> f64 {
        0.5 * self.length
    }

    /// Width of the neck, `sqrt(R^2 - eps^2)`.
    pub fn neck_width(&self) -> f64 {
        ((self.radius - self.eps) * (self.radius + self.eps)).sqrt()
    }

    /// Start of the pure cap, `x1 + sqrt(R^2 - eps^2)`.
    pub fn x2(&self) -> f64 {
        self.x1() + self.neck_width()
    }

    /// Abscissa of the pole, `x2 + R`.
    pub fn pole(&self) -> f64 {
        self.x2() + self.radius
    }

    /// `x1 + R/4`, below which the neck is convex for every `eps < R/2`.
    pub fn x_m(&self) -> f64 {
        self.x1() + 0.25 * self.radius
    }

    /// Same frame, different neck radius.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.radius, self.length, eps)
    }
}

/// Semicircle `c(x) = sqrt(R^2 - (x - x2)^2)` and its derivatives on
/// `[x1, x2 + R]`.
pub fn semicircle_eval(params: &DumbbellParams, x: f64) -> Result<Jet> {
    if !(x >= params.x1() && x <= params.pole()) {
        return Err(Error::Domain {
            what: "semicircle_eval",
            value: x,
        });
    }
    Ok(circle_jet(params.radius, x - params.x2()))
}

/// Circle of radius `r` at offset `d` from its centre.
fn circle_jet(r: f64, d: f64) -> Jet {
    let c = ((r - d) * (r + d)).max(0.0).sqrt();
    Jet::new(c, -d / c, -(r * r) / (c * c * c))
}

/// Which piece of the profile an abscissa falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Cylinder,
    Neck,
    Cap,
}

/// The right half of a dumbbell profile, evaluable with two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileCurve {
    params: DumbbellParams,
}

impl ProfileCurve {
    pub fn new(params: DumbbellParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &DumbbellParams {
        &self.params
    }

    pub fn region(&self, x: f64) -> Region {
        let p = &self.params;
        if x < p.x1() {
            Region::Cylinder
        } else if x <= p.x2() {
            Region::Neck
        } else {
            Region::Cap
        }
    }

    /// `(g, g', g'')` at `x` in `[0, x2 + R]`.
    pub fn eval(&self, x: f64) -> Result<Jet> {
        if !(x >= 0.0 && x <= self.params.pole()) {
            return Err(Error::Domain {
                what: "profile_eval",
                value: x,
            });
        }
        Ok(self.jet(x))
    }

    /// Same as [`eval`](Self::eval) on the mirrored profile, `x` in
    /// `[-(x2 + R), x2 + R]`. Derivatives are with respect to `x`.
    pub fn eval_mirrored(&self, x: f64) -> Result<Jet> {
        let j = self.eval(x.abs())?;
        Ok(if x < 0.0 {
            Jet::new(j.value, -j.d1, j.d2)
        } else {
            j
        })
    }

    pub(crate) fn jet(&self, x: f64) -> Jet {
        let p = &self.params;
        let eps = p.eps;
        match self.region(x) {
            Region::Cylinder => Jet::new(eps, 0.0, 0.0),
            Region::Neck => {
                let w = p.neck_width();
                let c = circle_jet(p.radius, x - p.x2());
                let st = step_eval((x - p.x1()) / w);
                let lift = c.value - eps;
                Jet::new(
                    eps + lift * st.s,
                    c.d1 * st.s + lift * st.s1 / w,
                    c.d2 * st.s + 2.0 * c.d1 * st.s1 / w + lift * st.s2 / (w * w),
                )
            }
            Region::Cap => circle_jet(p.radius, x - p.x2()),
        }
    }

    /// `g''(x) / s(x*)` on the open neck, `x* = (x - x1)/w`.
    ///
    /// Has the sign of `g''` but stays resolvable next to `x1`, where `g''`
    /// itself underflows.
    pub fn neck_curvature_ratio(&self, x: f64) -> Result<f64> {
        let p = &self.params;
        if !(x > p.x1() && x < p.x2()) {
            return Err(Error::Domain {
                what: "neck_curvature_ratio",
                value: x,
            });
        }
        let w = p.neck_width();
        let c = circle_jet(p.radius, x - p.x2());
        let (d1, d2) = step_log_ratios((x - p.x1()) / w)?;
        Ok(c.d2 + 2.0 * c.d1 * d1 / w + (c.value - p.eps) * d2 / (w * w))
    }

    /// Arc-length density `sqrt(1 + g'^2)`.
    pub(crate) fn speed(&self, x: f64) -> f64 {
        self.jet(x).d1.hypot(1.0)
    }
}

/// Half of a meridian, parametrised by arc length `sigma` measured from the
/// plane of mirror symmetry (`sigma = 0`) to the pole.
pub trait Meridian: fmt::Debug + Send + Sync {
    fn half_length(&self) -> f64;
    /// Distance to the axis at arc length `sigma` in `[0, half_length]`.
    fn radius_at(&self, sigma: f64) -> f64;
}

/// Round sphere of the given radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundSphere {
    pub radius: f64,
}

impl RoundSphere {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sphere radius {radius} must be positive"
            )));
        }
        Ok(Self { radius })
    }

    pub fn meridian(&self, n: usize) -> Result<MeridianGrid> {
        MeridianGrid::build(Arc::new(*self), n)
    }
}

impl Meridian for RoundSphere {
    fn half_length(&self) -> f64 {
        0.5 * std::f64::consts::PI * self.radius
    }

    fn radius_at(&self, sigma: f64) -> f64 {
        (self.radius * (sigma / self.radius).cos()).max(0.0)
    }
}

const NECK_PANELS: usize = 2048;

/// Arc-length parametrisation of one dumbbell half.
///
/// The neck is tabulated by 15-point Gauss–Legendre panels; a target arc
/// length is located by binary search in the cumulative table and then
/// inverted inside its panel by bracketed Newton steps (`t(x)` is strictly
/// increasing with slope at least 1).
#[derive(Debug, Clone)]
pub struct HalfMeridian {
    curve: ProfileCurve,
    panel_x: Vec<f64>,
    cumulative: Vec<f64>,
}

impl HalfMeridian {
    pub fn new(curve: ProfileCurve) -> Self {
        let p = curve.params();
        let (x1, x2) = (p.x1(), p.x2());
        let panel_x: Vec<f64> = (0..=NECK_PANELS)
            .map(|i| x1 + (x2 - x1) * i as f64 / NECK_PANELS as f64)
            .collect();
        let mut cumulative = Vec::with_capacity(NECK_PANELS + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for w in panel_x.windows(2) {
            acc += gauss_legendre_panel(|x| curve.speed(x), w[0], w[1]);
            cumulative.push(acc);
        }
        Self {
            curve,
            panel_x,
            cumulative,
        }
    }

    pub fn curve(&self) -> &ProfileCurve {
        &self.curve
    }

    /// Arc length of one neck, from `x1` to `x2`.
    pub fn neck_length(&self) -> f64 {
        self.cumulative[NECK_PANELS]
    }

    /// Abscissa reached after arc length `target` along the neck.
    pub fn neck_abscissa(&self, target: f64) -> f64 {
        let target = target.clamp(0.0, self.neck_length());
        let i = self
            .cumulative
            .partition_point(|&c| c <= target)
            .clamp(1, NECK_PANELS)
            - 1;
        let (mut lo, mut hi) = (self.panel_x[i], self.panel_x[i + 1]);
        let base = self.cumulative[i];
        let span = self.cumulative[i + 1] - base;
        let a = lo;
        let mut x = if span > 0.0 {
            lo + (hi - lo) * (target - base) / span
        } else {
            lo
        };
        for _ in 0..40 {
            let f = base + gauss_legendre_panel(|y| self.curve.speed(y), a, x) - target;
            if f.abs() <= 4.0 * f64::EPSILON * (1.0 + target) {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - f / self.curve.speed(x);
            x = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        x
    }
}

impl Meridian for HalfMeridian {
    fn half_length(&self) -> f64 {
        let p = self.curve.params();
        p.x1() + self.neck_length() + 0.5 * std::f64::consts::PI * p.radius()
    }

    fn radius_at(&self, sigma: f64) -> f64 {
        let p = self.curve.params();
        let x1 = p.x1();
        if sigma <= x1 {
            return p.eps();
        }
        let along = sigma - x1;
        if along < self.neck_length() {
            return self.curve.jet(self.neck_abscissa(along)).value;
        }
        let angle = (along - self.neck_length()) / p.radius();
        (p.radius() * angle.cos()).max(0.0)
    }
}

/// Uniform arc-length samples of a full pole-to-pole meridian.
///
/// Node `j` sits at `t_j = j h`, `h = T / (n + 1)`, for `j = 0..=n+1`; nodes
/// `0` and `n + 1` are the poles. Radii are also stored at the half nodes
/// `t_j + h/2`, `j = 0..=n`, for flux-form discretisations.
#[derive(Debug, Clone)]
pub struct MeridianGrid {
    n: usize,
    step: f64,
    length: f64,
    nodes: Vec<f64>,
    radius: Vec<f64>,
    half_radius: Vec<f64>,
    source: Arc<dyn Meridian>,
}

impl MeridianGrid {
    pub fn build(source: Arc<dyn Meridian>, n: usize) -> Result<Self> {
        if n < MIN_GRID_NODES {
            return Err(Error::GridTooCoarse {
                n,
                min: MIN_GRID_NODES,
            });
        }
        let half = source.half_length();
        let length = 2.0 * half;
        let step = length / (n + 1) as f64;
        let mid = 0.5 * (n + 1) as f64;
        // Offsets from the centre are computed from the index so that the
        // samples are mirror images of each other bit for bit.
        let at = |pos: f64| source.radius_at(((pos - mid).abs() * step).min(half));
        let nodes: Vec<f64> = (0..=n + 1).map(|j| j as f64 * step).collect();
        let mut radius: Vec<f64> = (0..=n + 1).map(|j| at(j as f64)).collect();
        radius[0] = 0.0;
        radius[n + 1] = 0.0;
        let half_radius: Vec<f64> = (0..=n).map(|j| at(j as f64 + 0.5)).collect();
        Ok(Self {
            n,
            step,
            length,
            nodes,
            radius,
            half_radius,
            source,
        })
    }

    /// Same meridian at a different resolution.
    pub fn rebuild(&self, n: usize) -> Result<Self> {
        Self::build(Arc::clone(&self.source), n)
    }

    /// Interior node count.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Pole-to-pole length `T`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// `t_0 .. t_{n+1}`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `r(t_0) .. r(t_{n+1})`.
    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    /// `r(t_{j + 1/2})` for `j = 0..=n`.
    pub fn half_radius(&self) -> &[f64] {
        &self.half_radius
    }

    pub fn source(&self) -> &Arc<dyn Meridian> {
        &self.source
    }

    /// Signed arc length from the plane of symmetry to node `j`.
    pub fn center_offset(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * (self.n + 1) as f64) * self.step
    }

    /// Largest `|r(t_j) - r(T - t_j)|` over the nodes.
    pub fn mirror_deviation(&self) -> f64 {
        let r = &self.radius;
        (0..r.len())
            .map(|j| (r[j] - r[r.len() - 1 - j]).abs())
            .fold(0.0, f64::max)
    }
}

/// Uniform arc-length grid over the full dumbbell meridian.
pub fn build_meridian(params: &DumbbellParams, n: usize) -> Result<MeridianGrid> {
    MeridianGrid::build(Arc::new(HalfMeridian::new(ProfileCurve::new(*params))), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference() -> DumbbellParams {
        DumbbellParams::new(2.0, 1.0, 0.1).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DumbbellParams::new(2.0, 1.0, 1.0).is_err());
        assert!(DumbbellParams::new(2.0, 1.0, 0.0).is_err());
        assert!(DumbbellParams::new(0.0, 1.0, 0.1).is_err());
        assert!(DumbbellParams::new(2.0, -1.0, 0.1).is_err());
        let p = DumbbellParams::from_index(2.0, 1.0, 10).unwrap();
        assert_eq!(p.eps(), 0.1);
        assert!(DumbbellParams::from_index(2.0, 1.0, 1).is_err());
    }

    #[test]
    fn junction_abscissas() {
        let p = reference();
        assert_eq!(p.x1(), 0.5);
        let gap = p.x2() - p.x1();
        assert!(gap > 3f64.sqrt() * p.radius() / 2.0 && gap <= p.radius());
    }

    #[test]
    fn semicircle_examples() {
        let p = reference();
        let apex = semicircle_eval(&p, p.x2()).unwrap();
        assert_eq!(apex.value, 2.0);
        assert_eq!(apex.d1, 0.0);
        assert!((apex.d2 + 0.5).abs() < 1e-15);
        let foot = semicircle_eval(&p, p.x1()).unwrap();
        assert!((foot.value - 0.1).abs() < 1e-12);
        let pinched = DumbbellParams::pinched(2.0, 1.0).unwrap();
        let c = semicircle_eval(&pinched, pinched.x1() + 1.0).unwrap();
        assert!((c.value - 3f64.sqrt()).abs() < 1e-15);
        assert!(semicircle_eval(&p, 0.1).is_err());
        assert!(semicircle_eval(&p, p.pole() + 1e-9).is_err());
    }

    #[test]
    fn profile_examples() {
        let p = reference();
        let g = ProfileCurve::new(p);
        assert_eq!(g.eval(p.x1() / 2.0).unwrap(), Jet::new(0.1, 0.0, 0.0));
        let top = g.eval(p.x2()).unwrap();
        assert_eq!(top.value, 2.0);
        assert_eq!(top.d1, 0.0);
        assert!((top.d2 + 0.5).abs() < 1e-15);
        assert_eq!(g.eval(p.pole()).unwrap().value, 0.0);
        assert!(g.eval(-0.1).is_err());
        assert!(g.eval(p.pole() + 1e-9).is_err());
    }

    #[test]
    fn profile_matches_high_precision_oracle() {
        // 50-digit evaluation of the defining formula at x1 + 0.25.
        let expected = Jet::new(0.10092650005048913, 0.03209195208585126, 0.8660688345562115);
        let g = ProfileCurve::new(reference());
        let x = 0.75;
        let j = g.eval(x).unwrap();
        assert!((j.value - expected.value).abs() / expected.value < 1e-13);
        assert!((j.d1 - expected.d1).abs() / expected.d1 < 1e-12);
        assert!((j.d2 - expected.d2).abs() / expected.d2 < 1e-11);

        let h = 1e-6;
        let fd1 = (g.eval(x + h).unwrap().value - g.eval(x - h).unwrap().value) / (2.0 * h);
        let fd2 = (g.eval(x + h).unwrap().d1 - g.eval(x - h).unwrap().d1) / (2.0 * h);
        assert!((fd1 - j.d1).abs() / j.d1 < 1e-6);
        assert!((fd2 - j.d2).abs() / j.d2 < 1e-6);
    }

    #[test]
    fn smooth_across_junctions() {
        for eps in [0.02, 0.1, 0.4] {
            let p = DumbbellParams::new(2.0, 1.0, eps).unwrap();
            let g = ProfileCurve::new(p);
            for x in [p.x1(), p.x2()] {
                let h = 1e-7;
                let (l, r) = (g.eval(x - h).unwrap(), g.eval(x + h).unwrap());
                assert!((l.value - r.value).abs() < 1e-6);
                assert!((l.d1 - r.d1).abs() < 1e-6);
                assert!((l.d2 - r.d2).abs() < 1e-6, "eps {eps} x {x}: {l:?} {r:?}");
            }
        }
    }

    #[test]
    fn monotone_on_neck() {
        for eps in [0.01, 0.1, 0.3, 0.99] {
            let p = DumbbellParams::new(2.0, 1.0, eps).unwrap();
            let g = ProfileCurve::new(p);
            let min = (0..=20_000)
                .map(|j| {
                    g.eval(p.x1() + (p.x2() - p.x1()) * j as f64 / 20_000.0)
                        .unwrap()
                        .d1
                })
                .fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-12, "eps {eps}: {min}");
        }
    }

    #[test]
    fn curvature_ratio_has_sign_of_second_derivative() {
        let p = reference();
        let g = ProfileCurve::new(p);
        for x in [0.6, 0.8, 1.2, 1.9, 2.3] {
            let j = g.eval(x).unwrap();
            let ratio = g.neck_curvature_ratio(x).unwrap();
            let s = step_eval((x - p.x1()) / p.neck_width()).s;
            assert!(
                (ratio * s - j.d2).abs() <= 1e-10 * j.d2.abs().max(1e-3),
                "x {x}"
            );
        }
        assert!(g.neck_curvature_ratio(p.x1()).is_err());
    }

    #[test]
    fn neck_inversion_round_trips() {
        let half = HalfMeridian::new(ProfileCurve::new(reference()));
        let total = half.neck_length();
        for k in 0..=50 {
            let target = total * k as f64 / 50.0;
            let x = half.neck_abscissa(target);
            let back = crate::quadrature::Quadrature::default()
                .integrate(|y| half.curve().speed(y), 0.5, x)
                .unwrap()
                .value;
            assert!((back - target).abs() < 1e-11, "{target}: {back}");
        }
    }

    #[test]
    fn sphere_meridian_length() {
        let grid = RoundSphere::new(1.5).unwrap().meridian(400).unwrap();
        assert!((grid.length() - 1.5 * PI).abs() < 1e-14);
        let j = 123;
        let t = grid.nodes()[j];
        assert!((grid.radius()[j] - 1.5 * (t / 1.5).sin()).abs() < 1e-12);
    }

    #[test]
    fn dumbbell_meridian_bounds_and_symmetry() {
        let p = reference();
        let grid = build_meridian(&p, 2000).unwrap();
        let (r, l) = (p.radius(), p.length());
        assert!(grid.length() >= 2.0 * r + l);
        assert!(grid.length() <= (PI + 4.0) * r + l);
        assert_eq!(grid.mirror_deviation(), 0.0);
        let rad = grid.radius();
        assert_eq!(rad[0], 0.0);
        assert_eq!(rad[grid.n() + 1], 0.0);
        assert!(rad[1..=grid.n()].iter().all(|&v| v > 0.0));
        assert!(matches!(
            build_meridian(&p, 99),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
