//! Sampled checks of the inequalities the construction relies on.
//!
//! Each check evaluates one inequality on a fixed grid and reports the
//! smallest signed margin; a report passes exactly when that margin is
//! positive. Limits at `0+` are checked on dyadic sequences in log space.
//! A sequence "decays to zero" when it is strictly decreasing from its
//! largest entry on, ends below `e^{TAIL_CEILING}`, and ends below where it
//! started.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::integral_curvature::NeckMajorant;
use crate::profile::{DumbbellParams, ProfileCurve};
use crate::smoothstep::{ln_step_decay_ratio, ln_step_derivative, step};

/// Log of the largest value accepted as the end of a decaying sequence.
pub const TAIL_CEILING: f64 = -50.0;
/// Tolerance of the reflection identity `s(x) + s(1 - x) = 1`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-14;
/// Tolerance of `g_eps >= g_0`.
pub const DOMINATION_TOLERANCE: f64 = 1e-12;
/// Step used for the finite difference in `eps`.
pub const EPS_STEP: f64 = 1e-6;

/// Exponent pairs `(a, b)` with `a + b = 5/2`.
pub const RATIO_EXPONENTS: [(f64, f64); 4] = [(2.5, 0.0), (1.5, 1.0), (0.5, 2.0), (0.0, 2.5)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClaimId {
    C1Symmetry,
    C1Decay,
    C1Ratio,
    C2Positivity,
    C2AB,
    C3Domination,
    C4Boundedness,
}

impl ClaimId {
    pub const ALL: [ClaimId; 7] = [
        Self::C1Symmetry,
        Self::C1Decay,
        Self::C1Ratio,
        Self::C2Positivity,
        Self::C2AB,
        Self::C3Domination,
        Self::C4Boundedness,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::C1Symmetry => "C1_symmetry",
            Self::C1Decay => "C1_decay",
            Self::C1Ratio => "C1_ratio",
            Self::C2Positivity => "C2_positivity",
            Self::C2AB => "C2_AB",
            Self::C3Domination => "C3_domination",
            Self::C4Boundedness => "C4_boundedness",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ClaimId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim_id: ClaimId,
    /// Human-readable description of the sampled domain.
    pub grid_spec: String,
    pub pass: bool,
    /// Smallest signed distance to a violation; negative means violated.
    pub worst_margin: f64,
}

impl ClaimReport {
    fn new(claim_id: ClaimId, grid_spec: String, worst_margin: f64) -> Self {
        // NaN margins fail
        Self {
            claim_id,
            grid_spec,
            pass: worst_margin > 0.0,
            worst_margin,
        }
    }
}

/// Margin by which a log-space sequence decays to zero (see module docs).
pub fn decay_margin(logs: &[f64]) -> f64 {
    if logs.len() < 2 || logs.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return f64::NAN;
    }
    let peak = logs
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > logs[best] { i } else { best });
    let last = logs[logs.len() - 1];
    logs[peak..]
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(logs[0] - last, f64::min)
        .min(TAIL_CEILING - last)
}

/// `s(x) + s(1-x) = 1` at `x = j/points`; flat-tail decay of
/// `s^(n)(x) / x^m` at `x = 2^-k`; decay of `s'(2x)^a s''(2x)^b / s(x)`.
pub fn verify_claim1(points: usize) -> Result<[ClaimReport; 3]> {
    if points < 2 {
        return Err(Error::InvalidParams(
            "symmetry grid needs at least 2 points".into(),
        ));
    }
    let deviation = (0..=points)
        .map(|j| {
            let x = j as f64 / points as f64;
            (step(x) + step(1.0 - x) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let symmetry = ClaimReport::new(
        ClaimId::C1Symmetry,
        format!("x = j/{points}, j = 0..={points}; margin = {SYMMETRY_TOLERANCE:e} - max|s(x)+s(1-x)-1|"),
        SYMMETRY_TOLERANCE - deviation,
    );

    // strict monotonicity at every step is required here, not only past a peak
    let mut decay = f64::INFINITY;
    for order in 0..=2 {
        for power in 0..=4 {
            let logs: Vec<f64> = (3..=12)
                .map(|k| {
                    let ln = ln_step_derivative(order, (-(k as f64)).exp2()).unwrap_or(f64::NAN);
                    ln + (power * k) as f64 * std::f64::consts::LN_2
                })
                .collect();
            let steps = logs
                .windows(2)
                .map(|w| w[0] - w[1])
                .fold(f64::INFINITY, f64::min);
            decay = decay.min(steps).min(TAIL_CEILING - logs[logs.len() - 1]);
        }
    }
    let decay = ClaimReport::new(
        ClaimId::C1Decay,
        "ln(s^(n)(x) x^-m), x = 2^-k, k = 3..=12, n <= 2, m <= 4".into(),
        decay,
    );

    let mut ratio = f64::INFINITY;
    for (a, b) in RATIO_EXPONENTS {
        let logs = (3..=12)
            .map(|k| ln_step_decay_ratio((-(k as f64)).exp2(), a, b))
            .collect::<Result<Vec<_>>>()?;
        ratio = ratio.min(decay_margin(&logs));
    }
    let ratio = ClaimReport::new(
        ClaimId::C1Ratio,
        "ln(s'(2x)^a s''(2x)^b / s(x)), x = 2^-k, k = 3..=12, (a,b) in {(5/2,0),(3/2,1),(1/2,2),(0,5/2)}"
            .into(),
        ratio,
    );
    Ok([symmetry, decay, ratio])
}

/// `A(x*) = (1 - 2x* + 2x*^2) / (x*^2 (x* - 1)^2)`.
pub fn comparison_a(x: f64) -> f64 {
    (1.0 - 2.0 * x + 2.0 * x * x) / (x * x * (x - 1.0).powi(2))
}

/// `B(x*) = 1 / ((1 - x*) (2x* - x*^2))`.
pub fn comparison_b(x: f64) -> f64 {
    1.0 / ((1.0 - x) * (2.0 * x - x * x))
}

/// Positivity of `g_eps''` on `(x1, x1 + R/4)` and `A > B` on `(0, 1/2]`.
///
/// The sign of `g''` is read from `g'' / s(x*)`, which is finite right up
/// to `x1`. The `x` grid has `x_points` equally spaced interior points; the
/// `x*` grid is `j / (2 ab_points)`, `j = 1..=ab_points`, ending at `1/2`.
pub fn verify_claim2(
    radius: f64,
    length: f64,
    eps: &[f64],
    x_points: usize,
    ab_points: usize,
) -> Result<[ClaimReport; 2]> {
    let mut positivity = f64::INFINITY;
    for &e in eps {
        let params = DumbbellParams::new(radius, length, e)?;
        let curve = ProfileCurve::new(params);
        let span = params.x_m() - params.x1();
        for j in 1..=x_points {
            let x = params.x1() + span * j as f64 / (x_points + 1) as f64;
            positivity = positivity.min(curve.neck_curvature_ratio(x)?);
        }
    }
    let positivity = ClaimReport::new(
        ClaimId::C2Positivity,
        format!(
            "g''/s(x*) at x = x1 + (R/4) j/{}, j = 1..={x_points}; eps in {eps:?}; R = {radius}, L = {length}",
            x_points + 1
        ),
        positivity,
    );

    let ab = (1..=ab_points)
        .map(|j| {
            let x = j as f64 / (2 * ab_points) as f64;
            comparison_a(x) - comparison_b(x)
        })
        .fold(f64::INFINITY, f64::min);
    let ab = ClaimReport::new(
        ClaimId::C2AB,
        format!(
            "A(x*) - B(x*), x* = j/{}, j = 1..={ab_points}",
            2 * ab_points
        ),
        ab,
    );
    Ok([positivity, ab])
}

/// `h_eps(x) = eps + (c_eps(x) - eps) s((x - x1)/R)`.
pub fn domination_helper(params: &DumbbellParams, x: f64) -> f64 {
    let (r, e) = (params.radius(), params.eps());
    let d = x - params.x2();
    let c = ((r - d) * (r + d)).max(0.0).sqrt();
    e + (c - e) * step((x - params.x1()) / r)
}

/// `g_eps >= g_0` on `(x1, x2)` and `dh_eps/deps >= 0` by central
/// differences with step [`EPS_STEP`].
pub fn verify_claim3(
    radius: f64,
    length: f64,
    eps: &[f64],
    x_points: usize,
) -> Result<ClaimReport> {
    let pinched = ProfileCurve::new(DumbbellParams::pinched(radius, length)?);
    let mut gap = f64::INFINITY;
    let mut slope = f64::INFINITY;
    for &e in eps {
        let params = DumbbellParams::new(radius, length, e)?;
        let curve = ProfileCurve::new(params);
        let (lo, hi) = (
            params.with_eps(e - EPS_STEP)?,
            params.with_eps(e + EPS_STEP)?,
        );
        let span = params.x2() - params.x1();
        for j in 1..=x_points {
            let x = params.x1() + span * j as f64 / (x_points + 1) as f64;
            gap = gap.min(curve.eval(x)?.value - pinched.eval(x)?.value);
            let fd = (domination_helper(&hi, x) - domination_helper(&lo, x)) / (2.0 * EPS_STEP);
            slope = slope.min(fd);
        }
    }
    Ok(ClaimReport::new(
        ClaimId::C3Domination,
        format!(
            "min(g_eps - g_0 + {DOMINATION_TOLERANCE:e}, dh/deps) at x = x1 + (x2 - x1) j/{}, j = 1..={x_points}; \
             eps in {eps:?}; R = {radius}, L = {length}",
            x_points + 1
        ),
        (gap + DOMINATION_TOLERANCE).min(slope),
    ))
}

/// Decay of `U^3 / (c0 s((x - x1)/R))` along `x = x1 + R 2^-k`, `k` in
/// `ks`, and finiteness of its maximum over `max_points` points of
/// `(x1, x1 + R/4]`.
pub fn verify_claim4(
    params: &DumbbellParams,
    ks: std::ops::RangeInclusive<u32>,
    max_points: usize,
) -> Result<ClaimReport> {
    let majorant = NeckMajorant::new(params);
    let (x1, r) = (params.x1(), params.radius());
    let logs = ks
        .clone()
        .map(|k| majorant.ln_ratio(x1 + r * (-(k as f64)).exp2()))
        .collect::<Result<Vec<_>>>()?;
    let span = majorant.x_m() - x1;
    let peak = (1..=max_points)
        .map(|j| majorant.ln_ratio(x1 + span * j as f64 / max_points as f64))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let bounded = if peak.is_finite() && peak < f64::MAX.ln() {
        f64::INFINITY
    } else {
        f64::NAN
    };
    Ok(ClaimReport::new(
        ClaimId::C4Boundedness,
        format!(
            "ln(U^3/(c0 s)) at x = x1 + R 2^-k, k = {}..={}; max over x1 + (R/4) j/{max_points}, j = 1..={max_points}; R = {r}",
            ks.start(),
            ks.end()
        ),
        decay_margin(&logs).min(bounded),
    ))
}

/// Neck radii used by [`verify_all`] for the positivity check, as fractions
/// of `R`.
pub const POSITIVITY_EPS_FRACTIONS: [f64; 8] = [0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49];
/// Neck radii used by [`verify_all`] for the domination check, as fractions
/// of `R`.
pub const DOMINATION_EPS_FRACTIONS: [f64; 4] = [0.01, 0.05, 0.1, 0.2];

/// All seven reports on the fixed default grids.
pub fn verify_all(radius: f64, length: f64) -> Result<Vec<ClaimReport>> {
    let scaled = |f: &[f64]| f.iter().map(|v| v * radius).collect::<Vec<_>>();
    let mut out = Vec::with_capacity(7);
    out.extend(verify_claim1(10_000)?);
    out.extend(verify_claim2(
        radius,
        length,
        &scaled(&POSITIVITY_EPS_FRACTIONS),
        1000,
        10_000,
    )?);
    out.push(verify_claim3(
        radius,
        length,
        &scaled(&DOMINATION_EPS_FRACTIONS),
        1000,
    )?);
    // the majorant does not depend on eps
    let params = DumbbellParams::new(radius, length, 0.1 * radius)?;
    out.push(verify_claim4(&params, 3..=12, 1000)?);
    Ok(out)
}

/// `g_eps''` directly, for spot checks away from `x1`.
pub fn profile_second_derivative(params: &DumbbellParams, x: f64) -> Result<f64> {
    Ok(ProfileCurve::new(*params).eval(x)?.d2)
}
