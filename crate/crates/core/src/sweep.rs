//! One row of measurements per neck radius, and the checks tying rows
//! together.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::bounds_summary;
use crate::integral_curvature::{default_split, kbar, neck_bound_integrals, DEFAULT_EXPONENT};
use crate::profile::{build_meridian, DumbbellParams, ProfileCurve, DEFAULT_GRID_NODES};
use crate::quadrature::Quadrature;
use crate::rayleigh::rayleigh_bound;
use crate::spectrum::{first_eigenvalue, DEFAULT_EIGEN_COUNT, DEFAULT_MAX_MODE};

/// Version of the row layout written by the front end.
pub const SCHEMA_VERSION: u32 = 1;
/// Allowed relative Gauss–Bonnet defect.
pub const GAUSS_BONNET_TOLERANCE: f64 = 1e-6;
/// Allowed relative change of `lambda1` under grid halving.
pub const CONVERGENCE_TOLERANCE: f64 = 0.01;
/// Slack in `kbar(p, K) <= K + kbar(p, 0)`.
pub const MINKOWSKI_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub radius: f64,
    pub length: f64,
    /// Neck radii, in the order rows are produced.
    pub eps: Vec<f64>,
    pub p: f64,
    pub level: f64,
    pub grid_n: usize,
    pub m_max: u32,
    pub k_eigs: usize,
    pub tol_quad: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            radius: 2.0,
            length: 1.0,
            eps: dyadic_eps(5, 40).expect("valid range"),
            p: DEFAULT_EXPONENT,
            level: 0.0,
            grid_n: DEFAULT_GRID_NODES,
            m_max: DEFAULT_MAX_MODE,
            k_eigs: DEFAULT_EIGEN_COUNT,
            tol_quad: 1e-10,
        }
    }
}

impl SweepConfig {
    pub fn quadrature(&self) -> Quadrature {
        Quadrature::with_rel_tol(self.tol_quad)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(Error::InvalidParams("empty neck radius list".into()));
        }
        for &e in &self.eps {
            DumbbellParams::new(self.radius, self.length, e)?;
        }
        if !(self.p > 1.0 && self.p <= 2.0) {
            return Err(Error::InvalidParams(format!(
                "exponent p = {} must lie in (1, 2]",
                self.p
            )));
        }
        if !(self.level >= 0.0 && self.level.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "curvature level K = {} must be >= 0",
                self.level
            )));
        }
        if self.m_max < 1 {
            return Err(Error::InvalidParams("m_max must be at least 1".into()));
        }
        if self.k_eigs < 1 {
            return Err(Error::InvalidParams("k_eigs must be at least 1".into()));
        }
        if !(self.tol_quad > 0.0 && self.tol_quad < 1.0) {
            return Err(Error::InvalidParams(format!(
                "quadrature tolerance {} must lie in (0, 1)",
                self.tol_quad
            )));
        }
        Ok(())
    }
}

/// `eps = 1/i` for `i = i0, 2 i0, 4 i0, ...` up to `i1`.
pub fn dyadic_eps(i0: u32, i1: u32) -> Result<Vec<f64>> {
    if i0 < 1 || i1 < i0 {
        return Err(Error::InvalidParams(format!(
            "dyadic range {i0}:{i1} must satisfy 1 <= i0 <= i1"
        )));
    }
    let mut out = Vec::new();
    let mut i = u64::from(i0);
    while i <= u64::from(i1) {
        out.push(1.0 / i as f64);
        i *= 2;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub lambda1: f64,
    pub rayleigh_bound: f64,
    pub kbar_p0: f64,
    #[serde(rename = "kbar_pK")]
    pub kbar_pk: f64,
    #[serde(rename = "M1_est")]
    pub m1_est: f64,
    #[serde(rename = "M2_est")]
    pub m2_est: f64,
    pub area: f64,
    pub meridian_length: f64,
    pub diam_bound: f64,
    pub gauss_bonnet: f64,
    pub convergence_gap: f64,
    /// `ok`, or the error that stopped the row.
    pub status: String,
    pub schema_version: u32,
}

impl SweepRow {
    pub const COLUMNS: [&'static str; 14] = [
        "eps",
        "lambda1",
        "rayleigh_bound",
        "kbar_p0",
        "kbar_pK",
        "M1_est",
        "M2_est",
        "area",
        "meridian_length",
        "diam_bound",
        "gauss_bonnet",
        "convergence_gap",
        "status",
        "schema_version",
    ];

    fn failed(eps: f64, err: &Error) -> Self {
        Self {
            eps,
            lambda1: f64::NAN,
            rayleigh_bound: f64::NAN,
            kbar_p0: f64::NAN,
            kbar_pk: f64::NAN,
            m1_est: f64::NAN,
            m2_est: f64::NAN,
            area: f64::NAN,
            meridian_length: f64::NAN,
            diam_bound: f64::NAN,
            gauss_bonnet: f64::NAN,
            convergence_gap: f64::NAN,
            status: format!("error: {err}"),
            schema_version: SCHEMA_VERSION,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// `[(M1 + M2) / (2 R^2)]^{2/3}`.
    pub fn kbar_majorant(&self, radius: f64) -> f64 {
        ((self.m1_est + self.m2_est) / (2.0 * radius * radius)).powf(2.0 / 3.0)
    }

    /// The numeric fields in column order, without status and version.
    pub fn values(&self) -> [f64; 12] {
        [
            self.eps,
            self.lambda1,
            self.rayleigh_bound,
            self.kbar_p0,
            self.kbar_pk,
            self.m1_est,
            self.m2_est,
            self.area,
            self.meridian_length,
            self.diam_bound,
            self.gauss_bonnet,
            self.convergence_gap,
        ]
    }
}

fn compute_row(config: &SweepConfig, eps: f64) -> Result<SweepRow> {
    let params = DumbbellParams::new(config.radius, config.length, eps)?;
    let curve = ProfileCurve::new(params);
    let quad = config.quadrature();
    let grid = build_meridian(&params, config.grid_n)?;
    let spectrum = first_eigenvalue(&grid, config.m_max, config.k_eigs)?;
    let base = kbar(&curve, config.p, 0.0, &quad)?;
    let shifted = kbar(&curve, config.p, config.level, &quad)?;
    let bounds = neck_bound_integrals(&params, default_split(&params), &quad)?;
    let geometry = bounds_summary(&curve, &quad)?;
    Ok(SweepRow {
        eps,
        lambda1: spectrum.lambda1,
        rayleigh_bound: rayleigh_bound(&params),
        kbar_p0: base.kbar,
        kbar_pk: shifted.kbar,
        m1_est: bounds.m1,
        m2_est: bounds.m2,
        area: geometry.area,
        meridian_length: geometry.meridian_length,
        diam_bound: geometry.diam_bound,
        gauss_bonnet: geometry.gauss_bonnet,
        convergence_gap: spectrum.convergence_gap,
        status: "ok".into(),
        schema_version: SCHEMA_VERSION,
    })
}

/// Measures one neck radius. Failures are recorded in the row's status.
pub fn sweep_row(config: &SweepConfig, eps: f64) -> SweepRow {
    compute_row(config, eps).unwrap_or_else(|e| SweepRow::failed(eps, &e))
}

/// All rows, in configuration order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    Ok(config.eps.iter().map(|&e| sweep_row(config, e)).collect())
}

/// A row (or a pair of consecutive rows) breaking an expected relation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub row: usize,
    pub eps: f64,
    pub what: String,
}

/// Checks every row and every consecutive pair.
///
/// Per row: status, `lambda1 <= 2 eps/(L R^2)`, the Minkowski relation for
/// `kbar`, `4 pi R^2 <= area <= 10 pi R^2 + 2 pi L`, the diameter bound on
/// the meridian, Gauss–Bonnet and the convergence gap. Across rows with
/// decreasing `eps`, `lambda1` must decrease strictly.
pub fn check_invariants(config: &SweepConfig, rows: &[SweepRow]) -> Vec<Violation> {
    let mut out = Vec::new();
    let r2 = config.radius * config.radius;
    let area_cap = 10.0 * PI * r2 + 2.0 * PI * config.length;
    for (i, row) in rows.iter().enumerate() {
        let mut flag = |what: String| {
            out.push(Violation {
                row: i,
                eps: row.eps,
                what,
            })
        };
        if !row.is_ok() {
            flag(row.status.clone());
            continue;
        }
        if !(row.lambda1 <= row.rayleigh_bound) {
            flag(format!(
                "lambda1 {} exceeds test-function bound {}",
                row.lambda1, row.rayleigh_bound
            ));
        }
        if !(row.kbar_pk <= config.level + row.kbar_p0 + MINKOWSKI_SLACK) {
            flag(format!(
                "kbar(p,K) {} exceeds K + kbar(p,0) = {}",
                row.kbar_pk,
                config.level + row.kbar_p0
            ));
        }
        if !(row.area >= 4.0 * PI * r2 && row.area <= area_cap) {
            flag(format!(
                "area {} outside [{}, {}]",
                row.area,
                4.0 * PI * r2,
                area_cap
            ));
        }
        if !(row.meridian_length <= row.diam_bound) {
            flag(format!(
                "meridian length {} exceeds {}",
                row.meridian_length, row.diam_bound
            ));
        }
        let gb = (row.gauss_bonnet - 4.0 * PI).abs() / (4.0 * PI);
        if !(gb <= GAUSS_BONNET_TOLERANCE) {
            flag(format!("Gauss-Bonnet defect {gb}"));
        }
        if !(row.convergence_gap <= CONVERGENCE_TOLERANCE) {
            flag(format!("convergence gap {}", row.convergence_gap));
        }
    }
    for (i, w) in rows.windows(2).enumerate() {
        if w[0].is_ok() && w[1].is_ok() && w[1].eps < w[0].eps && !(w[1].lambda1 < w[0].lambda1) {
            out.push(Violation {
                row: i + 1,
                eps: w[1].eps,
                what: format!(
                    "lambda1 {} not below previous {}",
                    w[1].lambda1, w[0].lambda1
                ),
            });
        }
    }
    out
}
