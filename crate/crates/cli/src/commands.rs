//! Subcommand bodies. Each returns the invariant violations it found;
//! errors are reserved for failures to compute or write.

use std::f64::consts::PI;

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use dumbbell::claims::verify_all;
use dumbbell::geometry::{bounds_summary, gaussian_curvature};
use dumbbell::profile::build_meridian;
use dumbbell::rayleigh::rayleigh_bound;
use dumbbell::spectrum::{first_eigenvalue, SpectrumResult};
use dumbbell::sweep::{
    check_invariants, sweep_row, SweepRow, CONVERGENCE_TOLERANCE, GAUSS_BONNET_TOLERANCE,
};
use dumbbell::{DumbbellParams, ProfileCurve, RoundSphere};

use crate::config::Settings;
use crate::output::{fmt_num, print, to_csv, to_json, write_file};

fn pool(settings: &Settings) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs)
        .build()?)
}

/// Writes to the requested files, or `fallback` to stdout when none was
/// requested.
fn emit(settings: &Settings, csv: Option<String>, json: String, fallback_csv: bool) -> Result<()> {
    if let (Some(path), Some(text)) = (&settings.out_csv, &csv) {
        write_file(path, text)?;
    }
    if let Some(path) = &settings.out_json {
        write_file(path, &json)?;
    }
    if settings.out_csv.is_none() && settings.out_json.is_none() {
        match csv {
            Some(text) if fallback_csv => print(&text)?,
            _ => print(&json)?,
        }
    }
    Ok(())
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut rec: Vec<String> = r.values().iter().map(|v| fmt_num(*v)).collect();
            rec.push(r.status.clone());
            rec.push(r.schema_version.to_string());
            rec
        })
        .collect();
    to_csv(&SweepRow::COLUMNS, &records)
}

pub fn sweep(settings: &Settings) -> Result<Vec<String>> {
    let config = &settings.sweep;
    let rows: Vec<SweepRow> = pool(settings)?.install(|| {
        config
            .eps
            .par_iter()
            .map(|&e| sweep_row(config, e))
            .collect()
    });
    emit(settings, Some(sweep_csv(&rows)?), to_json(&rows)?, true)?;
    Ok(check_invariants(config, &rows)
        .into_iter()
        .map(|v| format!("row {} (eps = {}): {}", v.row, v.eps, v.what))
        .collect())
}

#[derive(Debug, Serialize)]
struct ModeRecord {
    m: u32,
    eigenvalues: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SpectrumRecord {
    surface: &'static str,
    eps: Option<f64>,
    n: usize,
    lambda1: f64,
    mode_of_lambda1: u32,
    convergence_gap: f64,
    rayleigh_bound: Option<f64>,
    modes: Vec<ModeRecord>,
}

impl SpectrumRecord {
    fn new(
        surface: &'static str,
        eps: Option<f64>,
        bound: Option<f64>,
        res: SpectrumResult,
    ) -> Self {
        Self {
            surface,
            eps,
            n: res.per_mode[0].n,
            lambda1: res.lambda1,
            mode_of_lambda1: res.mode_of_lambda1,
            convergence_gap: res.convergence_gap,
            rayleigh_bound: bound,
            modes: res
                .per_mode
                .into_iter()
                .map(|s| ModeRecord {
                    m: s.m,
                    eigenvalues: s.eigenvalues,
                })
                .collect(),
        }
    }
}

pub fn spectrum(settings: &Settings, sphere: bool) -> Result<Vec<String>> {
    let c = &settings.sweep;
    let records: Vec<SpectrumRecord> = if sphere {
        let grid = RoundSphere::new(c.radius)?.meridian(c.grid_n)?;
        vec![SpectrumRecord::new(
            "sphere",
            None,
            None,
            first_eigenvalue(&grid, c.m_max, c.k_eigs)?,
        )]
    } else {
        pool(settings)?.install(|| {
            c.eps
                .par_iter()
                .map(|&e| {
                    let params = DumbbellParams::new(c.radius, c.length, e)?;
                    let res =
                        first_eigenvalue(&build_meridian(&params, c.grid_n)?, c.m_max, c.k_eigs)?;
                    Ok(SpectrumRecord::new(
                        "dumbbell",
                        Some(e),
                        Some(rayleigh_bound(&params)),
                        res,
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })?
    };
    let mut csv = Vec::new();
    let mut violations = Vec::new();
    for r in &records {
        let eps = r.eps.map_or_else(String::new, fmt_num);
        for mode in &r.modes {
            for (i, v) in mode.eigenvalues.iter().enumerate() {
                csv.push(vec![
                    r.surface.to_string(),
                    eps.clone(),
                    mode.m.to_string(),
                    i.to_string(),
                    fmt_num(*v),
                ]);
            }
        }
        if !(r.convergence_gap <= CONVERGENCE_TOLERANCE) {
            violations.push(format!(
                "{} eps = {eps}: convergence gap {}",
                r.surface, r.convergence_gap
            ));
        }
        if let Some(b) = r.rayleigh_bound {
            if !(r.lambda1 <= b) {
                violations.push(format!("eps = {eps}: lambda1 {} exceeds {b}", r.lambda1));
            }
        }
    }
    let csv = to_csv(&["surface", "eps", "m", "index", "eigenvalue"], &csv)?;
    emit(settings, Some(csv), to_json(&records)?, false)?;
    Ok(violations)
}

#[derive(Debug, Serialize)]
struct ProfileSample {
    x: f64,
    g: f64,
    g1: f64,
    g2: f64,
    kappa: f64,
}

/// Samples `(x, g, g', g'', kappa)` at `x = j (x2 + R) / samples`,
/// `j = 0..samples`, for the first neck radius.
pub fn profile(settings: &Settings, samples: usize) -> Result<Vec<String>> {
    let c = &settings.sweep;
    let params = DumbbellParams::new(c.radius, c.length, c.eps[0])?;
    let curve = ProfileCurve::new(params);
    let rows = (0..samples)
        .map(|j| {
            let x = params.pole() * j as f64 / samples as f64;
            let g = curve.eval(x)?;
            Ok(ProfileSample {
                x,
                g: g.value,
                g1: g.d1,
                g2: g.d2,
                kappa: gaussian_curvature(&curve, x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            [r.x, r.g, r.g1, r.g2, r.kappa]
                .iter()
                .map(|v| fmt_num(*v))
                .collect()
        })
        .collect();
    emit(
        settings,
        Some(to_csv(&["x", "g", "g1", "g2", "kappa"], &csv)?),
        to_json(&rows)?,
        true,
    )?;
    let neck: Vec<&ProfileSample> = rows
        .iter()
        .filter(|r| r.x >= params.x1() && r.x <= params.x2())
        .collect();
    Ok(neck
        .windows(2)
        .filter(|w| w[1].g < w[0].g)
        .map(|w| {
            format!(
                "g decreases on the neck between x = {} and {}",
                w[0].x, w[1].x
            )
        })
        .collect())
}

pub fn claims(settings: &Settings) -> Result<Vec<String>> {
    let reports = verify_all(settings.sweep.radius, settings.sweep.length)?;
    emit(settings, None, to_json(&reports)?, false)?;
    Ok(reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} fails with margin {}", r.claim_id, r.worst_margin))
        .collect())
}

#[derive(Debug, Serialize)]
struct GaussBonnetRecord {
    eps: f64,
    gauss_bonnet: f64,
    rel_defect: f64,
    area: f64,
    area_lower: f64,
    area_upper: f64,
    meridian_length: f64,
    diam_bound: f64,
}

pub fn gauss_bonnet(settings: &Settings) -> Result<Vec<String>> {
    let c = &settings.sweep;
    let quad = c.quadrature();
    let records: Vec<GaussBonnetRecord> = pool(settings)?.install(|| {
        c.eps
            .par_iter()
            .map(|&e| {
                let params = DumbbellParams::new(c.radius, c.length, e)?;
                let s = bounds_summary(&ProfileCurve::new(params), &quad)?;
                Ok(GaussBonnetRecord {
                    eps: e,
                    gauss_bonnet: s.gauss_bonnet,
                    rel_defect: (s.gauss_bonnet - 4.0 * PI).abs() / (4.0 * PI),
                    area: s.area,
                    area_lower: 4.0 * PI * c.radius * c.radius,
                    area_upper: s.area_bound,
                    meridian_length: s.meridian_length,
                    diam_bound: s.diam_bound,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let csv: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            [
                r.eps,
                r.gauss_bonnet,
                r.rel_defect,
                r.area,
                r.area_lower,
                r.area_upper,
                r.meridian_length,
                r.diam_bound,
            ]
            .iter()
            .map(|v| fmt_num(*v))
            .collect()
        })
        .collect();
    let header = [
        "eps",
        "gauss_bonnet",
        "rel_defect",
        "area",
        "area_lower",
        "area_upper",
        "meridian_length",
        "diam_bound",
    ];
    emit(
        settings,
        Some(to_csv(&header, &csv)?),
        to_json(&records)?,
        false,
    )?;
    let mut out = Vec::new();
    for r in &records {
        if !(r.rel_defect <= GAUSS_BONNET_TOLERANCE) {
            out.push(format!(
                "eps = {}: Gauss-Bonnet defect {}",
                r.eps, r.rel_defect
            ));
        }
        if !(r.area >= r.area_lower && r.area <= r.area_upper) {
            out.push(format!(
                "eps = {}: area {} outside [{}, {}]",
                r.eps, r.area, r.area_lower, r.area_upper
            ));
        }
        if !(r.meridian_length <= r.diam_bound) {
            out.push(format!(
                "eps = {}: meridian length {} exceeds {}",
                r.eps, r.meridian_length, r.diam_bound
            ));
        }
    }
    Ok(out)
}
