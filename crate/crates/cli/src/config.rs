//! Run settings from defaults, a flat `key = value` file and flags.
//!
//! File syntax: one `key = value` per line, `#` starts a comment, blank
//! lines are ignored. Keys are the long flag names without dashes:
//!
//! ```text
//! R = 2
//! L = 1
//! eps-list = 0.2, 0.1        # or: eps-dyadic = 5:40
//! p = 1.5
//! K = 0
//! grid-n = 4000
//! m-max = 2
//! k-eigs = 4
//! jobs = 4
//! tol-quad = 1e-10
//! out-csv = sweep.csv
//! out-json = sweep.json
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use dumbbell::sweep::{dyadic_eps, SweepConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum EpsSpec {
    List(Vec<f64>),
    Dyadic(u32, u32),
}

impl EpsSpec {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            Self::List(v) => Ok(v.clone()),
            Self::Dyadic(i0, i1) => Ok(dyadic_eps(*i0, *i1)?),
        }
    }
}

pub fn parse_dyadic(text: &str) -> Result<EpsSpec> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("dyadic range `{text}` must look like i0:i1"))?;
    Ok(EpsSpec::Dyadic(a.trim().parse()?, b.trim().parse()?))
}

pub fn parse_list(text: &str) -> Result<EpsSpec> {
    let v = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(EpsSpec::List(v))
}

/// Settings from one source; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub radius: Option<f64>,
    pub length: Option<f64>,
    pub eps: Option<EpsSpec>,
    pub p: Option<f64>,
    pub level: Option<f64>,
    pub grid_n: Option<usize>,
    pub m_max: Option<u32>,
    pub k_eigs: Option<usize>,
    pub jobs: Option<usize>,
    pub tol_quad: Option<f64>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
}

fn value<T: FromStr>(key: &str, text: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    text.parse()
        .with_context(|| format!("bad value `{text}` for `{key}`"))
}

impl Layer {
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut layer = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", no + 1))?;
            let (key, val) = (key.trim(), val.trim());
            let ctx = || format!("line {}", no + 1);
            match key {
                "R" => layer.radius = Some(value(key, val).with_context(ctx)?),
                "L" => layer.length = Some(value(key, val).with_context(ctx)?),
                "eps-list" | "eps-dyadic" => {
                    if layer.eps.is_some() {
                        bail!("line {}: neck radii given twice", no + 1);
                    }
                    let spec = if key == "eps-list" {
                        parse_list(val)
                    } else {
                        parse_dyadic(val)
                    };
                    layer.eps = Some(spec.with_context(ctx)?);
                }
                "p" => layer.p = Some(value(key, val).with_context(ctx)?),
                "K" => layer.level = Some(value(key, val).with_context(ctx)?),
                "grid-n" => layer.grid_n = Some(value(key, val).with_context(ctx)?),
                "m-max" => layer.m_max = Some(value(key, val).with_context(ctx)?),
                "k-eigs" => layer.k_eigs = Some(value(key, val).with_context(ctx)?),
                "jobs" => layer.jobs = Some(value(key, val).with_context(ctx)?),
                "tol-quad" => layer.tol_quad = Some(value(key, val).with_context(ctx)?),
                "out-csv" => layer.out_csv = Some(PathBuf::from(val)),
                "out-json" => layer.out_json = Some(PathBuf::from(val)),
                other => bail!("line {}: unknown key `{other}`", no + 1),
            }
        }
        Ok(layer)
    }

    /// `self` with every field set in `top` replaced.
    pub fn under(self, top: Layer) -> Layer {
        Layer {
            radius: top.radius.or(self.radius),
            length: top.length.or(self.length),
            eps: top.eps.or(self.eps),
            p: top.p.or(self.p),
            level: top.level.or(self.level),
            grid_n: top.grid_n.or(self.grid_n),
            m_max: top.m_max.or(self.m_max),
            k_eigs: top.k_eigs.or(self.k_eigs),
            jobs: top.jobs.or(self.jobs),
            tol_quad: top.tol_quad.or(self.tol_quad),
            out_csv: top.out_csv.or(self.out_csv),
            out_json: top.out_json.or(self.out_json),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub sweep: SweepConfig,
    pub jobs: usize,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
}

impl Settings {
    /// Applies a merged layer to the defaults and validates the result.
    pub fn resolve(layer: Layer) -> Result<Self> {
        let d = SweepConfig::default();
        let sweep = SweepConfig {
            radius: layer.radius.unwrap_or(d.radius),
            length: layer.length.unwrap_or(d.length),
            eps: match &layer.eps {
                Some(spec) => spec.resolve()?,
                None => d.eps,
            },
            p: layer.p.unwrap_or(d.p),
            level: layer.level.unwrap_or(d.level),
            grid_n: layer.grid_n.unwrap_or(d.grid_n),
            m_max: layer.m_max.unwrap_or(d.m_max),
            k_eigs: layer.k_eigs.unwrap_or(d.k_eigs),
            tol_quad: layer.tol_quad.unwrap_or(d.tol_quad),
        };
        sweep.validate()?;
        let jobs = layer
            .jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            bail!("jobs must be at least 1");
        }
        Ok(Self {
            sweep,
            jobs,
            out_csv: layer.out_csv,
            out_json: layer.out_json,
        })
    }
}
