//! Low Laplace–Beltrami spectrum of a surface of revolution.
//!
//! Eigenfunctions separate as `f(t) e^{i m theta}` with `t` the meridian
//! arc length, leaving for each angular mode `m` the Sturm–Liouville problem
//!
//! ```text
//! -(r f')' + (m^2 / r) f = lambda r f     on (0, T).
//! ```
//!
//! It is discretised in flux form on a [`MeridianGrid`]: conductances
//! `r(t_{j+1/2}) / h` between neighbouring nodes, potential `m^2 h / r_j`
//! and lumped mass `r_j h`. The poles are not unknowns: for `m = 0` no flux
//! crosses them, for `m >= 1` the solution is pinned to zero there.
//!
//! Eigenvalues come from Sturm-sequence bisection on the pencil `(A, M)`.
//! The pivots are carried as surpluses over the right coupling,
//! `p_j = q_j - c_j`, which obey
//!
//! ```text
//! p_j = delta_j + c_{j-1} p_{j-1} / (p_{j-1} + c_{j-1}),   delta_j = e_j - sigma m_j
//! ```
//!
//! and never subtract two large conductances, so eigenvalues far below
//! `1/h^2` keep their relative accuracy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{MeridianGrid, MIN_GRID_NODES};

/// Highest angular mode examined when none is given.
pub const DEFAULT_MAX_MODE: u32 = 2;
/// Eigenvalues computed per mode when none is given.
pub const DEFAULT_EIGEN_COUNT: usize = 4;
/// Relative gap below which an `m = 0` eigenvalue counts as the zero mode.
pub const ZERO_MODE_THRESHOLD: f64 = 1e-8;

/// Boundary behaviour at one end of a meridian segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndCondition {
    /// No flux through the end.
    Neumann,
    /// Solution vanishes at the end.
    Dirichlet,
}

/// Symmetric tridiagonal pencil `A f = lambda M f` for one angular mode.
///
/// `A` has off-diagonal `-c_j` and diagonal `c_{j-1} + c_j + e_j`, with
/// `e_j >= 0` collecting the potential and any Dirichlet boundary flux;
/// `M` is diagonal and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    mode: u32,
    coupling: Vec<f64>,
    excess: Vec<f64>,
    mass: Vec<f64>,
}

impl ModeOperator {
    /// Assembles the operator on `n` unknowns.
    ///
    /// `half_radius` holds `n + 1` values at the cell faces (the first and
    /// last faces touch the ends), `radius` the `n` interior node radii.
    pub fn assemble(
        half_radius: &[f64],
        radius: &[f64],
        step: f64,
        mode: u32,
        left: EndCondition,
        right: EndCondition,
    ) -> Self {
        let n = radius.len();
        assert_eq!(half_radius.len(), n + 1, "need one face per cell boundary");
        let m2 = f64::from(mode).powi(2);
        let coupling: Vec<f64> = half_radius[1..n].iter().map(|r| r / step).collect();
        let mut excess: Vec<f64> = radius.iter().map(|r| m2 * step / r).collect();
        if left == EndCondition::Dirichlet {
            excess[0] += half_radius[0] / step;
        }
        if right == EndCondition::Dirichlet {
            excess[n - 1] += half_radius[n] / step;
        }
        let mass = radius.iter().map(|r| r * step).collect();
        Self {
            mode,
            coupling,
            excess,
            mass,
        }
    }

    /// Mode `m` on a full meridian: reflecting poles for `m = 0`, pinned
    /// poles otherwise.
    pub fn for_grid(grid: &MeridianGrid, mode: u32) -> Self {
        let end = if mode == 0 {
            EndCondition::Neumann
        } else {
            EndCondition::Dirichlet
        };
        let n = grid.n();
        Self::assemble(
            grid.half_radius(),
            &grid.radius()[1..=n],
            grid.step(),
            mode,
            end,
            end,
        )
    }

    pub fn mode(&self) -> u32 {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    fn coupling_at(&self, j: usize) -> f64 {
        self.coupling.get(j).copied().unwrap_or(0.0)
    }

    /// Diagonal entry `A_jj`.
    pub fn diagonal(&self, j: usize) -> f64 {
        let left = if j > 0 { self.coupling[j - 1] } else { 0.0 };
        left + self.coupling_at(j) + self.excess[j]
    }

    /// `A f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut v = self.diagonal(j) * f[j];
                if j > 0 {
                    v -= self.coupling[j - 1] * f[j - 1];
                }
                if j + 1 < n {
                    v -= self.coupling[j] * f[j + 1];
                }
                v
            })
            .collect()
    }

    /// `f^T A f`, summed edge by edge so constants give exactly zero when
    /// there is no potential.
    pub fn energy(&self, f: &[f64]) -> f64 {
        let flux: f64 = self
            .coupling
            .iter()
            .zip(f.windows(2))
            .map(|(c, w)| c * (w[1] - w[0]).powi(2))
            .sum();
        let site: f64 = self.excess.iter().zip(f).map(|(e, v)| e * v * v).sum();
        flux + site
    }

    /// `f^T M f`.
    pub fn norm_sq(&self, f: &[f64]) -> f64 {
        self.mass.iter().zip(f).map(|(m, v)| m * v * v).sum()
    }

    /// Discrete Rayleigh quotient `f^T A f / f^T M f`.
    pub fn rayleigh_quotient(&self, f: &[f64]) -> f64 {
        self.energy(f) / self.norm_sq(f)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut surplus = 0.0;
        let mut prev_pivot = 1.0;
        for j in 0..n {
            let delta = self.excess[j] - sigma * self.mass[j];
            let carried = if j == 0 {
                0.0
            } else {
                let c = self.coupling[j - 1];
                c * surplus / prev_pivot
            };
            surplus = delta + carried;
            let mut pivot = surplus + self.coupling_at(j);
            if pivot < 0.0 {
                count += 1;
            }
            if pivot == 0.0 {
                pivot = f64::MIN_POSITIVE.max(f64::EPSILON * self.diagonal(j).abs());
            }
            prev_pivot = pivot;
        }
        count
    }

    /// Gershgorin bound on the largest eigenvalue of `M^{-1} A`.
    pub fn upper_bound(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let left = if j > 0 { self.coupling[j - 1] } else { 0.0 };
                (self.diagonal(j) + left + self.coupling_at(j)) / self.mass[j]
            })
            .fold(0.0, f64::max)
    }

    /// The `k` smallest eigenvalues in ascending order.
    pub fn smallest(&self, k: usize) -> Result<Vec<f64>> {
        let k = k.min(self.dim());
        let upper = self.upper_bound() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        let floor = upper * 1e-30;
        let mut out = Vec::with_capacity(k);
        let mut lo = 0.0;
        for index in 0..k {
            if self.count_below(upper) <= index {
                return Err(Error::SolverNonConvergence { index });
            }
            let (mut a, mut b) = (lo, upper);
            for _ in 0..2000 {
                if b - a <= (4.0 * f64::EPSILON * b).max(floor) {
                    break;
                }
                let mid = 0.5 * (a + b);
                if self.count_below(mid) <= index {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            out.push(0.5 * (a + b));
            lo = a;
        }
        Ok(out)
    }
}

/// The `k` smallest eigenvalues of one angular mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSpectrum {
    pub m: u32,
    pub eigenvalues: Vec<f64>,
    pub n: usize,
}

impl ModeSpectrum {
    /// First eigenvalue that is not the `m = 0` constant mode.
    pub fn first_nonzero(&self) -> Result<f64> {
        if self.m != 0 {
            return Ok(self.eigenvalues[0]);
        }
        let scale = self.eigenvalues.iter().copied().fold(0.0, f64::max);
        let threshold = ZERO_MODE_THRESHOLD * scale;
        let (lambda0, lambda1) = (self.eigenvalues[0], self.eigenvalues[1]);
        if lambda0 > threshold || lambda1 <= threshold {
            return Err(Error::ZeroModeAmbiguity {
                lambda0,
                lambda1,
                threshold,
            });
        }
        Ok(lambda1)
    }
}

pub fn mode_eigenvalues(grid: &MeridianGrid, m: u32, k: usize) -> Result<ModeSpectrum> {
    if grid.n() < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse {
            n: grid.n(),
            min: MIN_GRID_NODES,
        });
    }
    if k == 0 {
        return Err(Error::InvalidParams(
            "eigenvalue count must be at least 1".into(),
        ));
    }
    // the zero mode occupies one slot for m = 0
    let k = if m == 0 { k.max(2) } else { k };
    let eigenvalues = ModeOperator::for_grid(grid, m).smallest(k)?;
    Ok(ModeSpectrum {
        m,
        eigenvalues,
        n: grid.n(),
    })
}

/// First nonzero eigenvalue over modes `0..=m_max`, with the per-mode
/// spectra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub lambda1: f64,
    pub mode_of_lambda1: u32,
    pub per_mode: Vec<ModeSpectrum>,
    /// `|lambda1(n) - lambda1(n/2)| / lambda1(n)`.
    pub convergence_gap: f64,
}

fn lowest_nonzero(
    grid: &MeridianGrid,
    m_max: u32,
    k: usize,
) -> Result<(f64, u32, Vec<ModeSpectrum>)> {
    let per_mode = (0..=m_max)
        .map(|m| mode_eigenvalues(grid, m, k))
        .collect::<Result<Vec<_>>>()?;
    let mut best = (f64::INFINITY, 0);
    for spec in &per_mode {
        let v = spec.first_nonzero()?;
        if v < best.0 {
            best = (v, spec.m);
        }
    }
    Ok((best.0, best.1, per_mode))
}

/// `lambda1` over modes `0..=m_max`, with a half-resolution recomputation
/// for the convergence gap. Needs `n >= 200`.
pub fn first_eigenvalue(grid: &MeridianGrid, m_max: u32, k: usize) -> Result<SpectrumResult> {
    if m_max < 1 {
        return Err(Error::InvalidParams("m_max must be at least 1".into()));
    }
    let (lambda1, mode_of_lambda1, per_mode) = lowest_nonzero(grid, m_max, k)?;
    let coarse = grid.rebuild(grid.n() / 2)?;
    let (coarse_lambda1, _, _) = lowest_nonzero(&coarse, m_max, k)?;
    Ok(SpectrumResult {
        lambda1,
        mode_of_lambda1,
        per_mode,
        convergence_gap: (lambda1 - coarse_lambda1).abs() / lambda1,
    })
}

/// `lambda1` of the full meridian against the first eigenvalue of the
/// half meridian, reflecting at the pole and pinned at the plane of
/// symmetry (the odd `m = 0` branch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub full_lambda1: f64,
    pub half_lambda1: f64,
    pub rel_disagreement: f64,
}

/// Tolerance on the mirror deviation accepted by [`symmetry_crosscheck`].
pub const MIRROR_TOLERANCE: f64 = 1e-8;

pub fn symmetry_crosscheck(grid: &MeridianGrid) -> Result<SymmetryReport> {
    let deviation = grid.mirror_deviation();
    if deviation > MIRROR_TOLERANCE {
        return Err(Error::AsymmetricGrid { deviation });
    }
    let (full_lambda1, _, _) = lowest_nonzero(grid, 1, 2)?;

    // The half problem gets its own nodes: n interior points on [0, T/2].
    let source = grid.source();
    let half = 0.5 * grid.length();
    let n = grid.n();
    let step = half / (n + 1) as f64;
    let at = |t: f64| source.radius_at((half - t).max(0.0));
    let radius: Vec<f64> = (1..=n).map(|j| at(j as f64 * step)).collect();
    let faces: Vec<f64> = (0..=n).map(|j| at((j as f64 + 0.5) * step)).collect();
    let op = ModeOperator::assemble(
        &faces,
        &radius,
        step,
        0,
        EndCondition::Neumann,
        EndCondition::Dirichlet,
    );
    let half_lambda1 = op.smallest(1)?[0];
    Ok(SymmetryReport {
        full_lambda1,
        half_lambda1,
        rel_disagreement: (half_lambda1 - full_lambda1).abs() / full_lambda1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{build_meridian, DumbbellParams, RoundSphere};
    use nalgebra::{DMatrix, SymmetricEigen};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Dense symmetric eigenvalues of `M^{-1/2} A M^{-1/2}`.
    fn dense_eigenvalues(op: &ModeOperator) -> Vec<f64> {
        let n = op.dim();
        let a = DMatrix::from_fn(n, n, |i, j| {
            let v = if i == j {
                op.diagonal(i)
            } else if i + 1 == j {
                -op.coupling[i]
            } else if j + 1 == i {
                -op.coupling[j]
            } else {
                0.0
            };
            v / (op.mass[i] * op.mass[j]).sqrt()
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn sturm_bisection_matches_dense_solver() {
        let radius = [0.3, 0.9, 1.4, 1.1, 0.7, 0.2, 0.5];
        let faces = [0.1, 0.6, 1.2, 1.3, 0.9, 0.4, 0.3, 0.2];
        for (mode, l, r) in [
            (0, EndCondition::Neumann, EndCondition::Neumann),
            (1, EndCondition::Dirichlet, EndCondition::Dirichlet),
            (0, EndCondition::Neumann, EndCondition::Dirichlet),
            (3, EndCondition::Dirichlet, EndCondition::Neumann),
        ] {
            let op = ModeOperator::assemble(&faces, &radius, 0.37, mode, l, r);
            let dense = dense_eigenvalues(&op);
            let ours = op.smallest(radius.len()).unwrap();
            for (a, b) in ours.iter().zip(&dense) {
                assert!(
                    (a - b).abs() <= 1e-10 * dense[dense.len() - 1],
                    "{ours:?} vs {dense:?}"
                );
            }
        }
    }

    #[test]
    fn constants_have_zero_energy() {
        let grid = build_meridian(&DumbbellParams::new(2.0, 1.0, 0.1).unwrap(), 500).unwrap();
        let op = ModeOperator::for_grid(&grid, 0);
        let ones = vec![1.0; op.dim()];
        assert_eq!(op.rayleigh_quotient(&ones), 0.0);
        assert!(op.apply(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn unit_sphere_mode_zero() {
        let grid = RoundSphere::new(1.0).unwrap().meridian(4000).unwrap();
        let spec = mode_eigenvalues(&grid, 0, 3).unwrap();
        assert!(spec.eigenvalues[0].abs() < 1e-8);
        assert!(rel(spec.eigenvalues[1], 2.0) < 5e-3);
        assert!(rel(spec.eigenvalues[2], 6.0) < 5e-3);
    }

    #[test]
    fn unit_sphere_mode_one() {
        let grid = RoundSphere::new(1.0).unwrap().meridian(4000).unwrap();
        let spec = mode_eigenvalues(&grid, 1, 2).unwrap();
        assert!(
            rel(spec.eigenvalues[0], 2.0) < 5e-3,
            "{:?}",
            spec.eigenvalues
        );
        assert!(rel(spec.eigenvalues[1], 6.0) < 5e-3);
    }

    #[test]
    fn unit_sphere_first_eigenvalue() {
        let grid = RoundSphere::new(1.0).unwrap().meridian(4000).unwrap();
        let res = first_eigenvalue(&grid, 2, 4).unwrap();
        assert!(rel(res.lambda1, 2.0) < 5e-3);
        assert!(res.mode_of_lambda1 <= 1);
        assert!(res.convergence_gap < 0.01);
    }

    #[test]
    fn dumbbell_first_eigenvalue_below_test_bound() {
        let p = DumbbellParams::new(2.0, 1.0, 0.1).unwrap();
        let grid = build_meridian(&p, 4000).unwrap();
        let spec = mode_eigenvalues(&grid, 0, 2).unwrap();
        assert!(spec.eigenvalues[1] > 0.0 && spec.eigenvalues[1] <= 0.05);
        let res = first_eigenvalue(&grid, 2, 4).unwrap();
        assert_eq!(res.mode_of_lambda1, 0);
        assert!(res.lambda1 <= 0.05);
        let m1 = res.per_mode[1].eigenvalues[0];
        assert!(res.lambda1 < m1);

        let halved = build_meridian(&p.with_eps(0.05).unwrap(), 4000).unwrap();
        let thinner = first_eigenvalue(&halved, 2, 4).unwrap();
        assert!(thinner.lambda1 < res.lambda1);
    }

    #[test]
    fn symmetry_crosscheck_sphere_and_dumbbell() {
        let sphere = RoundSphere::new(1.0).unwrap().meridian(4000).unwrap();
        let rep = symmetry_crosscheck(&sphere).unwrap();
        assert!(rel(rep.half_lambda1, 2.0) < 5e-3);
        let p = DumbbellParams::new(2.0, 1.0, 0.1).unwrap();
        let rep = symmetry_crosscheck(&build_meridian(&p, 4000).unwrap()).unwrap();
        assert!(rep.rel_disagreement <= 0.01, "{rep:?}");
    }

    #[test]
    fn symmetry_disagreement_shrinks_quadratically() {
        let p = DumbbellParams::new(2.0, 1.0, 0.1).unwrap();
        let coarse = symmetry_crosscheck(&build_meridian(&p, 200).unwrap()).unwrap();
        let fine = symmetry_crosscheck(&build_meridian(&p, 4000).unwrap()).unwrap();
        let ratio = coarse.rel_disagreement / fine.rel_disagreement;
        // (4001 / 201)^2 ~ 396
        assert!(
            (100.0..=1600.0).contains(&ratio),
            "ratio {ratio}: {coarse:?} {fine:?}"
        );
    }

    #[test]
    fn second_order_grid_convergence() {
        let p = DumbbellParams::new(2.0, 1.0, 0.1).unwrap();
        let grid = build_meridian(&p, 500).unwrap();
        let lam: Vec<f64> = [500, 1001, 2003, 4007]
            .iter()
            .map(|&n| {
                mode_eigenvalues(&grid.rebuild(n).unwrap(), 0, 2)
                    .unwrap()
                    .eigenvalues[1]
            })
            .collect();
        let gaps: Vec<f64> = lam.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for g in gaps.windows(2) {
            let order = (g[0] / g[1]).log2();
            assert!(
                (1.6..=2.4).contains(&order),
                "order {order}, lambdas {lam:?}"
            );
        }
    }

    #[test]
    fn errors() {
        let grid = RoundSphere::new(1.0).unwrap().meridian(150).unwrap();
        assert!(mode_eigenvalues(&grid, 0, 0).is_err());
        assert!(first_eigenvalue(&grid, 0, 2).is_err());
        // n/2 = 75 is below the minimum grid size
        assert!(matches!(
            first_eigenvalue(&grid, 1, 2),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
