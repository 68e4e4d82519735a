//! Globally adaptive Gauss–Legendre quadrature.
//!
//! Each interval is integrated with a 15-point Gauss–Legendre panel and
//! with the same panel on its two halves; the difference is the error
//! estimate. The interval with the largest estimate is bisected until the
//! summed estimate drops below `rel_tol * ∫|f|` (or `abs_tol`). Measuring
//! against `∫|f|` keeps integrals that cancel to zero (Gauss–Bonnet on a
//! neck, odd test functions) from refining forever.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::LazyLock;

use crate::error::{Error, Result};

const PANEL_POINTS: usize = 15;

/// Nodes and weights of the 15-point rule on [-1, 1], by Newton iteration
/// on the Legendre polynomial.
static GAUSS_LEGENDRE: LazyLock<([f64; PANEL_POINTS], [f64; PANEL_POINTS])> = LazyLock::new(|| {
    let n = PANEL_POINTS;
    let mut nodes = [0.0; PANEL_POINTS];
    let mut weights = [0.0; PANEL_POINTS];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
});

/// Tolerances and limits for [`Quadrature::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any single interval.
    pub max_depth: u32,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_depth: 60,
            max_intervals: 20_000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// `∫|f|` over the same range, the scale the relative tolerance uses.
    pub magnitude: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    value: f64,
    magnitude: f64,
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, evals: &mut usize) -> Result<Panel> {
    let (nodes, weights) = &*GAUSS_LEGENDRE;
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut value = 0.0;
    let mut magnitude = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let at = center + half * x;
        let y = f(at);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand { x: at });
        }
        value += w * y;
        magnitude += w * y.abs();
    }
    *evals += PANEL_POINTS;
    Ok(Panel {
        value: value * half,
        magnitude: magnitude * half.abs(),
    })
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    depth: u32,
    left: Panel,
    right: Panel,
    error: f64,
}

impl Interval {
    fn new<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        depth: u32,
        whole: Panel,
        evals: &mut usize,
    ) -> Result<Self> {
        let m = 0.5 * (a + b);
        let left = panel(f, a, m, evals)?;
        let right = panel(f, m, b, evals)?;
        let error = (whole.value - left.value - right.value).abs();
        Ok(Self {
            a,
            b,
            depth,
            left,
            right,
            error,
        })
    }

    fn value(&self) -> f64 {
        self.left.value + self.right.value
    }

    fn magnitude(&self) -> f64 {
        self.left.magnitude + self.right.magnitude
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, seeding the adaptive
    /// refinement with the given break points (which must be increasing).
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        points: &[f64],
    ) -> Result<Estimate> {
        if points.len() < 2 {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                magnitude: 0.0,
                evaluations: 0,
            });
        }
        let (lo, hi) = (points[0], points[points.len() - 1]);
        let mut evals = 0;
        let mut heap = BinaryHeap::new();
        for w in points.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidParams(format!(
                    "quadrature break points not increasing: {} > {}",
                    w[0], w[1]
                )));
            }
            if w[1] == w[0] {
                continue;
            }
            let whole = panel(&f, w[0], w[1], &mut evals)?;
            heap.push(Interval::new(&f, w[0], w[1], 0, whole, &mut evals)?);
        }

        let totals = |heap: &BinaryHeap<Interval>| {
            heap.iter().fold((0.0, 0.0, 0.0), |(v, m, e), i| {
                (v + i.value(), m + i.magnitude(), e + i.error)
            })
        };
        // Running totals steer the loop; the exact sums decide termination.
        let (mut value, mut magnitude, mut error) = totals(&heap);
        loop {
            if error <= self.abs_tol.max(self.rel_tol * magnitude) {
                (value, magnitude, error) = totals(&heap);
                if error <= self.abs_tol.max(self.rel_tol * magnitude) {
                    return Ok(Estimate {
                        value,
                        error,
                        magnitude,
                        evaluations: evals,
                    });
                }
            }
            let Some(worst) = heap.pop() else {
                return Ok(Estimate {
                    value,
                    error,
                    magnitude,
                    evaluations: evals,
                });
            };
            if worst.depth >= self.max_depth || heap.len() + 2 > self.max_intervals {
                return Err(Error::QuadratureNonConvergence {
                    a: lo,
                    b: hi,
                    estimate: value,
                    error,
                });
            }
            let m = 0.5 * (worst.a + worst.b);
            let depth = worst.depth + 1;
            let left = Interval::new(&f, worst.a, m, depth, worst.left, &mut evals)?;
            let right = Interval::new(&f, m, worst.b, depth, worst.right, &mut evals)?;
            value += left.value() + right.value() - worst.value();
            magnitude += left.magnitude() + right.magnitude() - worst.magnitude();
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
    }
}

/// Break points `a, a + (b-a) 2^-levels, ..., a + (b-a)/2, b`, graded
/// geometrically toward `a`.
pub fn graded_breaks(a: f64, b: f64, levels: u32) -> Vec<f64> {
    let mut pts = Vec::with_capacity(levels as usize + 2);
    pts.push(a);
    for j in (1..=levels).rev() {
        pts.push(a + (b - a) * (-(j as f64)).exp2());
    }
    pts.push(b);
    pts
}

/// Plain 15-point panel on `[a, b]`, no adaptivity.
pub fn gauss_legendre_panel<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = &*GAUSS_LEGENDRE;
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(center + half * x))
        .sum::<f64>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (nodes, weights) = &*GAUSS_LEGENDRE;
        assert!((weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..30 {
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            let got: f64 = nodes
                .iter()
                .zip(weights)
                .map(|(x, w)| w * x.powi(deg))
                .sum();
            assert!((got - exact).abs() < 1e-13, "degree {deg}: {got}");
        }
    }

    #[test]
    fn smooth_integrals() {
        let q = Quadrature::default();
        let est = q.integrate(f64::sin, 0.0, PI).unwrap();
        assert!((est.value - 2.0).abs() < 1e-12);
        let est = q.integrate(|x| (-x * x).exp(), -8.0, 8.0).unwrap();
        assert!((est.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cancelling_integral_terminates() {
        let q = Quadrature::default();
        let est = q.integrate(|x| x.sin(), -3.0, 3.0).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn square_root_endpoint() {
        let q = Quadrature::default();
        let est = q.integrate(f64::sqrt, 0.0, 1.0).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn kink_with_breaks() {
        let q = Quadrature::default();
        let est = q
            .integrate_with_breaks(|x: f64| x.abs(), &[-1.0, 0.0, 2.0])
            .unwrap();
        assert!((est.value - 2.5).abs() < 1e-14);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let q = Quadrature::default();
        let err = q
            .integrate(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn divergent_integral_reports_non_convergence() {
        let q = Quadrature {
            max_depth: 20,
            ..Quadrature::default()
        };
        let err = q
            .integrate(|x| 1.0 / (x + 1e-300).sqrt().powi(3), 0.0, 1.0)
            .unwrap_err();
        assert!(
            matches!(err, Error::QuadratureNonConvergence { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn graded_breaks_shape() {
        let b = graded_breaks(1.0, 3.0, 3);
        assert_eq!(b, vec![1.0, 1.25, 1.5, 2.0, 3.0]);
    }
}
