//! Flat-tailed smooth step
//!
//! ```text
//! s(x) = 0                                 x <= 0
//! s(x) = 1 / (1 + exp(1/x - 1/(1 - x)))    0 < x < 1
//! s(x) = 1                                 x >= 1
//! ```
//!
//! All derivatives vanish at both ends. Writing `t = 1/x - 1/(1-x)` and
//! `r = -t' = 1/x^2 + 1/(1-x)^2`, the derivatives factor through
//! `w = s (1 - s)`:
//!
//! ```text
//! s'  = w r
//! s'' = w ((1 - 2s) r^2 + r'),   r' = -2/x^3 + 2/(1-x)^3
//! ```
//!
//! `w` is evaluated from `exp(-|t|)` so nothing overflows; once it underflows
//! the derivatives are exactly zero. The log-space helpers keep the tails
//! resolvable far below the smallest subnormal.

use crate::error::{Error, Result};

/// Step value and first two derivatives at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEval {
    pub x: f64,
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
}

#[inline]
fn exponent(x: f64) -> f64 {
    1.0 / x - 1.0 / (1.0 - x)
}

#[inline]
fn rate(x: f64) -> f64 {
    let y = 1.0 - x;
    1.0 / (x * x) + 1.0 / (y * y)
}

#[inline]
fn rate_derivative(x: f64) -> f64 {
    let y = 1.0 - x;
    -2.0 / (x * x * x) + 2.0 / (y * y * y)
}

/// `(s, 1 - s, s (1 - s))` from the exponent, each without cancellation.
#[inline]
fn logistic_parts(t: f64) -> (f64, f64, f64) {
    let e = (-t.abs()).exp();
    let big = 1.0 / (1.0 + e);
    let small = e / (1.0 + e);
    let w = small * big;
    if t > 0.0 {
        (small, big, w)
    } else {
        (big, small, w)
    }
}

/// Evaluates `s`, `s'` and `s''` at `x`. Total over the finite reals.
pub fn step_eval(x: f64) -> StepEval {
    if x.is_nan() {
        return StepEval {
            x,
            s: f64::NAN,
            s1: f64::NAN,
            s2: f64::NAN,
        };
    }
    if x <= 0.0 {
        return StepEval {
            x,
            s: 0.0,
            s1: 0.0,
            s2: 0.0,
        };
    }
    if x >= 1.0 {
        return StepEval {
            x,
            s: 1.0,
            s1: 0.0,
            s2: 0.0,
        };
    }
    let (s, sc, w) = logistic_parts(exponent(x));
    if w == 0.0 {
        return StepEval {
            x,
            s,
            s1: 0.0,
            s2: 0.0,
        };
    }
    let r = rate(x);
    let s1 = w * r;
    let s2 = w * ((sc - s) * r * r + rate_derivative(x));
    StepEval { x, s, s1, s2 }
}

/// `s(x)` alone.
#[inline]
pub fn step(x: f64) -> f64 {
    step_eval(x).s
}

/// Logarithmic derivatives `(s'/s, s''/s)` for `0 < x < 1`.
///
/// Both stay finite where `s` itself underflows, which is what the sign
/// analysis of the neck profile needs.
pub fn step_log_ratios(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain {
            what: "step_log_ratios",
            value: x,
        });
    }
    let (s, sc, _) = logistic_parts(exponent(x));
    let r = rate(x);
    Ok((sc * r, sc * ((sc - s) * r * r + rate_derivative(x))))
}

/// `ln s^(order)(x)` for `order <= 2` and `0 < x < 1`.
///
/// Returns `None` when the derivative is not strictly positive (so has no
/// logarithm), or when `order > 2`.
pub fn ln_step_derivative(order: usize, x: f64) -> Option<f64> {
    if !(x > 0.0 && x < 1.0) {
        return None;
    }
    let t = exponent(x);
    let tail = (-t.abs()).exp().ln_1p();
    // ln w = -|t| - 2 ln(1 + e^{-|t|})
    let ln_w = -t.abs() - 2.0 * tail;
    match order {
        0 => Some(-(t.max(0.0) + tail)),
        1 => Some(ln_w + rate(x).ln()),
        2 => {
            let (s, sc, _) = logistic_parts(t);
            let r = rate(x);
            let bracket = (sc - s) * r * r + rate_derivative(x);
            (bracket > 0.0).then(|| ln_w + bracket.ln())
        }
        _ => None,
    }
}

/// `ln( s'(2x)^a s''(2x)^b / s(x) )`, assembled from logarithms.
pub fn ln_step_decay_ratio(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) || !(a + b > 2.0) {
        return Err(Error::Domain {
            what: "step_decay_ratio exponents a + b",
            value: a + b,
        });
    }
    if !(x > 0.0 && x < 0.5) {
        return Err(Error::Domain {
            what: "step_decay_ratio abscissa",
            value: x,
        });
    }
    let mut ln = -ln_step_derivative(0, x).expect("0 < x < 1");
    if a > 0.0 {
        ln += a * ln_step_derivative(1, 2.0 * x).expect("0 < 2x < 1");
    }
    if b > 0.0 {
        ln += b * ln_step_derivative(2, 2.0 * x).ok_or(Error::Domain {
            what: "step_decay_ratio needs s''(2x) > 0",
            value: x,
        })?;
    }
    Ok(ln)
}

/// `s'(2x)^a s''(2x)^b / s(x)` for `0 < x < 1/2` and `a + b > 2`.
pub fn step_decay_ratio(x: f64, a: f64, b: f64) -> Result<f64> {
    ln_step_decay_ratio(x, a, b).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn clamped_regions() {
        let e = step_eval(-1.0);
        assert_eq!((e.s, e.s1, e.s2), (0.0, 0.0, 0.0));
        let e = step_eval(2.0);
        assert_eq!((e.s, e.s1, e.s2), (1.0, 0.0, 0.0));
        let e = step_eval(0.0);
        assert_eq!((e.s, e.s1, e.s2), (0.0, 0.0, 0.0));
        let e = step_eval(1.0);
        assert_eq!((e.s, e.s1, e.s2), (1.0, 0.0, 0.0));
    }

    #[test]
    fn midpoint_values() {
        let e = step_eval(0.5);
        assert_eq!(e.s, 0.5);
        // s(1-s) r = 1/4 * 8
        assert!((e.s1 - 2.0).abs() < 1e-14);
        let fd = central(step, 0.5, 1e-6);
        assert!((fd - 2.0).abs() / 2.0 < 1e-6, "fd = {fd}");
        assert!(e.s2.abs() < 1e-12);
    }

    #[test]
    fn small_abscissa_underflows_cleanly() {
        let e = step_eval(1e-3);
        // exponent 1/x - 1/(1-x) = 999 - 1/999 ~ 998.999, e^-999 ~ 1e-434
        let exponent_oracle = 1000.0 - 1.0 / 0.999;
        assert!(exponent_oracle > 998.0);
        assert!(e.s < 1e-300);
        assert!(e.s.is_finite() && e.s1.is_finite() && e.s2.is_finite());
        let ln = ln_step_derivative(0, 1e-3).unwrap();
        assert!((ln + exponent_oracle).abs() < 1e-9);
    }

    #[test]
    fn extreme_inputs_are_finite() {
        for x in [
            0.0,
            1.0,
            1e-308,
            -1e-308,
            5e-324,
            1.0 - 1e-16,
            f64::MAX,
            f64::MIN,
        ] {
            let e = step_eval(x);
            assert!(
                e.s.is_finite() && e.s1.is_finite() && e.s2.is_finite(),
                "x = {x}"
            );
        }
    }

    #[test]
    fn decay_ratio_matches_naive_evaluation() {
        let x = 0.4;
        let naive = step_eval(2.0 * x).s1.powi(3) / step_eval(x).s;
        let logged = step_decay_ratio(x, 3.0, 0.0).unwrap();
        assert!(logged > 0.0 && logged.is_finite());
        assert!(
            (logged - naive).abs() / naive < 1e-10,
            "{logged} vs {naive}"
        );
    }

    #[test]
    fn decay_ratio_shrinks_towards_zero() {
        let xs = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
        let v: Vec<f64> = xs
            .iter()
            .map(|&x| step_decay_ratio(x, 2.5, 0.0).unwrap())
            .collect();
        for w in v.windows(2) {
            assert!(w[1] < w[0], "{v:?}");
        }
        assert!(v[4] < 1e-80);
    }

    #[test]
    fn decay_ratio_rejects_weak_exponents() {
        assert!(matches!(
            step_decay_ratio(0.4, 1.0, 1.0),
            Err(Error::Domain { .. })
        ));
        assert!(step_decay_ratio(0.6, 3.0, 0.0).is_err());
        assert!(step_decay_ratio(0.0, 3.0, 0.0).is_err());
        // s''(2x) < 0 once 2x > 1/2
        assert!(step_decay_ratio(0.4, 0.0, 2.5).is_err());
    }

    #[test]
    fn log_ratios_agree_with_direct_quotients() {
        for x in [0.05, 0.2, 0.5, 0.7, 0.93] {
            let e = step_eval(x);
            let (d1, d2) = step_log_ratios(x).unwrap();
            assert!((d1 - e.s1 / e.s).abs() <= 1e-12 * d1.abs().max(1.0));
            assert!((d2 - e.s2 / e.s).abs() <= 1e-10 * d2.abs().max(1.0));
        }
    }

    #[test]
    fn log_derivatives_match_linear_ones() {
        for x in [0.03, 0.1, 0.3] {
            let e = step_eval(x);
            assert!((ln_step_derivative(0, x).unwrap() - e.s.ln()).abs() < 1e-12);
            assert!((ln_step_derivative(1, x).unwrap() - e.s1.ln()).abs() < 1e-12);
            assert!((ln_step_derivative(2, x).unwrap() - e.s2.ln()).abs() < 1e-11);
        }
        assert!(ln_step_derivative(2, 0.8).is_none());
        assert!(ln_step_derivative(3, 0.2).is_none());
    }

    #[test]
    fn flat_tails_annihilate_powers() {
        for n in 0..=2 {
            for m in 0..=4 {
                let seq: Vec<f64> = (3..=12)
                    .map(|k| {
                        let x = (-(k as f64)).exp2();
                        ln_step_derivative(n, x).unwrap() - m as f64 * x.ln()
                    })
                    .collect();
                for w in seq.windows(2) {
                    assert!(w[1] < w[0], "n={n} m={m}: {seq:?}");
                }
                assert!(seq[seq.len() - 1] < -690.0);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn derivatives_match_finite_differences(x in 0.05f64..0.95) {
                let h = 1e-6;
                let e = step_eval(x);
                let fd1 = central(step, x, h);
                let fd2 = central(|y| step_eval(y).s1, x, h);
                prop_assert!((e.s1 - fd1).abs() <= 1e-6);
                prop_assert!((e.s2 - fd2).abs() <= 1e-5);
            }

            #[test]
            fn range_and_monotonicity(x in -2.0f64..3.0) {
                let e = step_eval(x);
                prop_assert!((0.0..=1.0).contains(&e.s));
                prop_assert!(e.s1 >= 0.0);
            }
        }
    }

    #[test]
    fn symmetry_on_dense_grid() {
        let n = 10_000;
        let worst = (0..=n)
            .map(|j| {
                let x = j as f64 / n as f64;
                (step(x) + step(1.0 - x) - 1.0).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-14, "worst = {worst}");
    }
}
