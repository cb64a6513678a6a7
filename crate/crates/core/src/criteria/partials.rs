//! One-sided partial-derivative existence tests.
//!
//! Symmetric differences are blind to even kinks (|t| differentiates to 0
//! through them), so existence is decided from the two one-sided quotient
//! sequences `f(+t e_i)/t` and `f(-t e_i)/(-t)` separately: each must
//! settle, and the two limits must agree.

use crate::asymptotics::DecaySamples;
use crate::corpus::ScalarField;
use crate::numcore::unit_axis;

use super::ProbeConfig;

/// Existence evidence for one axis.
#[derive(Debug, Clone)]
pub struct AxisDerivative {
    /// 1-based axis index.
    pub axis: usize,
    pub exists: bool,
    /// Set when evaluation failed and nothing can be concluded.
    pub inconclusive: bool,
    /// Midpoint of the one-sided limits when they exist and agree.
    pub value: Option<f64>,
    pub left_limit: Option<f64>,
    pub right_limit: Option<f64>,
    /// Successive quotient gaps (max of the two sides) per step.
    pub gap_evidence: Option<DecaySamples>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PartialDerivativeResult {
    pub axes: Vec<AxisDerivative>,
}

impl PartialDerivativeResult {
    pub fn all_exist(&self) -> bool {
        self.axes.iter().all(|a| a.exists)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.axes.iter().any(|a| a.inconclusive)
    }

    /// The gradient candidate when every axis derivative exists.
    pub fn gradient(&self) -> Option<Vec<f64>> {
        self.axes.iter().map(|a| a.value).collect()
    }
}

fn converged(quotients: &[f64], tol: f64, needed: usize) -> bool {
    if quotients.len() < needed + 1 {
        return false;
    }
    let gaps: Vec<f64> = quotients.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    gaps.iter().rev().take(needed).all(|g| *g < tol)
}

/// One-sided difference quotients along every axis over the schedule.
pub fn test_partial_derivatives(f: &ScalarField, cfg: &ProbeConfig) -> PartialDerivativeResult {
    let steps = cfg.schedule.radii();
    let axes = (1..=f.dim)
        .map(|axis| {
            let e = unit_axis(axis, f.dim).expect("axis in range");
            let mut right = Vec::with_capacity(steps.len());
            let mut left = Vec::with_capacity(steps.len());
            for &t in &steps {
                let plus = f.eval(&e.scaled(t));
                let minus = f.eval(&e.scaled(-t));
                if !plus.is_finite() || !minus.is_finite() {
                    return AxisDerivative {
                        axis,
                        exists: false,
                        inconclusive: true,
                        value: None,
                        left_limit: None,
                        right_limit: None,
                        gap_evidence: None,
                        note: Some(format!("axis {axis}: non-finite evaluation at t={t:e}")),
                    };
                }
                right.push(plus / t);
                left.push(minus / -t);
            }

            let gap_pairs: Vec<(f64, f64)> = steps
                .windows(2)
                .enumerate()
                .map(|(k, w)| {
                    let g_right = (right[k + 1] - right[k]).abs();
                    let g_left = (left[k + 1] - left[k]).abs();
                    (w[1], g_right.max(g_left))
                })
                .collect();
            let gap_evidence =
                DecaySamples::new(&format!("axis {axis} quotient gaps"), gap_pairs, false).ok();

            let right_ok = converged(&right, cfg.deriv_tol, cfg.deriv_consecutive);
            let left_ok = converged(&left, cfg.deriv_tol, cfg.deriv_consecutive);
            let right_limit = right.last().copied();
            let left_limit = left.last().copied();
            let agree = match (left_limit, right_limit) {
                (Some(l), Some(r)) => (l - r).abs() <= cfg.deriv_tol,
                _ => false,
            };
            let exists = right_ok && left_ok && agree;
            let note = if exists {
                None
            } else if !right_ok || !left_ok {
                Some(format!("axis {axis}: one-sided quotients did not settle"))
            } else {
                Some(format!(
                    "axis {axis}: one-sided limits disagree ({} vs {})",
                    left_limit.unwrap(),
                    right_limit.unwrap()
                ))
            };
            AxisDerivative {
                axis,
                exists,
                inconclusive: false,
                value: if exists {
                    Some((left_limit.unwrap() + right_limit.unwrap()) / 2.0)
                } else {
                    None
                },
                left_limit,
                right_limit,
                gap_evidence,
                note,
            }
        })
        .collect();
    PartialDerivativeResult { axes }
}
