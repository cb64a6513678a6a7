//! The nested sufficient-condition check: order the axes, require the
//! partial derivative at position p to be continuous at the origin when
//! restricted to the subspace spanned by positions p..n, and require the
//! last one merely to exist. When the chain holds the function is
//! differentiable.
//!
//! The check is one-sided by nature: a failing chain says nothing about
//! differentiability (h_osc fails it and is differentiable all the same),
//! so the negative verdict is `ConditionsNotMet`, never `Refuted`.
//! `Inconclusive` is reserved for evaluation failures.

use crate::asymptotics::{classify_vanishing, Classification, DecaySamples, OrderEstimate};
use crate::corpus::ScalarField;
use crate::numcore::{make_directions, unit_axis, Vector};

use super::{test_partial_derivatives, CriterionVerdict, EvidenceItem, ProbeConfig, Verdict};

pub const CRITERION_NAME: &str = "relaxed";

/// Continuity evidence for one axis of the ordering.
#[derive(Debug, Clone)]
pub struct ContinuityModulus {
    /// 1-based axis index.
    pub axis: usize,
    /// 1-based position in the ordering.
    pub position: usize,
    /// Shell modulus series; `None` for the last axis (existence only).
    pub samples: Option<DecaySamples>,
    pub estimate: Option<OrderEstimate>,
    /// Tri-state: vanishing modulus, persistent modulus, or unknown.
    pub continuous: Option<bool>,
    pub note: Option<String>,
}

/// Supremum of `|f_axis(x) - f_axis(0)|` over a sampled shell, by central
/// differences with a step quadratic in the shell radius (the oscillation
/// scale of the corpus's worst members).
fn shell_modulus(
    f: &ScalarField,
    axis: usize,
    deriv0: f64,
    subspace: &[usize],
    cfg: &ProbeConfig,
    position: usize,
) -> Result<DecaySamples, String> {
    let sub_dim = subspace.len();
    let dirs = make_directions(
        sub_dim,
        cfg.extra_dirs,
        cfg.seed.wrapping_add(position as u64),
    )
    .expect("subspace dim >= 1");
    let e_axis = unit_axis(axis, f.dim).expect("axis in range");

    let radii: Vec<f64> = cfg
        .schedule
        .radii()
        .into_iter()
        .filter(|&r| r >= cfg.shell_rho_min)
        .collect();
    if radii.len() < 4 {
        return Err(format!(
            "fewer than 4 shells above the shell floor {:e}",
            cfg.shell_rho_min
        ));
    }

    let mut pairs = Vec::with_capacity(radii.len());
    for &rho in &radii {
        let h = cfg.shell_step_scale * rho * rho;
        let mut sup = 0.0_f64;
        for u in dirs.directions() {
            // Embed the subspace direction into the full space.
            let mut coords = vec![0.0; f.dim];
            for (idx, &ax) in subspace.iter().enumerate() {
                coords[ax - 1] = u.coords()[idx] * rho;
            }
            let x = Vector::new(coords).expect("finite shell point");
            let plus = f.eval(&x.add(&e_axis.scaled(h)));
            let minus = f.eval(&x.sub(&e_axis.scaled(h)));
            if !plus.is_finite() || !minus.is_finite() {
                return Err(format!("non-finite evaluation on shell rho={rho:e}"));
            }
            let deriv = (plus - minus) / (2.0 * h);
            sup = sup.max((deriv - deriv0).abs());
        }
        pairs.push((rho, sup));
    }
    DecaySamples::new(
        &format!("modulus axis {axis} over positions {position}.."),
        pairs,
        false,
    )
    .map_err(|e| e.to_string())
}

/// Check the nested sufficient conditions along `axis_order` (1-based axis
/// indices, "good" variables first).
pub fn check_relaxed_conditions(
    f: &ScalarField,
    axis_order: &[usize],
    cfg: &ProbeConfig,
) -> (CriterionVerdict, Vec<ContinuityModulus>) {
    let n = f.dim;
    let mut notes = Vec::new();

    let mut sorted: Vec<usize> = axis_order.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=n).collect::<Vec<_>>() {
        notes.push(format!(
            "axis order {axis_order:?} is not a permutation of 1..={n}"
        ));
        return (
            CriterionVerdict {
                criterion: CRITERION_NAME.into(),
                verdict: Verdict::Inconclusive,
                evidence: Vec::new(),
                worst_direction: None,
                notes,
            },
            Vec::new(),
        );
    }

    // Every axis derivative must exist at the origin before continuity is
    // even meaningful; reuse the one-sided existence test.
    let partials = test_partial_derivatives(f, cfg);
    if partials.any_inconclusive() {
        for a in &partials.axes {
            if let Some(note) = &a.note {
                notes.push(note.clone());
            }
        }
        return (
            CriterionVerdict {
                criterion: CRITERION_NAME.into(),
                verdict: Verdict::Inconclusive,
                evidence: Vec::new(),
                worst_direction: None,
                notes,
            },
            Vec::new(),
        );
    }

    let mut moduli = Vec::new();
    let mut evidence = Vec::new();
    let mut conditions_met = true;
    let mut eval_failed = false;

    for (idx, &axis) in axis_order.iter().enumerate() {
        let position = idx + 1;
        let axis_info = &partials.axes[axis - 1];
        if !axis_info.exists {
            conditions_met = false;
            notes.push(format!("axis {axis}: derivative missing at the origin"));
            moduli.push(ContinuityModulus {
                axis,
                position,
                samples: None,
                estimate: None,
                continuous: Some(false),
                note: axis_info.note.clone(),
            });
            continue;
        }
        if position == n {
            // Last axis: existence is all the chain asks for.
            moduli.push(ContinuityModulus {
                axis,
                position,
                samples: None,
                estimate: None,
                continuous: None,
                note: Some(format!("axis {axis}: existence only (last position)")),
            });
            continue;
        }

        let deriv0 = axis_info.value.expect("exists implies value");
        let subspace = &axis_order[idx..];
        match shell_modulus(f, axis, deriv0, subspace, cfg, position) {
            Ok(samples) => {
                let (classification, estimate) = classify_vanishing(&samples, &cfg.tol);
                let continuous = match classification {
                    c if c.is_vanishing() => Some(true),
                    Classification::NotLittleO => Some(false),
                    _ => None,
                };
                if continuous != Some(true) {
                    conditions_met = false;
                    notes.push(format!(
                        "axis {axis}: continuity modulus does not vanish over positions {position}.."
                    ));
                }
                evidence.push(EvidenceItem {
                    context: samples.context.clone(),
                    samples: samples.clone(),
                    estimate: estimate.clone(),
                });
                moduli.push(ContinuityModulus {
                    axis,
                    position,
                    samples: Some(samples),
                    estimate: Some(estimate),
                    continuous,
                    note: None,
                });
            }
            Err(msg) => {
                eval_failed = true;
                notes.push(format!("axis {axis}: {msg}"));
                moduli.push(ContinuityModulus {
                    axis,
                    position,
                    samples: None,
                    estimate: None,
                    continuous: None,
                    note: Some(msg),
                });
            }
        }
    }

    let verdict = if eval_failed {
        Verdict::Inconclusive
    } else if conditions_met {
        Verdict::Consistent
    } else {
        Verdict::ConditionsNotMet
    };
    (
        CriterionVerdict {
            criterion: CRITERION_NAME.into(),
            verdict,
            evidence,
            worst_direction: None,
            notes,
        },
        moduli,
    )
}
