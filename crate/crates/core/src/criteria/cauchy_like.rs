//! The partial-sum residual probe: axis derivatives must exist, and
//! `f(x) - sum_i f(x^i e_i)` must be o(rho) along every sampled direction.
//! The residual needs no derivatives at all, which is what makes this the
//! cheapest and sharpest of the probes.

use crate::asymptotics::{collect_decay, estimate_order};
use crate::corpus::{partial_values, ScalarField};
use crate::numcore::{make_directions, unit_axis, DirectionSet, Vector};

use super::{
    aggregate_classifications, test_partial_derivatives, worst_index, CriterionVerdict,
    EvidenceItem, ProbeConfig, Verdict,
};

pub const CRITERION_NAME: &str = "cauchy_like";

/// `f(x) - sum of partial values at x`. Zero identically for linear
/// functions; o(rho) exactly when f is differentiable (given the axis
/// derivatives exist).
pub fn cauchy_like_residual(f: &ScalarField, x: &Vector) -> f64 {
    f.eval(x) - partial_values(f, x).iter().sum::<f64>()
}

pub fn probe_cauchy_like(f: &ScalarField, cfg: &ProbeConfig) -> CriterionVerdict {
    let dirs = make_directions(f.dim, cfg.extra_dirs, cfg.seed).expect("dim >= 1");
    probe_cauchy_like_with_dirs(f, &dirs, cfg)
}

pub fn probe_cauchy_like_with_dirs(
    f: &ScalarField,
    dirs: &DirectionSet,
    cfg: &ProbeConfig,
) -> CriterionVerdict {
    let mut notes = Vec::new();

    // Condition (a): every axis derivative exists at the origin.
    let partials = test_partial_derivatives(f, cfg);
    for axis in &partials.axes {
        if let Some(note) = &axis.note {
            notes.push(note.clone());
        }
    }
    if partials.any_inconclusive() {
        return CriterionVerdict {
            criterion: CRITERION_NAME.into(),
            verdict: Verdict::Inconclusive,
            evidence: Vec::new(),
            worst_direction: None,
            notes,
        };
    }
    if !partials.all_exist() {
        // A missing axis derivative already refutes differentiability; the
        // residual is not consulted.
        let failing = partials
            .axes
            .iter()
            .find(|a| !a.exists)
            .expect("some axis failed");
        let worst_direction = unit_axis(failing.axis, f.dim).ok();
        let evidence = partials
            .axes
            .iter()
            .filter(|a| !a.exists)
            .filter_map(|a| {
                a.gap_evidence.as_ref().map(|samples| EvidenceItem {
                    context: samples.context.clone(),
                    samples: samples.clone(),
                    estimate: estimate_order(samples, &cfg.tol),
                })
            })
            .collect();
        return CriterionVerdict {
            criterion: CRITERION_NAME.into(),
            verdict: Verdict::Refuted,
            evidence,
            worst_direction,
            notes,
        };
    }

    // Condition (b): the residual decays faster than rho along every
    // direction.
    let mut evidence = Vec::new();
    let mut classifications = Vec::new();
    let mut eval_failed = false;
    for (i, u) in dirs.directions().iter().enumerate() {
        let context = format!("residual dir {i:02} {}", u.label());
        match collect_decay(
            &context,
            |rho| cauchy_like_residual(f, &u.scaled(rho)),
            &cfg.schedule,
        ) {
            Ok(samples) => {
                let estimate = estimate_order(&samples, &cfg.tol);
                classifications.push(estimate.classification);
                evidence.push(EvidenceItem {
                    context,
                    samples,
                    estimate,
                });
            }
            Err(err) => {
                notes.push(err.to_string());
                eval_failed = true;
            }
        }
    }

    let mut verdict = aggregate_classifications(&classifications);
    if eval_failed && verdict == Verdict::Consistent {
        verdict = Verdict::Inconclusive;
    }
    let worst_direction = worst_index(&evidence).map(|i| dirs.directions()[i].clone());
    if cfg.schedule.floor_truncated() {
        notes.push("schedule truncated at the radius floor".into());
    }
    CriterionVerdict {
        criterion: CRITERION_NAME.into(),
        verdict,
        evidence,
        worst_direction,
        notes,
    }
}
