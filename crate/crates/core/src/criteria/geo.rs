//! The tangent-plane probe: fit a hyperplane `z = A . x` through the origin
//! by least squares on shells, then test whether the point-to-plane
//! distance `d(x) = |f(x) - A . x| cos(alpha)` vanishes faster than rho.
//!
//! The distance is measured against rho rather than the in-plane projection
//! radius; the two are mutually big-O once d = o(rho), so the predicate is
//! the same and no projections are needed. Non-orthogonality of the plane
//! is automatic for a finite fit; a configurable cap flags blow-ups.

use crate::asymptotics::{estimate_order, DecaySamples};
use crate::corpus::ScalarField;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::numcore::{make_directions, DirectionSet, Vector};

use super::{CriterionVerdict, EvidenceItem, ProbeConfig, Verdict};

pub const CRITERION_NAME: &str = "geo";

/// Hyperplane evidence attached to a geo verdict.
#[derive(Debug, Clone)]
pub struct GeoEvidence {
    /// Coefficients fitted on the finest shell.
    pub fitted_a: Vector,
    /// `(1 + |A|^2)^(-1/2)`: 1 exactly when the fitted plane is flat.
    pub cos_alpha: f64,
    /// Max drift of the per-shell fits from the final one.
    pub a_stability: f64,
    /// Max-over-directions distance per radius.
    pub distance_samples: DecaySamples,
    /// Per-shell fits `(rho, A)`.
    pub shell_fits: Vec<(f64, Vector)>,
}

/// Least-squares hyperplane through the origin from `(point, value)`
/// samples; needs at least n samples spanning the space.
pub fn fit_tangent_hyperplane(samples: &[(Vector, f64)]) -> Result<Vector> {
    if samples.is_empty() {
        return Err(Error::RankDeficient("no shell samples".into()));
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|(x, _)| x.coords().to_vec()).collect();
    let values: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    Vector::new(least_squares(&rows, &values)?)
}

pub fn probe_geo(f: &ScalarField, cfg: &ProbeConfig) -> (CriterionVerdict, Option<GeoEvidence>) {
    let dirs = make_directions(f.dim, cfg.extra_dirs, cfg.seed).expect("dim >= 1");
    probe_geo_with_dirs(f, &dirs, cfg)
}

pub fn probe_geo_with_dirs(
    f: &ScalarField,
    dirs: &DirectionSet,
    cfg: &ProbeConfig,
) -> (CriterionVerdict, Option<GeoEvidence>) {
    let mut notes = Vec::new();
    let inconclusive = |notes: Vec<String>| CriterionVerdict {
        criterion: CRITERION_NAME.into(),
        verdict: Verdict::Inconclusive,
        evidence: Vec::new(),
        worst_direction: None,
        notes,
    };

    let radii = cfg.schedule.radii();
    // Shell values cached: values[k][i] = f(rho_k * u_i).
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(radii.len());
    for &rho in &radii {
        let mut shell = Vec::with_capacity(dirs.len());
        for u in dirs.directions() {
            let v = f.eval(&u.scaled(rho));
            if !v.is_finite() {
                notes.push(format!(
                    "non-finite evaluation at rho={rho:e} dir {}",
                    u.label()
                ));
                return (inconclusive(notes), None);
            }
            shell.push(v);
        }
        values.push(shell);
    }

    // Fit per shell, outermost first; the finest fit is the tangent
    // candidate, the drift across shells its stability.
    let mut shell_fits: Vec<(f64, Vector)> = Vec::with_capacity(radii.len());
    for (k, &rho) in radii.iter().enumerate() {
        let samples: Vec<(Vector, f64)> = dirs
            .directions()
            .iter()
            .zip(&values[k])
            .map(|(u, &v)| (u.scaled(rho), v))
            .collect();
        match fit_tangent_hyperplane(&samples) {
            Ok(a) => shell_fits.push((rho, a)),
            Err(err) => {
                notes.push(format!("shell fit failed at rho={rho:e}: {err}"));
                return (inconclusive(notes), None);
            }
        }
    }
    let fitted_a = shell_fits.last().expect("schedule emits radii").1.clone();
    let a_stability = shell_fits
        .iter()
        .map(|(_, a)| a.sub(&fitted_a).norm())
        .fold(0.0, f64::max);
    let a_norm = fitted_a.norm();
    let cos_alpha = 1.0 / (1.0 + a_norm * a_norm).sqrt();

    // d(x) = |f(x) - A.x| cos(alpha), maximized over directions per shell.
    let mut worst_direction: Option<Vector> = None;
    let mut pairs = Vec::with_capacity(radii.len());
    for (k, &rho) in radii.iter().enumerate() {
        let mut max_d = 0.0;
        let mut arg = None;
        for (u, &v) in dirs.directions().iter().zip(&values[k]) {
            let d = (v - fitted_a.dot(&u.scaled(rho))).abs() * cos_alpha;
            if d >= max_d {
                max_d = d;
                arg = Some(u);
            }
        }
        pairs.push((rho, max_d));
        if k == radii.len() - 1 {
            worst_direction = arg.cloned();
        }
    }
    let samples = match DecaySamples::new(
        "distance max over directions",
        pairs,
        cfg.schedule.floor_truncated(),
    ) {
        Ok(s) => s,
        Err(err) => {
            notes.push(err.to_string());
            return (inconclusive(notes), None);
        }
    };
    let estimate = estimate_order(&samples, &cfg.tol);

    let mut verdict = match estimate.classification {
        c if c.is_vanishing() => Verdict::Consistent,
        crate::asymptotics::Classification::NotLittleO => Verdict::Refuted,
        _ => Verdict::Inconclusive,
    };
    if a_norm > cfg.grad_cap {
        notes.push(format!(
            "fitted |A| = {a_norm:e} exceeds cap; near-orthogonal plane"
        ));
        if verdict == Verdict::Consistent {
            verdict = Verdict::Inconclusive;
        }
    }

    let evidence = vec![EvidenceItem {
        context: samples.context.clone(),
        samples: samples.clone(),
        estimate,
    }];
    let geo = GeoEvidence {
        fitted_a,
        cos_alpha,
        a_stability,
        distance_samples: samples,
        shell_fits,
    };
    (
        CriterionVerdict {
            criterion: CRITERION_NAME.into(),
            verdict,
            evidence,
            worst_direction,
            notes,
        },
        Some(geo),
    )
}
