//! The determinant probe: stack n+1 sampled points into rows
//! `[f(x_j), x_j]`; differentiability forces this determinant to vanish
//! faster than the product of the point norms as the tuple shrinks.
//!
//! The probe samples the predicate, it does not exhaust it: tuples shrink
//! along rays (all n+1 points share one scale factor), and near-degenerate
//! base tuples are rejected because their ratios carry no signal.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{estimate_order, DecaySamples};
use crate::corpus::ScalarField;
use crate::error::{Error, Result};
use crate::linalg::{det_partial_pivot, row_norm_product};
use crate::numcore::{random_unit_vector, Vector};

use super::{
    aggregate_classifications, worst_index, CriterionVerdict, EvidenceItem, ProbeConfig, Verdict,
};

pub const CRITERION_NAME: &str = "cauchy_determinant";

/// Fraction of the Hadamard bound a base tuple's geometry determinant must
/// reach to be accepted.
const DEGENERACY_FRACTION: f64 = 0.05;

/// The (n+1) x (n+1) matrix with row j equal to `[f(x_j), x_j^1 ... x_j^n]`.
pub fn cauchy_matrix(f: &ScalarField, xs: &[Vector]) -> Result<Vec<Vec<f64>>> {
    let n = f.dim;
    if xs.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "need {} vectors for dimension {n}, got {}",
            n + 1,
            xs.len()
        )));
    }
    xs.iter()
        .map(|x| {
            if x.dim() != n {
                return Err(Error::InvalidArgument(format!(
                    "vector {} has dimension {}, expected {n}",
                    x.label(),
                    x.dim()
                )));
            }
            let fx = f.eval(x);
            if !fx.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("{} at {}", f.name, x.label()),
                });
            }
            let mut row = Vec::with_capacity(n + 1);
            row.push(fx);
            row.extend_from_slice(x.coords());
            Ok(row)
        })
        .collect()
}

/// Determinant of the Cauchy matrix via partial-pivot elimination.
pub fn cauchy_determinant(f: &ScalarField, xs: &[Vector]) -> Result<f64> {
    Ok(det_partial_pivot(&cauchy_matrix(f, xs)?))
}

/// Product of Euclidean row norms; `|det| <= bound` for any square matrix.
pub fn hadamard_bound(matrix: &[Vec<f64>]) -> f64 {
    row_norm_product(matrix)
}

fn geometry_matrix(tuple: &[Vector]) -> Vec<Vec<f64>> {
    tuple
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(x.dim() + 1);
            row.push(1.0);
            row.extend_from_slice(x.coords());
            row
        })
        .collect()
}

fn tuple_is_degenerate(tuple: &[Vector]) -> bool {
    let m = geometry_matrix(tuple);
    det_partial_pivot(&m).abs() < DEGENERACY_FRACTION * row_norm_product(&m)
}

/// Seeded unit-vector tuples of size n+1, rejecting near-degenerate
/// geometry. Deterministic for a given `(n, count, seed)`.
pub fn sample_base_tuples(n: usize, count: usize, seed: u64) -> Vec<Vec<Vector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tuples = Vec::with_capacity(count);
    let mut attempts = 0;
    while tuples.len() < count && attempts < 200 * count.max(1) {
        attempts += 1;
        let tuple: Vec<Vector> = (0..=n).map(|_| random_unit_vector(&mut rng, n)).collect();
        if !tuple_is_degenerate(&tuple) {
            tuples.push(tuple);
        }
    }
    tuples
}

pub fn probe_cauchy_determinant(f: &ScalarField, cfg: &ProbeConfig) -> CriterionVerdict {
    let tuples = sample_base_tuples(f.dim, cfg.det_tuples, cfg.seed);
    probe_cauchy_determinant_with_tuples(f, &tuples, cfg)
}

/// Shrink each base tuple along its ray and classify
/// `|det| / prod |x_j|`. The stored sample value is that ratio times rho,
/// so the o(rho) rule on the value is exactly "ratio -> 0" and the CSV
/// ratio column is the normalized determinant itself.
pub fn probe_cauchy_determinant_with_tuples(
    f: &ScalarField,
    tuples: &[Vec<Vector>],
    cfg: &ProbeConfig,
) -> CriterionVerdict {
    let mut notes = vec!["tuples shrink along rays; ratio column is |det|/prod|x_j|".to_string()];
    if tuples.is_empty() {
        notes.push("no usable base tuples (all rejected as degenerate)".into());
        return CriterionVerdict {
            criterion: CRITERION_NAME.into(),
            verdict: Verdict::Inconclusive,
            evidence: Vec::new(),
            worst_direction: None,
            notes,
        };
    }

    let n = f.dim as i32;
    let mut evidence = Vec::new();
    let mut classifications = Vec::new();
    let mut eval_failed = false;
    for (t, tuple) in tuples.iter().enumerate() {
        let norm_product: f64 = tuple.iter().map(Vector::norm).product();
        let context = format!("tuple {t:02}");
        let mut pairs = Vec::new();
        let mut failed = None;
        for rho in cfg.schedule.radii() {
            let scaled: Vec<Vector> = tuple.iter().map(|x| x.scaled(rho)).collect();
            match cauchy_determinant(f, &scaled) {
                Ok(det) => {
                    // value / rho == |det| / prod |rho x_j|.
                    let value = det.abs() / (rho.powi(n) * norm_product);
                    if !value.is_finite() {
                        failed = Some(format!("{context}: non-finite ratio at rho={rho:e}"));
                        break;
                    }
                    pairs.push((rho, value));
                }
                Err(err) => {
                    failed = Some(format!("{context}: {err}"));
                    break;
                }
            }
        }
        if let Some(msg) = failed {
            notes.push(msg);
            eval_failed = true;
            continue;
        }
        match DecaySamples::new(&context, pairs, cfg.schedule.floor_truncated()) {
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
                notes.push(format!("{context}: {err}"));
                eval_failed = true;
            }
        }
    }

    let mut verdict = aggregate_classifications(&classifications);
    if eval_failed && verdict == Verdict::Consistent {
        verdict = Verdict::Inconclusive;
    }
    if let Some(i) = worst_index(&evidence) {
        notes.push(format!("worst {}", evidence[i].context));
    }
    CriterionVerdict {
        criterion: CRITERION_NAME.into(),
        verdict,
        evidence,
        worst_direction: None,
        notes,
    }
}
