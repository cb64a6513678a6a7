//! Differentiability probes for scalar fields at the origin.
//!
//! Four criteria are implemented, all reducing to decay classification:
//!
//! - `cauchy_like`: partial derivatives must exist on the axes and the
//!   function minus the sum of its partial values must be o(rho);
//! - `cauchy_determinant`: the determinant built from n+1 sampled points
//!   and their values must vanish faster than the product of their norms;
//! - `geo`: a least-squares tangent hyperplane must absorb the function to
//!   o(rho) point-to-plane distance;
//! - `relaxed`: a nested chain of partial-derivative continuity conditions
//!   that is sufficient (never necessary) for differentiability.
//!
//! Verdicts are evidence at the sampled scales, not proofs.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{Classification, DecaySamples, OrderEstimate, Tolerances};
use crate::error::{Error, Result};
use crate::numcore::{RadialSchedule, Vector};

mod cauchy_like;
mod determinant;
mod geo;
mod partials;
mod relaxed;

pub use cauchy_like::{cauchy_like_residual, probe_cauchy_like, probe_cauchy_like_with_dirs};
pub use determinant::{
    cauchy_determinant, cauchy_matrix, hadamard_bound, probe_cauchy_determinant,
    probe_cauchy_determinant_with_tuples, sample_base_tuples,
};
pub use geo::{fit_tangent_hyperplane, probe_geo, probe_geo_with_dirs, GeoEvidence};
pub use partials::{test_partial_derivatives, AxisDerivative, PartialDerivativeResult};
pub use relaxed::{check_relaxed_conditions, ContinuityModulus};

/// Everything a probe run needs: schedule, direction budget, seed and
/// tolerances. Serialized verbatim into reports so runs are replayable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub schedule: RadialSchedule,
    /// Random unit directions added to the 2n signed axes.
    pub extra_dirs: usize,
    pub seed: u64,
    pub tol: Tolerances,
    /// Agreement/convergence tolerance for one-sided axis derivatives.
    pub deriv_tol: f64,
    /// Consecutive difference-quotient gaps that must sit under deriv_tol.
    pub deriv_consecutive: usize,
    /// Convergence tolerance for Richardson-extrapolated derivatives.
    pub richardson_tol: f64,
    /// Fitted-gradient magnitude above which the geo probe refuses to call
    /// the hyperplane non-orthogonal.
    pub grad_cap: f64,
    /// Base tuples sampled by the determinant probe.
    pub det_tuples: usize,
    /// Smallest shell radius for continuity moduli; below this the finite
    /// difference inside the shell drowns in cancellation.
    pub shell_rho_min: f64,
    /// Central-difference step on a shell of radius rho is
    /// `shell_step_scale * rho^2`.
    pub shell_step_scale: f64,
    /// Magnitude bound on Wirtinger conjugate derivatives.
    pub cr_tol: f64,
    /// Direction tuples sampled by the block probe.
    pub block_tuples: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            schedule: RadialSchedule::new(0.5, 0.65, 44).expect("valid default schedule"),
            extra_dirs: 16,
            seed: 42,
            tol: Tolerances::default(),
            deriv_tol: 1e-6,
            deriv_consecutive: 3,
            richardson_tol: 1e-9,
            grad_cap: 1e6,
            det_tuples: 8,
            shell_rho_min: 1e-5,
            shell_step_scale: 1e-3,
            cr_tol: 1e-6,
            block_tuples: 8,
        }
    }
}

/// Evidence-level conclusion of one criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// All evidence vanishes as the criterion demands.
    Consistent,
    /// Some evidence is bounded away from vanishing.
    Refuted,
    /// Evidence is missing or ambiguous at the sampled scales.
    Inconclusive,
    /// Reserved for sufficient-condition checks: the hypotheses fail, which
    /// says nothing about differentiability itself.
    ConditionsNotMet,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Consistent => "consistent",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
            Verdict::ConditionsNotMet => "conditions_not_met",
        };
        f.write_str(s)
    }
}

/// One decay series plus its fitted order, tagged with what produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub context: String,
    pub samples: DecaySamples,
    pub estimate: OrderEstimate,
}

impl EvidenceItem {
    /// `|value|/rho` at the finest sampled radius.
    pub fn final_ratio(&self) -> Option<f64> {
        self.samples.ratios().last().copied()
    }
}

/// A criterion's verdict with the evidence that backs it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: String,
    pub verdict: Verdict,
    pub evidence: Vec<EvidenceItem>,
    pub worst_direction: Option<Vector>,
    pub notes: Vec<String>,
}

impl CriterionVerdict {
    /// Evidence item with the largest final ratio.
    pub fn worst_evidence(&self) -> Option<&EvidenceItem> {
        self.evidence
            .iter()
            .filter(|item| item.final_ratio().is_some())
            .max_by(|a, b| {
                a.final_ratio()
                    .unwrap()
                    .total_cmp(&b.final_ratio().unwrap())
            })
    }
}

/// Refuted if anything is bounded below, Consistent only if everything
/// vanishes, Inconclusive otherwise (including an empty evidence list).
pub(crate) fn aggregate_classifications(classifications: &[Classification]) -> Verdict {
    if classifications.contains(&Classification::NotLittleO) {
        Verdict::Refuted
    } else if !classifications.is_empty() && classifications.iter().all(|c| c.is_vanishing()) {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// Index of the evidence item with the largest final ratio.
pub(crate) fn worst_index(items: &[EvidenceItem]) -> Option<usize> {
    items
        .iter()
        .enumerate()
        .filter_map(|(i, item)| item.final_ratio().map(|r| (i, r)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Values that can ride through the symmetric-difference machinery.
pub(crate) trait DiffValue: Copy {
    fn diff(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl DiffValue for f64 {
    fn diff(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl DiffValue for num_complex::Complex64 {
    fn diff(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A derivative estimate with the gap between the last two Richardson
/// extrapolants as its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate<T> {
    pub value: T,
    pub error_estimate: f64,
}

/// Richardson-extrapolated symmetric difference of `line` at 0: halve the
/// step until successive extrapolants differ by less than `tol`.
pub(crate) fn richardson_derivative<T: DiffValue>(
    line: impl Fn(f64) -> T,
    h0: f64,
    tol: f64,
    context: &str,
) -> Result<DerivativeEstimate<T>> {
    let floor = 1e3 * f64::EPSILON * h0.max(1.0);
    let symmetric = |h: f64| -> Result<T> {
        let plus = line(h);
        let minus = line(-h);
        if !plus.finite() || !minus.finite() {
            return Err(Error::NonFinite {
                context: format!("{context} at step {h:e}"),
            });
        }
        Ok(plus.diff(minus).scale(0.5 / h))
    };

    let mut h = h0;
    let mut d_prev = symmetric(h)?;
    let mut extrapolant: Option<T> = None;
    let mut last_gap = f64::INFINITY;
    while h / 2.0 >= floor {
        h /= 2.0;
        let d = symmetric(h)?;
        // (4 D(h/2) - D(h)) / 3 cancels the quadratic truncation term.
        let r = d.scale(4.0 / 3.0).diff(d_prev.scale(1.0 / 3.0));
        if let Some(prev_r) = extrapolant {
            last_gap = r.diff(prev_r).magnitude();
            if last_gap < tol {
                return Ok(DerivativeEstimate {
                    value: r,
                    error_estimate: last_gap,
                });
            }
        }
        extrapolant = Some(r);
        d_prev = d;
    }
    Err(Error::NonConvergence {
        context: context.to_string(),
        last_gap,
    })
}

/// Richardson-extrapolated symmetric difference of a complex-valued line.
pub(crate) fn richardson_complex(
    line: impl Fn(f64) -> num_complex::Complex64,
    h0: f64,
    tol: f64,
    context: &str,
) -> Result<DerivativeEstimate<num_complex::Complex64>> {
    richardson_derivative(line, h0, tol, context)
}

/// Richardson-extrapolated directional derivative of `f` along the unit
/// vector `u` at the origin.
pub fn directional_derivative(
    f: &crate::corpus::ScalarField,
    u: &Vector,
    cfg: &ProbeConfig,
) -> Result<DerivativeEstimate<f64>> {
    if u.dim() != f.dim {
        return Err(Error::InvalidArgument(format!(
            "direction dimension {} does not match function dimension {}",
            u.dim(),
            f.dim
        )));
    }
    if (u.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(
            "direction must be a unit vector".into(),
        ));
    }
    richardson_derivative(
        |t| f.eval(&u.scaled(t)),
        cfg.schedule.rho0,
        cfg.richardson_tol,
        &format!("directional derivative of {} along {}", f.name, u.label()),
    )
}
