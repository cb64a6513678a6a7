//! Little-o classification of decay series.
//!
//! Probes reduce to one question: given samples of a residual at shrinking
//! radii, does the residual vanish faster than the radius? A finite sample
//! can only evidence the limit statement, never prove it, so the verdict
//! vocabulary is deliberately about consistency at the sampled scales.
//!
//! Two redundant routes feed the decision: a log-log slope fit (the
//! asymptotic order) and the tail of the residual-to-radius ratios. Either
//! alone can be fooled by oscillation; together they are hard to fool.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::RadialSchedule;

/// Thresholds for the decay decision rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Little-o via slope needs `slope >= 1 + slope_margin`.
    pub slope_margin: f64,
    /// ... together with at least this fit quality.
    pub fit_min: f64,
    /// Little-o via ratios needs every tail ratio at or below this.
    pub ratio_tol: f64,
    /// Not-little-o needs every tail ratio at or above this.
    pub ratio_floor: f64,
    /// Tail window length m.
    pub tail_len: usize,
    /// Values at or below this are treated as exact zeros.
    pub zero_tol: f64,
    /// Vanishing (o(1)) via slope needs `slope >= vanish_slope_min` with
    /// fit quality `>= vanish_fit_min`.
    pub vanish_slope_min: f64,
    pub vanish_fit_min: f64,
    /// Vanishing via magnitude needs every tail value at or below this.
    pub vanish_tol: f64,
    /// Persistence needs every tail value at or above this.
    pub vanish_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope_margin: 0.15,
            fit_min: 0.9,
            ratio_tol: 1e-6,
            ratio_floor: 1e-3,
            tail_len: 3,
            zero_tol: 1e3 * f64::EPSILON,
            vanish_slope_min: 0.1,
            vanish_fit_min: 0.8,
            vanish_tol: 1e-3,
            vanish_floor: 1e-2,
        }
    }
}

/// A residual series over strictly decreasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySamples {
    /// Which criterion/direction produced the series.
    pub context: String,
    /// `(rho, value)` pairs, rho strictly decreasing.
    pub pairs: Vec<(f64, f64)>,
    /// Set when the producing schedule was truncated at the radius floor.
    pub floor_truncated: bool,
}

impl DecaySamples {
    pub fn new(context: &str, pairs: Vec<(f64, f64)>, floor_truncated: bool) -> Result<Self> {
        if pairs
            .iter()
            .any(|&(r, v)| !r.is_finite() || r <= 0.0 || !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "decay samples need positive radii and finite values".into(),
            ));
        }
        if pairs.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err(Error::InvalidArgument(
                "radii must be strictly decreasing".into(),
            ));
        }
        Ok(Self {
            context: context.to_string(),
            pairs,
            floor_truncated,
        })
    }

    /// `|value| / rho` per sample.
    pub fn ratios(&self) -> Vec<f64> {
        self.pairs.iter().map(|&(r, v)| v.abs() / r).collect()
    }

    /// Last `m` ratios (fewer when the series is short).
    pub fn ratio_tail(&self, m: usize) -> Vec<f64> {
        let r = self.ratios();
        let start = r.len().saturating_sub(m);
        r[start..].to_vec()
    }

    /// Last `m` absolute values.
    pub fn value_tail(&self, m: usize) -> Vec<f64> {
        let start = self.pairs.len().saturating_sub(m);
        self.pairs[start..].iter().map(|&(_, v)| v.abs()).collect()
    }

    /// CSV rows `context,rho,value,ratio` (no header).
    pub fn csv_rows(&self, out: &mut String) {
        for &(rho, value) in &self.pairs {
            let ratio = value.abs() / rho;
            out.push_str(&format!(
                "{},{rho},{value},{ratio}\n",
                sanitize(&self.context)
            ));
        }
    }
}

fn sanitize(context: &str) -> String {
    context.replace([',', '"', '\n'], " ")
}

/// Evaluate `sampler` at every schedule radius.
pub fn collect_decay(
    context: &str,
    sampler: impl Fn(f64) -> f64,
    schedule: &RadialSchedule,
) -> Result<DecaySamples> {
    let mut pairs = Vec::new();
    for rho in schedule.radii() {
        let value = sampler(rho);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: format!("{context} at rho={rho:e}"),
            });
        }
        pairs.push((rho, value));
    }
    DecaySamples::new(context, pairs, schedule.floor_truncated())
}

/// Outcome of the little-o decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Every sample is a numerical zero; trivially o(rho).
    ExactZero,
    LittleO,
    NotLittleO,
    Indeterminate,
}

impl Classification {
    /// Whether the classification supports the o(rho) (resp. o(1)) claim.
    pub fn is_vanishing(self) -> bool {
        matches!(self, Classification::ExactZero | Classification::LittleO)
    }
}

/// A fitted asymptotic order `|value| ~ C * rho^slope` with the evidence
/// the decision rule consumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// R^2 of the log-log fit, clamped to [0, 1].
    pub fit_quality: f64,
    /// `|value|/rho` over the last m samples (numerical zeros kept as 0).
    pub ratio_tail: Vec<f64>,
    pub classification: Classification,
    /// Samples that survived the zero drop and entered the regression.
    pub usable_points: usize,
    pub note: Option<String>,
}

impl OrderEstimate {
    fn degenerate(
        classification: Classification,
        ratio_tail: Vec<f64>,
        usable_points: usize,
        note: &str,
    ) -> Self {
        Self {
            slope: 0.0,
            intercept: 0.0,
            fit_quality: 0.0,
            ratio_tail,
            classification,
            usable_points,
            note: Some(note.to_string()),
        }
    }
}

/// Least-squares line through `(x, y)` points; returns (slope, intercept,
/// r_squared).
fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &(x, y) in points {
        let fitted = intercept + slope * x;
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_res <= 1e-24 {
        1.0
    } else if ss_tot <= 1e-24 {
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}

/// Fit `log|value|` against `log rho` (numerical zeros dropped; they would
/// poison the log fit) and classify the series against o(rho).
pub fn estimate_order(samples: &DecaySamples, tol: &Tolerances) -> OrderEstimate {
    let ratio_tail = tail_with_zero_drop(samples, tol);
    let usable: Vec<(f64, f64)> = samples
        .pairs
        .iter()
        .filter(|&&(_, v)| v.abs() > tol.zero_tol)
        .map(|&(r, v)| (r.ln(), v.abs().ln()))
        .collect();

    if usable.is_empty() {
        return OrderEstimate::degenerate(
            Classification::ExactZero,
            ratio_tail,
            0,
            "all samples at or below zero_tol",
        );
    }
    if usable.len() < 4 {
        return OrderEstimate::degenerate(
            Classification::Indeterminate,
            ratio_tail,
            usable.len(),
            "fewer than 4 usable samples after zero drop",
        );
    }

    let (slope, intercept, fit_quality) = fit_line(&usable);
    let mut estimate = OrderEstimate {
        slope,
        intercept,
        fit_quality,
        ratio_tail,
        classification: Classification::Indeterminate,
        usable_points: usable.len(),
        note: None,
    };
    estimate.classification = classify_little_o(&estimate, tol);
    estimate
}

fn tail_with_zero_drop(samples: &DecaySamples, tol: &Tolerances) -> Vec<f64> {
    samples
        .ratio_tail(tol.tail_len)
        .iter()
        .zip(samples.value_tail(tol.tail_len))
        .map(|(&ratio, value)| if value <= tol.zero_tol { 0.0 } else { ratio })
        .collect()
}

/// The little-o decision rule, re-applicable under stricter tolerances:
///   - LittleO when the fitted order clears 1 + slope_margin with a good
///     fit, or when every tail ratio is at or below ratio_tol;
///   - NotLittleO when the tail ratios stay at or above ratio_floor and do
///     not decrease by more than 10% across the tail window;
///   - otherwise Indeterminate.
pub fn classify_little_o(estimate: &OrderEstimate, tol: &Tolerances) -> Classification {
    if estimate.classification == Classification::ExactZero {
        return Classification::LittleO;
    }
    let tail = &estimate.ratio_tail;
    if estimate.usable_points < 4 || tail.is_empty() {
        return Classification::Indeterminate;
    }
    let tail_max = tail.iter().cloned().fold(f64::MIN, f64::max);
    let tail_min = tail.iter().cloned().fold(f64::MAX, f64::min);

    let slope_route =
        estimate.slope >= 1.0 + tol.slope_margin && estimate.fit_quality >= tol.fit_min;
    if slope_route || tail_max <= tol.ratio_tol {
        return Classification::LittleO;
    }
    let no_decay = tail.last().unwrap() >= &(0.9 * tail[0]);
    if tail_min >= tol.ratio_floor && no_decay {
        return Classification::NotLittleO;
    }
    Classification::Indeterminate
}

/// Classify a series against o(1): does the value itself vanish?
///
/// Used for continuity moduli and operator drifts, where the signal is
/// "bounded below" versus "goes to zero" and the radius exponent is
/// irrelevant. Returns the classification together with the order estimate
/// that backed it (the estimate's own `classification` field stays the
/// little-o one).
pub fn classify_vanishing(
    samples: &DecaySamples,
    tol: &Tolerances,
) -> (Classification, OrderEstimate) {
    let estimate = estimate_order(samples, tol);
    if estimate.classification == Classification::ExactZero {
        return (Classification::ExactZero, estimate);
    }
    let tail = samples.value_tail(tol.tail_len);
    if tail.is_empty() {
        return (Classification::Indeterminate, estimate);
    }
    let tail_max = tail.iter().cloned().fold(f64::MIN, f64::max);
    let tail_min = tail.iter().cloned().fold(f64::MAX, f64::min);

    let slope_route = estimate.usable_points >= 4
        && estimate.slope >= tol.vanish_slope_min
        && estimate.fit_quality >= tol.vanish_fit_min;
    let classification = if slope_route || tail_max <= tol.vanish_tol {
        Classification::LittleO
    } else if tail_min >= tol.vanish_floor {
        Classification::NotLittleO
    } else {
        Classification::Indeterminate
    };
    (classification, estimate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(rho0: f64, lambda: f64, count: usize) -> RadialSchedule {
        RadialSchedule::new(rho0, lambda, count).unwrap()
    }

    fn power_law(c: f64, p: f64, count: usize) -> DecaySamples {
        collect_decay("power", |rho| c * rho.powf(p), &schedule(1.0, 0.5, count)).unwrap()
    }

    #[test]
    fn collect_exact_squares() {
        let s = collect_decay("sq", |rho| rho * rho, &schedule(1.0, 0.5, 4)).unwrap();
        assert_eq!(
            s.pairs,
            vec![(1.0, 1.0), (0.5, 0.25), (0.25, 0.0625), (0.125, 0.015625)]
        );
        assert!(!s.floor_truncated);
    }

    #[test]
    fn collect_zero_function() {
        let s = collect_decay("zero", |_| 0.0, &schedule(1.0, 0.5, 6)).unwrap();
        assert!(s.pairs.iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn collect_rejects_non_finite() {
        let err = collect_decay("bad", |rho| 1.0 / (rho - 0.25), &schedule(1.0, 0.5, 4));
        assert!(matches!(err, Err(Error::NonFinite { .. })));
        // The schedule never emits rho = 0, so 1/rho stays finite.
        assert!(collect_decay("inv", |rho| 1.0 / rho, &schedule(1.0, 0.5, 8)).is_ok());
    }

    #[test]
    fn quadratic_is_little_o() {
        let est = estimate_order(&power_law(3.0, 2.0, 12), &Tolerances::default());
        assert!((est.slope - 2.0).abs() < 1e-9, "slope {}", est.slope);
        assert_eq!(est.classification, Classification::LittleO);
        assert!(est.fit_quality > 0.999999);
    }

    #[test]
    fn linear_decay_is_not_little_o() {
        let est = estimate_order(&power_law(0.5, 1.0, 12), &Tolerances::default());
        assert!((est.slope - 1.0).abs() < 1e-9);
        for r in &est.ratio_tail {
            assert!((r - 0.5).abs() < 1e-12);
        }
        assert_eq!(est.classification, Classification::NotLittleO);
    }

    #[test]
    fn g2_diagonal_ratio_constant() {
        // Residual rho / (2 sqrt 2) along the diagonal: ratio 0.35355...
        let c = 0.5 / 2.0_f64.sqrt();
        let est = estimate_order(&power_law(c, 1.0, 12), &Tolerances::default());
        assert_eq!(est.classification, Classification::NotLittleO);
        for r in &est.ratio_tail {
            assert!((r - 0.35355339059327373).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_zero_series() {
        let s = collect_decay("zero", |_| 0.0, &schedule(1.0, 0.5, 6)).unwrap();
        let tol = Tolerances::default();
        let est = estimate_order(&s, &tol);
        assert_eq!(est.classification, Classification::ExactZero);
        // Zero is o(rho): reclassification maps ExactZero to LittleO.
        assert_eq!(classify_little_o(&est, &tol), Classification::LittleO);
    }

    #[test]
    fn power_law_recovery() {
        let tol = Tolerances::default();
        for &p in &[0.5, 1.0, 1.5, 2.0, 3.0] {
            let est = estimate_order(&power_law(1.7, p, 16), &tol);
            assert!((est.slope - p).abs() < 1e-6, "p={p} slope={}", est.slope);
            assert_eq!(
                est.classification == Classification::LittleO,
                p > 1.0,
                "p={p} classified {:?}",
                est.classification
            );
        }
    }

    #[test]
    fn oscillatory_robustness() {
        // rho^2 cos(1/rho) stays little-o despite sign changes.
        let s = collect_decay(
            "osc",
            |rho| rho * rho * (1.0 / rho).cos(),
            &schedule(0.5, 0.65, 40),
        )
        .unwrap();
        let est = estimate_order(&s, &Tolerances::default());
        assert_eq!(est.classification, Classification::LittleO);
        assert!((est.slope - 2.0).abs() < 0.5, "slope {}", est.slope);
    }

    #[test]
    fn near_zero_samples_dropped_not_poisoning() {
        // Interleaved exact zeros are kept in the tail as 0 but dropped
        // from the regression.
        let pairs: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let rho = 0.5_f64.powi(k);
                let v = if k % 3 == 2 { 0.0 } else { rho * rho };
                (rho, v)
            })
            .collect();
        let s = DecaySamples::new("mix", pairs, false).unwrap();
        let est = estimate_order(&s, &Tolerances::default());
        assert!((est.slope - 2.0).abs() < 1e-9);
        assert_eq!(est.classification, Classification::LittleO);
    }

    #[test]
    fn short_series_indeterminate() {
        let pairs = vec![(1.0, 0.5), (0.5, 0.3), (0.25, 0.2)];
        let s = DecaySamples::new("short", pairs, false).unwrap();
        let est = estimate_order(&s, &Tolerances::default());
        assert_eq!(est.classification, Classification::Indeterminate);
        assert!(est.note.is_some());
    }

    #[test]
    fn vanishing_classifications() {
        let tol = Tolerances::default();
        // A modulus that decays like rho vanishes.
        let (c, _) = classify_vanishing(&power_law(2.0, 1.0, 12), &tol);
        assert_eq!(c, Classification::LittleO);
        // A bounded-below modulus persists.
        let s = collect_decay(
            "const",
            |rho| 0.9 + 0.05 * (7.0 / rho).sin(),
            &schedule(0.5, 0.6, 12),
        )
        .unwrap();
        let (c, _) = classify_vanishing(&s, &tol);
        assert_eq!(c, Classification::NotLittleO);
        // Exact zero short-circuits.
        let z = collect_decay("z", |_| 0.0, &schedule(1.0, 0.5, 6)).unwrap();
        let (c, _) = classify_vanishing(&z, &tol);
        assert_eq!(c, Classification::ExactZero);
    }

    #[test]
    fn csv_rows_shape() {
        let s = collect_decay("diag, with comma", |rho| 0.5 * rho, &schedule(1.0, 0.5, 4)).unwrap();
        let mut out = String::new();
        s.csv_rows(&mut out);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("diag  with comma,1,0.5,0.5"));
    }
}
