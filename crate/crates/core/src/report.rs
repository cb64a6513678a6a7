//! Probe aggregation, the corpus regression run, and report emission.
//!
//! JSON reports carry per-criterion summaries (slope, fit quality, ratio
//! tail); the full decay curves go to CSV so reports stay diffable and the
//! curves stay plottable. Outputs are byte-stable for a fixed seed and
//! config once the timestamp is suppressed.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{corpus_list, find_scalar, ScalarField, Truth};
use crate::criteria::{
    check_relaxed_conditions, probe_cauchy_determinant, probe_cauchy_like, probe_geo,
    CriterionVerdict, ProbeConfig, Verdict,
};
use crate::error::{Error, Result};
use crate::numcore::Vector;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Criteria selectable per probe run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    CauchyLike,
    Determinant,
    Geo,
    Relaxed,
}

impl CriterionKind {
    pub fn all() -> Vec<CriterionKind> {
        vec![
            CriterionKind::CauchyLike,
            CriterionKind::Determinant,
            CriterionKind::Geo,
            CriterionKind::Relaxed,
        ]
    }
}

impl FromStr for CriterionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cauchy_like" | "cauchy-like" => Ok(CriterionKind::CauchyLike),
            "determinant" | "cauchy_determinant" => Ok(CriterionKind::Determinant),
            "geo" => Ok(CriterionKind::Geo),
            "relaxed" => Ok(CriterionKind::Relaxed),
            other => Err(Error::InvalidArgument(format!(
                "unknown criterion `{other}`"
            ))),
        }
    }
}

/// Parse a comma-separated criteria list; `all` expands to every criterion.
pub fn parse_criteria(spec: &str) -> Result<Vec<CriterionKind>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(Error::InvalidArgument("empty criteria selection".into()));
    }
    if spec == "all" {
        return Ok(CriterionKind::all());
    }
    spec.split(',').map(CriterionKind::from_str).collect()
}

/// Combined verdict across criteria. `Conflicting` (some criterion refuted
/// while another is consistent) indicates a tolerance bug and raises a
/// diagnostics flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combined {
    Consistent,
    Refuted,
    Inconclusive,
    Conflicting,
}

impl std::fmt::Display for Combined {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Combined::Consistent => "consistent",
            Combined::Refuted => "refuted",
            Combined::Inconclusive => "inconclusive",
            Combined::Conflicting => "conflicting",
        };
        f.write_str(s)
    }
}

/// Inconclusive and ConditionsNotMet verdicts are non-blocking: criteria
/// have different numerical sweet spots, so one decisive criterion carries
/// the combination.
pub fn combine_verdicts(verdicts: &[Verdict]) -> Combined {
    let any_refuted = verdicts.contains(&Verdict::Refuted);
    let any_consistent = verdicts.contains(&Verdict::Consistent);
    match (any_refuted, any_consistent) {
        (true, true) => Combined::Conflicting,
        (true, false) => Combined::Refuted,
        (false, true) => Combined::Consistent,
        (false, false) => Combined::Inconclusive,
    }
}

/// Slope / fit / ratio-tail digest of a criterion's worst evidence item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSummary {
    pub slope: f64,
    pub fit_quality: f64,
    pub ratio_tail: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub verdict: Verdict,
    pub worst_direction: Option<Vector>,
    pub evidence_summary: Option<EvidenceSummary>,
}

impl CriterionReport {
    fn from_verdict(v: &CriterionVerdict) -> Self {
        let evidence_summary = v.worst_evidence().map(|item| EvidenceSummary {
            slope: item.estimate.slope,
            fit_quality: item.estimate.fit_quality,
            ratio_tail: item.estimate.ratio_tail.clone(),
        });
        Self {
            name: v.criterion.clone(),
            verdict: v.verdict,
            worst_direction: v.worst_direction.clone(),
            evidence_summary,
        }
    }
}

/// The serialized report shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub function: String,
    pub point: Vector,
    pub seed: u64,
    pub config: ProbeConfig,
    pub criteria: Vec<CriterionReport>,
    pub combined: Combined,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
    pub tool_version: String,
}

/// A finished probe run: the report plus the full evidence behind it.
#[derive(Debug, Clone)]
pub struct ProbeRun {
    pub report: ProbeReport,
    pub verdicts: Vec<CriterionVerdict>,
    pub diagnostics: Vec<String>,
}

fn now_unix() -> Option<u64> {
    #[cfg(target_arch = "wasm32")]
    {
        None
    }
    #[cfg(not(target_arch = "wasm32"))]
    {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    }
}

fn run_criteria(
    f: &ScalarField,
    kinds: &[CriterionKind],
    cfg: &ProbeConfig,
) -> Vec<CriterionVerdict> {
    kinds
        .iter()
        .map(|kind| match kind {
            CriterionKind::CauchyLike => probe_cauchy_like(f, cfg),
            CriterionKind::Determinant => probe_cauchy_determinant(f, cfg),
            CriterionKind::Geo => probe_geo(f, cfg).0,
            CriterionKind::Relaxed => {
                let order: Vec<usize> = (1..=f.dim).collect();
                check_relaxed_conditions(f, &order, cfg).0
            }
        })
        .collect()
}

/// Probe one corpus function at a point (the origin by default, anywhere
/// else via translation) with the selected criteria.
pub fn run_probe(
    function_id: &str,
    point: Option<Vector>,
    kinds: &[CriterionKind],
    cfg: &ProbeConfig,
    with_timestamp: bool,
) -> Result<ProbeRun> {
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("empty criteria selection".into()));
    }
    let base = find_scalar(function_id)?;
    let point = match point {
        Some(p) => {
            if p.dim() != base.dim {
                return Err(Error::InvalidArgument(format!(
                    "point dimension {} does not match function dimension {}",
                    p.dim(),
                    base.dim
                )));
            }
            p
        }
        None => Vector::zeros(base.dim),
    };
    let f = if point.norm() == 0.0 {
        base
    } else {
        base.translated(&point)?
    };

    let verdicts = run_criteria(&f, kinds, cfg);
    let combined = combine_verdicts(&verdicts.iter().map(|v| v.verdict).collect::<Vec<_>>());
    let mut diagnostics = Vec::new();
    if combined == Combined::Conflicting {
        diagnostics.push(
            "conflicting verdicts: one criterion refutes what another confirms; \
             check the tolerances"
                .to_string(),
        );
    }
    let report = ProbeReport {
        function: function_id.to_string(),
        point,
        seed: cfg.seed,
        config: cfg.clone(),
        criteria: verdicts.iter().map(CriterionReport::from_verdict).collect(),
        combined,
        timestamp: if with_timestamp { now_unix() } else { None },
        tool_version: TOOL_VERSION.to_string(),
    };
    Ok(ProbeRun {
        report,
        verdicts,
        diagnostics,
    })
}

/// Per-entry outcome of the corpus regression.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusEntryResult {
    pub id: String,
    pub truth: Truth,
    pub combined: Combined,
    pub matched: bool,
    pub criteria: Vec<CriterionReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusRunSummary {
    pub entries: Vec<CorpusEntryResult>,
    pub total: usize,
    pub matched: usize,
    pub mismatches: Vec<String>,
    /// Inconclusive criterion verdicts, fatal under --strict.
    pub inconclusive: Vec<String>,
    pub conflicts: Vec<String>,
}

impl CorpusRunSummary {
    /// Exit-0 condition: every combined verdict matches its truth label
    /// (plus no inconclusive criteria under strict).
    pub fn passes(&self, strict: bool) -> bool {
        self.mismatches.is_empty()
            && self.conflicts.is_empty()
            && (!strict || self.inconclusive.is_empty())
    }
}

fn truth_matches(truth: Truth, combined: Combined) -> bool {
    match truth {
        Truth::DifferentiableAtOrigin => combined == Combined::Consistent,
        Truth::NotDifferentiableAtOrigin => combined == Combined::Refuted,
        Truth::Unknown => true,
    }
}

/// Probe every corpus entry at the origin with all criteria and compare
/// combined verdicts against the truth labels.
pub fn run_corpus(cfg: &ProbeConfig) -> CorpusRunSummary {
    let kinds = CriterionKind::all();
    let mut entries = Vec::new();
    let mut mismatches = Vec::new();
    let mut inconclusive = Vec::new();
    let mut conflicts = Vec::new();
    for f in corpus_list() {
        let verdicts = run_criteria(&f, &kinds, cfg);
        let combined = combine_verdicts(&verdicts.iter().map(|v| v.verdict).collect::<Vec<_>>());
        let matched = truth_matches(f.truth, combined);
        if !matched {
            mismatches.push(format!(
                "{}: truth {} but combined {}",
                f.name, f.truth, combined
            ));
        }
        if combined == Combined::Conflicting {
            conflicts.push(f.name.clone());
        }
        for v in &verdicts {
            if v.verdict == Verdict::Inconclusive {
                inconclusive.push(format!("{}: {}", f.name, v.criterion));
            }
        }
        entries.push(CorpusEntryResult {
            id: f.name.clone(),
            truth: f.truth,
            combined,
            matched,
            criteria: verdicts.iter().map(CriterionReport::from_verdict).collect(),
        });
    }
    let total = entries.len();
    let matched = entries.iter().filter(|e| e.matched).count();
    CorpusRunSummary {
        entries,
        total,
        matched,
        mismatches,
        inconclusive,
        conflicts,
    }
}

/// The block-probe report: the probe schema plus the block structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProbeReport {
    pub function: String,
    pub block_dims: Vec<usize>,
    pub seed: u64,
    pub config: ProbeConfig,
    pub criteria: Vec<CriterionReport>,
    pub combined: Combined,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
    pub tool_version: String,
}

#[derive(Debug, Clone)]
pub struct BlockProbeRun {
    pub report: BlockProbeReport,
    pub verdicts: Vec<CriterionVerdict>,
}

/// Probe a block corpus function: the joint residual criterion decides the
/// combined verdict; per-block operator-drift checks ride along as
/// sufficient-condition evidence.
pub fn run_block_probe(
    function_id: &str,
    cfg: &ProbeConfig,
    with_timestamp: bool,
) -> Result<BlockProbeRun> {
    let f = crate::corpus::find_block(function_id)?;
    let main = crate::blockgen::probe_block_cauchy_like(&f, cfg);
    let combined = combine_verdicts(&[main.verdict]);
    let mut verdicts = vec![main];
    for block in 0..f.block_dims.len() {
        match crate::blockgen::check_continuous_partial_differentiability(&f, block, cfg) {
            Ok(c) => {
                let verdict = match c.continuous {
                    Some(true) => Verdict::Consistent,
                    Some(false) => Verdict::ConditionsNotMet,
                    None => Verdict::Inconclusive,
                };
                verdicts.push(CriterionVerdict {
                    criterion: format!("block_continuity_{block}"),
                    verdict,
                    evidence: vec![crate::criteria::EvidenceItem {
                        context: c.drift_samples.context.clone(),
                        samples: c.drift_samples.clone(),
                        estimate: c.estimate.clone(),
                    }],
                    worst_direction: None,
                    notes: Vec::new(),
                });
            }
            Err(err) => verdicts.push(CriterionVerdict {
                criterion: format!("block_continuity_{block}"),
                verdict: Verdict::Inconclusive,
                evidence: Vec::new(),
                worst_direction: None,
                notes: vec![err.to_string()],
            }),
        }
    }
    let report = BlockProbeReport {
        function: function_id.to_string(),
        block_dims: f.block_dims.clone(),
        seed: cfg.seed,
        config: cfg.clone(),
        criteria: verdicts.iter().map(CriterionReport::from_verdict).collect(),
        combined,
        timestamp: if with_timestamp { now_unix() } else { None },
        tool_version: TOOL_VERSION.to_string(),
    };
    Ok(BlockProbeRun { report, verdicts })
}

/// Report output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvEvidence,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv-evidence" => Ok(ReportFormat::CsvEvidence),
            other => Err(Error::InvalidArgument(format!(
                "unsupported format `{other}`"
            ))),
        }
    }
}

pub fn emit_json(run: &ProbeRun) -> String {
    let mut out = serde_json::to_string_pretty(&run.report).expect("report serializes");
    out.push('\n');
    out
}

/// Flatten decay series to `criterion,context,rho,value,ratio` rows.
pub fn emit_csv_verdicts(verdicts: &[CriterionVerdict]) -> String {
    let mut out = String::from("criterion,context,rho,value,ratio\n");
    for verdict in verdicts {
        for item in &verdict.evidence {
            let mut rows = String::new();
            item.samples.csv_rows(&mut rows);
            for line in rows.lines() {
                out.push_str(&verdict.criterion);
                out.push(',');
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

pub fn emit_csv(run: &ProbeRun) -> String {
    emit_csv_verdicts(&run.verdicts)
}

pub fn emit_report(run: &ProbeRun, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => emit_json(run),
        ReportFormat::CsvEvidence => emit_csv(run),
    }
}

pub fn emit_block_report(run: &BlockProbeRun, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(&run.report).expect("report serializes");
            out.push('\n');
            out
        }
        ReportFormat::CsvEvidence => emit_csv_verdicts(&run.verdicts),
    }
}

/// Gridded surface samples `x,y,f(x,y)` for external plotting; only
/// 2-dimensional corpus functions have a surface.
pub fn surface_csv(function_id: &str, grid: usize, extent: f64) -> Result<String> {
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must be >= 2".into()));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::InvalidArgument("extent must be positive".into()));
    }
    let f = find_scalar(function_id)?;
    if f.dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "surface needs a 2-dimensional function, `{function_id}` has dimension {}",
            f.dim
        )));
    }
    let mut out = String::from("x,y,f\n");
    for i in 0..grid {
        for j in 0..grid {
            let x = -extent + 2.0 * extent * (i as f64) / ((grid - 1) as f64);
            let y = -extent + 2.0 * extent * (j as f64) / ((grid - 1) as f64);
            let v = f.eval(&Vector::new(vec![x, y]).expect("finite grid point"));
            out.push_str(&format!("{x},{y},{v}\n"));
        }
    }
    Ok(out)
}
