//! Numerical differentiability probes for black-box multivariable functions.
//!
//! Given a function of several real variables (or of blocks of variables,
//! or of complex variables), the probes gather decay evidence at shrinking
//! radii and classify it: is the function consistent with being
//! differentiable at the origin, refuted at the sampled scales, or is the
//! evidence inconclusive? A labeled corpus of classical counterexamples
//! backs the regression suite.
//!
//! ```
//! use diffprobe_core::corpus::find_scalar;
//! use diffprobe_core::criteria::{probe_cauchy_like, ProbeConfig, Verdict};
//!
//! let g2 = find_scalar("g2").unwrap();
//! let verdict = probe_cauchy_like(&g2, &ProbeConfig::default());
//! assert_eq!(verdict.verdict, Verdict::Refuted);
//! ```

pub mod asymptotics;
pub mod blockgen;
pub mod corpus;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod numcore;
pub mod report;

pub use asymptotics::{Classification, DecaySamples, OrderEstimate, Tolerances};
pub use corpus::{BlockField, ComplexFieldSample, ScalarField, Truth};
pub use criteria::{CriterionVerdict, ProbeConfig, Verdict};
pub use error::{Error, Result};
pub use numcore::{BlockVector, DirectionSet, RadialSchedule, Vector};
pub use report::{
    BlockProbeReport, BlockProbeRun, Combined, CriterionKind, ProbeReport, ProbeRun, ReportFormat,
};
