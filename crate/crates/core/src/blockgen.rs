//! Probes for block-structured functions `F: Y_1 x ... x Y_n -> Z` and the
//! complex-variable check built on top of them.
//!
//! In a product of spaces there are no partial derivatives to speak of:
//! partial differentiability means a linear map per block approximating the
//! restriction of F to that block to o(block norm). The residual criterion
//! then reads exactly as in the scalar case, with the product norm
//! `rho = max_j |Y_j|`.

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{
    classify_vanishing, estimate_order, Classification, DecaySamples, OrderEstimate,
};
use crate::corpus::{block_partial_values, BlockField, ComplexFieldSample};
use crate::criteria::{probe_cauchy_like, CriterionVerdict, EvidenceItem, ProbeConfig, Verdict};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::numcore::{make_directions, random_unit_vector, unit_axis, BlockVector, Vector};

pub const BLOCK_CRITERION_NAME: &str = "block_cauchy_like";
pub const CR_CRITERION_NAME: &str = "cauchy_riemann";

/// A fitted linear map `Y_j -> Z` for one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockLinearMap {
    /// 0-based block index.
    pub block_index: usize,
    /// codomain_dim rows by block-dim columns.
    pub matrix: Vec<Vec<f64>>,
}

impl BlockLinearMap {
    pub fn apply(&self, y: &Vector) -> Vector {
        let coords = self
            .matrix
            .iter()
            .map(|row| row.iter().zip(y.coords()).map(|(m, x)| m * x).sum())
            .collect();
        Vector::new(coords).expect("finite linear image")
    }

    /// Largest entrywise deviation from a reference matrix.
    pub fn max_entry_delta(&self, reference: &[&[f64]]) -> f64 {
        let mut delta = 0.0_f64;
        for (row, ref_row) in self.matrix.iter().zip(reference) {
            for (a, b) in row.iter().zip(ref_row.iter()) {
                delta = delta.max((a - b).abs());
            }
        }
        delta
    }
}

/// Outcome of a per-block linearity fit: the map, the restriction residual
/// series, and its little-o classification (partial differentiability holds
/// exactly when the residual vanishes faster than the block norm).
#[derive(Debug, Clone)]
pub struct BlockLinearFit {
    pub map: BlockLinearMap,
    pub samples: DecaySamples,
    pub estimate: OrderEstimate,
}

fn restricted_eval(f: &BlockField, block: usize, y: &Vector) -> Result<Vector> {
    let out = f.eval(&BlockVector::only_block(&f.block_dims, block, y.clone()));
    if out.coords().iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            context: format!("{} restricted to block {block} at {}", f.name, y.label()),
        });
    }
    Ok(out)
}

/// Fit the block-j linear map on the finest schedule shell (an outer-shell
/// fit carries an O(rho0) coefficient bias that would swamp superlinear
/// restriction residuals), then classify the restriction residual
/// `|F(0,..,Y_j,..,0) - L_j(Y_j)|` over the schedule.
pub fn fit_block_linear(f: &BlockField, block: usize, cfg: &ProbeConfig) -> Result<BlockLinearFit> {
    if block >= f.block_dims.len() {
        return Err(Error::InvalidArgument(format!(
            "block {block} out of range for {} blocks",
            f.block_dims.len()
        )));
    }
    let d = f.block_dims[block];
    let dirs = make_directions(d, cfg.extra_dirs, cfg.seed.wrapping_add(block as u64))
        .expect("block dim >= 1");
    let fit_rho = *cfg.schedule.radii().last().expect("schedule emits radii");

    // One least-squares problem per codomain component, shared design.
    let rows: Vec<Vec<f64>> = dirs
        .directions()
        .iter()
        .map(|u| u.scaled(fit_rho).coords().to_vec())
        .collect();
    let mut images = Vec::with_capacity(dirs.len());
    for u in dirs.directions() {
        images.push(restricted_eval(f, block, &u.scaled(fit_rho))?);
    }
    let mut matrix = Vec::with_capacity(f.codomain_dim);
    for component in 0..f.codomain_dim {
        let y: Vec<f64> = images.iter().map(|v| v.coords()[component]).collect();
        matrix.push(least_squares(&rows, &y)?);
    }
    let map = BlockLinearMap {
        block_index: block,
        matrix,
    };

    let mut pairs = Vec::new();
    for rho in cfg.schedule.radii() {
        let mut sup = 0.0_f64;
        for u in dirs.directions() {
            let y = u.scaled(rho);
            let residual = restricted_eval(f, block, &y)?.sub(&map.apply(&y)).norm();
            sup = sup.max(residual);
        }
        pairs.push((rho, sup));
    }
    let samples = DecaySamples::new(
        &format!("block {block} restriction residual"),
        pairs,
        cfg.schedule.floor_truncated(),
    )?;
    let estimate = estimate_order(&samples, &cfg.tol);
    Ok(BlockLinearFit {
        map,
        samples,
        estimate,
    })
}

/// Seeded tuples of one unit direction per block.
fn block_direction_tuples(dims: &[usize], count: usize, seed: u64) -> Vec<Vec<Vector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            dims.iter()
                .map(|&d| random_unit_vector(&mut rng, d))
                .collect()
        })
        .collect()
}

/// The residual criterion on the product space: every block must be
/// partially differentiable (the fits), and `|F(Y) - sum of block partial
/// values|` must be o(max_j |Y_j|) along sampled block directions.
pub fn probe_block_cauchy_like(f: &BlockField, cfg: &ProbeConfig) -> CriterionVerdict {
    let mut notes = Vec::new();
    let mut evidence = Vec::new();
    let mut classifications = Vec::new();

    for block in 0..f.block_dims.len() {
        match fit_block_linear(f, block, cfg) {
            Ok(fit) => {
                if fit.estimate.classification == Classification::NotLittleO {
                    notes.push(format!("block {block}: partial differentiability fails"));
                }
                classifications.push(fit.estimate.classification);
                evidence.push(EvidenceItem {
                    context: fit.samples.context.clone(),
                    samples: fit.samples.clone(),
                    estimate: fit.estimate.clone(),
                });
            }
            Err(err) => {
                notes.push(format!("block {block} fit: {err}"));
                return CriterionVerdict {
                    criterion: BLOCK_CRITERION_NAME.into(),
                    verdict: Verdict::Inconclusive,
                    evidence,
                    worst_direction: None,
                    notes,
                };
            }
        }
    }

    // Joint scaling: every block direction shares one rho, so the product
    // norm max_j |Y_j| is exactly rho.
    let tuples = block_direction_tuples(&f.block_dims, cfg.block_tuples, cfg.seed);
    let mut eval_failed = false;
    for (t, tuple) in tuples.iter().enumerate() {
        let context = format!("joint residual tuple {t:02}");
        let mut pairs = Vec::new();
        let mut failed = None;
        for rho in cfg.schedule.radii() {
            let y = BlockVector::new(tuple.iter().map(|u| u.scaled(rho)).collect())
                .expect("non-empty blocks");
            let total = f.eval(&y);
            if total.coords().iter().any(|c| !c.is_finite()) {
                failed = Some(format!("{context}: non-finite evaluation at rho={rho:e}"));
                break;
            }
            let parts = block_partial_values(f, &y);
            let mut residual = total;
            for p in &parts {
                residual = residual.sub(p);
            }
            pairs.push((rho, residual.norm()));
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

    let mut verdict = crate::criteria::aggregate_classifications(&classifications);
    if eval_failed && verdict == Verdict::Consistent {
        verdict = Verdict::Inconclusive;
    }
    CriterionVerdict {
        criterion: BLOCK_CRITERION_NAME.into(),
        verdict,
        evidence,
        worst_direction: None,
        notes,
    }
}

/// Drift evidence for continuous partial differentiability of one block.
#[derive(Debug, Clone)]
pub struct BlockContinuity {
    pub block_index: usize,
    /// Max over offsets and unit directions of
    /// `|L_j(offset) v - L_j(0) v|` per offset radius.
    pub drift_samples: DecaySamples,
    pub estimate: OrderEstimate,
    /// Tri-state: drift vanishes, persists, or unknown.
    pub continuous: Option<bool>,
}

/// Refit the block map at base points drifting toward the origin and
/// classify the operator drift `|L_j(offset) - L_j(0)|` (approximated by a
/// max over sampled unit directions).
pub fn check_continuous_partial_differentiability(
    f: &BlockField,
    block: usize,
    cfg: &ProbeConfig,
) -> Result<BlockContinuity> {
    let origin_fit = fit_block_linear(f, block, cfg)?;
    let d = f.block_dims[block];
    let dirs = make_directions(d, cfg.extra_dirs, cfg.seed.wrapping_add(block as u64))
        .expect("block dim >= 1");

    const OFFSETS_PER_RADIUS: usize = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x0ff5e7));
    let mut pairs = Vec::new();
    for rho in cfg.schedule.radii() {
        let mut drift = 0.0_f64;
        for _ in 0..OFFSETS_PER_RADIUS {
            // Offset in the complement blocks only, at distance rho.
            let blocks: Vec<Vector> = f
                .block_dims
                .iter()
                .enumerate()
                .map(|(j, &dj)| {
                    if j == block {
                        Vector::zeros(dj)
                    } else {
                        random_unit_vector(&mut rng, dj).scaled(rho)
                    }
                })
                .collect();
            let base = BlockVector::new(blocks).expect("non-empty blocks");
            let f_base = f.eval(&base);

            // Fit the local map from the offset base point.
            let rows: Vec<Vec<f64>> = dirs
                .directions()
                .iter()
                .map(|u| u.scaled(rho).coords().to_vec())
                .collect();
            let mut images = Vec::with_capacity(dirs.len());
            for u in dirs.directions() {
                let point = base.with_block(block, u.scaled(rho));
                let g = f.eval(&point).sub(&f_base);
                if g.coords().iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite {
                        context: format!("{} near offset at rho={rho:e}", f.name),
                    });
                }
                images.push(g);
            }
            let mut local = Vec::with_capacity(f.codomain_dim);
            for component in 0..f.codomain_dim {
                let y: Vec<f64> = images.iter().map(|v| v.coords()[component]).collect();
                local.push(least_squares(&rows, &y)?);
            }
            let local_map = BlockLinearMap {
                block_index: block,
                matrix: local,
            };

            for u in dirs.directions() {
                let delta = local_map.apply(u).sub(&origin_fit.map.apply(u)).norm();
                drift = drift.max(delta);
            }
        }
        pairs.push((rho, drift));
    }
    let drift_samples = DecaySamples::new(
        &format!("block {block} operator drift"),
        pairs,
        cfg.schedule.floor_truncated(),
    )?;
    let (classification, estimate) = classify_vanishing(&drift_samples, &cfg.tol);
    let continuous = match classification {
        c if c.is_vanishing() => Some(true),
        Classification::NotLittleO => Some(false),
        _ => None,
    };
    Ok(BlockContinuity {
        block_index: block,
        drift_samples,
        estimate,
        continuous,
    })
}

/// Wirtinger conjugate derivatives `df/d(conj z_i)` at the origin by
/// Richardson-extrapolated differences of the real embedding.
pub fn wirtinger_conjugate_derivatives(
    f: &ComplexFieldSample,
    cfg: &ProbeConfig,
) -> Result<Vec<Complex64>> {
    let dim = 2 * f.n;
    (0..f.n)
        .map(|i| {
            let axis_re = unit_axis(2 * i + 1, dim).expect("axis in range");
            let axis_im = unit_axis(2 * i + 2, dim).expect("axis in range");
            let dx = crate::criteria::richardson_complex(
                |t| f.eval_embedded(&axis_re.scaled(t)),
                cfg.schedule.rho0,
                cfg.richardson_tol,
                &format!("{} d/dx_{i}", f.name),
            )?;
            let dy = crate::criteria::richardson_complex(
                |t| f.eval_embedded(&axis_im.scaled(t)),
                cfg.schedule.rho0,
                cfg.richardson_tol,
                &format!("{} d/dy_{i}", f.name),
            )?;
            // d/d(conj z) = (d/dx + i d/dy) / 2.
            Ok((dx.value + Complex64::i() * dy.value) * 0.5)
        })
        .collect()
}

/// Complex differentiability check at the origin: the conjugate Wirtinger
/// derivatives must vanish, and the real embedding (both components) must
/// pass the residual criterion on `R^{2n}`.
pub fn cr_check(f: &ComplexFieldSample, cfg: &ProbeConfig) -> CriterionVerdict {
    let mut notes = Vec::new();

    let at_zero = f.eval(&vec![Complex64::new(0.0, 0.0); f.n]);
    if at_zero.norm() > 1e3 * f64::EPSILON {
        notes.push(format!("not normalized: |f(0)| = {:e}", at_zero.norm()));
        return CriterionVerdict {
            criterion: CR_CRITERION_NAME.into(),
            verdict: Verdict::Inconclusive,
            evidence: Vec::new(),
            worst_direction: None,
            notes,
        };
    }

    let conj_derivs = match wirtinger_conjugate_derivatives(f, cfg) {
        Ok(d) => d,
        Err(err) => {
            notes.push(err.to_string());
            return CriterionVerdict {
                criterion: CR_CRITERION_NAME.into(),
                verdict: Verdict::Inconclusive,
                evidence: Vec::new(),
                worst_direction: None,
                notes,
            };
        }
    };
    for (i, d) in conj_derivs.iter().enumerate() {
        notes.push(format!("|df/d(conj z_{i})| = {:.3e}", d.norm()));
    }
    if conj_derivs.iter().any(|d| d.norm() > cfg.cr_tol) {
        notes.push("conjugate derivative exceeds tolerance; real probe skipped".into());
        return CriterionVerdict {
            criterion: CR_CRITERION_NAME.into(),
            verdict: Verdict::Refuted,
            evidence: Vec::new(),
            worst_direction: None,
            notes,
        };
    }

    // Real differentiability of the embedding: both components must pass.
    let mut evidence = Vec::new();
    let mut verdicts = Vec::new();
    for imag in [false, true] {
        let component = f.component_field(imag);
        let verdict = probe_cauchy_like(&component, cfg);
        let prefix = if imag { "im" } else { "re" };
        for item in verdict.evidence {
            evidence.push(EvidenceItem {
                context: format!("{prefix} {}", item.context),
                samples: item.samples,
                estimate: item.estimate,
            });
        }
        for note in verdict.notes {
            notes.push(format!("{prefix}: {note}"));
        }
        verdicts.push(verdict.verdict);
    }
    let verdict = if verdicts.contains(&Verdict::Refuted) {
        Verdict::Refuted
    } else if verdicts.iter().all(|v| *v == Verdict::Consistent) {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };
    CriterionVerdict {
        criterion: CR_CRITERION_NAME.into(),
        verdict,
        evidence,
        worst_direction: None,
        notes,
    }
}
