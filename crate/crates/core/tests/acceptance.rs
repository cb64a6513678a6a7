//! Acceptance suite: one test per exit criterion, each printing a PASS or
//! FAIL line (run with `--nocapture` to see them). Tolerances are pinned
//! here, not configurable.

use diffprobe_core::blockgen::{
    cr_check, fit_block_linear, probe_block_cauchy_like, wirtinger_conjugate_derivatives,
};
use diffprobe_core::corpus::{
    corpus_list, find_block, find_complex, find_scalar, BLOCK_M1, BLOCK_M2,
};
use diffprobe_core::criteria::{
    cauchy_determinant, cauchy_matrix, directional_derivative, hadamard_bound,
    probe_cauchy_determinant_with_tuples, probe_cauchy_like, probe_cauchy_like_with_dirs,
    probe_geo, sample_base_tuples, ProbeConfig, Verdict,
};
use diffprobe_core::numcore::{DirectionSet, RadialSchedule, Vector};
use diffprobe_core::report::{emit_json, run_corpus, run_probe, CriterionKind};
use diffprobe_core::Combined;

const INV_TWO_SQRT_TWO: f64 = 0.35355339059327373;

fn criterion(name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("acceptance {name}: PASS"),
        Err(msg) => {
            println!("acceptance {name}: FAIL ({msg})");
            panic!("{name}: {msg}");
        }
    }
}

fn check(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn v(coords: &[f64]) -> Vector {
    Vector::new(coords.to_vec()).unwrap()
}

/// Criterion 1: Every corpus entry's combined verdict matches its truth label.
#[test]
fn criterion_01_corpus_regression() {
    criterion("01 corpus regression", || {
        let summary = run_corpus(&ProbeConfig::default());
        check(
            summary.passes(false),
            format!(
                "mismatches: {:?}, conflicts: {:?}",
                summary.mismatches, summary.conflicts
            ),
        )
    });
}

/// Criterion 2: g2's quantitative evidence: diagonal tail ratio 1/(2 sqrt 2) within
/// 1e-3, and the directional fan matches cos^2 phi sin phi within 1e-6.
#[test]
fn criterion_02_g2_quantitative() {
    criterion("02 g2 quantitative evidence", || {
        let cfg = ProbeConfig::default();
        let g2 = find_scalar("g2").unwrap();

        let dirs = DirectionSet::axes_with(2, &[v(&[1.0, 1.0])]).unwrap();
        let verdict = probe_cauchy_like_with_dirs(&g2, &dirs, &cfg);
        check(
            verdict.verdict == Verdict::Refuted,
            format!("verdict {:?}", verdict.verdict),
        )?;
        let tail = verdict
            .worst_evidence()
            .and_then(|e| e.final_ratio())
            .ok_or("missing evidence")?;
        check(
            (tail - INV_TWO_SQRT_TWO).abs() <= 1e-3,
            format!("worst tail ratio {tail} vs {INV_TWO_SQRT_TWO}"),
        )?;

        for k in 0..16 {
            let phi = 2.0 * std::f64::consts::PI * (k as f64) / 16.0;
            let u = v(&[phi.cos(), phi.sin()]);
            let d = directional_derivative(&g2, &u, &cfg).map_err(|e| e.to_string())?;
            let expected = phi.cos().powi(2) * phi.sin();
            check(
                (d.value - expected).abs() <= 1e-6,
                format!("phi={phi}: slope {} vs {expected}", d.value),
            )?;
        }
        Ok(())
    });
}

/// Criterion 3: h_osc: consistent verdict with residual slope 2.0 +/- 0.1, and the
/// finest-shell geo gradient below 1e-2.
#[test]
fn criterion_03_h_osc() {
    criterion("03 h_osc second-order residual", || {
        let cfg = ProbeConfig::default();
        let h = find_scalar("h_osc2").unwrap();

        let verdict = probe_cauchy_like(&h, &cfg);
        check(
            verdict.verdict == Verdict::Consistent,
            format!("verdict {:?} notes {:?}", verdict.verdict, verdict.notes),
        )?;
        let slope = verdict
            .worst_evidence()
            .ok_or("missing evidence")?
            .estimate
            .slope;
        check(
            (slope - 2.0).abs() <= 0.1,
            format!("residual slope {slope}"),
        )?;

        let (geo_verdict, geo) = probe_geo(&h, &cfg);
        check(
            geo_verdict.verdict == Verdict::Consistent,
            format!("geo {:?}", geo_verdict.verdict),
        )?;
        let a = geo.ok_or("missing geo evidence")?.fitted_a.norm();
        check(a <= 1e-2, format!("fitted |A| = {a}"))
    });
}

/// Criterion 4: Determinant criterion: linear functions annihilate it on 100 seeded
/// tuples; g2 pins the ratio 1/(2 sqrt 2), constant across 6 scaling steps.
#[test]
fn criterion_04_determinant() {
    criterion("04 determinant criterion", || {
        let linear = find_scalar("linear_23").unwrap();
        let tuples = sample_base_tuples(2, 100, 42);
        check(
            tuples.len() == 100,
            format!("only {} tuples accepted", tuples.len()),
        )?;
        for tuple in &tuples {
            let m = cauchy_matrix(&linear, tuple).map_err(|e| e.to_string())?;
            let det = cauchy_determinant(&linear, tuple).map_err(|e| e.to_string())?;
            let bound = hadamard_bound(&m);
            check(
                det.abs() <= 1e-12 * bound,
                format!("|det| {} vs bound {bound}", det.abs()),
            )?;
        }

        let g2 = find_scalar("g2").unwrap();
        let cfg = ProbeConfig {
            schedule: RadialSchedule::new(1.0, 0.5, 6).unwrap(),
            ..ProbeConfig::default()
        };
        let base = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])];
        let verdict = probe_cauchy_determinant_with_tuples(&g2, &[base], &cfg);
        check(
            verdict.verdict == Verdict::Refuted,
            format!("verdict {:?}", verdict.verdict),
        )?;
        let samples = &verdict.evidence[0].samples;
        check(
            samples.pairs.len() == 6,
            format!("{} scaling steps", samples.pairs.len()),
        )?;
        for &(rho, value) in &samples.pairs {
            let ratio = value / rho;
            check(
                (ratio - INV_TWO_SQRT_TWO).abs() <= 1e-3,
                format!("ratio {ratio} at rho {rho}"),
            )?;
        }
        Ok(())
    });
}

/// Criterion 5: Hadamard's inequality holds (8 ulp slack) on every tuple the suite
/// samples: the seeded probe tuples at every schedule radius, for every
/// corpus function of matching dimension.
#[test]
fn criterion_05_hadamard_soundness() {
    criterion("05 Hadamard soundness", || {
        let cfg = ProbeConfig::default();
        let slack = 1.0 + 8.0 * f64::EPSILON;
        let mut checked = 0usize;
        for f in corpus_list() {
            let tuples = sample_base_tuples(f.dim, cfg.det_tuples, cfg.seed);
            for tuple in &tuples {
                for rho in cfg.schedule.radii() {
                    let scaled: Vec<Vector> = tuple.iter().map(|x| x.scaled(rho)).collect();
                    let m = cauchy_matrix(&f, &scaled).map_err(|e| e.to_string())?;
                    let det = cauchy_determinant(&f, &scaled).map_err(|e| e.to_string())?;
                    let bound = hadamard_bound(&m);
                    check(
                        det.abs() <= bound * slack,
                        format!("{}: |det| {} vs bound {bound}", f.name, det.abs()),
                    )?;
                    checked += 1;
                }
            }
        }
        check(checked > 2000, format!("only {checked} tuples checked"))
    });
}

/// Criterion 6: Criterion agreement: no function gets Consistent from one criterion
/// and Refuted from another; no combined verdict is Conflicting; decisive
/// verdicts match the truth labels.
#[test]
fn criterion_06_criterion_agreement() {
    criterion("06 criterion agreement", || {
        let cfg = ProbeConfig::default();
        for f in corpus_list() {
            let verdicts = [
                probe_cauchy_like(&f, &cfg),
                diffprobe_core::criteria::probe_cauchy_determinant(&f, &cfg),
                probe_geo(&f, &cfg).0,
            ];
            let any_consistent = verdicts.iter().any(|v| v.verdict == Verdict::Consistent);
            let any_refuted = verdicts.iter().any(|v| v.verdict == Verdict::Refuted);
            check(
                !(any_consistent && any_refuted),
                format!(
                    "{}: {:?}",
                    f.name,
                    verdicts
                        .iter()
                        .map(|v| (v.criterion.clone(), v.verdict))
                        .collect::<Vec<_>>()
                ),
            )?;
            for verdict in &verdicts {
                let matches_truth = match verdict.verdict {
                    Verdict::Consistent => f.truth == diffprobe_core::Truth::DifferentiableAtOrigin,
                    Verdict::Refuted => f.truth == diffprobe_core::Truth::NotDifferentiableAtOrigin,
                    _ => true,
                };
                check(
                    matches_truth,
                    format!(
                        "{}: {} says {:?}",
                        f.name, verdict.criterion, verdict.verdict
                    ),
                )?;
            }
        }
        let summary = run_corpus(&cfg);
        check(
            summary.conflicts.is_empty(),
            format!("conflicting: {:?}", summary.conflicts),
        )
    });
}

/// Criterion 7: Relaxed sufficient conditions on relaxed_demo: the (y, x) order
/// passes, the (x, y) order fails as ConditionsNotMet.
#[test]
fn criterion_07_relaxed_conditions() {
    criterion("07 relaxed sufficient conditions", || {
        let cfg = ProbeConfig::default();
        let f = find_scalar("relaxed_demo").unwrap();
        let (good, _) = diffprobe_core::criteria::check_relaxed_conditions(&f, &[2, 1], &cfg);
        check(
            good.verdict == Verdict::Consistent,
            format!("(y,x) verdict {:?} notes {:?}", good.verdict, good.notes),
        )?;
        let (bad, _) = diffprobe_core::criteria::check_relaxed_conditions(&f, &[1, 2], &cfg);
        check(
            bad.verdict == Verdict::ConditionsNotMet,
            format!("(x,y) verdict {:?} notes {:?}", bad.verdict, bad.notes),
        )
    });
}

/// Criterion 8: Block generalization: the |u||v| cross term is consistent with slope
/// 2 and exact block fits; the sqrt cross term is refuted with tail ratio 1.
#[test]
fn criterion_08_block_generalization() {
    criterion("08 block generalization", || {
        let cfg = ProbeConfig::default();

        let cross = find_block("block_cross").unwrap();
        let verdict = probe_block_cauchy_like(&cross, &cfg);
        check(
            verdict.verdict == Verdict::Consistent,
            format!(
                "block_cross {:?} notes {:?}",
                verdict.verdict, verdict.notes
            ),
        )?;
        let joint = verdict
            .evidence
            .iter()
            .filter(|e| e.context.starts_with("joint"))
            .max_by(|a, b| {
                a.final_ratio()
                    .unwrap()
                    .total_cmp(&b.final_ratio().unwrap())
            })
            .ok_or("no joint evidence")?;
        check(
            (joint.estimate.slope - 2.0).abs() <= 0.1,
            format!("joint residual slope {}", joint.estimate.slope),
        )?;

        let m1: Vec<&[f64]> = BLOCK_M1.iter().map(|r| r.as_slice()).collect();
        let m2: Vec<&[f64]> = BLOCK_M2.iter().map(|r| r.as_slice()).collect();
        let fit0 = fit_block_linear(&cross, 0, &cfg).map_err(|e| e.to_string())?;
        check(
            fit0.map.max_entry_delta(&m1) <= 1e-8,
            format!("M1 fit delta {}", fit0.map.max_entry_delta(&m1)),
        )?;
        let fit1 = fit_block_linear(&cross, 1, &cfg).map_err(|e| e.to_string())?;
        check(
            fit1.map.max_entry_delta(&m2) <= 1e-8,
            format!("M2 fit delta {}", fit1.map.max_entry_delta(&m2)),
        )?;

        let sqrt_cross = find_block("block_sqrt_cross").unwrap();
        let verdict = probe_block_cauchy_like(&sqrt_cross, &cfg);
        check(
            verdict.verdict == Verdict::Refuted,
            format!("sqrt cross {:?}", verdict.verdict),
        )?;
        let tail = verdict
            .evidence
            .iter()
            .filter(|e| e.context.starts_with("joint"))
            .filter_map(|e| e.final_ratio())
            .fold(0.0_f64, f64::max);
        check(
            (tail - 1.0).abs() <= 0.05,
            format!("sqrt cross tail ratio {tail}"),
        )
    });
}

/// Criterion 9: Complex check: z^2 and |z|^2 pass at the origin, conj(z) is refuted
/// with a unit conjugate derivative.
#[test]
fn criterion_09_complex_check() {
    criterion("09 complex Cauchy-Riemann check", || {
        let cfg = ProbeConfig::default();
        let square = find_complex("cx_square").unwrap();
        let verdict = cr_check(&square, &cfg);
        check(
            verdict.verdict == Verdict::Consistent,
            format!("z^2 {:?} notes {:?}", verdict.verdict, verdict.notes),
        )?;

        let conj = find_complex("cx_conj").unwrap();
        let derivs = wirtinger_conjugate_derivatives(&conj, &cfg).map_err(|e| e.to_string())?;
        check(
            (derivs[0].norm() - 1.0).abs() <= 1e-6,
            format!("|d/d(conj z)| = {}", derivs[0].norm()),
        )?;
        check(
            cr_check(&conj, &cfg).verdict == Verdict::Refuted,
            "conj(z) not refuted".into(),
        )?;

        let modsq = find_complex("cx_modsq").unwrap();
        let verdict = cr_check(&modsq, &cfg);
        check(
            verdict.verdict == Verdict::Consistent,
            format!("|z|^2 {:?} notes {:?}", verdict.verdict, verdict.notes),
        )
    });
}

/// Criterion 10: Determinism: identical flags and seed give byte-identical JSON.
#[test]
fn criterion_10_determinism() {
    criterion("10 byte-stable reports", || {
        let cfg = ProbeConfig::default();
        let a =
            run_probe("g2", None, &CriterionKind::all(), &cfg, false).map_err(|e| e.to_string())?;
        let b =
            run_probe("g2", None, &CriterionKind::all(), &cfg, false).map_err(|e| e.to_string())?;
        check(
            emit_json(&a) == emit_json(&b),
            "probe JSON differs across runs".into(),
        )?;
        check(
            a.report.combined == Combined::Refuted,
            format!("combined {:?}", a.report.combined),
        )
    });
}
