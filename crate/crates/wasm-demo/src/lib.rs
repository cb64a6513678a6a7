//! wasm-bindgen surface for the browser demo: probe a corpus function,
//! fetch its decay evidence for plotting, sample its surface as a heatmap
//! grid, and trace the directional-derivative fan that visualizes why a
//! function fails to be differentiable.
//!
//! Everything returns JSON strings or flat `Vec<f64>` buffers so the page
//! needs no framework, just `JSON.parse` and a canvas.

use wasm_bindgen::prelude::*;

use diffprobe_core::corpus::{corpus_list, find_scalar};
use diffprobe_core::criteria::{directional_derivative, ProbeConfig};
use diffprobe_core::report::{emit_csv, run_probe, surface_csv, CriterionKind};
use diffprobe_core::{RadialSchedule, Vector};

fn config(
    rho0: f64,
    lambda: f64,
    count: usize,
    extra_dirs: usize,
    seed: u64,
) -> Result<ProbeConfig, JsValue> {
    let schedule =
        RadialSchedule::new(rho0, lambda, count).map_err(|e| JsValue::from_str(&e.to_string()))?;
    Ok(ProbeConfig {
        schedule,
        extra_dirs,
        seed,
        ..ProbeConfig::default()
    })
}

/// Catalog of scalar corpus functions as JSON:
/// `[{id, dim, formula, truth, note}, ...]`.
#[wasm_bindgen]
pub fn list_functions() -> String {
    let entries: Vec<serde_json::Value> = corpus_list()
        .iter()
        .map(|f| {
            serde_json::json!({
                "id": f.name,
                "dim": f.dim,
                "formula": f.formula,
                "truth": f.truth.to_string(),
                "note": f.truth_note,
            })
        })
        .collect();
    serde_json::Value::Array(entries).to_string()
}

/// Run all criteria against one corpus function and return the JSON report
/// (timestamp-free, so identical inputs give identical bytes).
#[wasm_bindgen]
pub fn probe_json(
    function: &str,
    rho0: f64,
    lambda: f64,
    count: usize,
    extra_dirs: usize,
    seed: u64,
) -> Result<String, JsValue> {
    let cfg = config(rho0, lambda, count, extra_dirs, seed)?;
    let run = run_probe(function, None, &CriterionKind::all(), &cfg, false)
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    Ok(diffprobe_core::report::emit_json(&run))
}

/// The flattened decay evidence (criterion,context,rho,value,ratio CSV)
/// for log-log plotting.
#[wasm_bindgen]
pub fn evidence_csv(
    function: &str,
    rho0: f64,
    lambda: f64,
    count: usize,
    extra_dirs: usize,
    seed: u64,
) -> Result<String, JsValue> {
    let cfg = config(rho0, lambda, count, extra_dirs, seed)?;
    let run = run_probe(function, None, &CriterionKind::all(), &cfg, false)
        .map_err(|e| JsValue::from_str(&e.to_string()))?;
    Ok(emit_csv(&run))
}

/// Row-major `grid x grid` surface samples of a 2-d function over
/// `[-extent, extent]^2`, for heatmap rendering.
#[wasm_bindgen]
pub fn surface_grid(function: &str, grid: usize, extent: f64) -> Result<Vec<f64>, JsValue> {
    let csv = surface_csv(function, grid, extent).map_err(|e| JsValue::from_str(&e.to_string()))?;
    Ok(csv
        .lines()
        .skip(1)
        .filter_map(|line| line.rsplit(',').next())
        .filter_map(|v| v.parse().ok())
        .collect())
}

/// Directional derivatives at the origin over `count` angles in [0, 2pi):
/// returns interleaved `(phi, slope)` pairs. A differentiable function
/// traces a pure sine here; anything else has no tangent plane.
#[wasm_bindgen]
pub fn directional_fan(function: &str, count: usize, seed: u64) -> Result<Vec<f64>, JsValue> {
    let f = find_scalar(function).map_err(|e| JsValue::from_str(&e.to_string()))?;
    if f.dim != 2 {
        return Err(JsValue::from_str(
            "directional fan needs a 2-dimensional function",
        ));
    }
    if count < 4 {
        return Err(JsValue::from_str("need at least 4 angles"));
    }
    let cfg = ProbeConfig {
        seed,
        ..ProbeConfig::default()
    };
    let mut out = Vec::with_capacity(2 * count);
    for k in 0..count {
        let phi = 2.0 * std::f64::consts::PI * (k as f64) / (count as f64);
        let u = Vector::new(vec![phi.cos(), phi.sin()]).expect("finite direction");
        let slope = match directional_derivative(&f, &u, &cfg) {
            Ok(d) => d.value,
            Err(_) => f64::NAN,
        };
        out.push(phi);
        out.push(slope);
    }
    Ok(out)
}
