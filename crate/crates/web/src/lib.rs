//! wasm-bindgen entry points for the static demo page. Each returns a JSON string.

use diracwell::emission::{emission_spectrum, overlap_coefficients, Occupation, TransitionScenario};
use diracwell::levinson::{vacuum_charge, ZeroModeConvention};
use diracwell::scattering::phase_shift_curve;
use diracwell::spectrum::bound_states;
use diracwell::WellParams;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn fail(e: diracwell::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Phase shifts δ±(ε) for `1 < ε ≤ eps_max`.
#[wasm_bindgen]
pub fn phase_curve(m: f64, a: f64, v: f64, eps_max: f64, points: usize) -> Result<String, JsError> {
    let p = WellParams::new(m, a, v).map_err(fail)?;
    let c = phase_shift_curve(&p, eps_max, points.max(2)).map_err(fail)?;
    Ok(json!({
        "eps": c.samples.iter().map(|s| s.eps).collect::<Vec<_>>(),
        "plus": c.samples.iter().map(|s| s.delta_plus).collect::<Vec<_>>(),
        "minus": c.samples.iter().map(|s| s.delta_minus).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Bound-state energies and vacuum charge over `0 ≤ V ≤ v_max`.
#[wasm_bindgen]
pub fn level_curves(m: f64, a: f64, v_max: f64, points: usize) -> Result<String, JsError> {
    let base = WellParams::new(m, a, 0.0).map_err(fail)?;
    let n = points.max(2);
    let mut levels = Vec::new();
    let mut charge = Vec::new();
    for i in 0..n {
        let v = v_max * i as f64 / (n - 1) as f64;
        let p = base.with_depth(v);
        for s in bound_states(&p) {
            levels.push(json!([v, s.energy, s.parity.sign(), s.index]));
        }
        if let Ok(q) = vacuum_charge(&p, ZeroModeConvention::Electron) {
            charge.push(json!([v, q.q0]));
        }
    }
    Ok(json!({ "levels": levels, "charge": charge }).to_string())
}

/// Positron spectrum after switching the depth across the first critical value.
#[wasm_bindgen]
pub fn emission(m: f64, a: f64, band: f64, half_length: f64, eps_max: f64, filled: bool) -> Result<String, JsError> {
    let occ = if filled { Occupation::Filled } else { Occupation::Vacant };
    let s = TransitionScenario::symmetric(m, a, band, half_length, eps_max, occ).map_err(fail)?;
    let warnings = s.validate().map_err(fail)?;
    let co = overlap_coefficients(&s).map_err(fail)?;
    let sp = emission_spectrum(&co);
    Ok(json!({
        "k": sp.samples.iter().map(|x| x.k).collect::<Vec<_>>(),
        "dn_dk": sp.samples.iter().map(|x| x.n_k * x.dos).collect::<Vec<_>>(),
        "total": sp.total,
        "peak_k": sp.peak_k,
        "v_sub": s.v_sub,
        "v_super": s.v_super,
        "warnings": warnings,
    })
    .to_string())
}
