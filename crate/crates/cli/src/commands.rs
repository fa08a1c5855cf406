//! One function per subcommand, each returning a table and a JSON result.

use std::f64::consts::PI;

use diracwell::acceptance::{levinson_draws, run_one};
use diracwell::delta::{delta_phase_shift, delta_spectrum, delta_vacuum_charge, delta_vacuum_charge_general};
use diracwell::emission::{
    bound_counts, charge_ledger, emission_spectrum, escape_time_guard, overlap_coefficients, TransitionScenario,
};
use diracwell::levinson::{vacuum_charge, ZeroModeConvention};
use diracwell::scattering::{phase_shift, phase_shift_curve, time_delay, transmission_resonances};
use diracwell::spectrum::{bound_states, critical_potentials};
use diracwell::{Parity, Result, WellParams};
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{Report, Table};

fn params(cfg: &RunConfig) -> Result<WellParams> {
    WellParams::new(cfg.m, cfg.a, cfg.v)
}

fn sweep(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.points;
    (0..n).map(|i| cfg.v_min + (cfg.v_max - cfg.v_min) * i as f64 / (n - 1) as f64).collect()
}

fn parity_code(p: Parity) -> f64 {
    p.sign()
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report> {
    let p = params(cfg)?;
    let here = bound_states(&p);
    let per_depth: Vec<_> = sweep(cfg).into_par_iter().map(|v| (v, bound_states(&p.with_depth(v)))).collect();
    let mut t = Table::new(&["V", "parity", "index", "E"]);
    for (v, states) in &per_depth {
        for s in states {
            t.rows.push(vec![*v, parity_code(s.parity), s.index as f64, s.energy]);
        }
    }
    t.note("bound_states_at_V", here.len());
    let curves: Vec<_> = per_depth.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    Ok(Report { json: json!({ "bound_states": here, "curves": curves }), table: t, failed: false })
}

pub fn critical(cfg: &RunConfig) -> Result<Report> {
    let r = critical_potentials(cfg.m, cfg.a, cfg.v_max)?;
    let mut t = Table::new(&["parity", "index", "appearance", "zero_crossing", "disappearance"]);
    for l in &r.levels {
        t.rows.push(vec![parity_code(l.parity), l.index as f64, l.appearance, l.zero_crossing, l.disappearance]);
    }
    t.note("V_1c", r.v_1c);
    t.note("V_odd1", r.v_odd1);
    t.note("V_even2", r.v_even2);
    t.note("V_2c", r.v_2c);
    Ok(Report { json: serde_json::to_value(&r).expect("serializes"), table: t, failed: false })
}

pub fn phase(cfg: &RunConfig) -> Result<Report> {
    let c = phase_shift_curve(&params(cfg)?, cfg.eps_max, cfg.points)?;
    let mut t = Table::new(&["eps", "delta_plus", "delta_minus"]);
    t.rows = c.samples.iter().map(|s| vec![s.eps, s.delta_plus, s.delta_minus]).collect();
    t.note("threshold_plus", c.threshold_plus);
    t.note("threshold_minus", c.threshold_minus);
    if let Some(n) = c.n {
        t.note("n", n);
    }
    if let Some(n) = c.n_prime {
        t.note("n_prime", n);
    }
    Ok(Report { json: serde_json::to_value(&c).expect("serializes"), table: t, failed: false })
}

pub fn resonances(cfg: &RunConfig) -> Result<Report> {
    let r = transmission_resonances(&params(cfg)?, cfg.e_lo, cfg.e_hi)?;
    let mut t = Table::new(&["N", "E", "k", "reflection"]);
    t.rows = r.iter().map(|x| vec![x.n as f64, x.energy, x.k, x.reflection.unwrap_or(f64::NAN)]).collect();
    Ok(Report { json: serde_json::to_value(&r).expect("serializes"), table: t, failed: false })
}

pub fn delay(cfg: &RunConfig) -> Result<Report> {
    let d = time_delay(&params(cfg)?, cfg.n)?;
    let mut t = Table::new(&["N", "E", "k", "v0", "dphase_dk", "delay"]);
    t.rows.push(vec![d.n as f64, d.energy, d.k, d.v0, d.dphase_dk_exact, d.delay]);
    if let Some(c) = d.dphase_dk_closed_form {
        t.note("dphase_dk_closed_form", c);
    }
    Ok(Report { json: serde_json::to_value(&d).expect("serializes"), table: t, failed: false })
}

pub fn levinson(cfg: &RunConfig) -> Result<Report> {
    let reports = levinson_draws(cfg.draws, cfg.seed)?;
    let mut t = Table::new(&["a", "V", "n_even", "n_odd", "spectrum_even", "spectrum_odd", "residual"]);
    let mut failed = false;
    for r in &reports {
        let res = r.residual_even.max(r.residual_odd);
        failed |= !r.matches() || res >= cfg.tol;
        t.rows.push(vec![
            r.a,
            r.v,
            r.n_bound_even as f64,
            r.n_bound_odd as f64,
            r.spectrum_even as f64,
            r.spectrum_odd as f64,
            res,
        ]);
    }
    let mismatches = reports.iter().filter(|r| !r.matches()).count();
    t.note("mismatches", mismatches);
    Ok(Report { json: json!({ "draws": reports, "mismatches": mismatches }), table: t, failed })
}

pub fn charge(cfg: &RunConfig) -> Result<Report> {
    let p = params(cfg)?;
    let rows: Vec<_> = sweep(cfg)
        .into_par_iter()
        .filter_map(|v| vacuum_charge(&p.with_depth(v), ZeroModeConvention::Electron).ok())
        .collect();
    let mut t = Table::new(&["V", "Q0", "N_plus", "N_minus", "Q0_minus_2Va_over_pi"]);
    t.rows = rows.iter().map(|r| vec![r.v, r.q0, r.n_plus as f64, r.n_minus as f64, r.asymmetry_part]).collect();
    Ok(Report { json: serde_json::to_value(&rows).expect("serializes"), table: t, failed: false })
}

pub fn delta(cfg: &RunConfig) -> Result<Report> {
    let big_v = 1e4;
    let grid: Vec<f64> = (0..50)
        .flat_map(|i| {
            let e = cfg.m * (1.0 + (1e-3f64.ln() + (20f64.ln() - 1e-3f64.ln()) * i as f64 / 49.0).exp());
            [e, -e]
        })
        .collect();
    let mut t = Table::new(&[
        "lambda",
        "E",
        "parity",
        "Q0",
        "Q0_general",
        "E_square_well",
        "level_dev",
        "max_phase_dev",
    ]);
    let mut out = Vec::new();
    for &lambda in &cfg.lambdas {
        let level = delta_spectrum(cfg.m, lambda)?;
        let q = delta_vacuum_charge(cfg.m, lambda, ZeroModeConvention::Electron)?;
        let qg = delta_vacuum_charge_general(cfg.m, lambda)?;
        let (sw_e, dev, pdev) = if lambda > 0.0 {
            let p = WellParams::new(cfg.m, lambda / (2.0 * big_v), big_v)?;
            let sw = bound_states(&p).first().map(|s| s.energy);
            let mut worst: f64 = 0.0;
            for &e in &grid {
                worst = worst.max((phase_shift(e, &p)? - delta_phase_shift(e, cfg.m, lambda)?).abs());
            }
            let dev = match (sw, level) {
                (Some(a), Some(b)) => (a - b.energy).abs(),
                _ => f64::NAN,
            };
            (sw.unwrap_or(f64::NAN), dev, worst)
        } else {
            (f64::NAN, f64::NAN, 0.0)
        };
        t.rows.push(vec![
            lambda,
            level.map_or(f64::NAN, |l| l.energy),
            level.map_or(0.0, |l| parity_code(l.parity)),
            q,
            qg,
            sw_e,
            dev,
            pdev,
        ]);
        out.push(json!({
            "lambda": lambda, "level": level, "Q0": q, "Q0_general": qg,
            "square_well_level": sw_e, "level_dev": dev, "max_phase_dev": pdev,
        }));
    }
    Ok(Report { json: json!(out), table: t, failed: false })
}

pub fn emit(cfg: &RunConfig) -> Result<Report> {
    let s = TransitionScenario::symmetric(cfg.m, cfg.a, cfg.band, cfg.half_length, cfg.eps_max, cfg.occupation)?;
    let warnings = s.validate()?;
    let co = overlap_coefficients(&s)?;
    let sp = emission_spectrum(&co);
    let ledger = charge_ledger(&co, &sp)?;
    let guard = escape_time_guard(&s)?;
    let mut t = Table::new(&["k", "E", "N_k", "dos", "dN_dk"]);
    t.rows = sp.samples.iter().map(|x| vec![x.k, x.energy, x.n_k, x.dos, x.n_k * x.dos]).collect();
    t.note("total", sp.total);
    if let Some(k) = sp.peak_k {
        t.note("peak_k", k);
    }
    t.note("mixing_bound", co.mixing_bound());
    t.note("odd_mixing_bound", co.odd_mixing_bound());
    t.note("escape_time", guard);
    for st in &ledger.stages {
        t.note(&format!("charge[{}]", st.label), st.total);
    }
    for w in &warnings {
        t.note("warning", w);
    }
    let (nb_sub, nb_super) = bound_counts(&s);
    let json = json!({
        "scenario": s,
        "warnings": warnings,
        "spectrum": sp,
        "ledger": ledger,
        "mixing_bound": co.mixing_bound(),
        "odd_mixing_bound": co.odd_mixing_bound(),
        "max_row_defect_low_k": co.even.max_row_defect(0.5 * s.k_max()),
        "quadrature_discrepancy": co.quadrature_discrepancy,
        "escape_time": guard,
        "bound_states": [nb_sub, nb_super],
        "smooth_charge_shift": 2.0 * (s.v_super - s.v_sub) * s.a / PI,
    });
    Ok(Report { json, table: t, failed: false })
}

pub fn verify(cfg: &RunConfig) -> Result<Report> {
    let results: Vec<_> = cfg.criteria.iter().filter_map(|&id| run_one(id, cfg.seed)).collect();
    let mut t = Table::new(&["criterion", "passed", "seconds"]);
    for r in &results {
        eprintln!("{}", r.line());
        t.rows.push(vec![r.id as f64, if r.passed { 1.0 } else { 0.0 }, r.seconds]);
    }
    let failed = results.iter().any(|r| !r.passed);
    Ok(Report { json: serde_json::to_value(&results).expect("serializes"), table: t, failed })
}
