//! Bound states of the square well and the depths at which levels appear, cross zero and dive.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::cos_sinc;
use crate::params::{Parity, WellParams};
use crate::roots::{bisect, bisect_polish};

/// Energies within this distance of `±m` are flagged as threshold states.
pub const THRESHOLD_BAND: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub energy: f64,
    pub parity: Parity,
    pub index: usize,
    #[serde(rename = "V")]
    pub v: f64,
    pub threshold: bool,
}

/// Matching function for `parity`, continuous across the tangent poles.
///
/// Even: `sqrt(m+E)(W-m) sin(pa)/p - sqrt(m-E) cos(pa)`.
/// Odd:  `sqrt(m-E)(W+m) sin(pa)/p + sqrt(m+E) cos(pa)`.
pub fn matching(e: f64, parity: Parity, params: &WellParams) -> f64 {
    matching_parts(e, parity, params).0
}

/// Matching value and the magnitude scale used to make residuals relative.
pub fn matching_parts(e: f64, parity: Parity, params: &WellParams) -> (f64, f64) {
    let WellParams { m, a, v } = *params;
    let w = e + v;
    let (c, s) = cos_sinc((w - m) * (w + m), a);
    let sp = (m + e).max(0.0).sqrt();
    let sm = (m - e).max(0.0).sqrt();
    match parity {
        Parity::Even => {
            let (x, y) = (sp * (w - m) * s, sm * c);
            (x - y, x.abs() + y.abs())
        }
        Parity::Odd => {
            let (x, y) = (sm * (w + m) * s, sp * c);
            (x + y, x.abs() + y.abs())
        }
    }
}

/// Relative matching residual.
pub fn matching_residual(e: f64, parity: Parity, params: &WellParams) -> f64 {
    let (g, scale) = matching_parts(e, parity, params);
    g.abs() / scale.max(f64::MIN_POSITIVE)
}

/// Energy at which `pa = theta` for the given well (interior kinetic energy on the `W > m` branch).
fn energy_at_phase(theta: f64, params: &WellParams) -> f64 {
    (theta / params.a).hypot(params.m) - params.v
}

/// All bound states, sorted by energy descending.
pub fn bound_states(params: &WellParams) -> Vec<BoundState> {
    let WellParams { m, a, v } = *params;
    let mut out = Vec::new();
    if v == 0.0 {
        return out;
    }
    let e_min = (-m).max(m - v);
    let e_max = m;
    // Quarter branches pa in (q·π/2, (q+1)·π/2); even roots live in even quarters.
    let w_max = e_max + v;
    let pa_max = ((w_max - m) * (w_max + m)).max(0.0).sqrt() * a;
    let q_max = (pa_max / FRAC_PI_2).floor() as usize + 1;
    for q in 0..q_max {
        let parity = if q % 2 == 0 { Parity::Even } else { Parity::Odd };
        let lo = energy_at_phase(q as f64 * FRAC_PI_2, params).max(e_min);
        let hi = energy_at_phase((q + 1) as f64 * FRAC_PI_2, params).min(e_max);
        if !(hi > lo) {
            continue;
        }
        let f = |e: f64| matching(e, parity, params);
        let (flo, fhi) = (f(lo), f(hi));
        if flo.signum() == fhi.signum() || flo == 0.0 || fhi == 0.0 {
            continue;
        }
        let Ok(e) = bisect_polish(f, lo, hi, ROOT_TOL) else { continue };
        out.push(BoundState {
            energy: e,
            parity,
            index: q / 2,
            v,
            threshold: (m - e.abs()) < THRESHOLD_BAND * m,
        });
    }
    out.sort_by(|x, y| y.energy.total_cmp(&x.energy));
    out
}

pub fn count_by_parity(states: &[BoundState]) -> (usize, usize) {
    let even = states.iter().filter(|s| s.parity == Parity::Even).count();
    (even, states.len() - even)
}

fn level_phase(parity: Parity, index: usize) -> (f64, f64) {
    let j = index as f64;
    match parity {
        Parity::Even => (j * PI, j * PI + FRAC_PI_2),
        Parity::Odd => (j * PI + FRAC_PI_2, (j + 1.0) * PI),
    }
}

/// Depth at which level `(parity, index)` emerges from `+m`.
pub fn appearance_depth(m: f64, a: f64, parity: Parity, index: usize) -> f64 {
    let theta = level_phase(parity, index).0;
    (theta / a).hypot(m) - m
}

/// Depth at which level `(parity, index)` reaches `-m`.
pub fn disappearance_depth(m: f64, a: f64, parity: Parity, index: usize) -> f64 {
    let theta = level_phase(parity, index).1;
    (theta / a).hypot(m) + m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelTransitions {
    pub parity: Parity,
    pub index: usize,
    pub appearance: f64,
    pub zero_crossing: f64,
    pub disappearance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub m: f64,
    pub a: f64,
    #[serde(rename = "V_1c")]
    pub v_1c: f64,
    #[serde(rename = "V_odd1")]
    pub v_odd1: f64,
    #[serde(rename = "V_even2")]
    pub v_even2: f64,
    #[serde(rename = "V_2c")]
    pub v_2c: f64,
    /// `V_odd1 < V_1c < V_even2` holds for these parameters.
    pub odd_appears_before_dive: bool,
    pub levels: Vec<LevelTransitions>,
}

/// Closed-form transition depths plus numerically located zero crossings.
///
/// Levels are listed while their disappearance depth stays below `v_limit`.
pub fn critical_potentials(m: f64, a: f64, v_limit: f64) -> Result<CriticalityReport> {
    WellParams::new(m, a, 0.0)?;
    let v_1c = disappearance_depth(m, a, Parity::Even, 0);
    let v_odd1 = appearance_depth(m, a, Parity::Odd, 0);
    let v_even2 = appearance_depth(m, a, Parity::Even, 1);
    let v_2c = disappearance_depth(m, a, Parity::Odd, 0);
    let mut levels = Vec::new();
    for index in 0.. {
        let mut any = false;
        for parity in Parity::BOTH {
            let appearance = appearance_depth(m, a, parity, index);
            let disappearance = disappearance_depth(m, a, parity, index);
            if disappearance > v_limit.max(v_2c) {
                continue;
            }
            any = true;
            let zero_crossing = zero_crossing_depth(m, a, parity, index)?;
            levels.push(LevelTransitions { parity, index, appearance, zero_crossing, disappearance });
        }
        if !any {
            break;
        }
    }
    Ok(CriticalityReport {
        m,
        a,
        v_1c,
        v_odd1,
        v_even2,
        v_2c,
        odd_appears_before_dive: v_odd1 < v_1c && v_1c < v_even2,
        levels,
    })
}

/// Energy of level `(parity, index)` at depth `v`, if it exists.
pub fn level_energy(params: &WellParams, parity: Parity, index: usize) -> Option<f64> {
    bound_states(params)
        .into_iter()
        .find(|s| s.parity == parity && s.index == index)
        .map(|s| s.energy)
}

/// Depth at which level `(parity, index)` crosses `E = 0`, by bisection on its energy.
pub fn zero_crossing_depth(m: f64, a: f64, parity: Parity, index: usize) -> Result<f64> {
    let lo = appearance_depth(m, a, parity, index);
    let hi = disappearance_depth(m, a, parity, index);
    let span = hi - lo;
    let base = WellParams::new(m, a, lo)?;
    let f = |v: f64| match level_energy(&base.with_depth(v), parity, index) {
        Some(e) => e,
        None if v < 0.5 * (lo + hi) => m,
        None => -m,
    };
    bisect(f, lo + 1e-9 * span, hi - 1e-9 * span, 1e-13 * hi.max(1.0))
}

/// Depth where level `(parity, index)` first exists (`appear = true`) or stops existing,
/// located by bisecting on the spectrum solver's root count alone.
pub fn transition_depth_numeric(m: f64, a: f64, parity: Parity, index: usize, appear: bool) -> Result<f64> {
    let base = WellParams::new(m, a, 0.0)?;
    let exists = |v: f64| level_energy(&base.with_depth(v), parity, index).is_some();
    // Expand from a crude bracket in `pa` until the existence flag flips.
    let (t0, t1) = level_phase(parity, index);
    let mut lo = if appear { ((t0 - 0.25).max(0.0) / a).hypot(m) - m } else { ((t1 - 0.25) / a).hypot(m) + m };
    let mut hi = if appear { ((t0 + 0.25) / a).hypot(m) - m } else { ((t1 + 0.25) / a).hypot(m) + m };
    lo = lo.max(1e-300);
    let want_lo = !appear;
    if exists(lo) != want_lo || exists(hi) == want_lo {
        return Err(Error::NoBracket(format!("{parity:?} level {index} transition not in [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if exists(mid) == want_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Continuous `E(V)` for one level along an increasing grid.
pub fn level_curve(base: &WellParams, parity: Parity, index: usize, v_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v_grid.len());
    for &v in v_grid {
        let p = base.with_depth(v);
        p.validate()?;
        let e = level_energy(&p, parity, index).ok_or(Error::LevelLost { parity, index, depth: v })?;
        if let Some(&(pv, pe)) = out.last() {
            if v < pv {
                return Err(Error::InvalidParams("depth grid must be increasing".into()));
            }
            if e > pe + 1e-12 * base.m {
                return Err(Error::NonMonotoneLevel { parity, index, depth: v });
            }
        }
        out.push((v, e));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wp(v: f64) -> WellParams {
        WellParams::new(1.0, 0.7, v).unwrap()
    }

    #[test]
    fn weak_well_has_one_even_state() {
        let s = bound_states(&wp(1e-3));
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].parity, Parity::Even);
        assert!(s[0].energy < 1.0 && s[0].energy > 0.999);
    }

    #[test]
    fn weak_binding_matches_nonrelativistic_delta() {
        // Nonrelativistic delta well of strength 2aV: binding m(2aV)^2/2.
        let v = 1e-4;
        let e = bound_states(&wp(v))[0].energy;
        let nr = 0.5 * (2.0 * 0.7 * v) * (2.0 * 0.7 * v);
        assert!(((1.0 - e) - nr).abs() / nr < 1e-2);
    }

    #[test]
    fn near_critical_even_state_is_near_minus_m() {
        let vc = wp(0.0).v_first_critical();
        let s = bound_states(&wp(vc - 1e-6));
        let e = s.iter().find(|s| s.parity == Parity::Even && s.index == 0).unwrap().energy;
        assert!(e > -1.0 && e < -1.0 + 1e-3);
        assert!(level_energy(&wp(vc + 1e-6), Parity::Even, 0).is_none());
    }

    #[test]
    fn closed_form_depths() {
        let r = critical_potentials(1.0, 0.7, 6.0).unwrap();
        assert!((r.v_1c - 3.45673).abs() < 5e-5);
        assert!((r.v_odd1 - 1.45673).abs() < 5e-5);
        assert!((r.v_even2 - 3.59806).abs() < 5e-5);
        assert!((r.v_2c - 5.59806).abs() < 5e-5);
        assert!(r.odd_appears_before_dive);
    }

    #[test]
    fn first_zero_crossing_solves_tangent_condition() {
        let v0 = zero_crossing_depth(1.0, 0.7, Parity::Even, 0).unwrap();
        let lhs = (0.7 * (v0 * v0 - 1.0).sqrt()).tan();
        let rhs = ((v0 + 1.0) / (v0 - 1.0)).sqrt();
        assert!((lhs - rhs).abs() < 1e-9, "{v0}: {lhs} vs {rhs}");
    }

    #[test]
    fn odd_state_has_node_at_origin_branch() {
        let s = bound_states(&wp(1.5));
        let odd: Vec<_> = s.iter().filter(|s| s.parity == Parity::Odd).collect();
        assert_eq!(odd.len(), 1);
        assert!(odd[0].energy > 0.99);
    }

    #[test]
    fn level_curve_descends_through_zero() {
        let vc = wp(0.0).v_first_critical();
        let grid: Vec<f64> = (0..60).map(|i| 0.1 + (vc - 1e-4 - 0.1) * i as f64 / 59.0).collect();
        let c = level_curve(&wp(0.0), Parity::Even, 0, &grid).unwrap();
        assert!(c[0].1 > 0.9 && c.last().unwrap().1 < -0.99);
    }

    #[test]
    fn level_curve_before_appearance_is_lost() {
        let e = level_curve(&wp(0.0), Parity::Odd, 0, &[1.0, 1.2]).unwrap_err();
        assert!(matches!(e, Error::LevelLost { depth, .. } if depth == 1.0));
    }

    #[test]
    fn single_point_curve_matches_spectrum() {
        let c = level_curve(&wp(0.0), Parity::Even, 0, &[2.0]).unwrap();
        assert_eq!(c[0].1, level_energy(&wp(2.0), Parity::Even, 0).unwrap());
    }

    #[test]
    fn numeric_transitions_match_closed_forms() {
        for parity in Parity::BOTH {
            for index in 0..2 {
                let d = transition_depth_numeric(1.0, 0.7, parity, index, false).unwrap();
                assert!((d - disappearance_depth(1.0, 0.7, parity, index)).abs() < 1e-8);
                if parity == Parity::Even && index == 0 {
                    continue;
                }
                let ap = transition_depth_numeric(1.0, 0.7, parity, index, true).unwrap();
                assert!((ap - appearance_depth(1.0, 0.7, parity, index)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn resonance_coincides_with_criticality() {
        // At V_1c the interior wavevector at E = -m satisfies 2pa = π.
        let vc = wp(0.0).v_first_critical();
        let w = -1.0 + vc;
        let p = ((w - 1.0) * (w + 1.0)).sqrt();
        assert!((2.0 * p * 0.7 - PI).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn roots_are_clean(v in 0.01f64..8.0, a in 0.3f64..1.5) {
            let p = WellParams::new(1.0, a, v).unwrap();
            let s = bound_states(&p);
            for st in &s {
                prop_assert!(matching_residual(st.energy, st.parity, &p) < 1e-10);
                prop_assert!(st.energy > -1.0 && st.energy < 1.0);
                if v < 2.0 {
                    prop_assert!(st.energy > 1.0 - v);
                }
            }
            for w in s.windows(2) {
                prop_assert!(w[0].energy - w[1].energy > 1e-8);
            }
        }

        #[test]
        fn appearance_adds_one_state(j in 0usize..3, odd in proptest::bool::ANY, a in 0.4f64..1.2) {
            let parity = if odd { Parity::Odd } else { Parity::Even };
            prop_assume!(!(parity == Parity::Even && j == 0));
            let vd = appearance_depth(1.0, a, parity, j);
            let before = count_by_parity(&bound_states(&WellParams::new(1.0, a, vd - 1e-6).unwrap()));
            let after = bound_states(&WellParams::new(1.0, a, vd + 1e-6).unwrap());
            let c = count_by_parity(&after);
            let (db, da) = if odd { (before.1, c.1) } else { (before.0, c.0) };
            prop_assert_eq!(da, db + 1);
            let e = after.iter().find(|s| s.parity == parity && s.index == j).unwrap().energy;
            prop_assert!(1.0 - e < 1e-4);
        }
    }
}
