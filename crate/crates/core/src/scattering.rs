//! Phase shifts, threshold integers, transmission resonances and resonance time delay.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::continuation::{continue_down, snap_to_class, ANCHOR_EPS, K_FLOOR};
use crate::error::{Error, Result};
use crate::kinematics::cos_sinc;
use crate::params::{EnergySign, Parity, WellParams};
use crate::roots::bisect_polish;
use crate::spectrum::{appearance_depth, disappearance_depth};
use crate::wavefunction::left_incident;

/// Guard band around transition depths, in units of `m`.
pub const DEPTH_GUARD: f64 = 1e-9;

/// Phase shift modulo π at exterior wavevector `k` on the `sign` branch.
///
/// `tan(δ + 2ka) = (WE - m²) sin(2pa) / (kp cos(2pa))`, evaluated in `atan2` form.
pub fn raw_phase(k: f64, sign: EnergySign, params: &WellParams) -> f64 {
    let WellParams { m, a, v } = *params;
    let e = sign.value() * k.hypot(m);
    let w = e + v;
    let (c, s) = cos_sinc((w - m) * (w + m), 2.0 * a);
    ((w * e - m * m) * s).atan2(k * c) - 2.0 * k * a
}

fn anchor_k(m: f64) -> f64 {
    let e = ANCHOR_EPS * m;
    ((e - m) * (e + m)).sqrt()
}

fn check_energy(e: f64, m: f64) -> Result<f64> {
    if !(e.abs() > m) || !e.is_finite() {
        return Err(Error::InsideGap { energy: e, mass: m });
    }
    Ok(((e.abs() - m) * (e.abs() + m)).sqrt())
}

/// Unwrapped phase shifts at the wavevectors `ks` (any order) on one branch.
pub fn phase_shifts_at(ks: &[f64], sign: EnergySign, params: &WellParams) -> Vec<f64> {
    if params.v == 0.0 {
        return vec![0.0; ks.len()];
    }
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by(|&i, &j| ks[j].total_cmp(&ks[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| ks[i]).collect();
    let anchor = sign.value() * 2.0 * params.v * params.a;
    let vals = continue_down(|k| raw_phase(k, sign, params), anchor_k(params.m), anchor, &sorted);
    let mut out = vec![0.0; ks.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = vals[pos];
    }
    out
}

/// Continuously unwrapped phase shift at energy `e`, `|e| > m`.
pub fn phase_shift(e: f64, params: &WellParams) -> Result<f64> {
    params.validate()?;
    let k = check_energy(e, params.m)?;
    Ok(phase_shifts_at(&[k], EnergySign::of(e), params)[0])
}

/// Threshold value of the unwrapped phase: the continuation endpoint at `K_FLOOR`
/// snapped to `π/2 (mod π)`, and the snapping distance.
pub fn threshold_phase(sign: EnergySign, params: &WellParams) -> (f64, f64) {
    if params.v == 0.0 {
        return (0.0, 0.0);
    }
    let end = phase_shifts_at(&[K_FLOOR * params.m], sign, params)[0];
    snap_to_class(end, FRAC_PI_2)
}

/// Nearest transition depth (appearance at `+m` or disappearance at `-m`) to `v`.
pub fn nearest_transition(params: &WellParams) -> (f64, &'static str) {
    let WellParams { m, a, v } = *params;
    let mut best = (f64::INFINITY, "appearance");
    for parity in Parity::BOTH {
        for j in 0.. {
            let ap = appearance_depth(m, a, parity, j);
            let dis = disappearance_depth(m, a, parity, j);
            if (ap - v).abs() < (best.0 - v).abs() && !(parity == Parity::Even && j == 0) {
                best = (ap, "appearance");
            }
            if (dis - v).abs() < (best.0 - v).abs() {
                best = (dis, "disappearance");
            }
            if ap > v + 1.0 && dis > v + 1.0 {
                break;
            }
        }
    }
    best
}

fn guard(params: &WellParams) -> Result<()> {
    let (d, kind) = nearest_transition(params);
    if (d - params.v).abs() < DEPTH_GUARD * params.m {
        return Err(Error::AmbiguousDepth { depth: params.v, kind, transition: d });
    }
    Ok(())
}

/// `(n, n')`: levels that have emerged from `+m` (counting the weak-coupling even state)
/// and minus the number that have dived into `-m`.
pub fn threshold_integers(params: &WellParams) -> Result<(i64, i64)> {
    params.validate()?;
    if params.v == 0.0 {
        return Ok((0, 0));
    }
    guard(params)?;
    let (dp, _) = threshold_phase(EnergySign::Positive, params);
    let (dm, _) = threshold_phase(EnergySign::Negative, params);
    let n = ((dp - FRAC_PI_2) / PI).round() as i64 + 1;
    let n_prime = ((dm + FRAC_PI_2) / PI).round() as i64;
    Ok((n, n_prime))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub eps: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftCurve {
    pub params: WellParams,
    pub samples: Vec<PhaseSample>,
    pub threshold_plus: f64,
    pub threshold_minus: f64,
    pub threshold_residual: f64,
    pub n: Option<i64>,
    pub n_prime: Option<i64>,
    /// `δ±` evaluated at `ε = 10⁴ m`.
    pub asymptote_plus: f64,
    pub asymptote_minus: f64,
}

/// `points` energies log-spaced in `ε - m` from `1e-6 m` to `eps_max - m`,
/// densified near threshold.
pub fn phase_grid(m: f64, eps_max: f64, points: usize) -> Vec<f64> {
    let lo = (1e-6 * m).ln();
    let hi = (eps_max - m).max(2e-6 * m).ln();
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            // Square-root warp packs extra points at the low end.
            let t = t.powf(1.5);
            m + (lo + (hi - lo) * t).exp()
        })
        .collect()
}

pub fn phase_shift_curve(params: &WellParams, eps_max: f64, points: usize) -> Result<PhaseShiftCurve> {
    params.validate()?;
    let m = params.m;
    let eps = phase_grid(m, eps_max, points);
    let ks: Vec<f64> = eps.iter().map(|&e| ((e - m) * (e + m)).sqrt()).collect();
    let dp = phase_shifts_at(&ks, EnergySign::Positive, params);
    let dm = phase_shifts_at(&ks, EnergySign::Negative, params);
    let samples = eps
        .iter()
        .zip(dp.iter().zip(&dm))
        .map(|(&eps, (&delta_plus, &delta_minus))| PhaseSample { eps, delta_plus, delta_minus })
        .collect();
    let (tp, rp) = threshold_phase(EnergySign::Positive, params);
    let (tm, rm) = threshold_phase(EnergySign::Negative, params);
    let ints = threshold_integers(params).ok();
    let k_asym = (1e4 * m - m).sqrt() * (1e4 * m + m).sqrt();
    Ok(PhaseShiftCurve {
        params: *params,
        samples,
        threshold_plus: tp,
        threshold_minus: tm,
        threshold_residual: rp.max(rm),
        n: ints.map(|x| x.0),
        n_prime: ints.map(|x| x.1),
        asymptote_plus: phase_shifts_at(&[k_asym], EnergySign::Positive, params)[0],
        asymptote_minus: phase_shifts_at(&[k_asym], EnergySign::Negative, params)[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    #[serde(rename = "N")]
    pub n: u32,
    pub energy: f64,
    pub k: f64,
    /// `|B|` from the explicitly constructed scattering state; `None` exactly at threshold.
    pub reflection: Option<f64>,
}

/// Interior wavevector at energy `e`, real branch only.
fn interior_p(e: f64, params: &WellParams) -> Option<f64> {
    let w = e + params.v;
    let p2 = (w - params.m) * (w + params.m);
    (p2 >= 0.0).then(|| p2.sqrt())
}

/// Energies in `[e_lo, e_hi]` (outside the gap) where `2pa = Nπ`, found by bisection.
pub fn transmission_resonances(params: &WellParams, e_lo: f64, e_hi: f64) -> Result<Vec<Resonance>> {
    params.validate()?;
    let WellParams { m, a, v } = *params;
    let mut out = Vec::new();
    if v == 0.0 {
        return Ok(out);
    }
    for n in 1u32.. {
        let pn = n as f64 * PI / (2.0 * a);
        let wn = pn.hypot(m);
        if wn - v > e_hi && -wn - v < e_lo {
            break;
        }
        for sw in [1.0, -1.0] {
            let guess = sw * wn - v;
            if !(guess >= e_lo && guess <= e_hi) || guess.abs() < m {
                continue;
            }
            // Bisect 2pa - Nπ on the branch W = sw·|W|.
            let f = |e: f64| 2.0 * interior_p(e, params).unwrap_or(0.0) * a - n as f64 * PI;
            let half = 0.25 * pn.min(1.0);
            let (lo, hi) = if sw > 0.0 { (sw * m - v, guess + half) } else { (guess - half, -m - v) };
            let e = bisect_polish(f, lo, hi, 1e-14 * guess.abs().max(1.0)).unwrap_or(guess);
            let e = if (e.abs() - m).abs() < 1e-12 * m { e.signum() * m } else { e };
            let k = ((e.abs() - m) * (e.abs() + m)).max(0.0).sqrt();
            let reflection = if k > 0.0 {
                Some(left_incident(k, EnergySign::of(e), params)?.b.norm())
            } else {
                None
            };
            out.push(Resonance { n, energy: e, k, reflection });
        }
    }
    out.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    Ok(out)
}

/// Exact `dδ/dk` at a transmission resonance (`tan 2pa = 0`):
/// `a(γ + 1/γ) dp/dk - 2a = 2a W(WE - m²)/(p² E) - 2a`.
pub fn dphase_dk_at_resonance(e: f64, params: &WellParams) -> f64 {
    let WellParams { m, a, v } = *params;
    let w = e + v;
    let p2 = (w - m) * (w + m);
    2.0 * a * w * (w * e - m * m) / (p2 * e) - 2.0 * a
}

/// `dδ/dk` of the dived `N = 1` resonance in the limit where it sits at `E = -m`.
pub fn just_supercritical_dphase_dk(m: f64, a: f64) -> f64 {
    2.0 * a * m / ((PI / (2.0 * a)).hypot(m) - m)
}

/// Central finite difference of the unwrapped phase shift in `k`.
pub fn dphase_dk_numeric(k: f64, sign: EnergySign, params: &WellParams) -> f64 {
    let h = 1e-5 * k.max(1e-3);
    let v = phase_shifts_at(&[k + h, k - h], sign, params);
    (v[0] - v[1]) / (2.0 * h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeDelayReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub energy: f64,
    pub k: f64,
    /// Group velocity `k/|E|`.
    pub v0: f64,
    pub dphase_dk_exact: f64,
    pub dphase_dk_closed_form: Option<f64>,
    pub delay: f64,
}

/// Time delay at the `N`-th resonance that has dived below `-m` (`E = sqrt(p_N² + m²) - V`).
pub fn time_delay(params: &WellParams, n: u32) -> Result<TimeDelayReport> {
    params.validate()?;
    let WellParams { m, a, v } = *params;
    if n == 0 {
        return Err(Error::InvalidParams("resonance index starts at 1".into()));
    }
    let pn = n as f64 * PI / (2.0 * a);
    let onset = pn.hypot(m) + m;
    let e = pn.hypot(m) - v;
    if !(e < -m) {
        return Err(Error::NoResonance { n, depth: v, nearest_depth: onset });
    }
    let k = ((e.abs() - m) * (e.abs() + m)).sqrt();
    let v0 = k / e.abs();
    let exact = dphase_dk_at_resonance(e, params);
    let closed = (n == 1).then(|| just_supercritical_dphase_dk(m, a));
    Ok(TimeDelayReport { n, energy: e, k, v0, dphase_dk_exact: exact, dphase_dk_closed_form: closed, delay: exact / v0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{bound_states, count_by_parity};

    fn wp(v: f64) -> WellParams {
        WellParams::new(1.0, 0.7, v).unwrap()
    }

    #[test]
    fn free_phase_is_zero() {
        for e in [1.5, -3.0, 200.0] {
            assert_eq!(phase_shift(e, &wp(0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn raw_phase_vanishes_without_well() {
        for k in [0.01, 1.0, 40.0] {
            let r = raw_phase(k, EnergySign::Positive, &wp(0.0));
            assert!((r - PI * (r / PI).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn high_energy_limit() {
        let d = phase_shift(1e4, &wp(1.0)).unwrap();
        assert!((d - 1.4).abs() < 1e-3);
        let d = phase_shift(-1e4, &wp(1.0)).unwrap();
        assert!((d + 1.4).abs() < 1e-3);
    }

    #[test]
    fn rejects_gap_energy() {
        assert!(phase_shift(0.5, &wp(1.0)).is_err());
        assert!(phase_shift(1.0, &wp(1.0)).is_err());
    }

    #[test]
    fn threshold_is_half_odd_multiple() {
        let (_, r) = threshold_phase(EnergySign::Positive, &wp(1.0));
        assert!(r < 1e-8);
        let (_, r) = threshold_phase(EnergySign::Negative, &wp(1.0));
        assert!(r < 1e-8);
    }

    #[test]
    fn transmission_phase_matches_raw() {
        for (k, sign) in [(0.4, EnergySign::Positive), (1.3, EnergySign::Negative), (0.2, EnergySign::Negative)] {
            let p = wp(2.2);
            let f = left_incident(k, sign, &p).unwrap().f;
            let d = f.arg() - raw_phase(k, sign, &p);
            assert!((d - PI * (d / PI).round()).abs() < 1e-10, "{k}");
        }
    }

    #[test]
    fn threshold_integers_track_levels() {
        assert_eq!(threshold_integers(&wp(0.5)).unwrap(), (1, 0));
        assert_eq!(threshold_integers(&wp(2.0)).unwrap(), (2, 0));
        let vc = wp(0.0).v_first_critical();
        assert_eq!(threshold_integers(&wp(vc + 1e-3)).unwrap(), (2, -1));
    }

    #[test]
    fn exact_transition_is_ambiguous() {
        let vc = wp(0.0).v_first_critical();
        assert!(matches!(threshold_integers(&wp(vc)), Err(Error::AmbiguousDepth { .. })));
    }

    #[test]
    fn rewritten_levinson_relation() {
        for v in [0.3, 1.0, 2.5, 3.5, 4.4, 5.0] {
            let p = wp(v);
            let (dp, _) = threshold_phase(EnergySign::Positive, &p);
            let (dm, _) = threshold_phase(EnergySign::Negative, &p);
            let total = bound_states(&p).len() as f64;
            assert!(((dp + dm) / PI + 1.0 - total).abs() < 1e-6, "V={v}");
        }
    }

    #[test]
    fn resonance_at_critical_depth_sits_on_threshold() {
        let vc = wp(0.0).v_first_critical();
        let r = transmission_resonances(&wp(vc), -1.5, -1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].energy + 1.0).abs() < 1e-9 && r[0].n == 1);
    }

    #[test]
    fn resonances_are_reflectionless() {
        let r = transmission_resonances(&wp(3.5), -3.0, -1.0).unwrap();
        assert_eq!(r.len(), 1);
        let closed = (PI / 1.4).hypot(1.0) - 3.5;
        assert!((r[0].energy - closed).abs() < 1e-12);
        assert!(r[0].reflection.unwrap() < 1e-10);
        assert!(transmission_resonances(&wp(0.0), -10.0, 10.0).unwrap().is_empty());
        for r in transmission_resonances(&wp(2.0), -20.0, 20.0).unwrap() {
            assert!(r.reflection.unwrap() < 1e-10);
        }
    }

    #[test]
    fn closed_form_delay() {
        assert!((just_supercritical_dphase_dk(1.0, 0.7) - 0.96106).abs() < 1e-5);
    }

    #[test]
    fn exact_derivative_matches_finite_difference() {
        let vc = wp(0.0).v_first_critical();
        for v in [1.001 * vc, 3.8, 4.5] {
            let t = time_delay(&wp(v), 1).unwrap();
            let fd = dphase_dk_numeric(t.k, EnergySign::Negative, &wp(v));
            assert!(((t.dphase_dk_exact - fd) / fd).abs() < 1e-4, "V={v}: {} vs {fd}", t.dphase_dk_exact);
        }
    }

    #[test]
    fn just_supercritical_agrees_with_exact() {
        let vc = wp(0.0).v_first_critical();
        let t = time_delay(&wp(1.001 * vc), 1).unwrap();
        let c = t.dphase_dk_closed_form.unwrap();
        assert!(((c - t.dphase_dk_exact) / t.dphase_dk_exact).abs() < 0.05);
        assert!(t.delay > 0.0);
    }

    #[test]
    fn missing_resonance_names_onset() {
        match time_delay(&wp(2.0), 1) {
            Err(Error::NoResonance { nearest_depth, .. }) => {
                assert!((nearest_depth - wp(0.0).v_first_critical()).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn resonance_is_not_a_phase_resonance() {
        // δ stays within a band narrower than π around the N = 1 resonance.
        let p = wp(4.0);
        let t = time_delay(&p, 1).unwrap();
        let ks: Vec<f64> = (0..41).map(|i| t.k * (0.5 + i as f64 / 40.0)).collect();
        let d = phase_shifts_at(&ks, EnergySign::Negative, &p);
        let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        assert!(hi - lo < FRAC_PI_2);
    }

    #[test]
    fn curve_is_continuous() {
        let c = phase_shift_curve(&wp(2.0), 50.0, 400).unwrap();
        for w in c.samples.windows(2) {
            assert!((w[0].delta_plus - w[1].delta_plus).abs() < FRAC_PI_2);
            assert!((w[0].delta_minus - w[1].delta_minus).abs() < FRAC_PI_2);
        }
        assert_eq!(c.n, Some(2));
        let _ = count_by_parity(&bound_states(&wp(2.0)));
    }
}
