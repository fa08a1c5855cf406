//! Parity-resolved phases, Levinson's theorem, vacuum charge and box state counting.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::boxmodes::box_modes;
use crate::continuation::{continue_down, snap_to_class, ANCHOR_EPS, K_FLOOR};
use crate::error::{Error, Result};
use crate::kinematics::propagate;
use crate::params::{EnergySign, Parity, WellParams};
use crate::scattering::{nearest_transition, threshold_phase, DEPTH_GUARD};
use crate::spectrum::{bound_states, count_by_parity, zero_crossing_depth, BoundState};

/// Parity phase modulo π at exterior wavevector `k`.
///
/// Even states have `u ∝ cos(kx + Δ_e)` outside the well, odd states `w ∝ cos(kx + Δ_o)`.
pub fn raw_parity_phase(k: f64, sign: EnergySign, parity: Parity, params: &WellParams) -> f64 {
    let WellParams { m, a, v } = *params;
    let e = sign.value() * k.hypot(m);
    let [ua, wa] = propagate(parity.start(), e + v, m, a);
    // Both atan2 arguments rescaled by a positive factor to stay finite at threshold.
    let theta = match (sign, parity) {
        (EnergySign::Positive, Parity::Even) => ((e + m) * wa).atan2(k * ua),
        (EnergySign::Positive, Parity::Odd) => (-k * ua).atan2((e + m) * wa),
        (EnergySign::Negative, Parity::Even) => (k * wa).atan2((e - m) * ua),
        (EnergySign::Negative, Parity::Odd) => (-(e - m) * ua).atan2(k * wa),
    };
    theta - k * a
}

/// Threshold class (mod π) of each parity phase for `V > 0`.
pub fn threshold_class(sign: EnergySign, parity: Parity) -> f64 {
    match (sign, parity) {
        (EnergySign::Positive, Parity::Even) | (EnergySign::Negative, Parity::Odd) => FRAC_PI_2,
        _ => 0.0,
    }
}

/// Unwrapped parity phases at wavevectors `ks`, anchored at `±Va` at high energy.
pub fn parity_phases_at(ks: &[f64], sign: EnergySign, parity: Parity, params: &WellParams) -> Vec<f64> {
    if params.v == 0.0 {
        return vec![0.0; ks.len()];
    }
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by(|&i, &j| ks[j].total_cmp(&ks[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| ks[i]).collect();
    let m = params.m;
    let ka = (ANCHOR_EPS * m - m).sqrt() * (ANCHOR_EPS * m + m).sqrt();
    let anchor = sign.value() * params.v * params.a;
    let vals = continue_down(|k| raw_parity_phase(k, sign, parity, params), ka, anchor, &sorted);
    let mut out = vec![0.0; ks.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = vals[pos];
    }
    out
}

/// Threshold value of a parity phase (snapped) and the snapping distance.
pub fn parity_threshold(sign: EnergySign, parity: Parity, params: &WellParams) -> (f64, f64) {
    if params.v == 0.0 {
        return (0.0, 0.0);
    }
    let end = parity_phases_at(&[K_FLOOR * params.m], sign, parity, params)[0];
    snap_to_class(end, threshold_class(sign, parity))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityPhases {
    pub eps: f64,
    pub even_plus: f64,
    pub odd_plus: f64,
    pub even_minus: f64,
    pub odd_minus: f64,
}

/// `Δ_e±(ε)` and `Δ_o±(ε)` at `ε >= m` (the threshold values at `ε = m`).
pub fn parity_phases(eps: f64, params: &WellParams) -> Result<ParityPhases> {
    params.validate()?;
    let m = params.m;
    if !(eps >= m) {
        return Err(Error::InsideGap { energy: eps, mass: m });
    }
    let at = |sign, parity| {
        if eps == m {
            parity_threshold(sign, parity, params).0
        } else {
            let k = ((eps - m) * (eps + m)).sqrt();
            parity_phases_at(&[k], sign, parity, params)[0]
        }
    };
    Ok(ParityPhases {
        eps,
        even_plus: at(EnergySign::Positive, Parity::Even),
        odd_plus: at(EnergySign::Positive, Parity::Odd),
        even_minus: at(EnergySign::Negative, Parity::Even),
        odd_minus: at(EnergySign::Negative, Parity::Odd),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevinsonReport {
    #[serde(rename = "V")]
    pub v: f64,
    pub a: f64,
    pub n_bound_even: i64,
    pub n_bound_odd: i64,
    pub residual_even: f64,
    pub residual_odd: f64,
    pub spectrum_even: usize,
    pub spectrum_odd: usize,
}

impl LevinsonReport {
    pub fn matches(&self) -> bool {
        self.n_bound_even == self.spectrum_even as i64 && self.n_bound_odd == self.spectrum_odd as i64
    }
}

/// Bound-state counts from threshold phases:
/// `n_even = (Δ_e+(m) + Δ_e-(-m))/π + 1/2`, `n_odd = (Δ_o+(m) + Δ_o-(-m))/π + 1/2`.
///
/// Residuals are the distances of the unsnapped continuation endpoints from integers.
pub fn levinson_check(params: &WellParams) -> Result<LevinsonReport> {
    params.validate()?;
    let (d, kind) = nearest_transition(params);
    if (d - params.v).abs() < DEPTH_GUARD * params.m && params.v > 0.0 {
        return Err(Error::AmbiguousDepth { depth: params.v, kind, transition: d });
    }
    let (se, so) = count_by_parity(&bound_states(params));
    let count = |parity| {
        if params.v == 0.0 {
            return (0i64, 0.0);
        }
        let kf = K_FLOOR * params.m;
        let p = parity_phases_at(&[kf], EnergySign::Positive, parity, params)[0];
        let n = parity_phases_at(&[kf], EnergySign::Negative, parity, params)[0];
        let raw = (p + n) / PI + 0.5;
        (raw.round() as i64, (raw - raw.round()).abs())
    };
    let (ne, re) = count(Parity::Even);
    let (no, ro) = count(Parity::Odd);
    Ok(LevinsonReport {
        v: params.v,
        a: params.a,
        n_bound_even: ne,
        n_bound_odd: no,
        residual_even: re,
        residual_odd: ro,
        spectrum_even: se,
        spectrum_odd: so,
    })
}

/// Assignment of a level sitting at `E = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroModeConvention {
    /// Counted as an empty electron level (adds `+1/2` to `Q0`).
    #[default]
    Electron,
    /// Counted as an empty positron level (adds `-1/2`).
    Positron,
}

/// Levels with `|E|` below this (in units of `m`) are treated as zero modes.
pub const ZERO_MODE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VacuumChargeReport {
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    pub n_plus: usize,
    pub n_minus: usize,
    pub delta_plus_threshold: f64,
    pub delta_minus_threshold: f64,
    pub zero_mode: bool,
    pub zero_mode_convention: ZeroModeConvention,
    /// `Q0 - 2Va/π`: the part carried by the spectrum, free of the smooth depth dependence.
    pub asymmetry_part: f64,
}

/// General form `Q0 = ½{(δ+(∞) - δ+(m) - δ-(-∞) + δ-(-m))/π + N+ - N-}`.
pub fn vacuum_charge_general(d_plus_inf: f64, d_plus_m: f64, d_minus_inf: f64, d_minus_m: f64, n_plus: f64, n_minus: f64) -> f64 {
    0.5 * ((d_plus_inf - d_plus_m - d_minus_inf + d_minus_m) / PI + n_plus - n_minus)
}

/// Split a spectrum into `(N+, N-, zero_mode)` under the given convention.
pub fn sign_counts(states: &[BoundState], m: f64, conv: ZeroModeConvention) -> (usize, usize, bool) {
    let mut np = 0;
    let mut nm = 0;
    let mut zero = false;
    for s in states {
        if s.energy.abs() < ZERO_MODE_BAND * m {
            zero = true;
            match conv {
                ZeroModeConvention::Electron => np += 1,
                ZeroModeConvention::Positron => nm += 1,
            }
        } else if s.energy > 0.0 {
            np += 1;
        } else {
            nm += 1;
        }
    }
    (np, nm, zero)
}

/// Vacuum charge of the square well, `Q0 = ½{4Va/π + (δ-(-m) - δ+(m))/π + N+ - N-}`.
pub fn vacuum_charge(params: &WellParams, conv: ZeroModeConvention) -> Result<VacuumChargeReport> {
    params.validate()?;
    let WellParams { m, a, v } = *params;
    let states = bound_states(params);
    let (np, nm, zero) = sign_counts(&states, m, conv);
    let (dp, _) = threshold_phase(EnergySign::Positive, params);
    let (dm, _) = threshold_phase(EnergySign::Negative, params);
    let q0 = if v == 0.0 {
        0.0
    } else {
        vacuum_charge_general(2.0 * v * a, dp, -2.0 * v * a, dm, np as f64, nm as f64)
    };
    Ok(VacuumChargeReport {
        v,
        q0,
        n_plus: np,
        n_minus: nm,
        delta_plus_threshold: dp,
        delta_minus_threshold: dm,
        zero_mode: zero,
        zero_mode_convention: conv,
        asymmetry_part: q0 - 2.0 * v * a / PI,
    })
}

/// `Q0` just below and just above the first even zero crossing, `η` away from it.
pub fn zero_crossing_jump(m: f64, a: f64, eta: f64) -> Result<(f64, f64, f64)> {
    let v0 = zero_crossing_depth(m, a, Parity::Even, 0)?;
    let p = WellParams::new(m, a, v0)?;
    let below = vacuum_charge(&p.with_depth(v0 - eta), ZeroModeConvention::Electron)?.q0;
    let above = vacuum_charge(&p.with_depth(v0 + eta), ZeroModeConvention::Electron)?.q0;
    Ok((v0, below, above))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelCount {
    pub parity: Parity,
    pub sign: EnergySign,
    /// Continuum modes with `0 < k <= K` found as roots of the quantization condition.
    pub direct: i64,
    /// `⌊(KL + Δ(K))/π⌋ - ⌊Δ(0⁺)/π⌋`.
    pub phase_formula: i64,
    /// Smallest allowed wavevector.
    pub k_min: Option<f64>,
    /// Gap modes of this energy sign.
    pub bound: i64,
    /// `k = 0` modes of the free box (`E = +m` even, `E = -m` odd).
    pub zero_modes: i64,
    /// Continuum modes whose phase index `(kL + Δ(k))/π` is at most `⌊KL/π⌋`.
    pub index_count: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "K")]
    pub k_cut: f64,
    pub channels: Vec<ChannelCount>,
    pub positive_total: i64,
    pub total: i64,
    /// Total with the cutoff placed on the phase index instead of the wavevector.
    pub index_total: i64,
    /// Continuum estimate `LK/π - 1` for one channel.
    pub continuum_estimate: f64,
}

impl BoxCount {
    pub fn channel(&self, parity: Parity, sign: EnergySign) -> &ChannelCount {
        self.channels.iter().find(|c| c.parity == parity && c.sign == sign).expect("all four channels present")
    }

    pub fn formulas_agree(&self) -> bool {
        self.channels.iter().all(|c| c.direct == c.phase_formula)
    }
}

/// Count box states per (parity, energy sign) channel up to wavevector `K`.
pub fn box_mode_count(params: &WellParams, l: f64, k_cut: f64) -> Result<BoxCount> {
    params.validate()?;
    let m = params.m;
    let mut channels = Vec::new();
    let n_max = (k_cut * l / PI).floor();
    let k_scan = k_cut + (params.v * params.a + 2.0 * PI) / l;
    for parity in Parity::BOTH {
        let modes = box_modes(params, l, parity, k_scan)?;
        for sign in EnergySign::BOTH {
            let all: Vec<f64> = modes
                .iter()
                .filter(|md| !md.in_gap(m) && EnergySign::of(md.energy) == sign)
                .map(|md| md.k)
                .collect();
            let phases = parity_phases_at(&all, sign, parity, params);
            let index_count =
                all.iter().zip(&phases).filter(|(k, d)| ((*k * l + *d) / PI).round() <= n_max).count() as i64;
            let cont: Vec<f64> = all.iter().copied().filter(|&k| k <= k_cut).collect();
            let bound = modes.iter().filter(|md| md.in_gap(m) && EnergySign::of(md.energy) == sign).count() as i64;
            let (d0, _) = parity_threshold(sign, parity, params);
            let dk = parity_phases_at(&[k_cut], sign, parity, params)[0];
            let phase_formula = ((k_cut * l + dk) / PI).floor() as i64 - (d0 / PI + 1e-9).floor() as i64;
            let zero_modes = i64::from(
                params.v == 0.0
                    && matches!((parity, sign), (Parity::Even, EnergySign::Positive) | (Parity::Odd, EnergySign::Negative)),
            );
            channels.push(ChannelCount {
                parity,
                sign,
                direct: cont.len() as i64,
                phase_formula,
                k_min: cont.iter().copied().reduce(f64::min),
                bound,
                zero_modes,
                index_count,
            });
        }
    }
    let sum = |f: &dyn Fn(&ChannelCount) -> bool| -> i64 {
        channels.iter().filter(|c| f(c)).map(|c| c.direct + c.bound + c.zero_modes).sum()
    };
    let positive_total = sum(&|c| c.sign == EnergySign::Positive);
    let total = sum(&|_| true);
    let index_total = channels.iter().map(|c| c.index_count + c.bound + c.zero_modes).sum();
    Ok(BoxCount {
        v: params.v,
        l,
        k_cut,
        channels,
        positive_total,
        total,
        index_total,
        continuum_estimate: l * k_cut / PI - 1.0,
    })
}
