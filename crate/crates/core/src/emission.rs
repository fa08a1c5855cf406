//! Sudden switch of the well across the first critical depth and back.
//!
//! Eigenbases are box modes on `[-L, L]`. Every coefficient is a closed-form overlap
//! between a mode of the deeper well and a mode of the shallower one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boxmodes::{box_mode_spinor, box_modes, BoxMode};
use crate::error::{Error, Result};
use crate::levinson::{vacuum_charge, ZeroModeConvention};
use crate::params::{EnergySign, Parity, WellParams};
use crate::scattering::time_delay;
use crate::spectrum::{bound_states, level_energy};
use crate::spinor::PiecewiseSpinor;
use crate::wavefunction::bound_wavefunction;

/// Largest tolerated weight of the bound state outside the box.
pub const TAIL_LIMIT: f64 = 1e-6;
/// Fractional distance from the critical depth above which a warning is issued.
pub const BAND_WARNING: f64 = 0.05;
/// Tolerated difference between closed-form and quadrature overlaps.
pub const QUADRATURE_LIMIT: f64 = 1e-8;

#[cfg(feature = "parallel")]
fn par_map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    xs.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, U: Send>(xs: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    xs.iter().map(f).collect()
}

/// State of the lowest even level before the switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Occupation {
    /// Level empty: a bound positron is present.
    #[default]
    Vacant,
    /// Level filled by an electron.
    Filled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionScenario {
    pub m: f64,
    pub a: f64,
    #[serde(rename = "V_sub")]
    pub v_sub: f64,
    #[serde(rename = "V_super")]
    pub v_super: f64,
    pub occupation: Occupation,
    #[serde(rename = "L")]
    pub half_length: f64,
    /// Grid cutoff in energy, `|E| <= eps_max`.
    pub eps_max: f64,
}

impl TransitionScenario {
    /// Depths `(1 ∓ band)·V_1c`.
    pub fn symmetric(m: f64, a: f64, band: f64, half_length: f64, eps_max: f64, occupation: Occupation) -> Result<Self> {
        let vc = WellParams::new(m, a, 0.0)?.v_first_critical();
        let s = TransitionScenario {
            m,
            a,
            v_sub: (1.0 - band) * vc,
            v_super: (1.0 + band) * vc,
            occupation,
            half_length,
            eps_max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn sub(&self) -> WellParams {
        WellParams { m: self.m, a: self.a, v: self.v_sub }
    }

    pub fn sup(&self) -> WellParams {
        WellParams { m: self.m, a: self.a, v: self.v_super }
    }

    pub fn k_max(&self) -> f64 {
        ((self.eps_max - self.m) * (self.eps_max + self.m)).sqrt()
    }

    pub fn v_critical(&self) -> f64 {
        self.sub().v_first_critical()
    }

    /// Checks the scenario and returns advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.sub().validate()?;
        self.sup().validate()?;
        let m = self.m;
        if !(self.eps_max > m) {
            return Err(Error::InvalidParams(format!("grid cutoff {} must exceed m", self.eps_max)));
        }
        if !(self.half_length > self.a) {
            return Err(Error::InvalidParams(format!("box half-length {} must exceed a", self.half_length)));
        }
        let vc = self.v_critical();
        let identity = self.v_sub == self.v_super;
        if !identity && !(self.v_sub < vc && vc < self.v_super) {
            return Err(Error::Scenario(format!(
                "depths {} and {} do not bracket the critical depth {vc}",
                self.v_sub, self.v_super
            )));
        }
        if identity && self.v_sub >= vc {
            return Err(Error::Scenario(format!("depth {} has no even level to fill", self.v_sub)));
        }
        let mut warnings = Vec::new();
        let spread = ((self.v_sub - vc).abs().max((self.v_super - vc).abs())) / vc;
        if spread > BAND_WARNING {
            warnings.push(format!("depths lie {:.1}% from the critical depth", 100.0 * spread));
        }
        match level_energy(&self.sub().with_depth(vc), Parity::Odd, 0) {
            Some(e) if e > 0.0 => {}
            other => {
                return Err(Error::Scenario(format!("odd level at the critical depth is not above zero: {other:?}")));
            }
        }
        let e_b = level_energy(&self.sub(), Parity::Even, 0)
            .ok_or_else(|| Error::Scenario(format!("no even level at depth {}", self.v_sub)))?;
        let tail = bound_wavefunction(e_b, Parity::Even, &self.sub())?.tail_weight(self.half_length);
        if tail > TAIL_LIMIT {
            return Err(Error::BoxTooSmall { tail, half_length: self.half_length });
        }
        Ok(warnings)
    }
}

struct Basis {
    modes: Vec<BoxMode>,
    spinors: Vec<PiecewiseSpinor>,
}

fn basis(params: &WellParams, l: f64, parity: Parity, k_max: f64) -> Result<Basis> {
    let modes = box_modes(params, l, parity, k_max)?;
    let spinors = par_map(&modes, |md| box_mode_spinor(md, params, l)).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Basis { modes, spinors })
}

/// Overlaps of one new continuum mode with the old basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub k: f64,
    pub energy: f64,
    /// Overlap with the nearest old mode of the same sign (`A_k` or `L_k`).
    pub diagonal: Complex64,
    /// Weight on all old modes of the same sign.
    pub same_weight: f64,
    /// Root of the weight on old modes of the opposite sign (`|B_k|` or `|G_k|`).
    pub cross: f64,
    /// Overlap with the old bound state (`F_k` or `M_k`).
    pub bound: Complex64,
    /// One minus the total weight captured by the truncated old basis.
    pub row_defect: f64,
    /// Weight on old modes that are empty before the switch.
    pub empty_weight: f64,
    /// Weight on old modes that are filled before the switch.
    pub filled_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelCoefficients {
    pub parity: Parity,
    pub bound_energy: f64,
    /// New continuum rows with `E > m`.
    pub positive: Vec<ModeCoefficients>,
    /// New continuum rows with `E < -m`.
    pub negative: Vec<ModeCoefficients>,
    /// New gap rows (`k = 0`).
    pub gap: Vec<ModeCoefficients>,
}

impl ChannelCoefficients {
    /// `max |diag - 1|` over the continuum rows.
    pub fn max_diagonal_deviation(&self) -> f64 {
        self.positive.iter().chain(&self.negative).map(|r| (r.diagonal - 1.0).norm()).fold(0.0, f64::max)
    }

    pub fn max_cross_positive(&self) -> f64 {
        self.positive.iter().map(|r| r.cross).fold(0.0, f64::max)
    }

    pub fn max_cross_negative(&self) -> f64 {
        self.negative.iter().map(|r| r.cross).fold(0.0, f64::max)
    }

    pub fn max_bound_positive(&self) -> f64 {
        self.positive.iter().map(|r| r.bound.norm()).fold(0.0, f64::max)
    }

    /// Largest row defect among continuum rows with `k <= k_lim`.
    pub fn max_row_defect(&self, k_lim: f64) -> f64 {
        self.positive
            .iter()
            .chain(&self.negative)
            .filter(|r| r.k <= k_lim)
            .map(|r| r.row_defect.abs())
            .fold(0.0, f64::max)
    }

    /// `⟨Q_norm⟩` of the switched state in this channel: vacancies of new negative-type
    /// modes count `+1`, occupations of new positive-type modes `-1`.
    pub fn normal_charge(&self) -> f64 {
        let mut q = 0.0;
        for r in self.positive.iter().chain(&self.negative).chain(&self.gap) {
            if r.energy < 0.0 {
                q += r.empty_weight;
            } else {
                q -= r.filled_weight;
            }
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapCoefficients {
    pub scenario: TransitionScenario,
    pub even: ChannelCoefficients,
    pub odd: ChannelCoefficients,
    /// Largest closed-form vs quadrature discrepancy among the spot checks.
    pub quadrature_discrepancy: f64,
}

impl OverlapCoefficients {
    /// `max(|A_k - 1|, |B_k|, |F_k|, |G_k|)` over the even channel.
    pub fn mixing_bound(&self) -> f64 {
        let e = &self.even;
        e.positive
            .iter()
            .map(|r| (r.diagonal - 1.0).norm())
            .fold(0.0, f64::max)
            .max(e.max_cross_positive())
            .max(e.max_bound_positive())
            .max(e.max_cross_negative())
    }

    /// The same measure for the odd channel.
    pub fn odd_mixing_bound(&self) -> f64 {
        let o = &self.odd;
        o.max_diagonal_deviation().max(o.max_cross_positive()).max(o.max_bound_positive()).max(o.max_cross_negative())
    }
}

fn lowest_gap(b: &Basis, m: f64) -> Option<usize> {
    b.modes.iter().position(|md| md.in_gap(m))
}

fn channel(
    scenario: &TransitionScenario,
    parity: Parity,
) -> Result<(ChannelCoefficients, f64)> {
    let m = scenario.m;
    let (l, k_max) = (scenario.half_length, scenario.k_max());
    let old = basis(&scenario.sub(), l, parity, k_max)?;
    let new = basis(&scenario.sup(), l, parity, k_max)?;
    let b = lowest_gap(&old, m).ok_or_else(|| Error::Scenario(format!("no {parity:?} gap mode at depth {}", scenario.v_sub)))?;
    let bound_energy = old.modes[b].energy;
    let filled: Vec<bool> = old
        .modes
        .iter()
        .enumerate()
        .map(|(j, md)| {
            if j == b && parity == Parity::Even {
                scenario.occupation == Occupation::Filled
            } else {
                md.energy < 0.0
            }
        })
        .collect();
    let old_k = |sign: EnergySign| -> Vec<(f64, usize)> {
        let mut v: Vec<(f64, usize)> = old
            .modes
            .iter()
            .enumerate()
            .filter(|(_, md)| !md.in_gap(m) && EnergySign::of(md.energy) == sign)
            .map(|(j, md)| (md.k, j))
            .collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        v
    };
    let old_pos = old_k(EnergySign::Positive);
    let old_neg = old_k(EnergySign::Negative);
    let idx: Vec<usize> = (0..new.modes.len()).collect();
    let rows = par_map(&idx, |&i| {
        let md = new.modes[i];
        let psi = &new.spinors[i];
        let ov: Vec<Complex64> = old.spinors.iter().map(|o| psi.inner(o)).collect();
        let sign = EnergySign::of(md.energy);
        let gap = md.in_gap(m);
        let mut same = 0.0;
        let mut cross = 0.0;
        let mut empty = 0.0;
        let mut full = 0.0;
        let mut total = 0.0;
        for (j, o) in old.modes.iter().enumerate() {
            let w = ov[j].norm_sqr();
            total += w;
            if filled[j] {
                full += w;
            } else {
                empty += w;
            }
            if j == b || o.in_gap(m) {
                continue;
            }
            if EnergySign::of(o.energy) == sign {
                same += w;
            } else {
                cross += w;
            }
        }
        let list = if sign == EnergySign::Positive { &old_pos } else { &old_neg };
        let diagonal = if gap || list.is_empty() {
            Complex64::new(0.0, 0.0)
        } else {
            let p = list.partition_point(|(k, _)| *k < md.k);
            let cand = [p.saturating_sub(1), p.min(list.len() - 1)];
            let j = cand.into_iter().min_by(|&x, &y| (list[x].0 - md.k).abs().total_cmp(&(list[y].0 - md.k).abs())).unwrap();
            ov[list[j].1]
        };
        ModeCoefficients {
            k: md.k,
            energy: md.energy,
            diagonal,
            same_weight: same,
            cross: cross.sqrt(),
            bound: ov[b],
            row_defect: 1.0 - total,
            empty_weight: empty,
            filled_weight: full,
        }
    });
    let mut out = ChannelCoefficients { parity, bound_energy, positive: vec![], negative: vec![], gap: vec![] };
    for (r, md) in rows.into_iter().zip(&new.modes) {
        if md.in_gap(m) {
            out.gap.push(r);
        } else if md.energy > 0.0 {
            out.positive.push(r);
        } else {
            out.negative.push(r);
        }
    }
    out.negative.sort_by(|x, y| x.k.total_cmp(&y.k));
    // Spot-check three overlaps against quadrature.
    let mut worst: f64 = 0.0;
    let n = new.modes.len();
    for i in [0, n / 2, n.saturating_sub(1)] {
        let closed = new.spinors[i].inner(&old.spinors[b]);
        let quad = new.spinors[i].inner_quadrature(&old.spinors[b], 1e-10);
        let d = (closed - quad).norm();
        if d > QUADRATURE_LIMIT {
            return Err(Error::QuadratureMismatch { closed: closed.norm(), quadrature: quad.norm() });
        }
        worst = worst.max(d);
    }
    Ok((out, worst))
}

/// All overlap coefficients of the switch `V_sub → V_super`, both parities.
pub fn overlap_coefficients(scenario: &TransitionScenario) -> Result<OverlapCoefficients> {
    scenario.validate()?;
    let (even, qe) = channel(scenario, Parity::Even)?;
    let (odd, qo) = channel(scenario, Parity::Odd)?;
    Ok(OverlapCoefficients { scenario: *scenario, even, odd, quadrature_discrepancy: qe.max(qo) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionSample {
    pub k: f64,
    pub energy: f64,
    /// `N_k = |M_k|²`.
    pub n_k: f64,
    /// Modes per unit momentum at this grid point.
    pub dos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionSpectrum {
    pub samples: Vec<EmissionSample>,
    pub total: f64,
    pub peak_k: Option<f64>,
    /// Grid spacing at the peak.
    pub peak_spacing: Option<f64>,
}

impl EmissionSpectrum {
    fn from_rows(rows: &[(f64, f64, f64)]) -> Self {
        let n = rows.len();
        let samples: Vec<EmissionSample> = (0..n)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { rows[i - 1].0 };
                let hi = if i + 1 == n { 2.0 * rows[i].0 - lo } else { rows[i + 1].0 };
                let spacing = if i == 0 || i + 1 == n { hi - rows[i].0.min(lo).max(0.0) } else { 0.5 * (hi - lo) };
                EmissionSample { k: rows[i].0, energy: rows[i].1, n_k: rows[i].2, dos: 1.0 / spacing.max(f64::MIN_POSITIVE) }
            })
            .collect();
        let total = samples.iter().map(|s| s.n_k).sum();
        let peak = samples.iter().enumerate().max_by(|x, y| x.1.n_k.total_cmp(&y.1.n_k));
        let (peak_k, peak_spacing) = match peak {
            Some((_, s)) if s.n_k > 0.0 => (Some(s.k), Some(1.0 / s.dos)),
            _ => (None, None),
        };
        EmissionSpectrum { samples, total, peak_k, peak_spacing }
    }
}

/// Emitted positron numbers `N_k = |M_k|²`; zero everywhere when the level was filled.
pub fn emission_spectrum(coeffs: &OverlapCoefficients) -> EmissionSpectrum {
    let vacant = coeffs.scenario.occupation == Occupation::Vacant;
    let rows: Vec<(f64, f64, f64)> = coeffs
        .even
        .negative
        .iter()
        .map(|r| (r.k, r.energy, if vacant { r.bound.norm_sqr() } else { 0.0 }))
        .collect();
    EmissionSpectrum::from_rows(&rows)
}

/// Emission spectrum from the bound-state overlaps alone, without the full coefficient tables.
pub fn emission_spectrum_direct(scenario: &TransitionScenario) -> Result<EmissionSpectrum> {
    scenario.validate()?;
    let m = scenario.m;
    let (l, k_max) = (scenario.half_length, scenario.k_max());
    let old = box_modes(&scenario.sub(), l, Parity::Even, k_max)?;
    let b = old.iter().find(|md| md.in_gap(m)).ok_or_else(|| Error::Scenario("no even gap mode".into()))?;
    let ub = box_mode_spinor(b, &scenario.sub(), l)?;
    let mut new: Vec<BoxMode> = box_modes(&scenario.sup(), l, Parity::Even, k_max)?
        .into_iter()
        .filter(|md| md.energy < -m)
        .collect();
    new.sort_by(|x, y| x.k.total_cmp(&y.k));
    let vacant = scenario.occupation == Occupation::Vacant;
    let ns = par_map(&new, |md| -> Result<f64> {
        if !vacant {
            return Ok(0.0);
        }
        Ok(box_mode_spinor(md, &scenario.sup(), l)?.inner(&ub).norm_sqr())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = new.iter().zip(ns).map(|(md, n)| (md.k, md.energy, n)).collect();
    Ok(EmissionSpectrum::from_rows(&rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerStage {
    pub label: String,
    #[serde(rename = "Q0")]
    pub q0: f64,
    /// Integer-valued occupation charge (bound positron, emitted positrons).
    pub occupation: f64,
    /// Charge of the sea rearrangement measured from the overlaps.
    pub sea: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeLedger {
    pub stages: Vec<LedgerStage>,
    #[serde(rename = "Q0_sub")]
    pub q0_sub: f64,
    #[serde(rename = "Q0_super")]
    pub q0_super: f64,
    /// `Q0 - 2Va/π` on each side; unchanged by the dive.
    pub asymmetry_sub: f64,
    pub asymmetry_super: f64,
    /// Largest difference between any stage total and the first.
    pub max_deviation: f64,
}

impl ChargeLedger {
    pub fn conserved(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// Stage-by-stage charge for the round trip `V_sub → V_super → V_sub`.
pub fn charge_ledger(coeffs: &OverlapCoefficients, spectrum: &EmissionSpectrum) -> Result<ChargeLedger> {
    let s = &coeffs.scenario;
    let conv = ZeroModeConvention::Electron;
    let sub = vacuum_charge(&s.sub(), conv)?;
    let sup = vacuum_charge(&s.sup(), conv)?;
    let vacant = s.occupation == Occupation::Vacant;
    let bound = if vacant { 1.0 } else { 0.0 };
    let emitted = spectrum.total;
    let sea = coeffs.even.normal_charge() + coeffs.odd.normal_charge() - emitted;
    let stage = |label: &str, q0: f64, occupation: f64, sea: f64| LedgerStage {
        label: label.into(),
        q0,
        occupation,
        sea,
        total: q0 + occupation + sea,
    };
    let stages = vec![
        stage("before switch", sub.q0, bound, 0.0),
        stage("after switch", sup.q0, emitted, sea),
        stage("after return", sub.q0, emitted, 0.0),
    ];
    let first = stages[0].total;
    let max_deviation = stages.iter().map(|st| (st.total - first).abs()).fold(0.0, f64::max);
    Ok(ChargeLedger {
        stages,
        q0_sub: sub.q0,
        q0_super: sup.q0,
        asymmetry_sub: sub.asymmetry_part,
        asymmetry_super: sup.asymmetry_part,
        max_deviation,
    })
}

/// Minimum recommended time between switching on and switching back: the delay of the
/// first transmission resonance of the deeper well.
pub fn escape_time_guard(scenario: &TransitionScenario) -> Result<f64> {
    Ok(time_delay(&scenario.sup(), 1)?.delay)
}

/// Number of bound states of either well, as a sanity figure for reports.
pub fn bound_counts(scenario: &TransitionScenario) -> (usize, usize) {
    (bound_states(&scenario.sub()).len(), bound_states(&scenario.sup()).len())
}

/// `2ΔV·a/π`: the smooth change of `Q0` between the two depths.
pub fn smooth_charge_shift(scenario: &TransitionScenario) -> f64 {
    2.0 * (scenario.v_super - scenario.v_sub) * scenario.a / PI
}
