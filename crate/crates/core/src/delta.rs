//! Closed forms for the δ-function well, the limit `V → ∞`, `a → 0` with `λ = 2Va` fixed.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::continuation::{continue_down, ANCHOR_EPS};
use crate::error::{Error, Result};
use crate::levinson::{vacuum_charge_general, ZeroModeConvention, ZERO_MODE_BAND};
use crate::params::{EnergySign, Parity};

/// Coupling `λ` within this distance of a multiple of π counts as a boundary.
pub const LAMBDA_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaPotential {
    pub lambda: f64,
    pub lambda_reduced: f64,
    #[serde(rename = "N_crossed")]
    pub n_crossed: u64,
}

impl DeltaPotential {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParams(format!("coupling must be finite and non-negative, got {lambda}")));
        }
        let n = (lambda / PI).floor();
        Ok(Self { lambda, lambda_reduced: lambda - n * PI, n_crossed: n as u64 })
    }

    /// True when `λ` sits on a multiple of π, where the level is exactly at threshold.
    pub fn on_boundary(&self) -> bool {
        self.lambda_reduced < LAMBDA_GUARD || PI - self.lambda_reduced < LAMBDA_GUARD
    }
}

/// `δ(E)` modulo π.
fn raw_phase(k: f64, sign: EnergySign, m: f64, lambda: f64) -> f64 {
    let e = sign.value() * k.hypot(m);
    (e * lambda.sin()).atan2(k * lambda.cos())
}

/// Phase shift `tan δ = (E/k) tan λ`, continued from `δ(±∞) = ±λ`.
pub fn delta_phase_shift(e: f64, m: f64, lambda: f64) -> Result<f64> {
    if !(e.abs() > m) || !e.is_finite() {
        return Err(Error::InsideGap { energy: e, mass: m });
    }
    let dp = DeltaPotential::new(lambda)?;
    if dp.lambda == 0.0 {
        return Ok(0.0);
    }
    let k = ((e.abs() - m) * (e.abs() + m)).sqrt();
    Ok(phase_at_k(k, EnergySign::of(e), m, lambda))
}

/// Continued phase at exterior wavevector `k` on one branch.
pub fn phase_at_k(k: f64, sign: EnergySign, m: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let ka = (ANCHOR_EPS * m - m).sqrt() * (ANCHOR_EPS * m + m).sqrt();
    if k >= ka {
        return crate::continuation::nearest_branch(raw_phase(k, sign, m, lambda), sign.value() * lambda);
    }
    continue_down(|q| raw_phase(q, sign, m, lambda), ka, sign.value() * lambda, &[k])[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaLevel {
    pub energy: f64,
    pub parity: Parity,
}

/// The single level `E = m cos λ sign(sin λ)`; none on the boundaries `λ = Nπ`.
///
/// The family alternates: even on `(2Nπ, 2Nπ + π)`, odd on `(2Nπ + π, 2Nπ + 2π)`.
pub fn delta_spectrum(m: f64, lambda: f64) -> Result<Option<DeltaLevel>> {
    let dp = DeltaPotential::new(lambda)?;
    if dp.on_boundary() {
        return Ok(None);
    }
    let energy = m * lambda.cos() * lambda.sin().signum();
    let parity = if dp.n_crossed % 2 == 0 { Parity::Even } else { Parity::Odd };
    Ok(Some(DeltaLevel { energy, parity }))
}

/// Threshold phases `(δ(m), δ(-m)) = (π/2 + Nπ, -π/2 - Nπ)`.
pub fn delta_threshold_phases(lambda: f64) -> Result<(f64, f64)> {
    let dp = DeltaPotential::new(lambda)?;
    if dp.lambda == 0.0 {
        return Ok((0.0, 0.0));
    }
    let n = dp.n_crossed as f64;
    Ok((FRAC_PI_2 + n * PI, -FRAC_PI_2 - n * PI))
}

/// `Q0 = λ'/π` with the level above zero, `λ'/π - 1` below it.
pub fn delta_vacuum_charge(m: f64, lambda: f64, conv: ZeroModeConvention) -> Result<f64> {
    let dp = DeltaPotential::new(lambda)?;
    // On a boundary both one-sided limits vanish.
    let Some(level) = delta_spectrum(m, lambda)? else {
        return Ok(0.0);
    };
    let above = if level.energy.abs() < ZERO_MODE_BAND * m {
        conv == ZeroModeConvention::Electron
    } else {
        level.energy > 0.0
    };
    let q = dp.lambda_reduced / PI;
    Ok(if above { q } else { q - 1.0 })
}

/// The same charge from the general phase formula.
pub fn delta_vacuum_charge_general(m: f64, lambda: f64) -> Result<f64> {
    let (dm_plus, dm_minus) = delta_threshold_phases(lambda)?;
    let (np, nm) = match delta_spectrum(m, lambda)? {
        Some(l) if l.energy > 0.0 => (1.0, 0.0),
        Some(_) => (0.0, 1.0),
        None => (0.0, 0.0),
    };
    Ok(vacuum_charge_general(lambda, dm_plus, -lambda, dm_minus, np, nm))
}

/// Transfer matrix across the δ well, `exp(-iλσ₂)`, acting on `(u, w)`.
pub fn delta_transfer(lambda: f64) -> [[f64; 2]; 2] {
    let (s, c) = lambda.sin_cos();
    [[c, -s], [s, c]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::propagate;
    use crate::params::WellParams;
    use crate::scattering::phase_shift;
    use crate::spectrum::bound_states;
    use proptest::prelude::*;

    fn limit(lambda: f64) -> WellParams {
        let v = 1e4;
        WellParams::new(1.0, lambda / (2.0 * v), v).unwrap()
    }

    #[test]
    fn zero_coupling() {
        assert_eq!(delta_phase_shift(3.0, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(delta_phase_shift(-3.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn high_energy_limit() {
        for lambda in [0.4, 2.0, 5.0] {
            assert!((delta_phase_shift(1e7, 1.0, lambda).unwrap() - lambda).abs() < 1e-6);
            assert!((delta_phase_shift(-1e7, 1.0, lambda).unwrap() + lambda).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_gap_energies() {
        assert!(delta_phase_shift(0.5, 1.0, 1.0).is_err());
        assert!(DeltaPotential::new(-1.0).is_err());
    }

    #[test]
    fn matches_square_well_phase() {
        let d = delta_phase_shift(2.0, 1.0, 1.0).unwrap();
        let s = phase_shift(2.0, &limit(1.0)).unwrap();
        assert!((d - s).abs() < 1e-3, "{d} {s}");
    }

    #[test]
    fn spectrum_examples() {
        let l = delta_spectrum(1.0, FRAC_PI_2).unwrap().unwrap();
        assert!(l.energy.abs() < 1e-15 && l.parity == Parity::Even);
        let l = delta_spectrum(1.0, PI / 4.0).unwrap().unwrap();
        assert!((l.energy - 0.70711).abs() < 1e-5 && l.parity == Parity::Even);
        let l = delta_spectrum(1.0, 1.5 * PI).unwrap().unwrap();
        assert!(l.energy.abs() < 1e-15 && l.parity == Parity::Odd);
        assert!(delta_spectrum(1.0, PI).unwrap().is_none());
    }

    #[test]
    fn square_well_levels_converge() {
        for lambda in [0.3, 1.0, 2.0] {
            let want = delta_spectrum(1.0, lambda).unwrap().unwrap();
            let states = bound_states(&limit(lambda));
            assert_eq!(states.len(), 1);
            assert_eq!(states[0].parity, want.parity);
            assert!((states[0].energy - want.energy).abs() < 1e-3);
        }
        // Past π the even level has dived and an odd one has appeared.
        let states = bound_states(&limit(4.0));
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].parity, Parity::Odd);
    }

    #[test]
    fn charge_examples() {
        let c = |l| delta_vacuum_charge(1.0, l, ZeroModeConvention::Electron).unwrap();
        assert!((c(PI / 4.0) - 0.25).abs() < 1e-12);
        assert!((c(3.0 * PI / 4.0) + 0.25).abs() < 1e-12);
        assert!((c(FRAC_PI_2 - 1e-6) - 0.5).abs() < 1e-5);
        assert!((c(FRAC_PI_2 + 1e-6) + 0.5).abs() < 1e-5);
        let p = delta_vacuum_charge(1.0, FRAC_PI_2, ZeroModeConvention::Positron).unwrap();
        assert!((c(FRAC_PI_2) - p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transfer_matrix_is_the_thin_well_limit() {
        let lambda = 1.3;
        let p = limit(lambda);
        let t = delta_transfer(lambda);
        for s in [[1.0, 0.0], [0.0, 1.0]] {
            let got = propagate(s, 0.3 + p.v, 1.0, 2.0 * p.a);
            let want = [t[0][0] * s[0] + t[0][1] * s[1], t[1][0] * s[0] + t[1][1] * s[1]];
            assert!((got[0] - want[0]).abs() < 1e-3 && (got[1] - want[1]).abs() < 1e-3);
        }
    }

    proptest! {
        #[test]
        fn threshold_structure(lambda in 0.01f64..12.0) {
            prop_assume!(!DeltaPotential::new(lambda).unwrap().on_boundary());
            let (tp, tm) = delta_threshold_phases(lambda).unwrap();
            let near_p = phase_at_k(1e-12, EnergySign::Positive, 1.0, lambda);
            let near_m = phase_at_k(1e-12, EnergySign::Negative, 1.0, lambda);
            prop_assert!((near_p - tp).abs() < 1e-8, "{} {}", near_p, tp);
            prop_assert!((near_m - tm).abs() < 1e-8, "{} {}", near_m, tm);
        }

        #[test]
        fn exactly_one_level(lambda in 0.01f64..20.0) {
            let dp = DeltaPotential::new(lambda).unwrap();
            prop_assume!(!dp.on_boundary());
            prop_assert!(delta_spectrum(1.0, lambda).unwrap().is_some());
        }

        #[test]
        fn charge_matches_general_form(lambda in 0.01f64..20.0) {
            prop_assume!(!DeltaPotential::new(lambda).unwrap().on_boundary());
            prop_assume!((DeltaPotential::new(lambda).unwrap().lambda_reduced - FRAC_PI_2).abs() > 1e-9);
            let a = delta_vacuum_charge(1.0, lambda, ZeroModeConvention::Electron).unwrap();
            let b = delta_vacuum_charge_general(1.0, lambda).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
