//! Bound and scattering eigenspinors as piecewise-analytic objects.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{energy_from_k, propagate, propagate_c};
use crate::params::{EnergySign, Parity, WellParams};
use crate::spectrum::{matching_residual, THRESHOLD_BAND};
use crate::spinor::{propagator_terms, NormKind, PiecewiseSpinor, Segment, Term};

/// Matching residual above which an energy is rejected as a bound state.
pub const MATCHING_TOL: f64 = 1e-8;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn degenerate(params: &WellParams) -> Error {
    Error::InvalidParams(format!("interior wavevector vanishes for V = {}", params.v))
}

/// Mirror a right-hand segment to the left with the parity sign applied.
fn mirror(seg: &Segment, sign: f64) -> Segment {
    Segment {
        lo: -seg.hi,
        hi: -seg.lo,
        terms: seg
            .terms
            .iter()
            .map(|t| Term { rate: -t.rate, amp: [t.amp[0] * sign, -t.amp[1] * sign], origin: -t.origin })
            .collect(),
    }
}

/// Unit-normalized bound state at `energy`.
pub fn bound_wavefunction(energy: f64, parity: Parity, params: &WellParams) -> Result<PiecewiseSpinor> {
    params.validate()?;
    let WellParams { m, a, v } = *params;
    if !(energy > -m && energy < m) {
        return Err(Error::MatchingResidual { energy, residual: f64::INFINITY });
    }
    let residual = matching_residual(energy, parity, params);
    if residual > MATCHING_TOL {
        return Err(Error::MatchingResidual { energy, residual });
    }
    let w = energy + v;
    let s0 = parity.start();
    let interior = propagator_terms([c(s0[0]), c(s0[1])], w, m, 0.0).ok_or_else(|| degenerate(params))?;
    let at_a = propagate(s0, w, m, a);
    let kappa = ((m - energy) * (m + energy)).sqrt();
    let ext = [-kappa, energy - m];
    let amp = if ext[0].abs() > ext[1].abs() { at_a[0] / ext[0] } else { at_a[1] / ext[1] };
    let right = Segment {
        lo: a,
        hi: f64::INFINITY,
        terms: vec![Term { rate: c(-kappa), amp: [c(amp * ext[0]), c(amp * ext[1])], origin: a }],
    };
    let left = mirror(&right, parity.sign());
    let threshold = m - energy.abs() < THRESHOLD_BAND * m;
    let psi = PiecewiseSpinor::new(
        vec![left, Segment { lo: -a, hi: a, terms: interior }, right],
        if threshold { NormKind::Unnormalized } else { NormKind::Unit },
    );
    if threshold {
        return Ok(psi);
    }
    let n = psi.norm_sqr().sqrt();
    Ok(psi.scale(c(1.0 / n)))
}

/// Left-incident scattering solution with unit incident amplitude.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub k: f64,
    /// Transmission amplitude.
    pub f: Complex64,
    /// Reflection amplitude.
    pub b: Complex64,
    pub spinor: PiecewiseSpinor,
}

/// Plane-wave exterior spinor for `exp(λx)`.
fn plane(lambda: Complex64, e: f64, m: f64) -> [Complex64; 2] {
    [lambda, c(e - m)]
}

pub fn left_incident(k: f64, sign: EnergySign, params: &WellParams) -> Result<ScatteringSolution> {
    params.validate()?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::NonPositiveMomentum(k));
    }
    let WellParams { m, a, v } = *params;
    let e = energy_from_k(k, sign.value(), m);
    let ik = Complex64::new(0.0, k);
    let em = e - m;
    // Transmitted wave e^{ikx} at x = a, propagated back to x = -a.
    let sa = plane(ik, e, m).map(|z| z * (ik * a).exp());
    let sl = propagate_c(sa, e + v, m, -2.0 * a);
    let alpha = (sl[0] / ik + sl[1] / em) * 0.5 * (ik * a).exp();
    let beta = (sl[1] / em - sl[0] / ik) * 0.5 * (-ik * a).exp();
    let f = alpha.inv();
    let b = beta / alpha;
    let left = Segment {
        lo: f64::NEG_INFINITY,
        hi: -a,
        terms: vec![
            Term { rate: ik, amp: plane(ik, e, m), origin: 0.0 },
            Term { rate: -ik, amp: plane(-ik, e, m).map(|z| z * b), origin: 0.0 },
        ],
    };
    let interior = propagator_terms(sl.map(|z| z * f), e + v, m, -a).ok_or_else(|| degenerate(params))?;
    let right = Segment {
        lo: a,
        hi: f64::INFINITY,
        terms: vec![Term { rate: ik, amp: plane(ik, e, m).map(|z| z * f), origin: 0.0 }],
    };
    let spinor = PiecewiseSpinor::new(
        vec![left, Segment { lo: -a, hi: a, terms: interior }, right],
        NormKind::Unnormalized,
    );
    Ok(ScatteringSolution { energy: e, k, f, b, spinor })
}

/// Continuum normalization `1/sqrt(2π · 2E(E - m))` of a unit-amplitude plane wave.
pub fn continuum_factor(e: f64, m: f64) -> f64 {
    1.0 / (2.0 * PI * 2.0 * e * (e - m)).sqrt()
}

/// Parity eigenstate `(ψ_L ± σ3 ψ_L(-x)) / √2`.
///
/// `NormKind::Box` truncates the exterior at `|x| = L` and normalizes to one there.
pub fn scattering_wavefunction(
    k: f64,
    sign: EnergySign,
    parity: Parity,
    params: &WellParams,
    norm_kind: NormKind,
) -> Result<PiecewiseSpinor> {
    let sol = left_incident(k, sign, params)?;
    let psi = sol.spinor.add(&sol.spinor.parity_image().scale(c(parity.sign())));
    match norm_kind {
        NormKind::Continuum | NormKind::Unnormalized => {
            let mut out = psi.scale(c(continuum_factor(sol.energy, params.m) / 2f64.sqrt()));
            out.norm_kind = norm_kind;
            Ok(out)
        }
        NormKind::Unit => Err(Error::InvalidParams("scattering states are not square integrable".into())),
        NormKind::Box { half_length } => {
            if !(half_length > params.a) {
                return Err(Error::InvalidParams(format!("box half-length {half_length} must exceed a")));
            }
            let mut out = psi;
            out.segments[0].lo = -half_length;
            out.segments[2].hi = half_length;
            let n = out.norm_sqr().sqrt();
            let mut out = out.scale(c(1.0 / n));
            out.norm_kind = norm_kind;
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::bound_states;

    fn wp(v: f64) -> WellParams {
        WellParams::new(1.0, 0.7, v).unwrap()
    }

    #[test]
    fn bound_state_is_continuous_normalized_and_parity_definite() {
        let p = wp(2.0);
        let xs: Vec<f64> = (0..40).map(|i| 0.05 + 0.1 * i as f64).collect();
        for s in bound_states(&p) {
            let psi = bound_wavefunction(s.energy, s.parity, &p).unwrap();
            assert!(psi.continuity_residual() < 1e-10);
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(psi.parity_residual(s.parity.sign(), &xs) < 1e-12);
            let q = psi.inner_quadrature(&psi, 1e-12).re;
            assert!((q - 1.0).abs() < 1e-9, "{q}");
        }
    }

    #[test]
    fn odd_bound_state_vanishes_at_origin() {
        let p = wp(1.5);
        let s = bound_states(&p).into_iter().find(|s| s.parity == Parity::Odd).unwrap();
        let psi = bound_wavefunction(s.energy, s.parity, &p).unwrap();
        assert!(psi.eval(0.0)[0].norm() < 1e-12);
    }

    #[test]
    fn weak_binding_profile_is_flat_cosine() {
        let p = wp(1e-3);
        let s = bound_states(&p)[0];
        let psi = bound_wavefunction(s.energy, s.parity, &p).unwrap();
        let r = psi.eval(0.7)[0].re / psi.eval(0.0)[0].re;
        assert!((r - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wrong_energy_is_rejected() {
        let e = bound_wavefunction(0.3, Parity::Even, &wp(2.0)).unwrap_err();
        assert!(matches!(e, Error::MatchingResidual { .. }));
    }

    #[test]
    fn free_scattering_is_reflectionless() {
        for k in [0.1, 1.0, 7.0] {
            let s = left_incident(k, EnergySign::Positive, &wp(0.0)).unwrap();
            assert!(s.b.norm() < 1e-12);
            assert!((s.f.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flux_is_conserved() {
        for (k, sign) in [(0.3, EnergySign::Positive), (2.0, EnergySign::Negative), (0.05, EnergySign::Negative)] {
            let s = left_incident(k, sign, &wp(2.7)).unwrap();
            assert!((s.f.norm_sqr() + s.b.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(s.spinor.continuity_residual() < 1e-10);
        }
    }

    #[test]
    fn resonance_is_reflectionless() {
        let p = wp(1.0);
        // 2pa = 2π with p = sqrt((E+V)^2 - 1)
        let pr = 2.0 * PI / (2.0 * 0.7);
        let e = pr.hypot(1.0) - 1.0;
        let k = ((e - 1.0) * (e + 1.0)).sqrt();
        let s = left_incident(k, EnergySign::Positive, &p).unwrap();
        assert!(s.b.norm() < 1e-10);
    }

    #[test]
    fn parity_states_are_parity_eigenstates() {
        let xs: Vec<f64> = (0..30).map(|i| 0.13 * i as f64).collect();
        for parity in Parity::BOTH {
            let psi =
                scattering_wavefunction(0.8, EnergySign::Negative, parity, &wp(3.0), NormKind::Continuum).unwrap();
            assert!(psi.parity_residual(parity.sign(), &xs) < 1e-12);
            assert!(psi.continuity_residual() < 1e-10);
        }
    }
}
