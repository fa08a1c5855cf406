//! Eigenmodes of the well placed in a box `[-L, L]` with parity-compatible walls.
//!
//! Even modes satisfy `w(±L) = 0`, odd modes `u(±L) = 0`, which is the parity
//! restriction of periodic boundary conditions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{cos_sinc_scaled, propagate};
use crate::params::{EnergySign, Parity, WellParams};
use crate::roots::bisect;
use crate::spinor::{propagator_terms, NormKind, PiecewiseSpinor, Segment, Term};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxMode {
    pub energy: f64,
    /// Exterior wavevector; zero for modes inside the gap.
    pub k: f64,
    pub parity: Parity,
}

impl BoxMode {
    pub fn in_gap(&self, m: f64) -> bool {
        self.energy.abs() < m
    }
}

/// Exterior spinor obtained by running the wall condition from `x = L` back to `x = a`.
///
/// Inside the gap the result carries an extra factor `exp(-κ(L-a))`.
fn wall_state(e: f64, parity: Parity, params: &WellParams, l: f64) -> [f64; 2] {
    let m = params.m;
    let s = parity.start();
    let t = params.a - l;
    if e.abs() < m {
        let (c, sn) = cos_sinc_scaled((e - m) * (e + m), t);
        [s[0] * c - (e + m) * s[1] * sn, s[1] * c + (e - m) * s[0] * sn]
    } else {
        propagate(s, e, m, t)
    }
}

/// Wronskian of the interior solution and the wall solution at `x = a`; zero at box modes.
pub fn quantization(e: f64, parity: Parity, params: &WellParams, l: f64) -> f64 {
    let int = propagate(parity.start(), e + params.v, params.m, params.a);
    let ext = wall_state(e, parity, params, l);
    int[0] * ext[1] - int[1] * ext[0]
}

fn energy_k(k: f64, sign: EnergySign, m: f64) -> f64 {
    sign.value() * k.hypot(m)
}

/// Box modes of one parity: continuum modes with `0 < k <= k_max` on both branches plus gap modes.
pub fn box_modes(params: &WellParams, l: f64, parity: Parity, k_max: f64) -> Result<Vec<BoxMode>> {
    params.validate()?;
    if !(l > params.a) {
        return Err(Error::InvalidParams(format!("box half-length {l} must exceed a = {}", params.a)));
    }
    let m = params.m;
    let mut out = Vec::new();
    let h = PI / (32.0 * l);
    let n = (k_max / h).ceil() as usize + 1;
    let k_lo = 1e-9 * m;
    for sign in EnergySign::BOTH {
        let f = |k: f64| quantization(energy_k(k, sign, m), parity, params, l);
        let ks: Vec<f64> = (0..=n).map(|i| (k_lo + i as f64 * h).min(k_max)).collect();
        let mut prev = f(ks[0]);
        for w in ks.windows(2) {
            if w[1] <= w[0] {
                break;
            }
            let cur = f(w[1]);
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
                let k = bisect(f, w[0], w[1], 1e-15 * w[1].max(m))?;
                out.push(BoxMode { energy: energy_k(k, sign, m), k, parity });
            } else if cur == 0.0 {
                out.push(BoxMode { energy: energy_k(w[1], sign, m), k: w[1], parity });
            }
            prev = cur;
        }
    }
    // Gap modes on E = m cos θ.
    let nt = 20_000;
    let g = |th: f64| quantization(m * th.cos(), parity, params, l);
    let th_lo = 1e-7;
    let th_hi = PI - 1e-7;
    let mut prev = g(th_lo);
    let dt = (th_hi - th_lo) / nt as f64;
    for i in 0..nt {
        let (t0, t1) = (th_lo + i as f64 * dt, th_lo + (i + 1) as f64 * dt);
        let cur = g(t1);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let th = bisect(g, t0, t1, 1e-15)?;
            out.push(BoxMode { energy: m * th.cos(), k: 0.0, parity });
        }
        prev = cur;
    }
    out.sort_by(|x, y| x.energy.total_cmp(&y.energy));
    Ok(out)
}

/// Exterior terms on `[a, L]` of the solution equal to `s` at `x = L`, rescaled inside the gap
/// so that no amplitude overflows. Returns the terms and their value at `x = a`.
fn exterior_terms(e: f64, k: f64, s: [f64; 2], params: &WellParams, l: f64) -> (Vec<Term>, [Complex64; 2]) {
    let WellParams { m, a, .. } = *params;
    let em = if e > 0.0 && e.abs() > m { k * k / (e + m) } else { e - m };
    let c = |x: f64| Complex64::new(x, 0.0);
    let terms = if e.abs() > m {
        let lam = Complex64::new(0.0, k);
        let beta = (c(s[1] / em) + c(s[0]) / lam) * 0.5;
        let alpha = (c(s[1] / em) - c(s[0]) / lam) * 0.5;
        vec![
            Term { rate: lam, amp: [lam * beta, c(em) * beta], origin: l },
            Term { rate: -lam, amp: [-lam * alpha, c(em) * alpha], origin: l },
        ]
    } else {
        let kappa = ((m - e) * (m + e)).sqrt();
        let beta = 0.5 * (s[1] / em + s[0] / kappa);
        let alpha = 0.5 * (s[1] / em - s[0] / kappa);
        let damp = (-kappa * (l - a)).exp();
        vec![
            Term { rate: c(-kappa), amp: [c(-kappa * alpha), c(em * alpha)], origin: a },
            Term { rate: c(kappa), amp: [c(kappa * beta * damp), c(em * beta * damp)], origin: l },
        ]
    };
    let seg = Segment { lo: a, hi: l, terms };
    let at_a = seg.eval(a);
    (seg.terms, at_a)
}

/// Unit-normalized spinor of a box mode on `[-L, L]`, positive at the origin.
pub fn box_mode_spinor(mode: &BoxMode, params: &WellParams, l: f64) -> Result<PiecewiseSpinor> {
    let WellParams { m, a, v } = *params;
    let e = mode.energy;
    let s0 = mode.parity.start();
    let cz = |x: f64| Complex64::new(x, 0.0);
    let interior = propagator_terms([cz(s0[0]), cz(s0[1])], e + v, m, 0.0)
        .ok_or_else(|| Error::InvalidParams(format!("interior wavevector vanishes at E = {e}")))?;
    let at_a = propagate(s0, e + v, m, a);
    let (terms, ext_a) = exterior_terms(e, mode.k, mode.parity.start(), params, l);
    let scale = if ext_a[0].norm() > ext_a[1].norm() { cz(at_a[0]) / ext_a[0] } else { cz(at_a[1]) / ext_a[1] };
    let right = Segment {
        lo: a,
        hi: l,
        terms: terms
            .into_iter()
            .map(|t| Term { amp: [t.amp[0] * scale, t.amp[1] * scale], ..t })
            .collect(),
    };
    let sign = mode.parity.sign();
    let left = Segment {
        lo: -l,
        hi: -a,
        terms: right
            .terms
            .iter()
            .map(|t| Term { rate: -t.rate, amp: [t.amp[0] * sign, -t.amp[1] * sign], origin: -t.origin })
            .collect(),
    };
    let psi = PiecewiseSpinor::new(
        vec![left, Segment { lo: -a, hi: a, terms: interior }, right],
        NormKind::Box { half_length: l },
    );
    let n = psi.norm_sqr();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidParams(format!("box mode at E = {e} has degenerate norm")));
    }
    Ok(psi.scale(cz(1.0 / n.sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(v: f64) -> WellParams {
        WellParams::new(1.0, 0.7, v).unwrap()
    }

    #[test]
    fn free_modes_sit_on_the_lattice() {
        let l = 50.0;
        let modes = box_modes(&wp(0.0), l, Parity::Even, 2.0).unwrap();
        let pos: Vec<_> = modes.iter().filter(|m| m.energy > 1.0).collect();
        assert_eq!(pos.len(), (2.0 * l / PI).floor() as usize);
        for (i, md) in pos.iter().enumerate() {
            assert!((md.k - (i + 1) as f64 * PI / l).abs() < 1e-10);
        }
    }

    #[test]
    fn modes_are_orthonormal_and_continuous() {
        let p = wp(2.0);
        let l = 40.0;
        let modes = box_modes(&p, l, Parity::Odd, 1.5).unwrap();
        let psis: Vec<_> = modes.iter().map(|md| box_mode_spinor(md, &p, l).unwrap()).collect();
        for (i, a) in psis.iter().enumerate().step_by(7) {
            assert!(a.continuity_residual() < 1e-9);
            for b in psis.iter().skip(i).step_by(5) {
                let o = a.inner(b).norm();
                let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                assert!((o - want).abs() < 1e-8, "{o}");
            }
        }
    }

    #[test]
    fn gap_mode_tracks_bound_state() {
        let p = wp(3.0);
        let exact = crate::spectrum::bound_states(&p);
        let modes = box_modes(&p, 60.0, Parity::Even, 0.5).unwrap();
        let gap: Vec<_> = modes.iter().filter(|m| m.in_gap(1.0)).collect();
        let even: Vec<_> = exact.iter().filter(|s| s.parity == Parity::Even).collect();
        assert_eq!(gap.len(), even.len());
        assert!((gap[0].energy - even.last().unwrap().energy).abs() < 1e-12);
    }

    #[test]
    fn scattering_box_modes_are_orthogonal() {
        // Parity scattering states truncated to the box at two allowed momenta.
        use crate::wavefunction::scattering_wavefunction;
        let p = wp(1.0);
        let l = 100.0;
        let modes = box_modes(&p, l, Parity::Even, 1.0).unwrap();
        let pos: Vec<_> = modes.iter().filter(|m| m.energy > 1.0).collect();
        let nk = NormKind::Box { half_length: l };
        let a = scattering_wavefunction(pos[3].k, EnergySign::Positive, Parity::Even, &p, nk).unwrap();
        let b = scattering_wavefunction(pos[9].k, EnergySign::Positive, Parity::Even, &p, nk).unwrap();
        assert!(a.inner(&b).norm() < 1e-6);
        let n = scattering_wavefunction(pos[3].k, EnergySign::Negative, Parity::Even, &p, nk).unwrap();
        assert!(a.inner(&n).norm() < 1e-2);
    }
}
