use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::WellParams;

/// Derived kinematic quantities at energy `E` for a given well.
///
/// Invalid combinations are flagged through `None` rather than raised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicContext {
    pub e: f64,
    pub eps: f64,
    /// Exterior wavevector, present when `|E| > m`.
    pub k: Option<f64>,
    /// Exterior decay constant, present when `|E| < m`.
    pub kappa: Option<f64>,
    /// `(E+V)^2 - m^2`; its sign decides whether `p` is real.
    pub p_squared: f64,
    /// Interior wavevector, present when `(E+V)^2 >= m^2`.
    pub p: Option<f64>,
    pub gamma: Option<f64>,
}

impl KinematicContext {
    pub fn at_threshold(&self) -> bool {
        self.k == Some(0.0)
    }
}

pub fn kinematics(e: f64, params: &WellParams) -> KinematicContext {
    let m = params.m;
    let w = e + params.v;
    let eps = e.abs();
    let gap2 = (m - e) * (m + e);
    let (k, kappa) = if gap2 < 0.0 {
        (Some((-gap2).sqrt()), None)
    } else if gap2 > 0.0 {
        (None, Some(gap2.sqrt()))
    } else {
        (Some(0.0), None)
    };
    let p_squared = (w - m) * (w + m);
    let p = (p_squared >= 0.0).then(|| p_squared.sqrt());
    let gamma = match (k, p) {
        (Some(k), Some(p)) if p > 0.0 && e != -m => Some(k / p * (w + m) / (e + m)),
        _ => None,
    };
    KinematicContext { e, eps, k, kappa, p_squared, p, gamma }
}

/// `(cos(pt), sin(pt)/p)` as entire functions of `p^2`.
pub fn cos_sinc(p2: f64, t: f64) -> (f64, f64) {
    let x2 = p2 * t * t;
    if x2.abs() < 1e-8 {
        let c = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
        let s = t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
        return (c, s);
    }
    if p2 > 0.0 {
        let p = p2.sqrt();
        ((p * t).cos(), (p * t).sin() / p)
    } else {
        let q = (-p2).sqrt();
        ((q * t).cosh(), (q * t).sinh() / q)
    }
}

/// Like [`cos_sinc`] for `p^2 < 0`, multiplied by `exp(-q|t|)` to avoid overflow.
pub fn cos_sinc_scaled(p2: f64, t: f64) -> (f64, f64) {
    debug_assert!(p2 < 0.0);
    let q = (-p2).sqrt();
    let x = q * t.abs();
    let e2 = (-2.0 * x).exp();
    let c = 0.5 * (1.0 + e2);
    let s = if x < 1e-4 {
        let (_, s) = cos_sinc(p2, t);
        s * (-x).exp()
    } else {
        t.signum() * 0.5 * (1.0 - e2) / q
    };
    (c, s)
}

/// Propagate the spinor `(u, w)` a distance `t` through a region with kinetic energy `wk`.
///
/// Solves `u' = -(W+m) w`, `w' = (W-m) u`.
pub fn propagate(state: [f64; 2], wk: f64, m: f64, t: f64) -> [f64; 2] {
    let (c, s) = cos_sinc((wk - m) * (wk + m), t);
    [state[0] * c - (wk + m) * state[1] * s, state[1] * c + (wk - m) * state[0] * s]
}

pub fn propagate_c(state: [Complex64; 2], wk: f64, m: f64, t: f64) -> [Complex64; 2] {
    let (c, s) = cos_sinc((wk - m) * (wk + m), t);
    [state[0] * c - state[1] * ((wk + m) * s), state[1] * c + state[0] * ((wk - m) * s)]
}

/// Energy of the given sign with exterior wavevector `k`.
pub fn energy_from_k(k: f64, sign: f64, m: f64) -> f64 {
    sign * k.hypot(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(v: f64) -> WellParams {
        WellParams::new(1.0, 0.7, v).unwrap()
    }

    #[test]
    fn threshold_without_well() {
        let c = kinematics(1.0, &wp(0.0));
        assert_eq!(c.k, Some(0.0));
        assert_eq!(c.p, Some(0.0));
        assert!(c.gamma.is_none());
    }

    #[test]
    fn gap_energy_in_deep_well() {
        let c = kinematics(0.0, &wp(3.0));
        assert!((c.kappa.unwrap() - 1.0).abs() < 1e-15);
        assert!((c.p.unwrap() - 8f64.sqrt()).abs() < 1e-14);
        assert!(c.k.is_none());
    }

    #[test]
    fn free_gamma_is_one() {
        let c = kinematics(2.0, &wp(0.0));
        assert!((c.k.unwrap() - 3f64.sqrt()).abs() < 1e-14);
        assert!((c.gamma.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn imaginary_interior_is_flagged() {
        let c = kinematics(0.0, &wp(0.5));
        assert!(c.p.is_none());
        assert!(c.p_squared < 0.0);
        assert!(c.gamma.is_none());
    }

    #[test]
    fn propagation_solves_ode() {
        for &(wk, t) in &[(2.3, 0.4), (0.2, 1.3), (1.0 + 1e-12, 0.7), (-3.0, 0.9)] {
            let s0 = [0.3, -0.8];
            let h = 1e-6;
            let f = |t| propagate(s0, wk, 1.0, t);
            let d = [(f(t + h)[0] - f(t - h)[0]) / (2.0 * h), (f(t + h)[1] - f(t - h)[1]) / (2.0 * h)];
            let s = f(t);
            assert!((d[0] + (wk + 1.0) * s[1]).abs() < 1e-6);
            assert!((d[1] - (wk - 1.0) * s[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn propagation_is_invertible() {
        let s = propagate(propagate([0.4, 1.1], 0.3, 1.0, 2.5), 0.3, 1.0, -2.5);
        assert!((s[0] - 0.4).abs() < 1e-12 && (s[1] - 1.1).abs() < 1e-12);
    }

    #[test]
    fn scaled_matches_unscaled() {
        let (c, s) = cos_sinc(-0.25, 3.0);
        let (cs, ss) = cos_sinc_scaled(-0.25, 3.0);
        let f = (-1.5f64).exp();
        assert!((c * f - cs).abs() < 1e-14 && (s * f - ss).abs() < 1e-14);
    }
}
