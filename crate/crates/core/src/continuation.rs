//! Branch tracking for phases that are only known modulo π.

use std::f64::consts::PI;

/// Anchor energy (in units of `m`) from which phases are continued inward.
pub const ANCHOR_EPS: f64 = 1e6;
/// Wavevector (in units of `m`) standing in for the threshold.
pub const K_FLOOR: f64 = 1e-12;
const LOG_STEP: f64 = 0.02;
const MAX_JUMP: f64 = PI / 4.0;

/// Representative of `raw` mod π nearest to `prev`.
pub fn nearest_branch(raw: f64, prev: f64) -> f64 {
    raw + PI * ((prev - raw) / PI).round()
}

/// Continue a mod-π phase from `k_anchor` (where its value is near `anchor`) down to
/// each wavevector in `targets`, which must be sorted in decreasing order.
///
/// Steps are uniform in `ln k` and halved whenever the branch-corrected value moves by
/// more than π/4.
pub fn continue_down<F: Fn(f64) -> f64>(raw: F, k_anchor: f64, anchor: f64, targets: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(targets.len());
    let mut k = k_anchor;
    let mut val = nearest_branch(raw(k), anchor);
    let mut h = LOG_STEP;
    for &t in targets {
        debug_assert!(t > 0.0);
        while k > t {
            let mut step = h;
            loop {
                let kn = (k * (-step).exp()).max(t);
                let v = nearest_branch(raw(kn), val);
                if (v - val).abs() <= MAX_JUMP || step < 1e-12 {
                    k = kn;
                    val = v;
                    break;
                }
                step *= 0.5;
            }
            h = (step * 1.5).min(LOG_STEP);
        }
        if t > k {
            // Target above the current position: only happens for unsorted input.
            out.push(nearest_branch(raw(t), val));
        } else {
            out.push(val);
        }
    }
    out
}

/// Snap `value` to the nearest member of `class + nπ`; returns `(snapped, distance)`.
pub fn snap_to_class(value: f64, class: f64) -> (f64, f64) {
    let s = nearest_branch(class, value);
    (s, (value - s).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unwraps_linear_phase() {
        // raw = 0.05k mod π, true value 0.05k; also a sharp step near k = 1.
        let f = |k: f64| 0.05 * k + 2.0 * ((k - 1.0) / 1e-3).atan();
        let raw = |k: f64| f(k).rem_euclid(PI);
        let targets = [40.0, 10.0, 1.0 + 1e-4, 0.5, 0.01];
        let vals = continue_down(raw, 100.0, f(100.0), &targets);
        for (t, v) in targets.iter().zip(vals) {
            assert!((v - f(*t)).abs() < 1e-9, "{t}: {v}");
        }
    }

    proptest! {
        #[test]
        fn nearest_branch_is_congruent(raw in -10.0f64..10.0, prev in -50.0f64..50.0) {
            let b = nearest_branch(raw, prev);
            prop_assert!((b - prev).abs() <= PI / 2.0 + 1e-12);
            let n = (b - raw) / PI;
            prop_assert!((n - n.round()).abs() < 1e-9);
        }
    }
}
