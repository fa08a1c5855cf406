use std::f64::consts::{FRAC_PI_2, PI};

use diracwell::boxmodes::{box_mode_spinor, box_modes};
use diracwell::levinson::{levinson_check, parity_phases, vacuum_charge, ZeroModeConvention};
use diracwell::scattering::{phase_shift_curve, threshold_integers};
use diracwell::spectrum::{bound_states, critical_potentials};
use diracwell::wavefunction::bound_wavefunction;
use diracwell::{EnergySign, Parity, WellParams};
use proptest::prelude::*;

fn wp(v: f64) -> WellParams {
    WellParams::new(1.0, 0.7, v).unwrap()
}

#[test]
fn bound_states_are_orthonormal() {
    let p = wp(5.0);
    let psis: Vec<_> = bound_states(&p)
        .iter()
        .map(|s| bound_wavefunction(s.energy, s.parity, &p).unwrap())
        .collect();
    assert!(psis.len() >= 2);
    for (i, a) in psis.iter().enumerate() {
        for (j, b) in psis.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.inner(b).norm() - want).abs() < 1e-9);
        }
    }
}

#[test]
fn free_box_opposite_signs_are_orthogonal() {
    let p = wp(0.0);
    let l = 100.0;
    let modes = box_modes(&p, l, Parity::Even, 1.0).unwrap();
    let pos: Vec<_> = modes.iter().filter(|m| m.energy > 1.0).collect();
    let neg: Vec<_> = modes.iter().filter(|m| m.energy < -1.0).collect();
    for a in pos.iter().step_by(5) {
        let b = neg.iter().find(|b| (a.k - b.k).abs() < 1e-9).expect("same lattice for both signs");
        let x = box_mode_spinor(a, &p, l).unwrap();
        let y = box_mode_spinor(b, &p, l).unwrap();
        assert!(x.inner(&y).norm() < 1e-8);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let rep = critical_potentials(1.0, 0.7, 6.0).unwrap();
    let s = serde_json::to_string(&rep).unwrap();
    assert!(s.contains("\"V_1c\""));
    let back: diracwell::spectrum::CriticalityReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back, rep);
    let curve = phase_shift_curve(&wp(2.0), 10.0, 50).unwrap();
    let back: diracwell::scattering::PhaseShiftCurve =
        serde_json::from_str(&serde_json::to_string(&curve).unwrap()).unwrap();
    assert_eq!(back, curve);
}

#[test]
fn supercritical_threshold_integers() {
    let (n, np) = threshold_integers(&wp(4.0)).unwrap();
    assert_eq!((n, np), (3, -1));
    let states = bound_states(&wp(4.0));
    assert_eq!(states.len() as i64, n + np);
}

#[test]
fn weak_well_parity_thresholds() {
    let p = parity_phases(1.0, &wp(1e-4)).unwrap();
    assert!((p.even_plus - FRAC_PI_2).abs() < 1e-9);
    assert!((p.odd_minus + FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn charge_is_smooth_part_below_first_crossing() {
    let r = vacuum_charge(&wp(1.0), ZeroModeConvention::Electron).unwrap();
    assert!((r.q0 - 2.0 * 0.7 / PI).abs() < 1e-9);
    assert_eq!(r.n_plus, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn levinson_holds(v in 0.01f64..12.0, a in 0.2f64..1.5) {
        let p = WellParams::new(1.0, a, v).unwrap();
        if let Ok(r) = levinson_check(&p) {
            prop_assert!(r.matches(), "{:?}", r);
        }
    }

    #[test]
    fn phase_curves_are_continuous(v in 0.01f64..8.0) {
        let c = phase_shift_curve(&wp(v), 20.0, 200).unwrap();
        for w in c.samples.windows(2) {
            prop_assert!((w[1].delta_plus - w[0].delta_plus).abs() < FRAC_PI_2);
            prop_assert!((w[1].delta_minus - w[0].delta_minus).abs() < FRAC_PI_2);
        }
        let _ = EnergySign::Positive;
    }
}
