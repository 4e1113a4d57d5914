//! Normalized susceptibilities `s+` (sigma- probe component, `|g> <-> |1>`)
//! and `s-` (sigma+ component, `|g> <-> |2>`) of an atom with a single
//! velocity, to lowest order in the probe.
//!
//! `s = rho_ig * gamma / g_i` with `gamma = 1`, so the prefactor is `i` and the
//! lower half-rates `gamma_1`, `gamma_2` only set the coherence decay of the
//! respective arm.

mod steady_state;

pub use steady_state::{steady_state, steady_state_oracle, OracleSolution, DEFAULT_PROBE_AMPLITUDE};

use serde::Serialize;

use crate::params::{AtomParams, ControlParams};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SusceptibilityPair {
    pub s_plus: C64,
    pub s_minus: C64,
    /// Averaged over the Doppler distribution.
    pub averaged: bool,
    pub control_on: bool,
}

impl SusceptibilityPair {
    pub fn stationary(s_plus: C64, s_minus: C64, control_on: bool) -> Self {
        Self {
            s_plus,
            s_minus,
            averaged: false,
            control_on,
        }
    }

    /// Exchange the two circular components.
    pub fn swapped(self) -> Self {
        Self {
            s_plus: self.s_minus,
            s_minus: self.s_plus,
            ..self
        }
    }
}

fn lorentz_denominator(rate: f64, detuning: f64) -> C64 {
    C64::new(rate, detuning)
}

/// Complete solution for arbitrary control polarization. `delta_v` and
/// `big_delta_v` are the velocity-shifted probe and control detunings and
/// are kept independent here.
pub fn s_general(
    atom: &AtomParams,
    ctrl: &ControlParams,
    zeta: f64,
    delta_v: f64,
    big_delta_v: f64,
) -> SusceptibilityPair {
    let g1 = ctrl.g1.norm_sqr();
    let g2 = ctrl.g2.norm_sqr();
    let a1 = lorentz_denominator(atom.gamma_1, delta_v + zeta);
    let a2 = lorentz_denominator(atom.gamma_2, delta_v - zeta);
    let two_photon = lorentz_denominator(atom.gamma_sum(), big_delta_v + delta_v);

    let s_plus = C64::i() * (g2 + a2 * two_photon) / (g2 * a1 + a2 * (g1 + a1 * two_photon));
    let s_minus = C64::i() * (g1 + a1 * two_photon) / (g1 * a2 + a1 * (g2 + a2 * two_photon));

    SusceptibilityPair::stationary(s_plus, s_minus, g1 + g2 > 0.0)
}

/// `s-` for a sigma+ control; it does not see the control at all.
pub fn s_reduced_minus(atom: &AtomParams, zeta: f64, delta_v: f64) -> C64 {
    C64::i() / lorentz_denominator(atom.gamma_2, delta_v - zeta)
}

/// `s+` for a sigma+ control. `big_delta + delta` is the velocity-independent
/// two-photon detuning for counter-propagating beams.
pub fn s_reduced_plus(
    atom: &AtomParams,
    g1: C64,
    big_delta: f64,
    delta: f64,
    zeta: f64,
    delta_v: f64,
) -> C64 {
    let two_photon = lorentz_denominator(atom.gamma_sum(), big_delta + delta);
    C64::i() * two_photon
        / (g1.norm_sqr() + lorentz_denominator(atom.gamma_1, delta_v + zeta) * two_photon)
}

/// Both components without control: `s+- = gamma / ((delta_v +- zeta) - i gamma)`.
pub fn s_no_control(atom: &AtomParams, zeta: f64, delta_v: f64) -> SusceptibilityPair {
    let s_plus = 1.0 / C64::new(delta_v + zeta, -atom.gamma_1);
    let s_minus = 1.0 / C64::new(delta_v - zeta, -atom.gamma_2);
    SusceptibilityPair::stationary(s_plus, s_minus, false)
}

/// `s+` of a stationary atom locked to two-photon resonance (`Delta = -delta`):
/// a Lorentzian of half-width `|G1|^2 / Gamma_sum + gamma` centred at `delta = -zeta`.
pub fn s_two_photon_stationary(atom: &AtomParams, g1: C64, zeta: f64, delta: f64) -> C64 {
    let width = g1.norm_sqr() / atom.gamma_sum() + atom.gamma_1;
    C64::i() / C64::new(width, delta + zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn unit() -> AtomParams {
        AtomParams::uniform(1.0)
    }

    #[test]
    fn line_center_without_fields_is_i() {
        let p = s_general(&unit(), &ControlParams::off(), 0.0, 0.0, 0.0);
        assert!(rel(p.s_plus, C64::i()) < 1e-15);
        assert!(rel(p.s_minus, C64::i()) < 1e-15);
        assert!(!p.control_on);
    }

    #[test]
    fn reduced_minus_examples() {
        let a = unit();
        assert!(rel(s_reduced_minus(&a, 3.0, 3.0), C64::i()) < 1e-15);
        assert!(rel(s_reduced_minus(&a, 2.0, 3.0), C64::new(0.5, 0.5)) < 1e-15);
        // i/(1 - 10 i) = (-10 + i)/101
        let got = s_reduced_minus(&a, 10.0, 0.0);
        assert!(rel(got, C64::new(-10.0 / 101.0, 1.0 / 101.0)) < 1e-15);
    }

    #[test]
    fn no_control_examples() {
        let a = unit();
        let p = s_no_control(&a, 0.0, 7.5);
        assert_eq!(p.s_plus, p.s_minus);

        let p = s_no_control(&a, 4.0, -4.0);
        assert!(rel(p.s_plus, C64::i()) < 1e-15);
        let p = s_no_control(&a, 4.0, 4.0);
        assert!(rel(p.s_minus, C64::i()) < 1e-15);

        // 1/(8 - i) = (8 + i)/65
        let p = s_no_control(&a, 3.0, 5.0);
        assert!(rel(p.s_plus, C64::new(8.0 / 65.0, 1.0 / 65.0)) < 1e-15);
    }

    #[test]
    fn reduced_plus_limits() {
        let a = unit();
        let off = s_reduced_plus(&a, C64::new(0.0, 0.0), 12.0, -3.0, 5.0, 2.0);
        assert!(rel(off, s_no_control(&a, 5.0, 2.0).s_plus) < 1e-14);

        let strong = s_reduced_plus(&a, C64::new(1e6, 0.0), 0.0, 0.0, 10.0, 0.0);
        assert!(strong.norm() < 1e-10);
    }

    #[test]
    fn two_photon_stationary_lorentzian() {
        let a = unit();
        assert!(rel(s_two_photon_stationary(&a, C64::new(0.0, 0.0), 7.0, -7.0), C64::i()) < 1e-15);

        // G1 = 20, Gamma_sum = 3: peak Im = 1/(400/3 + 1)
        let g1 = C64::new(20.0, 0.0);
        let peak = s_two_photon_stationary(&a, g1, 4.0, -4.0);
        let expected = 1.0 / (400.0 / 3.0 + 1.0);
        assert!((peak.im - expected).abs() < 1e-17);
        assert!((peak.im - 7.444_168_734_491_315e-3).abs() < 1e-15);

        // half maximum one half-width away
        let half_width = 400.0 / 3.0 + 1.0;
        let side = s_two_photon_stationary(&a, g1, 4.0, -4.0 + half_width);
        assert!((side.im - 0.5 * expected).abs() < 1e-15);
    }

    #[test]
    fn general_reduces_to_sigma_plus_forms() {
        let a = AtomParams::with_lower(1.0, [0.7, 1.3, 2.1]);
        let ctrl = ControlParams {
            g1: C64::new(30.0, -12.0),
            g2: C64::new(0.0, 0.0),
            detuning: 17.0,
        };
        for &(delta, shift) in &[(0.0, 0.0), (-40.0, 25.0), (120.0, -300.0)] {
            let delta_v = delta + shift;
            let big_delta_v = ctrl.detuning + delta - delta_v;
            let p = s_general(&a, &ctrl, 6.0, delta_v, big_delta_v);
            let plus = s_reduced_plus(&a, ctrl.g1, ctrl.detuning, delta, 6.0, delta_v);
            let minus = s_reduced_minus(&a, 6.0, delta_v);
            assert!(rel(p.s_plus, plus) < 1e-12);
            assert!(rel(p.s_minus, minus) < 1e-12);
        }
    }

    #[test]
    fn reduced_plus_at_two_photon_resonance() {
        let a = unit();
        let g1 = C64::new(20.0, 5.0);
        for delta in [-100.0, -10.0, 0.0, 33.0] {
            let locked = s_reduced_plus(&a, g1, -delta, delta, 10.0, delta);
            assert!(rel(locked, s_two_photon_stationary(&a, g1, 10.0, delta)) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn passive_for_physical_parameters(
            g1 in 0.0..200.0f64,
            g2 in 0.0..200.0f64,
            zeta in -50.0..50.0f64,
            delta_v in -500.0..500.0f64,
            big_delta in -300.0..300.0f64,
        ) {
            let a = unit();
            let ctrl = ControlParams { g1: C64::new(g1, 0.0), g2: C64::new(g2, 0.0), detuning: big_delta };
            let p = s_general(&a, &ctrl, zeta, delta_v, big_delta);
            prop_assert!(p.s_plus.im >= 0.0);
            prop_assert!(p.s_minus.im >= 0.0);
            let r = s_reduced_plus(&a, ctrl.g1, big_delta, delta_v, zeta, delta_v);
            prop_assert!(r.im >= 0.0);
        }

        #[test]
        fn bounded_without_fields(delta_v in -1e3..1e3f64) {
            let p = s_general(&unit(), &ControlParams::off(), 0.0, delta_v, 0.0);
            prop_assert!(p.s_plus.norm() <= 1.0 + 1e-12);
            prop_assert!(p.s_minus.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn mirror_symmetry(
            g1r in -100.0..100.0f64, g1i in -100.0..100.0f64,
            g2r in -100.0..100.0f64,
            zeta in -50.0..50.0f64,
            delta_v in -300.0..300.0f64,
            big_delta_v in -300.0..300.0f64,
        ) {
            let a = unit();
            let ctrl = ControlParams { g1: C64::new(g1r, g1i), g2: C64::new(g2r, 0.0), detuning: 0.0 };
            let mirrored = ControlParams { g1: ctrl.g2, g2: ctrl.g1, detuning: 0.0 };
            let p = s_general(&a, &ctrl, zeta, delta_v, big_delta_v);
            let q = s_general(&a, &mirrored, -zeta, delta_v, big_delta_v);
            prop_assert!(rel(p.s_plus, q.s_minus) < 1e-12);
            prop_assert!(rel(p.s_minus, q.s_plus) < 1e-12);
        }
    }
}
