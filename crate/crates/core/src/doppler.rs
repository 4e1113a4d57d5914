//! Maxwell-Boltzmann averages of the susceptibilities.
//!
//! With counter-propagating probe and control the two-photon detuning
//! `Delta_v + delta_v = Delta + delta` does not depend on velocity, so for a
//! sigma+ control each component is a single Lorentzian in `delta_v` and its
//! Gaussian average is a Faddeeva function:
//!
//! ```text
//! <1/(delta_v - a)> = (i pi / sqrt(2 pi w_D^2)) W((a - delta) / (sqrt(2) w_D)),   Im a > 0
//! ```

use std::f64::consts::{PI, SQRT_2};

use crate::faddeeva;
use crate::params::{AtomParams, ControlParams};
use crate::quadrature::{gaussian_average, QuadratureResult, QuadratureSettings};
use crate::susceptibility::{s_general, SusceptibilityPair};
use crate::{Error, Result, C64};

fn check_width(omega_d: f64) -> Result<()> {
    if omega_d > 0.0 && omega_d.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateWidth(omega_d))
    }
}

/// Average of `1/(delta_v - pole)` over `delta_v ~ N(delta, omega_d^2)`.
fn lorentzian_average(pole: C64, delta: f64, omega_d: f64) -> Result<C64> {
    check_width(omega_d)?;
    let z = (pole - delta) / (SQRT_2 * omega_d);
    let prefactor = C64::i() * PI / (2.0 * PI * omega_d * omega_d).sqrt();
    Ok(prefactor * faddeeva::w(z)?)
}

/// `<s->`, independent of the control field.
pub fn avg_s_minus(atom: &AtomParams, zeta: f64, delta: f64, omega_d: f64) -> Result<C64> {
    lorentzian_average(C64::new(zeta, atom.gamma_2), delta, omega_d)
}

/// `<s+>` for a sigma+ control of amplitude `g1` and detuning `big_delta`.
pub fn avg_s_plus(
    atom: &AtomParams,
    g1: C64,
    big_delta: f64,
    zeta: f64,
    delta: f64,
    omega_d: f64,
) -> Result<C64> {
    let light_shift = g1.norm_sqr() / C64::new(big_delta + delta, -atom.gamma_sum());
    lorentzian_average(C64::new(-zeta, atom.gamma_1) + light_shift, delta, omega_d)
}

/// `<s+>` with the control locked to two-photon resonance, `Delta = -delta`.
pub fn avg_s_two_photon(
    atom: &AtomParams,
    g1: C64,
    zeta: f64,
    delta: f64,
    omega_d: f64,
) -> Result<C64> {
    let width = atom.gamma_1 + g1.norm_sqr() / atom.gamma_sum();
    lorentzian_average(C64::new(-zeta, width), delta, omega_d)
}

/// Numerical Gaussian average of an arbitrary single-velocity function of `delta_v`.
pub fn avg_quadrature<F: Fn(f64) -> C64>(
    s_fn: F,
    delta: f64,
    omega_d: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult> {
    check_width(omega_d)?;
    gaussian_average(s_fn, delta, omega_d, settings)
}

/// Averaged pair for a sigma+ control via the closed forms.
pub fn averaged_pair(
    atom: &AtomParams,
    ctrl: &ControlParams,
    zeta: f64,
    delta: f64,
    omega_d: f64,
) -> Result<SusceptibilityPair> {
    if !ctrl.is_sigma_plus() {
        return averaged_general(atom, ctrl, zeta, delta, omega_d, &QuadratureSettings::default());
    }
    Ok(SusceptibilityPair {
        s_plus: avg_s_plus(atom, ctrl.g1, ctrl.detuning, zeta, delta, omega_d)?,
        s_minus: avg_s_minus(atom, zeta, delta, omega_d)?,
        averaged: true,
        control_on: ctrl.g1.norm_sqr() > 0.0,
    })
}

/// Averaged pair for arbitrary control polarization by quadrature of the
/// complete solution, holding `Delta_v + delta_v = Delta + delta` fixed.
pub fn averaged_general(
    atom: &AtomParams,
    ctrl: &ControlParams,
    zeta: f64,
    delta: f64,
    omega_d: f64,
    settings: &QuadratureSettings,
) -> Result<SusceptibilityPair> {
    let two_photon = ctrl.detuning + delta;
    let plus = avg_quadrature(
        |dv| s_general(atom, ctrl, zeta, dv, two_photon - dv).s_plus,
        delta,
        omega_d,
        settings,
    )?;
    let minus = avg_quadrature(
        |dv| s_general(atom, ctrl, zeta, dv, two_photon - dv).s_minus,
        delta,
        omega_d,
        settings,
    )?;
    Ok(SusceptibilityPair {
        s_plus: plus.value,
        s_minus: minus.value,
        averaged: true,
        control_on: ctrl.g1.norm_sqr() + ctrl.g2.norm_sqr() > 0.0,
    })
}
