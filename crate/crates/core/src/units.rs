//! Conversion between laboratory quantities (SI, plus gauss and W/cm^2 where
//! that is the customary unit) and the dimensionless parameters.
//!
//! Field amplitudes follow `E(t) = E e^{-i w t} + c.c.`, so the cycle-averaged
//! intensity is `I = 2 c eps0 |E|^2` and the control Rabi amplitude is
//! `G1 = D |E_c| / hbar`. The optical depth uses the SI form
//! `alpha l = k_p l |d|^2 n / (eps0 hbar gamma)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::params::{AtomParams, ControlParams, EnvParams};
use crate::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
const GAUSS_TO_TESLA: f64 = 1e-4;
const W_PER_CM2_TO_W_PER_M2: f64 = 1e4;

/// Laboratory description of the cell and fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabUnits {
    /// Cell temperature, K.
    pub temperature: f64,
    /// Atomic mass, kg.
    pub mass: f64,
    /// Cell length along the probe, m.
    pub cell_length: f64,
    /// Atomic number density, m^-3.
    pub number_density: f64,
    /// Longitudinal magnetic field, gauss. Sign selects the field direction.
    pub magnetic_field: f64,
    /// Control intensity, W/cm^2.
    pub control_intensity: f64,
    /// Probe transition wavelength, m.
    pub wavelength: f64,
    /// Reduced dipole moment of the lower (probe) transition, C m.
    pub dipole_lower: f64,
    /// Reduced dipole moment of the upper (control) transition, C m.
    pub dipole_upper: f64,
    /// Lower-level half decay rate `gamma`, s^-1. This is the frequency unit.
    pub gamma: f64,
}

impl LabUnits {
    /// 40Ca on the 4s^2 1S0 - 4s4p 1P1 line (422.67 nm, A = 2.18e8 s^-1),
    /// 500 K, 5 cm cell at 1e12 cm^-3, 200 G, 5 W/cm^2 control.
    ///
    /// The lower dipole follows from `A = 2 gamma = k^3 |d|^2 / (3 pi eps0 hbar)`.
    /// The upper-transition dipole is not tabulated here and is set equal to `d`.
    pub fn calcium_40() -> Self {
        let wavelength = 422.6727e-9;
        let einstein_a = 2.18e8;
        let k = 2.0 * PI / wavelength;
        let d = (3.0 * PI * EPSILON_0 * HBAR * einstein_a / k.powi(3)).sqrt();
        Self {
            temperature: 500.0,
            mass: 39.962_590_863 * ATOMIC_MASS_UNIT,
            cell_length: 0.05,
            number_density: 1e18,
            magnetic_field: 200.0,
            control_intensity: 5.0,
            wavelength,
            dipole_lower: d,
            dipole_upper: d,
            gamma: einstein_a / 2.0,
        }
    }

    fn check(&self) -> Result<()> {
        let strictly_positive = [
            ("temperature", self.temperature),
            ("mass", self.mass),
            ("wavelength", self.wavelength),
            ("cell_length", self.cell_length),
            ("number_density", self.number_density),
            ("dipole_lower", self.dipole_lower),
            ("dipole_upper", self.dipole_upper),
            ("gamma", self.gamma),
        ];
        for (name, v) in strictly_positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.control_intensity.is_finite() && self.control_intensity >= 0.0) {
            return Err(Error::Domain(format!(
                "control_intensity must be non-negative, got {}",
                self.control_intensity
            )));
        }
        if !self.magnetic_field.is_finite() {
            return Err(Error::Domain("magnetic_field must be finite".into()));
        }
        Ok(())
    }

    fn probe_wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    fn probe_angular_frequency(&self) -> f64 {
        SPEED_OF_LIGHT * self.probe_wavenumber()
    }
}

/// One documented conversion step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conversion {
    pub quantity: &'static str,
    pub formula: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledParams {
    pub atom: AtomParams,
    pub control: ControlParams,
    pub env: EnvParams,
    pub conversions: Vec<Conversion>,
}

/// Dimensionless parameters for a laboratory configuration. All decay rates
/// come out as 1 (the lab description carries a single `gamma`) and the
/// control is sigma+ with `Delta = 0`.
pub fn scaled_from_lab(lab: &LabUnits) -> Result<ScaledParams> {
    lab.check()?;

    let omega_og = lab.probe_angular_frequency();
    let thermal = (BOLTZMANN * lab.temperature / (lab.mass * SPEED_OF_LIGHT.powi(2))).sqrt();
    let omega_d = omega_og * thermal / lab.gamma;

    let alpha_l = lab.probe_wavenumber() * lab.cell_length * lab.dipole_lower.powi(2)
        * lab.number_density
        / (EPSILON_0 * HBAR * lab.gamma);

    let field_tesla = lab.magnetic_field * GAUSS_TO_TESLA;
    let zeta = BOHR_MAGNETON * field_tesla / (2.0 * HBAR * lab.gamma);

    let intensity = lab.control_intensity * W_PER_CM2_TO_W_PER_M2;
    let amplitude = (intensity / (2.0 * SPEED_OF_LIGHT * EPSILON_0)).sqrt();
    let g1 = lab.dipole_upper * amplitude / (HBAR * lab.gamma);

    let conversions = vec![
        Conversion {
            quantity: "omega_og [rad/s]",
            formula: "2 pi c / lambda",
            value: omega_og,
        },
        Conversion {
            quantity: "omega_d [gamma]",
            formula: "omega_og sqrt(k_B T / (M c^2)) / gamma",
            value: omega_d,
        },
        Conversion {
            quantity: "alpha_l",
            formula: "k_p l |d|^2 n / (eps0 hbar gamma)",
            value: alpha_l,
        },
        Conversion {
            quantity: "zeta [gamma]",
            formula: "mu_B B / (2 hbar gamma)",
            value: zeta,
        },
        Conversion {
            quantity: "2 zeta [gamma]",
            formula: "mu_B B / (hbar gamma)",
            value: 2.0 * zeta,
        },
        Conversion {
            quantity: "|E_c| [V/m]",
            formula: "sqrt(I / (2 c eps0))",
            value: amplitude,
        },
        Conversion {
            quantity: "G1 [gamma]",
            formula: "D |E_c| / (hbar gamma)",
            value: g1,
        },
    ];

    Ok(ScaledParams {
        atom: AtomParams::uniform(1.0),
        control: ControlParams::sigma_plus(g1, 0.0),
        env: EnvParams {
            zeta,
            omega_d,
            alpha_l,
        },
        conversions,
    })
}

/// Inverse of [`scaled_from_lab`]: recovers temperature, density, field and
/// control intensity from the dimensionless values, taking the species,
/// cell length, dipoles and `gamma` from `template`.
pub fn lab_from_scaled(control: &ControlParams, env: &EnvParams, template: &LabUnits) -> Result<LabUnits> {
    template.check()?;
    let omega_og = template.probe_angular_frequency();

    let thermal = env.omega_d * template.gamma / omega_og;
    let temperature = thermal * thermal * template.mass * SPEED_OF_LIGHT.powi(2) / BOLTZMANN;

    let number_density = env.alpha_l * EPSILON_0 * HBAR * template.gamma
        / (template.probe_wavenumber() * template.cell_length * template.dipole_lower.powi(2));

    let magnetic_field = 2.0 * HBAR * template.gamma * env.zeta / BOHR_MAGNETON / GAUSS_TO_TESLA;

    let amplitude = control.g1.norm() * HBAR * template.gamma / template.dipole_upper;
    let control_intensity = 2.0 * SPEED_OF_LIGHT * EPSILON_0 * amplitude * amplitude / W_PER_CM2_TO_W_PER_M2;

    Ok(LabUnits {
        temperature,
        number_density,
        magnetic_field,
        control_intensity,
        ..*template
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn calcium_doppler_width_matches_direct_arithmetic() {
        let lab = LabUnits::calcium_40();
        let s = scaled_from_lab(&lab).unwrap();
        // sqrt(k T / M c^2) for M = 39.96 u at 500 K, times 2 pi c / lambda, over gamma.
        let m: f64 = 39.962_590_863 * 1.660_539_066_60e-27;
        let v = (1.380_649e-23 * 500.0 / m).sqrt();
        let expected = 2.0 * PI / 422.6727e-9 * v / 1.09e8;
        assert!(rel(s.env.omega_d, expected) < 1e-12);
        assert!((s.env.omega_d - 44.0).abs() < 0.1, "{}", s.env.omega_d);
    }

    #[test]
    fn zeeman_splitting_for_200_gauss() {
        let s = scaled_from_lab(&LabUnits::calcium_40()).unwrap();
        let two_zeta = 9.274_010_078_3e-24 * 0.02 / 1.054_571_817e-34 / 1.09e8;
        assert!(rel(2.0 * s.env.zeta, two_zeta) < 1e-12);
    }

    #[test]
    fn optical_depth_is_resonant_cross_section_times_column() {
        // With |d|^2 from A = 2 gamma, alpha l = 3 lambda^2/(2 pi) n l.
        let lab = LabUnits::calcium_40();
        let s = scaled_from_lab(&lab).unwrap();
        let sigma = 3.0 * lab.wavelength.powi(2) / (2.0 * PI);
        assert!(rel(s.env.alpha_l, sigma * lab.number_density * lab.cell_length) < 1e-12);
    }

    #[test]
    fn conversions_are_monotone() {
        let lab = LabUnits::calcium_40();
        let base = scaled_from_lab(&lab).unwrap();

        let hot = scaled_from_lab(&LabUnits { temperature: 2.0 * lab.temperature, ..lab }).unwrap();
        assert!(rel(hot.env.omega_d, 2f64.sqrt() * base.env.omega_d) < 1e-14);

        let dense = scaled_from_lab(&LabUnits { number_density: 2.0 * lab.number_density, ..lab }).unwrap();
        assert!(rel(dense.env.alpha_l, 2.0 * base.env.alpha_l) < 1e-14);

        let strong = scaled_from_lab(&LabUnits { magnetic_field: 2.0 * lab.magnetic_field, ..lab }).unwrap();
        assert!(rel(strong.env.zeta, 2.0 * base.env.zeta) < 1e-14);
    }

    #[test]
    fn round_trip_recovers_lab_inputs() {
        let lab = LabUnits {
            magnetic_field: -350.0,
            control_intensity: 12.5,
            ..LabUnits::calcium_40()
        };
        let s = scaled_from_lab(&lab).unwrap();
        let back = lab_from_scaled(&s.control, &s.env, &lab).unwrap();
        assert!(rel(back.temperature, lab.temperature) < 1e-12);
        assert!(rel(back.number_density, lab.number_density) < 1e-12);
        assert!(rel(back.magnetic_field, lab.magnetic_field) < 1e-12);
        assert!(rel(back.control_intensity, lab.control_intensity) < 1e-12);
    }

    #[test]
    fn non_positive_mass_is_a_domain_error() {
        for lab in [
            LabUnits { mass: 0.0, ..LabUnits::calcium_40() },
            LabUnits { temperature: -1.0, ..LabUnits::calcium_40() },
            LabUnits { wavelength: 0.0, ..LabUnits::calcium_40() },
        ] {
            assert!(matches!(scaled_from_lab(&lab), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn each_conversion_is_documented() {
        let s = scaled_from_lab(&LabUnits::calcium_40()).unwrap();
        assert!(s.conversions.iter().any(|c| c.quantity.starts_with("omega_d")));
        assert!(s.conversions.iter().all(|c| !c.formula.is_empty() && c.value.is_finite()));
    }
}
