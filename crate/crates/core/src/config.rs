//! TOML run configuration.
//!
//! ```toml
//! [atom]      # gamma_1, gamma_2, gamma_o, Gamma_1, Gamma_2, Gamma_o (default 1)
//! [control]   # G1 (number or [re, im], default 100), G2 (default 0), Delta (default 0)
//! [env]       # zeta (10), omega_d (50), alpha_l (300)
//! [lab]       # LabUnits fields in SI, gauss and W/cm^2; `mass_u` in atomic mass units
//! [sweep]     # variable, lo, hi, points, delta, control, two_photon, field
//! ```
//!
//! Every key is optional. When a preset is given its values are the base and
//! the file overrides them; otherwise missing keys take the defaults above and
//! each substitution is reported as a note.

use std::path::Path;

use serde::Deserialize;

use crate::params::{validate, AtomParams, ControlParams, EnvParams, ParamBundle};
use crate::scan::{preset, FigureId, ScanVariable, SweepFlags, SweepSpec, DEFAULT_POINTS};
use crate::units::{LabUnits, ATOMIC_MASS_UNIT};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn to_c64(self) -> C64 {
        match self {
            ComplexValue::Real(re) => C64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    pub gamma_1: Option<f64>,
    pub gamma_2: Option<f64>,
    pub gamma_o: Option<f64>,
    #[serde(rename = "Gamma_1")]
    pub upper_gamma_1: Option<f64>,
    #[serde(rename = "Gamma_2")]
    pub upper_gamma_2: Option<f64>,
    #[serde(rename = "Gamma_o")]
    pub upper_gamma_o: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(rename = "G1")]
    pub g1: Option<ComplexValue>,
    #[serde(rename = "G2")]
    pub g2: Option<ComplexValue>,
    #[serde(rename = "Delta")]
    pub detuning: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSection {
    pub zeta: Option<f64>,
    pub omega_d: Option<f64>,
    pub alpha_l: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabSection {
    pub temperature: Option<f64>,
    pub mass: Option<f64>,
    pub mass_u: Option<f64>,
    pub cell_length: Option<f64>,
    pub number_density: Option<f64>,
    pub magnetic_field: Option<f64>,
    pub control_intensity: Option<f64>,
    pub wavelength: Option<f64>,
    pub dipole_lower: Option<f64>,
    pub dipole_upper: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: Option<String>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub points: Option<usize>,
    pub delta: Option<f64>,
    pub control: Option<bool>,
    pub two_photon: Option<bool>,
    pub field: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub atom: AtomSection,
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub env: EnvSection,
    pub lab: Option<LabSection>,
    #[serde(default)]
    pub sweep: SweepSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().trim().to_string();
            match e.span() {
                Some(span) => Error::Config(format!("line {}: {message}", line_of(text, span.start))),
                None => Error::Config(message),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Sweep specification with the file applied over `base` (a preset) or
    /// over the defaults. Returns the spec and one note per defaulted key.
    pub fn resolve(&self, base: Option<FigureId>) -> Result<(SweepSpec, Vec<String>)> {
        let mut notes = Vec::new();
        let fallback = default_spec();
        let start = base.map(preset).unwrap_or(fallback);
        let noting = base.is_none();
        let mut pick = |key: &str, value: Option<f64>, from_base: f64| -> f64 {
            value.unwrap_or_else(|| {
                if noting {
                    notes.push(format!("{key} not set, default {from_base} applied"));
                }
                from_base
            })
        };

        let a = &start.params.atom;
        let atom = AtomParams {
            gamma_1: pick("atom.gamma_1", self.atom.gamma_1, a.gamma_1),
            gamma_2: pick("atom.gamma_2", self.atom.gamma_2, a.gamma_2),
            gamma_o: pick("atom.gamma_o", self.atom.gamma_o, a.gamma_o),
            upper_gamma_1: pick("atom.Gamma_1", self.atom.upper_gamma_1, a.upper_gamma_1),
            upper_gamma_2: pick("atom.Gamma_2", self.atom.upper_gamma_2, a.upper_gamma_2),
            upper_gamma_o: pick("atom.Gamma_o", self.atom.upper_gamma_o, a.upper_gamma_o),
        };
        let c = &start.params.control;
        let mut pick_complex = |key: &str, value: Option<ComplexValue>, from_base: C64| {
            pick(key, value.map(|v| v.to_c64().re), from_base.re);
            value.map(ComplexValue::to_c64).unwrap_or(from_base)
        };
        let control = ControlParams {
            g1: pick_complex("control.G1", self.control.g1, c.g1),
            g2: pick_complex("control.G2", self.control.g2, c.g2),
            detuning: pick("control.Delta", self.control.detuning, c.detuning),
        };
        let e = &start.params.env;
        let env = EnvParams {
            zeta: pick("env.zeta", self.env.zeta, e.zeta),
            omega_d: pick("env.omega_d", self.env.omega_d, e.omega_d),
            alpha_l: pick("env.alpha_l", self.env.alpha_l, e.alpha_l),
        };
        let params: ParamBundle = validate(atom, control, env)?;

        let s = &self.sweep;
        let variable = match &s.variable {
            Some(v) => v.parse::<ScanVariable>().map_err(|_| {
                Error::Config(format!("sweep.variable: expected delta, zeta or G1, got `{v}`"))
            })?,
            None => start.variable,
        };
        // a different scan variable invalidates the base range
        let (lo0, hi0) = if variable == start.variable {
            (start.lo, start.hi)
        } else {
            default_range(variable)
        };
        let spec = SweepSpec {
            variable,
            lo: s.lo.unwrap_or(lo0),
            hi: s.hi.unwrap_or(hi0),
            points: s.points.unwrap_or(start.points),
            params,
            delta: s.delta.unwrap_or(start.delta),
            flags: SweepFlags {
                control: s.control.unwrap_or(start.flags.control),
                two_photon: s.two_photon.unwrap_or(start.flags.two_photon),
                field: s.field.unwrap_or(start.flags.field),
            },
        };
        spec.check().map_err(|e| Error::Config(format!("[sweep]: {e}")))?;
        Ok((spec, notes))
    }

    /// Laboratory description: the `[lab]` section over the 40Ca preset.
    pub fn lab_units(&self) -> Result<LabUnits> {
        let mut lab = LabUnits::calcium_40();
        let Some(s) = &self.lab else {
            return Ok(lab);
        };
        if s.mass.is_some() && s.mass_u.is_some() {
            return Err(Error::Config("lab: give either `mass` (kg) or `mass_u`, not both".into()));
        }
        let fields = [
            (&mut lab.temperature, s.temperature),
            (&mut lab.mass, s.mass.or(s.mass_u.map(|u| u * ATOMIC_MASS_UNIT))),
            (&mut lab.cell_length, s.cell_length),
            (&mut lab.number_density, s.number_density),
            (&mut lab.magnetic_field, s.magnetic_field),
            (&mut lab.control_intensity, s.control_intensity),
            (&mut lab.wavelength, s.wavelength),
            (&mut lab.dipole_lower, s.dipole_lower),
            (&mut lab.dipole_upper, s.dipole_upper),
            (&mut lab.gamma, s.gamma),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        Ok(lab)
    }
}

fn default_range(variable: ScanVariable) -> (f64, f64) {
    match variable {
        ScanVariable::Delta => (-300.0, 300.0),
        ScanVariable::Zeta => (-60.0, 60.0),
        ScanVariable::G1 => (0.0, 200.0),
    }
}

/// Defaults used when neither preset nor file sets a value.
pub fn default_spec() -> SweepSpec {
    SweepSpec {
        variable: ScanVariable::Delta,
        lo: -300.0,
        hi: 300.0,
        points: DEFAULT_POINTS,
        params: ParamBundle {
            atom: AtomParams::default(),
            control: ControlParams::sigma_plus(100.0, 0.0),
            env: EnvParams::default(),
        },
        delta: 0.0,
        flags: SweepFlags::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults_with_notes() {
        let (spec, notes) = Config::parse("").unwrap().resolve(None).unwrap();
        assert_eq!(spec, default_spec());
        assert!(notes.iter().any(|n| n.contains("env.omega_d") && n.contains("50")));
    }

    #[test]
    fn missing_omega_d_is_noted() {
        let text = "[env]\nzeta = 5\nalpha_l = 100\n";
        let (spec, notes) = Config::parse(text).unwrap().resolve(None).unwrap();
        assert_eq!(spec.params.env.omega_d, 50.0);
        assert_eq!(spec.params.env.zeta, 5.0);
        assert!(notes.iter().any(|n| n.starts_with("env.omega_d")));
        assert!(!notes.iter().any(|n| n.starts_with("env.zeta")));
    }

    #[test]
    fn complex_rabi_amplitudes() {
        let text = "[control]\nG1 = [3.0, -4.0]\nG2 = 2\nDelta = -7.5\n";
        let (spec, _) = Config::parse(text).unwrap().resolve(None).unwrap();
        assert_eq!(spec.params.control.g1, C64::new(3.0, -4.0));
        assert_eq!(spec.params.control.g2, C64::new(2.0, 0.0));
        assert_eq!(spec.params.control.detuning, -7.5);
    }

    #[test]
    fn preset_values_can_be_overridden() {
        let text = "[env]\nalpha_l = 1000\n[sweep]\npoints = 11\n";
        let (spec, notes) = Config::parse(text).unwrap().resolve(Some(FigureId::Fig4)).unwrap();
        assert_eq!(spec.params.env.alpha_l, 1000.0);
        assert_eq!(spec.params.env.zeta, 20.0);
        assert_eq!(spec.points, 11);
        assert!(notes.is_empty());
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = "[env]\nzeta = 1\nomega = 3\n";
        let Err(Error::Config(m)) = Config::parse(text) else {
            panic!("expected config error")
        };
        assert!(m.contains("line 3"), "{m}");
        assert!(m.contains("omega"), "{m}");
    }

    #[test]
    fn wrong_type_reports_line() {
        let text = "[sweep]\n\npoints = \"many\"\n";
        let Err(Error::Config(m)) = Config::parse(text) else {
            panic!("expected config error")
        };
        assert!(m.contains("line 3"), "{m}");
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let text = "[atom]\nGamma_1 = 0\n";
        assert!(matches!(Config::parse(text).unwrap().resolve(None), Err(Error::Validation(_))));
        let text = "[sweep]\nlo = 1\nhi = 1\n";
        assert!(matches!(Config::parse(text).unwrap().resolve(None), Err(Error::Config(_))));
    }

    #[test]
    fn changing_scan_variable_resets_range() {
        let text = "[sweep]\nvariable = \"zeta\"\ndelta = -250\n";
        let (spec, _) = Config::parse(text).unwrap().resolve(Some(FigureId::Fig4)).unwrap();
        assert_eq!((spec.lo, spec.hi), (-60.0, 60.0));
        assert_eq!(spec.delta, -250.0);
    }

    #[test]
    fn lab_section_overrides_calcium() {
        let text = "[lab]\ntemperature = 1000\nmass_u = 40\n";
        let lab = Config::parse(text).unwrap().lab_units().unwrap();
        assert_eq!(lab.temperature, 1000.0);
        assert!((lab.mass / ATOMIC_MASS_UNIT - 40.0).abs() < 1e-12);
        assert_eq!(lab.cell_length, LabUnits::calcium_40().cell_length);

        let both = "[lab]\nmass = 1e-25\nmass_u = 40\n";
        assert!(Config::parse(both).unwrap().lab_units().is_err());
    }
}
