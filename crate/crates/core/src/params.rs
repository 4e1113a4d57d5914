//! Dimensionless parameter bundles. Every frequency is in units of `gamma`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Decay half-rates of the ladder. The lower levels `|1>, |o>, |2>` decay to
/// `|g>` at `2 gamma_i`, the upper level `|e>` decays to `|i>` at `2 Gamma_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_o: f64,
    #[serde(rename = "Gamma_1")]
    pub upper_gamma_1: f64,
    #[serde(rename = "Gamma_2")]
    pub upper_gamma_2: f64,
    #[serde(rename = "Gamma_o")]
    pub upper_gamma_o: f64,
}

impl AtomParams {
    /// All six half-rates equal to `rate`.
    pub fn uniform(rate: f64) -> Self {
        Self {
            gamma_1: rate,
            gamma_2: rate,
            gamma_o: rate,
            upper_gamma_1: rate,
            upper_gamma_2: rate,
            upper_gamma_o: rate,
        }
    }

    /// Lower rates all equal to `gamma`, upper rates as given.
    pub fn with_lower(gamma: f64, upper: [f64; 3]) -> Self {
        Self {
            gamma_1: gamma,
            gamma_2: gamma,
            gamma_o: gamma,
            upper_gamma_o: upper[0],
            upper_gamma_1: upper[1],
            upper_gamma_2: upper[2],
        }
    }

    /// Total decay half-rate of the upper level, `Gamma_o + Gamma_1 + Gamma_2`.
    pub fn gamma_sum(&self) -> f64 {
        self.upper_gamma_o + self.upper_gamma_1 + self.upper_gamma_2
    }

    fn named_rates(&self) -> [(&'static str, f64, bool); 6] {
        [
            ("gamma_1", self.gamma_1, false),
            ("gamma_2", self.gamma_2, false),
            ("gamma_o", self.gamma_o, false),
            ("Gamma_1", self.upper_gamma_1, true),
            ("Gamma_2", self.upper_gamma_2, true),
            ("Gamma_o", self.upper_gamma_o, true),
        ]
    }
}

impl Default for AtomParams {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

/// Control field: Rabi amplitudes on `|1> <-> |e>` (`G1`) and `|2> <-> |e>`
/// (`G2`), and the control detuning `Delta = w_eo - w_c`.
///
/// `g2 == 0` is the sigma+ polarized control configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlParams {
    pub g1: C64,
    pub g2: C64,
    pub detuning: f64,
}

impl ControlParams {
    /// sigma+ control with real Rabi amplitude `g1`.
    pub fn sigma_plus(g1: f64, detuning: f64) -> Self {
        Self {
            g1: C64::new(g1, 0.0),
            g2: C64::new(0.0, 0.0),
            detuning,
        }
    }

    pub fn off() -> Self {
        Self::default()
    }

    pub fn is_sigma_plus(&self) -> bool {
        self.g2.norm_sqr() == 0.0
    }
}

/// Magnetic field, Doppler width and optical depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvParams {
    /// Zeeman half-splitting; negative for a reversed field.
    pub zeta: f64,
    /// Gaussian standard deviation of `delta_v`; zero means stationary atoms.
    pub omega_d: f64,
    /// Line-center optical depth of the probe.
    pub alpha_l: f64,
}

impl Default for EnvParams {
    fn default() -> Self {
        Self {
            zeta: 10.0,
            omega_d: 50.0,
            alpha_l: 300.0,
        }
    }
}

/// Probe detuning `delta = w_og - w_p` and its velocity-shifted value
/// `delta_v = delta + k_p v_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub delta: f64,
    pub delta_v: f64,
}

impl ProbePoint {
    pub fn stationary(delta: f64) -> Self {
        Self {
            delta,
            delta_v: delta,
        }
    }

    pub fn moving(delta: f64, doppler_shift: f64) -> Self {
        Self {
            delta,
            delta_v: delta + doppler_shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveRate { name: &'static str, value: f64, upper: bool },
    NegativeDopplerWidth(f64),
    NegativeOpticalDepth(f64),
    NonFinite(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveRate { name, value, upper } => {
                let which = if *upper { "upper" } else { "lower" };
                write!(f, "{which} decay must be positive ({name} = {value})")
            }
            Violation::NegativeDopplerWidth(v) => {
                write!(f, "Doppler width must be non-negative (omega_d = {v})")
            }
            Violation::NegativeOpticalDepth(v) => {
                write!(f, "optical depth must be non-negative (alpha_l = {v})")
            }
            Violation::NonFinite(name) => write!(f, "{name} must be finite"),
        }
    }
}

/// A validated set of parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBundle {
    pub atom: AtomParams,
    pub control: ControlParams,
    pub env: EnvParams,
}

impl ParamBundle {
    pub fn new(atom: AtomParams, control: ControlParams, env: EnvParams) -> Result<Self> {
        validate(atom, control, env)
    }
}

/// Check every invariant and report all violations at once.
pub fn validate(atom: AtomParams, control: ControlParams, env: EnvParams) -> Result<ParamBundle> {
    let mut violations = Vec::new();

    for (name, value, upper) in atom.named_rates() {
        if !value.is_finite() {
            violations.push(Violation::NonFinite(name));
        } else if value <= 0.0 {
            violations.push(Violation::NonPositiveRate { name, value, upper });
        }
    }

    let control_values = [
        ("G1", control.g1.re),
        ("G1", control.g1.im),
        ("G2", control.g2.re),
        ("G2", control.g2.im),
        ("Delta", control.detuning),
    ];
    for (name, v) in control_values {
        if !v.is_finite() && !violations.contains(&Violation::NonFinite(name)) {
            violations.push(Violation::NonFinite(name));
        }
    }

    if !env.zeta.is_finite() {
        violations.push(Violation::NonFinite("zeta"));
    }
    if !env.omega_d.is_finite() {
        violations.push(Violation::NonFinite("omega_d"));
    } else if env.omega_d < 0.0 {
        violations.push(Violation::NegativeDopplerWidth(env.omega_d));
    }
    if !env.alpha_l.is_finite() {
        violations.push(Violation::NonFinite("alpha_l"));
    } else if env.alpha_l < 0.0 {
        violations.push(Violation::NegativeOpticalDepth(env.alpha_l));
    }

    if violations.is_empty() {
        Ok(ParamBundle { atom, control, env })
    } else {
        Err(Error::Validation(violations))
    }
}
