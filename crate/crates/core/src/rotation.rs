//! Observables of the probe after the cell: output circular amplitudes,
//! crossed-polarizer transmission `T_y`, small-absorption rotation angle,
//! enhancement factor, regime labels and the maximal-rotation condition.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::Serialize;

use crate::susceptibility::SusceptibilityPair;
use crate::{Error, Result, C64};

/// `(E_out+, E_out-)` for unit input: `exp(i alpha_l/2 s) / sqrt(2)` per component.
pub fn output_field(s_plus: C64, s_minus: C64, alpha_l: f64) -> (C64, C64) {
    let phase = C64::new(0.0, 0.5 * alpha_l);
    ((phase * s_plus).exp() * FRAC_1_SQRT_2, (phase * s_minus).exp() * FRAC_1_SQRT_2)
}

/// `T_y = |exp(i alpha_l/2 s+) - exp(i alpha_l/2 s-)|^2 / 4`.
pub fn transmission_ty(s_plus: C64, s_minus: C64, alpha_l: f64) -> f64 {
    let (p, m) = output_field(s_plus, s_minus, alpha_l);
    0.5 * (p - m).norm_sqr()
}

/// Largest `alpha_l Im s` for which the dispersive angle is trusted.
pub const SMALL_ABSORPTION: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationAngle {
    /// Radians.
    pub theta: f64,
    /// Set when either component is not weakly absorbed.
    pub approximate: bool,
}

/// `theta = (alpha_l/4) Re(s- - s+)`.
pub fn rotation_angle(s_plus: C64, s_minus: C64, alpha_l: f64) -> RotationAngle {
    let theta = 0.25 * alpha_l * (s_minus.re - s_plus.re);
    let absorption = alpha_l * s_plus.im.max(s_minus.im);
    RotationAngle {
        theta,
        approximate: !(absorption < SMALL_ABSORPTION),
    }
}

/// Below this, a transmission is treated as zero when forming ratios.
pub const RATIO_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Enhancement {
    Ratio(f64),
    /// Control-off transmission vanished; both raw values kept.
    Infinite { ty_on: f64, ty_off: f64 },
}

impl Enhancement {
    pub fn value(&self) -> f64 {
        match self {
            Enhancement::Ratio(r) => *r,
            Enhancement::Infinite { .. } => f64::INFINITY,
        }
    }
}

/// `eta = T_y(control on) / T_y(control off)` at the same probe detuning.
pub fn enhancement_eta(ty_on: f64, ty_off: f64) -> Result<Enhancement> {
    if ty_off < RATIO_FLOOR {
        if ty_on < RATIO_FLOOR {
            return Err(Error::UndefinedRatio { ty_on, ty_off });
        }
        return Ok(Enhancement::Infinite { ty_on, ty_off });
    }
    Ok(Enhancement::Ratio(ty_on / ty_off))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Regime {
    Null,
    Dichroic,
    Birefringent,
    Attenuated,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Null => "NULL",
            Regime::Dichroic => "DICHROIC",
            Regime::Birefringent => "BIREFRINGENT",
            Regime::Attenuated => "ATTENUATED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeThresholds {
    /// `alpha_l Im s / 2` above which a component counts as absorbed.
    pub large: f64,
    /// `alpha_l Im s / 2` below which a component counts as transparent.
    pub small: f64,
    /// Relative difference below which two quantities count as equal.
    pub equal: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            large: 3.0,
            small: 0.3,
            equal: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeDecision {
    pub regime: Regime,
    /// `alpha_l Im s+ / 2`.
    pub absorption_plus: f64,
    /// `alpha_l Im s- / 2`.
    pub absorption_minus: f64,
    /// `alpha_l Re(s- - s+) / 2`.
    pub phase: f64,
    pub re_equal: bool,
    pub im_small: bool,
}

fn nearly_equal(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Label the mechanism behind the transmission at one detuning.
///
/// Rules, first match wins: `NULL` when `s+ ~ s-`; `ATTENUATED` when both
/// components are absorbed; `DICHROIC` when exactly one is absorbed or the
/// real parts agree; `BIREFRINGENT` otherwise.
pub fn classify_regime(
    s_plus: C64,
    s_minus: C64,
    alpha_l: f64,
    thresholds: &RegimeThresholds,
) -> RegimeDecision {
    let absorption_plus = 0.5 * alpha_l * s_plus.im;
    let absorption_minus = 0.5 * alpha_l * s_minus.im;
    let phase = 0.5 * alpha_l * (s_minus.re - s_plus.re);
    let re_equal = nearly_equal(s_plus.re, s_minus.re, thresholds.equal);
    let im_small = absorption_plus < thresholds.small && absorption_minus < thresholds.small;

    let scale = s_plus.norm().max(s_minus.norm());
    let plus_large = absorption_plus > thresholds.large;
    let minus_large = absorption_minus > thresholds.large;
    let regime = if (s_plus - s_minus).norm() <= thresholds.equal * scale {
        Regime::Null
    } else if plus_large && minus_large {
        Regime::Attenuated
    } else if plus_large != minus_large || re_equal {
        Regime::Dichroic
    } else {
        Regime::Birefringent
    };
    RegimeDecision {
        regime,
        absorption_plus,
        absorption_minus,
        phase,
        re_equal,
        im_small,
    }
}

/// `(alpha_l/2) Re(s- - s+) - (2n+1) pi`.
pub fn condition_residual(pair: &SusceptibilityPair, alpha_l: f64, n: u32) -> f64 {
    0.5 * alpha_l * (pair.s_minus.re - pair.s_plus.re) - (2 * n + 1) as f64 * PI
}

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-6;

/// All roots of the maximal-rotation residual in `[lo, hi]`, ascending.
///
/// `pair_at` evaluates the (averaged) susceptibilities at a scan value; the
/// range is sampled at `samples` uniform points and every sign change is
/// refined by bisection.
pub fn solve_condition<F>(pair_at: F, lo: f64, hi: f64, samples: usize, alpha_l: f64, n: u32) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<SusceptibilityPair>,
{
    if !(lo < hi) || samples < 2 {
        return Err(Error::Sweep(format!(
            "root scan needs lo < hi and at least two samples (got [{lo}, {hi}], {samples})"
        )));
    }
    let residual = |x: f64| -> Result<f64> {
        pair_at(x)
            .map(|p| condition_residual(&p, alpha_l, n))
            .map_err(|e| Error::AtScanValue { value: x, source: Box::new(e) })
    };
    let step = (hi - lo) / (samples - 1) as f64;
    let xs: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { hi } else { lo + step * i as f64 }).collect();
    let rs = xs.iter().map(|&x| residual(x)).collect::<Result<Vec<_>>>()?;

    let mut roots = Vec::new();
    for i in 0..samples {
        if rs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 == samples || rs[i + 1] == 0.0 || rs[i].signum() == rs[i + 1].signum() {
            continue;
        }
        let (mut a, mut b, mut ra) = (xs[i], xs[i + 1], rs[i]);
        while b - a > ROOT_TOLERANCE {
            let mid = 0.5 * (a + b);
            let rm = residual(mid)?;
            if rm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if rm.signum() == ra.signum() {
                a = mid;
                ra = rm;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    if roots.is_empty() {
        return Err(Error::NoRoot { lo, hi });
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doppler::{avg_s_minus, avg_s_plus};
    use crate::params::AtomParams;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pair(s_plus: C64, s_minus: C64) -> SusceptibilityPair {
        SusceptibilityPair::stationary(s_plus, s_minus, false)
    }

    #[test]
    fn empty_cell_passes_unchanged() {
        let (p, m) = output_field(c(0.3, 0.2), c(-1.0, 4.0), 0.0);
        assert!((p - FRAC_1_SQRT_2).norm() < 1e-16);
        assert!((m - FRAC_1_SQRT_2).norm() < 1e-16);
        assert_eq!(transmission_ty(c(0.3, 0.2), c(-1.0, 4.0), 0.0), 0.0);
    }

    #[test]
    fn isotropic_absorption_keeps_polarization() {
        let beta = 0.02;
        let (p, m) = output_field(c(0.0, beta), c(0.0, beta), 300.0);
        let expected = (-300.0 * beta / 2.0).exp() * FRAC_1_SQRT_2;
        assert!((p.re - expected).abs() < 1e-16 && (m.re - expected).abs() < 1e-16);
        assert_eq!(transmission_ty(c(0.0, beta), c(0.0, beta), 300.0), 0.0);
    }

    #[test]
    fn pure_birefringence_is_a_phase() {
        let r = 0.004;
        let (p, m) = output_field(c(r, 0.0), c(0.0, 0.0), 300.0);
        assert!(((p / m).arg() - 300.0 * r / 2.0).abs() < 1e-15);
    }

    #[test]
    fn transmission_limits() {
        // dichroism only: one component fully absorbed
        let t = transmission_ty(c(0.0, 1.0), c(0.0, 0.0), 300.0);
        assert!((t - 0.25).abs() < 1e-15);
        // half-wave phase difference
        let t = transmission_ty(c(0.0, 0.0), c(2.0 * PI / 300.0, 0.0), 300.0);
        assert!((t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_angle_examples() {
        assert_eq!(rotation_angle(c(0.1, 0.0), c(0.1, 0.0), 300.0).theta, 0.0);
        let r = rotation_angle(c(0.0, 0.0), c(PI / 75.0, 0.0), 300.0);
        assert!((r.theta - PI).abs() < 1e-14);
        assert!(!r.approximate);
        assert!(rotation_angle(c(0.0, 0.01), c(0.0, 0.0), 300.0).approximate);
    }

    #[test]
    fn small_angle_matches_transmission() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let alpha_l = rng.gen_range(1.0..1000.0);
            let d = rng.gen_range(-0.6..0.6) / alpha_l;
            let base = rng.gen_range(-1.0..1.0);
            let (sp, sm) = (c(base, 0.0), c(base + d, 0.0));
            let theta = rotation_angle(sp, sm, alpha_l).theta;
            let t = transmission_ty(sp, sm, alpha_l);
            assert!((theta.sin().powi(2) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn eta_cases() {
        assert_eq!(enhancement_eta(0.3, 0.3).unwrap(), Enhancement::Ratio(1.0));
        assert_eq!(enhancement_eta(0.1, 1e-4).unwrap().value(), 1e3);
        let inf = enhancement_eta(0.1, 0.0).unwrap();
        assert_eq!(inf, Enhancement::Infinite { ty_on: 0.1, ty_off: 0.0 });
        assert!(inf.value().is_infinite());
        assert!(matches!(enhancement_eta(0.0, 0.0), Err(Error::UndefinedRatio { .. })));
    }

    #[test]
    fn regime_labels() {
        let th = RegimeThresholds::default();
        assert_eq!(classify_regime(c(0.1, 0.02), c(0.1, 0.02), 300.0, &th).regime, Regime::Null);
        // both strongly absorbed
        assert_eq!(classify_regime(c(0.0, 0.5), c(0.3, 0.1), 300.0, &th).regime, Regime::Attenuated);
        // one absorbed, real parts equal
        let d = classify_regime(c(0.01, 0.5), c(0.01, 0.0001), 300.0, &th);
        assert_eq!(d.regime, Regime::Dichroic);
        assert!(d.re_equal);
        // transparent, different real parts
        let d = classify_regime(c(0.0, 0.0001), c(0.01, 0.0001), 300.0, &th);
        assert_eq!(d.regime, Regime::Birefringent);
        assert!(d.im_small);
        assert!((d.phase - 1.5).abs() < 1e-12);
    }

    #[test]
    fn no_optical_depth_means_no_root() {
        let r = solve_condition(|_| Ok(pair(c(0.0, 0.0), c(1.0, 0.0))), 0.0, 1.0, 11, 0.0, 0);
        assert!(matches!(r, Err(Error::NoRoot { .. })));
    }

    #[test]
    fn roots_come_back_ascending() {
        // residual 150 sin(x) - pi has two roots in (0, pi)
        let f = |x: f64| Ok(pair(c(0.0, 0.0), c(x.sin(), 0.0)));
        let roots = solve_condition(f, 0.0, PI, 101, 300.0, 0).unwrap();
        assert_eq!(roots.len(), 2);
        let x0 = (PI / 150.0).asin();
        assert!((roots[0] - x0).abs() < 1e-6);
        assert!((roots[1] - (PI - x0)).abs() < 1e-6);
    }

    #[test]
    fn errors_carry_the_scan_value() {
        let f = |x: f64| if x > 0.5 { Err(Error::DegenerateWidth(0.0)) } else { Ok(pair(c(0.0, 0.0), c(0.0, 0.0))) };
        let r = solve_condition(f, 0.0, 1.0, 5, 1.0, 0);
        assert!(matches!(r, Err(Error::AtScanValue { value, .. }) if value == 0.75));
    }

    proptest! {
        #[test]
        fn transmission_is_bounded_and_swap_invariant(
            a in -5.0..5.0f64, b in 0.0..5.0f64,
            cc in -5.0..5.0f64, d in 0.0..5.0f64,
            alpha_l in 0.0..5000.0f64,
        ) {
            let t = transmission_ty(c(a, b), c(cc, d), alpha_l);
            prop_assert!((0.0..=1.0).contains(&t));
            prop_assert_eq!(t, transmission_ty(c(cc, d), c(a, b), alpha_l));
        }

        #[test]
        fn no_control_mirror_in_detuning_and_field(
            zeta in -40.0..40.0f64, delta in -300.0..300.0f64, omega_d in 1.0..100.0f64,
        ) {
            let a = AtomParams::default();
            let zero = c(0.0, 0.0);
            let t = |zeta: f64, delta: f64| {
                let p = avg_s_plus(&a, zero, 0.0, zeta, delta, omega_d).unwrap();
                let m = avg_s_minus(&a, zeta, delta, omega_d).unwrap();
                transmission_ty(p, m, 300.0)
            };
            prop_assert!((t(zeta, delta) - t(-zeta, -delta)).abs() < 1e-12);
        }

        #[test]
        fn transparent_roots_transmit(slope in 0.001..0.1f64, offset in -0.5..0.5f64, eps in 0.0..1.0f64) {
            let alpha_l = 300.0;
            let leak = eps * 1e-3 * 2.0 / alpha_l;
            let family = |x: f64| Ok(pair(c(offset, leak), c(offset + slope * x, leak * 0.5)));
            if let Ok(roots) = solve_condition(family, 0.0, 10.0, 50, alpha_l, 0) {
                for x in roots {
                    let p = family(x).unwrap();
                    prop_assert!(transmission_ty(p.s_plus, p.s_minus, alpha_l) >= 0.95);
                }
            }
        }
    }
}
