//! The scaled complex error function
//!
//! ```text
//! W(z) = (i/pi) * Int e^{-t^2} / (z - t) dt = e^{-z^2} (1 - erf(-i z)),   Im z > 0
//! ```
//!
//! [`w`] is the production kernel; [`w_reference`] is a slower, independently
//! coded evaluation kept for accuracy tests.
//!
//! The kernel splits the upper half-plane with `rho^2 = (x/6.3)^2 + (y/4.4)^2`:
//!
//! * `rho^2 < 0.085264`: Maclaurin series `W(z) = sum (iz)^n / Gamma(n/2 + 1)`.
//! * `0.085264 <= rho^2 <= 1`: Gautschi's truncated Laplace continued fraction
//!   with a Taylor correction about `z + ih`.
//! * `rho^2 > 1`: plain Laplace continued fraction, depth `3 + 1442/(26 rho + 77)`.
//!
//! The region shapes and depths follow Poppe & Wijers (ACM TOMS 680).

mod reference;

pub use reference::w_reference;

use crate::{Error, Result, C64};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const ONE_OVER_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const X_SCALE: f64 = 6.3;
const Y_SCALE: f64 = 4.4;
const SERIES_RHO2: f64 = 0.085_264;
/// Beyond this modulus two asymptotic terms are exact to machine precision.
const ASYMPTOTIC_MODULUS: f64 = 1e8;

/// `W(z)` for `Im z > 0`, relative accuracy better than 1e-13 across the
/// half-plane.
pub fn w(z: C64) -> Result<C64> {
    check_upper_half_plane(z)?;
    Ok(w_unchecked(z))
}

pub(crate) fn check_upper_half_plane(z: C64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("W(z) needs a finite argument, got {z}")));
    }
    if z.im <= 0.0 {
        return Err(Error::Domain(format!(
            "W(z) is only implemented for Im z > 0, got {z}"
        )));
    }
    Ok(())
}

/// Same as [`w`] without the domain check. Callers guarantee `Im z > 0`.
pub(crate) fn w_unchecked(z: C64) -> C64 {
    let x = z.re.abs();
    let y = z.im;
    let folded = C64::new(x, y);

    let value = if folded.norm() > ASYMPTOTIC_MODULUS {
        asymptotic(folded)
    } else {
        let rho2 = (x / X_SCALE).powi(2) + (y / Y_SCALE).powi(2);
        if rho2 < SERIES_RHO2 {
            power_series(folded)
        } else if rho2 <= 1.0 {
            corrected_fraction(folded, rho2)
        } else {
            continued_fraction(folded, fraction_depth(rho2))
        }
    };

    // W(-conj z) = conj W(z)
    if z.re < 0.0 {
        value.conj()
    } else {
        value
    }
}

fn asymptotic(z: C64) -> C64 {
    let inv = z.inv();
    C64::i() * ONE_OVER_SQRT_PI * inv * (1.0 + 0.5 * inv * inv)
}

pub(crate) fn fraction_depth(rho2: f64) -> usize {
    (3.0 + 1442.0 / (26.0 * rho2.sqrt() + 77.0)) as usize
}

/// `sum_{n>=0} (iz)^n / Gamma(n/2 + 1)`, summed as interleaved even and odd
/// subsequences `t_{n+2} = t_n (iz)^2 / (n/2 + 1)`.
pub(crate) fn power_series(z: C64) -> C64 {
    let iz = C64::i() * z;
    let iz2 = iz * iz;
    let mut even = C64::new(1.0, 0.0);
    let mut odd = iz * TWO_OVER_SQRT_PI;
    let mut sum = even + odd;
    for k in 0..400 {
        let k = k as f64;
        even = even * iz2 / (k + 1.0);
        odd = odd * iz2 / (k + 1.5);
        sum += even + odd;
        if even.norm() + odd.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Laplace continued fraction `W = (i/sqrt(pi)) / (z - (1/2)/(z - 1/(z - ...)))`
/// truncated at `depth`, evaluated bottom-up. `z` must lie in the first quadrant.
pub(crate) fn continued_fraction(z: C64, depth: usize) -> C64 {
    let (x, y) = (z.re, z.im);
    let (mut rx, mut ry) = (0.0, 0.0);
    for n in (0..=depth).rev() {
        let np1 = (n + 1) as f64;
        let tx = y + np1 * rx;
        let ty = x - np1 * ry;
        let c = 0.5 / (tx * tx + ty * ty);
        rx = c * tx;
        ry = c * ty;
    }
    C64::new(rx, ry) * TWO_OVER_SQRT_PI
}

/// Gautschi's method: the fraction is evaluated at `z + ih` and the result is
/// carried back to `z` with a truncated Taylor series in `2h`.
pub(crate) fn corrected_fraction(z: C64, rho2: f64) -> C64 {
    let (x, y) = (z.re, z.im);
    let q = (1.0 - y / Y_SCALE) * (1.0 - rho2).max(0.0).sqrt();
    if q <= 0.0 {
        return continued_fraction(z, fraction_depth(rho2.max(1.0)));
    }
    let h = 1.88 * q;
    let two_h = 2.0 * h;
    let taylor_terms = (7.0 + 34.0 * q).round() as usize;
    let depth = (16.0 + 26.0 * q).round() as usize;

    let mut lambda = two_h.powi(taylor_terms as i32);
    let (mut rx, mut ry) = (0.0, 0.0);
    let (mut sx, mut sy) = (0.0, 0.0);
    for n in (0..=depth).rev() {
        let np1 = (n + 1) as f64;
        let tx = y + h + np1 * rx;
        let ty = x - np1 * ry;
        let c = 0.5 / (tx * tx + ty * ty);
        rx = c * tx;
        ry = c * ty;
        if n <= taylor_terms {
            let ax = lambda + sx;
            sx = rx * ax - ry * sy;
            sy = ry * ax + rx * sy;
            lambda /= two_h;
        }
    }
    C64::new(sx, sy) * TWO_OVER_SQRT_PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// (x, y, Re W, Im W) from 40-digit evaluation of e^{-z^2} erfc(-iz).
    pub(crate) const HIGH_PRECISION: [(f64, f64, f64, f64); 16] = [
        (0.0, 1.0, 0.427583576155807, 0.0),
        (0.5, 0.5, 0.533156707912175, 0.2304882313844584),
        (2.0, 0.0001, 0.018338810176746257, 0.34001888957638093),
        (3.0, 2.0, 0.09271076642644334, 0.12831696222826158),
        (4.2, 0.0141, 0.0004962655246293328, 0.1385188960894619),
        (5.5, 0.01, 0.0001966255964092446, 0.10436705873336245),
        (6.5, 0.001, 1.3858354049175767e-05, 0.0878644225161668),
        (10.0, 0.1, 0.0005728123649610698, 0.05669957702863536),
        (-3.0, 4.0, 0.09093390419476534, -0.06559233052791427),
        (0.0, 0.001, 0.9988726200811514, 0.0),
        (0.001, 0.001, 0.9988716223354113, 0.0011263806715998664),
        (100.0, 1.0, 5.6421779161441334e-05, 0.005641613670145867),
        (0.3, 5.9, 0.0940797011453672, 0.004655514211479918),
        (9998.000066665778, 199.9866669333308, 1.128303960237732e-06, 5.6407675220813226e-05),
        (1.8, 0.1, 0.06509912003474401, 0.37621389680632034),
        (6.0, 0.5, 0.008124885586462518, 0.09468791486012625),
    ];

    fn rel_err(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn matches_high_precision_values() {
        for &(x, y, re, im) in &HIGH_PRECISION {
            let got = w(C64::new(x, y)).unwrap();
            let e = rel_err(got, C64::new(re, im));
            assert!(e < 1e-13, "z = {x}+{y}i: rel err {e:e}");
        }
    }

    #[test]
    fn e_erfc_one_on_the_imaginary_axis() {
        let got = w(C64::new(0.0, 1.0)).unwrap();
        assert!((got.re - 0.427_583_576_155_807).abs() < 1e-15);
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn tends_to_one_at_the_origin() {
        let got = w(C64::new(0.0, 1e-300)).unwrap();
        assert!((got - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn large_argument_asymptote() {
        for &z in &[C64::new(3e3, 1.0), C64::new(-1e6, 10.0), C64::new(0.0, 5e9), C64::new(1e12, 1e-3)] {
            let lead = C64::i() / (PI.sqrt() * z);
            let got = w(z).unwrap();
            assert!(rel_err(got, lead) < 1.0 / z.norm_sqr(), "{z}");
        }
    }

    #[test]
    fn rejects_lower_half_plane_and_real_axis() {
        assert!(matches!(w(C64::new(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(w(C64::new(1.0, -1.0)), Err(Error::Domain(_))));
        assert!(matches!(w(C64::new(f64::NAN, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn series_and_corrected_fraction_agree_across_the_inner_boundary() {
        // Sample the band 0.06 <= rho^2 <= 0.11 around the series boundary.
        let mut worst: f64 = 0.0;
        for i in 0..60 {
            let theta = PI * (i as f64 + 0.5) / 120.0;
            for k in 0..6 {
                let rho = (0.06f64 + 0.01 * k as f64).sqrt();
                let z = C64::new(X_SCALE * rho * theta.cos(), Y_SCALE * rho * theta.sin());
                let rho2 = (z.re / X_SCALE).powi(2) + (z.im / Y_SCALE).powi(2);
                let a = power_series(z);
                let b = corrected_fraction(z, rho2);
                worst = worst.max(rel_err(a, b));
            }
        }
        assert!(worst < 1e-11, "worst {worst:e}");
    }

    #[test]
    fn corrected_and_plain_fraction_agree_across_the_outer_boundary() {
        let mut worst: f64 = 0.0;
        for i in 0..60 {
            let theta = PI * (i as f64 + 0.5) / 120.0;
            for k in 0..4 {
                let rho2 = 0.90 + 0.03 * k as f64;
                let z = C64::new(
                    X_SCALE * rho2.sqrt() * theta.cos(),
                    Y_SCALE * rho2.sqrt() * theta.sin(),
                );
                let a = corrected_fraction(z, rho2);
                let b = continued_fraction(z, fraction_depth(1.0));
                worst = worst.max(rel_err(a, b));
            }
        }
        assert!(worst < 1e-11, "worst {worst:e}");
    }
}
