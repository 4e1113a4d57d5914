//! Slow reference evaluation of `W(z)`.
//!
//! For `|z| <= 6` the Maclaurin series is summed in double-double arithmetic
//! (about 32 significant digits), which absorbs the `e^{|z|^2}` cancellation
//! of the alternating terms. For `|z| > 6` and `Im z >= 1` the Laplace
//! continued fraction is iterated forward with the modified Lentz method
//! until successive convergents agree. Close to the real axis that fraction
//! converges far too slowly, so the defining integral is evaluated directly
//! with the pole subtracted:
//!
//! ```text
//! W(z) = (i/pi) [ Int_{-L}^{L} (e^{-t^2} - e^{-z^2}) / (z - t) dt + e^{-z^2} log((z + L)/(z - L)) ]
//! ```

use crate::{Error, Result, C64};

use super::check_upper_half_plane;

const SERIES_RADIUS: f64 = 6.0;
const SERIES_BUDGET: usize = 4000;
const FRACTION_BUDGET: usize = 20_000;
const FRACTION_TOL: f64 = 1e-15;
const FRACTION_ACCEPT: f64 = 1e-14;

/// Reference `W(z)` for `Im z > 0`.
pub fn w_reference(z: C64) -> Result<C64> {
    check_upper_half_plane(z)?;
    if z.norm() <= SERIES_RADIUS {
        series_dd(z)
    } else if z.im >= FRACTION_MIN_IM {
        lentz_fraction(z)
    } else {
        Ok(subtracted_integral(z))
    }
}

const FRACTION_MIN_IM: f64 = 1.0;
/// `e^{-L^2}` is below 1e-35.
const INTEGRAL_HALF_RANGE: f64 = 9.0;
const INTEGRAL_PANELS: usize = 288;

fn subtracted_integral(z: C64) -> C64 {
    let ez = (-z * z).exp();
    let rule = crate::quadrature::legendre16();
    let l = INTEGRAL_HALF_RANGE;
    let width = 2.0 * l / INTEGRAL_PANELS as f64;
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..INTEGRAL_PANELS {
        let mid = -l + width * (k as f64 + 0.5);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = mid + 0.5 * width * x;
            sum += (C64::from((-t * t).exp()) - ez) / (z - t) * (0.5 * width * w);
        }
    }
    let log_term = ez * ((z + l) / (z - l)).ln();
    C64::i() / std::f64::consts::PI * (sum + log_term)
}

fn series_dd(z: C64) -> Result<C64> {
    // (iz) and (iz)^2 in double-double
    let iz = Cdd::new(Dd::from(-z.im), Dd::from(z.re));
    let iz2 = iz.mul(iz);
    let mut even = Cdd::new(Dd::from(1.0), Dd::ZERO);
    let mut odd = iz.mul(Cdd::new(TWO_OVER_SQRT_PI, Dd::ZERO));
    let mut sum = even.add(odd);
    // terms keep growing until n ~ |z|^2
    let peak = z.norm_sqr();
    for k in 0..SERIES_BUDGET {
        let kf = k as f64;
        even = even.mul(iz2).div_f64(kf + 1.0);
        odd = odd.mul(iz2).div_f64(kf + 1.5);
        sum = sum.add(even);
        sum = sum.add(odd);
        let size = even.approx_norm() + odd.approx_norm();
        if kf > peak && size <= 1e-34 * sum.approx_norm().max(1e-300) {
            return Ok(sum.to_c64());
        }
    }
    Err(Error::NonConvergence {
        what: "reference W series",
        iterations: SERIES_BUDGET,
        last_change: (even.approx_norm() + odd.approx_norm()) / sum.approx_norm(),
    })
}

/// `W = (i/sqrt(pi)) f`, `f = 1/(z + a_2/(z + a_3/(z + ...)))`, `a_n = -(n-1)/2`.
fn lentz_fraction(z: C64) -> Result<C64> {
    const TINY: f64 = 1e-300;
    // state after the first level: C_1 is effectively infinite
    let mut f = z.inv();
    let mut c = C64::new(1.0 / TINY, 0.0);
    let mut d = z.inv();
    let mut best = (f64::INFINITY, f);
    for n in 2..FRACTION_BUDGET {
        let a = -((n - 1) as f64) / 2.0;
        d = z + d * a;
        if d.norm() < TINY {
            d = C64::new(TINY, 0.0);
        }
        c = z + a / c;
        if c.norm() < TINY {
            c = C64::new(TINY, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        let change = (delta - 1.0).norm();
        if change < best.0 {
            best = (change, f);
        }
        if change < FRACTION_TOL {
            return Ok(C64::i() * ONE_OVER_SQRT_PI * f);
        }
    }
    if best.0 < FRACTION_ACCEPT {
        Ok(C64::i() * ONE_OVER_SQRT_PI * best.1)
    } else {
        Err(Error::NonConvergence {
            what: "reference W continued fraction",
            iterations: FRACTION_BUDGET,
            last_change: best.0,
        })
    }
}

const ONE_OVER_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const TWO_OVER_SQRT_PI: Dd = Dd {
    hi: std::f64::consts::FRAC_2_SQRT_PI,
    lo: 1.533_545_961_316_588e-17,
};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p1, p2) = two_prod(q1, b);
        let (s, e) = two_sum(self.hi, -p1);
        let e = e + self.lo - p2;
        let q2 = (s + e) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    fn new(re: Dd, im: Dd) -> Self {
        Cdd { re, im }
    }

    fn add(self, o: Cdd) -> Cdd {
        Cdd::new(self.re.add(o.re), self.im.add(o.im))
    }

    fn mul(self, o: Cdd) -> Cdd {
        Cdd::new(
            self.re.mul(o.re).sub(self.im.mul(o.im)),
            self.re.mul(o.im).add(self.im.mul(o.re)),
        )
    }

    fn div_f64(self, b: f64) -> Cdd {
        Cdd::new(self.re.div_f64(b), self.im.div_f64(b))
    }

    fn approx_norm(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_keeps_the_low_part() {
        let third = Dd::from(1.0).div_f64(3.0);
        let back = third.mul(Dd::from(3.0)).sub(Dd::from(1.0));
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn reference_matches_high_precision_values() {
        for &(x, y, re, im) in &crate::faddeeva::tests::HIGH_PRECISION {
            let z = C64::new(x, y);
            let got = w_reference(z).unwrap();
            let e = (got - C64::new(re, im)).norm() / C64::new(re, im).norm();
            assert!(e < 1e-14, "z = {z}: rel err {e:e}");
        }
    }

    #[test]
    fn reference_at_origin_limit() {
        let got = w_reference(C64::new(0.0, 1e-12)).unwrap();
        assert!((got - 1.0).norm() < 1e-11);
    }

    #[test]
    fn reference_rejects_lower_half_plane() {
        assert!(w_reference(C64::new(0.5, -1e-3)).is_err());
    }
}
