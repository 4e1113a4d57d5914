use std::f64::consts::PI;

use morsim::faddeeva::{w, w_reference};
use morsim::quadrature::legendre16;
use morsim::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n_mod x n_arg` points, `|z|` log-spaced over [1e-3, 1e4], argument in (0, pi).
fn polar_grid(n_mod: usize, n_arg: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_mod * n_arg);
    for i in 0..n_mod {
        let r = 10f64.powf(-3.0 + 7.0 * i as f64 / (n_mod - 1) as f64);
        for k in 0..n_arg {
            let phi = PI * (k as f64 + 0.5) / n_arg as f64;
            out.push(C64::from_polar(r, phi));
        }
    }
    out
}

#[test]
fn kernel_matches_reference_on_log_grid() {
    let mut worst = (0.0f64, C64::new(0.0, 0.0));
    for z in polar_grid(100, 100) {
        let a = w(z).unwrap();
        let b = w_reference(z).unwrap();
        let e = (a - b).norm() / b.norm();
        if e > worst.0 {
            worst = (e, z);
        }
    }
    assert!(worst.0 <= 1e-10, "worst rel err {:e} at {}", worst.0, worst.1);
}

#[test]
fn reflection_symmetry_of_both_implementations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let z = C64::new(rng.gen_range(-30.0..30.0), 10f64.powf(rng.gen_range(-4.0..1.5)));
        let mirror = C64::new(-z.re, z.im);
        for f in [w, w_reference] {
            let a = f(z).unwrap();
            let b = f(mirror).unwrap();
            assert!((b - a.conj()).norm() <= 1e-12 * a.norm(), "{z}");
        }
    }
}

#[test]
fn real_positive_and_decreasing_on_imaginary_axis() {
    let mut previous = f64::INFINITY;
    for k in 0..400 {
        let y = 10f64.powf(-4.0 + 8.0 * k as f64 / 399.0);
        let v = w(C64::new(0.0, y)).unwrap();
        assert_eq!(v.im, 0.0);
        assert!(v.re > 0.0 && v.re < previous, "y = {y}");
        previous = v.re;
    }
}

#[test]
fn voigt_profile_has_unit_area() {
    // Int Re W(x + iy) dx = sqrt(pi); x = c tan(theta) maps the line onto (-pi/2, pi/2)
    let rule = legendre16();
    let panels = 400;
    for y in [0.05, 0.5, 2.0] {
        let c = 1.0 + y;
        let h = PI / panels as f64;
        let mut area = 0.0;
        for k in 0..panels {
            let mid = -PI / 2.0 + h * (k as f64 + 0.5);
            for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let theta = mid + 0.5 * h * x;
                let sec = 1.0 / theta.cos();
                let value = w(C64::new(c * theta.tan(), y)).unwrap().re;
                area += value * c * sec * sec * 0.5 * h * wt;
            }
        }
        assert!((area - PI.sqrt()).abs() < 1e-6, "y = {y}: area {area}");
    }
}
