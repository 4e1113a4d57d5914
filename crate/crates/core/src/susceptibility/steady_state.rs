//! Numerical steady state of the full five-level density matrix.
//!
//! Levels are ordered `g, 1, o, 2, e`. In the rotating frame the Hamiltonian
//! carries the velocity-shifted detunings on the diagonal and the probe (`g1`,
//! `g2`) and control (`G1`, `G2`) amplitudes off-diagonal. Relaxation moves
//! population `e -> i` at `2 Gamma_i` and `i -> g` at `2 gamma_i`.
//!
//! The linear system `L rho = 0, tr rho = 1` is solved for the deviation
//! `x = rho - |g><g|`, which keeps the tiny probe-induced coherences from
//! being swamped by the ground population.

use nalgebra::{DMatrix, DVector};

use crate::params::{AtomParams, ControlParams};
use crate::{Error, Result, C64};

use super::SusceptibilityPair;

const N: usize = 5;
const G: usize = 0;
const L1: usize = 1;
const O: usize = 2;
const L2: usize = 3;
const E: usize = 4;

pub const DEFAULT_PROBE_AMPLITUDE: f64 = 1e-4;
const LINEARITY_TOL: f64 = 1e-6;

fn idx(j: usize, k: usize) -> usize {
    j * N + k
}

fn hamiltonian(
    ctrl: &ControlParams,
    zeta: f64,
    delta_v: f64,
    big_delta_v: f64,
    probe: (C64, C64),
) -> DMatrix<C64> {
    let mut h = DMatrix::<C64>::zeros(N, N);
    h[(E, E)] = C64::from(delta_v + big_delta_v);
    h[(L1, L1)] = C64::from(delta_v + zeta);
    h[(L2, L2)] = C64::from(delta_v - zeta);
    h[(O, O)] = C64::from(delta_v);
    let couplings = [(L1, G, probe.0), (L2, G, probe.1), (E, L1, ctrl.g1), (E, L2, ctrl.g2)];
    for (j, k, amp) in couplings {
        h[(j, k)] = -amp;
        h[(k, j)] = -amp.conj();
    }
    h
}

/// `d rho / dt` for a given `rho`.
fn liouvillian_apply(h: &DMatrix<C64>, atom: &AtomParams, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
    let lower = [(L1, atom.gamma_1, atom.upper_gamma_1), (O, atom.gamma_o, atom.upper_gamma_o), (L2, atom.gamma_2, atom.upper_gamma_2)];
    let rho_ee = rho[(E, E)];
    for (i, gamma, upper) in lower {
        let rho_ii = rho[(i, i)];
        for k in 0..N {
            // anticommutators with the projectors on e and i
            out[(E, k)] -= rho[(E, k)] * upper;
            out[(k, E)] -= rho[(k, E)] * upper;
            out[(i, k)] -= rho[(i, k)] * gamma;
            out[(k, i)] -= rho[(k, i)] * gamma;
        }
        out[(i, i)] += rho_ee * (2.0 * upper);
        out[(G, G)] += rho_ii * (2.0 * gamma);
    }
    out
}

fn superoperator(h: &DMatrix<C64>, atom: &AtomParams) -> DMatrix<C64> {
    let mut l = DMatrix::<C64>::zeros(N * N, N * N);
    for j in 0..N {
        for k in 0..N {
            let mut unit = DMatrix::<C64>::zeros(N, N);
            unit[(j, k)] = C64::new(1.0, 0.0);
            let image = liouvillian_apply(h, atom, &unit);
            let col = idx(j, k);
            for a in 0..N {
                for b in 0..N {
                    l[(idx(a, b), col)] = image[(a, b)];
                }
            }
        }
    }
    l
}

/// Full steady-state density matrix with probe amplitudes `probe = (g1, g2)`.
pub fn steady_state(
    atom: &AtomParams,
    ctrl: &ControlParams,
    zeta: f64,
    delta_v: f64,
    big_delta_v: f64,
    probe: (C64, C64),
) -> Result<DMatrix<C64>> {
    let rates = [
        atom.gamma_1,
        atom.gamma_2,
        atom.gamma_o,
        atom.upper_gamma_1,
        atom.upper_gamma_2,
        atom.upper_gamma_o,
    ];
    if rates.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Singular(
            "steady state needs strictly positive decay rates".into(),
        ));
    }
    let h = hamiltonian(ctrl, zeta, delta_v, big_delta_v, probe);
    let mut l = superoperator(&h, atom);

    let mut ground = DMatrix::<C64>::zeros(N, N);
    ground[(G, G)] = C64::new(1.0, 0.0);
    let drift = liouvillian_apply(&h, atom, &ground);
    let mut rhs = DVector::<C64>::zeros(N * N);
    for a in 0..N {
        for b in 0..N {
            rhs[idx(a, b)] = -drift[(a, b)];
        }
    }

    // the ground population equation is redundant; replace it by tr x = 0
    let row = idx(G, G);
    for c in 0..N * N {
        l[(row, c)] = C64::new(0.0, 0.0);
    }
    for j in 0..N {
        l[(row, idx(j, j))] = C64::new(1.0, 0.0);
    }
    rhs[row] = C64::new(0.0, 0.0);

    let x = l
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Liouvillian is not invertible".into()))?;
    if x.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Singular("steady-state solution is not finite".into()));
    }

    let mut rho = ground;
    for a in 0..N {
        for b in 0..N {
            rho[(a, b)] += x[idx(a, b)];
        }
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSolution {
    /// Linear-response susceptibilities, extrapolated to zero probe amplitude.
    pub pair: SusceptibilityPair,
    /// Relative change between the amplitude `g` and `g/2` estimates.
    pub halving_change: f64,
    /// `false` when `halving_change` exceeds the linearity tolerance.
    pub linear: bool,
}

fn drive_plus(atom: &AtomParams, ctrl: &ControlParams, zeta: f64, dv: f64, bdv: f64, g: f64) -> Result<C64> {
    let rho = steady_state(atom, ctrl, zeta, dv, bdv, (C64::from(g), C64::from(0.0)))?;
    Ok(rho[(L1, G)] / g)
}

fn drive_minus(atom: &AtomParams, ctrl: &ControlParams, zeta: f64, dv: f64, bdv: f64, g: f64) -> Result<C64> {
    let rho = steady_state(atom, ctrl, zeta, dv, bdv, (C64::from(0.0), C64::from(g)))?;
    Ok(rho[(L2, G)] / g)
}

/// Susceptibility pair from the full density matrix. Each circular probe
/// component is driven on its own so that its coherence is read off without
/// cross terms; two amplitudes `g` and `g/2` are combined by Richardson
/// extrapolation.
pub fn steady_state_oracle(
    atom: &AtomParams,
    ctrl: &ControlParams,
    zeta: f64,
    delta_v: f64,
    big_delta_v: f64,
    probe_amplitude: f64,
) -> Result<OracleSolution> {
    if !(probe_amplitude > 0.0 && probe_amplitude.is_finite()) {
        return Err(Error::Domain(format!(
            "probe amplitude must be positive, got {probe_amplitude}"
        )));
    }
    let g = probe_amplitude;
    let plus_full = drive_plus(atom, ctrl, zeta, delta_v, big_delta_v, g)?;
    let plus_half = drive_plus(atom, ctrl, zeta, delta_v, big_delta_v, g / 2.0)?;
    let minus_full = drive_minus(atom, ctrl, zeta, delta_v, big_delta_v, g)?;
    let minus_half = drive_minus(atom, ctrl, zeta, delta_v, big_delta_v, g / 2.0)?;

    let change = |full: C64, half: C64| (full - half).norm() / half.norm().max(f64::MIN_POSITIVE);
    let halving_change = change(plus_full, plus_half).max(change(minus_full, minus_half));

    let s_plus = (plus_half * 4.0 - plus_full) / 3.0;
    let s_minus = (minus_half * 4.0 - minus_full) / 3.0;
    let control_on = ctrl.g1.norm_sqr() + ctrl.g2.norm_sqr() > 0.0;
    Ok(OracleSolution {
        pair: SusceptibilityPair::stationary(s_plus, s_minus, control_on),
        halving_change,
        linear: halving_change < LINEARITY_TOL,
    })
}
