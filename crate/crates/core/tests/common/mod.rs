//! Independent scattering oracle: RK4 integration of the Schrödinger equation
//! across the barrier, followed by least-squares fits of plane waves and of
//! the interior basis to the sampled solution.

#![allow(dead_code)]

use barrier_rhs::BarrierModel;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

type Basis = Box<dyn Fn(f64) -> Complex64>;

/// Coefficients recovered from the integrated solutions.
#[derive(Debug, Clone, Copy)]
pub struct OracleCoefficients {
    pub t_left: Complex64,
    pub t_right: Complex64,
    pub r_l: Complex64,
    pub r_r: Complex64,
    pub a_l: Complex64,
    pub b_l: Complex64,
    pub a_r: Complex64,
    pub b_r: Complex64,
}

/// `ψ'' = (2m/ħ²)(V - E) ψ`, integrated from `x0` to `x1` with `V` constant
/// on the way. Returns samples `(x, ψ)` every `stride` steps, endpoints included.
fn integrate_segment(
    coupling: f64,
    x0: f64,
    x1: f64,
    h_max: f64,
    state: &mut (Complex64, Complex64),
    samples: &mut Vec<(f64, Complex64)>,
) {
    let steps = ((x1 - x0).abs() / h_max).ceil().max(1.0) as usize;
    let h = (x1 - x0) / steps as f64;
    let f = |s: (Complex64, Complex64)| (s.1, coupling * s.0);
    let stride = (steps / 200).max(1);
    for i in 0..steps {
        let s = *state;
        let k1 = f(s);
        let k2 = f((s.0 + 0.5 * h * k1.0, s.1 + 0.5 * h * k1.1));
        let k3 = f((s.0 + 0.5 * h * k2.0, s.1 + 0.5 * h * k2.1));
        let k4 = f((s.0 + h * k3.0, s.1 + h * k3.1));
        state.0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        state.1 += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if (i + 1) % stride == 0 || i + 1 == steps {
            samples.push((x0 + h * (i + 1) as f64, state.0));
        }
    }
}

/// Least-squares `(α, β)` minimizing `Σ |ψ_j - α u(x_j) - β v(x_j)|²`.
fn fit_pair(
    samples: &[(f64, Complex64)],
    u: impl Fn(f64) -> Complex64,
    v: impl Fn(f64) -> Complex64,
) -> (Complex64, Complex64) {
    let (mut uu, mut uv, mut vv) = (0.0, Complex64::new(0.0, 0.0), 0.0);
    let (mut up, mut vp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for &(x, psi) in samples {
        let (ux, vx) = (u(x), v(x));
        uu += ux.norm_sqr();
        vv += vx.norm_sqr();
        uv += ux.conj() * vx;
        up += ux.conj() * psi;
        vp += vx.conj() * psi;
    }
    let det = uu * vv - uv.norm_sqr();
    let alpha = (vv * up - uv * vp) / det;
    let beta = (uu * vp - uv.conj() * up) / det;
    (alpha, beta)
}

/// Solves both incidence problems by integration with step `min(1e-4, 0.01/k)`.
pub fn ode_oracle(model: &BarrierModel, energy: f64) -> OracleCoefficients {
    let (a, b) = (model.a(), model.b());
    let k = model.wave_number(energy);
    let scale = 1.0 / model.kinetic_scale();
    let outside = -scale * energy;
    let inside = scale * (model.v0() - energy);
    let h = (1e-4f64).min(0.01 / k);
    let kappa = Complex64::new(-inside, 0.0).sqrt();
    let degenerate = (energy - model.v0()).abs() <= 1e-12 * model.v0().max(1.0);
    let basis: (Basis, Basis) = if degenerate {
        (Box::new(|_| Complex64::new(1.0, 0.0)), Box::new(|x| Complex64::new(x, 0.0)))
    } else {
        (Box::new(move |x| (I * kappa * x).exp()), Box::new(move |x| (-I * kappa * x).exp()))
    };
    let fwd = |x: f64| Complex64::from_polar(1.0, k * x);
    let bwd = |x: f64| Complex64::from_polar(1.0, -k * x);
    let margin = 1.0;

    // Left incidence: pure transmitted wave on the right, integrated leftwards.
    let x_right = b + margin;
    let mut state = (fwd(x_right), I * k * fwd(x_right));
    let mut discard = Vec::new();
    integrate_segment(outside, x_right, b, h, &mut state, &mut discard);
    let mut interior = vec![(b, state.0)];
    integrate_segment(inside, b, a, h, &mut state, &mut interior);
    let mut exterior = vec![(a, state.0)];
    integrate_segment(outside, a, a - margin, h, &mut state, &mut exterior);
    let (alpha, beta) = fit_pair(&exterior, fwd, bwd);
    let (ia, ib) = fit_pair(&interior, &basis.0, &basis.1);
    let (t_left, r_l, a_l, b_l) = (1.0 / alpha, beta / alpha, ia / alpha, ib / alpha);

    // Right incidence: pure transmitted wave on the left, integrated rightwards.
    let x_left = a - margin;
    let mut state = (bwd(x_left), -I * k * bwd(x_left));
    let mut discard = Vec::new();
    integrate_segment(outside, x_left, a, h, &mut state, &mut discard);
    let mut interior = vec![(a, state.0)];
    integrate_segment(inside, a, b, h, &mut state, &mut interior);
    let mut exterior = vec![(b, state.0)];
    integrate_segment(outside, b, b + margin, h, &mut state, &mut exterior);
    let (gamma, delta) = fit_pair(&exterior, fwd, bwd);
    let (ia, ib) = fit_pair(&interior, &basis.0, &basis.1);
    let (t_right, r_r, a_r, b_r) = (1.0 / delta, gamma / delta, ia / delta, ib / delta);

    OracleCoefficients {
        t_left,
        t_right,
        r_l,
        r_r,
        a_l,
        b_l,
        a_r,
        b_r,
    }
}

/// `|x - y| / max(|y|, 1)`.
pub fn rel_floor(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

/// Worst discrepancy between the library coefficients and the oracle.
pub fn oracle_discrepancy(model: &BarrierModel, energy: f64) -> f64 {
    let s = barrier_rhs::solve_matching(model, energy).unwrap();
    let o = ode_oracle(model, energy);
    [
        rel_floor(s.t, o.t_left),
        rel_floor(s.t, o.t_right),
        rel_floor(s.r_l, o.r_l),
        rel_floor(s.r_r, o.r_r),
        rel_floor(s.a_l, o.a_l),
        rel_floor(s.b_l, o.b_l),
        rel_floor(s.a_r, o.a_r),
        rel_floor(s.b_r, o.b_r),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// `n` log-spaced points in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
