//! Matching conditions at `x = a` and `x = b`, solved with 2x2 transfer
//! matrices, and the resulting scattering coefficients for both incidence
//! directions.
//!
//! Coefficient conventions follow the printed asymptotic forms: the
//! incident wave carries unit amplitude, left incidence is
//! `e^{ikx} + R_l e^{-ikx}` / `A_l e^{iκx} + B_l e^{-iκx}` / `T e^{ikx}`,
//! right incidence is `T e^{-ikx}` / `A_r e^{iκx} + B_r e^{-iκx}` /
//! `R_r e^{ikx} + e^{-ikx}`. At `κ = 0` the interior basis is `{1, x}` and
//! `A`, `B` hold the constant and slope.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BarrierModel, WaveNumbers};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative distance to `V0` below which the interior uses the `{1, x}` basis.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Transfer matrices with a scaled condition estimate beyond this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "l")]
    Left,
    #[serde(rename = "r")]
    Right,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::Left, Channel::Right];

    pub fn index(self) -> usize {
        match self {
            Channel::Left => 0,
            Channel::Right => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Channel::Left => "l",
            Channel::Right => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignLabel {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl SignLabel {
    pub fn label(self) -> &'static str {
        match self {
            SignLabel::Plus => "+",
            SignLabel::Minus => "-",
        }
    }
}

/// 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= other.0[i][j];
            }
        }
        out
    }

    fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// Maps plane-wave amplitudes `(α, β)` of `α e^{ikx} + β e^{-ikx}` to `(ψ(x), ψ'(x))`.
pub fn plane_wave_interface(k: f64, x: f64) -> Mat2 {
    let p = Complex64::from_polar(1.0, k * x);
    let m = p.conj();
    Mat2([[p, m], [I * k * p, -I * k * m]])
}

/// Inverse of [`plane_wave_interface`].
pub fn plane_wave_interface_inverse(k: f64, x: f64) -> Mat2 {
    let p = Complex64::from_polar(1.0, k * x);
    let m = p.conj();
    let inv_ik = 1.0 / (I * k);
    Mat2([[0.5 * m, 0.5 * m * inv_ik], [0.5 * p, -0.5 * p * inv_ik]])
}

/// Interior basis used for the constant-potential layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteriorBasis {
    Oscillatory,
    Evanescent,
    Linear,
}

/// Fundamental solutions `C(t)`, `S(t)` of `ψ'' = -κ² ψ` with `C(0)=1, C'(0)=0`,
/// `S(0)=0, S'(0)=1`, both multiplied by `e^{-log_scale}`.
#[derive(Debug, Clone, Copy)]
struct Fundamental {
    c: f64,
    s: f64,
    log_scale: f64,
}

fn fundamental(kappa_sq: f64, basis: InteriorBasis, t: f64, allow_scaling: bool) -> Fundamental {
    match basis {
        InteriorBasis::Linear => Fundamental {
            c: 1.0,
            s: t,
            log_scale: 0.0,
        },
        InteriorBasis::Oscillatory => {
            let kappa = kappa_sq.sqrt();
            Fundamental {
                c: (kappa * t).cos(),
                s: (kappa * t).sin() / kappa,
                log_scale: 0.0,
            }
        }
        InteriorBasis::Evanescent => {
            let q = (-kappa_sq).sqrt();
            let qt = q * t;
            if allow_scaling && qt > 1.0 {
                let d = (-2.0 * qt).exp();
                Fundamental {
                    c: 0.5 * (1.0 + d),
                    s: 0.5 * (1.0 - d) / q,
                    log_scale: qt,
                }
            } else {
                Fundamental {
                    c: qt.cosh(),
                    s: qt.sinh() / q,
                    log_scale: 0.0,
                }
            }
        }
    }
}

fn layer_propagator(kappa_sq: f64, f: &Fundamental) -> Mat2 {
    let c = Complex64::new(f.c, 0.0);
    let s = Complex64::new(f.s, 0.0);
    Mat2([[c, s], [-kappa_sq * s, c]])
}

/// Value and derivative of one channel's solution at both barrier edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeData {
    pub psi_a: Complex64,
    pub dpsi_a: Complex64,
    pub psi_b: Complex64,
    pub dpsi_b: Complex64,
}

/// All scattering coefficients at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub wave: WaveNumbers,
    pub t: Complex64,
    pub r_l: Complex64,
    pub r_r: Complex64,
    pub a_l: Complex64,
    pub b_l: Complex64,
    pub a_r: Complex64,
    pub b_r: Complex64,
    pub basis: InteriorBasis,
    edges: [EdgeData; 2],
    a: f64,
    b: f64,
}

fn interior_basis(model: &BarrierModel, energy: f64, kappa_sq: f64) -> InteriorBasis {
    if (energy - model.v0()).abs() <= DEGENERACY_THRESHOLD * model.v0().max(1.0) {
        InteriorBasis::Linear
    } else if kappa_sq > 0.0 {
        InteriorBasis::Oscillatory
    } else {
        InteriorBasis::Evanescent
    }
}

/// Solves the matching conditions at both discontinuities.
pub fn solve_matching(model: &BarrierModel, energy: f64) -> Result<ScatteringSolution> {
    let wave = model.wave_numbers(energy)?;
    let (a, b) = (model.a(), model.b());
    let k = wave.k;
    let basis = interior_basis(model, energy, wave.kappa_sq);
    let (t, r_l, r_r) = if model.v0() == 0.0 {
        // Free propagation, exactly.
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        let fund = fundamental(wave.kappa_sq, basis, b - a, true);
        // Scaled transfer matrix across the barrier: plane waves at a -> (ψ, ψ')
        // at a -> (ψ, ψ') at b -> plane waves at b, times e^{-log_scale}.
        let transfer = plane_wave_interface_inverse(k, b)
            * layer_propagator(wave.kappa_sq, &fund)
            * plane_wave_interface(k, a);
        let [[_, t12], [t21, t22]] = transfer.0;
        let condition = transfer.max_abs() / t22.norm();
        if !transfer.is_finite() || !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::Conditioning { energy, condition });
        }
        ((-fund.log_scale).exp() / t22, -t21 / t22, t12 / t22)
    };

    let pa = Complex64::from_polar(1.0, k * a);
    let pb = Complex64::from_polar(1.0, k * b);
    let ik = I * k;
    let left = EdgeData {
        psi_a: pa + r_l * pa.conj(),
        dpsi_a: ik * (pa - r_l * pa.conj()),
        psi_b: t * pb,
        dpsi_b: ik * t * pb,
    };
    let right = EdgeData {
        psi_a: t * pa.conj(),
        dpsi_a: -ik * t * pa.conj(),
        psi_b: r_r * pb + pb.conj(),
        dpsi_b: ik * (r_r * pb - pb.conj()),
    };

    let interior = |e: &EdgeData| interior_coefficients(&wave, basis, a, b, e);
    let (a_l, b_l) = interior(&left);
    let (a_r, b_r) = interior(&right);

    Ok(ScatteringSolution {
        energy,
        wave,
        t,
        r_l,
        r_r,
        a_l,
        b_l,
        a_r,
        b_r,
        basis,
        edges: [left, right],
        a,
        b,
    })
}

fn interior_coefficients(
    wave: &WaveNumbers,
    basis: InteriorBasis,
    a: f64,
    b: f64,
    e: &EdgeData,
) -> (Complex64, Complex64) {
    match basis {
        InteriorBasis::Linear => (e.psi_a - e.dpsi_a * a, e.dpsi_a),
        InteriorBasis::Evanescent if wave.kappa.im * (b - a) >= 0.5 => {
            // e^{iκx} = e^{-qx}; two-edge form avoids cancellation inside opaque barriers.
            let q = wave.kappa.im;
            let two_sinh = 2.0 * (q * (b - a)).sinh();
            let big_a = (e.psi_a * (q * b).exp() - e.psi_b * (q * a).exp()) / two_sinh;
            let big_b = (e.psi_b * (-q * a).exp() - e.psi_a * (-q * b).exp()) / two_sinh;
            (big_a, big_b)
        }
        _ => {
            let ikappa = I * wave.kappa;
            let ratio = e.dpsi_a / ikappa;
            let phase = (-ikappa * a).exp();
            (0.5 * (e.psi_a + ratio) * phase, 0.5 * (e.psi_a - ratio) / phase)
        }
    }
}

impl ScatteringSolution {
    pub fn edges(&self, channel: Channel) -> &EdgeData {
        &self.edges[channel.index()]
    }

    /// Plane-wave amplitudes `(α, β)` on the left and `(γ, δ)` on the right.
    pub fn exterior_amplitudes(&self, channel: Channel) -> ([Complex64; 2], [Complex64; 2]) {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match channel {
            Channel::Left => ([one, self.r_l], [self.t, zero]),
            Channel::Right => ([zero, self.t], [self.r_r, one]),
        }
    }

    /// Unnormalized `+` solution and its derivative at `x`.
    pub fn reduced_with_derivative(&self, channel: Channel, x: f64) -> (Complex64, Complex64) {
        let k = self.wave.k;
        if x < self.a || x > self.b {
            let (left, right) = self.exterior_amplitudes(channel);
            let [alpha, beta] = if x < self.a { left } else { right };
            let p = Complex64::from_polar(1.0, k * x);
            let fwd = alpha * p;
            let bwd = beta * p.conj();
            return (fwd + bwd, I * k * (fwd - bwd));
        }
        let e = &self.edges[channel.index()];
        let l = self.b - self.a;
        if self.basis == InteriorBasis::Evanescent && self.wave.kappa.im * l >= 0.5 {
            let q = self.wave.kappa.im;
            let denom = 1.0 - (-2.0 * q * l).exp();
            let g = |t: f64| {
                let decay = (q * (t - l)).exp();
                let d = (-2.0 * q * t).exp();
                (decay * (1.0 - d) / denom, q * decay * (1.0 + d) / denom)
            };
            let (g_left, dg_left) = g(self.b - x);
            let (g_right, dg_right) = g(x - self.a);
            return (
                e.psi_a * g_left + e.psi_b * g_right,
                -e.psi_a * dg_left + e.psi_b * dg_right,
            );
        }
        let f = fundamental(self.wave.kappa_sq, self.basis, x - self.a, false);
        let kappa_sq = if self.basis == InteriorBasis::Linear {
            0.0
        } else {
            self.wave.kappa_sq
        };
        (
            e.psi_a * f.c + e.dpsi_a * f.s,
            -kappa_sq * e.psi_a * f.s + e.dpsi_a * f.c,
        )
    }

    pub fn reduced(&self, channel: Channel, x: f64) -> Complex64 {
        self.reduced_with_derivative(channel, x).0
    }

    /// Unnormalized `+` solutions of both channels at `x`, ordered `[l, r]`.
    pub fn reduced_pair(&self, x: f64) -> [Complex64; 2] {
        [self.reduced(Channel::Left, x), self.reduced(Channel::Right, x)]
    }

    /// `max(| |T|²+|R_l|² - 1 |, | |T|²+|R_r|² - 1 |)`.
    pub fn flux_defect(&self) -> f64 {
        let t2 = self.t.norm_sqr();
        (t2 + self.r_l.norm_sqr() - 1.0)
            .abs()
            .max((t2 + self.r_r.norm_sqr() - 1.0).abs())
    }

    /// `|conj(T) R_l + conj(R_r) T|`.
    pub fn off_diagonal_defect(&self) -> f64 {
        (self.t.conj() * self.r_l + self.r_r.conj() * self.t).norm()
    }

    pub fn s_matrix(&self) -> Mat2 {
        Mat2([[self.t, self.r_r], [self.r_l, self.t]])
    }
}

/// `[[T, R_r], [R_l, T]]` at energy `E`.
pub fn s_matrix(model: &BarrierModel, energy: f64) -> Result<Mat2> {
    Ok(solve_matching(model, energy)?.s_matrix())
}

/// `‖S†S - I‖_max`.
pub fn unitarity_defect(s: &Mat2) -> f64 {
    (s.adjoint() * *s).sub(&Mat2::identity()).max_abs()
}
