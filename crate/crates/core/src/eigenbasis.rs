//! Pointwise generalized eigenfunctions: the barrier energy eigenfunctions
//! `<x|E±>_c` and the momentum plane waves `<x|p>`.
//!
//! The position kernel `<x|x'> = δ(x - x')` has no pointwise evaluator; it
//! acts only as the identity on test functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::BarrierModel;
use crate::scattering::{solve_matching, Channel, ScatteringSolution, SignLabel};

/// `<x|E±>_c` at fixed energy with its scattering solution cached.
#[derive(Debug, Clone, Copy)]
pub struct EigenfunctionHandle {
    model: BarrierModel,
    channel: Channel,
    sign: SignLabel,
    solution: ScatteringSolution,
    prefactor: f64,
}

impl EigenfunctionHandle {
    pub fn new(model: &BarrierModel, energy: f64, channel: Channel, sign: SignLabel) -> Result<Self> {
        let solution = solve_matching(model, energy)?;
        Ok(Self::from_solution(model, solution, channel, sign))
    }

    /// `solution` must come from `solve_matching(model, solution.energy)`.
    pub fn from_solution(
        model: &BarrierModel,
        solution: ScatteringSolution,
        channel: Channel,
        sign: SignLabel,
    ) -> Self {
        Self {
            model: *model,
            channel,
            sign,
            prefactor: model.eigen_prefactor(solution.wave.k),
            solution,
        }
    }

    pub fn model(&self) -> &BarrierModel {
        &self.model
    }

    pub fn energy(&self) -> f64 {
        self.solution.energy
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn sign(&self) -> SignLabel {
        self.sign
    }

    pub fn solution(&self) -> &ScatteringSolution {
        &self.solution
    }

    /// `sqrt(m / (2π k ħ²))`.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// Value and first derivative at `x`.
    ///
    /// The minus eigenfunction is the pointwise complex conjugate of the plus
    /// one, which is the coefficient-wise conjugate of every exterior form.
    pub fn eval_with_derivative(&self, x: f64) -> (Complex64, Complex64) {
        let (psi, dpsi) = self.solution.reduced_with_derivative(self.channel, x);
        let (psi, dpsi) = (psi * self.prefactor, dpsi * self.prefactor);
        match self.sign {
            SignLabel::Plus => (psi, dpsi),
            SignLabel::Minus => (psi.conj(), dpsi.conj()),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_with_derivative(x).0
    }
}

pub fn eval_energy_eigenfunction(h: &EigenfunctionHandle, x: f64) -> Complex64 {
    h.eval(x)
}

/// `<x|p> = e^{ipx/ħ} / sqrt(2πħ)`.
pub fn eval_plane_wave(model: &BarrierModel, p: f64, x: f64) -> Complex64 {
    let hbar = model.hbar();
    Complex64::from_polar(1.0 / (2.0 * PI * hbar).sqrt(), p * x / hbar)
}
