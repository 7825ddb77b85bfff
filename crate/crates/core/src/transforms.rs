//! Dirac basis expansions as executable transforms.
//!
//! Energy amplitudes are stored in reduced form
//! `ã_c(k) = ∫ conj(ũ_c(k, x)) f(x) dx`, where `ũ_c` is the eigenfunction
//! without its prefactor `N(k)`. Since `N(k)² dE/dk = 1/(2π)`, every
//! energy-side integral becomes a smooth `dk` integral:
//!
//! ```text
//! Σ_c ∫ <x|E±>_c a_c(E) dE   = (1/2π) Σ_c ∫ ũ_c(k, x) ã_c(k) dk
//! Σ_c ∫ conj(a_c) b_c dE     = (1/2π) Σ_c ∫ conj(ã_c) b̃_c dk
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::eval_plane_wave;
use crate::error::{domain, Result};
use crate::interpolant::PanelInterpolant;
use crate::model::{BarrierModel, Observable};
use crate::quadrature::{integrate_line_with, integrate_wavenumber, QuadratureSpec};
use crate::scattering::{solve_matching, Channel, SignLabel};
use crate::testspace::{inner_product, TestFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Initial interpolation panels over `[0, k_max]` or `[-ħk_max, ħk_max]`.
const AMPLITUDE_PANELS: usize = 40;

/// Tolerances for the line integrals behind each cached amplitude sample.
fn sample_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.tightened(0.01)
}

fn interpolation_tolerance(spec: &QuadratureSpec) -> f64 {
    0.1 * spec.abs_tol
}

/// Reduced eigenfunctions `[ũ_l, ũ_r]` at `(k, x)` for the given sign.
fn reduced_eigenfunctions(model: &BarrierModel, sign: SignLabel, k: f64, x: f64) -> Result<[Complex64; 2]> {
    let sol = solve_matching(model, model.energy_of(k))?;
    let pair = sol.reduced_pair(x);
    Ok(match sign {
        SignLabel::Plus => pair,
        SignLabel::Minus => pair.map(|z| z.conj()),
    })
}

/// `[∫ conj(ũ_l) g dx, ∫ conj(ũ_r) g dx]` at wave number `k` for an arbitrary `g`.
pub fn analyze_reduced<G>(
    model: &BarrierModel,
    sign: SignLabel,
    g: G,
    k: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<[Complex64; 2]>
where
    G: Fn(f64) -> Complex64,
{
    let sol = solve_matching(model, model.energy_of(k))?;
    let est = integrate_line_with(
        |x| {
            let gx = g(x);
            if gx == ZERO {
                return Ok([ZERO; 2]);
            }
            let [ul, ur] = sol.reduced_pair(x);
            Ok(match sign {
                SignLabel::Plus => [ul.conj() * gx, ur.conj() * gx],
                SignLabel::Minus => [ul * gx, ur * gx],
            })
        },
        spec,
        breakpoints,
    )?;
    Ok(est.value)
}

/// `(1/2π) Σ_c mask_c ∫ ũ_c(k, x) r_c(k) dk` over `[k_lo, k_hi]`.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_reduced<R>(
    model: &BarrierModel,
    sign: SignLabel,
    reduced: R,
    k_range: (f64, f64),
    breakpoints: &[f64],
    mask: [bool; 2],
    x: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    R: Fn(f64) -> [Complex64; 2],
{
    let est = integrate_wavenumber(
        |k| {
            let r = reduced(k);
            if r == [ZERO; 2] {
                return Ok([ZERO]);
            }
            let u = reduced_eigenfunctions(model, sign, k, x)?;
            let mut acc = ZERO;
            for c in 0..2 {
                if mask[c] {
                    acc += u[c] * r[c];
                }
            }
            Ok([acc / (2.0 * PI)])
        },
        k_range.0,
        k_range.1,
        breakpoints,
        spec,
    )?;
    Ok(est.value[0])
}

/// Energy representation `E ↦ _c<±E|f>` of a test function, cached on a
/// piecewise Chebyshev grid in `k`.
#[derive(Debug, Clone)]
pub struct EnergyAmplitude {
    model: BarrierModel,
    sign: SignLabel,
    k_max: f64,
    reduced: Option<PanelInterpolant<2>>,
}

impl EnergyAmplitude {
    pub fn zero(model: &BarrierModel, sign: SignLabel, k_max: f64) -> Self {
        Self {
            model: *model,
            sign,
            k_max,
            reduced: None,
        }
    }

    pub fn sign(&self) -> SignLabel {
        self.sign
    }

    pub fn model(&self) -> &BarrierModel {
        &self.model
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    /// `_c<±E|f>`; zero beyond the wave-number cutoff.
    pub fn amplitude(&self, energy: f64, channel: Channel) -> Complex64 {
        if !(energy > 0.0) {
            return ZERO;
        }
        let k = self.model.wave_number(energy);
        self.model.eigen_prefactor(k) * self.reduced(k)[channel.index()]
    }

    /// `[ã_l(k), ã_r(k)]`.
    pub fn reduced(&self, k: f64) -> [Complex64; 2] {
        match &self.reduced {
            Some(interp) => interp.eval(k),
            None => [ZERO; 2],
        }
    }

    /// Largest interpolation check error of the cache (reduced units).
    pub fn interpolation_error(&self) -> f64 {
        self.reduced.as_ref().map_or(0.0, |i| i.max_error())
    }

    pub fn breaks(&self) -> &[f64] {
        self.reduced.as_ref().map_or(&[], |i| i.breaks())
    }
}

/// `E ↦ _c<±E|f> = ∫ conj(<x|E±>_c) f(x) dx`.
pub fn energy_transform(f: &TestFunction, sign: SignLabel, spec: &QuadratureSpec) -> Result<EnergyAmplitude> {
    spec.validate()?;
    let model = *f.model();
    if f.is_zero() {
        return Ok(EnergyAmplitude::zero(&model, sign, spec.k_max));
    }
    let line = sample_spec(spec);
    let bp = f.breakpoints();
    let interp = PanelInterpolant::build(
        |k| analyze_reduced(&model, sign, |x| f.value(x), k, &bp, &line),
        0.0,
        spec.k_max,
        AMPLITUDE_PANELS,
        interpolation_tolerance(spec),
    )?;
    Ok(EnergyAmplitude {
        model,
        sign,
        k_max: spec.k_max,
        reduced: Some(interp),
    })
}

/// `[_l<±E|f>, _r<±E|f>]` at one energy, without caching.
pub fn energy_amplitude_at(f: &TestFunction, energy: f64, sign: SignLabel, spec: &QuadratureSpec) -> Result<[Complex64; 2]> {
    let model = f.model();
    let k = model.wave_numbers(energy)?.k;
    if f.is_zero() {
        return Ok([ZERO; 2]);
    }
    let r = analyze_reduced(model, sign, |x| f.value(x), k, &f.breakpoints(), spec)?;
    Ok(r.map(|z| z * model.eigen_prefactor(k)))
}

/// `Σ_c ∫ <x|E±>_c a_c(E) dE`.
pub fn synthesize_energy(amp: &EnergyAmplitude, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    synthesize_energy_channels(amp, x, [true, true], spec)
}

/// Synthesis restricted to the channels selected by `mask` (`[l, r]`).
pub fn synthesize_energy_channels(
    amp: &EnergyAmplitude,
    x: f64,
    mask: [bool; 2],
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if amp.reduced.is_none() {
        return Ok(ZERO);
    }
    synthesize_reduced(
        &amp.model,
        amp.sign,
        |k| amp.reduced(k),
        (0.0, amp.k_max),
        amp.breaks(),
        mask,
        x,
        spec,
    )
}

/// `(1/2π) Σ_c ∫ w(k) conj(ã_c) b̃_c dk`, the energy-side overlap with weight `w`.
fn energy_overlap<W>(a: &EnergyAmplitude, b: &EnergyAmplitude, weight: W, spec: &QuadratureSpec) -> Result<Complex64>
where
    W: Fn(f64) -> f64,
{
    if a.reduced.is_none() || b.reduced.is_none() {
        return Ok(ZERO);
    }
    let mut bp = a.breaks().to_vec();
    bp.extend_from_slice(b.breaks());
    let est = integrate_wavenumber(
        |k| {
            let (ra, rb) = (a.reduced(k), b.reduced(k));
            let s = ra[0].conj() * rb[0] + ra[1].conj() * rb[1];
            Ok([s * (weight(k) / (2.0 * PI))])
        },
        0.0,
        a.k_max.min(b.k_max),
        &bp,
        spec,
    )?;
    Ok(est.value[0])
}

/// Momentum representation `p ↦ <p|f>`.
#[derive(Debug, Clone)]
pub struct MomentumAmplitude {
    model: BarrierModel,
    p_max: f64,
    values: Option<PanelInterpolant<1>>,
}

impl MomentumAmplitude {
    /// `<p|f>`; zero for `|p| > ħ k_max`.
    pub fn amplitude(&self, p: f64) -> Complex64 {
        self.values.as_ref().map_or(ZERO, |i| i.eval(p)[0])
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn interpolation_error(&self) -> f64 {
        self.values.as_ref().map_or(0.0, |i| i.max_error())
    }

    fn breaks(&self) -> &[f64] {
        self.values.as_ref().map_or(&[], |i| i.breaks())
    }
}

/// `<p|f> = ∫ e^{-ipx/ħ} f(x) dx / sqrt(2πħ)`, at one momentum.
pub fn momentum_amplitude_at(f: &TestFunction, p: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if f.is_zero() {
        return Ok(ZERO);
    }
    let model = *f.model();
    let est = integrate_line_with(
        |x| Ok([eval_plane_wave(&model, p, x).conj() * f.value(x)]),
        spec,
        &f.breakpoints(),
    )?;
    Ok(est.value[0])
}

/// Analysis direction of the momentum transform, cached on `[-ħk_max, ħk_max]`.
pub fn momentum_transform(f: &TestFunction, spec: &QuadratureSpec) -> Result<MomentumAmplitude> {
    spec.validate()?;
    let model = *f.model();
    let p_max = model.hbar() * spec.k_max;
    if f.is_zero() {
        return Ok(MomentumAmplitude {
            model,
            p_max,
            values: None,
        });
    }
    let line = sample_spec(spec);
    let values = PanelInterpolant::build(
        |p| Ok([momentum_amplitude_at(f, p, &line)?]),
        -p_max,
        p_max,
        2 * AMPLITUDE_PANELS,
        interpolation_tolerance(spec),
    )?;
    Ok(MomentumAmplitude {
        model,
        p_max,
        values: Some(values),
    })
}

/// Synthesis direction: `∫ <x|p> <p|f> dp`.
pub fn synthesize_momentum(amp: &MomentumAmplitude, x: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if amp.values.is_none() {
        return Ok(ZERO);
    }
    let est = integrate_wavenumber(
        |p| Ok([eval_plane_wave(&amp.model, p, x) * amp.amplitude(p)]),
        -amp.p_max,
        amp.p_max,
        amp.breaks(),
        spec,
    )?;
    Ok(est.value[0])
}

fn momentum_overlap<W>(a: &MomentumAmplitude, b: &MomentumAmplitude, weight: W, spec: &QuadratureSpec) -> Result<Complex64>
where
    W: Fn(f64) -> f64,
{
    if a.values.is_none() || b.values.is_none() {
        return Ok(ZERO);
    }
    let mut bp = a.breaks().to_vec();
    bp.extend_from_slice(b.breaks());
    let p_max = a.p_max.min(b.p_max);
    let est = integrate_wavenumber(
        |p| Ok([a.amplitude(p).conj() * b.amplitude(p) * weight(p)]),
        -p_max,
        p_max,
        &bp,
        spec,
    )?;
    Ok(est.value[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Position,
    Momentum,
    Energy(SignLabel),
}

/// `|(f, g) - basis-expanded overlap|`.
pub fn parseval_defect(f: &TestFunction, g: &TestFunction, basis: Basis, spec: &QuadratureSpec) -> Result<f64> {
    let direct = inner_product(f, g, spec)?;
    let expanded = match basis {
        Basis::Position => inner_product(f, g, spec)?,
        Basis::Momentum => momentum_overlap(&momentum_transform(f, spec)?, &momentum_transform(g, spec)?, |_| 1.0, spec)?,
        Basis::Energy(sign) => energy_overlap(
            &energy_transform(f, sign, spec)?,
            &energy_transform(g, sign, spec)?,
            |_| 1.0,
            spec,
        )?,
    };
    Ok((direct - expanded).norm())
}

/// `(f, A g)` evaluated on the spectral side of `A`.
pub fn spectral_matrix_element(obs: Observable, f: &TestFunction, g: &TestFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    match obs {
        Observable::Position => {
            if f.is_zero() || g.is_zero() {
                return Ok(ZERO);
            }
            let mut bp = f.breakpoints();
            bp.extend(g.breakpoints());
            let est = integrate_line_with(|x| Ok([x * f.value(x).conj() * g.value(x)]), spec, &bp)?;
            Ok(est.value[0])
        }
        Observable::Momentum => momentum_overlap(&momentum_transform(f, spec)?, &momentum_transform(g, spec)?, |p| p, spec),
        Observable::Hamiltonian => {
            let model = *f.model();
            energy_overlap(
                &energy_transform(f, SignLabel::Plus, spec)?,
                &energy_transform(g, SignLabel::Plus, spec)?,
                |k| model.energy_of(k),
                spec,
            )
        }
    }
}

/// `(f, A g)` through `apply_observable` and `inner_product`.
pub fn direct_matrix_element(obs: Observable, f: &TestFunction, g: &TestFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    inner_product(f, &g.apply(obs)?, spec)
}

/// Mean `(f, Af)/(f, f)` and spread `sqrt((f, A²f)/(f, f) - mean²)`.
pub fn expectation_uncertainty(obs: Observable, f: &TestFunction, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let norm_sq = inner_product(f, f, spec)?.re;
    if !(norm_sq > 0.0) {
        return Err(domain("expectation values need a nonzero state"));
    }
    let af = f.apply(obs)?;
    let mean = inner_product(f, &af, spec)?.re / norm_sq;
    // (f, A²f) = ‖Af‖² for self-adjoint A on the test space.
    let second = inner_product(&af, &af, spec)?.re / norm_sq;
    Ok((mean, (second - mean * mean).max(0.0).sqrt()))
}

/// Probability of an energy window and the mass found near the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralProbability {
    pub probability: f64,
    /// Mass in the top tenth of the wave-number range; a bound on what the cutoff can hide.
    pub cutoff_mass: f64,
}

/// `Σ_c ∫_{E_lo}^{E_hi} |_c<±E|f>|² dE` for a normalized `f`.
pub fn spectral_probability(
    f: &TestFunction,
    e_lo: f64,
    e_hi: f64,
    sign: SignLabel,
    spec: &QuadratureSpec,
) -> Result<SpectralProbability> {
    if !(e_lo >= 0.0) || !(e_hi > e_lo) {
        return Err(domain(format!("energy window must satisfy 0 <= lo < hi, got [{e_lo}, {e_hi}]")));
    }
    let norm_sq = inner_product(f, f, spec)?.re;
    if (norm_sq - 1.0).abs() > 1e-8 {
        return Err(domain(format!("spectral probabilities need a normalized state, (f, f) = {norm_sq}")));
    }
    let amp = energy_transform(f, sign, spec)?;
    let model = f.model();
    let window = |lo: f64, hi: f64| -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let est = integrate_wavenumber(
            |k| {
                let r = amp.reduced(k);
                Ok([Complex64::new((r[0].norm_sqr() + r[1].norm_sqr()) / (2.0 * PI), 0.0)])
            },
            lo,
            hi,
            amp.breaks(),
            spec,
        )?;
        Ok(est.value[0].re)
    };
    let k_lo = model.wave_number(e_lo).min(spec.k_max);
    let k_hi = if e_hi.is_finite() {
        model.wave_number(e_hi).min(spec.k_max)
    } else {
        spec.k_max
    };
    Ok(SpectralProbability {
        probability: window(k_lo, k_hi)?,
        cutoff_mass: window(0.9 * spec.k_max, spec.k_max)?,
    })
}

/// Pointwise reconstruction error of synthesis after analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    /// Root mean square of the residual over the probe points.
    pub l2_residual: f64,
    pub max_residual: f64,
    pub probe_points: usize,
}

/// Compares `synthesize(analyze(f))` with `f` at `points`, in parallel.
pub fn reconstruction_report<S>(
    f: &TestFunction,
    synthesize: S,
    points: &[f64],
) -> Result<ReconstructionReport>
where
    S: Fn(f64) -> Result<Complex64> + Sync,
{
    let residuals: Vec<f64> = points
        .par_iter()
        .map(|&x| Ok((synthesize(x)? - f.value(x)).norm()))
        .collect::<Result<_>>()?;
    let n = residuals.len();
    let sum_sq: f64 = residuals.iter().map(|r| r * r).sum();
    Ok(ReconstructionReport {
        l2_residual: if n == 0 { 0.0 } else { (sum_sq / n as f64).sqrt() },
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        probe_points: n,
    })
}
