//! Adaptive Gauss-Kronrod (10/21) quadrature for complex, vector-valued
//! integrands on the real line and on the energy half-line.
//!
//! Everything here is sequential with a fixed panel-selection and summation
//! order, so identical inputs give bit-identical results.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, QuadratureFailure, Result};
use crate::model::BarrierModel;

/// Tolerances and truncation radii for every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Line integrals run over `[-spatial_radius, spatial_radius]`.
    pub spatial_radius: f64,
    /// Energy integrals run over wave numbers `(0, k_max]`.
    pub k_max: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            spatial_radius: 40.0,
            k_max: 40.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.abs_tol, self.rel_tol, self.spatial_radius, self.k_max];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(domain(
                "quadrature tolerances, spatial_radius and k_max must be positive and finite",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(domain("max_subdivisions must be positive"));
        }
        Ok(())
    }

    /// Copy with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    pub fn with_spatial_radius(&self, radius: f64) -> Self {
        Self {
            spatial_radius: radius,
            ..*self
        }
    }

    fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub panels: usize,
}

impl<const N: usize> Estimate<[Complex64; N]> {
    fn first(self) -> Estimate<Complex64> {
        Estimate {
            value: self.value[0],
            error: self.error,
            panels: self.panels,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One real part of a 21-point Kronrod panel: returns (integral, error).
fn kronrod_real(fc: f64, fv1: &[f64; 10], fv2: &[f64; 10], half: f64) -> (f64, f64) {
    let mut res_gauss = 0.0;
    let mut res_kronrod = WGK[10] * fc;
    let mut res_abs = res_kronrod.abs();
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let sum = fv1[jtw] + fv2[jtw];
        res_gauss += WG[j] * sum;
        res_kronrod += WGK[jtw] * sum;
        res_abs += WGK[jtw] * (fv1[jtw].abs() + fv2[jtw].abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        res_kronrod += WGK[jtwm1] * (fv1[jtwm1] + fv2[jtwm1]);
        res_abs += WGK[jtwm1] * (fv1[jtwm1].abs() + fv2[jtwm1].abs());
    }
    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let habs = half.abs();
    let err = (res_kronrod - res_gauss) * half;
    (res_kronrod * half, rescale_error(err, res_abs * habs, res_asc * habs))
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    lo: f64,
    hi: f64,
    value: [Complex64; N],
    error: f64,
    frozen: bool,
}

fn gk21<const N: usize, F>(f: &mut F, lo: f64, hi: f64) -> Result<Panel<N>>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut fv1 = [[Complex64::new(0.0, 0.0); N]; 10];
    let mut fv2 = fv1;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv1[j] = f(center - dx)?;
        fv2[j] = f(center + dx)?;
    }

    let mut value = [Complex64::new(0.0, 0.0); N];
    let mut error: f64 = 0.0;
    let mut r1 = [0.0; 10];
    let mut r2 = [0.0; 10];
    for c in 0..N {
        for j in 0..10 {
            r1[j] = fv1[j][c].re;
            r2[j] = fv2[j][c].re;
        }
        let (re, err_re) = kronrod_real(fc[c].re, &r1, &r2, half);
        for j in 0..10 {
            r1[j] = fv1[j][c].im;
            r2[j] = fv2[j][c].im;
        }
        let (im, err_im) = kronrod_real(fc[c].im, &r1, &r2, half);
        value[c] = Complex64::new(re, im);
        error = error.max(err_re.hypot(err_im));
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error,
        frozen: false,
    })
}

fn magnitude<const N: usize>(v: &[Complex64; N]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Globally adaptive bisection over an initial partition (sorted breakpoints).
pub fn integrate_partition<const N: usize, F>(
    mut f: F,
    partition: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate<[Complex64; N]>>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    if partition.len() < 2 {
        return Ok(Estimate {
            value: [Complex64::new(0.0, 0.0); N],
            error: 0.0,
            panels: 0,
        });
    }
    let mut panels = Vec::with_capacity(partition.len() * 2);
    for w in partition.windows(2) {
        if w[1] > w[0] {
            panels.push(gk21(&mut f, w[0], w[1])?);
        }
    }

    loop {
        let mut value = [Complex64::new(0.0, 0.0); N];
        let mut error = 0.0;
        for p in &panels {
            for c in 0..N {
                value[c] += p.value[c];
            }
            error += p.error;
        }
        let target = spec.target(magnitude(&value));
        if error <= target {
            return Ok(finish(panels));
        }

        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if p.frozen {
                continue;
            }
            if worst.is_none_or(|w| p.error > panels[w].error) {
                worst = Some(i);
            }
        }
        let fail = |panels: &[Panel<N>]| {
            Error::Accuracy(Box::new(QuadratureFailure {
                estimate: value.to_vec(),
                achieved_error: error,
                requested_error: target,
                panels: panels.len(),
            }))
        };
        let Some(i) = worst else {
            return Err(fail(&panels));
        };
        if panels.len() >= spec.max_subdivisions {
            return Err(fail(&panels));
        }

        let p = panels[i];
        let mid = 0.5 * (p.lo + p.hi);
        let too_narrow = (p.hi - p.lo) <= 64.0 * f64::EPSILON * p.lo.abs().max(p.hi.abs()).max(1e-300);
        if too_narrow || mid <= p.lo || mid >= p.hi {
            panels[i].frozen = true;
            continue;
        }
        panels[i] = gk21(&mut f, p.lo, mid)?;
        panels.push(gk21(&mut f, mid, p.hi)?);
    }
}

fn finish<const N: usize>(mut panels: Vec<Panel<N>>) -> Estimate<[Complex64; N]> {
    panels.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut value = [Complex64::new(0.0, 0.0); N];
    let mut error = 0.0;
    for p in &panels {
        for c in 0..N {
            value[c] += p.value[c];
        }
        error += p.error;
    }
    Estimate {
        value,
        error,
        panels: panels.len(),
    }
}

/// Sorted partition of `[lo, hi]` containing every breakpoint inside the
/// interval, with no piece wider than `max_width`.
pub fn build_partition(lo: f64, hi: f64, breakpoints: &[f64], max_width: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut out = vec![cuts[0]];
    for w in cuts.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / pieces as f64;
        for j in 1..pieces {
            out.push(w[0] + step * j as f64);
        }
        out.push(w[1]);
    }
    out
}

fn line_partition(spec: &QuadratureSpec, breakpoints: &[f64]) -> Vec<f64> {
    let r = spec.spatial_radius;
    build_partition(-r, r, breakpoints, r / 20.0)
}

/// `∫ f(x) dx` over `[-R, R]`.
pub fn integrate_line<F>(f: F, spec: &QuadratureSpec) -> Result<Estimate<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    integrate_line_with(|x| Ok([f(x)]), spec, &[]).map(Estimate::first)
}

/// Vector-valued line integral with extra breakpoints.
pub fn integrate_line_with<const N: usize, F>(
    f: F,
    spec: &QuadratureSpec,
    breakpoints: &[f64],
) -> Result<Estimate<[Complex64; N]>>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    spec.validate()?;
    integrate_partition(f, &line_partition(spec, breakpoints), spec)
}

/// `∫_0^∞ g(E) dE`, evaluated as `∫_0^{k_max} g(E(k)) (hbar^2 k / m) dk`.
///
/// The Jacobian cancels an `E^{-1/2}` endpoint singularity exactly.
pub fn integrate_energy<F>(g: F, model: &BarrierModel, spec: &QuadratureSpec) -> Result<Estimate<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    integrate_energy_range(|e| Ok([g(e)]), model, 0.0, f64::INFINITY, spec).map(Estimate::first)
}

/// `∫_{e_lo}^{e_hi} g(E) dE` in the wave-number variable; `e_hi` is clipped at `E(k_max)`.
pub fn integrate_energy_range<const N: usize, F>(
    mut g: F,
    model: &BarrierModel,
    e_lo: f64,
    e_hi: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<[Complex64; N]>>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    spec.validate()?;
    if !(e_lo >= 0.0) || !(e_hi > e_lo) {
        return Err(domain(format!("energy range must satisfy 0 <= lo < hi, got [{e_lo}, {e_hi}]")));
    }
    let k_lo = model.wave_number(e_lo);
    let k_hi = if e_hi.is_finite() {
        model.wave_number(e_hi).min(spec.k_max)
    } else {
        spec.k_max
    };
    let partition = build_partition(k_lo, k_hi, &[], spec.k_max / 40.0);
    integrate_partition(
        |k| {
            let jac = model.energy_jacobian(k);
            let mut v = g(model.energy_of(k))?;
            for z in v.iter_mut() {
                *z *= jac;
            }
            Ok(v)
        },
        &partition,
        spec,
    )
}

/// Integral in the wave-number variable directly, over `[k_lo, k_hi]`.
pub fn integrate_wavenumber<const N: usize, F>(
    f: F,
    k_lo: f64,
    k_hi: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate<[Complex64; N]>>
where
    F: FnMut(f64) -> Result<[Complex64; N]>,
{
    spec.validate()?;
    let partition = build_partition(k_lo, k_hi, breakpoints, spec.k_max / 40.0);
    integrate_partition(f, &partition, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_line_integral() {
        let spec = QuadratureSpec::default();
        let r = integrate_line(|x| Complex64::new((-x * x).exp(), 0.0), &spec).unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12, "{:?}", r);
        assert_eq!(r.value.im, 0.0);
        assert!(r.error <= 1e-10);
    }

    #[test]
    fn zero_integrand_is_exactly_zero() {
        let spec = QuadratureSpec::default();
        let r = integrate_line(|_| Complex64::new(0.0, 0.0), &spec).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        let model = BarrierModel::default();
        let r = integrate_energy(|_| Complex64::new(0.0, 0.0), &model, &spec).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn exhausted_subdivisions_report_best_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 41,
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..Default::default()
        };
        let err = integrate_line(|x| Complex64::new((50.0 * x).cos().abs(), 0.0), &spec).unwrap_err();
        match err {
            Error::Accuracy(info) => {
                assert_eq!(info.estimate.len(), 1);
                assert!(info.achieved_error > info.requested_error);
                assert!(info.estimate[0].re > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partition_respects_breakpoints_and_width() {
        let p = build_partition(-1.0, 3.0, &[0.25, 7.0, -1.0], 0.5);
        assert!(p.contains(&0.25));
        assert_eq!(p[0], -1.0);
        assert_eq!(*p.last().unwrap(), 3.0);
        for w in p.windows(2) {
            assert!(w[1] > w[0] && w[1] - w[0] <= 0.5 + 1e-15);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = QuadratureSpec {
            k_max: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec {
            max_subdivisions: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
