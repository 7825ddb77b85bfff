use anyhow::Result;
use barrier_rhs::eigenbasis::{eval_energy_eigenfunction, EigenfunctionHandle};
use barrier_rhs::quadrature::QuadratureSpec;
use barrier_rhs::scattering::unitarity_defect;
use barrier_rhs::testspace::{build_test_function, normalized};
use barrier_rhs::transforms::{
    energy_amplitude_at, energy_transform, momentum_amplitude_at, momentum_transform, spectral_probability,
    synthesize_energy, synthesize_momentum,
};
use barrier_rhs::verify::{run_suite, Check, ResidualReport};
use barrier_rhs::{solve_matching, BarrierModel, Channel, SignLabel};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Grid, TransformBasis};
use crate::output::{cplx, csv_table, num};

pub const COEFF_HEADER: [&str; 11] = [
    "E", "k", "re_T", "im_T", "re_Rl", "im_Rl", "re_Rr", "im_Rr", "abs_T2", "abs_Rl2", "unitarity_defect",
];

pub fn coeffs(model: &BarrierModel, energies: &Grid) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for e in energies.points()? {
        let s = solve_matching(model, e)?;
        let mut row = vec![num(e), num(s.wave.k)];
        for z in [s.t, s.r_l, s.r_r] {
            row.extend(cplx(z));
        }
        row.push(num(s.t.norm_sqr()));
        row.push(num(s.r_l.norm_sqr()));
        row.push(num(unitarity_defect(&s.s_matrix())));
        rows.push(row);
    }
    csv_table(&COEFF_HEADER, &rows)
}

pub fn eigfun(model: &BarrierModel, energy: f64, channel: Channel, sign: SignLabel, x: &Grid) -> Result<Vec<u8>> {
    let h = EigenfunctionHandle::new(model, energy, channel, sign)?;
    let rows: Vec<Vec<String>> = x
        .points()?
        .into_iter()
        .map(|x| {
            let psi = eval_energy_eigenfunction(&h, x);
            vec![num(x), num(psi.re), num(psi.im), num(psi.norm_sqr())]
        })
        .collect();
    csv_table(&["x", "re_psi", "im_psi", "abs2_psi"], &rows)
}

fn energy_sign(basis: TransformBasis) -> Option<SignLabel> {
    match basis {
        TransformBasis::EnergyPlus => Some(SignLabel::Plus),
        TransformBasis::EnergyMinus => Some(SignLabel::Minus),
        TransformBasis::Momentum => None,
    }
}

/// Amplitudes evaluated directly at each grid point.
pub fn transform(
    model: &BarrierModel,
    spec: &QuadratureSpec,
    packet: &barrier_rhs::testspace::FamilyDescriptor,
    basis: TransformBasis,
    grid: &Grid,
) -> Result<Vec<u8>> {
    let f = build_test_function(packet, model)?;
    let points = grid.points()?;
    match energy_sign(basis) {
        Some(sign) => {
            let mut rows = Vec::new();
            for e in points {
                let [al, ar] = energy_amplitude_at(&f, e, sign, spec)?;
                let mut row = vec![num(e), num(model.wave_number(e))];
                row.extend(cplx(al));
                row.extend(cplx(ar));
                rows.push(row);
            }
            csv_table(&["E", "k", "re_al", "im_al", "re_ar", "im_ar"], &rows)
        }
        None => {
            let mut rows = Vec::new();
            for p in points {
                let a = momentum_amplitude_at(&f, p, spec)?;
                let mut row = vec![num(p)];
                row.extend(cplx(a));
                rows.push(row);
            }
            csv_table(&["p", "re_a", "im_a"], &rows)
        }
    }
}

pub fn reconstruct(
    model: &BarrierModel,
    spec: &QuadratureSpec,
    packet: &barrier_rhs::testspace::FamilyDescriptor,
    basis: TransformBasis,
    x: &Grid,
) -> Result<Vec<u8>> {
    let f = build_test_function(packet, model)?;
    let points = x.points()?;
    let synthesized: Vec<Complex64> = match energy_sign(basis) {
        Some(sign) => {
            let amp = energy_transform(&f, sign, spec)?;
            points.iter().map(|&x| synthesize_energy(&amp, x, spec)).collect::<Result<_, _>>()?
        }
        None => {
            let amp = momentum_transform(&f, spec)?;
            points.iter().map(|&x| synthesize_momentum(&amp, x, spec)).collect::<Result<_, _>>()?
        }
    };
    let rows: Vec<Vec<String>> = points
        .iter()
        .zip(&synthesized)
        .map(|(&x, &s)| {
            let v = f.value(x);
            let mut row = vec![num(x)];
            row.extend(cplx(v));
            row.extend(cplx(s));
            row.push(num((s - v).norm()));
            row
        })
        .collect();
    csv_table(&["x", "re_f", "im_f", "re_synth", "im_synth", "abs_error"], &rows)
}

#[derive(Debug, Serialize)]
struct ProbeOutput {
    packet: String,
    e_lo: f64,
    e_hi: Option<f64>,
    sign: SignLabel,
    probability: f64,
    cutoff_mass: f64,
}

pub fn probe(
    model: &BarrierModel,
    spec: &QuadratureSpec,
    packet: &barrier_rhs::testspace::FamilyDescriptor,
    e_lo: f64,
    e_hi: Option<f64>,
    sign: SignLabel,
) -> Result<Vec<u8>> {
    let f = normalized(&build_test_function(packet, model)?, spec)?;
    let p = spectral_probability(&f, e_lo, e_hi.unwrap_or(f64::INFINITY), sign, spec)?;
    let out = ProbeOutput {
        packet: packet.to_string(),
        e_lo,
        e_hi,
        sign,
        probability: p.probability,
        cutoff_mass: p.cutoff_mass,
    };
    let mut bytes = serde_json::to_vec_pretty(&out)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn verify(
    model: &BarrierModel,
    spec: &QuadratureSpec,
    checks: &[Check],
    tolerance: Option<f64>,
) -> Result<(Vec<u8>, Vec<ResidualReport>)> {
    let reports = run_suite(model, spec, checks, tolerance)?;
    let mut bytes = serde_json::to_vec_pretty(&reports)?;
    bytes.push(b'\n');
    Ok((bytes, reports))
}
