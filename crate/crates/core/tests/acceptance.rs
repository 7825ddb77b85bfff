//! End-to-end acceptance run: one PASS/FAIL line per criterion, each judged
//! on its numerical tolerance and its runtime budget.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use barrier_rhs::quadrature::QuadratureSpec;
use barrier_rhs::scattering::{s_matrix, unitarity_defect};
use barrier_rhs::testspace::{build_test_function, norm, normalized, seminorm, TestFunction};
use barrier_rhs::transforms::{
    energy_transform, parseval_defect, reconstruction_report, spectral_probability, synthesize_energy, Basis,
};
use barrier_rhs::verify::{
    check_commutators, check_delta_normalization, check_eigen_equation, check_invariance_battery,
    check_momentum_delta_normalization, check_momentum_eigen_equation, default_battery, default_battery_descriptors,
    random_pairs, GaussianProbe, DEFAULT_PAIR_SEED,
};
use barrier_rhs::{solve_matching, BarrierModel, Channel, Observable, Result, SignLabel};
use common::{log_grid, oracle_discrepancy};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn model() -> BarrierModel {
    BarrierModel::default()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn worst<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn scattering_oracle() -> Result<Outcome> {
    let m = model();
    let d = worst(log_grid(0.01, 100.0, 50).into_iter().map(|e| oracle_discrepancy(&m, e)));
    outcome(d < 1e-8, format!("max relative coefficient discrepancy {d:.2e} over 50 energies"))
}

fn unitarity() -> Result<Outcome> {
    let m = model();
    let mut d: f64 = 0.0;
    for e in log_grid(1e-3, 1e3, 200) {
        d = d.max(unitarity_defect(&s_matrix(&m, e)?));
    }
    outcome(d < 1e-10, format!("max ‖S†S - I‖ {d:.2e} over 200 energies"))
}

fn tunneling_spot_values() -> Result<Outcome> {
    let m = model();
    let t1 = solve_matching(&m, 1.0)?.t.norm_sqr();
    let expected = 1.0 / (1.0 + 1f64.sinh().powi(2));
    let tr = solve_matching(&m, 2.0 + PI * PI)?.t.norm_sqr();
    let (e1, e2) = ((t1 - expected).abs(), (tr - 1.0).abs());
    outcome(
        e1 < 1e-8 && e2 < 1e-8,
        format!("|T(1)|² = {t1:.9} (error {e1:.1e}), |T(2+π²)|² error {e2:.1e}"),
    )
}

/// 40 points across `c ± 4σ` and 10 across `[-30, 30]`.
fn probe_points(center: f64, width: f64) -> Vec<f64> {
    let near = (0..40).map(|i| center + width * (-4.0 + 8.0 * i as f64 / 39.0));
    let far = (0..10).map(|i| -30.0 + 60.0 * i as f64 / 9.0);
    near.chain(far).collect()
}

fn reconstruction() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let mut ratio: f64 = 0.0;
    for desc in default_battery_descriptors() {
        let f = build_test_function(&desc, &m)?;
        let barrier_rhs::testspace::FamilyDescriptor::GaussianPacket { center, width, .. } = desc;
        let points = probe_points(center, width);
        let nf = norm(&f, &s)?;
        for sign in [SignLabel::Plus, SignLabel::Minus] {
            let amp = energy_transform(&f, sign, &s)?;
            let rep = reconstruction_report(&f, |x| synthesize_energy(&amp, x, &s), &points)?;
            ratio = ratio.max(rep.max_residual / nf);
        }
    }
    outcome(ratio < 1e-6, format!("max |f - synthesis| / ‖f‖ = {ratio:.2e} over 6 packets × 2 bases"))
}

fn parseval() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let (mut energy, mut momentum): (f64, f64) = (0.0, 0.0);
    // Pairs alternate between the two energy bases.
    for (i, (f, g)) in random_pairs(&m, DEFAULT_PAIR_SEED, 10)?.into_iter().enumerate() {
        let scale = norm(&f, &s)? * norm(&g, &s)?;
        let sign = if i % 2 == 0 { SignLabel::Plus } else { SignLabel::Minus };
        energy = energy.max(parseval_defect(&f, &g, Basis::Energy(sign), &s)? / scale);
        momentum = momentum.max(parseval_defect(&f, &g, Basis::Momentum, &s)? / scale);
    }
    outcome(
        energy < 1e-6 && momentum < 1e-8,
        format!("relative overlap defect: energy {energy:.2e}, momentum {momentum:.2e}"),
    )
}

fn eigen_equations() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let battery = default_battery(&m)?;
    let mut h: f64 = 0.0;
    for e in log_grid(0.05, 50.0, 10) {
        for ch in Channel::BOTH {
            for sign in [SignLabel::Plus, SignLabel::Minus] {
                h = h.max(check_eigen_equation(&m, e, ch, sign, &battery, &s)?.residual);
            }
        }
    }
    let mut p: f64 = 0.0;
    for i in 0..10 {
        let momentum = -4.5 + i as f64;
        p = p.max(check_momentum_eigen_equation(&m, momentum, &battery, &s)?.residual);
    }
    outcome(h < 1e-6 && p < 1e-8, format!("normalized residual: H {h:.2e}, P {p:.2e}"))
}

fn delta_normalization() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let probe = GaussianProbe::new(5.0, 0.5);
    let mut energy: f64 = 0.0;
    for sign in [SignLabel::Plus, SignLabel::Minus] {
        for ch in Channel::BOTH {
            energy = energy.max(check_delta_normalization(&m, sign, &probe, ch, &s)?.residual);
        }
    }
    let momentum = check_momentum_delta_normalization(&m, &GaussianProbe::new(2.0, 0.5), &s)?.residual;
    outcome(
        energy < 1e-5 && momentum < 1e-8,
        format!("round-trip residual incl. cross-channel leakage: energy {energy:.2e}, momentum {momentum:.2e}"),
    )
}

fn commutators() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let mut r: f64 = 0.0;
    for (f, g) in random_pairs(&m, DEFAULT_PAIR_SEED, 10)? {
        r = r.max(check_commutators(&f, &g, &s)?.residual);
    }
    outcome(r < 1e-8, format!("max residual / (‖f‖‖g‖) {r:.2e} over 10 pairs"))
}

fn membership() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let mut all_finite = true;
    let mut largest: f64 = 0.0;
    let mut count = 0usize;
    for f in default_battery(&m)? {
        let mut family = vec![f.clone()];
        for obs in Observable::ALL {
            family.push(f.apply(obs)?);
        }
        for g in &family {
            for n in 0..=8 {
                for mm in 0..=8 - n {
                    for l in 0..=(8 - n - mm) / 2 {
                        let v = seminorm(g, n, mm, l, &s)?;
                        all_finite &= v.is_finite();
                        largest = largest.max(v);
                        count += 1;
                    }
                }
            }
        }
    }
    let lorentzian = check_invariance_battery(&TestFunction::lorentzian(&m), 1, &s)?;
    outcome(
        all_finite && !lorentzian.passed,
        format!(
            "{count} seminorms finite (largest {largest:.2e}); 1/(x+i) flagged: {}",
            !lorentzian.passed
        ),
    )
}

fn spectral_probabilities() -> Result<Outcome> {
    let m = model();
    let s = spec();
    let (mut total, mut agree): (f64, f64) = (0.0, 0.0);
    for f in default_battery(&m)? {
        let f = normalized(&f, &s)?;
        let plus = spectral_probability(&f, 0.0, f64::INFINITY, SignLabel::Plus, &s)?;
        let minus = spectral_probability(&f, 0.0, f64::INFINITY, SignLabel::Minus, &s)?;
        total = total.max((plus.probability - 1.0).abs()).max((minus.probability - 1.0).abs());
        let wp = spectral_probability(&f, 1.0, 6.0, SignLabel::Plus, &s)?;
        let wm = spectral_probability(&f, 1.0, 6.0, SignLabel::Minus, &s)?;
        agree = agree.max((plus.probability - minus.probability).abs());
        agree = agree.max((wp.probability - wm.probability).abs());
    }
    outcome(
        total < 1e-6 && agree < 1e-6,
        format!("|P[0,∞) - 1| {total:.2e}; |P+ - P-| {agree:.2e}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, u64, fn() -> Result<Outcome>);
    let criteria: [Criterion; 10] = [
        (1, "scattering oracle equivalence", 10, scattering_oracle),
        (2, "S-matrix unitarity", 5, unitarity),
        (3, "tunneling spot values", 1, tunneling_spot_values),
        (4, "completeness and reconstruction", 120, reconstruction),
        (5, "Parseval identity", 60, parseval),
        (6, "distributional eigen-equations", 120, eigen_equations),
        (7, "delta normalization", 60, delta_normalization),
        (8, "commutators", 30, commutators),
        (9, "membership and invariance", 120, membership),
        (10, "spectral probability", 60, spectral_probabilities),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (passed, detail) = match result {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} criterion {id:>2} ({name}): {detail} [{:.2}s, budget {budget}s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
