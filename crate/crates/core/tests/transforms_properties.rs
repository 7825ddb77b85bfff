use barrier_rhs::quadrature::QuadratureSpec;
use barrier_rhs::testspace::{build_test_function, norm, FamilyDescriptor};
use barrier_rhs::transforms::{direct_matrix_element, energy_transform, spectral_matrix_element, synthesize_energy_channels};
use barrier_rhs::verify::{run_suite, Check};
use barrier_rhs::{BarrierModel, Observable, SignLabel};

#[test]
fn each_channel_alone_is_incomplete() {
    let model = BarrierModel::default();
    let spec = QuadratureSpec::default();
    // Zero mean momentum: both propagation directions carry weight.
    let f = build_test_function(&FamilyDescriptor::packet(-20.0, 1.0, 0.0, 0), &model).unwrap();
    let nf = norm(&f, &spec).unwrap();
    let amp = energy_transform(&f, SignLabel::Plus, &spec).unwrap();
    for mask in [[true, false], [false, true]] {
        let worst = (0..41)
            .map(|i| {
                let x = -24.0 + 0.2 * i as f64;
                (synthesize_energy_channels(&amp, x, mask, &spec).unwrap() - f.value(x)).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst > 0.1 * nf, "mask {mask:?}: {worst}");
    }
    let full = synthesize_energy_channels(&amp, -20.3, [true, true], &spec).unwrap();
    assert!((full - f.value(-20.3)).norm() < 1e-8 * nf);
}

#[test]
fn spectral_and_direct_matrix_elements_agree() {
    let model = BarrierModel::default();
    let spec = QuadratureSpec::default();
    let pairs = [
        (FamilyDescriptor::packet(-20.0, 1.5, 2.0, 1), FamilyDescriptor::packet(-19.0, 1.0, 1.0, 0)),
        (FamilyDescriptor::packet(21.0, 1.0, -2.5, 0), FamilyDescriptor::packet(21.5, 2.0, -1.0, 2)),
    ];
    for (df, dg) in pairs {
        let f = build_test_function(&df, &model).unwrap();
        let g = build_test_function(&dg, &model).unwrap();
        let scale = norm(&f, &spec).unwrap() * norm(&g, &spec).unwrap();
        for obs in Observable::ALL {
            let s = spectral_matrix_element(obs, &f, &g, &spec).unwrap();
            let d = direct_matrix_element(obs, &f, &g, &spec).unwrap();
            assert!((s - d).norm() < 1e-6 * scale, "{obs:?}: {s} vs {d}");
        }
    }
}

#[test]
fn reports_are_bit_reproducible() {
    let model = BarrierModel::default();
    let spec = QuadratureSpec::default();
    let checks = [Check::EigenEquation, Check::Commutators, Check::DeltaNormalization];
    let a = run_suite(&model, &spec, &checks, None).unwrap();
    let b = run_suite(&model, &spec, &checks, None).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.residual.to_bits(), y.residual.to_bits());
    }
}

#[test]
fn full_default_suite_passes() {
    let reports = run_suite(&BarrierModel::default(), &QuadratureSpec::default(), &Check::ALL, None).unwrap();
    for r in &reports {
        assert!(r.passed && !r.inconclusive, "{r:?}");
        assert!(!r.witnesses.is_empty());
    }
}
