use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypmass::engine::{
    calibrate_dn, charge_form, default_radii, exactness_residual, exactness_sides, expansion_residual,
    extrapolate_mass, linearization_pair, mass_at_radius, mass_vector, pairwise_sum, sphere_area, CalibrationInput,
    CheckOutcome, MassEngine, MassReport, REPORT_SCHEMA,
};
use hypmass::geometry::{Chart, LieDerivativeField, PolynomialField};
use hypmass::reference::CausalClass;
use hypmass::zoo::{ads_schwarzschild_half, pushforward, reference, trace_perturbation, DiffeoSpec, RadialProfile};
use hypmass::{ChartPoint, Error, QuadratureRule, StaticPotential};

fn half_area(n: usize) -> f64 {
    sphere_area(n - 1) / 2.0
}

/// Radial charge-form component of `e = f b` against `V_(0)`, reduced by hand
/// to `(n−1)(f r/√(1+r²) − √(1+r²) f')`.
fn trace_radial_charge(n: usize, f: f64, df: f64, r: f64) -> f64 {
    let s = (1.0 + r * r).sqrt();
    (n as f64 - 1.0) * (f * r / s - s * df)
}

fn random_polar(n: usize, rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> ChartPoint {
    let mut w: DVector<f64> = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    w[n - 1] = w[n - 1].abs();
    ChartPoint::polar_cartesian(w.normalize() * rng.gen_range(r_min..r_max)).unwrap()
}

#[test]
fn extrapolation_recovers_synthetic_tail() {
    let radii = default_radii(10.0, 5);
    let masses: Vec<f64> = radii.iter().map(|r| 5.0 + r.powi(-2)).collect();
    let fit = extrapolate_mass(&radii, &masses, 1.0).unwrap();
    assert!((fit.mass_inf - 5.0).abs() < 1e-9, "{:?}", fit);
    assert!((fit.exponent - 2.0).abs() < 1e-6, "{:?}", fit);
    assert!(fit.converged);

    let flat = extrapolate_mass(&radii, &[3.5; 5], 2.0).unwrap();
    assert_eq!(flat.mass_inf, 3.5);
    assert_eq!(flat.error, 0.0);
}

#[test]
fn extrapolation_rejects_bad_samples() {
    assert!(matches!(extrapolate_mass(&[10.0, 20.0], &[1.0, 1.0], 2.0), Err(Error::Extrapolation(_))));
    assert!(matches!(extrapolate_mass(&[10.0, 40.0, 20.0], &[1.0, 1.0, 1.0], 2.0), Err(Error::Extrapolation(_))));
    assert!(matches!(extrapolate_mass(&[10.0, 20.0, 40.0], &[1.0, 1.0], 2.0), Err(Error::Extrapolation(_))));
    assert!(matches!(extrapolate_mass(&[10.0, 20.0, 40.0], &[1.0, f64::NAN, 1.0], 2.0), Err(Error::Extrapolation(_))));
}

#[test]
fn quadrature_weights_match_areas() {
    for n in 3..=5 {
        for res in [8, 16, 32] {
            for r in [1.0, 10.0, 80.0] {
                let rule = QuadratureRule::new(n, r, res).unwrap();
                rule.validate().unwrap();
                let h = pairwise_sum(&rule.hemisphere.iter().map(|q| q.weight).collect::<Vec<_>>());
                assert!((h / (half_area(n) * r.powi(n as i32 - 1)) - 1.0).abs() < 1e-8);
                assert!(rule.hemisphere.iter().all(|q| q.omega[n - 1] >= 0.0 && (q.omega.norm() - 1.0).abs() < 1e-14));
                assert!(rule.equator.iter().all(|q| q.omega[n - 1] == 0.0));
            }
        }
    }
    assert!(QuadratureRule::new(3, 10.0, 0).is_err());
    assert!(QuadratureRule::new(3, -1.0, 8).is_err());
}

#[test]
fn charge_form_examples() {
    let v0 = StaticPotential::basis(3, 0).unwrap();
    let p = ChartPoint::polar(12.0, &[0.6, 0.0, 0.8]).unwrap();
    assert_eq!(charge_form(&v0, &reference(3, Chart::Polar).unwrap(), &p).unwrap().amax(), 0.0);

    let (c, pw) = (0.7, 3.0);
    let m = trace_perturbation(3, RadialProfile::InversePower { c, p: pw }, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..30 {
        let p = random_polar(3, &mut rng, 1.0, 40.0);
        let r = p.r();
        let u = charge_form(&v0, &m, &p).unwrap();
        let radial = trace_radial_charge(3, c * r.powf(-pw), -pw * c * r.powf(-pw - 1.0), r);
        let expect = p.coords.clone() * (radial / r);
        assert!((&u - &expect).amax() < 1e-9 * radial.abs().max(1e-12), "{} vs {}", u, expect);
    }

    let inner = ChartPoint::polar(0.5, &[0.6, 0.0, 0.8]).unwrap();
    assert!(matches!(charge_form(&v0, &m, &inner), Err(Error::BelowAsymptoticRegion { .. })));
    let ball = ChartPoint::ball(DVector::from_vec(vec![0.1, 0.2, 0.3])).unwrap();
    assert!(matches!(charge_form(&v0, &m, &ball), Err(Error::ChartMismatch { .. })));
}

#[test]
fn reference_mass_vanishes() {
    let v: Vec<StaticPotential> = (0..4).map(|a| StaticPotential::basis(4, a).unwrap()).collect();
    let m = reference(4, Chart::Polar).unwrap();
    for r in [10.0, 37.0, 160.0] {
        for res in [6, 12] {
            let s = MassEngine::global().radius_sample(&m, &v, &QuadratureRule::new(4, r, res).unwrap()).unwrap();
            assert!(s.mass().iter().all(|x| x.abs() < 1e-10));
        }
    }
    let mv = mass_vector(&reference(3, Chart::Polar).unwrap(), 12, &default_radii(10.0, 3)).unwrap();
    assert_eq!(mv.class, CausalClass::Zero);
}

#[test]
fn mass_rejects_inconsistent_inputs() {
    let m = ads_schwarzschild_half(3, 1.0).unwrap();
    let v = StaticPotential::basis(3, 0).unwrap();
    assert!(matches!(
        mass_at_radius(&m, &v, &QuadratureRule::new(3, 5.0, 8).unwrap()),
        Err(Error::BelowAsymptoticRegion { .. })
    ));
    assert!(matches!(
        mass_at_radius(&m, &v, &QuadratureRule::new(4, 20.0, 8).unwrap()),
        Err(Error::DimensionMismatch { .. })
    ));
    let v4 = StaticPotential::basis(4, 0).unwrap();
    assert!(matches!(
        mass_at_radius(&m, &v4, &QuadratureRule::new(3, 20.0, 8).unwrap()),
        Err(Error::DimensionMismatch { .. })
    ));
    let ball = reference(3, Chart::Ball).unwrap();
    assert!(matches!(
        mass_at_radius(&ball, &v, &QuadratureRule::new(3, 20.0, 8).unwrap()),
        Err(Error::ChartMismatch { .. })
    ));
}

#[test]
fn schwarzschild_equator_term_and_symmetry() {
    let n = 3;
    let m = ads_schwarzschild_half(n, 1.0).unwrap();
    let v: Vec<StaticPotential> = (0..n).map(|a| StaticPotential::basis(n, a).unwrap()).collect();
    let s = MassEngine::global().radius_sample(&m, &v, &QuadratureRule::new(n, 20.0, 16).unwrap()).unwrap();
    assert_eq!(s.equator[0], 0.0);
    assert!(s.flux[0] > 0.0);
    for a in 1..n {
        assert!(s.mass()[a].abs() < 1e-10 * s.flux[0]);
    }
}

#[test]
fn schwarzschild_fit_exponent_and_resolution() {
    // per-radius mass is m∞ (1 + 2m̄ r^{−n} + …) for this metric
    for n in [3, 4] {
        let m = ads_schwarzschild_half(n, 1.0).unwrap();
        let radii = default_radii(10.0, 5);
        let mv = mass_vector(&m, 16, &radii).unwrap();
        assert_eq!(mv.class, CausalClass::TimelikeFuture);
        let q = mv.fits[0].exponent;
        assert!((q - n as f64).abs() < 0.2 * n as f64, "n={} q={}", n, q);

        let v0 = StaticPotential::basis(n, 0).unwrap();
        let coarse = mass_at_radius(&m, &v0, &QuadratureRule::new(n, 20.0, 16).unwrap()).unwrap();
        let fine = mass_at_radius(&m, &v0, &QuadratureRule::new(n, 20.0, 32).unwrap()).unwrap();
        assert!(
            (coarse - fine).abs() <= mv.error_scale().max(1e-12 * fine.abs()),
            "{} {} {}",
            coarse,
            fine,
            mv.error_scale()
        );
    }
}

#[test]
fn trace_inverse_power_mass_matches_radial_reduction() {
    // e = c r^{−n} b: m(r) = (n−1) c (n r^{−2} + n + 1) |S^{n−1}_+|
    for n in [3, 4] {
        let c = 0.5;
        let m = trace_perturbation(n, RadialProfile::InversePower { c, p: n as f64 }, 1.0).unwrap();
        let radii = default_radii(10.0, 5);
        let mv = mass_vector(&m, 16, &radii).unwrap();
        let nf = n as f64;
        for s in &mv.samples {
            let expect = (nf - 1.0) * c * (nf * s.radius.powi(-2) + nf + 1.0) * half_area(n);
            assert!((s.mass()[0] / expect - 1.0).abs() < 1e-9);
            assert_eq!(s.equator[0], 0.0);
        }
        let limit = (nf - 1.0) * (nf + 1.0) * c * half_area(n);
        assert!((mv.fits[0].mass_inf / limit - 1.0).abs() < 1e-3);
        assert!((mv.fits[0].exponent - 2.0).abs() < 1e-3);
    }
}

#[test]
fn compact_support_has_no_mass() {
    let m = trace_perturbation(3, RadialProfile::Bump { c: 0.2, inner: 10.0, outer: 20.0 }, 1.0).unwrap();
    let mv = mass_vector(&m, 12, &[25.0, 50.0, 100.0]).unwrap();
    assert!(mv.vector.z.iter().all(|x| x.abs() < 1e-12));
    assert_eq!(mv.class, CausalClass::Zero);
}

#[test]
fn pushforward_of_reference_decays() {
    let n = 3;
    let m = pushforward(reference(n, Chart::Polar).unwrap(), DiffeoSpec::standard(n, 0.5));
    let radii = default_radii(10.0, 4);
    let v0 = StaticPotential::basis(n, 0).unwrap();
    let masses: Vec<f64> =
        radii.iter().map(|&r| mass_at_radius(&m, &v0, &QuadratureRule::new(n, r, 16).unwrap()).unwrap()).collect();
    assert!(masses.windows(2).all(|w| w[1].abs() < w[0].abs()), "{:?}", masses);
    let fit = extrapolate_mass(&radii, &masses, 1.0).unwrap();
    assert!(fit.exponent > 0.0);
    assert!(fit.mass_inf.abs() < 0.05 * masses[0].abs() + fit.error, "{:?} {:?}", fit, masses);
}

#[test]
fn runs_are_bitwise_reproducible() {
    let m = ads_schwarzschild_half(3, 1.0).unwrap();
    let radii = [10.0, 20.0, 40.0];
    let a = MassEngine::with_workers(3).unwrap().mass_vector(&m, 12, &radii).unwrap();
    let b = MassEngine::with_workers(3).unwrap().mass_vector(&m, 12, &radii).unwrap();
    let c = MassEngine::with_workers(1).unwrap().mass_vector(&m, 12, &radii).unwrap();
    for ((x, y), z) in a.samples.iter().zip(&b.samples).zip(&c.samples) {
        assert_eq!(x.flux, y.flux);
        assert_eq!(x.equator, y.equator);
        assert_eq!(x.flux, z.flux);
    }
    assert_eq!(a.vector.z, b.vector.z);
}

#[test]
fn calibration_needs_two_metrics() {
    let one = CalibrationInput { label: "a".into(), radii: vec![10.0], charge: vec![2.0], ricci: vec![1.0] };
    assert!(matches!(calibrate_dn(std::slice::from_ref(&one)), Err(Error::Calibration(_))));
    let zero = CalibrationInput { label: "z".into(), radii: vec![10.0], charge: vec![0.0], ricci: vec![0.0] };
    assert!(matches!(calibrate_dn(&[one.clone(), zero]), Err(Error::Calibration(_))));
    let two =
        CalibrationInput { label: "b".into(), radii: vec![10.0, 20.0], charge: vec![4.0, 6.0], ricci: vec![2.0, 3.0] };
    let c = calibrate_dn(&[one, two]).unwrap();
    assert!((c.d_n - 2.0).abs() < 1e-12);
    assert!(c.passed());
    let off = CalibrationInput { label: "c".into(), radii: vec![10.0], charge: vec![3.0], ricci: vec![1.0] };
    let two = CalibrationInput { label: "b".into(), radii: vec![10.0], charge: vec![2.0], ricci: vec![1.0] };
    assert!(!calibrate_dn(&[two, off]).unwrap().consistent);
}

#[test]
fn exactness_trivial_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 3..=4 {
        let zero = PolynomialField::<f64>::zero(n);
        let rot = PolynomialField::<f64>::rotation(n, 0, 1);
        for a in 0..n {
            let v = StaticPotential::basis(n, a).unwrap();
            for _ in 0..10 {
                let p = random_polar(n, &mut rng, 0.0, 5.0);
                assert_eq!(exactness_residual(&v, &zero, &p).unwrap(), 0.0);
                let (u, d) = exactness_sides(&v, &rot, &p).unwrap();
                let scale = 1.0 + p.r().powi(2);
                assert!(u.amax() < 1e-6 * scale && d.amax() < 1e-6 * scale, "{} {}", u, d);
            }
        }
    }
}

#[test]
fn expansion_and_linearization_of_gauge_perturbation() {
    let n = 3;
    let x = PolynomialField::new(
        DVector::from_vec(vec![0.1, -0.2, 0.0]),
        DMatrix::from_row_slice(3, 3, &[0.3, 0.1, 0.0, -0.2, 0.1, 0.0, 0.0, 0.0, 0.2]),
        vec![DMatrix::from_element(3, 3, 0.05), DMatrix::zeros(3, 3), DMatrix::identity(3, 3) * 0.02],
    );
    let e = LieDerivativeField { field: x, chart: Chart::Polar, scale: 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for a in 0..n {
        let v = StaticPotential::basis(n, a).unwrap();
        for _ in 0..10 {
            let p = random_polar(n, &mut rng, 0.2, 2.0);
            assert_eq!(expansion_residual(&e, &v, &p, 0.0).unwrap(), 0.0);
            let (lhs, rhs) = linearization_pair(&e, &v, &p).unwrap();
            assert!((lhs - rhs).abs() < 1e-5 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
            let r1 = expansion_residual(&e, &v, &p, 1e-2).unwrap();
            let r2 = expansion_residual(&e, &v, &p, 5e-3).unwrap();
            assert!(r2 < 0.3 * r1 + 1e-9, "{} {}", r1, r2);
        }
    }
}

#[test]
fn report_json_shape() {
    let m = ads_schwarzschild_half(3, 1.0).unwrap();
    let radii = [10.0, 20.0, 40.0];
    let mv = mass_vector(&m, 8, &radii).unwrap();
    let mut report = MassReport::new("ads-schwarzschild", 3, 8, &radii);
    report.record_mass(&mv);
    report.push_check(CheckOutcome::at_most("exactness", 1e-9, 1e-5).with_detail("100 fields"));
    assert!(report.passed());
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["schema"], REPORT_SCHEMA);
    assert_eq!(json["causal_class"], "TIMELIKE_FUTURE");
    for key in
        ["radii", "flux", "equator", "mass", "extrapolated", "error", "exponent", "converged", "lorentz_norm", "checks"]
    {
        assert!(json.get(key).is_some(), "missing {}", key);
    }
    assert_eq!(json["mass"].as_array().unwrap().len(), 3);
    assert_eq!(json["checks"][0]["detail"], "100 fields");
    assert_eq!(report.to_json(), report.to_json());
    assert!(report.render_table().contains("TIMELIKE_FUTURE"));

    report.push_check(CheckOutcome::at_most("broken", f64::NAN, 1.0));
    assert!(!report.passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairwise_sum_matches_naive(xs in prop::collection::vec(-1e3..1e3f64, 0..200)) {
        let naive: f64 = xs.iter().sum();
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-9 * (1.0 + xs.iter().map(|x| x.abs()).sum::<f64>()));
    }

    #[test]
    fn extrapolation_recovers_model(m_inf in -10.0..10.0f64, c in 0.5..5.0f64, q in 0.5..4.0f64) {
        let radii = default_radii(10.0, 5);
        let masses: Vec<f64> = radii.iter().map(|r| m_inf + c * r.powf(-q)).collect();
        let fit = extrapolate_mass(&radii, &masses, 2.0).unwrap();
        prop_assert!((fit.mass_inf - m_inf).abs() < 1e-6 * (1.0 + c), "{:?}", fit);
    }
}
