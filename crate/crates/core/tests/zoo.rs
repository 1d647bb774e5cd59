use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypmass::engine::{default_radii, mass_vector};
use hypmass::geometry::{curvature, Chart, MetricField};
use hypmass::reference::CausalClass;
use hypmass::zoo::{
    ads_schwarzschild_half, collar_coordinate, collar_radius, conformally_compact, exp_displacement, geodesic_flow_rk4,
    horizon_radius, load_conformal_data, parse_conformal_data, pushforward, reference, trace_perturbation,
    validate_decay, ConformallyCompactData, CubicSpline, DiffeoSpec, GridTensor, RadialProfile, RoundMultiple,
    SphereTensor,
};
use hypmass::{ChartPoint, Error};

fn random_polar(n: usize, rng: &mut ChaCha8Rng, r_min: f64, r_max: f64) -> DVector<f64> {
    let mut w: DVector<f64> = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    w[n - 1] = w[n - 1].abs();
    w.normalize() * rng.gen_range(r_min..r_max)
}

fn round_data(c: f64, t_max: f64) -> ConformallyCompactData<f64> {
    ConformallyCompactData {
        dim: 3,
        t_max,
        h: Some(Arc::new(RoundMultiple { dim: 3, c }) as Arc<dyn SphereTensor<f64>>),
        remainder: None,
    }
}

fn example_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/round_h.ccd")
}

#[test]
fn natural_spline_reproduces_lines_and_knots() {
    let s = CubicSpline::natural(1.0, 0.5, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    for t in [1.0, 1.3, 2.2, 3.0] {
        assert!((s.eval(t) - (2.0 * t - 1.0)).abs() < 1e-13);
    }
    let vals: Vec<f64> = (0..9).map(|i| (i as f64 * 0.3).sin()).collect();
    let s = CubicSpline::natural(0.0, 0.3, vals.clone()).unwrap();
    for (i, v) in vals.iter().enumerate() {
        assert!((s.eval(i as f64 * 0.3) - v).abs() < 1e-13);
    }
    assert!((s.eval(1.05) - 1.05f64.sin()).abs() < 1e-3);
    assert!(CubicSpline::natural(0.0, 0.3, vec![1.0]).is_err());
    assert!(CubicSpline::natural(0.0, 0.0, vec![1.0, 2.0]).is_err());
}

#[test]
fn periodic_spline_wraps() {
    let m = 16;
    let vals: Vec<f64> = (0..m).map(|j| (2.0 * PI * j as f64 / m as f64).cos()).collect();
    let s = CubicSpline::periodic(0.0, 2.0 * PI, vals).unwrap();
    for t in [0.0, 0.4, 3.0, 6.0] {
        assert!((s.eval(t) - t.cos()).abs() < 1e-3);
        assert!((s.eval(t) - s.eval(t + 2.0 * PI)).abs() < 1e-12);
        assert!((s.eval(t) - s.eval(t - 4.0 * PI)).abs() < 1e-12);
    }
    let flat = CubicSpline::periodic(0.0, 1.0, vec![2.5; 5]).unwrap();
    assert_eq!(flat.eval(0.77), 2.5);
    assert!(CubicSpline::periodic(0.0, 1.0, vec![1.0, 2.0]).is_err());
}

#[test]
fn closed_form_exponential_matches_geodesic_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for n in 3..=4 {
        let spec = DiffeoSpec::standard(n, 0.8);
        for _ in 0..20 {
            let y = random_polar(n, &mut rng, 0.0, 4.0);
            let closed = &y + exp_displacement(&spec, &y).0;
            let v = spec.zeta(&y);
            let coarse = geodesic_flow_rk4(&y, &v, 50);
            let fine = geodesic_flow_rk4(&y, &v, 100);
            assert!((&closed - &fine).amax() < 1e-9 * (1.0 + y.norm()), "{} {}", closed, fine);
            assert!((&coarse - &fine).amax() < 1e-7 * (1.0 + y.norm()));
        }
    }
}

#[test]
fn displacement_jacobian_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let spec = DiffeoSpec::standard(3, 0.8);
    for _ in 0..10 {
        let y = random_polar(3, &mut rng, 0.1, 3.0);
        let (_, j) = exp_displacement(&spec, &y);
        for k in 0..3 {
            let mut e = DVector::zeros(3);
            e[k] = 1e-5;
            let d = (exp_displacement(&spec, &(&y + &e)).0 - exp_displacement(&spec, &(&y - &e)).0) / 2e-5;
            assert!((d - j.column(k)).amax() < 1e-7);
        }
    }
}

#[test]
fn diffeo_spec_rejects_bad_fields() {
    let mut a = DMatrix::identity(3, 3);
    a[(2, 0)] = 0.1;
    assert!(DiffeoSpec::new(1.0, a, 2.0).is_err());
    assert!(matches!(DiffeoSpec::new(1.0, DMatrix::identity(3, 3), 0.4), Err(Error::Decay(_))));
    assert!(DiffeoSpec::new(1.0, DMatrix::identity(3, 2), 2.0).is_err());
    assert!(DiffeoSpec::new(f64::NAN, DMatrix::identity(3, 3), 2.0).is_err());
}

#[test]
fn pushforward_with_vanishing_field_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let inner = ads_schwarzschild_half(3, 1.0).unwrap();
    let m = pushforward(inner, DiffeoSpec::new(0.0, DMatrix::identity(3, 3), 2.0).unwrap());
    for _ in 0..20 {
        let y = random_polar(3, &mut rng, 3.0, 50.0);
        assert_eq!(m.map_point(&y), y);
        let a = MetricField::<f64>::perturbation(&m, &y).unwrap();
        let b = MetricField::<f64>::perturbation(&inner, &y).unwrap();
        assert!((a - b).amax() < 1e-15);
    }
}

#[test]
fn pushforward_keeps_scalar_curvature() {
    // (F⁻¹)^* g at F(y) has the scalar curvature of g at y
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let inner = trace_perturbation(3, RadialProfile::Smoothed { c: 0.3, p: 3.0 }, 0.01).unwrap();
    let spec = DiffeoSpec::standard(3, 0.3);
    let m = pushforward(inner, spec.clone());
    for _ in 0..10 {
        let y = random_polar(3, &mut rng, 0.5, 3.0);
        let fy = &y + exp_displacement(&spec, &y).0;
        // pullback convention: perturbation at y describes F^*g, so compare at y against g at F(y)
        let pushed = curvature(&m, &ChartPoint::polar_cartesian(y.clone()).unwrap()).unwrap().scalar;
        let orig = curvature(&inner, &ChartPoint::polar_cartesian(fy).unwrap()).unwrap().scalar;
        assert!((pushed - orig).abs() < 1e-5 * orig.abs(), "{} vs {}", pushed, orig);
    }
}

#[test]
fn schwarzschild_horizon_and_zero_mass() {
    let r_h = horizon_radius(3, 1.0);
    assert!((1.0 + r_h * r_h - 2.0 / r_h).abs() < 1e-12);
    assert_eq!(horizon_radius(3, 0.0), 0.0);
    let m = ads_schwarzschild_half(3, 1.0).unwrap();
    let inside = DVector::from_vec(vec![0.0, 0.0, r_h + 0.05]);
    assert!(matches!(MetricField::<f64>::perturbation(&m, &inside), Err(Error::InsideHorizon { .. })));
    assert!(ads_schwarzschild_half(3, -1.0).is_err());
    assert!(matches!(ads_schwarzschild_half(2, 1.0), Err(Error::UnsupportedDimension(2))));

    let flat = ads_schwarzschild_half(4, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..10 {
        let y = random_polar(4, &mut rng, 0.1, 30.0);
        assert_eq!(MetricField::<f64>::perturbation(&flat, &y).unwrap().amax(), 0.0);
    }
}

#[test]
fn schwarzschild_is_reflection_symmetric() {
    let m = ads_schwarzschild_half(3, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    let flip = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0]));
    for _ in 0..20 {
        let y = random_polar(3, &mut rng, 3.0, 40.0);
        let mut z = y.clone();
        z[2] = -z[2];
        let e = MetricField::<f64>::perturbation(&m, &y).unwrap();
        let ez = MetricField::<f64>::perturbation(&m, &z).unwrap();
        assert!((&flip * ez * &flip - e).amax() < 1e-15);
    }
}

#[test]
fn constructors_pass_decay_validation() {
    let ads = ads_schwarzschild_half(3, 1.0).unwrap();
    let tr = trace_perturbation(3, RadialProfile::Smoothed { c: 0.5, p: 3.0 }, 10.0).unwrap();
    let cc = conformally_compact(round_data(0.5, 0.1)).unwrap();
    let pf = pushforward(ads_schwarzschild_half(3, 1.0).unwrap(), DiffeoSpec::standard(3, 0.5));
    let bump = trace_perturbation(3, RadialProfile::Bump { c: 0.2, inner: 2.0, outer: 5.0 }, 10.0).unwrap();
    let checks: Vec<(&str, &dyn MetricField<f64>)> =
        vec![("ads", &ads), ("trace", &tr), ("conformal", &cc), ("pushforward", &pf), ("bump", &bump)];
    for (name, m) in checks {
        let c = validate_decay(m, 4, 12).unwrap();
        assert!(c.passed, "{}: {:?}", name, c);
    }
    assert!(validate_decay(&reference(3, Chart::Ball).unwrap(), 3, 4).is_err());
}

#[test]
fn trace_constructor_errors() {
    assert!(matches!(trace_perturbation(4, RadialProfile::InversePower { c: 1.0, p: 2.0 }, 1.0), Err(Error::Decay(_))));
    assert!(trace_perturbation(3, RadialProfile::Bump { c: 1.0, inner: 3.0, outer: 2.0 }, 1.0).is_err());
    assert!(trace_perturbation(3, RadialProfile::Smoothed { c: 1.0, p: 3.0 }, 0.0).is_err());
    let zero = trace_perturbation(3, RadialProfile::InversePower { c: 0.0, p: 1.0 }, 1.0).unwrap();
    assert_eq!(MetricField::<f64>::perturbation(&zero, &DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap().amax(), 0.0);
}

#[test]
fn collar_coordinate_round_trips() {
    for r in [0.1, 1.0, 10.0, 1e3, 1e6] {
        let t: f64 = collar_coordinate(r);
        assert!((t.sinh() * r - 1.0).abs() < 1e-14);
        assert!((collar_radius(t) / r - 1.0).abs() < 1e-13);
    }
}

#[test]
fn zero_conformal_data_is_the_reference() {
    let m = conformally_compact(ConformallyCompactData::<f64>::zero(4, 0.5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for _ in 0..50 {
        let y = random_polar(4, &mut rng, 2.0, 500.0);
        assert!(m.perturbation(&y).unwrap().amax() < 1e-10);
        let g = m.components(&ChartPoint::polar_cartesian(y.clone()).unwrap()).unwrap();
        let b = Chart::Polar.background(&y).unwrap().metric;
        assert!((g - b).amax() < 1e-10);
    }
}

#[test]
fn conformal_mass_is_linear_in_the_data() {
    let radii = default_radii(10.0, 4);
    let a = mass_vector(&conformally_compact(round_data(0.5, 0.1)).unwrap(), 16, &radii).unwrap();
    let b = mass_vector(&conformally_compact(round_data(1.0, 0.1)).unwrap(), 16, &radii).unwrap();
    let p0 = a.vector.z[0];
    assert!(p0 > 0.0);
    assert!((b.vector.z[0] / p0 - 2.0).abs() < 1e-3, "{} {}", p0, b.vector.z[0]);
    for i in 1..3 {
        assert!(a.vector.z[i].abs() < 1e-8 * p0 && b.vector.z[i].abs() < 1e-8 * p0);
    }
    assert_eq!(a.class, CausalClass::TimelikeFuture);
}

#[test]
fn conformal_data_errors() {
    let mut d = round_data(1.0, 0.5);
    d.t_max = 0.0;
    assert!(matches!(conformally_compact(d), Err(Error::ConformalData(_))));
    let skew =
        hypmass::zoo::ConstantTensor(DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    let mut d = round_data(1.0, 0.5);
    d.h = Some(Arc::new(skew));
    assert!(matches!(conformally_compact(d), Err(Error::ConformalData(_))));
    let mut d = round_data(1.0, 0.5);
    d.remainder =
        Some(hypmass::zoo::Remainder { power: 4.0, tensor: Arc::new(RoundMultiple { dim: 3, c: 0.1 }), bound: 1.0 });
    assert!(matches!(conformally_compact(d), Err(Error::ConformalData(_))));
    let mut d = round_data(1.0, 0.5);
    d.remainder =
        Some(hypmass::zoo::Remainder { power: 5.0, tensor: Arc::new(RoundMultiple { dim: 3, c: 2.0 }), bound: 1.0 });
    assert!(matches!(conformally_compact(d), Err(Error::ConformalData(_))));
}

#[test]
fn parser_rejects_malformed_files() {
    let ok = "n = 3\nt_max = 0.5\ngrid = 2 3\n[h]\n1 0 0 1 0 1\n1 0 0 1 0 1\n1 0 0 1 0 1\n1 0 0 1 0 1\n1 0 0 1 0 1\n1 0 0 1 0 1\n";
    let f = parse_conformal_data(ok).unwrap();
    assert_eq!((f.rows, f.cols, f.h.len()), (2, 3, 6));
    f.into_data().unwrap();

    let cases = [
        ("n = 3\nn = 3\n", "duplicate"),
        ("n = 3\nfoo = 1\n", "unknown key"),
        ("n = 3\n[x]\n", "unknown section"),
        ("n = 4\nt_max = 1\ngrid = 2 3\n", "n = 3"),
        ("t_max = 1\ngrid = 2 3\n", "missing key n"),
        ("n = 3\nt_max = 1\ngrid = 2\n", "grid"),
        ("n = 3\nt_max = 1\ngrid = 2 3\n[h]\n1 2 3\n", "expected 6"),
        ("n = 3\nt_max = 1\ngrid = 2 3\n[h]\n[k]\n", "remainder_power"),
        ("n = 3\nt_max = x\n", "t_max"),
    ];
    for (text, needle) in cases {
        match parse_conformal_data(text) {
            Err(Error::ConformalData(msg)) => assert!(msg.contains(needle), "{:?}: {}", text, msg),
            other => panic!("{:?} parsed: {:?}", text, other.map(|f| f.rows)),
        }
    }
    let short = "n = 3\nt_max = 0.5\ngrid = 2 3\n[h]\n1 0 0 1 0 1\n";
    assert!(parse_conformal_data(short).unwrap().into_data().is_err());
}

#[test]
fn grid_tensor_interpolates_smooth_data() {
    let (rows, cols) = (9, 16);
    let f = |psi: f64, phi: f64| [psi.cos() * phi.sin(), 0.1, 0.0, 1.0 + 0.2 * phi.cos(), 0.0, 0.5];
    let samples: Vec<[f64; 6]> = (0..rows)
        .flat_map(|i| {
            (0..cols).map(move |j| f(i as f64 * (PI / 2.0) / (rows - 1) as f64, 2.0 * PI * j as f64 / cols as f64))
        })
        .collect();
    let g = GridTensor::new(rows, cols, &samples).unwrap();
    for (psi, phi) in [(0.3f64, 1.0f64), (1.2, 4.0), (0.05, 5.9)] {
        let w = DVector::from_vec(vec![psi.sin() * phi.cos(), psi.sin() * phi.sin(), psi.cos()]);
        let v = g.value(&w).unwrap();
        let e = f(psi, phi);
        assert!((v[(0, 0)] - e[0]).abs() < 1e-2 && (v[(1, 1)] - e[3]).abs() < 1e-3 && (v[(1, 0)] - 0.1).abs() < 1e-12);
    }
    assert!(GridTensor::new(1, 3, &[[0.0; 6]; 3]).is_err());
    assert!(GridTensor::new(2, 3, &[[0.0; 6]; 5]).is_err());
}

#[test]
fn example_file_matches_direct_construction() {
    let from_file = conformally_compact(load_conformal_data(&example_file()).unwrap()).unwrap();
    let mut data = round_data(0.3, 0.1);
    data.remainder =
        Some(hypmass::zoo::Remainder { power: 5.0, tensor: Arc::new(RoundMultiple { dim: 3, c: 0.05 }), bound: 0.1 });
    let direct = conformally_compact(data).unwrap();
    let radii = default_radii(10.0, 4);
    let a = mass_vector(&from_file, 16, &radii).unwrap();
    let b = mass_vector(&direct, 16, &radii).unwrap();
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        for i in 0..3 {
            assert!((sa.mass()[i] - sb.mass()[i]).abs() < 1e-10, "{:?} {:?}", sa.mass(), sb.mass());
        }
    }
    assert!(load_conformal_data(&example_file().with_extension("missing")).is_err());
}

#[test]
fn bump_profile_is_compactly_supported() {
    let prof = RadialProfile::Bump { c: 0.2, inner: 10.0, outer: 20.0 };
    assert_eq!(prof.eval(9.9f64).v, 0.0);
    assert_eq!(prof.eval(20.5f64).v, 0.0);
    assert!(prof.eval(15.0f64).v > 0.0);
    assert!((prof.eval(15.0f64).v - 0.2).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pushforward_stays_in_half_space(x in -20.0..20.0f64, z in -20.0..20.0f64, h in 0.0..20.0f64, amp in 0.0..2.0f64) {
        let m = pushforward(reference(3, Chart::Polar).unwrap(), DiffeoSpec::standard(3, amp));
        let y = DVector::from_vec(vec![x, z, h]);
        let f = m.map_point(&y);
        prop_assert!(f[2] >= 0.0);
        let mut yb = y.clone();
        yb[2] = 0.0;
        prop_assert!(m.map_point(&yb)[2].abs() < 1e-12);
    }

    #[test]
    fn natural_spline_hits_knots(vals in prop::collection::vec(-5.0..5.0f64, 2..12), step in 0.1..2.0f64) {
        let s = CubicSpline::natural(-1.0, step, vals.clone()).unwrap();
        for (i, v) in vals.iter().enumerate() {
            prop_assert!((s.eval(-1.0 + i as f64 * step) - v).abs() < 1e-10);
        }
    }
}
