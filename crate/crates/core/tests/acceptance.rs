//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines show up in plain `cargo test` output.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypmass::engine::{calibrate_dn, default_radii, exactness_residual, expansion_residual, mass_vector};
use hypmass::engine::{CalibrationInput, MassEngine, MassVector};
use hypmass::geometry::{Chart, MetricField, PolynomialField};
use hypmass::reference::{static_basis_eval, CausalClass, IsometryElement, StaticPotential};
use hypmass::spin::{
    boundary_chirality, build_clifford, killing_residual, killing_spinor_eval, null_cone_inverse, v_phi,
    v_phi_coefficients, Chirality, KillingSign, KillingSpec,
};
use hypmass::zoo::{
    ads_schwarzschild_half, conformally_compact, dominant_energy, isometric_pullback, pushforward, reference,
    trace_perturbation, ConformallyCompactData, ConstantTensor, DiffeoSpec, RadialProfile, Remainder, RoundMultiple,
    SphereTensor,
};
use hypmass::{ChartPoint, QuadratureRule, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let m = reference(3, Chart::Polar)?;
    let mv = mass_vector(&m, 32, &default_radii(10.0, 5))?;
    let secs = start.elapsed().as_secs_f64();
    let worst = mv.vector.z.amax();
    outcome(
        mv.class == CausalClass::Zero && worst < 1e-8 && secs < 10.0,
        format!("class {}, max |P_a| = {:.2e}, {:.2} s", mv.class, worst, secs),
    )
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = PolynomialField::new(
            DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0)),
            DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0)),
            (0..n).map(|_| DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5))).collect(),
        );
        let r = rng.gen_range(0.2..4.0);
        let mut w: DVector<f64> = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        w[n - 1] = w[n - 1].abs() + 0.05;
        let p = ChartPoint::polar_cartesian(w.normalize() * r)?;
        for a in 0..n {
            worst = worst.max(exactness_residual(&StaticPotential::basis(n, a)?, &x, &p)?);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-5 && secs < 30.0, format!("max residual {:.2e} over 100 fields, {:.2} s", worst, secs))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn criterion_3() -> Result<Outcome> {
    let m = trace_perturbation(3, RadialProfile::Smoothed { c: 1.0, p: 3.0 }, 1.0)?;
    let p = ChartPoint::polar(3.0, &[0.6, 0.0, 0.8])?;
    let eps = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let mut slopes = Vec::new();
    for a in 0..2 {
        let v = StaticPotential::basis(3, a)?;
        let res: Vec<f64> = eps.iter().map(|&e| expansion_residual(&m, &v, &p, e)).collect::<Result<_>>()?;
        slopes.push(slope(&eps, &res));
    }
    let ok = slopes.iter().all(|s| (s - 2.0).abs() <= 0.1);
    outcome(ok, format!("slopes {:?}", slopes.iter().map(|s| format!("{:.4}", s)).collect::<Vec<_>>()))
}

/// Hemisphere area of the unit sphere `S^{n−1}`, by Simpson's rule in the polar angle.
fn unit_hemisphere_area(n: usize) -> f64 {
    let k = 2000;
    let h = (PI / 2.0) / k as f64;
    let f = |t: f64| t.sin().powi(n as i32 - 2);
    let mut s = f(0.0) + f(PI / 2.0);
    for i in 1..k {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    // |S^{n−2}| times the polar integral
    let lower = 2.0 * PI.powf((n as f64 - 1.0) / 2.0) / gamma_half(n - 1);
    lower * s * h / 3.0
}

/// `Γ(k/2)`.
fn gamma_half(k: usize) -> f64 {
    if k == 1 {
        PI.sqrt()
    } else if k == 2 {
        1.0
    } else {
        (k as f64 / 2.0 - 1.0) * gamma_half(k - 2)
    }
}

/// Flux of `𝕌(V_(0), e)` through the hemisphere of radius `r` for
/// `e = ((1+r²)/f − 1) μ♭⊗μ♭`: `U(μ) = (n−1) E (1+r²)/r` times the area.
fn schwarzschild_flux(n: usize, mbar: f64, r: f64) -> f64 {
    let f = 1.0 + r * r - 2.0 * mbar * r.powi(2 - n as i32);
    let e = (1.0 + r * r) / f - 1.0;
    let u = (n as f64 - 1.0) * e * (1.0 + r * r) / r;
    u * r.powi(n as i32 - 1) * unit_hemisphere_area(n)
}

fn criterion_4() -> Result<Outcome> {
    let start = Instant::now();
    let (n, mbar) = (3, 1.0);
    let m = ads_schwarzschild_half(n, mbar)?;
    let radii = default_radii(10.0, 5);
    let mv = mass_vector(&m, 48, &radii)?;
    let secs = start.elapsed().as_secs_f64();
    let fit = &mv.fits[0];
    let oracle = (n as f64 - 1.0) * 2.0 * mbar * unit_hemisphere_area(n);
    let rel = (fit.mass_inf - oracle).abs() / oracle;
    let per_radius = mv
        .samples
        .iter()
        .map(|s| ((s.mass()[0] - schwarzschild_flux(n, mbar, s.radius)) / schwarzschild_flux(n, mbar, s.radius)).abs())
        .fold(0.0f64, f64::max);
    let fit_ok = fit.max_residual < 1e-3 * fit.mass_inf.abs();
    outcome(
        fit_ok && rel < 5e-3 && secs < 120.0,
        format!(
            "m_inf {:.8} vs oracle {:.8} (rel {:.2e}), fit residual {:.2e}, q {:.3}, per-radius rel {:.2e}, {:.2} s",
            fit.mass_inf, oracle, rel, fit.max_residual, fit.exponent, per_radius, secs
        ),
    )
}

fn criterion_5() -> Result<Outcome> {
    let n = 3;
    let radii = default_radii(10.0, 5);
    let base = mass_vector(&ads_schwarzschild_half(n, 1.0)?, 32, &radii)?;
    let iso = IsometryElement::boost(n, 1, 0.3)?;
    let moved =
        isometric_pullback(pushforward(ads_schwarzschild_half(n, 1.0)?, DiffeoSpec::standard(n, 0.5)), iso.clone())?;
    let got = mass_vector(&moved, 32, &radii)?;
    let expect = iso.inverse().potential_block() * &base.vector.z;
    let q0 = base.vector.norm_squared();
    let q1 = got.vector.norm_squared();
    let norm_rel = ((q1 - q0) / q0).abs();
    let noise = base.error_scale() + got.error_scale();
    let mut worst = 0.0f64;
    let mut ok = norm_rel < 0.01;
    for a in 0..n {
        let dev = (got.vector.z[a] - expect[a]).abs();
        ok &= dev <= 0.01 * expect[a].abs() + noise;
        worst = worst.max(dev / expect[a].abs().max(noise).max(f64::MIN_POSITIVE));
    }
    outcome(
        ok,
        format!(
            "norm change {:.2e}, P' = {:?}, expected {:?}, worst component deviation {:.2e} relative",
            norm_rel,
            got.vector.z.iter().map(|v| format!("{:.6}", v)).collect::<Vec<_>>(),
            expect.iter().map(|v| format!("{:.6}", v)).collect::<Vec<_>>(),
            worst
        ),
    )
}

fn criterion_6() -> Result<Outcome> {
    let n = 3;
    let engine = MassEngine::global();
    let radii = [10.0, 20.0, 40.0];
    let v0 = StaticPotential::basis(n, 0)?;
    let mut inputs = Vec::new();
    for mbar in [0.5, 1.0, 2.0] {
        let m = ads_schwarzschild_half(n, mbar)?;
        let mut charge = Vec::new();
        let mut ricci = Vec::new();
        for &r in &radii {
            let rule = QuadratureRule::new(n, r, 24)?;
            charge.push(engine.mass_at_radius(&m, &v0, &rule)?);
            ricci.push(engine.ricci_sample(&m, &rule)?.total()[0]);
        }
        inputs.push(CalibrationInput { label: format!("mbar={}", mbar), radii: radii.to_vec(), charge, ricci });
    }
    let cal = calibrate_dn(&inputs)?;
    let einstein = pushforward(reference(n, Chart::Polar)?, DiffeoSpec::standard(n, 0.5));
    let mut g_max = 0.0f64;
    for &r in &radii {
        g_max = g_max.max(engine.ricci_sample(&einstein, &QuadratureRule::new(n, r, 24)?)?.max_einstein);
    }
    outcome(
        cal.passed() && g_max < 1e-6,
        format!("d_n = {:.5}, max ratio deviation {:.2e}, Einstein |G^| max {:.2e}", cal.d_n, cal.max_deviation, g_max),
    )
}

fn conformal(c: f64) -> Result<Box<dyn MetricField<f64>>> {
    let data = ConformallyCompactData {
        dim: 3,
        t_max: 0.5,
        h: Some(Arc::new(RoundMultiple { dim: 3, c }) as Arc<dyn SphereTensor<f64>>),
        remainder: None,
    };
    Ok(Box::new(conformally_compact(data)?))
}

fn criterion_7() -> Result<Outcome> {
    let n = 3;
    let radii = default_radii(10.0, 5);
    let zoo: Vec<(&str, Box<dyn MetricField<f64>>)> = vec![
        ("schwarzschild 0.5", Box::new(ads_schwarzschild_half(n, 0.5)?)),
        ("schwarzschild 1", Box::new(ads_schwarzschild_half(n, 1.0)?)),
        ("schwarzschild 2", Box::new(ads_schwarzschild_half(n, 2.0)?)),
        ("pushed schwarzschild", Box::new(pushforward(ads_schwarzschild_half(n, 1.0)?, DiffeoSpec::standard(n, 0.5)))),
        (
            "boosted schwarzschild",
            Box::new(isometric_pullback(ads_schwarzschild_half(n, 1.0)?, IsometryElement::boost(n, 1, 0.3)?)?),
        ),
        ("trace r^-3", Box::new(trace_perturbation(n, RadialProfile::InversePower { c: 1.0, p: 3.0 }, 10.0)?)),
        ("trace smoothed", Box::new(trace_perturbation(n, RadialProfile::Smoothed { c: 1.0, p: 3.0 }, 1.0)?)),
        ("conformal c=1", conformal(1.0)?),
    ];
    let mut ok = true;
    let mut tested = 0;
    let mut notes = Vec::new();
    for (name, m) in &zoo {
        let energy = dominant_energy(m.as_ref(), &radii, 8)?;
        if !energy.holds(1e-6) {
            notes.push(format!("{}: excluded (min R+n(n-1) {:.1e})", name, energy.min_scalar_excess));
            continue;
        }
        let mv = mass_vector(m.as_ref(), 32, &radii)?;
        tested += 1;
        ok &= mv.class == CausalClass::TimelikeFuture;
        notes.push(format!("{}: {}", name, mv.class));
    }
    outcome(ok && tested > 0, notes.join("; "))
}

fn ball_samples(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<ChartPoint> {
    (0..count)
        .map(|i| {
            let mut x: DVector<f64> = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            x[n - 1] = if i % 5 == 0 { 0.0 } else { x[n - 1].abs() };
            let radius = 0.9 * rng.gen_range(0.0f64..1.0).powf(1.0 / n as f64);
            let x = if x.norm() > 0.0 { x.normalize() * radius } else { x };
            ChartPoint::ball(x).expect("inside the ball")
        })
        .collect()
}

fn criterion_8() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut clifford = 0.0f64;
    let mut killing = 0.0f64;
    let mut pointwise = 0.0f64;
    let mut round_trip = 0.0f64;
    let mut counts = Vec::new();
    for n in 3..=5 {
        let rep = build_clifford::<f64>(n)?;
        clifford = clifford.max(rep.residuals().max());
        let bc = boundary_chirality(&rep);
        let points = ball_samples(n, 200, &mut rng);
        let mut specs = 0;
        for chirality in [Chirality::Plus, Chirality::Minus] {
            for u in bc.basis(chirality) {
                for sign in [KillingSign::Plus, KillingSign::Minus] {
                    let spec = KillingSpec::new(&rep, u.clone(), sign)?;
                    specs += 1;
                    let z = v_phi_coefficients(&rep, &spec)?;
                    for p in &points {
                        for d in 0..n {
                            killing = killing.max(killing_residual(&rep, &spec, p, d)?);
                        }
                        let phi = killing_spinor_eval(&rep, &spec, p)?;
                        let x = &p.coords;
                        let mut rhs = z[n] * 2.0 * x[n - 1] / (1.0 - x.norm_squared());
                        for a in 0..n {
                            rhs += z[a] * static_basis_eval(a, p)?;
                        }
                        pointwise = pointwise.max((phi.norm_squared() - rhs).abs());
                    }
                }
            }
        }
        counts.push(format!("n={}: {} specs", n, specs / 2));
        for _ in 0..20 {
            let d = DVector::from_fn(n - 1, |_, _| rng.gen_range(-1.0..1.0));
            let scale = rng.gen_range(0.2..3.0);
            let mut z = DVector::zeros(n);
            z[0] = d.norm() * scale;
            z.rows_mut(1, n - 1).copy_from(&(d * scale));
            let v = StaticPotential::new(z);
            for chirality in [Chirality::Plus, Chirality::Minus] {
                for sign in [KillingSign::Plus, KillingSign::Minus] {
                    let spec = null_cone_inverse(&rep, &v, chirality, sign)?;
                    let back = v_phi(&rep, &spec)?;
                    round_trip = round_trip.max((&back.coeffs - &v.coeffs).amax());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        clifford <= 1e-12 && killing < 1e-6 && pointwise < 1e-9 && round_trip < 1e-8 && secs < 60.0,
        format!(
            "clifford {:.1e}, killing {:.2e}, pointwise {:.2e}, round trip {:.2e}, {} , {:.2} s",
            clifford,
            killing,
            pointwise,
            round_trip,
            counts.join(", "),
            secs
        ),
    )
}

fn criterion_9() -> Result<Outcome> {
    let radii = default_radii(10.0, 5);
    let zero = conformally_compact(ConformallyCompactData::<f64>::zero(3, 0.5))?;
    let mz = mass_vector(&zero, 32, &radii)?;
    let mr = mass_vector(&reference(3, Chart::Polar)?, 32, &radii)?;
    let zero_dev = (&mz.vector.z - &mr.vector.z).amax();
    let make = |with_k: bool| -> Result<MassVector> {
        let remainder = with_k.then(|| Remainder {
            power: 5.0,
            tensor: Arc::new(ConstantTensor(DMatrix::from_fn(3, 3, |i, j| 0.3 / (1.0 + i as f64 + j as f64))))
                as Arc<dyn SphereTensor<f64>>,
            bound: 1.0,
        });
        let data = ConformallyCompactData {
            dim: 3,
            t_max: 0.5,
            h: Some(Arc::new(RoundMultiple { dim: 3, c: 1.0 }) as Arc<dyn SphereTensor<f64>>),
            remainder,
        };
        mass_vector(&conformally_compact(data)?, 32, &radii)
    };
    let a = make(false)?;
    let b = make(true)?;
    let mut ok = zero_dev < 1e-8;
    let mut worst = 0.0f64;
    for i in 0..3 {
        let shift = (b.vector.z[i] - a.vector.z[i]).abs();
        let allowed = a.fits[i].error + b.fits[i].error;
        ok &= shift <= allowed;
        worst = worst.max(shift / allowed.max(f64::MIN_POSITIVE));
    }
    outcome(ok, format!("zero-data deviation {:.2e}, remainder shift / error estimate {:.3}", zero_dev, worst))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("zero mass of the model", criterion_1),
        ("exactness identity", criterion_2),
        ("quadratic remainder", criterion_3),
        ("convergence against the closed-form flux", criterion_4),
        ("geometric invariance", criterion_5),
        ("Ricci-form consistency", criterion_6),
        ("positive mass sanity", criterion_7),
        ("spinor suite", criterion_8),
        ("conformally compact ingestion", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {}", e)),
        };
        if !passed {
            failed += 1;
        }
        println!("criterion {} {:<42} {}  {}", i + 1, name, if passed { "PASS" } else { "FAIL" }, detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", failed);
        ExitCode::FAILURE
    }
}
