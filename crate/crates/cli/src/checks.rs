//! Builds the selected metric and runs the requested checks into a report.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypmass::engine::{
    calibrate_dn, exactness_residual, expansion_residual, CalibrationInput, CheckOutcome, MassEngine, MassReport,
    MassVector,
};
use hypmass::geometry::norms::norm2;
use hypmass::geometry::{frame, Chart, MetricField, PolynomialField};
use hypmass::reference::static_basis_eval;
use hypmass::spin::{
    boundary_chirality, build_clifford, killing_residual, killing_spinor_eval, null_cone_inverse, v_phi,
    v_phi_coefficients, Chirality, KillingSign, KillingSpec,
};
use hypmass::zoo::{
    ads_schwarzschild_half, conformally_compact, isometric_pullback, load_conformal_data, pushforward, reference,
    trace_perturbation, validate_decay, DiffeoSpec,
};
use hypmass::{ChartPoint, IsometryElement, QuadratureRule, StaticPotential};

use crate::config::{Check, MetricSpec, RunConfig};
use crate::CliError;

pub type Metric = Arc<dyn MetricField<f64>>;

/// Mass components below this are treated as zero when forming relative errors.
const MASS_FLOOR: f64 = 1e-8;
const DECAY_LEVELS: usize = 4;
const DECAY_DIRECTIONS: usize = 16;
const EXACTNESS_FIELDS: usize = 100;
const SPIN_POINTS: usize = 60;
const SPIN_ROUND_TRIPS: usize = 20;
const EXPANSION_STEPS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

/// Metric described by the config, including the optional pushforward.
/// Construction failures count as configuration errors.
pub fn build_metric(cfg: &RunConfig) -> Result<Metric, CliError> {
    construct(cfg).map_err(|e| match e {
        CliError::Engine(e) => CliError::Config(format!("metric: {}", e)),
        other => other,
    })
}

fn construct(cfg: &RunConfig) -> Result<Metric, CliError> {
    let n = cfg.n;
    let base: Metric = match &cfg.metric {
        MetricSpec::Reference {} => Arc::new(reference(n, Chart::Polar)?),
        MetricSpec::AdsSchwarzschild { mass } => Arc::new(ads_schwarzschild_half(n, *mass)?),
        MetricSpec::Trace { profile, r0 } => Arc::new(trace_perturbation(n, *profile, *r0)?),
        MetricSpec::Conformal { path } => {
            let data = load_conformal_data(&cfg.resolve(path))?;
            if data.dim != n {
                return Err(CliError::Config(format!(
                    "metric.path: data file has dimension {}, config has n = {}",
                    data.dim, n
                )));
            }
            Arc::new(conformally_compact(data)?)
        }
    };
    Ok(match &cfg.diffeo {
        Some(d) => Arc::new(pushforward(base, DiffeoSpec::standard(n, d.amplitude))),
        None => base,
    })
}

/// Config-level checks that need the metric, such as the asymptotic radius.
pub fn check_radii(cfg: &RunConfig, m: &Metric) -> Result<(), CliError> {
    let r0 = m.decay().r0;
    if cfg.radii[0] < r0 {
        return Err(CliError::Config(format!(
            "radii: first radius {} lies below the asymptotic region r >= {}",
            cfg.radii[0], r0
        )));
    }
    Ok(())
}

fn config_echo(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

/// Runs every selected check. Engine failures are recorded in the report
/// rather than returned, so one failing check does not hide the others.
pub fn run(cfg: &RunConfig, m: &Metric) -> Result<MassReport, CliError> {
    let engine = match cfg.workers {
        Some(k) => MassEngine::with_workers(k)?,
        None => MassEngine::global(),
    };
    let mut report = MassReport::new(m.label(), cfg.n, cfg.resolution, &cfg.radii);
    report.config = config_echo(cfg);

    let needs_mass = cfg.selected(Check::Mass) || cfg.selected(Check::Ricci) || cfg.selected(Check::Invariance);
    let mass = if needs_mass {
        match engine.mass_vector(m, cfg.resolution, &cfg.radii) {
            Ok(mv) => {
                report.record_mass(&mv);
                Some(mv)
            }
            Err(e) => {
                report.errors.push(format!("mass: {}", e));
                None
            }
        }
    } else {
        None
    };

    for &check in &cfg.checks {
        let result = match check {
            Check::Mass => mass.as_ref().map_or(Ok(()), |mv| mass_checks(cfg, m, mv, &mut report)),
            Check::Ricci => mass.as_ref().map_or(Ok(()), |mv| ricci_checks(cfg, m, mv, &engine, &mut report)),
            Check::Invariance => mass.as_ref().map_or(Ok(()), |mv| invariance_checks(cfg, m, mv, &engine, &mut report)),
            Check::Exactness => exactness_checks(cfg, &mut report),
            Check::Expansion => expansion_checks(cfg, m, &mut report),
            Check::Spin => spin_checks(cfg, &mut report),
        };
        if let Err(e) = result {
            report.errors.push(format!("{}: {}", check.name(), e));
        }
    }
    Ok(report)
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.amax()
}

fn mass_checks(cfg: &RunConfig, m: &Metric, mv: &MassVector, report: &mut MassReport) -> hypmass::Result<()> {
    let decay = validate_decay(m, DECAY_LEVELS, DECAY_DIRECTIONS)?;
    let worst_norm = decay.norms.iter().fold(0.0f64, |a, v| a.max(*v));
    let (value, detail) = if decay.fitted_rate.is_finite() {
        {
            let claimed = decay.claimed_rate.map_or("none".to_string(), |t| t.to_string());
            (decay.fitted_rate, format!("claimed rate {}, max norm {:.3e}", claimed, worst_norm))
        }
    } else {
        (0.0, format!("perturbation vanishes beyond r0, max norm {:.3e}", worst_norm))
    };
    report.push_check(CheckOutcome {
        name: "mass.decay".into(),
        passed: decay.passed,
        value,
        tolerance: decay.claimed_rate.unwrap_or(0.0),
        detail,
    });

    let scale = max_abs(&mv.vector.z).max(MASS_FLOOR);
    let worst_fit = mv.fits.iter().fold(0.0f64, |a, f| a.max(f.max_residual));
    let exponents: Vec<String> = mv.fits.iter().map(|f| format!("{:.3}", f.exponent)).collect();
    report.push_check(CheckOutcome::at_most("mass.fit", worst_fit / scale, cfg.tolerances.mass_fit).with_detail(
        format!("class {}, exponents [{}], converged {}", mv.class, exponents.join(", "), mv.converged()),
    ));
    Ok(())
}

fn ricci_checks(
    cfg: &RunConfig,
    m: &Metric,
    mv: &MassVector,
    engine: &MassEngine,
    report: &mut MassReport,
) -> hypmass::Result<()> {
    let mut table = Vec::with_capacity(cfg.radii.len());
    let mut einstein = 0.0f64;
    for &r in &cfg.radii {
        let rule = QuadratureRule::new(cfg.n, r, cfg.resolution)?;
        let s = engine.ricci_sample(m, &rule)?;
        einstein = einstein.max(s.max_einstein);
        table.push(s.total());
    }
    report.ricci_mass = Some(table.clone());

    let scale = max_abs(&mv.vector.z);
    if scale <= MASS_FLOOR + mv.error_scale() {
        let worst = table.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        report.push_check(
            CheckOutcome::at_most("ricci.zero", worst, cfg.tolerances.ricci_zero)
                .with_detail(format!("mass vanishes, max |Einstein| {:.3e}", einstein)),
        );
        return Ok(());
    }

    // One calibration input per radius: the ratio must agree across radii.
    let inputs: Vec<CalibrationInput> = mv
        .samples
        .iter()
        .zip(&table)
        .map(|(s, row)| CalibrationInput {
            label: format!("r={}", s.radius),
            radii: vec![s.radius],
            charge: vec![s.mass()[0]],
            ricci: vec![row[0]],
        })
        .collect();
    let cal = calibrate_dn(&inputs)?;
    report.record_calibration(&cal);
    report.push_check(CheckOutcome {
        name: "ricci.calibration".into(),
        passed: cal.positive && cal.max_deviation <= cfg.tolerances.calibration,
        value: cal.max_deviation,
        tolerance: cfg.tolerances.calibration,
        detail: format!("d_n {:.6}, max |Einstein| {:.3e}", cal.d_n, einstein),
    });
    Ok(())
}

fn invariance_checks(
    cfg: &RunConfig,
    m: &Metric,
    mv: &MassVector,
    engine: &MassEngine,
    report: &mut MassReport,
) -> hypmass::Result<()> {
    let n = cfg.n;
    let inv = &cfg.invariance;
    let iso = IsometryElement::boost(n, inv.axis, inv.rapidity)?;
    let moved = isometric_pullback(pushforward(m.clone(), DiffeoSpec::standard(n, inv.amplitude)), iso.clone())?;
    let got = engine.mass_vector(&moved, cfg.resolution, &cfg.radii)?;
    let expect = iso.inverse().potential_block() * &mv.vector.z;
    let noise = mv.error_scale() + got.error_scale();
    let scale = max_abs(&expect).max(MASS_FLOOR);
    let worst = (0..n).fold(0.0f64, |a, i| a.max(((got.vector.z[i] - expect[i]).abs() - noise).max(0.0)));
    report.push_check(
        CheckOutcome::at_most("invariance.vector", worst / scale, cfg.tolerances.invariance).with_detail(format!(
            "boost axis {} rapidity {}, diffeo amplitude {}, noise {:.2e}",
            inv.axis, inv.rapidity, inv.amplitude, noise
        )),
    );
    let q0 = mv.vector.norm_squared();
    let q1 = got.vector.norm_squared();
    let allowance = (2.0 * scale + noise) * noise;
    let norm_dev = ((q1 - q0).abs() - allowance).max(0.0) / q0.abs().max(MASS_FLOOR * MASS_FLOOR);
    report.push_check(
        CheckOutcome::at_most("invariance.norm", norm_dev, cfg.tolerances.invariance)
            .with_detail(format!("<P,P> {:.6e} -> {:.6e}", q0, q1)),
    );
    Ok(())
}

fn exactness_checks(cfg: &RunConfig, report: &mut MassReport) -> hypmass::Result<()> {
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut worst = 0.0f64;
    for _ in 0..EXACTNESS_FIELDS {
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
    report.push_check(
        CheckOutcome::at_most("exactness", worst, cfg.tolerances.exactness)
            .with_detail(format!("{} random polynomial fields, seed {}", EXACTNESS_FIELDS, cfg.seed)),
    );
    Ok(())
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Quadratic decay of `V(R + n(n−1)) − div 𝕌` along `b + εe`, at a point
/// just outside `r0`. The steps are scaled by `1/|e|_b` so that the
/// perturbation stays a fixed fraction of the background.
fn expansion_checks(cfg: &RunConfig, m: &Metric, report: &mut MassReport) -> hypmass::Result<()> {
    let n = cfg.n;
    let mut dir = DVector::zeros(n);
    dir[0] = 0.6;
    dir[n - 1] = 0.8;
    let r = m.decay().r0.max(1.0) * 3.0;
    let p = ChartPoint::polar_cartesian(&dir * r)?;
    let size = norm2(&frame(Chart::Polar, &p.coords)?, &m.perturbation(&p.coords)?);
    if size <= 1e-12 {
        report.push_check(
            CheckOutcome::at_most("expansion", 0.0, cfg.tolerances.expansion_slope)
                .with_detail(format!("perturbation vanishes at r = {}", r)),
        );
        return Ok(());
    }
    let eps: Vec<f64> = EXPANSION_STEPS.iter().map(|e| e / size).collect();
    let mut slopes = Vec::new();
    for a in 0..2 {
        let v = StaticPotential::basis(n, a)?;
        let res: Vec<f64> = eps.iter().map(|&e| expansion_residual(m, &v, &p, e)).collect::<hypmass::Result<_>>()?;
        slopes.push(log_slope(&eps, &res));
    }
    let worst = slopes.iter().fold(0.0f64, |a, s| a.max((s - 2.0).abs()));
    let shown: Vec<String> = slopes.iter().map(|s| format!("{:.4}", s)).collect();
    report.push_check(CheckOutcome::at_most("expansion", worst, cfg.tolerances.expansion_slope).with_detail(format!(
        "log-log slopes [{}] at r = {}",
        shown.join(", "),
        r
    )));
    Ok(())
}

fn ball_samples(n: usize, count: usize, rng: &mut ChaCha8Rng) -> hypmass::Result<Vec<ChartPoint>> {
    (0..count)
        .map(|i| {
            let mut x: DVector<f64> = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            x[n - 1] = if i % 5 == 0 { 0.0 } else { x[n - 1].abs() };
            let radius = 0.9 * rng.gen_range(0.0f64..1.0).powf(1.0 / n as f64);
            let x = if x.norm() > 0.0 { x.normalize() * radius } else { x };
            ChartPoint::ball(x)
        })
        .collect()
}

fn spin_checks(cfg: &RunConfig, report: &mut MassReport) -> hypmass::Result<()> {
    let n = cfg.n;
    let tol = &cfg.tolerances;
    let rep = build_clifford::<f64>(n)?;
    report.push_check(CheckOutcome::at_most("spin.clifford", rep.residuals().max(), tol.clifford));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    let bc = boundary_chirality(&rep);
    let points = ball_samples(n, SPIN_POINTS, &mut rng)?;
    let mut killing = 0.0f64;
    let mut pointwise = 0.0f64;
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
    let detail = format!("{} specs at {} points", specs, points.len());
    report.push_check(CheckOutcome::at_most("spin.killing", killing, tol.killing).with_detail(detail.clone()));
    report.push_check(CheckOutcome::at_most("spin.pointwise", pointwise, tol.spin_pointwise).with_detail(detail));

    let mut round_trip = 0.0f64;
    for _ in 0..SPIN_ROUND_TRIPS {
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
    report.push_check(
        CheckOutcome::at_most("spin.round_trip", round_trip, tol.spin_round_trip)
            .with_detail(format!("{} future null vectors", SPIN_ROUND_TRIPS)),
    );
    Ok(())
}
