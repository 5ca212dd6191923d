//! Acceptance suite: runs every criterion, prints one line each and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ahmass::cli::{cmd_mass, RunConfig};
use ahmass::conformal::{compactify, decompactify, mass_from_conformal, ConformalData};
use ahmass::gauge::{apply_radial_gauge, decay_report, lorentz_act, predicted_gauge_mass, LorentzMap};
use ahmass::mass::{
    classify, default_radii, first_order_residual, invariant_mass, mass_integral, momentum_vector, Classification,
    Integrand, MassSettings, MomentumCovector, ZERO_TOLERANCE,
};
use ahmass::reference::families::{builtin_metric, default_background, Family, PerturbedMetric};
use ahmass::reference::{nb_basis, verify_static, Background, StaticPotential};
use ahmass::{DerivativeScheme, Jet, MetricField, Point};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const KOTTLER_ETAS: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];
const SADS_MASSES: [f64; 3] = [0.1, 0.5, 1.0];
const GAUGE_CASES: [(usize, f64); 4] = [(2, 1.0), (3, 0.1), (3, 1.0), (4, 0.5)];

fn kottler(eta: f64) -> Family {
    Family::Kottler2d { eta }
}

fn sads(m_param: f64) -> Family {
    Family::SchwarzschildAds { n: 3, m_param, k: 1 }
}

fn background_of(f: &Family) -> Background {
    match *f {
        Family::Hyperbolic { n } => Background::hyperbolic(n),
        Family::Kottler2d { .. } => Background::hyperbolic(2),
        Family::SchwarzschildAds { n, k, .. } => default_background(k, n),
    }
    .unwrap()
}

fn fixtures() -> Vec<Family> {
    KOTTLER_ETAS.map(kottler).into_iter().chain(SADS_MASSES.map(sads)).collect()
}

fn p0(f: &Family, settings: &MassSettings) -> Result<f64, String> {
    let g = builtin_metric(f).map_err(|e| e.to_string())?;
    let p = momentum_vector(g.as_ref(), &background_of(f), settings).map_err(|e| e.to_string())?;
    Ok(p.components[0])
}

/// `|a − b| ≤ rel·|b|`, or `≤ abs` when `b` vanishes.
fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    if b == 0.0 {
        a.abs() <= abs
    } else {
        (a - b).abs() <= rel * b.abs()
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn kottler_masses() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for eta in KOTTLER_ETAS {
        let config = RunConfig::from_json(&format!(r#"{{"metric": {{"family": "kottler2d", "eta": {eta:?}}}}}"#))
            .map_err(|e| e.to_string())?;
        let t = Instant::now();
        let out = cmd_mass(&config).map_err(|e| e.to_string())?;
        let dt = t.elapsed();
        let report: serde_json::Value = serde_json::from_str(&out.json).map_err(|e| e.to_string())?;
        let p0 = report["p"][0].as_f64().ok_or("report has no p[0]")?;
        let expected = 2.0 * PI * (1.0 + eta);
        if !close(p0, expected, 1e-6, 1e-9) {
            return Err(format!("eta = {eta}: p0 = {p0}, expected {expected}"));
        }
        if dt >= Duration::from_secs(1) {
            return Err(format!("eta = {eta}: took {dt:?}"));
        }
        worst = worst.max(rel_err(p0, expected));
        slowest = slowest.max(dt);
    }
    Ok(format!("max error {worst:.1e}, slowest {slowest:.2?}"))
}

fn gauge_masses() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (n, gamma) in GAUGE_CASES {
        let bg = Background::hyperbolic(n).unwrap();
        let t = Instant::now();
        let g = apply_radial_gauge(Arc::new(bg.metric()), &bg, gamma).map_err(|e| e.to_string())?;
        let v0 = nb_basis(&bg).unwrap().swap_remove(0);
        let computed = mass_integral(&g, &bg, &v0, &MassSettings::default()).map_err(|e| e.to_string())?.value;
        let dt = t.elapsed();
        let predicted = predicted_gauge_mass(n, gamma);
        let err = rel_err(computed, predicted);
        if err > 1e-3 || dt >= Duration::from_secs(10) {
            return Err(format!("(n, gamma) = ({n}, {gamma}): {computed} vs {predicted} in {dt:?}"));
        }
        worst = worst.max(err);
        slowest = slowest.max(dt);
    }
    Ok(format!("max relative error {worst:.1e}, slowest {slowest:.2?}"))
}

fn sads_masses() -> Outcome {
    let mut worst = 0.0f64;
    for m in SADS_MASSES {
        let f = sads(m);
        let g = builtin_metric(&f).unwrap();
        let bg = background_of(&f);
        let p = momentum_vector(g.as_ref(), &bg, &MassSettings::default()).map_err(|e| e.to_string())?;
        let expected = 16.0 * PI * m;
        if !close(p.components[0], expected, 1e-4, 0.0) {
            return Err(format!("m = {m}: p0 = {}, expected {expected}", p.components[0]));
        }
        if let Some(pi) = p.components[1..].iter().find(|x| x.abs() > 1e-8) {
            return Err(format!("m = {m}: angular component {pi}"));
        }
        let class = invariant_mass(&p, 1, ZERO_TOLERANCE).unwrap().classification;
        if class != Classification::TimelikeFuture {
            return Err(format!("m = {m}: classified {}", class.as_str()));
        }
        worst = worst.max(rel_err(p.components[0], expected));
    }
    Ok(format!("max relative error {worst:.1e}, all timelike-future"))
}

fn integrand_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for f in fixtures() {
        let std = p0(&f, &MassSettings::default())?;
        let alt = p0(&f, &MassSettings { integrand: Integrand::Alternative, ..Default::default() })?;
        if !close(alt, std, 1e-5, 1e-9) {
            return Err(format!("{f:?}: standard {std}, alternative {alt}"));
        }
        worst = worst.max(rel_err(alt, std));
    }
    Ok(format!("max difference {worst:.1e}"))
}

fn bump(r: Jet) -> Jet {
    let (a, b) = (2.0, 4.0);
    if r.value() <= a || r.value() >= b {
        return Jet::constant(0.0);
    }
    (-((r - a) * (b - r)).recip()).exp()
}

/// `ε·bump(r)` times random linear functions of the unit normal, one per
/// frame component of a symmetric tensor on `H³`.
fn random_field(bg: &Background, seed: u64, eps: f64) -> PerturbedMetric {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<[f64; 4]> = (0..6).map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0))).collect();
    PerturbedMetric::new(bg.clone(), format!("random-{seed}"), move |x| {
        let (r, th, ph) = (x[0], x[1], x[2]);
        let u = [Jet::constant(1.0), th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let lin = |k: usize| -> Jet { (0..4).map(|i| u[i] * c[k][i]).sum() };
        let w = bump(r) * eps;
        let s = th.sin();
        let rr = w * lin(0) * (r * r + 1.0).recip();
        let rt = w * lin(1) * r;
        let rp = w * lin(2) * r * s;
        let tt = w * lin(3) * r * r;
        let tp = w * lin(4) * r * r * s;
        let pp = w * lin(5) * r * r * s * s;
        vec![rr, rt, rp, rt, tt, tp, rp, tp, pp]
    })
}

fn first_order_identity() -> Outcome {
    let bg = Background::hyperbolic(3).unwrap().with_resolution(16);
    let v0 = nb_basis(&bg).unwrap().swap_remove(0);
    let mut ratios = Vec::new();
    for seed in [11, 29] {
        let residuals = (0..4)
            .map(|j| {
                let g = random_field(&bg, seed, 0.025 / 2f64.powi(j));
                first_order_residual(&g, &bg, &v0, (2.0, 4.0), 32).map_err(|e| e.to_string())
            })
            .collect::<Result<Vec<_>, _>>()?;
        for w in residuals.windows(2) {
            let ratio = w[0] / w[1];
            if !(3.5..=4.5).contains(&ratio) {
                return Err(format!("seed {seed}: residuals {residuals:?}, ratio {ratio}"));
            }
            ratios.push(ratio);
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
    Ok(format!("halving ratios in [{lo:.3}, {hi:.3}]"))
}

fn static_points(bg: &Background) -> Vec<Point> {
    let nodes = bg.coarse_quadrature().nodes;
    [2.0, 5.0, 8.0, 11.0, 14.0]
        .iter()
        .zip(nodes.iter().step_by((nodes.len() / 5).max(1)).cycle())
        .map(|(&r, a)| Point::new(r, a))
        .collect()
}

fn static_system() -> Outcome {
    let mut worst = [0.0f64; 2];
    let mut v_r_min = f64::INFINITY;
    for n in [2, 3, 4] {
        let bg = Background::hyperbolic(n).unwrap();
        let b = bg.metric();
        let points = static_points(&bg);
        let lambda = -(n as f64);
        for v in nb_basis(&bg).unwrap() {
            for (i, (scheme, tol)) in [(DerivativeScheme::Analytic, 1e-8), (DerivativeScheme::central(1e-4), 1e-5)]
                .into_iter()
                .enumerate()
            {
                let rep = verify_static(&b, &v, lambda, scheme, &points, tol).map_err(|e| e.to_string())?;
                if !rep.passed {
                    return Err(format!("n = {n}, {}: residual {:e} with {scheme:?}", v.name, rep.max_residual));
                }
                worst[i] = worst[i].max(rep.max_residual);
            }
        }
        let v_r = StaticPotential::new(0, "r", |x| x[0]);
        let rep = verify_static(&b, &v_r, lambda, DerivativeScheme::Analytic, &points, 1e-8)
            .map_err(|e| e.to_string())?;
        if rep.max_residual.is_nan() || rep.max_residual <= 1e-2 {
            return Err(format!("n = {n}: V = r has residual {:e}", rep.max_residual));
        }
        v_r_min = v_r_min.min(rep.max_residual);
    }
    Ok(format!(
        "analytic {:.1e}, central {:.1e}, V = r residual {v_r_min:.2}",
        worst[0], worst[1]
    ))
}

fn random_lorentz(rng: &mut ChaCha8Rng, dim: usize) -> LorentzMap {
    let mut l = LorentzMap::identity(dim);
    for _ in 0..3 {
        let i = rng.random_range(1..dim);
        let j = 1 + (i + rng.random_range(0..dim - 2)) % (dim - 1);
        let rot = LorentzMap::rotation(dim, i, j, rng.random_range(-PI..PI)).unwrap();
        let boost = LorentzMap::boost(dim, rng.random_range(1..dim), rng.random_range(-1.5..1.5)).unwrap();
        l = l.compose(&rot).unwrap().compose(&boost).unwrap();
    }
    l
}

fn random_covector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let q: Vec<f64> = (1..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let p0 = match rng.random_range(0..5) {
        0 => qn,
        1 => -qn,
        2 => qn + rng.random_range(0.1..2.0),
        3 => -qn - rng.random_range(0.1..2.0),
        _ => rng.random_range(-0.9..0.9) * qn,
    };
    std::iter::once(p0).chain(q).collect()
}

fn lorentz_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let dim = rng.random_range(3..6);
        let l = random_lorentz(&mut rng, dim);
        let p = MomentumCovector::new(random_covector(&mut rng, dim));
        let q = lorentz_act(&l, &p).map_err(|e| e.to_string())?;
        let scale = 1.0 + p.norm().powi(2).max(q.norm().powi(2));
        let err = (q.pairing() - p.pairing()).abs() / scale;
        let (cp, cq) = (classify(&p.components, ZERO_TOLERANCE), classify(&q.components, ZERO_TOLERANCE));
        if err > 1e-12 || cp != cq {
            return Err(format!("trial {trial}: pairing error {err:e}, class {} -> {}", cp.as_str(), cq.as_str()));
        }
        worst = worst.max(err);
    }
    Ok(format!("1000 pairs, max scaled pairing error {worst:.1e}"))
}

fn conformal_equivalence() -> Outcome {
    let radii: Vec<f64> = (0..5).map(|j| 10f64.powf(2.0 + 0.5 * j as f64)).collect();
    let settings = MassSettings { radii, ..Default::default() };
    let mut worst = 0.0f64;
    for f in fixtures() {
        let direct = p0(&f, &settings)?;
        let data = ConformalData::from_family(&f).map_err(|e| e.to_string())?;
        let conf = mass_from_conformal(&data, &settings).map_err(|e| e.to_string())?.momentum.components[0];
        if !close(conf, direct, 1e-8, 1e-8) {
            return Err(format!("{f:?}: direct {direct}, conformal {conf}"));
        }
        worst = worst.max(rel_err(conf, direct));
    }
    let mut trip = 0.0f64;
    for k in [-1, 0, 1] {
        for j in 0..=600 {
            let r = 10f64.powf(j as f64 / 100.0);
            let back = compactify(r, k).and_then(|x| decompactify(x, k)).map_err(|e| e.to_string())?;
            trip = trip.max(((back - r) / r).abs());
        }
    }
    if trip > 1e-12 {
        return Err(format!("round trip error {trip:e}"));
    }
    Ok(format!("max difference {worst:.1e}, round trip {trip:.1e}"))
}

fn decay_sharpness() -> Outcome {
    let radii = default_radii();
    let mut gauge_exps = Vec::new();
    for (n, gamma) in GAUGE_CASES {
        let bg = Background::hyperbolic(n).unwrap();
        let g = apply_radial_gauge(Arc::new(bg.metric()), &bg, gamma).map_err(|e| e.to_string())?;
        let rep = decay_report(&g, &bg, &nb_basis(&bg).unwrap(), &radii).map_err(|e| e.to_string())?;
        if rep.m5.verdict.is_pass() {
            return Err(format!("(n, gamma) = ({n}, {gamma}): m5 passed with exponent {:?}", rep.m5.exponent));
        }
        gauge_exps.push(rep.m5.exponent.unwrap_or(f64::NAN));
    }
    let mut sads_exps = Vec::new();
    for m in SADS_MASSES {
        let f = sads(m);
        let g: Arc<dyn MetricField> = builtin_metric(&f).unwrap();
        let bg = background_of(&f);
        let rep = decay_report(g.as_ref(), &bg, &nb_basis(&bg).unwrap(), &radii).map_err(|e| e.to_string())?;
        if !rep.m5.verdict.is_pass() {
            return Err(format!("m = {m}: m5 verdict {:?}, exponent {:?}", rep.m5.verdict, rep.m5.exponent));
        }
        sads_exps.push(rep.m5.exponent.unwrap_or(f64::NAN));
    }
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ");
    Ok(format!("gauge exponents [{}], AdS exponents [{}]", fmt(&gauge_exps), fmt(&sads_exps)))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("kottler masses", kottler_masses),
        ("gauge-deformed masses", gauge_masses),
        ("schwarzschild-ads masses", sads_masses),
        ("integrand equivalence", integrand_equivalence),
        ("first-order identity", first_order_identity),
        ("static system", static_system),
        ("lorentz invariance", lorentz_invariance),
        ("conformal equivalence", conformal_equivalence),
        ("decay sharpness", decay_sharpness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {tag}: {name}: {detail} ({:.2?})", i + 1, t.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
