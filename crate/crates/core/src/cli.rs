//! Run configuration, commands and reports behind the `ahmass` binary.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::conformal::{boundary_conditions_check, default_x_samples, mass_from_conformal, BoundaryReport, ConformalSpec};
use crate::error::{Error, Result};
use crate::gauge::{decay_report, predicted_gauge_mass, DecayReport, RadialGauge, Verdict};
use crate::geom::{DerivativeScheme, MetricField, Point};
use crate::mass::{
    default_radii, flux_samples, invariant_mass, mass_integral, momentum_vector, Classification, Integrand,
    LimitStatus, MassCase, MassSettings, Tolerance, ZERO_TOLERANCE,
};
use crate::reference::families::{Family, Kottler2d, SchwarzschildAds};
use crate::reference::{build_background, nb_basis, verify_static, Background, BoundaryManifold, StaticReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    /// Report destination; stdout when absent.
    #[serde(default)]
    pub path: Option<PathBuf>,
}

/// Boundary manifold choices for the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundarySpec {
    Sphere,
    FlatTorus { volume: f64 },
    Hyperbolic { volume: f64 },
    HyperbolicSurface { genus: u32 },
}

impl BoundarySpec {
    fn default_for(k: i32, n: usize) -> Result<Self> {
        Ok(match k {
            1 => BoundarySpec::Sphere,
            0 => BoundarySpec::FlatTorus { volume: 1.0 },
            -1 if n == 3 => BoundarySpec::HyperbolicSurface { genus: 2 },
            -1 => BoundarySpec::Hyperbolic { volume: 1.0 },
            _ => return Err(Error::BoundaryMismatch(format!("k must be -1, 0 or 1, got {k}"))),
        })
    }

    fn build(&self, n: usize) -> Result<BoundaryManifold> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("dimension n = {n} is below 2")));
        }
        match *self {
            BoundarySpec::Sphere => Ok(BoundaryManifold::sphere(n - 1)),
            BoundarySpec::FlatTorus { volume } | BoundarySpec::Hyperbolic { volume }
                if !(volume > 0.0 && volume.is_finite()) =>
            {
                Err(Error::InvalidArgument(format!("boundary volume must be positive, got {volume}")))
            }
            BoundarySpec::FlatTorus { volume } => Ok(BoundaryManifold::flat_torus(n - 1, volume)),
            BoundarySpec::Hyperbolic { volume } => Ok(BoundaryManifold::hyperbolic(n - 1, volume)),
            BoundarySpec::HyperbolicSurface { genus } => {
                if n != 3 {
                    return Err(Error::DimensionMismatch { expected: 3, got: n });
                }
                BoundaryManifold::hyperbolic_surface(genus)
            }
        }
    }
}

/// Radial gauge deformation applied on top of the metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub gamma: f64,
    /// Shift exponent `s` in `r ↦ r + γ r^{1−s}`; `n/2` when absent.
    #[serde(default)]
    pub exponent: Option<f64>,
}

/// One run, as read from JSON or assembled from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub metric: Option<Family>,
    #[serde(default)]
    pub conformal: Option<ConformalSpec>,
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub gauge: Option<GaugeSpec>,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Boundary quadrature resolution; the boundary's default when absent.
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub scheme: DerivativeScheme,
    #[serde(default)]
    pub integrand: Integrand,
    #[serde(default = "default_tolerance")]
    pub tolerance: Tolerance,
    #[serde(default = "default_zero_tolerance")]
    pub zero_tolerance: f64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_tolerance() -> Tolerance {
    MassSettings::default().tolerance
}

fn default_zero_tolerance() -> f64 {
    ZERO_TOLERANCE
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metric: None,
            conformal: None,
            boundary: None,
            gauge: None,
            radii: default_radii(),
            resolution: None,
            scheme: DerivativeScheme::default(),
            integrand: Integrand::default(),
            tolerance: default_tolerance(),
            zero_tolerance: ZERO_TOLERANCE,
            output: OutputSpec::default(),
        }
    }
}

/// Everything a command needs, built from a [`RunConfig`].
pub struct Setup {
    pub metric: Arc<dyn MetricField>,
    pub background: Background,
    pub conformal: Option<crate::conformal::ConformalData>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    fn kn(&self) -> Result<(i32, usize)> {
        match (&self.metric, &self.conformal) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument("config sets both `metric` and `conformal`".into())),
            (None, None) => Err(Error::InvalidArgument("config needs `metric` or `conformal`".into())),
            (Some(Family::Hyperbolic { n }), None) => Ok((1, *n)),
            (Some(Family::Kottler2d { .. }), None) => Ok((1, 2)),
            (Some(Family::SchwarzschildAds { n, k, .. }), None) => Ok((*k, *n)),
            (None, Some(c)) => Ok((c.k, c.n)),
        }
    }

    /// Fills every defaulted field so the config can be echoed verbatim.
    pub fn resolved(&self) -> Result<Self> {
        let mut out = self.clone();
        let (k, n) = self.kn()?;
        if out.boundary.is_none() {
            out.boundary = Some(BoundarySpec::default_for(k, n)?);
        }
        if out.resolution.is_none() {
            let b = out.boundary.as_ref().expect("set above").build(n)?;
            out.resolution = Some(b.default_resolution());
        }
        if let Some(g) = &mut out.gauge {
            g.exponent.get_or_insert(n as f64 / 2.0);
        }
        if let Some(c) = &mut out.conformal {
            if c.x_max.is_none() {
                let bg = build_background(k, n, out.boundary.as_ref().expect("set above").build(n)?)?;
                c.x_max = Some(crate::conformal::ConformalData::new(bg, c.profile.clone(), None)?.x_max());
            }
        }
        Ok(out)
    }

    pub fn settings(&self) -> MassSettings {
        MassSettings {
            scheme: self.scheme,
            integrand: self.integrand,
            radii: self.radii.clone(),
            tolerance: self.tolerance,
        }
    }

    pub fn build(&self) -> Result<Setup> {
        let cfg = self.resolved()?;
        let (k, n) = cfg.kn()?;
        let boundary = cfg.boundary.as_ref().expect("resolved").build(n)?;
        let mut background = build_background(k, n, boundary)?;
        if let Some(res) = cfg.resolution {
            background = background.with_resolution(res);
        }
        if cfg.radii.len() < 3 || cfg.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument("radii must be at least 3 positive finite values".into()));
        }
        let (metric, conformal): (Arc<dyn MetricField>, _) = match (&cfg.metric, &cfg.conformal) {
            (Some(Family::Hyperbolic { .. }), _) => (Arc::new(background.metric()), None),
            (Some(Family::Kottler2d { eta }), _) => (Arc::new(Kottler2d::new(*eta)?), None),
            (Some(Family::SchwarzschildAds { m_param, .. }), _) => {
                (Arc::new(SchwarzschildAds::new(background.clone(), *m_param)?), None)
            }
            (None, Some(spec)) => {
                let data = crate::conformal::ConformalData::new(background.clone(), spec.profile.clone(), spec.x_max)?;
                (Arc::new(data.metric()?), Some(data))
            }
            (None, None) => unreachable!("checked by kn"),
        };
        let metric: Arc<dyn MetricField> = match &cfg.gauge {
            Some(g) => {
                if conformal.is_some() {
                    return Err(Error::InvalidArgument("a gauge deformation cannot be combined with conformal data".into()));
                }
                let gauge = RadialGauge::new(metric, &background, g.gamma, g.exponent.expect("resolved"))?;
                let bound = gauge.monotonicity_bound();
                if let Some(r) = cfg.radii.iter().find(|&&r| r <= bound) {
                    return Err(Error::ChartDomain {
                        point: vec![*r],
                        reason: format!("gauge map is not monotone below r = {bound}"),
                    });
                }
                Arc::new(gauge)
            }
            None => metric,
        };
        Ok(Setup {
            metric,
            background,
            conformal,
        })
    }
}

/// Extrapolation diagnostics for one basis potential.
#[derive(Debug, Clone, Serialize)]
pub struct MuDiagnostics {
    pub mu: usize,
    pub potential: String,
    pub value: f64,
    pub coefficients: [f64; 3],
    pub residual: f64,
    pub drift: f64,
    pub status: LimitStatus,
    pub samples: Vec<crate::mass::FluxSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub command: &'static str,
    pub config: RunConfig,
    pub case: MassCase,
    pub p: Vec<f64>,
    pub m2: f64,
    pub m: Option<f64>,
    pub classification: Classification,
    pub status: LimitStatus,
    pub diagnostics: Vec<MuDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_conditions: Option<BoundaryReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeDemoReport {
    pub command: &'static str,
    pub config: RunConfig,
    pub n: usize,
    pub gamma: f64,
    pub computed: f64,
    pub predicted: f64,
    /// Relative to `predicted`, or absolute when the prediction is 0.
    pub relative_error: f64,
    pub passed: bool,
    pub diagnostics: MuDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct StaticCheck {
    pub report: StaticReport,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub config: RunConfig,
    pub static_system: Vec<StaticCheck>,
    pub decay: DecayReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_conditions: Option<BoundaryReport>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub mu: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub flux: f64,
    pub quad_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxSweepReport {
    pub command: &'static str,
    pub config: RunConfig,
    pub samples: Vec<SweepRow>,
}

/// A finished command: its report and process exit code.
pub struct Outcome {
    pub exit_code: i32,
    pub json: String,
    pub csv: String,
}

fn csv_of(rows: impl IntoIterator<Item = SweepRow>) -> String {
    let mut out = String::from("mu,R,flux,quad_err\n");
    for r in rows {
        out.push_str(&format!("{},{:e},{:e},{:e}\n", r.mu, r.radius, r.flux, r.quad_err));
    }
    out
}

fn rows_of(d: &[MuDiagnostics]) -> Vec<SweepRow> {
    d.iter()
        .flat_map(|m| {
            m.samples.iter().map(move |s| SweepRow {
                mu: m.mu,
                radius: s.radius,
                flux: s.value,
                quad_err: s.quad_err,
            })
        })
        .collect()
}

fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn worst_status(d: &[MuDiagnostics]) -> LimitStatus {
    let rank = |s: LimitStatus| match s {
        LimitStatus::Converged => 0,
        LimitStatus::Unconverged => 1,
        LimitStatus::Divergent => 2,
    };
    d.iter().map(|m| m.status).max_by_key(|s| rank(*s)).unwrap_or(LimitStatus::Converged)
}

fn diagnostics(labels: &[(usize, String)], limits: &[crate::mass::MassLimit]) -> Vec<MuDiagnostics> {
    labels
        .iter()
        .zip(limits)
        .map(|((mu, name), l)| MuDiagnostics {
            mu: *mu,
            potential: name.clone(),
            value: l.value,
            coefficients: l.coefficients,
            residual: l.residual,
            drift: l.drift,
            status: l.status,
            samples: l.samples.clone(),
        })
        .collect()
}

pub fn cmd_mass(config: &RunConfig) -> Result<Outcome> {
    let setup = config.build()?;
    let settings = config.settings();
    let basis = nb_basis(&setup.background)?;
    let labels: Vec<(usize, String)> = basis.iter().map(|v| (v.label, v.name.clone())).collect();
    let (p, mass, checks) = match &setup.conformal {
        Some(data) => {
            let out = mass_from_conformal(data, &settings)?;
            let mass = invariant_mass(&out.momentum, setup.background.k(), config.zero_tolerance)?;
            (out.momentum, mass, Some(out.checks))
        }
        None => {
            let p = momentum_vector(setup.metric.as_ref(), &setup.background, &settings)?;
            let mass = invariant_mass(&p, setup.background.k(), config.zero_tolerance)?;
            (p, mass, None)
        }
    };
    let diagnostics = diagnostics(&labels, &p.diagnostics);
    let status = worst_status(&diagnostics);
    let report = MassReport {
        command: "mass",
        config: config.resolved()?,
        case: mass.case,
        p: mass.p,
        m2: mass.m2,
        m: mass.m,
        classification: mass.classification,
        status,
        diagnostics,
        boundary_conditions: checks,
    };
    Ok(Outcome {
        exit_code: if status == LimitStatus::Converged { 0 } else { 2 },
        json: to_json(&report),
        csv: csv_of(rows_of(&report.diagnostics)),
    })
}

/// `H(V₍₀₎)` of the γ-deformed hyperbolic metric against the closed form.
pub fn cmd_gauge_demo(config: &RunConfig) -> Result<Outcome> {
    let n = match config.metric {
        Some(Family::Hyperbolic { n }) if config.conformal.is_none() => n,
        _ => return Err(Error::InvalidArgument("gauge-demo runs on the hyperbolic family only".into())),
    };
    let gamma = config
        .gauge
        .as_ref()
        .map(|g| g.gamma)
        .ok_or_else(|| Error::InvalidArgument("gauge-demo needs `gauge.gamma`".into()))?;
    let resolved = config.resolved()?;
    if resolved.gauge.as_ref().and_then(|g| g.exponent) != Some(n as f64 / 2.0) {
        return Err(Error::InvalidArgument("gauge-demo uses the exponent n/2".into()));
    }
    let setup = config.build()?;
    let v0 = nb_basis(&setup.background)?.swap_remove(0);
    let limit = mass_integral(setup.metric.as_ref(), &setup.background, &v0, &config.settings())?;
    let predicted = predicted_gauge_mass(n, gamma);
    let computed = limit.value;
    let relative_error = if predicted == 0.0 {
        computed.abs()
    } else {
        ((computed - predicted) / predicted).abs()
    };
    let passed = relative_error <= 1e-3;
    let diagnostics = diagnostics(&[(v0.label, v0.name.clone())], std::slice::from_ref(&limit)).remove(0);
    let report = GaugeDemoReport {
        command: "gauge-demo",
        config: resolved,
        n,
        gamma,
        computed,
        predicted,
        relative_error,
        passed,
        diagnostics,
    };
    Ok(Outcome {
        exit_code: if passed { 0 } else { 2 },
        json: to_json(&report),
        csv: csv_of(rows_of(std::slice::from_ref(&report.diagnostics))),
    })
}

/// Radii at which the static system is sampled.
const STATIC_RADII: [f64; 5] = [2.0, 5.0, 8.0, 11.0, 14.0];

/// Static-system residuals, decay conditions and (for conformal data) the
/// boundary conditions.
pub fn cmd_check(config: &RunConfig) -> Result<Outcome> {
    let setup = config.build()?;
    let bg = &setup.background;
    let basis = nb_basis(bg)?;
    let (scheme, tol) = match config.scheme {
        DerivativeScheme::Analytic => (DerivativeScheme::Analytic, 1e-8),
        s @ DerivativeScheme::CentralDifference { .. } => (s, 1e-5),
    };
    let nodes = bg.coarse_quadrature().nodes;
    let floor = bg.r_floor();
    let points: Vec<Point> = STATIC_RADII
        .iter()
        .enumerate()
        .map(|(i, &r)| Point::new(r + floor, &nodes[(i * 7919) % nodes.len()]))
        .collect();
    let b = bg.metric();
    let lambda = -(bg.n() as f64);
    let static_system = basis
        .iter()
        .map(|v| {
            let report = verify_static(&b, v, lambda, scheme, &points, tol)?;
            let verdict = if report.passed { Verdict::Pass } else { Verdict::Fail };
            Ok(StaticCheck { report, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    let decay = decay_report(setup.metric.as_ref(), bg, &basis, &config.radii)?;
    let boundary_conditions = match &setup.conformal {
        Some(data) => Some(boundary_conditions_check(data, &default_x_samples(data))?),
        None => None,
    };
    let verdict = static_system
        .iter()
        .map(|s| s.verdict)
        .chain(std::iter::once(decay.overall()))
        .chain(boundary_conditions.as_ref().map(|b| b.overall()))
        .fold(Verdict::Pass, Verdict::worst);
    let report = CheckReport {
        command: "check",
        config: config.resolved()?,
        static_system,
        decay,
        boundary_conditions,
        verdict,
    };
    Ok(Outcome {
        exit_code: if verdict == Verdict::Fail { 2 } else { 0 },
        json: to_json(&report),
        csv: String::new(),
    })
}

/// Raw flux samples for every basis potential, without extrapolation.
pub fn cmd_flux_sweep(config: &RunConfig) -> Result<Outcome> {
    let setup = config.build()?;
    let settings = config.settings();
    let mut samples = Vec::new();
    for v in nb_basis(&setup.background)? {
        for s in flux_samples(setup.metric.as_ref(), &setup.background, &v, &settings)? {
            samples.push(SweepRow {
                mu: v.label,
                radius: s.radius,
                flux: s.value,
                quad_err: s.quad_err,
            });
        }
    }
    let report = FluxSweepReport {
        command: "flux-sweep",
        config: config.resolved()?,
        samples,
    };
    Ok(Outcome {
        exit_code: 0,
        json: to_json(&report),
        csv: csv_of(report.samples.iter().copied()),
    })
}

#[derive(Debug, Parser)]
#[command(name = "ahmass", version, about = "Mass invariants of asymptotically hyperbolic ends")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mass covector, invariant mass and causal class.
    Mass(RunArgs),
    /// Mass of a radially re-gauged hyperbolic metric against its closed form.
    GaugeDemo(RunArgs),
    /// Static-system, decay and boundary-condition diagnostics.
    Check(RunArgs),
    /// Flux through `{r = R}` for every radius and basis potential.
    FluxSweep(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Hyperbolic,
    Kottler2d,
    #[value(alias = "schwarzschild_ads")]
    SchwarzschildAds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Analytic,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegrandName {
    Standard,
    Alternative,
}

/// Flags mirror [`RunConfig`]; they override values read from `--config`.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RunArgs {
    /// JSON config file, or `-` for stdin.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m_param: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Comma-separated radii schedule.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    /// Relative step for `--scheme central`.
    #[arg(long)]
    pub h0: Option<f64>,
    #[arg(long, value_enum)]
    pub integrand: Option<IntegrandName>,
    #[arg(long)]
    pub tol_abs: Option<f64>,
    #[arg(long)]
    pub tol_rel: Option<f64>,
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Reads the base config (if any) and applies the flags on top.
    pub fn to_config(&self, stdin: &mut dyn Read, gauge_demo: bool) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) if p.as_os_str() == "-" => {
                let mut text = String::new();
                stdin
                    .read_to_string(&mut text)
                    .map_err(|e| Error::InvalidArgument(format!("reading stdin: {e}")))?;
                RunConfig::from_json(&text)?
            }
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::InvalidArgument(format!("reading {}: {e}", p.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        let family = match self.family {
            Some(f) => Some(f),
            None if gauge_demo && cfg.metric.is_none() => Some(FamilyName::Hyperbolic),
            None => None,
        };
        if let Some(f) = family {
            cfg.conformal = None;
            cfg.metric = Some(match f {
                FamilyName::Hyperbolic => Family::Hyperbolic { n: self.n.unwrap_or(3) },
                FamilyName::Kottler2d => Family::Kottler2d { eta: self.eta.unwrap_or(0.0) },
                FamilyName::SchwarzschildAds => Family::SchwarzschildAds {
                    n: self.n.unwrap_or(3),
                    m_param: self
                        .m_param
                        .ok_or_else(|| Error::InvalidArgument("schwarzschild-ads needs --m-param".into()))?,
                    k: self.k.unwrap_or(1),
                },
            });
        } else if let Some(m) = &mut cfg.metric {
            match m {
                Family::Hyperbolic { n } => *n = self.n.unwrap_or(*n),
                Family::Kottler2d { eta } => *eta = self.eta.unwrap_or(*eta),
                Family::SchwarzschildAds { n, m_param, k } => {
                    *n = self.n.unwrap_or(*n);
                    *m_param = self.m_param.unwrap_or(*m_param);
                    *k = self.k.unwrap_or(*k);
                }
            }
        }
        if let Some(gamma) = self.gamma {
            match &mut cfg.gauge {
                Some(g) => g.gamma = gamma,
                None => cfg.gauge = Some(GaugeSpec { gamma, exponent: None }),
            }
        }
        if let Some(r) = &self.radii {
            cfg.radii = r.clone();
        }
        if let Some(r) = self.resolution {
            cfg.resolution = Some(r);
        }
        match (self.scheme, self.h0) {
            (Some(SchemeName::Analytic), _) => cfg.scheme = DerivativeScheme::Analytic,
            (Some(SchemeName::Central), h0) => cfg.scheme = DerivativeScheme::central(h0.unwrap_or(1e-4)),
            (None, Some(h0)) => cfg.scheme = DerivativeScheme::central(h0),
            (None, None) => {}
        }
        if let Some(i) = self.integrand {
            cfg.integrand = match i {
                IntegrandName::Standard => Integrand::Standard,
                IntegrandName::Alternative => Integrand::Alternative,
            };
        }
        if let Some(a) = self.tol_abs {
            cfg.tolerance.abs = a;
        }
        if let Some(r) = self.tol_rel {
            cfg.tolerance.rel = r;
        }
        if let Some(z) = self.zero_tol {
            cfg.zero_tolerance = z;
        }
        if let Some(f) = self.output {
            cfg.output.format = f;
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        Ok(cfg)
    }
}

/// Parses `args`, runs the command and writes its report; returns the exit
/// code (0 success, 1 usage or config error, 2 non-convergence or failed
/// diagnostic).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (args, cmd): (&RunArgs, fn(&RunConfig) -> Result<Outcome>) = match &cli.command {
        Command::Mass(a) => (a, cmd_mass),
        Command::GaugeDemo(a) => (a, cmd_gauge_demo),
        Command::Check(a) => (a, cmd_check),
        Command::FluxSweep(a) => (a, cmd_flux_sweep),
    };
    let gauge_demo = matches!(cli.command, Command::GaugeDemo(_));
    let outcome = args.to_config(stdin, gauge_demo).and_then(|cfg| Ok((cmd(&cfg)?, cfg)));
    let (outcome, cfg) = match outcome {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let body = match cfg.output.format {
        OutputFormat::Json => &outcome.json,
        OutputFormat::Csv if outcome.csv.is_empty() => {
            let _ = writeln!(stderr, "error: this command has no CSV form");
            return 1;
        }
        OutputFormat::Csv => &outcome.csv,
    };
    let written = match &cfg.output.path {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("writing {}: {e}", p.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    outcome.exit_code
}

/// Sizes the global thread pool from `AHMASS_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("AHMASS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("AHMASS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}
