//! Conformally compactified ends `g = x⁻²(dx² + h_x)`, with `x` the geodesic
//! defining coordinate of the completion.
//!
//! Data are isotropic: `h_x = c·((1 − kx²/(4c))² + δ(x/√c)) h₀`, where `c` is
//! the constant factor by which the presented boundary metric differs from
//! the normalized `h₀` (1 for normalized data).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{log_log_fit, Verdict, BORDERLINE_BAND};
use crate::geom::{ricci_and_scalar, sectional_curvatures, DerivativeScheme, MetricDescriptor, MetricField, Point};
use crate::jet::Jet;
use crate::mass::{invariant_mass, momentum_vector, MassResult, MassSettings, MomentumCovector, ZERO_TOLERANCE};
use crate::quadrature::gauss_legendre_on;
use crate::reference::families::{default_background, largest_root, DiagonalAnsatz, Family};
use crate::reference::{Background, BoundaryManifold};

/// Upper end of the `x` range: `∞` for `k = 0`, otherwise 2.
pub fn x_upper(k: i32) -> f64 {
    if k == 0 {
        f64::INFINITY
    } else {
        2.0
    }
}

fn r_lower(k: i32) -> f64 {
    (-(k as f64)).max(0.0).sqrt()
}

/// `x = 2/(r + √(r² + k))`, defined for `r ≥ √max(−k, 0)` (and `r > 0`).
pub fn compactify(r: f64, k: i32) -> Result<f64> {
    if !(r.is_finite() && r >= r_lower(k) && r > 0.0) {
        return Err(Error::ChartDomain {
            point: vec![r],
            reason: format!("compactification needs r ≥ {} (and r > 0) for k = {k}", r_lower(k)),
        });
    }
    Ok(2.0 / (r + (r * r + k as f64).sqrt()))
}

/// `r = (1 − kx²/4)/x` on `0 < x ≤ x_upper(k)`.
pub fn decompactify(x: f64, k: i32) -> Result<f64> {
    if !(x.is_finite() && x > 0.0 && x <= x_upper(k)) {
        return Err(Error::ChartDomain {
            point: vec![x],
            reason: format!("x must lie in (0, {}] for k = {k}", x_upper(k)),
        });
    }
    Ok((1.0 - k as f64 * x * x / 4.0) / x)
}

fn compactify_jet(r: Jet, k: i32) -> Jet {
    2.0 / (r + (r * r + k as f64).sqrt())
}

/// The background in `(x, v)` coordinates: `x⁻²(dx² + (1 − kx²/4)² h₀)`.
#[derive(Debug, Clone)]
pub struct ConformalBackground {
    background: Background,
}

pub fn conformal_background(k: i32, n: usize, h0: BoundaryManifold) -> Result<ConformalBackground> {
    Ok(ConformalBackground {
        background: crate::reference::build_background(k, n, h0)?,
    })
}

impl ConformalBackground {
    pub fn background(&self) -> &Background {
        &self.background
    }
}

impl MetricField for ConformalBackground {
    fn dim(&self) -> usize {
        self.background.n()
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.dim();
        let k = self.background.k() as f64;
        let xx = x[0];
        let inv2 = (xx * xx).recip();
        let warp = (1.0 - xx * xx * (k / 4.0)).powi(2) * inv2;
        let h = self.background.boundary().metric_components(&x[1..])?;
        let mut out = vec![Jet::constant(0.0); n * n];
        out[0] = inv2;
        for a in 0..n - 1 {
            for b in 0..n - 1 {
                out[(a + 1) * n + b + 1] = warp * h[a * (n - 1) + b];
            }
        }
        Ok(out)
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new("conformal_background").with("k", self.background.k() as f64)
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        let k = self.background.k();
        if !(x[0] > 0.0 && x[0] < x_upper(k)) {
            return Err(Error::ChartDomain {
                point: x.to_vec(),
                reason: format!("x must lie in (0, {})", x_upper(k)),
            });
        }
        self.background.boundary().check_domain(&x[1..])
    }
}

/// One term `coefficient · x^power` of a series profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesTerm {
    pub power: f64,
    pub coefficient: f64,
}

/// The deviation `δ(x)` of `h_x` from `(1 − kx²/4)² h₀`, in units of `h₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `δ ≡ 0`: the background itself.
    Pure,
    /// `δ(x) = Σ coefficient·x^power`.
    Series { terms: Vec<SeriesTerm> },
    /// The end `dr²/(r² + k − 2m r^{2−n}) + r² h₀` rewritten in its geodesic
    /// defining coordinate.
    StaticEnd { m_param: f64 },
}

/// Conformal data for one end.
#[derive(Debug, Clone)]
pub struct ConformalData {
    background: Background,
    profile: Profile,
    x_max: f64,
    boundary_scale: f64,
    quad: [Vec<f64>; 2],
    // δ depends on x alone, while flux quadrature asks for it at every node
    memo: Arc<Mutex<HashMap<u64, [f64; 3]>>>,
}

const END_NODES: usize = 64;

impl ConformalData {
    /// Data on `x ∈ (0, x_max]`; `x_max` defaults to the value matching
    /// `r = 2` (or twice the horizon radius for a static end).
    pub fn new(background: Background, profile: Profile, x_max: Option<f64>) -> Result<Self> {
        let k = background.k();
        let n = background.n();
        let default_r = match &profile {
            Profile::StaticEnd { m_param } => {
                if !m_param.is_finite() {
                    return Err(Error::InvalidArgument(format!("m_param must be finite, got {m_param}")));
                }
                2.0 * largest_root(n, k as f64, *m_param).max(1.0)
            }
            Profile::Series { terms } => {
                if terms.iter().any(|t| !(t.power > 0.0 && t.power.is_finite() && t.coefficient.is_finite())) {
                    return Err(Error::InvalidArgument("series terms need finite positive powers".into()));
                }
                2.0
            }
            Profile::Pure => 2.0,
        };
        let x_max = match x_max {
            Some(x) => {
                decompactify(x, k)?;
                if x >= x_upper(k) {
                    return Err(Error::ChartDomain {
                        point: vec![x],
                        reason: format!("x_max must be below {}", x_upper(k)),
                    });
                }
                x
            }
            None => compactify(default_r, k)?,
        };
        if let Profile::StaticEnd { m_param } = &profile {
            let horizon = largest_root(n, k as f64, *m_param);
            let r_min = decompactify(x_max, k)?;
            if r_min <= 1.5 * horizon.max(r_lower(k)) {
                return Err(Error::MetricSingularity(format!(
                    "x_max = {x_max} reaches r = {r_min}, too close to the horizon at {horizon}"
                )));
            }
        }
        let (t, w) = gauss_legendre_on(END_NODES, 0.0, 1.0);
        let data = ConformalData {
            background,
            profile,
            x_max,
            boundary_scale: 1.0,
            quad: [t, w],
            memo: Arc::default(),
        };
        for j in 0..=160 {
            let x = x_max * 10f64.powf(-(j as f64) / 20.0);
            let warp = (1.0 - k as f64 * x * x / 4.0).powi(2) + data.delta(x)[0];
            if !(warp > 0.0) {
                return Err(Error::InvalidArgument(format!("h_x is not positive definite at x = {x}")));
            }
        }
        Ok(data)
    }

    /// Conformal form of a built-in family.
    pub fn from_family(family: &Family) -> Result<Self> {
        match *family {
            Family::Hyperbolic { n } => ConformalData::new(Background::hyperbolic(n)?, Profile::Pure, None),
            Family::Kottler2d { eta } => {
                let profile = if eta == -1.0 {
                    Profile::Pure
                } else {
                    Profile::StaticEnd { m_param: 0.5 * (1.0 + eta) }
                };
                ConformalData::new(Background::hyperbolic(2)?, profile, None)
            }
            Family::SchwarzschildAds { n, m_param, k } => {
                ConformalData::new(default_background(k, n)?, Profile::StaticEnd { m_param }, None)
            }
        }
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn n(&self) -> usize {
        self.background.n()
    }

    pub fn k(&self) -> i32 {
        self.background.k()
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Smallest background radius covered by the data.
    pub fn r_min(&self) -> f64 {
        decompactify(self.x_max, self.k()).unwrap_or(f64::INFINITY)
    }

    /// Constant factor between the presented boundary metric and `h₀`.
    pub fn boundary_scale(&self) -> f64 {
        self.boundary_scale
    }

    /// Same metric with defining function `Ω e^{ψ/2}`: `x ↦ e^{ψ/2}x`,
    /// `h ↦ e^ψ h`.
    pub fn rescaled(&self, psi: f64) -> Self {
        let mut out = self.clone();
        let lambda = (0.5 * psi).exp();
        out.boundary_scale *= psi.exp();
        out.x_max *= lambda;
        out
    }

    /// Restores the normalization of `h₀`, reading the boundary scale off
    /// `h_x` at `x = 0`.
    pub fn normalized(&self) -> Result<Self> {
        let node = self.background.quadrature().nodes[0].clone();
        let h0 = self.background.boundary().metric_components(&Jet::constants(&node))?;
        let hx = self.h_x(0.0, &node)?;
        let m = self.n() - 1;
        let (mut num, mut den) = (0.0, 0.0);
        for a in 0..m {
            for b in 0..m {
                num += hx[(a, b)] * h0[a * m + b].value();
                den += h0[a * m + b].value().powi(2);
            }
        }
        let c = num / den;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::BoundaryConditions(format!("boundary metric scale {c} is not positive")));
        }
        let mut out = self.clone();
        out.x_max /= c.sqrt();
        out.boundary_scale = 1.0;
        Ok(out)
    }

    /// `δ` with its first two `x`-derivatives, for normalized data.
    pub fn delta(&self, x: f64) -> [f64; 3] {
        match &self.profile {
            Profile::Pure => [0.0; 3],
            Profile::Series { terms } => terms.iter().fold([0.0; 3], |acc, t| {
                let (p, c) = (t.power, t.coefficient);
                [
                    acc[0] + c * x.powf(p),
                    acc[1] + c * p * x.powf(p - 1.0),
                    acc[2] + c * p * (p - 1.0) * x.powf(p - 2.0),
                ]
            }),
            Profile::StaticEnd { m_param } => {
                if let Some(d) = self.memo.lock().ok().and_then(|m| m.get(&x.to_bits()).copied()) {
                    return d;
                }
                let d = self.static_end_delta(*m_param, x);
                if let Ok(mut m) = self.memo.lock() {
                    if m.len() > 1 << 14 {
                        m.clear();
                    }
                    m.insert(x.to_bits(), d);
                }
                d
            }
        }
    }

    fn static_end_delta(&self, m: f64, x: f64) -> [f64; 3] {
        let k = self.k() as f64;
        let n = self.n();
        if n == 2 {
            // x = 2/(r + √(r² + k − 2m)) in closed form
            let a = m * (k - m);
            return [
                m * x * x - 0.25 * a * x.powi(4),
                2.0 * m * x - a * x.powi(3),
                2.0 * m - 3.0 * a * x * x,
            ];
        }
        if x == 0.0 {
            return [0.0; 3];
        }
        let rt = (1.0 - k * x * x / 4.0) / x;
        let (p, pr, prr) = self.static_end_offset(m, rt);
        let rtp = -1.0 / (x * x) - k / 4.0;
        let rtpp = 2.0 / x.powi(3);
        [
            x * x * p,
            2.0 * x * p + x * x * pr * rtp,
            2.0 * p + 4.0 * x * pr * rtp + x * x * (prr * rtp * rtp + pr * rtpp),
        ]
    }

    /// `P = r² − r̃²` and its `r̃`-derivatives, where `r` is the areal radius
    /// at the point whose background radius is `r̃`.
    fn static_end_offset(&self, m: f64, rt: f64) -> (f64, f64, f64) {
        let k = self.k() as f64;
        let n = self.n();
        let ni = n as i32;
        let lapse = |s: f64| s * s + k - 2.0 * m * s.powi(2 - ni);
        let wb = |s: f64| (s * s + k).sqrt();
        // J(r) = ∫_r^∞ (1/√V − 1/√(s² + k)) ds, with s = r/t
        let j_of = |r: f64| -> f64 {
            let [t, w] = &self.quad;
            let terms: Vec<f64> = t
                .iter()
                .zip(w)
                .map(|(t, w)| {
                    let s = r / t;
                    let (sv, sb) = (lapse(s).sqrt(), wb(s));
                    w * 2.0 * m * s.powi(2 - ni) / (sv * sb * (sv + sb)) * r / (t * t)
                })
                .collect();
            crate::quadrature::pairwise_sum(&terms)
        };
        let w_rt = wb(rt);
        let mut u = 0.0;
        for _ in 0..60 {
            let r = rt + u;
            let shift = (u + u * (2.0 * rt + u) / (wb(r) + w_rt)) / (rt + w_rt);
            let f = -shift.ln_1p() + j_of(r);
            let step = f * lapse(r).sqrt();
            u += step;
            if step.abs() <= 1e-16 * u.abs() {
                break;
            }
        }
        let r = rt + u;
        let p = u * (2.0 * rt + u);
        let s = lapse(r).sqrt();
        let diff = (p * (r * r + rt * rt + k) - 2.0 * m * r.powi(4 - ni)) / (r * s + rt * w_rt);
        let pr = 2.0 * diff / w_rt;
        let prr = 2.0
            * ((2.0 * p + (n as f64 - 4.0) * m * r.powi(2 - ni)) / (w_rt * w_rt)
                - diff * rt / w_rt.powi(3));
        (p, pr, prr)
    }

    /// The presented `h_x` at boundary coordinates `v`.
    pub fn h_x(&self, x: f64, v: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.n() - 1;
        let c = self.boundary_scale;
        let k = self.k() as f64;
        let xn = x / c.sqrt();
        let warp = c * ((1.0 - k * xn * xn / 4.0).powi(2) + self.delta(xn)[0]);
        let h0 = self.background.boundary().metric_components(&Jet::constants(v))?;
        Ok(DMatrix::from_fn(m, m, |a, b| warp * h0[a * m + b].value()))
    }

    /// `g = x⁻²(dx² + h_x)` in the background's radial chart, where
    /// `e_rr = 0` and `e_AB = x⁻² δ h₀`.
    pub fn metric(&self) -> Result<DiagonalAnsatz> {
        if self.boundary_scale != 1.0 {
            return Err(Error::BoundaryConditions("conformal data must be normalized first".into()));
        }
        let data = self.clone();
        let k = self.k();
        let name = format!("conformal({})", profile_name(&self.profile));
        Ok(DiagonalAnsatz::new(
            self.background.clone(),
            name,
            |_| Jet::constant(0.0),
            move |xs| {
                let x = compactify_jet(xs[0], k);
                let [d0, d1, d2] = data.delta(x.value());
                let delta = x.chain(d0, d1, d2);
                delta / (1.0 - x * x * (k as f64 / 4.0)).powi(2)
            },
        ))
    }
}

fn profile_name(p: &Profile) -> String {
    match p {
        Profile::Pure => "pure".into(),
        Profile::Series { terms } => format!("series, {} terms", terms.len()),
        Profile::StaticEnd { m_param } => format!("static end, m = {m_param}"),
    }
}

/// Config form of [`ConformalData`] over the default boundary for `(k, n)`.
/// Unknown keys are rejected by the flattened [`Profile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalSpec {
    pub n: usize,
    pub k: i32,
    #[serde(flatten)]
    pub profile: Profile,
    #[serde(default)]
    pub x_max: Option<f64>,
}

impl ConformalSpec {
    pub fn build(&self) -> Result<ConformalData> {
        ConformalData::new(default_background(self.k, self.n)?, self.profile.clone(), self.x_max)
    }
}

/// Fitted decay of one boundary condition along `x → 0`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryCheck {
    pub xs: Vec<f64>,
    pub samples: Vec<f64>,
    /// `a` in `q ~ x^a`; absent when `q` vanishes to noise level.
    pub exponent: Option<f64>,
    pub std_error: f64,
    pub critical: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    /// `‖h_x − (1 − kx²/4)² h₀‖_{h₀}` against `⌊n/2⌋`, strict.
    pub c1: BoundaryCheck,
    /// `|R_g + n(n−1)|` against `n − 1`.
    pub c2: BoundaryCheck,
}

impl BoundaryReport {
    pub fn overall(&self) -> Verdict {
        self.c1.verdict.worst(self.c2.verdict)
    }
}

/// `x` samples `min(x_max, 0.1)·10^{−j/2}`, `j = 0..7`.
pub fn default_x_samples(data: &ConformalData) -> Vec<f64> {
    let top = data.x_max().min(0.1);
    (0..7).map(|j| top * 10f64.powf(-(j as f64) / 2.0)).collect()
}

/// Exponent fit over the four smallest `x`, ignoring samples at noise level.
fn fit_check(xs: &[f64], samples: Vec<f64>, critical: f64, floor: f64, strict: bool) -> BoundaryCheck {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let used: Vec<usize> = idx.into_iter().filter(|&i| samples[i] > floor).take(4).collect();
    let fx: Vec<f64> = used.iter().map(|&i| xs[i]).collect();
    let fy: Vec<f64> = used.iter().map(|&i| samples[i]).collect();
    let fit = if used.len() >= 2 { log_log_fit(&fx, &fy) } else { None };
    let (exponent, std_error, verdict) = match fit {
        None => (None, 0.0, Verdict::Pass),
        Some(f) => {
            let band = BORDERLINE_BAND.max(f.std_error);
            let pass = if strict { f.slope > critical + band } else { f.slope >= critical - band };
            (Some(f.slope), f.std_error, if pass { Verdict::Pass } else { Verdict::Fail })
        }
    };
    BoundaryCheck {
        xs: xs.to_vec(),
        samples,
        exponent,
        std_error,
        critical,
        verdict,
    }
}

/// Checks both boundary conditions on the given `x` samples.
pub fn boundary_conditions_check(data: &ConformalData, xs: &[f64]) -> Result<BoundaryReport> {
    let data = data.normalized()?;
    let n = data.n();
    let k = data.k();
    if xs.iter().any(|&x| !(x > 0.0 && x <= data.x_max())) {
        return Err(Error::InvalidArgument(format!("x samples must lie in (0, {}]", data.x_max())));
    }
    let c1: Vec<f64> = xs.iter().map(|&x| data.delta(x)[0].abs() * ((n - 1) as f64).sqrt()).collect();
    let g = data.metric()?;
    let quad = data.background().coarse_quadrature();
    let target = -((n * (n - 1)) as f64);
    let c2 = xs
        .iter()
        .map(|&x| {
            let r = decompactify(x, k)?;
            quad.nodes.iter().try_fold(0.0f64, |acc, v| {
                let (_, s) = ricci_and_scalar(&g, DerivativeScheme::Analytic, &Point::new(r, v))?;
                Ok(acc.max((s - target).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let floor = crate::gauge::CURVATURE_NOISE * (n * (n - 1)) as f64;
    Ok(BoundaryReport {
        c1: fit_check(xs, c1, (n / 2) as f64, 0.0, true),
        c2: fit_check(xs, c2, (n - 1) as f64, floor, false),
    })
}

/// Largest `|K + 1|` over coordinate planes and boundary nodes at each `x`.
pub fn sectional_curvature_diagnostic(data: &ConformalData, xs: &[f64]) -> Result<Vec<f64>> {
    let data = data.normalized()?;
    let g = data.metric()?;
    let quad = data.background().coarse_quadrature();
    xs.iter()
        .map(|&x| {
            let r = decompactify(x, data.k())?;
            quad.nodes.iter().try_fold(0.0f64, |acc, v| {
                let kmat = sectional_curvatures(&g, DerivativeScheme::Analytic, &Point::new(r, v))?;
                let n = kmat.nrows();
                let mut worst = acc;
                for a in 0..n {
                    for b in 0..n {
                        if a != b {
                            worst = worst.max((kmat[(a, b)] + 1.0).abs());
                        }
                    }
                }
                Ok(worst)
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformalMass {
    pub checks: BoundaryReport,
    pub momentum: MomentumCovector,
    pub mass: MassResult,
}

/// Mass of the end described by `data`, refused when a boundary condition
/// fails.
pub fn mass_from_conformal(data: &ConformalData, settings: &MassSettings) -> Result<ConformalMass> {
    let data = data.normalized()?;
    let checks = boundary_conditions_check(&data, &default_x_samples(&data))?;
    for (name, c) in [("c1", &checks.c1), ("c2", &checks.c2)] {
        if c.verdict == Verdict::Fail {
            return Err(Error::BoundaryConditions(format!(
                "{name}: fitted exponent {:?} against critical {}",
                c.exponent, c.critical
            )));
        }
    }
    if let Some(r) = settings.radii.iter().find(|&&r| r < data.r_min()) {
        return Err(Error::InvalidArgument(format!(
            "radius {r} is below the data's lower bound {}",
            data.r_min()
        )));
    }
    let g = data.metric()?;
    let momentum = momentum_vector(&g, data.background(), settings)?;
    let mass = invariant_mass(&momentum, data.k(), ZERO_TOLERANCE)?;
    Ok(ConformalMass { checks, momentum, mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn compactify_examples() {
        assert!((compactify(0.75, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((decompactify(1.0, 1).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(compactify(4.0, 0).unwrap(), 0.25);
        assert_eq!(compactify(1.0, -1).unwrap(), 2.0);
        assert_eq!(decompactify(2.0, 1).unwrap(), 0.0);
        assert!(compactify(0.99, -1).is_err());
        assert!(decompactify(2.5, 1).is_err());
        assert!(decompactify(0.0, 0).is_err());
    }

    #[test]
    fn kottler_profile_matches_closed_form() {
        let eta = 1.0;
        let d = ConformalData::from_family(&Family::Kottler2d { eta }).unwrap();
        for x in [1e-3, 0.05, 0.3] {
            let expect = (1.0 + eta) * x * x / 2.0 + (eta * eta - 1.0) * x.powi(4) / 16.0;
            assert!((d.delta(x)[0] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn static_end_offset_recovers_areal_radius() {
        // the Newton solve for P and the closed-form derivatives agree
        let m = 0.7;
        let d = ConformalData::new(default_background(1, 3).unwrap(), Profile::StaticEnd { m_param: m }, None).unwrap();
        for rt in [5.0, 40.0, 900.0] {
            let (p, pr, prr) = d.static_end_offset(m, rt);
            let h = 1e-3 * rt;
            let (p1, pr1, _) = d.static_end_offset(m, rt + h);
            let (p0, pr0, _) = d.static_end_offset(m, rt - h);
            assert!(((p1 - p0) / (2.0 * h) - pr).abs() < 1e-6 * pr.abs(), "{rt}");
            assert!(((pr1 - pr0) / (2.0 * h) - prr).abs() < 1e-5 * prr.abs(), "{rt}");
            // leading behaviour P ≈ 2m r^{2−n}/n
            assert!((p * rt * 1.5 / m - 1.0).abs() < 5.0 / rt, "{rt} {p}");
        }
    }

    #[test]
    fn boundary_checks_on_examples() {
        let pure = ConformalData::from_family(&Family::Hyperbolic { n: 3 }).unwrap();
        let rep = boundary_conditions_check(&pure, &default_x_samples(&pure)).unwrap();
        assert_eq!(rep.overall(), Verdict::Pass);
        assert!(rep.c1.exponent.is_none());

        let sads = ConformalData::from_family(&Family::SchwarzschildAds { n: 3, m_param: 1.0, k: 1 }).unwrap();
        let rep = boundary_conditions_check(&sads, &default_x_samples(&sads)).unwrap();
        assert!((rep.c1.exponent.unwrap() - 3.0).abs() < 0.05);
        assert_eq!(rep.overall(), Verdict::Pass);

        // h_x = (1 + x) h₀ in n = 3
        let bad = Profile::Series {
            terms: vec![
                SeriesTerm { power: 1.0, coefficient: 1.0 },
                SeriesTerm { power: 2.0, coefficient: 0.5 },
                SeriesTerm { power: 4.0, coefficient: -1.0 / 16.0 },
            ],
        };
        let bad = ConformalData::new(Background::hyperbolic(3).unwrap(), bad, Some(0.5)).unwrap();
        let rep = boundary_conditions_check(&bad, &default_x_samples(&bad)).unwrap();
        assert!((rep.c1.exponent.unwrap() - 1.0).abs() < 0.01);
        assert_eq!(rep.c1.verdict, Verdict::Fail);
        assert!(matches!(
            mass_from_conformal(&bad, &MassSettings::default()),
            Err(Error::BoundaryConditions(_))
        ));
    }

    #[test]
    fn kottler_mass_in_conformal_form() {
        let d = ConformalData::from_family(&Family::Kottler2d { eta: 1.0 }).unwrap();
        let out = mass_from_conformal(&d, &MassSettings::default()).unwrap();
        assert!((out.momentum.components[0] / (4.0 * PI) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sectional_curvatures_approach_minus_one() {
        let d = ConformalData::from_family(&Family::SchwarzschildAds { n: 3, m_param: 0.5, k: 1 }).unwrap();
        let dev = sectional_curvature_diagnostic(&d, &[0.1, 0.01]).unwrap();
        assert!(dev[1] < dev[0] && dev[1] < 1e-4, "{dev:?}");
    }
}
