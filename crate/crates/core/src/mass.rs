//! Flux densities, their integrals over `{r = R}`, extrapolation to
//! `R → ∞`, and the mass covector with its Lorentz-invariant norm.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    christoffel_from, hessian_from, invert, metric_derivs, ricci_and_scalar, scalar_derivs,
    Christoffel, DerivativeScheme, MetricDerivs, MetricField, Point, ScalarField,
};
use crate::jet::Jet;
use crate::quadrature::pairwise_sum;
use crate::reference::families::DiagonalAnsatz;
use crate::reference::{nb_basis, Background, Quadrature, StaticPotential};

/// Which flux density is integrated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrand {
    /// `2√det g (V g^{i[k}g^{j]l} D̊_j g_kl + D^{[i}V g^{j]k} e_jk)`, with
    /// `D^i V = g^{ij} ∂_j V`.
    #[default]
    Standard,
    /// `√det b (−V D̊_j g^{ij} + V b^{ij} b_kl D̊_j g^{kl} + 2 D^{[i}V b^{j]k} e_jk)`.
    Alternative,
}

/// `e = g − b` and its coordinate derivatives `de[k] = ∂_k e`.
#[derive(Debug, Clone)]
pub struct Deviation {
    pub e: DMatrix<f64>,
    pub de: Vec<DMatrix<f64>>,
}

fn uses_exact_deviation(g: &dyn MetricField, bg: &Background) -> bool {
    g.reference_tag().is_some_and(|t| t == bg.tag())
}

fn deviation_values(g: &dyn MetricField, bg: &Background, x: &[Jet]) -> Result<Vec<Jet>> {
    if uses_exact_deviation(g, bg) {
        if let Some(e) = g.exact_deviation(x) {
            return e;
        }
    }
    let gc = g.components(x)?;
    let bc = bg.components(x)?;
    Ok(gc.into_iter().zip(bc).map(|(a, b)| a - b).collect())
}

/// Deviation of `g` from the background at `x`, taken from the metric's
/// closed form when it declares one for this background.
pub fn deviation(
    g: &dyn MetricField,
    bg: &Background,
    scheme: DerivativeScheme,
    x: &[f64],
) -> Result<Deviation> {
    let n = bg.n();
    if g.dim() != n || x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len().min(g.dim()) });
    }
    g.check_domain(x)?;
    let to_matrix = |c: &[Jet]| DMatrix::from_fn(n, n, |i, j| c[i * n + j].value());
    match scheme {
        DerivativeScheme::Analytic => {
            if !g.analytic() {
                return Err(Error::NoAnalyticDerivatives(g.descriptor().family));
            }
            let c = deviation_values(g, bg, &Jet::seed(x))?;
            let de = (0..n)
                .map(|k| DMatrix::from_fn(n, n, |i, j| c[i * n + j].d(k)))
                .collect();
            Ok(Deviation { e: to_matrix(&c), de })
        }
        DerivativeScheme::CentralDifference { h0 } => {
            let at = |y: &[f64]| -> Result<DMatrix<f64>> {
                g.check_domain(y)?;
                Ok(to_matrix(&deviation_values(g, bg, &Jet::constants(y))?))
            };
            let e = at(x)?;
            let de = (0..n)
                .map(|k| {
                    let h = DerivativeScheme::step(h0, x, k);
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[k] += h;
                    xm[k] -= h;
                    Ok((at(&xp)? - at(&xm)?) / (2.0 * h))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Deviation { e, de })
        }
    }
}

/// `D̊_j e_kl = ∂_j e_kl − Γ̊^m_jk e_ml − Γ̊^m_jl e_km`, indexed `[j][(k, l)]`.
fn covariant_deviation(gamma: &Christoffel, dev: &Deviation) -> Vec<DMatrix<f64>> {
    let n = dev.e.nrows();
    (0..n)
        .map(|j| {
            DMatrix::from_fn(n, n, |k, l| {
                let mut s = dev.de[j][(k, l)];
                for m in 0..n {
                    s -= gamma[m][(j, k)] * dev.e[(m, l)] + gamma[m][(j, l)] * dev.e[(k, m)];
                }
                s
            })
        })
        .collect()
}

/// Everything the flux densities need at one point.
struct LocalData {
    b: MetricDerivs,
    gamma: Christoffel,
    dev: Deviation,
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    v: f64,
    dv: DVector<f64>,
}

fn local_data(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    scheme: DerivativeScheme,
    x: &[f64],
) -> Result<LocalData> {
    let b = metric_derivs(&bg.metric(), scheme, x, false)?;
    let gamma = christoffel_from(&b);
    let dev = deviation(g, bg, scheme, x)?;
    let gm = &b.g + &dev.e;
    let ginv = invert(&gm, x)?;
    if gm.determinant() <= 0.0 {
        return Err(Error::DegenerateMetric { point: x.to_vec() });
    }
    let n = x.len();
    let vj = v.eval_jet(&Jet::seed(x));
    let dv = DVector::from_fn(n, |i, _| vj.d(i));
    Ok(LocalData {
        b,
        gamma,
        dev,
        g: gm,
        ginv,
        v: vj.value(),
        dv,
    })
}

fn standard_density(d: &LocalData) -> Vec<f64> {
    let n = d.g.nrows();
    let de = covariant_deviation(&d.gamma, &d.dev);
    let gi = &d.ginv;
    let sqrt_g = d.g.determinant().sqrt();
    // g^{kl} D̊_j g_kl and g^{jl} D̊_j g_kl
    let trace: Vec<f64> = (0..n).map(|j| gi.component_mul(&de[j]).sum()).collect();
    let div: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|j| (0..n).map(|l| gi[(j, l)] * de[j][(k, l)]).sum::<f64>()).sum())
        .collect();
    let tr_e = gi.component_mul(&d.dev.e).sum();
    let ge = gi * &d.dev.e;
    // D^i V is raised with g
    let dv_up = gi * &d.dv;
    (0..n)
        .map(|i| {
            let mut first = 0.0;
            for k in 0..n {
                first += gi[(i, k)] * div[k] - gi[(i, k)] * trace[k];
            }
            // g^{ik} D^j V e_jk
            let mixed: f64 = (0..n).map(|j| dv_up[j] * ge[(i, j)]).sum();
            sqrt_g * (d.v * first + dv_up[i] * tr_e - mixed)
        })
        .collect()
}

fn alternative_density(d: &LocalData) -> Vec<f64> {
    let n = d.g.nrows();
    let de = covariant_deviation(&d.gamma, &d.dev);
    let gi = &d.ginv;
    let bi = &d.b.inv;
    let sqrt_b = d.b.g.determinant().sqrt();
    // D̊_j g^{kl} = −g^{ka} g^{lc} D̊_j e_ac
    let dginv: Vec<DMatrix<f64>> = de.iter().map(|m| -(gi * m * gi)).collect();
    let tr_b: Vec<f64> = (0..n).map(|j| d.b.g.component_mul(&dginv[j]).sum()).collect();
    let tr_e = bi.component_mul(&d.dev.e).sum();
    let be = bi * &d.dev.e;
    let dv_up = bi * &d.dv;
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                s += -d.v * dginv[j][(i, j)] + d.v * bi[(i, j)] * tr_b[j];
            }
            let mixed: f64 = (0..n).map(|j| dv_up[j] * be[(i, j)]).sum();
            sqrt_b * (s + dv_up[i] * tr_e - mixed)
        })
        .collect()
}

/// Coordinate vector density `𝕌ⁱ` of the standard integrand.
pub fn mass_integrand(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<Vec<f64>> {
    Ok(standard_density(&local_data(g, bg, v, scheme, p.coords())?))
}

/// The alternative density; only its flux limit matches [`mass_integrand`].
pub fn alt_mass_integrand(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<Vec<f64>> {
    Ok(alternative_density(&local_data(g, bg, v, scheme, p.coords())?))
}

pub fn integrand(
    which: Integrand,
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<Vec<f64>> {
    match which {
        Integrand::Standard => mass_integrand(g, bg, v, scheme, p),
        Integrand::Alternative => alt_mass_integrand(g, bg, v, scheme, p),
    }
}

/// Flux through `{r = R}` with the difference to a half-resolution rule as
/// its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxSample {
    #[serde(rename = "R")]
    pub radius: f64,
    pub value: f64,
    pub quad_err: f64,
}

fn integrate_radial(
    quad: &Quadrature,
    radius: f64,
    f: &(dyn Fn(&Point) -> Result<f64> + Sync),
) -> Result<f64> {
    let terms = (0..quad.len())
        .into_par_iter()
        .map(|q| {
            let p = Point::new(radius, &quad.nodes[q]);
            Ok(quad.weights[q] / quad.sqrt_det[q] * f(&p)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

pub fn flux_at_radius(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    scheme: DerivativeScheme,
    radius: f64,
    which: Integrand,
) -> Result<FluxSample> {
    if !(radius.is_finite() && radius > bg.r_floor()) {
        return Err(Error::InvalidArgument(format!("radius {radius} is outside the end chart")));
    }
    let density = |p: &Point| Ok(integrand(which, g, bg, v, scheme, p)?[0]);
    let fine = integrate_radial(&bg.quadrature(), radius, &density)?;
    let coarse = integrate_radial(&bg.coarse_quadrature(), radius, &density)?;
    Ok(FluxSample {
        radius,
        value: fine,
        quad_err: (fine - coarse).abs(),
    })
}

/// `R ∈ {10, 10^1.5, 10², 10^2.5, 10³}`.
pub fn default_radii() -> Vec<f64> {
    vec![10.0, 10f64.powf(1.5), 100.0, 10f64.powf(2.5), 1000.0]
}

/// Absolute and relative tolerance pair; a quantity `q` is small when
/// `|q| ≤ abs + rel·|reference|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-6, rel: 1e-6 }
    }
}

impl Tolerance {
    pub fn bound(&self, reference: f64) -> f64 {
        self.abs + self.rel * reference.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    Converged,
    Unconverged,
    Divergent,
}

/// Extrapolated limit of a flux sequence.
#[derive(Debug, Clone, Serialize)]
pub struct MassLimit {
    pub value: f64,
    /// `(a₀, a₁, a₂)` of `a₀ + a₁/R + a₂/R²`.
    pub coefficients: [f64; 3],
    pub residual: f64,
    pub drift: f64,
    pub status: LimitStatus,
    pub samples: Vec<FluxSample>,
}

/// Weighted least squares for `a₀ + a₁/R + a₂/R²`, rows weighted by `R²`.
fn inverse_power_fit(samples: &[FluxSample]) -> Result<([f64; 3], f64)> {
    let r0 = samples[0].radius;
    let rmax = samples[samples.len() - 1].radius;
    let m = samples.len();
    let w: Vec<f64> = samples.iter().map(|s| (s.radius / rmax).powi(2)).collect();
    let a = DMatrix::from_fn(m, 3, |i, j| w[i] * (r0 / samples[i].radius).powi(j as i32));
    let y = DVector::from_fn(m, |i, _| w[i] * samples[i].value);
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("extrapolation fit failed: {e}")))?;
    let coeffs = [c[0], c[1] * r0, c[2] * r0 * r0];
    let resid = &a * &c - &y;
    let residual = (resid.norm_squared() / w.iter().map(|x| x * x).sum::<f64>()).sqrt();
    Ok((coeffs, residual))
}

/// Extrapolates `R → ∞` from at least three samples.
pub fn mass_limit(samples: &[FluxSample], tol: Tolerance) -> Result<MassLimit> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "extrapolation needs at least 3 radii, got {}",
            samples.len()
        )));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    if s.windows(2).any(|w| w[0].radius == w[1].radius) {
        return Err(Error::InvalidArgument("extrapolation radii must be distinct".into()));
    }
    let m = s.len();
    if s.iter().any(|x| !x.value.is_finite()) {
        return Ok(MassLimit {
            value: f64::NAN,
            coefficients: [f64::NAN; 3],
            residual: f64::NAN,
            drift: f64::NAN,
            status: LimitStatus::Divergent,
            samples: s,
        });
    }
    let (coefficients, residual) = inverse_power_fit(&s)?;
    let value = coefficients[0];
    let drift = if m >= 4 {
        (value - inverse_power_fit(&s[1..])?.0[0]).abs()
    } else {
        (s[m - 1].value - s[m - 2].value).abs()
    };
    let last_step = (s[m - 1].value - s[m - 2].value).abs();
    let prev_step = (s[m - 2].value - s[m - 3].value).abs();
    let bound = tol.bound(value);
    let status = if last_step >= prev_step && last_step > tol.bound(s[m - 1].value) {
        LimitStatus::Divergent
    } else if residual <= bound && drift <= bound {
        LimitStatus::Converged
    } else {
        LimitStatus::Unconverged
    };
    Ok(MassLimit {
        value,
        coefficients,
        residual,
        drift,
        status,
        samples: s,
    })
}

/// Settings shared by every flux evaluation of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassSettings {
    pub scheme: DerivativeScheme,
    pub integrand: Integrand,
    pub radii: Vec<f64>,
    pub tolerance: Tolerance,
}

impl Default for MassSettings {
    fn default() -> Self {
        MassSettings {
            scheme: DerivativeScheme::Analytic,
            integrand: Integrand::Standard,
            radii: default_radii(),
            tolerance: Tolerance::default(),
        }
    }
}

pub fn flux_samples(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    settings: &MassSettings,
) -> Result<Vec<FluxSample>> {
    settings
        .radii
        .iter()
        .map(|&r| flux_at_radius(g, bg, v, settings.scheme, r, settings.integrand))
        .collect()
}

/// `H(V)`: flux samples over the configured radii, then [`mass_limit`].
pub fn mass_integral(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    settings: &MassSettings,
) -> Result<MassLimit> {
    mass_limit(&flux_samples(g, bg, v, settings)?, settings.tolerance)
}

/// Finite-`R` value of the linearized expression for `H(V₍₀₎)`:
/// `(R²+k) ∫ (−Σᵢ[∂_r eᵢᵢ + k eᵢᵢ/(r(r²+k))] + (n−1)e_nn/r) dμ_h` with
/// frame components `e_ab` and `h` induced by `g` on `{r = R}`.
pub fn linearized_mass(g: &dyn MetricField, bg: &Background, radius: f64) -> Result<f64> {
    let n = bg.n();
    let k = bg.k() as f64;
    let scheme = if g.analytic() {
        DerivativeScheme::Analytic
    } else {
        DerivativeScheme::central(1e-4)
    };
    let density = |p: &Point| -> Result<f64> {
        let x = p.coords();
        let r = x[0];
        let dev = deviation(g, bg, scheme, x)?;
        let hc = bg.boundary().metric_components(&Jet::constants(p.angles()))?;
        let m = n - 1;
        let h = DMatrix::from_fn(m, m, |a, b| hc[a * m + b].value());
        let hinv = invert(&h, x)?;
        // Σᵢ eᵢᵢ over the angular frame is r⁻² h̆^{AB} e_AB
        let mut tr = 0.0;
        let mut dtr = 0.0;
        for a in 0..m {
            for b in 0..m {
                tr += hinv[(a, b)] * dev.e[(a + 1, b + 1)];
                dtr += hinv[(a, b)] * dev.de[0][(a + 1, b + 1)];
            }
        }
        let t = tr / (r * r);
        let dt = dtr / (r * r) - 2.0 * t / r;
        let e_nn = (r * r + k) * dev.e[(0, 0)];
        let value = -(dt + k * t / (r * (r * r + k))) + (m as f64) * e_nn / r;
        let gm = g.eval(x)?;
        let g_ang = gm.view((1, 1), (m, m)).into_owned();
        Ok(value * g_ang.determinant().sqrt())
    };
    Ok((radius * radius + k) * integrate_radial(&bg.quadrature(), radius, &density)?)
}

/// Flux of a diagonal-ansatz metric through `{r = R}` from the closed form
/// `(n−1)c^{(n−3)/2} r^{n−2}/(a√g_nn) {V(g_nn − 1 − r∂_r c) + (r∂_r V − V)(c − 1)}`.
pub fn ansatz_flux(ansatz: &DiagonalAnsatz, v: &dyn ScalarField, radius: f64) -> Result<f64> {
    let bg = ansatz.background();
    let n = bg.n();
    let density = |p: &Point| -> Result<f64> {
        let x = Jet::seed(p.coords());
        let r = p.r();
        let gnn1 = ansatz.gnn_deviation(&x);
        let c1 = ansatz.c_deviation(&x);
        let gnn = 1.0 + gnn1.value();
        let c = 1.0 + c1.value();
        if !(gnn > 0.0 && c > 0.0) {
            return Err(Error::ChartDomain {
                point: p.coords().to_vec(),
                reason: format!("ansatz needs g_nn > 0 and c > 0 (got {gnn}, {c})"),
            });
        }
        let a = ansatz.a(x[0]).value();
        let vj = v.eval_jet(&x);
        let (vv, dv) = (vj.value(), vj.d(0));
        let pre = (n as f64 - 1.0) * c.powf((n as f64 - 3.0) / 2.0) * r.powi(n as i32 - 2)
            / (a * gnn.sqrt());
        let brace = vv * (gnn1.value() - r * c1.d(0)) + (r * dv - vv) * c1.value();
        // the closed form already carries √det h̆
        let sqrt_h = bg
            .boundary()
            .as_metric()
            .eval(p.angles())?
            .determinant()
            .sqrt();
        Ok(pre * brace * sqrt_h)
    };
    integrate_radial(&bg.quadrature(), radius, &density)
}

/// `p₍μ₎` with per-component extrapolation diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct MomentumCovector {
    pub components: Vec<f64>,
    pub diagnostics: Vec<MassLimit>,
}

impl MomentumCovector {
    pub fn new(components: Vec<f64>) -> Self {
        MomentumCovector {
            components,
            diagnostics: Vec::new(),
        }
    }

    /// `η(p, p) = p₀² − Σ pᵢ²`.
    pub fn pairing(&self) -> f64 {
        let p = &self.components;
        p[0] * p[0] - p[1..].iter().map(|x| x * x).sum::<f64>()
    }

    /// Euclidean norm of the components.
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Worst status over all components.
    pub fn status(&self) -> LimitStatus {
        let st = self.diagnostics.iter().map(|d| d.status);
        if st.clone().any(|s| s == LimitStatus::Divergent) {
            LimitStatus::Divergent
        } else if st.clone().any(|s| s == LimitStatus::Unconverged) {
            LimitStatus::Unconverged
        } else {
            LimitStatus::Converged
        }
    }
}

/// `p₍μ₎ = H(V₍μ₎)` over the standard basis of the background.
pub fn momentum_vector(
    g: &dyn MetricField,
    bg: &Background,
    settings: &MassSettings,
) -> Result<MomentumCovector> {
    momentum_vector_with(g, bg, &nb_basis(bg)?, settings)
}

/// `p₍μ₎` over caller-supplied potentials.
pub fn momentum_vector_with(
    g: &dyn MetricField,
    bg: &Background,
    potentials: &[StaticPotential],
    settings: &MassSettings,
) -> Result<MomentumCovector> {
    let diagnostics = potentials
        .par_iter()
        .map(|v| mass_integral(g, bg, v, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentumCovector {
        components: diagnostics.iter().map(|d| d.value).collect(),
        diagnostics,
    })
}

/// Boundary type of the background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MassCase {
    /// `k = −1`, Ricci-negative boundary.
    A,
    /// `k = 0`, flat unit-volume boundary.
    B,
    /// `k = 1`, round sphere.
    C,
}

impl MassCase {
    pub fn from_k(k: i32) -> Result<Self> {
        match k {
            -1 => Ok(MassCase::A),
            0 => Ok(MassCase::B),
            1 => Ok(MassCase::C),
            _ => Err(Error::InvalidArgument(format!("k must be -1, 0 or 1, got {k}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    TimelikeFuture,
    TimelikePast,
    NullFuture,
    NullPast,
    Spacelike,
    Zero,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::TimelikeFuture => "timelike-future",
            Classification::TimelikePast => "timelike-past",
            Classification::NullFuture => "null-future",
            Classification::NullPast => "null-past",
            Classification::Spacelike => "spacelike",
            Classification::Zero => "zero",
        }
    }
}

/// Default relative zero tolerance for [`classify`].
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Causal character of a covector under `η = diag(+, −, …, −)`. The
/// norm is zero when `‖p‖ < tol(1 + ‖p‖)`, and `η(p, p)` is zero when
/// `|η(p, p)| < tol(1 + ‖p‖)²`.
pub fn classify(p: &[f64], tol: f64) -> Classification {
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = 1.0 + norm;
    if norm < tol * scale {
        return Classification::Zero;
    }
    let q = p[0] * p[0] - p[1..].iter().map(|x| x * x).sum::<f64>();
    let future = p[0] > 0.0;
    if q.abs() < tol * scale * scale {
        if future {
            Classification::NullFuture
        } else {
            Classification::NullPast
        }
    } else if q > 0.0 {
        if future {
            Classification::TimelikeFuture
        } else {
            Classification::TimelikePast
        }
    } else {
        Classification::Spacelike
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MassResult {
    pub case: MassCase,
    pub p: Vec<f64>,
    pub m2: f64,
    /// Signed mass: `sign(p₀)√m²` when timelike, 0 when null or zero,
    /// absent when spacelike.
    pub m: Option<f64>,
    pub classification: Classification,
}

/// `m² = |p₀² − Σ pᵢ²|` with its causal class; for `k ≤ 0` the covector has
/// the single component `m = p₀`.
pub fn invariant_mass(p: &MomentumCovector, k: i32, zero_tol: f64) -> Result<MassResult> {
    let case = MassCase::from_k(k)?;
    let c = &p.components;
    if c.is_empty() {
        return Err(Error::InvalidArgument("empty momentum covector".into()));
    }
    if case != MassCase::C && c.len() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: c.len() });
    }
    let classification = classify(c, zero_tol);
    let m2 = p.pairing().abs();
    let m = match classification {
        Classification::TimelikeFuture | Classification::TimelikePast => {
            Some(m2.sqrt().copysign(c[0]))
        }
        Classification::Spacelike => None,
        _ => Some(0.0),
    };
    Ok(MassResult {
        case,
        p: c.clone(),
        m2,
        m,
        classification,
    })
}

/// `ρ = (−V Ric(b)_ij + D̊_iD̊_jV − Δ_bV b_ij) g^{ik} g^{jl} e_kl`.
pub fn rho(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<f64> {
    let x = p.coords();
    let b = metric_derivs(&bg.metric(), scheme, x, true)?;
    let gamma = christoffel_from(&b);
    let (ric, _) = crate::geom::ricci_from(&b)?;
    let sv = scalar_derivs(v, scheme, x);
    let hess = hessian_from(&gamma, &sv);
    let lap = b.inv.component_mul(&hess).sum();
    let dev = deviation(g, bg, scheme, x)?;
    let ginv = invert(&(&b.g + &dev.e), x)?;
    let t = -(ric * sv.value) + hess - &b.g * lap;
    let e_up = &ginv * &dev.e * &ginv;
    Ok(t.component_mul(&e_up).sum())
}

/// Quadrature of `√det g V(R_g − R_b) − ∂_i𝕌ⁱ − √det g ρ` over the annulus
/// `[r1, r2] × N`. The integrand is the quadratic remainder of the
/// divergence identity, so it is `O(ε²)` for `g = b + εê`.
pub fn first_order_residual(
    g: &dyn MetricField,
    bg: &Background,
    v: &dyn ScalarField,
    annulus: (f64, f64),
    radial_nodes: usize,
) -> Result<f64> {
    let n = bg.n();
    let scheme = DerivativeScheme::Analytic;
    let r_b = -((n * (n - 1)) as f64);
    let (rs, ws) = crate::quadrature::gauss_legendre_on(radial_nodes, annulus.0, annulus.1);
    let quad = bg.quadrature();
    let h0 = 1e-4;
    let shell = |r: f64| -> Result<f64> {
        let density = |p: &Point| -> Result<f64> {
            let x = p.coords();
            let (_, r_g) = ricci_and_scalar(g, scheme, p)?;
            let sqrt_g = g.eval(x)?.determinant().sqrt();
            let mut div = 0.0;
            for i in 0..n {
                let h = DerivativeScheme::step(h0, x, i);
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let up = mass_integrand(g, bg, v, scheme, &Point::from_coords(xp))?[i];
                let um = mass_integrand(g, bg, v, scheme, &Point::from_coords(xm))?[i];
                div += (up - um) / (2.0 * h);
            }
            let rho = rho(g, bg, v, scheme, p)?;
            Ok(sqrt_g * v.value(x) * (r_g - r_b) - div - sqrt_g * rho)
        };
        // coordinate measure dv = dμ_h̆ / √det h̆, supplied by integrate_radial
        integrate_radial(&quad, r, &density)
    };
    let shells = rs.iter().map(|&r| shell(r)).collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(
        &shells.iter().zip(&ws).map(|(s, w)| s * w).collect::<Vec<_>>(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::families::{Kottler2d, SchwarzschildAds};
    use std::f64::consts::PI;

    fn v0(bg: &Background) -> StaticPotential {
        nb_basis(bg).unwrap().remove(0)
    }

    #[test]
    fn background_has_zero_density() {
        let bg = Background::hyperbolic(3).unwrap();
        let p = Point::new(7.0, &[0.8, 2.0]);
        for v in nb_basis(&bg).unwrap() {
            for w in [Integrand::Standard, Integrand::Alternative] {
                let u = integrand(w, &bg.metric(), &bg, &v, DerivativeScheme::Analytic, &p).unwrap();
                assert!(u.iter().all(|x| *x == 0.0), "{u:?}");
            }
        }
    }

    #[test]
    fn kottler_radial_density_matches_closed_form() {
        let k = Kottler2d::new(1.0).unwrap();
        let bg = k.background().clone();
        let u = mass_integrand(&k, &bg, &v0(&bg), DerivativeScheme::Analytic, &Point::new(10.0, &[0.3]))
            .unwrap();
        assert!((u[0] - 2.0 * (101.0f64 / 99.0).sqrt()).abs() < 1e-12, "{}", u[0]);
    }

    #[test]
    fn kottler_flux_values() {
        for (eta, radius, expected) in [
            (0.0, 10.0, 2.0 * PI * (101.0f64 / 100.0).sqrt()),
            (1.0, 100.0, 4.0 * PI * (10001.0f64 / 9999.0).sqrt()),
        ] {
            let k = Kottler2d::new(eta).unwrap();
            let bg = k.background().clone();
            let s = flux_at_radius(&k, &bg, &v0(&bg), DerivativeScheme::Analytic, radius, Integrand::Standard)
                .unwrap();
            assert!((s.value - expected).abs() < 1e-12 * expected, "{} vs {expected}", s.value);
            assert!(s.quad_err < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_exact_model() {
        let samples: Vec<FluxSample> = default_radii()
            .into_iter()
            .map(|r| FluxSample {
                radius: r,
                value: 3.0 - 2.0 / r + 5.0 / (r * r),
                quad_err: 0.0,
            })
            .collect();
        let lim = mass_limit(&samples, Tolerance::default()).unwrap();
        assert!((lim.value - 3.0).abs() < 1e-12);
        assert!((lim.coefficients[1] + 2.0).abs() < 1e-9);
        assert_eq!(lim.status, LimitStatus::Converged);
    }

    #[test]
    fn growing_sequence_is_divergent() {
        let samples: Vec<FluxSample> = default_radii()
            .into_iter()
            .map(|r| FluxSample { radius: r, value: r.sqrt(), quad_err: 0.0 })
            .collect();
        assert_eq!(mass_limit(&samples, Tolerance::default()).unwrap().status, LimitStatus::Divergent);
    }

    #[test]
    fn too_few_samples_rejected() {
        let s = [FluxSample { radius: 1.0, value: 0.0, quad_err: 0.0 }; 2];
        assert!(mass_limit(&s, Tolerance::default()).is_err());
    }

    #[test]
    fn linearized_mass_for_schwarzschild_ads() {
        let s = SchwarzschildAds::new(Background::hyperbolic(3).unwrap(), 0.5).unwrap();
        let bg = s.background().clone();
        let val = linearized_mass(&s, &bg, 1000.0).unwrap();
        assert!((val / (8.0 * PI) - 1.0).abs() < 1e-5, "{val}");
    }

    #[test]
    fn classification_examples() {
        let r = invariant_mass(&MomentumCovector::new(vec![5.0, 3.0, 0.0, 0.0]), 1, ZERO_TOLERANCE).unwrap();
        assert_eq!(r.m2, 16.0);
        assert_eq!(r.m, Some(4.0));
        assert_eq!(r.classification, Classification::TimelikeFuture);
        let r = invariant_mass(&MomentumCovector::new(vec![1.0, 1.0, 0.0, 0.0]), 1, ZERO_TOLERANCE).unwrap();
        assert_eq!((r.m2, r.m, r.classification), (0.0, Some(0.0), Classification::NullFuture));
        let r = invariant_mass(&MomentumCovector::new(vec![0.0; 4]), 1, ZERO_TOLERANCE).unwrap();
        assert_eq!(r.classification, Classification::Zero);
        let r = invariant_mass(&MomentumCovector::new(vec![-2.0, 1.0, 0.0, 0.0]), 1, ZERO_TOLERANCE).unwrap();
        assert_eq!(r.classification, Classification::TimelikePast);
        assert!((r.m.unwrap() + 3f64.sqrt()).abs() < 1e-15);
        let r = invariant_mass(&MomentumCovector::new(vec![1.0, 2.0, 0.0, 0.0]), 1, ZERO_TOLERANCE).unwrap();
        assert_eq!((r.classification, r.m), (Classification::Spacelike, None));
    }

    #[test]
    fn one_component_cases() {
        let r = invariant_mass(&MomentumCovector::new(vec![-1.5]), -1, ZERO_TOLERANCE).unwrap();
        assert_eq!(r.case, MassCase::A);
        assert_eq!(r.m, Some(-1.5));
        assert!(invariant_mass(&MomentumCovector::new(vec![1.0, 0.0]), 0, ZERO_TOLERANCE).is_err());
    }
}
