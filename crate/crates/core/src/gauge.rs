//! Radial gauge deformations, the Lorentz action on mass covectors, and
//! sampled decay diagnostics.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{ricci_and_scalar, DerivativeScheme, MetricDescriptor, MetricField, Point, ReferenceTag, ScalarField};
use crate::jet::Jet;
use crate::mass::{deviation, MomentumCovector};
use crate::quadrature::{gauss_legendre_on, pairwise_sum};
use crate::reference::{asymptotic_frame, sphere_volume, Background, StaticPotential};

/// Pullback of a metric under `(r, v) ↦ (r + γ r^{1−s}, v)`; `s = n/2` is the
/// borderline shift.
#[derive(Clone)]
pub struct RadialGauge {
    inner: Arc<dyn MetricField>,
    background: Background,
    gamma: f64,
    exponent: f64,
    r_min: f64,
}

impl std::fmt::Debug for RadialGauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialGauge")
            .field("inner", &self.inner.descriptor())
            .field("gamma", &self.gamma)
            .field("exponent", &self.exponent)
            .field("r_min", &self.r_min)
            .finish()
    }
}

/// `r̄ = r + γ r^{1−n/2}` applied to `g`, whose deviation is measured
/// against `bg`.
pub fn apply_radial_gauge(g: Arc<dyn MetricField>, bg: &Background, gamma: f64) -> Result<RadialGauge> {
    RadialGauge::new(g, bg, gamma, bg.n() as f64 / 2.0)
}

impl RadialGauge {
    pub fn new(g: Arc<dyn MetricField>, bg: &Background, gamma: f64, exponent: f64) -> Result<Self> {
        if g.dim() != bg.n() {
            return Err(Error::DimensionMismatch { expected: bg.n(), got: g.dim() });
        }
        if !(gamma.is_finite() && exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gauge needs finite γ and positive exponent, got γ={gamma}, s={exponent}"
            )));
        }
        let mut out = RadialGauge {
            inner: g,
            background: bg.clone(),
            gamma,
            exponent,
            r_min: 0.0,
        };
        out.r_min = out.monotonicity_bound();
        Ok(out)
    }

    /// Radius beyond which `r̄` is increasing, positive and beyond the
    /// background's radial floor.
    pub fn monotonicity_bound(&self) -> f64 {
        let (g, s) = (self.gamma, self.exponent);
        let mut bound: f64 = 0.0;
        if g * (1.0 - s) < 0.0 {
            bound = bound.max((g * (s - 1.0)).powf(1.0 / s));
        }
        if g < 0.0 {
            bound = bound.max((-g).powf(1.0 / s));
        }
        let floor = self.background.r_floor();
        if floor > 0.0 {
            // smallest r with r̄(r) ≥ floor, by bisection on the increasing branch
            let (mut lo, mut hi) = (bound, floor.max(bound) + 1.0);
            while self.r_bar(hi) <= floor {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if self.r_bar(mid) <= floor {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            bound = bound.max(hi);
        }
        bound
    }

    /// Restricts the chart to `r > r_min`.
    pub fn with_chart_min(mut self, r_min: f64) -> Result<Self> {
        let bound = self.monotonicity_bound();
        if !(r_min > bound) {
            return Err(Error::ChartDomain {
                point: vec![r_min],
                reason: format!("gauge map is not monotone below r = {bound}"),
            });
        }
        self.r_min = r_min;
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn r_bar(&self, r: f64) -> f64 {
        r + self.gamma * r.powf(1.0 - self.exponent)
    }

    /// `δ = γ r^{−s}`, so that `r̄ = r(1 + δ)` and `r̄' = 1 + (1 − s)δ`.
    fn delta(&self, r: Jet) -> Jet {
        r.powf(-self.exponent) * self.gamma
    }

    fn pulled_back_coords(&self, x: &[Jet]) -> (Vec<Jet>, Jet) {
        let r = x[0];
        let delta = self.delta(r);
        let mut xb = x.to_vec();
        xb[0] = r * (delta + 1.0);
        (xb, delta * (1.0 - self.exponent) + 1.0)
    }

    fn pull_back(&self, c: &mut [Jet], rbar_prime: Jet) {
        let n = self.dim();
        for a in 0..n {
            c[a] *= rbar_prime;
            c[a * n] *= rbar_prime;
        }
    }
}

impl MetricField for RadialGauge {
    fn dim(&self) -> usize {
        self.background.n()
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let (xb, rp) = self.pulled_back_coords(x);
        let mut c = self.inner.components(&xb)?;
        self.pull_back(&mut c, rp);
        Ok(c)
    }

    fn analytic(&self) -> bool {
        self.inner.analytic()
    }

    fn descriptor(&self) -> MetricDescriptor {
        let inner = self.inner.descriptor();
        let mut d = MetricDescriptor::new(format!("radial_gauge({})", inner.family))
            .with("gamma", self.gamma)
            .with("exponent", self.exponent);
        for (k, v) in inner.params {
            d.params.insert(format!("inner.{k}"), v);
        }
        d
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if !(x[0] > self.r_min) {
            return Err(Error::ChartDomain {
                point: x.to_vec(),
                reason: format!("gauge chart requires r > {}", self.r_min),
            });
        }
        let mut xb = x.to_vec();
        xb[0] = self.r_bar(x[0]);
        self.inner.check_domain(&xb)
    }

    fn reference_tag(&self) -> Option<ReferenceTag> {
        Some(self.background.tag())
    }

    fn exact_deviation(&self, x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        let tag = self.background.tag();
        if self.inner.reference_tag().as_ref() != Some(&tag) {
            return None;
        }
        let n = self.dim();
        let (xb, rp) = self.pulled_back_coords(x);
        let mut e = match self.inner.exact_deviation(&xb)? {
            Ok(e) => e,
            Err(err) => return Some(Err(err)),
        };
        self.pull_back(&mut e, rp);
        // pullback of b minus b
        let r = x[0];
        let k = self.background.k() as f64;
        let delta = self.delta(r);
        let u = delta * (1.0 - self.exponent);
        let rp2_minus_one = u * (u + 2.0);
        let ang = r * r * delta * (delta + 2.0);
        let b_lapse = r * r + k;
        let numerator = rp2_minus_one * b_lapse - ang;
        e[0] += numerator / ((b_lapse + ang) * b_lapse);
        let h = match self.background.boundary().metric_components(&x[1..]) {
            Ok(h) => h,
            Err(err) => return Some(Err(err)),
        };
        for a in 0..n - 1 {
            for b in 0..n - 1 {
                e[(a + 1) * n + b + 1] += ang * h[a * (n - 1) + b];
            }
        }
        Some(Ok(e))
    }
}

/// `¼(n+8)n(n−1)γ² Vol(S^{n−1})`.
pub fn predicted_gauge_mass(n: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    0.25 * (nf + 8.0) * nf * (nf - 1.0) * gamma * gamma * sphere_volume(n - 1)
}

/// An element of `O⁺(n,1)` acting on covectors `p₍μ₎`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMap {
    matrix: DMatrix<f64>,
}

/// Tolerance on `ΛᵀηΛ = η` accepted at construction.
pub const LORENTZ_TOLERANCE: f64 = 1e-10;

fn minkowski(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (i, j) if i == j => -1.0,
        _ => 0.0,
    })
}

impl LorentzMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d < 2 || matrix.ncols() != d {
            return Err(Error::NotLorentz(format!("matrix must be square of size ≥ 2, got {}×{}", d, matrix.ncols())));
        }
        let eta = minkowski(d);
        let defect = (matrix.transpose() * &eta * &matrix - &eta).abs().max();
        if !(defect <= LORENTZ_TOLERANCE) {
            return Err(Error::NotLorentz(format!("ΛᵀηΛ − η has entry {defect:e}")));
        }
        if !(matrix[(0, 0)] > 0.0) {
            return Err(Error::NotLorentz("Λ⁰₀ must be positive".into()));
        }
        Ok(LorentzMap { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        LorentzMap { matrix: DMatrix::identity(dim, dim) }
    }

    /// Boost mixing component 0 with `axis` (1-based spatial index):
    /// `p₀ ↦ cosh φ p₀ − sinh φ p_a`, `p_a ↦ −sinh φ p₀ + cosh φ p_a`.
    pub fn boost(dim: usize, axis: usize, rapidity: f64) -> Result<Self> {
        if axis == 0 || axis >= dim {
            return Err(Error::InvalidArgument(format!("boost axis {axis} outside 1..{dim}")));
        }
        let mut m = DMatrix::identity(dim, dim);
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        m[(0, 0)] = c;
        m[(axis, axis)] = c;
        m[(0, axis)] = -s;
        m[(axis, 0)] = -s;
        Ok(LorentzMap { matrix: m })
    }

    /// Rotation by `angle` in the plane of spatial axes `i`, `j` (1-based).
    pub fn rotation(dim: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i == 0 || j == 0 || i >= dim || j >= dim || i == j {
            return Err(Error::InvalidArgument(format!("rotation plane ({i}, {j}) invalid for dimension {dim}")));
        }
        let mut m = DMatrix::identity(dim, dim);
        let (c, s) = (angle.cos(), angle.sin());
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        Ok(LorentzMap { matrix: m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LorentzMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(LorentzMap { matrix: &self.matrix * &other.matrix })
    }
}

pub fn lorentz_act(l: &LorentzMap, p: &MomentumCovector) -> Result<MomentumCovector> {
    if p.components.len() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), got: p.components.len() });
    }
    let v = &l.matrix * DVector::from_column_slice(&p.components);
    Ok(MomentumCovector::new(v.iter().copied().collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Borderline,
    Fail,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn worst(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Borderline, _) | (_, Borderline) => Borderline,
            _ => Pass,
        }
    }
}

/// Half-width of the band around a critical exponent inside which a
/// finite sample cannot separate `o(r^{−a})` from `O(r^{−a})`.
pub const BORDERLINE_BAND: f64 = 0.1;

/// Least-squares slope of `log y` against `log R`, with standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    pub std_error: f64,
}

pub fn log_log_fit(radii: &[f64], values: &[f64]) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    let std_error = if pts.len() > 2 {
        let ss: f64 = pts.iter().map(|p| (p.1 - ym - slope * (p.0 - xm)).powi(2)).sum();
        (ss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(PowerFit { slope, std_error })
}

/// Decay of a sampled quantity compared with a critical exponent.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentCheck {
    /// Fitted decay exponent `a` in `q ~ R^{−a}`; absent when `q` vanishes.
    pub exponent: Option<f64>,
    pub std_error: f64,
    pub critical: f64,
    pub samples: Vec<f64>,
    pub verdict: Verdict,
}

/// Nested-annulus estimate of a radial integral's tail.
#[derive(Debug, Clone, Serialize)]
pub struct IntegralCheck {
    /// Integral over `[R_i, R_{i+1}] × N`.
    pub annuli: Vec<f64>,
    /// Ratio of the last two annulus contributions.
    pub tail_ratio: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceCheck {
    /// Smallest sampled `C` with `C⁻¹ b ≤ g ≤ C b`.
    pub constant: f64,
    pub per_radius: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialGrowth {
    pub potential: String,
    pub value_exponent: Option<f64>,
    pub gradient_exponent: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub m3a: IntegralCheck,
    pub m3b: IntegralCheck,
    pub m0: EquivalenceCheck,
    pub m5: ExponentCheck,
    pub potentials: Vec<PotentialGrowth>,
}

impl DecayReport {
    pub fn overall(&self) -> Verdict {
        self.potentials.iter().fold(
            self.m3a.verdict.worst(self.m3b.verdict).worst(self.m0.verdict).worst(self.m5.verdict),
            |acc, p| acc.worst(p.verdict),
        )
    }
}

/// Frame components `E_ab = e(f_a, f_b)` and their frame derivatives
/// `f_c(E_ab)`, indexed `[c][(a, b)]`.
pub fn frame_deviation(
    g: &dyn MetricField,
    bg: &Background,
    p: &Point,
) -> Result<(DMatrix<f64>, Vec<DMatrix<f64>>)> {
    let n = bg.n();
    let x = p.coords();
    let scheme = if g.analytic() { DerivativeScheme::Analytic } else { DerivativeScheme::central(1e-4) };
    let dev = deviation(g, bg, scheme, x)?;
    let frame_matrix = |y: &[f64]| -> Result<DMatrix<f64>> {
        let f = asymptotic_frame(bg, &Point::from_coords(y.to_vec()))?;
        Ok(DMatrix::from_fn(n, n, |i, a| f[a][i]))
    };
    let f = frame_matrix(x)?;
    let e_frame = f.transpose() * &dev.e * &f;
    // coordinate derivatives of E: the frame itself is differenced
    let de: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let h = DerivativeScheme::step(1e-5, x, i);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let df = (frame_matrix(&xp)? - frame_matrix(&xm)?) / (2.0 * h);
            let t = df.transpose() * &dev.e * &f;
            Ok(&t + t.transpose() + f.transpose() * &dev.de[i] * &f)
        })
        .collect::<Result<_>>()?;
    let fe = (0..n)
        .map(|c| {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m += &de[i] * f[(i, c)];
            }
            m
        })
        .collect();
    Ok((e_frame, fe))
}

/// Decay (`q ~ R^{−a}`, needs `a` beyond `critical`) or growth (`q ~ R^a`,
/// needs `a ≤ critical`) verdict for a fitted power.
fn exponent_verdict(fit: Option<PowerFit>, critical: f64, decay: bool) -> (Option<f64>, f64, Verdict) {
    // no fit means the quantity vanished at every sample
    let Some(fit) = fit else {
        return (None, 0.0, Verdict::Pass);
    };
    let band = BORDERLINE_BAND.max(fit.std_error);
    let (a, verdict) = if decay {
        let a = -fit.slope;
        let v = if a > critical + band {
            Verdict::Pass
        } else if a >= critical - band {
            Verdict::Borderline
        } else {
            Verdict::Fail
        };
        (a, v)
    } else {
        let a = fit.slope;
        (a, if a <= critical + band { Verdict::Pass } else { Verdict::Fail })
    };
    (Some(a), fit.std_error, verdict)
}

/// Geometric-tail test for annulus contributions.
fn integral_verdict(annuli: &[f64]) -> (Option<f64>, Verdict) {
    let m = annuli.len();
    if m < 2 {
        return (None, Verdict::Borderline);
    }
    let (a, b) = (annuli[m - 2].abs(), annuli[m - 1].abs());
    if b == 0.0 {
        return (if a == 0.0 { None } else { Some(0.0) }, Verdict::Pass);
    }
    let ratio = b / a;
    let verdict = if ratio < 0.9 {
        Verdict::Pass
    } else if ratio <= 1.1 {
        Verdict::Borderline
    } else {
        Verdict::Fail
    };
    (Some(ratio), verdict)
}

/// Scalar-curvature differences below this are rounding noise.
pub const CURVATURE_NOISE: f64 = 1e-9;

struct NodeSample {
    m5: f64,
    m3a: f64,
    c: f64,
}

/// Samples the decay conditions on `{r = R}` for the given radii (at least
/// five, geometrically spaced). Exponents are fitted on the three largest.
pub fn decay_report(
    g: &dyn MetricField,
    bg: &Background,
    potentials: &[StaticPotential],
    radii: &[f64],
) -> Result<DecayReport> {
    if radii.len() < 5 {
        return Err(Error::InvalidArgument(format!("decay report needs at least 5 radii, got {}", radii.len())));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let n = bg.n();
    let quad = bg.coarse_quadrature();
    let node_sample = |p: &Point| -> Result<NodeSample> {
        let (e, fe) = frame_deviation(g, bg, p)?;
        let m5 = e.abs().sum() + fe.iter().map(|m| m.abs().sum()).sum::<f64>();
        let m3a = e.norm_squared() + fe.iter().map(|m| m.norm_squared()).sum::<f64>();
        let eig = SymmetricEigen::new(DMatrix::identity(n, n) + &e).eigenvalues;
        let c = eig.iter().fold(1.0f64, |acc, l| acc.max(*l).max(1.0 / l));
        Ok(NodeSample { m5, m3a, c })
    };
    let shells: Vec<Vec<NodeSample>> = radii
        .iter()
        .map(|&r| {
            (0..quad.len())
                .into_par_iter()
                .map(|q| node_sample(&Point::new(r, &quad.nodes[q])))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let m5_samples: Vec<f64> = shells.iter().map(|s| s.iter().fold(0.0f64, |a, x| a.max(x.m5))).collect();
    let tail = radii.len() - 3;
    let critical = if n > 2 { n as f64 / 2.0 } else { 1.0 };
    let (exponent, std_error, verdict) =
        exponent_verdict(log_log_fit(&radii[tail..], &m5_samples[tail..]), critical, true);
    let m5 = ExponentCheck { exponent, std_error, critical, samples: m5_samples, verdict };

    let per_radius: Vec<f64> = shells.iter().map(|s| s.iter().fold(1.0f64, |a, x| a.max(x.c))).collect();
    let constant = per_radius.iter().fold(1.0f64, |a, c| a.max(*c));
    let bounded = constant.is_finite() && per_radius[per_radius.len() - 1] <= per_radius[0] * (1.0 + 1e-6) + 1e-12;
    let m0 = EquivalenceCheck {
        constant,
        per_radius,
        verdict: if bounded { Verdict::Pass } else { Verdict::Borderline },
    };

    // (m3a), (m3b): integrals over [R_i, R_{i+1}] × N with r dμ_g
    let r_b = -((n * (n - 1)) as f64);
    let annulus = |lo: f64, hi: f64, f: &(dyn Fn(&Point) -> Result<f64> + Sync)| -> Result<f64> {
        let (t, w) = gauss_legendre_on(4, lo.ln(), hi.ln());
        let mut total = Vec::with_capacity(t.len());
        for (ti, wi) in t.iter().zip(&w) {
            let r = ti.exp();
            let vals = (0..quad.len())
                .into_par_iter()
                .map(|q| {
                    let p = Point::new(r, &quad.nodes[q]);
                    let sqrt_g = g.eval(p.coords())?.determinant().sqrt();
                    Ok(quad.weights[q] / quad.sqrt_det[q] * sqrt_g * r * f(&p)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            total.push(wi * r * pairwise_sum(&vals));
        }
        Ok(pairwise_sum(&total))
    };
    let m3a_f = |p: &Point| Ok(node_sample(p)?.m3a);
    let m3b_f = |p: &Point| {
        let (_, s) = ricci_and_scalar(g, if g.analytic() { DerivativeScheme::Analytic } else { DerivativeScheme::central(1e-4) }, p)?;
        let d = (s - r_b).abs();
        Ok(if d < CURVATURE_NOISE * r_b.abs() { 0.0 } else { d })
    };
    let mut a3a = Vec::new();
    let mut a3b = Vec::new();
    for w in radii.windows(2) {
        a3a.push(annulus(w[0], w[1], &m3a_f)?);
        a3b.push(annulus(w[0], w[1], &m3b_f)?);
    }
    let (ra, va) = integral_verdict(&a3a);
    let (rb, vb) = integral_verdict(&a3b);

    let potentials = potentials
        .iter()
        .map(|v| potential_growth(v, bg, &radii[tail..], &quad.nodes))
        .collect::<Result<Vec<_>>>()?;

    Ok(DecayReport {
        radii,
        m3a: IntegralCheck { annuli: a3a, tail_ratio: ra, verdict: va },
        m3b: IntegralCheck { annuli: a3b, tail_ratio: rb, verdict: vb },
        m0,
        m5,
        potentials,
    })
}

/// `V = O(r)` and `|dV|_b = O(r)`.
fn potential_growth(v: &StaticPotential, bg: &Background, radii: &[f64], nodes: &[Vec<f64>]) -> Result<PotentialGrowth> {
    let b = bg.metric();
    let mut vals = Vec::new();
    let mut grads = Vec::new();
    for &r in radii {
        let (mut vmax, mut gmax) = (0.0f64, 0.0f64);
        for node in nodes {
            let p = Point::new(r, node);
            let binv = b.eval(p.coords())?.try_inverse().ok_or(Error::DegenerateMetric { point: p.coords().to_vec() })?;
            let dv = DVector::from_vec(v.gradient(p.coords()));
            vmax = vmax.max(v.value(p.coords()).abs());
            gmax = gmax.max(dv.dot(&(&binv * &dv)).max(0.0).sqrt());
        }
        vals.push(vmax);
        grads.push(gmax);
    }
    let (ve, _, vv) = exponent_verdict(log_log_fit(radii, &vals), 1.0, false);
    let (ge, _, gv) = exponent_verdict(log_log_fit(radii, &grads), 1.0, false);
    Ok(PotentialGrowth {
        potential: v.name.clone(),
        value_exponent: ve,
        gradient_exponent: ge,
        verdict: vv.worst(gv),
    })
}
