//! Chart-based tensor calculus on the end chart `[R, ∞) × N`.
//!
//! Coordinates are ordered `(r, v¹, …, vⁿ⁻¹)`. A [`MetricField`] returns its
//! coordinate components as [`Jet`]s, so the analytic derivative scheme reads
//! first and second derivatives straight off the jets. The central-difference
//! scheme only ever looks at component values.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_VARS};

/// A point of the end chart: `coords[0]` is `r`, the rest are chart
/// coordinates on `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(r: f64, angles: &[f64]) -> Self {
        let mut coords = Vec::with_capacity(angles.len() + 1);
        coords.push(r);
        coords.extend_from_slice(angles);
        Point { coords }
    }

    pub fn from_coords(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn r(&self) -> f64 {
        self.coords[0]
    }

    pub fn angles(&self) -> &[f64] {
        &self.coords[1..]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Family name and parameters of a metric, recorded in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDescriptor {
    pub family: String,
    pub params: BTreeMap<String, f64>,
}

impl MetricDescriptor {
    pub fn new(family: impl Into<String>) -> Self {
        MetricDescriptor {
            family: family.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// Identifies the reference geometry a metric's exact deviation is
/// measured against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTag {
    pub k: i32,
    pub n: usize,
    pub boundary: String,
}

/// A Riemannian metric given by its coordinate components.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    /// Row-major `n × n` components at `x`. Derivative information in the
    /// returned jets is meaningful only when [`MetricField::analytic`] holds.
    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>>;

    fn analytic(&self) -> bool {
        true
    }

    fn descriptor(&self) -> MetricDescriptor;

    fn check_domain(&self, _x: &[f64]) -> Result<()> {
        Ok(())
    }

    /// Background this metric can report an exact deviation against.
    fn reference_tag(&self) -> Option<ReferenceTag> {
        None
    }

    /// `g − b` evaluated without subtracting large components, for the
    /// background named by [`MetricField::reference_tag`].
    fn exact_deviation(&self, _x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        None
    }

    fn eval(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let c = self.components(&Jet::constants(x))?;
        Ok(DMatrix::from_fn(n, n, |i, j| c[i * n + j].value()))
    }
}

/// A scalar function on the chart, written over jets.
pub trait ScalarField: Send + Sync {
    fn eval_jet(&self, x: &[Jet]) -> Jet;

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_jet(&Jet::constants(x)).value()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval_jet(&Jet::seed(x)).gradient(x.len())
    }
}

/// How metric derivatives are obtained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DerivativeScheme {
    #[default]
    Analytic,
    /// Central differences with relative step `h = h0 · max(1, |x_i|)`.
    CentralDifference { h0: f64 },
}

impl DerivativeScheme {
    pub fn central(h0: f64) -> Self {
        DerivativeScheme::CentralDifference { h0 }
    }

    /// Step used along coordinate `i` at `x`.
    pub fn step(h0: f64, x: &[f64], i: usize) -> f64 {
        h0 * x[i].abs().max(1.0)
    }
}

/// Metric value, inverse and coordinate derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricDerivs {
    pub g: DMatrix<f64>,
    pub inv: DMatrix<f64>,
    /// `dg[k]` holds `∂_k g_ij`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[k * n + l]` holds `∂_k ∂_l g_ij`, when requested.
    pub ddg: Option<Vec<DMatrix<f64>>>,
}

impl MetricDerivs {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    fn from_jets(c: &[Jet], n: usize, second: bool, x: &[f64]) -> Result<Self> {
        let g = DMatrix::from_fn(n, n, |i, j| c[i * n + j].value());
        let inv = invert(&g, x)?;
        let dg = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| c[i * n + j].d(k)))
            .collect();
        let ddg = second.then(|| {
            let mut out = Vec::with_capacity(n * n);
            for k in 0..n {
                for l in 0..n {
                    out.push(DMatrix::from_fn(n, n, |i, j| c[i * n + j].dd(k, l)));
                }
            }
            out
        });
        Ok(MetricDerivs { g, inv, dg, ddg })
    }
}

pub(crate) fn invert(g: &DMatrix<f64>, x: &[f64]) -> Result<DMatrix<f64>> {
    let degenerate = || Error::DegenerateMetric { point: x.to_vec() };
    // compare det g with the product of the diagonal so that the test does
    // not depend on how differently the coordinates are scaled
    let diag: f64 = g.diagonal().iter().map(|d| d.abs()).product();
    if !diag.is_finite() || diag == 0.0 {
        return Err(degenerate());
    }
    let det = g.determinant();
    if !det.is_finite() || det.abs() <= 1e-13 * diag {
        return Err(degenerate());
    }
    g.clone().try_inverse().ok_or_else(degenerate)
}

fn check_dims(g: &dyn MetricField, x: &[f64]) -> Result<()> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: x.len(),
        });
    }
    if g.dim() > MAX_VARS {
        return Err(Error::InvalidArgument(format!(
            "dimension {} exceeds the supported maximum {MAX_VARS}",
            g.dim()
        )));
    }
    Ok(())
}

/// First (and optionally second) derivatives of `g` at `x`.
pub fn metric_derivs(
    g: &dyn MetricField,
    scheme: DerivativeScheme,
    x: &[f64],
    second: bool,
) -> Result<MetricDerivs> {
    check_dims(g, x)?;
    g.check_domain(x)?;
    match scheme {
        DerivativeScheme::Analytic => {
            if !g.analytic() {
                return Err(Error::NoAnalyticDerivatives(g.descriptor().family));
            }
            let c = g.components(&Jet::seed(x))?;
            MetricDerivs::from_jets(&c, g.dim(), second, x)
        }
        DerivativeScheme::CentralDifference { h0 } => fd_metric_derivs(g, h0, x, second),
    }
}

fn shifted(x: &[f64], i: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += delta;
    y
}

fn eval_checked(g: &dyn MetricField, x: &[f64]) -> Result<DMatrix<f64>> {
    g.check_domain(x)?;
    g.eval(x)
}

fn fd_first(g: &dyn MetricField, h0: f64, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    (0..x.len())
        .map(|k| {
            let h = DerivativeScheme::step(h0, x, k);
            let plus = eval_checked(g, &shifted(x, k, h))?;
            let minus = eval_checked(g, &shifted(x, k, -h))?;
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

fn fd_metric_derivs(
    g: &dyn MetricField,
    h0: f64,
    x: &[f64],
    second: bool,
) -> Result<MetricDerivs> {
    let n = x.len();
    let value = eval_checked(g, x)?;
    let inv = invert(&value, x)?;
    let dg = fd_first(g, h0, x)?;
    let ddg = if second {
        // nested first differences; the outer offset is h·√2
        let mut outer = Vec::with_capacity(n);
        for l in 0..n {
            let big_h = DerivativeScheme::step(h0, x, l) * std::f64::consts::SQRT_2;
            let plus = fd_first(g, h0, &shifted(x, l, big_h))?;
            let minus = fd_first(g, h0, &shifted(x, l, -big_h))?;
            outer.push(
                plus.into_iter()
                    .zip(minus)
                    .map(|(p, m)| (p - m) / (2.0 * big_h))
                    .collect::<Vec<_>>(),
            );
        }
        let mut out = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                // symmetrize the two nested orders
                out.push((&outer[l][k] + &outer[k][l]) * 0.5);
            }
        }
        Some(out)
    } else {
        None
    };
    Ok(MetricDerivs {
        g: value,
        inv,
        dg,
        ddg,
    })
}

/// Christoffel symbols `Γ^k_{ij}`; `gamma[k][(i, j)]`.
pub type Christoffel = Vec<DMatrix<f64>>;

/// Christoffel symbols of the first kind, `Γ_{lij} = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij)`.
fn christoffel_first_kind(d: &MetricDerivs) -> Vec<DMatrix<f64>> {
    let n = d.dim();
    (0..n)
        .map(|l| {
            DMatrix::from_fn(n, n, |i, j| {
                0.5 * (d.dg[i][(l, j)] + d.dg[j][(l, i)] - d.dg[l][(i, j)])
            })
        })
        .collect()
}

pub fn christoffel_from(d: &MetricDerivs) -> Christoffel {
    let n = d.dim();
    let first = christoffel_first_kind(d);
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                (0..n).map(|l| d.inv[(k, l)] * first[l][(i, j)]).sum()
            })
        })
        .collect()
}

pub fn christoffel(g: &dyn MetricField, scheme: DerivativeScheme, p: &Point) -> Result<Christoffel> {
    let d = metric_derivs(g, scheme, p.coords(), false)?;
    Ok(christoffel_from(&d))
}

/// `dgamma[m][k][(i, j)] = ∂_m Γ^k_ij`.
fn christoffel_derivs(d: &MetricDerivs) -> Result<Vec<Vec<DMatrix<f64>>>> {
    let n = d.dim();
    let ddg = d
        .ddg
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("second derivatives were not computed".into()))?;
    let first = christoffel_first_kind(d);
    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let dinv: Vec<DMatrix<f64>> = (0..n).map(|m| -(&d.inv * &d.dg[m] * &d.inv)).collect();
    let mut dgamma = vec![vec![DMatrix::<f64>::zeros(n, n); n]; n];
    for m in 0..n {
        let dfirst: Vec<DMatrix<f64>> = (0..n)
            .map(|l| {
                DMatrix::from_fn(n, n, |i, j| {
                    0.5 * (ddg[m * n + i][(l, j)] + ddg[m * n + j][(l, i)]
                        - ddg[m * n + l][(i, j)])
                })
            })
            .collect();
        for k in 0..n {
            dgamma[m][k] = DMatrix::from_fn(n, n, |i, j| {
                (0..n)
                    .map(|l| dinv[m][(k, l)] * first[l][(i, j)] + d.inv[(k, l)] * dfirst[l][(i, j)])
                    .sum::<f64>()
            });
        }
    }
    Ok(dgamma)
}

/// Ricci tensor and scalar curvature from first and second derivatives.
pub fn ricci_from(d: &MetricDerivs) -> Result<(DMatrix<f64>, f64)> {
    let n = d.dim();
    let dgamma = christoffel_derivs(d)?;
    let gamma = christoffel_from(d);
    let ric = DMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            s += dgamma[k][k][(i, j)] - dgamma[j][k][(i, k)];
            for l in 0..n {
                s += gamma[k][(k, l)] * gamma[l][(i, j)] - gamma[k][(j, l)] * gamma[l][(i, k)];
            }
        }
        s
    });
    let ric = (&ric + ric.transpose()) * 0.5;
    let scalar = d.inv.component_mul(&ric).sum();
    Ok((ric, scalar))
}

/// Sectional curvatures of the coordinate planes, `K[(a, b)]` for `a ≠ b`
/// (the diagonal is zero).
pub fn sectional_curvatures(
    g: &dyn MetricField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<DMatrix<f64>> {
    let d = metric_derivs(g, scheme, p.coords(), true)?;
    let n = d.dim();
    let dgamma = christoffel_derivs(&d)?;
    let gamma = christoffel_from(&d);
    Ok(DMatrix::from_fn(n, n, |a, b| {
        if a == b {
            return 0.0;
        }
        // g_ak R^k_bab
        let mut s = 0.0;
        for k in 0..n {
            let mut r = dgamma[a][k][(b, b)] - dgamma[b][k][(b, a)];
            for m in 0..n {
                r += gamma[k][(a, m)] * gamma[m][(b, b)] - gamma[k][(b, m)] * gamma[m][(b, a)];
            }
            s += d.g[(a, k)] * r;
        }
        s / (d.g[(a, a)] * d.g[(b, b)] - d.g[(a, b)].powi(2))
    }))
}

pub fn ricci_and_scalar(
    g: &dyn MetricField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<(DMatrix<f64>, f64)> {
    let d = metric_derivs(g, scheme, p.coords(), true)?;
    ricci_from(&d)
}

/// Value, coordinate gradient and coordinate second derivatives of a scalar.
#[derive(Debug, Clone)]
pub struct ScalarDerivs {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

/// In analytic mode the second derivatives come from the jet; in
/// central-difference mode they are differences of the gradient callback.
pub fn scalar_derivs(v: &dyn ScalarField, scheme: DerivativeScheme, x: &[f64]) -> ScalarDerivs {
    let n = x.len();
    let jet = v.eval_jet(&Jet::seed(x));
    let hess = match scheme {
        DerivativeScheme::Analytic => DMatrix::from_fn(n, n, |i, j| jet.dd(i, j)),
        DerivativeScheme::CentralDifference { h0 } => {
            let cols: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let h = DerivativeScheme::step(h0, x, i);
                    let gp = v.gradient(&shifted(x, i, h));
                    let gm = v.gradient(&shifted(x, i, -h));
                    gp.iter().zip(gm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
                })
                .collect();
            let m = DMatrix::from_fn(n, n, |i, j| cols[i][j]);
            (&m + m.transpose()) * 0.5
        }
    };
    ScalarDerivs {
        value: jet.value(),
        grad: jet.gradient(n),
        hess,
    }
}

/// `D_i D_j V = ∂_i ∂_j V − Γ^k_ij ∂_k V`.
pub fn hessian_from(gamma: &Christoffel, v: &ScalarDerivs) -> DMatrix<f64> {
    let n = v.grad.len();
    DMatrix::from_fn(n, n, |i, j| {
        v.hess[(i, j)] - (0..n).map(|k| gamma[k][(i, j)] * v.grad[k]).sum::<f64>()
    })
}

pub fn covariant_hessian(
    b: &dyn MetricField,
    scheme: DerivativeScheme,
    v: &dyn ScalarField,
    p: &Point,
) -> Result<DMatrix<f64>> {
    let d = metric_derivs(b, scheme, p.coords(), false)?;
    let gamma = christoffel_from(&d);
    let sv = scalar_derivs(v, scheme, p.coords());
    Ok(hessian_from(&gamma, &sv))
}

/// Maximum of `|∂_k g_ij − g_il Γ^l_kj − g_jl Γ^l_ki|`, with `∂g` taken from
/// an independent central difference at half the scheme's step.
pub fn metric_compatibility_residual(
    g: &dyn MetricField,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<f64> {
    let x = p.coords();
    let d = metric_derivs(g, scheme, x, false)?;
    let gamma = christoffel_from(&d);
    let h0 = match scheme {
        DerivativeScheme::Analytic => 1e-4,
        DerivativeScheme::CentralDifference { h0 } => 0.5 * h0,
    };
    let dg = fd_first(g, h0, x)?;
    let n = x.len();
    let scale = d.g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut worst = 0.0f64;
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let contraction: f64 = (0..n)
                    .map(|l| d.g[(i, l)] * gamma[l][(k, j)] + d.g[(j, l)] * gamma[l][(k, i)])
                    .sum();
                worst = worst.max((dg[k][(i, j)] - contraction).abs() / scale);
            }
        }
    }
    Ok(worst)
}

/// Gram–Schmidt orthonormalization of `vectors` with respect to `g`.
pub fn gram_schmidt(g: &DMatrix<f64>, vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        let n = a.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * g[(i, j)] * b[j];
            }
        }
        s
    };
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = dot(&w, e);
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= c * ei;
            }
        }
        let norm = dot(&w, &w).sqrt();
        w.iter_mut().for_each(|wi| *wi /= norm);
        out.push(w);
    }
    out
}

/// Constant-coefficient metric, mostly useful for tests.
#[derive(Debug, Clone)]
pub struct ConstantMetric {
    pub matrix: DMatrix<f64>,
}

impl ConstantMetric {
    pub fn euclidean(n: usize) -> Self {
        ConstantMetric {
            matrix: DMatrix::identity(n, n),
        }
    }
}

impl MetricField for ConstantMetric {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn components(&self, _x: &[Jet]) -> Result<Vec<Jet>> {
        let n = self.dim();
        Ok((0..n * n)
            .map(|idx| Jet::constant(self.matrix[(idx / n, idx % n)]))
            .collect())
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new("constant")
    }
}

type ValueFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Metric given by a plain value callback; only the central-difference
/// scheme can differentiate it.
pub struct ValueMetric {
    dim: usize,
    name: String,
    f: Box<ValueFn>,
}

impl ValueMetric {
    pub fn new(
        dim: usize,
        name: impl Into<String>,
        f: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        ValueMetric {
            dim,
            name: name.into(),
            f: Box::new(f),
        }
    }
}

impl MetricField for ValueMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let xs: Vec<f64> = x.iter().map(Jet::value).collect();
        let m = (self.f)(&xs);
        Ok(m.transpose().iter().map(|&v| Jet::constant(v)).collect())
    }

    fn analytic(&self) -> bool {
        false
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new(self.name.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-dimensional hyperbolic metric `dr²/(r²+1) + r² dφ²`.
    struct Hyp2;
    impl MetricField for Hyp2 {
        fn dim(&self) -> usize {
            2
        }
        fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
            let r = x[0];
            let z = Jet::constant(0.0);
            Ok(vec![(r * r + 1.0).recip(), z, z, r * r])
        }
        fn descriptor(&self) -> MetricDescriptor {
            MetricDescriptor::new("hyp2")
        }
    }

    #[test]
    fn flat_metric_has_vanishing_connection_and_curvature() {
        let g = ConstantMetric::euclidean(3);
        let p = Point::from_coords(vec![0.3, -1.0, 2.0]);
        for scheme in [DerivativeScheme::Analytic, DerivativeScheme::central(1e-4)] {
            let gamma = christoffel(&g, scheme, &p).unwrap();
            assert!(gamma.iter().all(|m| m.iter().all(|v| *v == 0.0)));
            let (ric, s) = ricci_and_scalar(&g, scheme, &p).unwrap();
            assert_eq!(s, 0.0);
            assert!(ric.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn hyperbolic_plane_christoffel_value() {
        let p = Point::new(2.0, &[0.0]);
        let gamma = christoffel(&Hyp2, DerivativeScheme::Analytic, &p).unwrap();
        // Γ^r_{φφ} = −r(r²+1)
        assert!((gamma[0][(1, 1)] + 10.0).abs() < 1e-12);
        assert!((gamma[1][(0, 1)] - 0.5).abs() < 1e-12);
        assert_eq!(gamma[1][(0, 1)], gamma[1][(1, 0)]);
        let (_, s) = ricci_and_scalar(&Hyp2, DerivativeScheme::Analytic, &p).unwrap();
        assert!((s + 2.0).abs() < 1e-12);
    }

    #[test]
    fn sectional_curvature_of_constant_curvature_metrics() {
        let p = Point::new(2.0, &[0.4]);
        let k = sectional_curvatures(&Hyp2, DerivativeScheme::Analytic, &p).unwrap();
        assert!((k[(0, 1)] + 1.0).abs() < 1e-12 && (k[(1, 0)] + 1.0).abs() < 1e-12);
        assert_eq!(k[(0, 0)], 0.0);
        // round S² in (θ, φ)
        let s2 = ValueMetric::new(2, "s2", |x| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)]));
        let k = sectional_curvatures(&s2, DerivativeScheme::central(1e-4), &Point::new(1.1, &[0.3])).unwrap();
        assert!((k[(0, 1)] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn degenerate_metric_is_reported_with_point() {
        let g = ValueMetric::new(2, "degenerate", |_| DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        let p = Point::new(3.0, &[0.1]);
        let err = christoffel(&g, DerivativeScheme::central(1e-4), &p).unwrap_err();
        assert_eq!(err, Error::DegenerateMetric { point: vec![3.0, 0.1] });
    }

    #[test]
    fn value_metric_refuses_analytic_mode() {
        let g = ValueMetric::new(2, "plain", |_| DMatrix::identity(2, 2));
        let p = Point::new(3.0, &[0.1]);
        assert!(matches!(
            christoffel(&g, DerivativeScheme::Analytic, &p),
            Err(Error::NoAnalyticDerivatives(_))
        ));
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 3.0]);
        let f = gram_schmidt(&g, &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        s += f[a][i] * g[(i, j)] * f[b][j];
                    }
                }
                assert!((s - if a == b { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
