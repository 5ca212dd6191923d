//! Reference backgrounds `b = dr²/(r²+k) + r² h̆`, their asymptotic frames
//! and static potentials, plus the built-in metric families.

mod boundary;
pub mod families;

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

pub use boundary::{sphere_volume, BoundaryKind, BoundaryManifold, CustomBoundary, Quadrature};

use crate::error::{Error, Result};
use crate::geom::{
    christoffel_from, gram_schmidt, hessian_from, metric_derivs, ricci_from, scalar_derivs,
    DerivativeScheme, MetricDescriptor, MetricField, Point, ReferenceTag, ScalarField,
};
use crate::jet::Jet;

/// A reference geometry on the end.
#[derive(Debug, Clone)]
pub struct Background {
    k: i32,
    n: usize,
    boundary: BoundaryManifold,
    resolution: usize,
}

/// Builds `b` after checking `R_h̆ = (n−1)(n−2)k` and the `n = 2 ⇒ k = 1`
/// normalization.
pub fn build_background(k: i32, n: usize, boundary: BoundaryManifold) -> Result<Background> {
    if !(-1..=1).contains(&k) {
        return Err(Error::BoundaryMismatch(format!("k must be -1, 0 or 1, got {k}")));
    }
    if !(2..=crate::jet::MAX_VARS).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "dimension n = {n} outside the supported range 2..={}",
            crate::jet::MAX_VARS
        )));
    }
    if boundary.dim() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            got: boundary.dim(),
        });
    }
    if n == 2 {
        if k != 1 || !boundary.is_round_sphere() {
            return Err(Error::BoundaryMismatch(
                "in dimension 2 the background must be k = 1 over the circle of length 2π".into(),
            ));
        }
    } else if boundary.curvature_sign() != k {
        return Err(Error::BoundaryMismatch(format!(
            "{} has curvature sign {} but k = {k}",
            boundary.name(),
            boundary.curvature_sign()
        )));
    }
    if let BoundaryKind::Custom(c) = boundary.kind() {
        // check the curvature normalization at the supplied nodes
        let expected = ((n - 1) * (n - 2)) as f64 * k as f64;
        let metric = boundary.as_metric();
        let scheme = if c.metric.analytic() {
            DerivativeScheme::Analytic
        } else {
            DerivativeScheme::central(1e-4)
        };
        let tol = if c.metric.analytic() { 1e-8 } else { 1e-5 };
        for node in &c.quadrature.nodes {
            let d = metric_derivs(&metric, scheme, node, true)?;
            let (_, s) = ricci_from(&d)?;
            if (s - expected).abs() > tol {
                return Err(Error::BoundaryMismatch(format!(
                    "R_h = {s} at {node:?}, expected {expected}"
                )));
            }
        }
    }
    let resolution = boundary.default_resolution();
    Ok(Background {
        k,
        n,
        boundary,
        resolution,
    })
}

impl Background {
    /// Hyperbolic space `H^n` in polar form.
    pub fn hyperbolic(n: usize) -> Result<Background> {
        build_background(1, n, BoundaryManifold::sphere(n - 1))
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution.max(2);
        self
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn boundary(&self) -> &BoundaryManifold {
        &self.boundary
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn quadrature(&self) -> Quadrature {
        self.boundary.quadrature(self.resolution)
    }

    /// The half-resolution rule used for quadrature error estimates.
    pub fn coarse_quadrature(&self) -> Quadrature {
        self.boundary.quadrature((self.resolution / 2).max(2))
    }

    pub fn tag(&self) -> ReferenceTag {
        ReferenceTag {
            k: self.k,
            n: self.n,
            boundary: self.boundary.name(),
        }
    }

    /// Smallest admissible radius: `r² + k > 0`.
    pub fn r_floor(&self) -> f64 {
        if self.k < 0 {
            1.0
        } else {
            0.0
        }
    }

    pub fn metric(&self) -> BackgroundMetric {
        BackgroundMetric(self.clone())
    }

    /// Components of `b` at `x`.
    pub fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        block_metric(self.n, x[0] * x[0] + self.k as f64, x[0], &self.boundary, &x[1..], None)
    }
}

/// Block metric `A⁻¹ dr² + c · r² h̆`, where `rr_denominator = A`.
pub(crate) fn block_metric(
    n: usize,
    rr_denominator: Jet,
    r: Jet,
    boundary: &BoundaryManifold,
    angles: &[Jet],
    angular_factor: Option<Jet>,
) -> Result<Vec<Jet>> {
    let mut out = vec![Jet::constant(0.0); n * n];
    out[0] = rr_denominator.recip();
    let h = boundary.metric_components(angles)?;
    let m = n - 1;
    let mut r2 = r * r;
    if let Some(c) = angular_factor {
        r2 *= c;
    }
    for a in 0..m {
        for b in 0..m {
            let hab = h[a * m + b];
            if hab.value() != 0.0 || a == b {
                out[(a + 1) * n + (b + 1)] = r2 * hab;
            }
        }
    }
    Ok(out)
}

/// The background metric `b` as a [`MetricField`].
#[derive(Debug, Clone)]
pub struct BackgroundMetric(pub Background);

impl MetricField for BackgroundMetric {
    fn dim(&self) -> usize {
        self.0.n
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        self.0.components(x)
    }

    fn descriptor(&self) -> MetricDescriptor {
        let family = if self.0.k == 1 && self.0.boundary.is_round_sphere() {
            "hyperbolic"
        } else {
            "background"
        };
        MetricDescriptor::new(family)
            .with("n", self.0.n as f64)
            .with("k", self.0.k as f64)
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        check_end_chart(x, self.0.r_floor(), &self.0.boundary)
    }

    fn reference_tag(&self) -> Option<ReferenceTag> {
        Some(self.0.tag())
    }

    fn exact_deviation(&self, _x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        let n = self.0.n;
        Some(Ok(vec![Jet::constant(0.0); n * n]))
    }
}

pub(crate) fn check_end_chart(x: &[f64], r_floor: f64, boundary: &BoundaryManifold) -> Result<()> {
    if !(x[0] > r_floor) || !x[0].is_finite() {
        return Err(Error::ChartDomain {
            point: x.to_vec(),
            reason: format!("r must exceed {r_floor}"),
        });
    }
    boundary.check_domain(&x[1..])
}

/// The asymptotic frame `f_i = r⁻¹ ε_i` (`i < n−1`), `f_n = √(r²+k) ∂_r`,
/// as coordinate component vectors. The radial vector comes last.
pub fn asymptotic_frame(bg: &Background, p: &Point) -> Result<Vec<Vec<f64>>> {
    check_end_chart(p.coords(), bg.r_floor(), &bg.boundary)?;
    let n = bg.n;
    let r = p.r();
    let eps = bg.boundary.frame(p.angles())?;
    let mut frame = Vec::with_capacity(n);
    for e in eps {
        let mut f = vec![0.0; n];
        for (a, ea) in e.iter().enumerate() {
            f[a + 1] = ea / r;
        }
        frame.push(f);
    }
    let mut radial = vec![0.0; n];
    radial[0] = (r * r + bg.k as f64).sqrt();
    frame.push(radial);
    Ok(frame)
}

/// Frame components `g(f_a, f_b)` of a metric.
pub fn frame_components(
    g: &dyn MetricField,
    bg: &Background,
    p: &Point,
) -> Result<DMatrix<f64>> {
    let f = asymptotic_frame(bg, p)?;
    let gm = g.eval(p.coords())?;
    let n = bg.n;
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += f[a][i] * gm[(i, j)] * f[b][j];
            }
        }
        s
    }))
}

type PotentialFn = dyn Fn(&[Jet]) -> Jet + Send + Sync;

/// An element `V` of `𝒩_b`, written over jets.
#[derive(Clone)]
pub struct StaticPotential {
    pub label: usize,
    pub name: String,
    f: Arc<PotentialFn>,
}

impl std::fmt::Debug for StaticPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StaticPotential")
            .field("label", &self.label)
            .field("name", &self.name)
            .finish()
    }
}

impl StaticPotential {
    pub fn new(
        label: usize,
        name: impl Into<String>,
        f: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    ) -> Self {
        StaticPotential {
            label,
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `Σ cᵢ Vᵢ`.
    pub fn linear_combination(terms: &[(f64, StaticPotential)]) -> StaticPotential {
        let terms: Vec<(f64, StaticPotential)> = terms.to_vec();
        let name = terms
            .iter()
            .map(|(c, v)| format!("{c}*{}", v.name))
            .collect::<Vec<_>>()
            .join(" + ");
        StaticPotential::new(0, name, move |x| {
            terms
                .iter()
                .map(|(c, v)| v.eval_jet(x) * *c)
                .sum()
        })
    }
}

impl ScalarField for StaticPotential {
    fn eval_jet(&self, x: &[Jet]) -> Jet {
        (self.f)(x)
    }
}

/// Basis of `𝒩_b` for the space-form cases: `√(r²+k)` alone when `k ≤ 0`,
/// and `V₍₀₎ = √(r²+1)`, `V₍ᵢ₎ = r nⁱ` over the round sphere.
pub fn nb_basis(bg: &Background) -> Result<Vec<StaticPotential>> {
    let k = bg.k as f64;
    let v0 = StaticPotential::new(0, "V0", move |x| (x[0] * x[0] + k).sqrt());
    if bg.k <= 0 {
        return Ok(vec![v0]);
    }
    if !bg.boundary.is_round_sphere() {
        return Err(Error::BasisUnknown(bg.boundary.name()));
    }
    let mut out = vec![v0];
    for i in 0..bg.n {
        let boundary = bg.boundary.clone();
        out.push(StaticPotential::new(i + 1, format!("V{}", i + 1), move |x| {
            let e = boundary.embedding(&x[1..]).expect("round sphere embedding");
            x[0] * e[i]
        }));
    }
    Ok(out)
}

/// Per-point residuals of `Δ_b V + λV = 0` and `D̊D̊V = V(Ric(b) − λb)`,
/// the latter measured in a `b`-orthonormal frame.
#[derive(Debug, Clone, Serialize)]
pub struct StaticResidual {
    pub point: Vec<f64>,
    pub laplace: f64,
    pub hessian: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StaticReport {
    pub potential: String,
    pub lambda: f64,
    pub tolerance: f64,
    pub residuals: Vec<StaticResidual>,
    pub max_residual: f64,
    pub passed: bool,
}

pub fn static_residual(
    b: &dyn MetricField,
    v: &dyn ScalarField,
    lambda: f64,
    scheme: DerivativeScheme,
    p: &Point,
) -> Result<StaticResidual> {
    let x = p.coords();
    let n = x.len();
    let d = metric_derivs(b, scheme, x, true)?;
    let (ric, _) = ricci_from(&d)?;
    let gamma = christoffel_from(&d);
    let sv = scalar_derivs(v, scheme, x);
    let hess = hessian_from(&gamma, &sv);
    let laplace = d.inv.component_mul(&hess).sum() + lambda * sv.value;
    let defect = &hess - (&ric - &d.g * lambda) * sv.value;
    let basis: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let frame = gram_schmidt(&d.g, &basis);
    let e = DMatrix::from_fn(n, n, |i, a| frame[a][i]);
    let framed = e.transpose() * defect * e;
    Ok(StaticResidual {
        point: x.to_vec(),
        laplace: laplace.abs(),
        hessian: framed.norm(),
    })
}

/// Checks a candidate potential against the static equations at `points`.
pub fn verify_static(
    b: &dyn MetricField,
    v: &StaticPotential,
    lambda: f64,
    scheme: DerivativeScheme,
    points: &[Point],
    tolerance: f64,
) -> Result<StaticReport> {
    if !(lambda < 0.0) {
        return Err(Error::InvalidArgument(format!("λ must be negative, got {lambda}")));
    }
    let residuals = points
        .iter()
        .map(|p| static_residual(b, v, lambda, scheme, p))
        .collect::<Result<Vec<_>>>()?;
    let max_residual = residuals
        .iter()
        .fold(0.0f64, |m, r| m.max(r.laplace).max(r.hessian));
    Ok(StaticReport {
        potential: v.name.clone(),
        lambda,
        tolerance,
        residuals,
        max_residual,
        passed: max_residual <= tolerance,
    })
}

/// Ball-model radius `|x|` ↔ areal radius `r = 2|x|/(1−|x|²)` of hyperbolic space.
pub fn ball_to_areal_radius(ball_radius: f64) -> f64 {
    2.0 * ball_radius / (1.0 - ball_radius * ball_radius)
}

/// Ball-model expression `V₍₀₎ = (1+|x|²)/(1−|x|²)`.
pub fn ball_model_v0(ball_radius: f64) -> f64 {
    let s = ball_radius * ball_radius;
    (1.0 + s) / (1.0 - s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_normalizations() {
        assert!(matches!(
            build_background(1, 3, BoundaryManifold::flat_torus(2, 1.0)),
            Err(Error::BoundaryMismatch(_))
        ));
        assert!(matches!(
            build_background(0, 2, BoundaryManifold::circle()),
            Err(Error::BoundaryMismatch(_))
        ));
        assert!(matches!(
            build_background(1, 3, BoundaryManifold::circle()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn background_is_block_form() {
        let bg = build_background(0, 3, BoundaryManifold::flat_torus(2, 1.0)).unwrap();
        let b = bg.metric().eval(&[4.0, 0.2, 0.3]).unwrap();
        assert_eq!(b[(0, 0)], 1.0 / 16.0);
        assert_eq!(b[(0, 1)], 0.0);
        assert_eq!(b[(1, 1)], 16.0);
        assert_eq!(b[(1, 2)], 0.0);
    }

    #[test]
    fn two_dimensional_frame_values() {
        let bg = Background::hyperbolic(2).unwrap();
        let f = asymptotic_frame(&bg, &Point::new(1.0, &[0.5])).unwrap();
        assert!((f[1][0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((f[0][1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frame_is_orthonormal_for_b() {
        for bg in [
            Background::hyperbolic(3).unwrap(),
            build_background(-1, 3, BoundaryManifold::hyperbolic_surface(2).unwrap()).unwrap(),
            build_background(0, 4, BoundaryManifold::flat_torus(3, 1.0)).unwrap(),
        ] {
            let p = Point::from_coords(
                std::iter::once(7.5).chain((1..bg.n()).map(|i| 0.3 * i as f64 + 0.2)).collect(),
            );
            let gram = frame_components(&bg.metric(), &bg, &p).unwrap();
            let id = DMatrix::<f64>::identity(bg.n(), bg.n());
            assert!((gram - id).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_sizes_and_values() {
        let bg = build_background(-1, 3, BoundaryManifold::hyperbolic_surface(3).unwrap()).unwrap();
        let basis = nb_basis(&bg).unwrap();
        assert_eq!(basis.len(), 1);
        assert!((basis[0].value(&[3.0, 0.0, 0.0]) - 8f64.sqrt()).abs() < 1e-15);

        let bg = Background::hyperbolic(3).unwrap();
        let basis = nb_basis(&bg).unwrap();
        assert_eq!(basis.len(), 4);
        // just off the north pole θ → 0
        let v3 = basis[3].value(&[5.0, 1e-9, 0.0]);
        assert!((v3 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn ball_model_cross_check() {
        let r = ball_to_areal_radius(0.5);
        assert!((r - 4.0 / 3.0).abs() < 1e-15);
        let bg = Background::hyperbolic(2).unwrap();
        let v0 = &nb_basis(&bg).unwrap()[0];
        assert!((v0.value(&[r, 0.1]) - 5.0 / 3.0).abs() < 1e-15);
        assert!((ball_model_v0(0.5) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn static_verification_on_hyperbolic_space() {
        let bg = Background::hyperbolic(3).unwrap();
        let b = bg.metric();
        let points: Vec<Point> = (0..5)
            .map(|i| Point::new(2.0 + 3.0 * i as f64, &[0.4 + 0.3 * i as f64, 1.0 + i as f64]))
            .collect();
        for v in nb_basis(&bg).unwrap() {
            let rep = verify_static(&b, &v, -3.0, DerivativeScheme::Analytic, &points, 1e-8).unwrap();
            assert!(rep.passed, "{}: {}", v.name, rep.max_residual);
        }
        let bad = StaticPotential::new(0, "r", |x| x[0]);
        let rep = verify_static(&b, &bad, -3.0, DerivativeScheme::Analytic, &points, 1e-8).unwrap();
        assert!(!rep.passed);
        // Δr − 3r = 2/r on H³
        assert!((rep.residuals[0].laplace - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v_equals_r_residual_at_reference_point() {
        // Hess(r) = −Γ^r_ij and V(Ric + 3b) = r·b, so the frame defect is
        // diag(0, 1/r, 1/r) with Frobenius norm √2/r.
        let bg = Background::hyperbolic(3).unwrap();
        let bad = StaticPotential::new(0, "r", |x| x[0]);
        let p = Point::new(2.0, &[1.1, 0.3]);
        let res = static_residual(&bg.metric(), &bad, -3.0, DerivativeScheme::Analytic, &p).unwrap();
        assert!((res.hessian - 2f64.sqrt() / 2.0).abs() < 1e-9, "{}", res.hessian);
        assert!((res.laplace - 1.0).abs() < 1e-9);
    }
}
