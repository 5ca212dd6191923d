//! The compact boundary manifold `(N, h̆)` of the end `[R, ∞) × N`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geom::{gram_schmidt, MetricDescriptor, MetricField};
use crate::jet::Jet;
use crate::quadrature::{gauss_gegenbauer, gauss_legendre_on, periodic_trapezoid};

/// Quadrature on `N`: `weights` integrate against `dμ_h̆`; dividing by
/// `sqrt_det` recovers the coordinate measure `dv¹…dvⁿ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub sqrt_det: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        crate::quadrature::pairwise_sum(&self.weights)
    }

    fn product(outer: Vec<(f64, f64, f64)>, inner: &Quadrature) -> Quadrature {
        let mut q = Quadrature {
            nodes: Vec::with_capacity(outer.len() * inner.len()),
            weights: Vec::with_capacity(outer.len() * inner.len()),
            sqrt_det: Vec::with_capacity(outer.len() * inner.len()),
        };
        for (x, w, s) in outer {
            for i in 0..inner.len() {
                let mut node = Vec::with_capacity(inner.nodes[i].len() + 1);
                node.push(x);
                node.extend_from_slice(&inner.nodes[i]);
                q.nodes.push(node);
                q.weights.push(w * inner.weights[i]);
                q.sqrt_det.push(s * inner.sqrt_det[i]);
            }
        }
        q
    }
}

/// User-supplied boundary: metric, quadrature and curvature normalization.
pub struct CustomBoundary {
    pub name: String,
    pub metric: Arc<dyn MetricField>,
    pub quadrature: Quadrature,
    pub k: i32,
    pub volume: f64,
}

impl std::fmt::Debug for CustomBoundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomBoundary")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("volume", &self.volume)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum BoundaryKind {
    /// Unit round sphere in hyperspherical coordinates `(θ₁, …, θ_{m−1}, φ)`.
    Sphere,
    /// Flat torus `[0, L)^m` of the given volume.
    FlatTorus { volume: f64 },
    /// Constant curvature −1 in horospherical coordinates
    /// `du² + e^{2u} Σ dw²`, on a patch whose `h̆`-volume equals that of the
    /// compact quotient it stands for. Exact for integrands that are constant
    /// along `N`, which covers every built-in family with `k = −1`.
    Hyperbolic { volume: f64 },
    Custom(Arc<CustomBoundary>),
}

#[derive(Debug, Clone)]
pub struct BoundaryManifold {
    kind: BoundaryKind,
    dim: usize,
}

impl BoundaryManifold {
    pub fn sphere(dim: usize) -> Self {
        assert!(dim >= 1, "sphere dimension must be positive");
        BoundaryManifold {
            kind: BoundaryKind::Sphere,
            dim,
        }
    }

    /// The circle of circumference 2π.
    pub fn circle() -> Self {
        Self::sphere(1)
    }

    pub fn flat_torus(dim: usize, volume: f64) -> Self {
        BoundaryManifold {
            kind: BoundaryKind::FlatTorus { volume },
            dim,
        }
    }

    pub fn hyperbolic(dim: usize, volume: f64) -> Self {
        BoundaryManifold {
            kind: BoundaryKind::Hyperbolic { volume },
            dim,
        }
    }

    /// Closed orientable hyperbolic surface of the given genus (area 4π(g−1)).
    pub fn hyperbolic_surface(genus: u32) -> Result<Self> {
        if genus < 2 {
            return Err(Error::InvalidArgument(format!(
                "a hyperbolic surface needs genus >= 2, got {genus}"
            )));
        }
        Ok(Self::hyperbolic(2, 4.0 * PI * (genus as f64 - 1.0)))
    }

    pub fn custom(dim: usize, boundary: CustomBoundary) -> Result<Self> {
        if boundary.metric.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: boundary.metric.dim(),
            });
        }
        Ok(BoundaryManifold {
            kind: BoundaryKind::Custom(Arc::new(boundary)),
            dim,
        })
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_round_sphere(&self) -> bool {
        matches!(self.kind, BoundaryKind::Sphere)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            BoundaryKind::Sphere => format!("sphere(S^{})", self.dim),
            BoundaryKind::FlatTorus { volume } => format!("flat-torus(T^{}, vol={volume})", self.dim),
            BoundaryKind::Hyperbolic { volume } => format!("hyperbolic(H^{}, vol={volume})", self.dim),
            BoundaryKind::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Sign `k` of the normalized scalar curvature `R_h̆ = (n−1)(n−2)k`.
    pub fn curvature_sign(&self) -> i32 {
        match &self.kind {
            BoundaryKind::Sphere => 1,
            BoundaryKind::FlatTorus { .. } => 0,
            BoundaryKind::Hyperbolic { .. } => -1,
            BoundaryKind::Custom(c) => c.k,
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.kind {
            BoundaryKind::Sphere => sphere_volume(self.dim),
            BoundaryKind::FlatTorus { volume } | BoundaryKind::Hyperbolic { volume } => *volume,
            BoundaryKind::Custom(c) => c.volume,
        }
    }

    /// Components of `h̆` (row-major, `dim × dim`) at chart coordinates `v`.
    pub fn metric_components(&self, v: &[Jet]) -> Result<Vec<Jet>> {
        let m = self.dim;
        match &self.kind {
            BoundaryKind::Sphere => Ok(sphere_metric(v)),
            BoundaryKind::FlatTorus { .. } => Ok(diag(m, |_| Jet::constant(1.0))),
            BoundaryKind::Hyperbolic { .. } => {
                let e2u = (v[0] * 2.0).exp();
                Ok(diag(m, |i| if i == 0 { Jet::constant(1.0) } else { e2u }))
            }
            BoundaryKind::Custom(c) => c.metric.components(v),
        }
    }

    pub fn check_domain(&self, v: &[f64]) -> Result<()> {
        if let BoundaryKind::Sphere = self.kind {
            // all but the last (periodic) coordinate are polar angles
            for &theta in &v[..v.len().saturating_sub(1)] {
                if !(theta > 0.0 && theta < PI) {
                    return Err(Error::ChartDomain {
                        point: v.to_vec(),
                        reason: "polar angle must lie strictly inside (0, π)".into(),
                    });
                }
            }
        }
        if let BoundaryKind::Custom(c) = &self.kind {
            c.metric.check_domain(v)?;
        }
        Ok(())
    }

    /// Unit vector `n(v) ∈ S^{m}` ⊂ ℝ^{m+1} for the round sphere; `n^{m+1} = cos θ₁`.
    pub fn embedding(&self, v: &[Jet]) -> Option<Vec<Jet>> {
        match self.kind {
            BoundaryKind::Sphere => Some(sphere_embedding(v)),
            _ => None,
        }
    }

    /// Default node count per polar-type direction (the periodic direction
    /// of a sphere gets twice as many).
    pub fn default_resolution(&self) -> usize {
        match self.dim {
            1 | 2 => 32,
            3 => 16,
            _ => 8,
        }
    }

    pub fn quadrature(&self, resolution: usize) -> Quadrature {
        let res = resolution.max(2);
        match &self.kind {
            BoundaryKind::Sphere => sphere_rule(self.dim, res),
            BoundaryKind::FlatTorus { volume } => {
                let l = volume.powf(1.0 / self.dim as f64);
                let (x, w) = periodic_trapezoid(res, l);
                let line: Vec<(f64, f64, f64)> = x.into_iter().zip(w).map(|(a, b)| (a, b, 1.0)).collect();
                let mut q = unit_rule();
                for _ in 0..self.dim {
                    q = Quadrature::product(line.clone(), &q);
                }
                q
            }
            BoundaryKind::Hyperbolic { volume } => {
                let m = self.dim as f64;
                let u_integral = if self.dim == 1 {
                    1.0
                } else {
                    2.0 * ((m - 1.0) / 2.0).sinh() / (m - 1.0)
                };
                let l = (volume / u_integral).powf(1.0 / (m - 1.0).max(1.0));
                let mut q = unit_rule();
                if self.dim > 1 {
                    let (x, w) = periodic_trapezoid(res, l);
                    let line: Vec<(f64, f64, f64)> =
                        x.into_iter().zip(w).map(|(a, b)| (a, b, 1.0)).collect();
                    for _ in 1..self.dim {
                        q = Quadrature::product(line.clone(), &q);
                    }
                }
                let (u, wu) = if self.dim == 1 {
                    gauss_legendre_on(res, 0.0, *volume)
                } else {
                    gauss_legendre_on(res, -0.5, 0.5)
                };
                let outer = u
                    .into_iter()
                    .zip(wu)
                    .map(|(ui, wi)| {
                        let s = if self.dim == 1 { 1.0 } else { ((m - 1.0) * ui).exp() };
                        (ui, wi * s, s)
                    })
                    .collect();
                Quadrature::product(outer, &q)
            }
            BoundaryKind::Custom(c) => c.quadrature.clone(),
        }
    }

    /// `h̆`-orthonormal frame at `v` by Gram–Schmidt on the coordinate basis.
    pub fn frame(&self, v: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = self.dim;
        let c = self.metric_components(&Jet::constants(v))?;
        let h = DMatrix::from_fn(m, m, |i, j| c[i * m + j].value());
        let basis: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Ok(gram_schmidt(&h, &basis))
    }

    /// `h̆` as a metric field on its own chart.
    pub fn as_metric(&self) -> BoundaryMetric {
        BoundaryMetric(self.clone())
    }
}

/// `(N, h̆)` viewed as a Riemannian manifold in its own right.
pub struct BoundaryMetric(BoundaryManifold);

impl MetricField for BoundaryMetric {
    fn dim(&self) -> usize {
        self.0.dim
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        self.0.metric_components(x)
    }

    fn analytic(&self) -> bool {
        match &self.0.kind {
            BoundaryKind::Custom(c) => c.metric.analytic(),
            _ => true,
        }
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new(self.0.name())
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        self.0.check_domain(x)
    }
}

fn unit_rule() -> Quadrature {
    Quadrature {
        nodes: vec![vec![]],
        weights: vec![1.0],
        sqrt_det: vec![1.0],
    }
}

fn diag(m: usize, f: impl Fn(usize) -> Jet) -> Vec<Jet> {
    let mut out = vec![Jet::constant(0.0); m * m];
    for i in 0..m {
        out[i * m + i] = f(i);
    }
    out
}

/// `Vol(S^m) = 2π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn sphere_volume(m: usize) -> f64 {
    // Vol(S^m) = 2π/(m−1) · Vol(S^{m−2})
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * sphere_volume(m - 2),
    }
}

fn sphere_metric(v: &[Jet]) -> Vec<Jet> {
    let m = v.len();
    // h = dθ₁² + sin²θ₁ (dθ₂² + sin²θ₂ (…))
    let mut out = vec![Jet::constant(0.0); m * m];
    let mut factor = Jet::constant(1.0);
    for i in 0..m {
        out[i * m + i] = factor;
        if i + 1 < m {
            let s = v[i].sin();
            factor = factor * s * s;
        }
    }
    out
}

fn sphere_embedding(v: &[Jet]) -> Vec<Jet> {
    match v.len() {
        1 => vec![v[0].cos(), v[0].sin()],
        _ => {
            let inner = sphere_embedding(&v[1..]);
            let s = v[0].sin();
            let mut out: Vec<Jet> = inner.into_iter().map(|x| x * s).collect();
            out.push(v[0].cos());
            out
        }
    }
}

fn sphere_rule(m: usize, res: usize) -> Quadrature {
    if m == 1 {
        let (x, w) = periodic_trapezoid(2 * res, 2.0 * PI);
        return Quadrature {
            nodes: x.into_iter().map(|t| vec![t]).collect(),
            weights: w,
            sqrt_det: vec![1.0; 2 * res],
        };
    }
    let inner = sphere_rule(m - 1, res);
    // Gauss rule in cos θ for the weight sin^{m−2} θ
    let (t, w) = gauss_gegenbauer(res, 0.5 * (m as f64 - 2.0));
    let outer = t
        .into_iter()
        .zip(w)
        .map(|(ti, wi)| {
            let theta = ti.acos();
            (theta, wi, theta.sin().powi(m as i32 - 1))
        })
        .rev()
        .collect::<Vec<_>>();
    Quadrature::product(outer, &inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{ricci_and_scalar, DerivativeScheme, Point};

    #[test]
    fn weights_sum_to_volume() {
        let cases = [
            (BoundaryManifold::circle(), 2.0 * PI),
            (BoundaryManifold::sphere(2), 4.0 * PI),
            (BoundaryManifold::sphere(3), 2.0 * PI * PI),
            (BoundaryManifold::sphere(4), 8.0 * PI * PI / 3.0),
            (BoundaryManifold::flat_torus(2, 1.0), 1.0),
            (BoundaryManifold::flat_torus(3, 2.5), 2.5),
            (BoundaryManifold::hyperbolic_surface(2).unwrap(), 4.0 * PI),
            (BoundaryManifold::hyperbolic(3, 7.0), 7.0),
        ];
        for (b, vol) in cases {
            let q = b.quadrature(b.default_resolution());
            assert!((q.total_weight() - vol).abs() < 1e-10, "{}: {}", b.name(), q.total_weight());
            assert!((b.volume() - vol).abs() < 1e-12);
        }
    }

    #[test]
    fn curvature_normalization_at_nodes() {
        for b in [
            BoundaryManifold::sphere(2),
            BoundaryManifold::sphere(3),
            BoundaryManifold::flat_torus(2, 1.0),
            BoundaryManifold::hyperbolic(2, 4.0 * PI),
            BoundaryManifold::hyperbolic(3, 1.0),
        ] {
            let m = b.dim() as f64;
            let expected = m * (m - 1.0) * b.curvature_sign() as f64;
            let q = b.quadrature(4);
            let metric = b.as_metric();
            for node in q.nodes.iter().step_by(3) {
                let p = Point::from_coords(node.clone());
                let (_, s) = ricci_and_scalar(&metric, DerivativeScheme::Analytic, &p).unwrap();
                assert!((s - expected).abs() < 1e-8, "{}: {s}", b.name());
            }
        }
    }

    #[test]
    fn sphere_nodes_avoid_poles() {
        let b = BoundaryManifold::sphere(3);
        let q = b.quadrature(8);
        for node in &q.nodes {
            b.check_domain(node).unwrap();
        }
        assert!(b.check_domain(&[0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn sphere_integrates_low_degree_harmonics() {
        let b = BoundaryManifold::sphere(2);
        let q = b.quadrature(32);
        for axis in 0..3 {
            let mut first = 0.0;
            let mut second = 0.0;
            for (node, w) in q.nodes.iter().zip(&q.weights) {
                let e = b.embedding(&Jet::constants(node)).unwrap();
                first += w * e[axis].value();
                second += w * e[axis].value().powi(2);
            }
            assert!(first.abs() < 1e-13);
            assert!((second - 4.0 * PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let b = BoundaryManifold::sphere(3);
        let v = [0.7, 1.2, 2.0];
        let f = b.frame(&v).unwrap();
        let c = b.metric_components(&Jet::constants(&v)).unwrap();
        for a in 0..3 {
            for bb in 0..3 {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        s += f[a][i] * c[i * 3 + j].value() * f[bb][j];
                    }
                }
                assert!((s - if a == bb { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }
}
