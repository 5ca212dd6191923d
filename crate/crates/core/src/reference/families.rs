//! Built-in metric families on the end chart.
//!
//! Each family reports its deviation `e = g − b` from its natural background
//! in closed form, so mass integrands never subtract two `O(r²)` components.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{block_metric, check_end_chart, Background, BoundaryManifold};
use crate::error::{Error, Result};
use crate::geom::{MetricDescriptor, MetricField, ReferenceTag};
use crate::jet::Jet;

/// Named families accepted by [`builtin_metric`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Hyperbolic { n: usize },
    Kottler2d { eta: f64 },
    SchwarzschildAds { n: usize, m_param: f64, k: i32 },
}

/// Boundary used when only `(k, n)` is given.
pub fn default_boundary(k: i32, n: usize) -> Result<BoundaryManifold> {
    match k {
        1 => Ok(BoundaryManifold::sphere(n - 1)),
        0 => Ok(BoundaryManifold::flat_torus(n - 1, 1.0)),
        -1 if n == 3 => BoundaryManifold::hyperbolic_surface(2),
        -1 => Ok(BoundaryManifold::hyperbolic(n - 1, 1.0)),
        _ => Err(Error::BoundaryMismatch(format!("k must be -1, 0 or 1, got {k}"))),
    }
}

pub fn default_background(k: i32, n: usize) -> Result<Background> {
    super::build_background(k, n, default_boundary(k, n)?)
}

pub fn builtin_metric(family: &Family) -> Result<Arc<dyn MetricField>> {
    Ok(match *family {
        Family::Hyperbolic { n } => Arc::new(Background::hyperbolic(n)?.metric()),
        Family::Kottler2d { eta } => Arc::new(Kottler2d::new(eta)?),
        Family::SchwarzschildAds { n, m_param, k } => {
            Arc::new(SchwarzschildAds::new(default_background(k, n)?, m_param)?)
        }
    })
}

/// `dr²/(r² − η) + r² dφ²`, constant curvature −1 for every η.
#[derive(Debug, Clone)]
pub struct Kottler2d {
    eta: f64,
    background: Background,
}

impl Kottler2d {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::InvalidArgument(format!("eta must be finite, got {eta}")));
        }
        Ok(Kottler2d {
            eta,
            background: Background::hyperbolic(2)?,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Radii must exceed `√max(η, 0)`.
    pub fn r_floor(&self) -> f64 {
        self.eta.max(0.0).sqrt()
    }

    pub fn background(&self) -> &Background {
        &self.background
    }
}

impl MetricField for Kottler2d {
    fn dim(&self) -> usize {
        2
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let r = x[0];
        let z = Jet::constant(0.0);
        Ok(vec![(r * r - self.eta).recip(), z, z, r * r])
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new("kottler2d").with("eta", self.eta)
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        check_end_chart(x, self.r_floor(), self.background.boundary())?;
        if x[0] * x[0] - self.eta <= 0.0 {
            return Err(Error::ChartDomain {
                point: x.to_vec(),
                reason: "r² − η must be positive".into(),
            });
        }
        Ok(())
    }

    fn reference_tag(&self) -> Option<ReferenceTag> {
        Some(self.background.tag())
    }

    fn exact_deviation(&self, x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        let r2 = x[0] * x[0];
        let z = Jet::constant(0.0);
        let err = ((r2 - self.eta) * (r2 + 1.0)).recip() * (1.0 + self.eta);
        Some(Ok(vec![err, z, z, z]))
    }
}

/// Kottler (Schwarzschild–anti de Sitter) metric
/// `dr²/(r² + k − 2m r^{2−n}) + r² h̆`.
#[derive(Debug, Clone)]
pub struct SchwarzschildAds {
    background: Background,
    m_param: f64,
    horizon: f64,
    r_min: f64,
}

impl SchwarzschildAds {
    pub fn new(background: Background, m_param: f64) -> Result<Self> {
        if !m_param.is_finite() {
            return Err(Error::InvalidArgument(format!("m_param must be finite, got {m_param}")));
        }
        let horizon = largest_root(background.n(), background.k() as f64, m_param)
            .max(background.r_floor());
        Ok(SchwarzschildAds {
            background,
            m_param,
            horizon,
            r_min: horizon,
        })
    }

    /// Restricts the chart to `r > r_min`; fails if that range reaches the
    /// horizon.
    pub fn with_chart_min(mut self, r_min: f64) -> Result<Self> {
        if r_min <= self.horizon {
            return Err(Error::MetricSingularity(format!(
                "chart lower bound {r_min} is not beyond the largest root {} of r² + k − 2m r^(2−n)",
                self.horizon
            )));
        }
        self.r_min = r_min;
        Ok(self)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn m_param(&self) -> f64 {
        self.m_param
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    fn mass_term(&self, r: Jet) -> Jet {
        let n = self.background.n() as i32;
        r.powi(2 - n) * (2.0 * self.m_param)
    }
}

/// Largest positive root of `r² + k − 2m r^{2−n}`, or 0 when there is none.
pub(crate) fn largest_root(n: usize, k: f64, m: f64) -> f64 {
    let f = |r: f64| r * r + k - 2.0 * m * r.powi(2 - n as i32);
    let mut hi = 2.0 + (2.0 * m.abs()).powf(1.0 / n as f64) + k.abs();
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    // walk down on a geometric grid to the first sign change
    let mut lo = hi;
    loop {
        let next = lo * 0.98;
        if next < 1e-9 {
            return 0.0;
        }
        if f(next) <= 0.0 {
            let (mut a, mut b) = (next, lo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if f(mid) <= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return b;
        }
        lo = next;
    }
}

impl MetricField for SchwarzschildAds {
    fn dim(&self) -> usize {
        self.background.n()
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let r = x[0];
        let lapse = r * r + self.background.k() as f64 - self.mass_term(r);
        block_metric(self.dim(), lapse, r, self.background.boundary(), &x[1..], None)
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new("schwarzschild_ads")
            .with("n", self.dim() as f64)
            .with("k", self.background.k() as f64)
            .with("m_param", self.m_param)
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        check_end_chart(x, self.r_min, self.background.boundary())
    }

    fn reference_tag(&self) -> Option<ReferenceTag> {
        Some(self.background.tag())
    }

    fn exact_deviation(&self, x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        let n = self.dim();
        let r = x[0];
        let q = self.mass_term(r);
        let b_lapse = r * r + self.background.k() as f64;
        let mut e = vec![Jet::constant(0.0); n * n];
        e[0] = q / ((b_lapse - q) * b_lapse);
        Some(Ok(e))
    }
}

type FieldFn = dyn Fn(&[Jet]) -> Jet + Send + Sync;
type TensorFn = dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync;

/// `g = g_nn a²(r) dr² + c r² h̆` with `a² = 1/(r²+k)`. The callbacks return
/// the deviations `g_nn − 1` and `c − 1`.
#[derive(Clone)]
pub struct DiagonalAnsatz {
    background: Background,
    name: String,
    gnn_minus_one: Arc<FieldFn>,
    c_minus_one: Arc<FieldFn>,
}

impl std::fmt::Debug for DiagonalAnsatz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiagonalAnsatz").field("name", &self.name).finish()
    }
}

impl DiagonalAnsatz {
    pub fn new(
        background: Background,
        name: impl Into<String>,
        gnn_minus_one: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
        c_minus_one: impl Fn(&[Jet]) -> Jet + Send + Sync + 'static,
    ) -> Self {
        DiagonalAnsatz {
            background,
            name: name.into(),
            gnn_minus_one: Arc::new(gnn_minus_one),
            c_minus_one: Arc::new(c_minus_one),
        }
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    /// `g_nn − 1`.
    pub fn gnn_deviation(&self, x: &[Jet]) -> Jet {
        (self.gnn_minus_one)(x)
    }

    /// `c − 1`.
    pub fn c_deviation(&self, x: &[Jet]) -> Jet {
        (self.c_minus_one)(x)
    }

    pub fn g_nn(&self, x: &[Jet]) -> Jet {
        (self.gnn_minus_one)(x) + 1.0
    }

    pub fn c(&self, x: &[Jet]) -> Jet {
        (self.c_minus_one)(x) + 1.0
    }

    /// `a(r) = (r² + k)^{-1/2}`.
    pub fn a(&self, r: Jet) -> Jet {
        (r * r + self.background.k() as f64).sqrt().recip()
    }
}

impl MetricField for DiagonalAnsatz {
    fn dim(&self) -> usize {
        self.background.n()
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let r = x[0];
        let lapse = (r * r + self.background.k() as f64) / self.g_nn(x);
        block_metric(self.dim(), lapse, r, self.background.boundary(), &x[1..], Some(self.c(x)))
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new(format!("diagonal_ansatz({})", self.name))
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        check_end_chart(x, self.background.r_floor(), self.background.boundary())?;
        let xs = Jet::constants(x);
        let (gnn, c) = (self.g_nn(&xs).value(), self.c(&xs).value());
        if !(gnn > 0.0 && c > 0.0) {
            return Err(Error::ChartDomain {
                point: x.to_vec(),
                reason: format!("ansatz needs g_nn > 0 and c > 0 (got {gnn}, {c})"),
            });
        }
        Ok(())
    }

    fn reference_tag(&self) -> Option<ReferenceTag> {
        Some(self.background.tag())
    }

    fn exact_deviation(&self, x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        let n = self.dim();
        let r = x[0];
        let mut e = match block_metric(
            n,
            Jet::constant(1.0),
            r,
            self.background.boundary(),
            &x[1..],
            Some((self.c_minus_one)(x)),
        ) {
            Ok(e) => e,
            Err(err) => return Some(Err(err)),
        };
        e[0] = (self.gnn_minus_one)(x) / (r * r + self.background.k() as f64);
        Some(Ok(e))
    }
}

/// `g = b + e` for an arbitrary symmetric deviation `e` given in coordinates.
#[derive(Clone)]
pub struct PerturbedMetric {
    background: Background,
    name: String,
    deviation: Arc<TensorFn>,
}

impl std::fmt::Debug for PerturbedMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PerturbedMetric").field("name", &self.name).finish()
    }
}

impl PerturbedMetric {
    pub fn new(
        background: Background,
        name: impl Into<String>,
        deviation: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        PerturbedMetric {
            background,
            name: name.into(),
            deviation: Arc::new(deviation),
        }
    }

    pub fn background(&self) -> &Background {
        &self.background
    }
}

impl MetricField for PerturbedMetric {
    fn dim(&self) -> usize {
        self.background.n()
    }

    fn components(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let b = self.background.components(x)?;
        let e = (self.deviation)(x);
        Ok(b.into_iter().zip(e).map(|(bi, ei)| bi + ei).collect())
    }

    fn descriptor(&self) -> MetricDescriptor {
        MetricDescriptor::new(format!("perturbed({})", self.name))
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        check_end_chart(x, self.background.r_floor(), self.background.boundary())
    }

    fn reference_tag(&self) -> Option<ReferenceTag> {
        Some(self.background.tag())
    }

    fn exact_deviation(&self, x: &[Jet]) -> Option<Result<Vec<Jet>>> {
        Some(Ok((self.deviation)(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{ricci_and_scalar, DerivativeScheme, Point};

    #[test]
    fn kottler_minus_one_is_hyperbolic() {
        let k = Kottler2d::new(-1.0).unwrap();
        let b = Background::hyperbolic(2).unwrap().metric();
        for r in [0.5, 2.0, 30.0] {
            let x = [r, 1.3];
            assert_eq!(k.eval(&x).unwrap(), b.eval(&x).unwrap());
        }
    }

    #[test]
    fn kottler_has_constant_curvature() {
        for eta in [-1.0, 0.0, 1.0, 2.0, 5.5] {
            let k = Kottler2d::new(eta).unwrap();
            for r in [3.0, 10.0, 80.0] {
                let (_, s) = ricci_and_scalar(&k, DerivativeScheme::Analytic, &Point::new(r, &[0.4])).unwrap();
                assert!((s + 2.0).abs() < 1e-9, "eta={eta} r={r}: {s}");
            }
        }
    }

    #[test]
    fn kottler_domain() {
        let k = Kottler2d::new(4.0).unwrap();
        assert!(k.check_domain(&[2.0, 0.1]).is_err());
        assert!(k.check_domain(&[2.1, 0.1]).is_ok());
    }

    #[test]
    fn schwarzschild_ads_degenerates_to_hyperbolic() {
        let s = builtin_metric(&Family::SchwarzschildAds { n: 3, m_param: 0.0, k: 1 }).unwrap();
        let b = Background::hyperbolic(3).unwrap().metric();
        let x = [4.0, 0.7, 2.0];
        assert_eq!(s.eval(&x).unwrap(), b.eval(&x).unwrap());
    }

    #[test]
    fn schwarzschild_ads_is_einstein() {
        for (n, k) in [(3usize, 1i32), (4, 1), (3, 0), (3, -1), (5, 1)] {
            let bg = default_background(k, n).unwrap();
            let s = SchwarzschildAds::new(bg, 0.7).unwrap();
            let angles: Vec<f64> = (1..n).map(|i| 0.3 + 0.4 * i as f64).collect();
            for r in [3.0, 20.0] {
                let (_, sc) = ricci_and_scalar(&s, DerivativeScheme::Analytic, &Point::new(r, &angles)).unwrap();
                let expected = -((n * (n - 1)) as f64);
                assert!((sc - expected).abs() < 1e-8, "n={n} k={k} r={r}: {sc}");
            }
        }
    }

    #[test]
    fn horizon_and_chart_bound() {
        // r³ + r − 2 = 0 has root r = 1
        let s = SchwarzschildAds::new(Background::hyperbolic(3).unwrap(), 1.0).unwrap();
        assert!((s.horizon() - 1.0).abs() < 1e-12);
        assert!(matches!(s.clone().with_chart_min(0.9), Err(Error::MetricSingularity(_))));
        assert!(s.with_chart_min(1.5).is_ok());
    }

    #[test]
    fn exact_deviation_matches_subtraction_at_moderate_radius() {
        let s = SchwarzschildAds::new(Background::hyperbolic(3).unwrap(), 0.5).unwrap();
        let x = [3.0, 1.0, 0.5];
        let e = s.exact_deviation(&Jet::constants(&x)).unwrap().unwrap();
        let diff = s.eval(&x).unwrap() - s.background().metric().eval(&x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((e[i * 3 + j].value() - diff[(i, j)]).abs() < 1e-15);
            }
        }
    }
}
