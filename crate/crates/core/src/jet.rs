//! Second-order forward-mode jets.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to up to [`MAX_VARS`] independent coordinates. Every metric family,
//! potential and coordinate map in this crate is written once over jets, which
//! gives exact first and second derivatives ("analytic mode") without a
//! separate symbolic derivative for each component.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest number of coordinates a jet can track. Dimensions `n` up to 5 are
/// supported throughout the crate.
pub const MAX_VARS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    v: f64,
    d: [f64; MAX_VARS],
    h: [[f64; MAX_VARS]; MAX_VARS],
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet {
            v,
            d: [0.0; MAX_VARS],
            h: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    /// The coordinate function `x_index` evaluated at `v`.
    pub fn variable(v: f64, index: usize) -> Self {
        assert!(index < MAX_VARS, "jet variable index {index} out of range");
        let mut j = Jet::constant(v);
        j.d[index] = 1.0;
        j
    }

    /// Seeds one jet per coordinate of `x`.
    pub fn seed(x: &[f64]) -> Vec<Jet> {
        x.iter().enumerate().map(|(i, &v)| Jet::variable(v, i)).collect()
    }

    pub fn constants(x: &[f64]) -> Vec<Jet> {
        x.iter().map(|&v| Jet::constant(v)).collect()
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.v
    }

    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.d[i]
    }

    #[inline]
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.h[i][j]
    }

    pub fn gradient(&self, n: usize) -> Vec<f64> {
        self.d[..n].to_vec()
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value()`.
    #[inline]
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let mut out = Jet::constant(f0);
        for i in 0..MAX_VARS {
            out.d[i] = f1 * self.d[i];
        }
        for i in 0..MAX_VARS {
            let di = self.d[i];
            for j in 0..MAX_VARS {
                out.h[i][j] = f1 * self.h[i][j] + f2 * di * self.d[j];
            }
        }
        out
    }

    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn powf(self, p: f64) -> Jet {
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        let v = self.v;
        let f0 = v.powf(p);
        let f1 = p * v.powf(p - 1.0);
        let f2 = p * (p - 1.0) * v.powf(p - 2.0);
        self.chain(f0, f1, f2)
    }

    pub fn powi(self, p: i32) -> Jet {
        match p {
            0 => Jet::constant(1.0),
            1 => self,
            2 => self * self,
            _ => {
                let v = self.v;
                let pf = p as f64;
                self.chain(
                    v.powi(p),
                    pf * v.powi(p - 1),
                    pf * (pf - 1.0) * v.powi(p - 2),
                )
            }
        }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Jet {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn sin(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    /// `exp(x) - 1` without cancellation near zero.
    pub fn exp_m1(self) -> Jet {
        let e = self.v.exp();
        self.chain(self.v.exp_m1(), e, e)
    }

    pub fn scale(mut self, s: f64) -> Jet {
        self.v *= s;
        for i in 0..MAX_VARS {
            self.d[i] *= s;
            for j in 0..MAX_VARS {
                self.h[i][j] *= s;
            }
        }
        self
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(mut self, o: Jet) -> Jet {
        self += o;
        self
    }
}

impl AddAssign for Jet {
    #[inline]
    fn add_assign(&mut self, o: Jet) {
        self.v += o.v;
        for i in 0..MAX_VARS {
            self.d[i] += o.d[i];
            for j in 0..MAX_VARS {
                self.h[i][j] += o.h[i][j];
            }
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(mut self, o: Jet) -> Jet {
        self -= o;
        self
    }
}

impl SubAssign for Jet {
    #[inline]
    fn sub_assign(&mut self, o: Jet) {
        self.v -= o.v;
        for i in 0..MAX_VARS {
            self.d[i] -= o.d[i];
            for j in 0..MAX_VARS {
                self.h[i][j] -= o.h[i][j];
            }
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet::constant(self.v * o.v);
        for i in 0..MAX_VARS {
            out.d[i] = self.d[i] * o.v + self.v * o.d[i];
        }
        for i in 0..MAX_VARS {
            for j in 0..MAX_VARS {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + self.d[i] * o.d[j]
                    + self.d[j] * o.d[i];
            }
        }
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, o: Jet) {
        *self = *self * o;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, o: f64) -> Jet {
        self.v += o;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, o: f64) -> Jet {
        self.v -= o;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        self.scale(o)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        self.scale(1.0 / o)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        o + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        (-o) + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        o.scale(self)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        o.recip().scale(self)
    }
}

impl std::iter::Sum for Jet {
    fn sum<I: Iterator<Item = Jet>>(iter: I) -> Jet {
        iter.fold(Jet::constant(0.0), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(&[Jet]) -> Jet, x: &[f64]) {
        let n = x.len();
        let jet = f(&Jet::seed(x));
        let val = |y: &[f64]| f(&Jet::constants(y)).value();
        let h = 1e-4;
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let fd = (val(&xp) - val(&xm)) / (2.0 * h);
            assert!((fd - jet.d(i)).abs() < 1e-6 * (1.0 + fd.abs()), "d{i}: {fd} vs {}", jet.d(i));
            for j in 0..n {
                let mut a = xp.clone();
                let mut b = xp.clone();
                let mut c = xm.clone();
                let mut d = xm.clone();
                a[j] += h;
                b[j] -= h;
                c[j] += h;
                d[j] -= h;
                let fdd = (val(&a) - val(&b) - val(&c) + val(&d)) / (4.0 * h * h);
                assert!(
                    (fdd - jet.dd(i, j)).abs() < 1e-4 * (1.0 + fdd.abs()),
                    "dd{i}{j}: {fdd} vs {}",
                    jet.dd(i, j)
                );
            }
        }
    }

    #[test]
    fn elementary_functions_match_differences() {
        fd_check(|x| x[0] * x[1].sin() + x[2].exp() / x[0], &[1.3, 0.7, -0.2]);
        fd_check(|x| (x[0] * x[0] + 1.0).sqrt() * x[1].cos().powi(3), &[2.0, 0.4]);
        fd_check(|x| x[0].powf(-1.5) + x[1].ln() * x[0], &[3.0, 2.5]);
        fd_check(|x| (x[0] * 0.1).exp_m1() / (x[1] - x[0]), &[0.3, 2.0]);
    }

    #[test]
    fn hessian_is_symmetric() {
        let x = Jet::seed(&[0.3, 1.1, 2.0]);
        let f = x[0] * x[1] * x[2] + (x[0] / x[2]).sin();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.dd(i, j), f.dd(j, i));
            }
        }
    }
}
