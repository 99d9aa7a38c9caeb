//! Scalar types the evaluator runs over: plain `f64`, the second-order
//! [`HyperDual`], and the first-order [`Dual`] wrapper that can be stacked on
//! top of another scalar (`Dual<HyperDual>` carries third derivatives).

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by [`crate::exprlang::Expr::eval`].
///
/// Implementations do not check domains; the evaluator inspects
/// [`Scalar::value`] before calling `log`, `sqrt`, division and `pow`.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant carrying `dim` zero derivative slots.
    fn constant(v: f64, dim: usize) -> Self;
    /// Number of active coordinates.
    fn dim(&self) -> usize;
    fn value(&self) -> f64;
    fn scale(&self, k: f64) -> Self;

    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn tanh(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64, _dim: usize) -> Self {
        v
    }
    fn dim(&self) -> usize {
        0
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Value, gradient and Hessian with respect to `d` active coordinates.
///
/// The Hessian is stored row-major and is symmetric to exact equality: every
/// operation computes the upper triangle and mirrors it.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperDual {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl HyperDual {
    pub fn constant(value: f64, dim: usize) -> Self {
        HyperDual {
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; dim * dim],
        }
    }

    /// Seeds coordinate `k`: unit gradient, zero Hessian.
    pub fn variable(value: f64, k: usize, dim: usize) -> Self {
        let mut h = Self::constant(value, dim);
        h.grad[k] = 1.0;
        h
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    /// Composition with a scalar function given its value and first two
    /// derivatives at `self.value`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let d = self.dim();
        let grad: Vec<f64> = self.grad.iter().map(|g| f1 * g).collect();
        let mut hess = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = f1 * self.hess[i * d + j] + f2 * (self.grad[i] * self.grad[j]);
                hess[i * d + j] = v;
                hess[j * d + i] = v;
            }
        }
        HyperDual {
            value: f0,
            grad,
            hess,
        }
    }

    fn check_dims(&self, other: &Self) {
        assert_eq!(
            self.dim(),
            other.dim(),
            "hyper-dual operands have different coordinate counts"
        );
    }
}

impl Add for HyperDual {
    type Output = HyperDual;
    fn add(mut self, rhs: HyperDual) -> HyperDual {
        self.check_dims(&rhs);
        self.value += rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a += b);
        self.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for HyperDual {
    type Output = HyperDual;
    fn sub(mut self, rhs: HyperDual) -> HyperDual {
        self.check_dims(&rhs);
        self.value -= rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a -= b);
        self.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for HyperDual {
    type Output = HyperDual;
    fn neg(mut self) -> HyperDual {
        self.value = -self.value;
        self.grad.iter_mut().for_each(|a| *a = -*a);
        self.hess.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl Mul for HyperDual {
    type Output = HyperDual;
    fn mul(self, rhs: HyperDual) -> HyperDual {
        self.check_dims(&rhs);
        let d = self.dim();
        let (a, b) = (self.value, rhs.value);
        let grad = (0..d).map(|i| a * rhs.grad[i] + b * self.grad[i]).collect();
        let mut hess = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let cross = self.grad[i] * rhs.grad[j] + rhs.grad[i] * self.grad[j];
                let v = a * rhs.hess[i * d + j] + b * self.hess[i * d + j] + cross;
                hess[i * d + j] = v;
                hess[j * d + i] = v;
            }
        }
        HyperDual {
            value: a * b,
            grad,
            hess,
        }
    }
}

impl Div for HyperDual {
    type Output = HyperDual;
    fn div(self, rhs: HyperDual) -> HyperDual {
        let b = rhs.value;
        let recip = rhs.chain(1.0 / b, -1.0 / (b * b), 2.0 / (b * b * b));
        self * recip
    }
}

impl Scalar for HyperDual {
    fn constant(v: f64, dim: usize) -> Self {
        HyperDual::constant(v, dim)
    }
    fn dim(&self) -> usize {
        self.grad.len()
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn scale(&self, k: f64) -> Self {
        HyperDual {
            value: self.value * k,
            grad: self.grad.iter().map(|g| g * k).collect(),
            hess: self.hess.iter().map(|h| h * k).collect(),
        }
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn tan(&self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }
    fn ln(&self) -> Self {
        let x = self.value;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }
    fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }
    fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }
    fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }
    fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return HyperDual::constant(1.0, self.dim());
        }
        let x = self.value;
        let nf = f64::from(n);
        let f1 = nf * x.powi(n - 1);
        let f2 = if n == 1 { 0.0 } else { nf * (nf - 1.0) * x.powi(n - 2) };
        self.chain(x.powi(n), f1, f2)
    }
}

/// First-order dual number over an inner scalar `S`.
///
/// `Dual<HyperDual>` seeded on coordinate `k` in both layers yields, for an
/// expression `F`, `value = (F, ∂F, ∂²F)` and `eps[i] = (∂_iF, ∂∂_iF, ∂²∂_iF)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<S> {
    pub value: S,
    pub eps: Vec<S>,
}

impl<S: Scalar> Dual<S> {
    pub fn new(value: S, eps: Vec<S>) -> Self {
        Dual { value, eps }
    }

    fn map_eps(&self, value: S, factor: &S) -> Self {
        Dual {
            value,
            eps: self.eps.iter().map(|e| factor.clone() * e.clone()).collect(),
        }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Dual<S>;
    fn add(self, rhs: Self) -> Self {
        Dual {
            value: self.value + rhs.value,
            eps: self.eps.into_iter().zip(rhs.eps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Dual<S>;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            value: self.value - rhs.value,
            eps: self.eps.into_iter().zip(rhs.eps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Dual<S>;
    fn neg(self) -> Self {
        Dual {
            value: -self.value,
            eps: self.eps.into_iter().map(|a| -a).collect(),
        }
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Dual<S>;
    fn mul(self, rhs: Self) -> Self {
        let eps = self
            .eps
            .iter()
            .zip(&rhs.eps)
            .map(|(a, b)| self.value.clone() * b.clone() + rhs.value.clone() * a.clone())
            .collect();
        Dual {
            value: self.value * rhs.value,
            eps,
        }
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Dual<S>;
    fn div(self, rhs: Self) -> Self {
        let inv = S::constant(1.0, rhs.value.dim()) / rhs.value.clone();
        let minus_inv2 = -(inv.clone() * inv.clone());
        let recip = rhs.map_eps(inv, &minus_inv2);
        self * recip
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn constant(v: f64, dim: usize) -> Self {
        Dual {
            value: S::constant(v, dim),
            eps: vec![S::constant(0.0, dim); dim],
        }
    }
    fn dim(&self) -> usize {
        self.eps.len()
    }
    fn value(&self) -> f64 {
        self.value.value()
    }
    fn scale(&self, k: f64) -> Self {
        Dual {
            value: self.value.scale(k),
            eps: self.eps.iter().map(|e| e.scale(k)).collect(),
        }
    }
    fn sin(&self) -> Self {
        self.map_eps(self.value.sin(), &self.value.cos())
    }
    fn cos(&self) -> Self {
        self.map_eps(self.value.cos(), &-self.value.sin())
    }
    fn tan(&self) -> Self {
        let t = self.value.tan();
        let one = S::constant(1.0, self.value.dim());
        let sec2 = one + t.clone() * t.clone();
        self.map_eps(t, &sec2)
    }
    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.map_eps(e.clone(), &e)
    }
    fn ln(&self) -> Self {
        let inv = S::constant(1.0, self.value.dim()) / self.value.clone();
        self.map_eps(self.value.ln(), &inv)
    }
    fn sinh(&self) -> Self {
        self.map_eps(self.value.sinh(), &self.value.cosh())
    }
    fn cosh(&self) -> Self {
        self.map_eps(self.value.cosh(), &self.value.sinh())
    }
    fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let one = S::constant(1.0, self.value.dim());
        let sech2 = one - t.clone() * t.clone();
        self.map_eps(t, &sech2)
    }
    fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        let half_inv = S::constant(0.5, self.value.dim()) / r.clone();
        self.map_eps(r, &half_inv)
    }
    fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::constant(1.0, self.dim());
        }
        let factor = self.value.powi(n - 1).scale(f64::from(n));
        self.map_eps(self.value.powi(n), &factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_hessian_is_exactly_symmetric() {
        let x = HyperDual::variable(0.3, 0, 3);
        let y = HyperDual::variable(-1.7, 1, 3);
        let z = HyperDual::variable(2.2, 2, 3);
        let f = (x.clone() * y.clone()).sin() * (z / x).exp() + y.tanh();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.hess_at(i, j), f.hess_at(j, i));
            }
        }
    }

    #[test]
    fn nested_dual_carries_third_derivative() {
        // F = x^4: F''' = 24 x
        let x0 = 1.5;
        let inner = HyperDual::variable(x0, 0, 1);
        let seed = Dual::new(inner, vec![HyperDual::constant(1.0, 1)]);
        let f = seed.powi(4);
        assert!((f.eps[0].value - 4.0 * x0.powi(3)).abs() < 1e-12);
        assert!((f.eps[0].grad[0] - 12.0 * x0 * x0).abs() < 1e-12);
        assert!((f.eps[0].hess[0] - 24.0 * x0).abs() < 1e-12);
    }
}
