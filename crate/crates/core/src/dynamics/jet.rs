//! Second-order forward differentiation in two variables.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian, so every
//! potential is written once and yields `V`, `grad V` and `Hess V` consistently.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub g: [T; 2],
    pub h: [[T; 2]; 2],
}

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let z = T::zero();
        Self { v, g: [z, z], h: [[z, z], [z, z]] }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(i: usize, value: T) -> Self {
        let mut j = Self::constant(value);
        j.g[i] = T::one();
        j
    }

    /// Composition with a scalar function given its value and first two derivatives.
    pub fn map(self, f0: T, f1: T, f2: T) -> Self {
        let mut h = [[T::zero(); 2]; 2];
        for (a, row) in h.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                *entry = f2 * self.g[a] * self.g[b] + f1 * self.h[a][b];
            }
        }
        Self { v: f0, g: [f1 * self.g[0], f1 * self.g[1]], h }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.map(e, e, e)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let half = T::lit(0.5);
        self.map(s, half / s, -half * half / (s * self.v))
    }

    pub fn recip(self) -> Self {
        let r = T::one() / self.v;
        self.map(r, -r * r, T::lit(2.0) * r * r * r)
    }

    pub fn scale(self, s: T) -> Self {
        Self {
            v: self.v * s,
            g: [self.g[0] * s, self.g[1] * s],
            h: [[self.h[0][0] * s, self.h[0][1] * s], [self.h[1][0] * s, self.h[1][1] * s]],
        }
    }

    pub fn add_const(mut self, s: T) -> Self {
        self.v += s;
        self
    }

    /// `atan2(y, x)` of two jets.
    pub fn atan2(y: Self, x: Self) -> Self {
        let r2 = x.v * x.v + y.v * y.v;
        let r4 = r2 * r2;
        let two = T::lit(2.0);
        let dx = -y.v / r2;
        let dy = x.v / r2;
        let dxx = two * x.v * y.v / r4;
        let dyy = -dxx;
        let dxy = (y.v * y.v - x.v * x.v) / r4;
        let mut out = Self::constant(y.v.atan2(x.v));
        for a in 0..2 {
            out.g[a] = dx * x.g[a] + dy * y.g[a];
        }
        for a in 0..2 {
            for b in 0..2 {
                out.h[a][b] = dx * x.h[a][b]
                    + dy * y.h[a][b]
                    + dxx * x.g[a] * x.g[b]
                    + dyy * y.g[a] * y.g[b]
                    + dxy * (x.g[a] * y.g[b] + y.g[a] * x.g[b]);
            }
        }
        out
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        r.v += o.v;
        for a in 0..2 {
            r.g[a] += o.g[a];
            for b in 0..2 {
                r.h[a][b] += o.h[a][b];
            }
        }
        r
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::constant(self.v * o.v);
        for a in 0..2 {
            r.g[a] = self.g[a] * o.v + self.v * o.g[a];
            for b in 0..2 {
                r.h[a][b] = self.h[a][b] * o.v
                    + self.v * o.h[a][b]
                    + self.g[a] * o.g[b]
                    + self.g[b] * o.g[a];
            }
        }
        r
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}
