//! Truncated bivariate Taylor jets.
//!
//! A [`Jet2`] of order `K` at base point `(u0, v0)` stores the normalized
//! Taylor coefficients `c[i][j] = ∂^{i+j} g / ∂u^i ∂v^j (u0, v0) / (i! j!)`
//! for every `i + j <= K`. Arithmetic is closed under truncation, so every
//! coefficient of a result is the exact Taylor coefficient of the exact
//! operation (up to floating point rounding).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::geom::Vec3;

/// Relative magnitude below which a constant term counts as zero.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by (numerically) zero constant term: |c00| = {magnitude:e}")]
    DivisionByZero { magnitude: f64 },
    #[error("{func} outside its domain at constant term {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("derivative order ({i}, {j}) exceeds jet order {order}")]
    OrderExceeded { i: usize, j: usize, order: usize },
    #[error("not divisible by v^{k}: largest offending coefficient {max_offending:e} (scale {scale:e})")]
    NotDivisible {
        k: usize,
        max_offending: f64,
        scale: f64,
    },
    #[error("jet bases or orders do not match")]
    BaseMismatch,
}

/// Coordinate selector for [`Jet2::lift`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    U,
    V,
}

#[inline]
fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[derive(Clone, PartialEq)]
pub struct Jet2 {
    base: (f64, f64),
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet2(base={:?}, order={}, [", self.base, self.order)?;
        for d in 0..=self.order {
            if d > 0 {
                write!(f, " |")?;
            }
            for j in 0..=d {
                write!(f, " {:.6e}", self.coeff(d - j, j))?;
            }
        }
        write!(f, " ])")
    }
}

impl Jet2 {
    pub fn constant(value: f64, base: (f64, f64), order: usize) -> Self {
        let mut coeffs = vec![0.0; tri_len(order)];
        coeffs[0] = value;
        Self {
            base,
            order,
            coeffs,
        }
    }

    pub fn zero(base: (f64, f64), order: usize) -> Self {
        Self::constant(0.0, base, order)
    }

    /// Jet of a coordinate function.
    pub fn lift(coord: Coord, base: (f64, f64), order: usize) -> Self {
        let mut jet = match coord {
            Coord::U => Self::constant(base.0, base, order),
            Coord::V => Self::constant(base.1, base, order),
        };
        if order >= 1 {
            match coord {
                Coord::U => jet.coeffs[idx(1, 0)] = 1.0,
                Coord::V => jet.coeffs[idx(0, 1)] = 1.0,
            }
        }
        jet
    }

    /// Builds a jet from a coefficient callback `c(i, j)`.
    pub fn from_fn(base: (f64, f64), order: usize, mut c: impl FnMut(usize, usize) -> f64) -> Self {
        let mut jet = Self::zero(base, order);
        for d in 0..=order {
            for j in 0..=d {
                jet.coeffs[idx(d - j, j)] = c(d - j, j);
            }
        }
        jet
    }

    pub fn base(&self) -> (f64, f64) {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Normalized coefficient `c[i][j]`; zero beyond the order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.coeffs[idx(i, j)]
        }
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `max(1, max |c|)`, the reference magnitude for "vanishes" decisions.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(1.0_f64, |m, c| m.max(c.abs()))
    }

    /// `∂^{i+j}/∂u^i∂v^j` at the base point.
    pub fn partial(&self, i: usize, j: usize) -> Result<f64, JetError> {
        if i + j > self.order {
            return Err(JetError::OrderExceeded {
                i,
                j,
                order: self.order,
            });
        }
        Ok(factorial(i) * factorial(j) * self.coeffs[idx(i, j)])
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self {
            base: self.base,
            order,
            coeffs: self.coeffs[..tri_len(order)].to_vec(),
        }
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.order == other.order && self.base == other.base
    }

    fn check_shape(&self, other: &Self) -> Result<(), JetError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JetError::BaseMismatch)
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        assert!(
            self.same_shape(other),
            "jet shape mismatch: {:?}/{} vs {:?}/{}",
            self.base,
            self.order,
            other.base,
            other.order
        );
        Self {
            base: self.base,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn scale_by(&self, s: f64) -> Self {
        Self {
            base: self.base,
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let k = self.order;
        let mut out = vec![0.0; self.coeffs.len()];
        for d1 in 0..=k {
            for j1 in 0..=d1 {
                let a = self.coeffs[idx(d1 - j1, j1)];
                if a == 0.0 {
                    continue;
                }
                let i1 = d1 - j1;
                for d2 in 0..=(k - d1) {
                    for j2 in 0..=d2 {
                        let b = other.coeffs[idx(d2 - j2, j2)];
                        out[idx(i1 + d2 - j2, j1 + j2)] += a * b;
                    }
                }
            }
        }
        Self {
            base: self.base,
            order: k,
            coeffs: out,
        }
    }

    /// The jet minus its constant term.
    fn increment(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = 0.0;
        out
    }

    /// Composition with a univariate Taylor series `Σ s[k] t^k` about the
    /// constant term: returns the jet of `Σ s[k] (a - a0)^k`.
    pub fn compose_series(&self, series: &[f64]) -> Self {
        let delta = self.increment();
        let top = series.len().min(self.order + 1);
        let mut acc = Self::constant(
            series.get(top.saturating_sub(1)).copied().unwrap_or(0.0),
            self.base,
            self.order,
        );
        for k in (0..top.saturating_sub(1)).rev() {
            acc = acc.mul_unchecked(&delta);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    fn threshold(&self, zero: f64) -> f64 {
        zero * self.scale()
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        self.recip_with(DEFAULT_ZERO_THRESHOLD)
    }

    pub fn recip_with(&self, zero: f64) -> Result<Self, JetError> {
        let x0 = self.value();
        if x0.abs() <= self.threshold(zero) {
            return Err(JetError::DivisionByZero {
                magnitude: x0.abs(),
            });
        }
        let mut series = Vec::with_capacity(self.order + 1);
        let mut term = 1.0 / x0;
        for _ in 0..=self.order {
            series.push(term);
            term *= -1.0 / x0;
        }
        Ok(self.compose_series(&series))
    }

    pub fn div(&self, other: &Self) -> Result<Self, JetError> {
        self.div_with(other, DEFAULT_ZERO_THRESHOLD)
    }

    pub fn div_with(&self, other: &Self, zero: f64) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(&other.recip_with(zero)?))
    }

    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = Self::constant(1.0, self.base, self.order);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(result)
    }

    pub fn apply(&self, func: Analytic) -> Result<Self, JetError> {
        self.apply_with(func, DEFAULT_ZERO_THRESHOLD)
    }

    pub fn apply_with(&self, func: Analytic, zero: f64) -> Result<Self, JetError> {
        let series = func.series(self.value(), self.order, self.threshold(zero))?;
        Ok(self.compose_series(&series))
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        self.apply(Analytic::Sqrt)
    }

    /// `∂/∂u`, order reduced by one (order 0 maps to the zero jet).
    pub fn du(&self) -> Self {
        let order = self.order.saturating_sub(1);
        Self::from_fn(self.base, order, |i, j| {
            if self.order == 0 {
                0.0
            } else {
                (i + 1) as f64 * self.coeff(i + 1, j)
            }
        })
    }

    /// `∂/∂v`, order reduced by one.
    pub fn dv(&self) -> Self {
        let order = self.order.saturating_sub(1);
        Self::from_fn(self.base, order, |i, j| {
            if self.order == 0 {
                0.0
            } else {
                (j + 1) as f64 * self.coeff(i, j + 1)
            }
        })
    }

    /// Jet of `a / v^k` for a jet based on the axis `v0 = 0`.
    ///
    /// Every coefficient with `j < k` must be below `tol * scale`.
    pub fn deflate_v(&self, k: usize, tol: f64) -> Result<Self, JetError> {
        if self.base.1 != 0.0 || k > self.order {
            return Err(JetError::NotDivisible {
                k,
                max_offending: f64::INFINITY,
                scale: self.scale(),
            });
        }
        let scale = self.scale();
        let mut worst = 0.0_f64;
        for d in 0..=self.order {
            for j in 0..k.min(d + 1) {
                worst = worst.max(self.coeff(d - j, j).abs());
            }
        }
        if worst >= tol * scale {
            return Err(JetError::NotDivisible {
                k,
                max_offending: worst,
                scale,
            });
        }
        Ok(Self::from_fn(self.base, self.order - k, |i, j| {
            self.coeff(i, j + k)
        }))
    }

    /// Jet of `a ∘ (su, sv)` at the base of the substitution jets.
    ///
    /// The constant terms of `su`, `sv` must equal this jet's base point.
    pub fn compose(&self, su: &Jet2, sv: &Jet2) -> Result<Self, JetError> {
        if !su.same_shape(sv) {
            return Err(JetError::BaseMismatch);
        }
        let tol = 1e-12 * (1.0 + self.base.0.abs().max(self.base.1.abs()));
        if (su.value() - self.base.0).abs() > tol || (sv.value() - self.base.1).abs() > tol {
            return Err(JetError::BaseMismatch);
        }
        Ok(self.substitute(&su.increment(), &sv.increment()))
    }

    /// `Σ c[i][j] du^i dv^j` truncated to the order of the increments.
    fn substitute(&self, du: &Jet2, dv: &Jet2) -> Self {
        let order = self.order.min(du.order);
        let du = du.truncate(order);
        let dv = dv.truncate(order);
        let base = du.base;
        let mut pow_u = vec![Self::constant(1.0, base, order)];
        let mut pow_v = vec![Self::constant(1.0, base, order)];
        for n in 1..=self.order {
            let next_u = pow_u[n - 1].mul_unchecked(&du);
            let next_v = pow_v[n - 1].mul_unchecked(&dv);
            pow_u.push(next_u);
            pow_v.push(next_v);
        }
        let mut acc = Self::zero(base, order);
        for d in 0..=self.order {
            for j in 0..=d {
                let c = self.coeff(d - j, j);
                if c == 0.0 {
                    continue;
                }
                let term = pow_u[d - j].mul_unchecked(&pow_v[j]);
                for (a, t) in acc.coeffs.iter_mut().zip(&term.coeffs) {
                    *a += c * t;
                }
            }
        }
        acc
    }

    /// Re-expands the truncated Taylor polynomial about `base + (du, dv)`.
    ///
    /// Exact for polynomials of degree `<= order`; otherwise the result
    /// carries the truncation error of the original jet at the offset.
    pub fn recenter(&self, du: f64, dv: f64) -> Self {
        let base = (self.base.0 + du, self.base.1 + dv);
        let mut su = Self::constant(du, base, self.order);
        let mut sv = Self::constant(dv, base, self.order);
        if self.order >= 1 {
            su.coeffs[idx(1, 0)] = 1.0;
            sv.coeffs[idx(0, 1)] = 1.0;
        }
        // Increments with nonzero constant terms: expand the full polynomial.
        let mut acc = Self::zero(base, self.order);
        let mut pow_u = vec![Self::constant(1.0, base, self.order)];
        let mut pow_v = vec![Self::constant(1.0, base, self.order)];
        for n in 1..=self.order {
            let next_u = pow_u[n - 1].mul_unchecked(&su);
            let next_v = pow_v[n - 1].mul_unchecked(&sv);
            pow_u.push(next_u);
            pow_v.push(next_v);
        }
        for d in 0..=self.order {
            for j in 0..=d {
                let c = self.coeff(d - j, j);
                if c == 0.0 {
                    continue;
                }
                let term = pow_u[d - j].mul_unchecked(&pow_v[j]);
                for (a, t) in acc.coeffs.iter_mut().zip(&term.coeffs) {
                    *a += c * t;
                }
            }
        }
        acc
    }

    /// Coefficients `c[i][0]`: the univariate jet along `v = v0`.
    pub fn along_u(&self) -> Vec<f64> {
        (0..=self.order).map(|i| self.coeff(i, 0)).collect()
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        assert!(self.same_shape(rhs), "jet shape mismatch in mul");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale_by(-1.0)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        &self + &rhs
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        &self - &rhs
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        &self * &rhs
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        -&self
    }
}

/// Smooth univariate functions the jet engine can compose with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Analytic {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Analytic {
    pub const ALL: [Analytic; 10] = [
        Analytic::Sin,
        Analytic::Cos,
        Analytic::Tan,
        Analytic::Sinh,
        Analytic::Cosh,
        Analytic::Tanh,
        Analytic::Exp,
        Analytic::Log,
        Analytic::Sqrt,
        Analytic::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analytic::Sin => "sin",
            Analytic::Cos => "cos",
            Analytic::Tan => "tan",
            Analytic::Sinh => "sinh",
            Analytic::Cosh => "cosh",
            Analytic::Tanh => "tanh",
            Analytic::Exp => "exp",
            Analytic::Log => "log",
            Analytic::Sqrt => "sqrt",
            Analytic::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Taylor coefficients of the function about `x0`, up to degree `order`.
    ///
    /// `zero` is the absolute threshold for domain decisions at `x0`.
    pub fn series(self, x0: f64, order: usize, zero: f64) -> Result<Vec<f64>, JetError> {
        let n = order + 1;
        let domain = |func: &'static str| JetError::Domain { func, value: x0 };
        let cyclic = |d: [f64; 4]| -> Vec<f64> {
            (0..n).map(|k| d[k % 4] / factorial(k)).collect()
        };
        let series = match self {
            Analytic::Sin => {
                let (s, c) = x0.sin_cos();
                cyclic([s, c, -s, -c])
            }
            Analytic::Cos => {
                let (s, c) = x0.sin_cos();
                cyclic([c, -s, -c, s])
            }
            Analytic::Sinh => {
                let (s, c) = (x0.sinh(), x0.cosh());
                cyclic([s, c, s, c])
            }
            Analytic::Cosh => {
                let (s, c) = (x0.sinh(), x0.cosh());
                cyclic([c, s, c, s])
            }
            Analytic::Exp => {
                let e = x0.exp();
                (0..n).map(|k| e / factorial(k)).collect()
            }
            Analytic::Log => {
                if x0 <= zero {
                    return Err(domain("log"));
                }
                let mut out = vec![x0.ln()];
                let mut p = 1.0;
                for k in 1..n {
                    p /= x0;
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    out.push(sign * p / k as f64);
                }
                out
            }
            Analytic::Sqrt => {
                if x0 <= zero {
                    return Err(domain("sqrt"));
                }
                let s0 = x0.sqrt();
                let mut out = Vec::with_capacity(n);
                let mut binom = 1.0;
                let mut p = 1.0;
                for k in 0..n {
                    if k > 0 {
                        binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
                        p /= x0;
                    }
                    out.push(s0 * binom * p);
                }
                out
            }
            Analytic::Tan => {
                let sin = Analytic::Sin.series(x0, order, zero)?;
                let cos = Analytic::Cos.series(x0, order, zero)?;
                if cos[0].abs() <= zero {
                    return Err(domain("tan"));
                }
                series_div(&sin, &cos)
            }
            Analytic::Tanh => {
                let sinh = Analytic::Sinh.series(x0, order, zero)?;
                let cosh = Analytic::Cosh.series(x0, order, zero)?;
                series_div(&sinh, &cosh)
            }
            Analytic::Atan => {
                // atan' = 1 / (1 + x^2), integrated termwise.
                let mut q = vec![0.0; n];
                q[0] = 1.0 + x0 * x0;
                if n > 1 {
                    q[1] = 2.0 * x0;
                }
                if n > 2 {
                    q[2] = 1.0;
                }
                let mut one = vec![0.0; n];
                one[0] = 1.0;
                let r = series_div(&one, &q);
                let mut out = vec![x0.atan()];
                for k in 1..n {
                    out.push(r[k - 1] / k as f64);
                }
                out
            }
        };
        Ok(series)
    }

    /// Plain floating point evaluation with the same domain rules as jets.
    pub fn eval_f64(self, x: f64, zero: f64) -> Result<f64, JetError> {
        Ok(self.series(x, 0, zero)?[0])
    }
}

/// Univariate power-series quotient `a / b` (same length, `b[0] != 0`).
fn series_div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut c = vec![0.0; n];
    for k in 0..n {
        let mut acc = a[k];
        for i in 1..=k {
            acc -= b[i] * c[k - i];
        }
        c[k] = acc / b[0];
    }
    c
}

/// Component-wise jets of an `R^3`-valued map.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVec3 {
    comps: [Jet2; 3],
}

impl JetVec3 {
    pub fn new(x: Jet2, y: Jet2, z: Jet2) -> Result<Self, JetError> {
        x.check_shape(&y)?;
        x.check_shape(&z)?;
        Ok(Self { comps: [x, y, z] })
    }

    pub fn constant(v: Vec3, base: (f64, f64), order: usize) -> Self {
        Self {
            comps: v.0.map(|c| Jet2::constant(c, base, order)),
        }
    }

    pub fn comps(&self) -> &[Jet2; 3] {
        &self.comps
    }

    pub fn base(&self) -> (f64, f64) {
        self.comps[0].base
    }

    pub fn order(&self) -> usize {
        self.comps[0].order
    }

    pub fn value(&self) -> Vec3 {
        Vec3([self.comps[0].value(), self.comps[1].value(), self.comps[2].value()])
    }

    /// Vector of normalized coefficients `c[i][j]`.
    pub fn coeff(&self, i: usize, j: usize) -> Vec3 {
        Vec3([
            self.comps[0].coeff(i, j),
            self.comps[1].coeff(i, j),
            self.comps[2].coeff(i, j),
        ])
    }

    /// Vector of partial derivatives at the base point.
    pub fn partial(&self, i: usize, j: usize) -> Result<Vec3, JetError> {
        Ok(Vec3([
            self.comps[0].partial(i, j)?,
            self.comps[1].partial(i, j)?,
            self.comps[2].partial(i, j)?,
        ]))
    }

    pub fn map(&self, f: impl Fn(&Jet2) -> Jet2) -> Self {
        Self {
            comps: [f(&self.comps[0]), f(&self.comps[1]), f(&self.comps[2])],
        }
    }

    pub fn try_map(&self, f: impl Fn(&Jet2) -> Result<Jet2, JetError>) -> Result<Self, JetError> {
        Ok(Self {
            comps: [f(&self.comps[0])?, f(&self.comps[1])?, f(&self.comps[2])?],
        })
    }

    pub fn du(&self) -> Self {
        self.map(Jet2::du)
    }

    pub fn dv(&self) -> Self {
        self.map(Jet2::dv)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|c| c.truncate(order))
    }

    pub fn recenter(&self, du: f64, dv: f64) -> Self {
        self.map(|c| c.recenter(du, dv))
    }

    pub fn compose(&self, su: &Jet2, sv: &Jet2) -> Result<Self, JetError> {
        self.try_map(|c| c.compose(su, sv))
    }

    /// Deflation by `v^k`; fails if any component is not divisible.
    pub fn deflate_v(&self, k: usize, tol: f64) -> Result<Self, JetError> {
        // Divisibility is judged against the scale of the whole vector.
        let scale = self.comps.iter().fold(1.0_f64, |m, c| m.max(c.scale()));
        let rel = |c: &Jet2| tol * scale / c.scale();
        self.try_map(|c| c.deflate_v(k, rel(c)))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            comps: [
                &self.comps[0] + &o.comps[0],
                &self.comps[1] + &o.comps[1],
                &self.comps[2] + &o.comps[2],
            ],
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            comps: [
                &self.comps[0] - &o.comps[0],
                &self.comps[1] - &o.comps[1],
                &self.comps[2] - &o.comps[2],
            ],
        }
    }

    pub fn scale_by(&self, s: f64) -> Self {
        self.map(|c| c.scale_by(s))
    }

    /// Multiplication by a scalar jet.
    pub fn mul_scalar(&self, s: &Jet2) -> Self {
        self.map(|c| c * s)
    }

    pub fn dot(&self, o: &Self) -> Jet2 {
        let mut acc = &self.comps[0] * &o.comps[0];
        acc = &acc + &(&self.comps[1] * &o.comps[1]);
        &acc + &(&self.comps[2] * &o.comps[2])
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a, b, c] = &self.comps;
        let [x, y, z] = &o.comps;
        Self {
            comps: [&(b * z) - &(c * y), &(c * x) - &(a * z), &(a * y) - &(b * x)],
        }
    }

    pub fn norm(&self) -> Result<Jet2, JetError> {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Result<Self, JetError> {
        let inv = self.norm()?.recip()?;
        Ok(self.mul_scalar(&inv))
    }
}

/// Jet of `det(a, b, c)`.
pub fn det3_jet(a: &JetVec3, b: &JetVec3, c: &JetVec3) -> Jet2 {
    a.dot(&b.cross(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn u(base: (f64, f64), k: usize) -> Jet2 {
        Jet2::lift(Coord::U, base, k)
    }
    fn v(base: (f64, f64), k: usize) -> Jet2 {
        Jet2::lift(Coord::V, base, k)
    }

    #[test]
    fn lift_coordinates() {
        let a = u((1.0, 2.0), 3);
        assert_eq!(a.len(), 10);
        assert_eq!(a.coeff(0, 0), 1.0);
        assert_eq!(a.coeff(1, 0), 1.0);
        assert_eq!(a.coeff(0, 1), 0.0);
        let b = v((0.0, 0.0), 2);
        assert_eq!(b.coeff(0, 0), 0.0);
        assert_eq!(b.coeff(0, 1), 1.0);
        assert_eq!(b.coeff(1, 0), 0.0);
        let c = u((0.0, 0.0), 0);
        assert_eq!(c.len(), 1);
        assert_eq!(c.value(), 0.0);
    }

    #[test]
    fn product_of_coordinates() {
        let base = (1.0, 2.0);
        let p = &u(base, 2) * &v(base, 2);
        assert_eq!(p.coeff(0, 0), 2.0);
        assert_eq!(p.coeff(1, 0), 2.0);
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 1.0);
        assert_eq!(p.coeff(2, 0), 0.0);
        assert_eq!(p.coeff(0, 2), 0.0);
    }

    #[test]
    fn exact_cancellation_in_division() {
        let base = (3.0, 0.0);
        let x = u(base, 4);
        let q = (&x * &x).div(&x).unwrap();
        assert_relative_eq!(q.coeff(0, 0), 3.0, epsilon = 1e-14);
        assert_relative_eq!(q.coeff(1, 0), 1.0, epsilon = 1e-14);
        for d in 2..=4 {
            for j in 0..=d {
                assert!(q.coeff(d - j, j).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn division_by_zero_reports_magnitude() {
        let x = u((0.0, 0.0), 2);
        match Jet2::constant(1.0, (0.0, 0.0), 2).div(&x) {
            Err(JetError::DivisionByZero { magnitude }) => assert_eq!(magnitude, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sine_series() {
        let s = v((0.0, 0.0), 4).apply(Analytic::Sin).unwrap();
        assert_eq!(s.coeff(0, 1), 1.0);
        assert_relative_eq!(s.coeff(0, 3), -1.0 / 6.0, epsilon = 1e-15);
        for j in [0, 2, 4] {
            assert_eq!(s.coeff(0, j), 0.0);
        }
    }

    #[test]
    fn sqrt_binomial_series() {
        let a = u((0.0, 0.0), 2).add_scalar(1.0);
        let s = a.sqrt().unwrap();
        assert_relative_eq!(s.coeff(0, 0), 1.0);
        assert_relative_eq!(s.coeff(1, 0), 0.5);
        assert_relative_eq!(s.coeff(2, 0), -0.125);
    }

    #[test]
    fn cosh_of_log_matches_rational_form() {
        let base = (2.0, 0.0);
        let x = u(base, 3);
        let lhs = x.apply(Analytic::Log).unwrap().apply(Analytic::Cosh).unwrap();
        let rhs = (&x + &x.recip().unwrap()).scale_by(0.5);
        for i in 0..=3 {
            assert_relative_eq!(lhs.coeff(i, 0), rhs.coeff(i, 0), epsilon = 1e-14);
        }
    }

    #[test]
    fn partials_of_monomials() {
        let base = (0.0, 0.0);
        let m = &u(base, 5).powi(2).unwrap() * &v(base, 5).powi(3).unwrap();
        assert_eq!(m.partial(2, 3).unwrap(), 12.0);
        let s = (&u(base, 3) + &v(base, 3)).apply(Analytic::Sin).unwrap();
        assert_eq!(s.partial(1, 1).unwrap(), 0.0);
        assert!(matches!(
            s.partial(2, 2),
            Err(JetError::OrderExceeded { .. })
        ));
    }

    #[test]
    fn deflation() {
        let base = (0.0, 0.0);
        let a = &v(base, 4) * &(u(base, 4).scale_by(3.0).add_scalar(2.0));
        let d = a.deflate_v(1, 1e-10).unwrap();
        assert_eq!(d.order(), 3);
        assert_eq!(d.coeff(0, 0), 2.0);
        assert_eq!(d.coeff(1, 0), 3.0);
        assert_eq!(d.coeff(0, 1), 0.0);
        let bad = &u(base, 3) + &v(base, 3);
        match bad.deflate_v(1, 1e-10) {
            Err(JetError::NotDivisible { max_offending, .. }) => assert_eq!(max_offending, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn composition_examples() {
        let base = (0.0, 0.0);
        let a = u(base, 4).powi(2).unwrap();
        let s = u(base, 4).scale_by(2.0);
        let t = v(base, 4);
        let c = a.compose(&s, &t).unwrap();
        assert_eq!(c.coeff(2, 0), 4.0);
        assert_eq!(c.coeff(0, 0), 0.0);

        let uv = &u(base, 4) * &v(base, 4);
        let shear = &u(base, 4) + &v(base, 4).powi(2).unwrap().scale_by(0.5);
        let c = uv.compose(&shear, &t).unwrap();
        assert_eq!(c.coeff(1, 1), 1.0);
        assert_eq!(c.coeff(0, 3), 0.5);
        assert_eq!(c.coeff(2, 0), 0.0);

        let off = u((1.0, 0.0), 4);
        assert!(matches!(a.compose(&off, &t), Err(JetError::BaseMismatch)));
    }

    #[test]
    fn recenter_polynomial_is_exact() {
        let base = (0.0, 0.0);
        let x = u(base, 3);
        let y = v(base, 3);
        let p = &(&x * &y) + &y.powi(3).unwrap();
        let q = p.recenter(0.5, -0.25);
        // p(0.5+s, -0.25+t) = (0.5+s)(-0.25+t) + (-0.25+t)^3
        assert_relative_eq!(q.coeff(0, 0), -0.125 - 0.015625, epsilon = 1e-15);
        assert_relative_eq!(q.coeff(1, 0), -0.25, epsilon = 1e-15);
        assert_relative_eq!(q.coeff(0, 1), 0.5 + 3.0 * 0.0625, epsilon = 1e-15);
        assert_relative_eq!(q.coeff(0, 2), -0.75, epsilon = 1e-15);
    }

    #[test]
    fn series_domain_errors() {
        assert!(matches!(
            Analytic::Log.eval_f64(-1.0, 1e-10),
            Err(JetError::Domain { func: "log", .. })
        ));
        assert!(Analytic::Sqrt.eval_f64(0.0, 1e-10).is_err());
        assert_relative_eq!(Analytic::Atan.eval_f64(1.0, 1e-10).unwrap(), std::f64::consts::FRAC_PI_4);
    }
}
