//! Order-2 jets: scalars carrying value, gradient, and symmetric Hessian
//! with respect to a fixed set of seeded coordinates.
//!
//! Everything the geometric pipeline differentiates goes through this type,
//! so derivative order is capped at two: the deepest consumers need second
//! partials of the framing entries (linear curvature) and of the inverse
//! frame (metric curvature), never third ones.

use crate::error::{Error, Result};

/// Elementary functions available to expressions and jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemFunc {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Atan,
}

impl ElemFunc {
    pub const ALL: [ElemFunc; 10] = [
        ElemFunc::Sin,
        ElemFunc::Cos,
        ElemFunc::Tan,
        ElemFunc::Exp,
        ElemFunc::Log,
        ElemFunc::Sqrt,
        ElemFunc::Sinh,
        ElemFunc::Cosh,
        ElemFunc::Tanh,
        ElemFunc::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElemFunc::Sin => "sin",
            ElemFunc::Cos => "cos",
            ElemFunc::Tan => "tan",
            ElemFunc::Exp => "exp",
            ElemFunc::Log => "log",
            ElemFunc::Sqrt => "sqrt",
            ElemFunc::Sinh => "sinh",
            ElemFunc::Cosh => "cosh",
            ElemFunc::Tanh => "tanh",
            ElemFunc::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<ElemFunc> {
        ElemFunc::ALL.iter().copied().find(|f| f.name() == name)
    }

    /// Plain value evaluation with domain checks.
    pub fn eval(self, v: f64) -> Result<f64> {
        match self {
            ElemFunc::Sin => Ok(v.sin()),
            ElemFunc::Cos => Ok(v.cos()),
            ElemFunc::Tan => Ok(v.tan()),
            ElemFunc::Exp => Ok(v.exp()),
            ElemFunc::Log => {
                if v <= 0.0 {
                    Err(Error::DomainError { func: "log", value: v })
                } else {
                    Ok(v.ln())
                }
            }
            ElemFunc::Sqrt => {
                if v < 0.0 {
                    Err(Error::DomainError { func: "sqrt", value: v })
                } else {
                    Ok(v.sqrt())
                }
            }
            ElemFunc::Sinh => Ok(v.sinh()),
            ElemFunc::Cosh => Ok(v.cosh()),
            ElemFunc::Tanh => Ok(v.tanh()),
            ElemFunc::Atan => Ok(v.atan()),
        }
    }

    /// Value together with first and second derivative at `v`.
    ///
    /// `sqrt` additionally rejects `v == 0` because its derivatives blow up
    /// there; plain value evaluation accepts it.
    fn derivatives(self, v: f64) -> Result<(f64, f64, f64)> {
        match self {
            ElemFunc::Sin => Ok((v.sin(), v.cos(), -v.sin())),
            ElemFunc::Cos => Ok((v.cos(), -v.sin(), -v.cos())),
            ElemFunc::Tan => {
                let t = v.tan();
                let sec2 = 1.0 + t * t;
                Ok((t, sec2, 2.0 * t * sec2))
            }
            ElemFunc::Exp => {
                let e = v.exp();
                Ok((e, e, e))
            }
            ElemFunc::Log => {
                if v <= 0.0 {
                    return Err(Error::DomainError { func: "log", value: v });
                }
                Ok((v.ln(), 1.0 / v, -1.0 / (v * v)))
            }
            ElemFunc::Sqrt => {
                if v <= 0.0 {
                    return Err(Error::DomainError { func: "sqrt", value: v });
                }
                let s = v.sqrt();
                Ok((s, 0.5 / s, -0.25 / (s * v)))
            }
            ElemFunc::Sinh => Ok((v.sinh(), v.cosh(), v.sinh())),
            ElemFunc::Cosh => Ok((v.cosh(), v.sinh(), v.cosh())),
            ElemFunc::Tanh => {
                let t = v.tanh();
                let sech2 = 1.0 - t * t;
                Ok((t, sech2, -2.0 * t * sech2))
            }
            ElemFunc::Atan => {
                let d = 1.0 + v * v;
                Ok((v.atan(), 1.0 / d, -2.0 * v / (d * d)))
            }
        }
    }
}

/// Scalar abstraction so expressions evaluate identically over plain reals
/// and over jets. The provided methods (`powi`, `pow`) are shared verbatim,
/// which keeps the value parts of both instantiations bit-identical.
pub trait Scalar: Clone {
    fn value(&self) -> f64;
    /// A constant of the same jet dimension as `self`.
    fn constant_like(&self, v: f64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, rhs: &Self) -> Result<Self>;
    fn apply(&self, f: ElemFunc) -> Result<Self>;

    /// Integer power by repeated multiplication; negative exponents divide one
    /// by the positive power.
    fn powi(&self, n: i32) -> Result<Self> {
        let m = n.unsigned_abs();
        let mut acc = self.constant_like(1.0);
        for _ in 0..m {
            acc = acc.mul(self);
        }
        if n < 0 {
            self.constant_like(1.0).div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// General power via exp/log; requires a positive base.
    fn pow(&self, rhs: &Self) -> Result<Self> {
        if self.value() <= 0.0 {
            return Err(Error::DomainError { func: "pow", value: self.value() });
        }
        self.apply(ElemFunc::Log)?.mul(rhs).apply(ElemFunc::Exp)
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn constant_like(&self, v: f64) -> Self {
        v
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn apply(&self, f: ElemFunc) -> Result<Self> {
        f.eval(*self)
    }
}

/// A scalar with value, gradient, and symmetric Hessian over `dim` seeded
/// coordinates. The Hessian is stored dense row-major; only the lower
/// triangle is ever computed and it is mirrored, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64, dim: usize) -> Jet2 {
        Jet2 { value, grad: vec![0.0; dim], hess: vec![0.0; dim * dim] }
    }

    /// A coordinate lift: unit derivative along `seed`, zero elsewhere.
    pub fn coordinate(value: f64, seed: usize, dim: usize) -> Result<Jet2> {
        if seed >= dim {
            return Err(Error::SeedOutOfRange { seed, dim });
        }
        let mut j = Jet2::constant(value, dim);
        j.grad[seed] = 1.0;
        Ok(j)
    }

    /// Lift a value as a constant (`seed = None`) or a coordinate.
    pub fn lift(value: f64, seed: Option<usize>, dim: usize) -> Result<Jet2> {
        match seed {
            None => Ok(Jet2::constant(value, dim)),
            Some(k) => Jet2::coordinate(value, k, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, k: usize) -> f64 {
        self.grad[k]
    }

    pub fn hess(&self, a: usize, b: usize) -> f64 {
        self.hess[a * self.dim() + b]
    }

    pub fn grad_slice(&self) -> &[f64] {
        &self.grad
    }

    /// Treat the k-th first derivative as a new scalar carrying its own
    /// gradient (taken from this jet's Hessian row). The result's Hessian
    /// is zeroed: it would need third derivatives, which are out of scope,
    /// so downstream consumers must only read value and gradient.
    pub fn derivative_jet(&self, k: usize) -> Jet2 {
        let d = self.dim();
        let mut out = Jet2::constant(self.grad[k], d);
        for r in 0..d {
            out.grad[r] = self.hess(k, r);
        }
        out
    }

    fn zip(&self, rhs: &Jet2, combine: impl Fn(f64, f64) -> f64) -> Jet2 {
        debug_assert_eq!(self.dim(), rhs.dim());
        Jet2 {
            value: combine(self.value, rhs.value),
            grad: self
                .grad
                .iter()
                .zip(&rhs.grad)
                .map(|(a, b)| combine(*a, *b))
                .collect(),
            hess: self
                .hess
                .iter()
                .zip(&rhs.hess)
                .map(|(a, b)| combine(*a, *b))
                .collect(),
        }
    }
}

impl Scalar for Jet2 {
    fn value(&self) -> f64 {
        self.value
    }

    fn constant_like(&self, v: f64) -> Self {
        Jet2::constant(v, self.dim())
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim(), rhs.dim());
        let d = self.dim();
        let mut out = Jet2::constant(self.value * rhs.value, d);
        for p in 0..d {
            out.grad[p] = self.grad[p] * rhs.value + self.value * rhs.grad[p];
        }
        for p in 0..d {
            for q in 0..=p {
                let h = self.hess(p, q) * rhs.value
                    + self.grad[p] * rhs.grad[q]
                    + self.grad[q] * rhs.grad[p]
                    + self.value * rhs.hess(p, q);
                out.hess[p * d + q] = h;
                out.hess[q * d + p] = h;
            }
        }
        out
    }

    fn neg(&self) -> Self {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        debug_assert_eq!(self.dim(), rhs.dim());
        if rhs.value == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let d = self.dim();
        // q = a/b: from a = q b,
        //   q' = (a' - q b') / b
        //   q'' = (a'' - q' b' - q' b' - q b'') / b   (index-symmetric form)
        let q = self.value / rhs.value;
        let mut out = Jet2::constant(q, d);
        for p in 0..d {
            out.grad[p] = (self.grad[p] - q * rhs.grad[p]) / rhs.value;
        }
        for p in 0..d {
            for q_ix in 0..=p {
                let h = (self.hess(p, q_ix)
                    - out.grad[p] * rhs.grad[q_ix]
                    - out.grad[q_ix] * rhs.grad[p]
                    - q * rhs.hess(p, q_ix))
                    / rhs.value;
                out.hess[p * d + q_ix] = h;
                out.hess[q_ix * d + p] = h;
            }
        }
        Ok(out)
    }

    fn apply(&self, f: ElemFunc) -> Result<Self> {
        let (fv, f1, f2) = f.derivatives(self.value)?;
        let d = self.dim();
        let mut out = Jet2::constant(fv, d);
        for p in 0..d {
            out.grad[p] = f1 * self.grad[p];
        }
        for p in 0..d {
            for q in 0..=p {
                let h = f2 * self.grad[p] * self.grad[q] + f1 * self.hess(p, q);
                out.hess[p * d + q] = h;
                out.hess[q * d + p] = h;
            }
        }
        Ok(out)
    }
}

/// A square matrix of jets, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMatrix {
    n: usize,
    data: Vec<Jet2>,
}

impl JetMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet2) -> JetMatrix {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        JetMatrix { n, data }
    }

    pub fn identity(n: usize, jet_dim: usize) -> JetMatrix {
        JetMatrix::from_fn(n, |i, j| {
            Jet2::constant(if i == j { 1.0 } else { 0.0 }, jet_dim)
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet2 {
        &self.data[i * self.n + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Jet2 {
        &mut self.data[i * self.n + j]
    }

    /// Row-major value parts.
    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(|j| j.value()).collect()
    }

    pub fn mul(&self, rhs: &JetMatrix) -> JetMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        JetMatrix::from_fn(n, |i, j| {
            let mut acc = self.get(i, 0).mul(rhs.get(0, j));
            for a in 1..n {
                acc = acc.add(&self.get(i, a).mul(rhs.get(a, j)));
            }
            acc
        })
    }

    /// Inverse over the jet ring by Gauss-Jordan elimination, pivoting on the
    /// value magnitude. A pivot below 1e-12 means the value part is singular.
    pub fn inverse(&self) -> Result<JetMatrix> {
        const PIVOT_THRESHOLD: f64 = 1e-12;
        let n = self.n;
        let jet_dim = if n > 0 { self.data[0].dim() } else { 0 };
        let mut a = self.clone();
        let mut inv = JetMatrix::identity(n, jet_dim);

        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = a.get(col, col).value().abs();
            for r in (col + 1)..n {
                let mag = a.get(r, col).value().abs();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = r;
                }
            }
            if pivot_mag < PIVOT_THRESHOLD {
                return Err(Error::SingularMatrix);
            }
            if pivot_row != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot_row * n + j);
                    inv.data.swap(col * n + j, pivot_row * n + j);
                }
            }
            let pivot = a.get(col, col).clone();
            for j in 0..n {
                *a.get_mut(col, j) = a.get(col, j).div(&pivot)?;
                *inv.get_mut(col, j) = inv.get(col, j).div(&pivot)?;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.value() == 0.0
                    && factor.grad.iter().all(|g| *g == 0.0)
                    && factor.hess.iter().all(|h| *h == 0.0)
                {
                    continue;
                }
                for j in 0..n {
                    let delta = factor.mul(a.get(col, j));
                    *a.get_mut(r, j) = a.get(r, j).sub(&delta);
                    let delta_inv = factor.mul(inv.get(col, j));
                    *inv.get_mut(r, j) = inv.get(r, j).sub(&delta_inv);
                }
            }
        }
        Ok(inv)
    }
}
