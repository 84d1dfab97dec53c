//! Truncated multivariate power series ("jets") with dense, ranked storage.

mod matrix;
mod scalar;
mod series;
mod space;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

pub use matrix::JetMatrix;
pub use scalar::{format_rational, parse_rational, Coeff, ExactComplex, Mode};
pub use series::{PowerTable, Series};
pub use space::{Space, MAX_VARS};

use crate::error::JetError;

/// A power series in the variables of `space`, truncated at total degree
/// `space.order()`. Absent coefficients are zero.
#[derive(Clone)]
pub struct Jet<C> {
    space: Arc<Space>,
    coeffs: Vec<C>,
}

impl<C: Coeff> Jet<C> {
    pub fn zero(space: &Arc<Space>) -> Self {
        Jet {
            space: space.clone(),
            coeffs: vec![C::zero(); space.len()],
        }
    }

    pub fn constant(space: &Arc<Space>, c: C) -> Self {
        let mut j = Self::zero(space);
        j.coeffs[0] = c;
        j
    }

    pub fn one(space: &Arc<Space>) -> Self {
        Self::constant(space, C::one())
    }

    /// The coordinate function of variable `v`.
    pub fn var(space: &Arc<Space>, v: usize) -> Self {
        let mut j = Self::zero(space);
        if space.order() >= 1 {
            let mut e = vec![0u8; space.nvars()];
            e[v] = 1;
            j.coeffs[space.index_of(&e).expect("degree-one monomial")] = C::one();
        }
        j
    }

    pub fn var_named(space: &Arc<Space>, name: &str) -> Result<Self, JetError> {
        let v = space
            .var_index(name)
            .ok_or_else(|| JetError::UnknownVariable(name.into()))?;
        Ok(Self::var(space, v))
    }

    /// Single monomial `c * vars^exp`; dropped if above the truncation order.
    pub fn monomial(space: &Arc<Space>, exp: &[u8], c: C) -> Self {
        let mut j = Self::zero(space);
        if let Some(i) = space.index_of(exp) {
            j.coeffs[i] = c;
        }
        j
    }

    /// Build from a dense coefficient vector in rank order.
    pub fn from_coeffs(space: &Arc<Space>, coeffs: Vec<C>) -> Result<Self, JetError> {
        if coeffs.len() != space.len() {
            return Err(JetError::Shape(format!(
                "{} coefficients for a space of {} monomials",
                coeffs.len(),
                space.len()
            )));
        }
        Ok(Jet {
            space: space.clone(),
            coeffs,
        })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: &[u8]) -> C {
        self.space
            .index_of(exp)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(C::zero)
    }

    pub fn set_coeff(&mut self, exp: &[u8], c: C) -> Result<(), JetError> {
        let i = self
            .space
            .index_of(exp)
            .ok_or_else(|| JetError::Shape(format!("exponent {exp:?} outside the space")))?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.space.exponent(i), c))
    }

    fn check(&self, other: &Self) -> Result<(), JetError> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(JetError::SpaceMismatch {
                left: format!("{:?}", self.space),
                right: format!("{:?}", other.space),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip_with(other, C::add))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check(other)?;
        Ok(self.zip_with(other, C::sub))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f(a, b))
            .collect();
        Jet {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Convert to another coefficient field.
    pub fn convert<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Jet<D> {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn to_binary64(&self) -> Jet<num_complex::Complex64> {
        self.convert(C::to_c64)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        self.map(|a| if a.is_zero() { C::zero() } else { a.mul(c) })
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.map(|a| {
            if a.is_zero() {
                C::zero()
            } else {
                a.scale_i64(k)
            }
        })
    }

    pub fn conj(&self) -> Self {
        self.map(C::conj)
    }

    /// Coefficient-wise real part.
    pub fn re(&self) -> Self {
        self.map(C::re)
    }

    /// Coefficient-wise imaginary part.
    pub fn im(&self) -> Self {
        self.map(C::im)
    }

    /// `self += a * b` over the truncated product.
    pub fn add_product(&mut self, a: &Self, b: &Self) -> Result<(), JetError> {
        self.check(a)?;
        self.check(b)?;
        let table = self.space.products();
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for &(j, k) in &table.pairs[table.offsets[i]..table.offsets[i + 1]] {
                let bj = &b.coeffs[j as usize];
                if !bj.is_zero() {
                    self.coeffs[k as usize].add_mul(ai, bj);
                }
            }
        }
        Ok(())
    }

    /// Truncated Cauchy product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, JetError> {
        let mut out = Self::zero(&self.space);
        out.add_product(self, other)?;
        Ok(out)
    }

    /// Formal partial derivative in variable index `v`. The result is stored
    /// at the same order; its top-degree coefficients are zero.
    pub fn diff(&self, v: usize) -> Self {
        let mut out = Self::zero(&self.space);
        if v >= self.space.nvars() {
            return out;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some(j) = self.space.lower(v, i) {
                let e = self.space.exponent(i)[v] as i64;
                out.coeffs[j] = c.scale_i64(e);
            }
        }
        out
    }

    pub fn diff_named(&self, name: &str) -> Result<Self, JetError> {
        let v = self
            .space
            .var_index(name)
            .ok_or_else(|| JetError::UnknownVariable(name.into()))?;
        Ok(self.diff(v))
    }

    /// Multiply by variable `v` (dropping terms pushed above the order).
    pub fn mul_var(&self, v: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some(j) = self.space.raise(v, i) {
                out.coeffs[j] = c.clone();
            }
        }
        out
    }

    pub fn mul_var_pow(&self, v: usize, m: usize) -> Self {
        (0..m).fold(self.clone(), |acc, _| acc.mul_var(v))
    }

    /// Zero every coefficient of total degree above `k`.
    pub fn truncated(&self, k: usize) -> Self {
        let keep = self.space.count_upto(k);
        let mut out = self.clone();
        for c in &mut out.coeffs[keep..] {
            *c = C::zero();
        }
        out
    }

    /// Keep only the terms whose exponent satisfies `pred`.
    pub fn filter(&self, pred: impl Fn(&[u8]) -> bool) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if !c.is_zero() && !pred(self.space.exponent(i)) {
                *c = C::zero();
            }
        }
        out
    }

    /// Rewrite each nonzero coefficient as a function of its exponent.
    pub fn map_terms(&self, f: impl Fn(&[u8], &C) -> C) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if !c.is_zero() {
                *c = f(self.space.exponent(i), c);
            }
        }
        out
    }

    /// Set the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[usize]) -> Self {
        self.filter(|e| vars.iter().all(|&v| e[v] == 0))
    }

    /// The coefficient of `var^m`, as a jet free of `var`.
    pub fn coefficient_of_power(&self, v: usize, m: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() || self.space.exponent(i)[v] as usize != m {
                continue;
            }
            let mut e = self.space.exponent(i).to_vec();
            e[v] = 0;
            let j = self
                .space
                .index_of(&e)
                .expect("lower degree monomial exists");
            out.coeffs[j] = c.clone();
        }
        out
    }

    /// Re-express a jet in a space whose variables include all of ours
    /// (`map[k]` = index in `target` of our variable `k`). Terms above the
    /// target order are dropped.
    pub fn embed(&self, target: &Arc<Space>, map: &[usize]) -> Result<Self, JetError> {
        if map.len() != self.space.nvars() {
            return Err(JetError::Arity {
                expected: self.space.nvars(),
                got: map.len(),
            });
        }
        let mut out = Self::zero(target);
        let mut e = vec![0u8; target.nvars()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            e.iter_mut().for_each(|x| *x = 0);
            for (k, &p) in self.space.exponent(i).iter().enumerate() {
                e[map[k]] += p;
            }
            if let Some(j) = target.index_of(&e) {
                out.coeffs[j] = c.clone();
            }
        }
        Ok(out)
    }

    /// Largest `abs_max` over all coefficients.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(C::abs_max).fold(0.0, f64::max)
    }

    /// Largest `abs_max` over coefficients of total degree `<= k`.
    pub fn max_abs_upto(&self, k: usize) -> f64 {
        self.coeffs[..self.space.count_upto(k)]
            .iter()
            .map(C::abs_max)
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part magnitude.
    pub fn max_imag(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.im().abs_max())
            .fold(0.0, f64::max)
    }

    /// Evaluate the truncated polynomial at a point by nested Horner
    /// evaluation, one variable at a time.
    pub fn eval(&self, point: &[C]) -> Result<C, JetError> {
        if point.len() != self.space.nvars() {
            return Err(JetError::Arity {
                expected: self.space.nvars(),
                got: point.len(),
            });
        }
        let terms: Vec<(&[u8], &C)> = self.terms().collect();
        Ok(horner(&terms, 0, point))
    }

    /// Evaluate by summing monomials one at a time.
    pub fn eval_naive(&self, point: &[C]) -> Result<C, JetError> {
        if point.len() != self.space.nvars() {
            return Err(JetError::Arity {
                expected: self.space.nvars(),
                got: point.len(),
            });
        }
        let mut acc = C::zero();
        for (exp, c) in self.terms() {
            let mut m = c.clone();
            for (p, &e) in point.iter().zip(exp) {
                for _ in 0..e {
                    m = m.mul(p);
                }
            }
            acc = acc.add(&m);
        }
        Ok(acc)
    }
}

fn horner<C: Coeff>(terms: &[(&[u8], &C)], var: usize, point: &[C]) -> C {
    if terms.is_empty() {
        return C::zero();
    }
    if var == point.len() {
        return terms.iter().fold(C::zero(), |acc, (_, c)| acc.add(c));
    }
    let top = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0);
    let mut acc = C::zero();
    for p in (0..=top).rev() {
        let group: Vec<(&[u8], &C)> = terms.iter().filter(|(e, _)| e[var] == p).copied().collect();
        acc = acc.mul(&point[var]).add(&horner(&group, var + 1, point));
    }
    acc
}

impl<C: Coeff> PartialEq for Jet<C> {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.coeffs == other.coeffs
    }
}

impl<C: Coeff> fmt::Debug for Jet<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                list.entry(&self.space.monomial_string(i), c);
            }
        }
        list.finish()
    }
}

// Operator forms panic on a space mismatch, like shape errors in array
// libraries; the `checked_*` methods return the error instead.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<C: Coeff> $tr<&Jet<C>> for &Jet<C> {
            type Output = Jet<C>;
            fn $method(self, rhs: &Jet<C>) -> Jet<C> {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<C: Coeff> $tr<Jet<C>> for Jet<C> {
            type Output = Jet<C>;
            fn $method(self, rhs: Jet<C>) -> Jet<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coeff> $tr<&Jet<C>> for Jet<C> {
            type Output = Jet<C>;
            fn $method(self, rhs: &Jet<C>) -> Jet<C> {
                (&self).$method(rhs)
            }
        }
        impl<C: Coeff> $tr<Jet<C>> for &Jet<C> {
            type Output = Jet<C>;
            fn $method(self, rhs: Jet<C>) -> Jet<C> {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<C: Coeff> Neg for &Jet<C> {
    type Output = Jet<C>;
    fn neg(self) -> Jet<C> {
        self.map(C::neg)
    }
}

impl<C: Coeff> Neg for Jet<C> {
    type Output = Jet<C>;
    fn neg(self) -> Jet<C> {
        (&self).neg()
    }
}
