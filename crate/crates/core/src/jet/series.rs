//! Composition of jets, and the elementary functions built on it.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Coeff, Jet, Space};
use crate::error::JetError;

/// A univariate power series `a_0 + a_1 u + ... + a_k u^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    pub coeffs: Vec<C>,
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

impl<C: Coeff> Series<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        Series { coeffs }
    }

    /// `exp(u)` through degree `k`.
    pub fn exp(k: usize) -> Self {
        Series::new(
            (0..=k)
                .map(|i| C::from_rational(&BigRational::new(BigInt::one(), factorial(i))))
                .collect(),
        )
    }

    /// `sin(u)` through degree `k`.
    pub fn sin(k: usize) -> Self {
        Series::new(
            (0..=k)
                .map(|i| {
                    if i % 2 == 0 {
                        C::zero()
                    } else {
                        let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
                        C::from_rational(&BigRational::new(BigInt::from(sign), factorial(i)))
                    }
                })
                .collect(),
        )
    }

    /// `cos(u)` through degree `k`.
    pub fn cos(k: usize) -> Self {
        Series::new(
            (0..=k)
                .map(|i| {
                    if i % 2 == 1 {
                        C::zero()
                    } else {
                        let sign = if (i / 2) % 2 == 0 { 1 } else { -1 };
                        C::from_rational(&BigRational::new(BigInt::from(sign), factorial(i)))
                    }
                })
                .collect(),
        )
    }

    /// `log(1 + u)` through degree `k`.
    pub fn log1p(k: usize) -> Self {
        Series::new(
            (0..=k)
                .map(|i| match i {
                    0 => C::zero(),
                    _ => C::from_ratio(if i % 2 == 1 { 1 } else { -1 }, i as i64),
                })
                .collect(),
        )
    }

    /// `1 / (1 + u)` through degree `k`.
    pub fn recip1p(k: usize) -> Self {
        Series::new(
            (0..=k)
                .map(|i| C::from_i64(if i % 2 == 0 { 1 } else { -1 }))
                .collect(),
        )
    }

    /// `sqrt(1 + u)` through degree `k` (binomial series).
    pub fn sqrt1p(k: usize) -> Self {
        // binom(1/2, i) = prod_{j<i} (1/2 - j) / i!
        let mut out = Vec::with_capacity(k + 1);
        let mut c = BigRational::one();
        for i in 0..=k {
            out.push(C::from_rational(&c));
            let half_minus = BigRational::new(BigInt::from(1), BigInt::from(2))
                - BigRational::from_integer(BigInt::from(i));
            c = c * half_minus / BigRational::from_integer(BigInt::from(i + 1));
        }
        Series::new(out)
    }

    /// Substitute a jet with zero constant term (Horner scheme).
    pub fn compose(&self, u: &Jet<C>) -> Result<Jet<C>, JetError> {
        if !u.constant_term().is_zero() {
            return Err(JetError::NonzeroConstantArgument { index: 0 });
        }
        let space = u.space();
        let mut acc = Jet::zero(space);
        for c in self.coeffs.iter().take(space.order() + 1).rev() {
            acc = acc.checked_mul(u)?;
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        Ok(acc)
    }

    /// View as a one-variable jet of order `coeffs.len() - 1`.
    pub fn to_jet(&self, var: &str) -> Jet<C> {
        let space = Space::new([var], self.coeffs.len().saturating_sub(1));
        let mut j = Jet::zero(&space);
        for (i, c) in self.coeffs.iter().enumerate() {
            j.coeffs[i] = c.clone();
        }
        j
    }
}

/// All monomials `args^alpha` for the multi-indices of a source space,
/// shared across several compositions with the same arguments.
pub struct PowerTable<C> {
    source: Arc<Space>,
    target: Arc<Space>,
    monomials: Vec<Option<Jet<C>>>,
}

impl<C: Coeff> PowerTable<C> {
    pub fn new(source: &Arc<Space>, args: &[Jet<C>]) -> Result<Self, JetError> {
        if args.len() != source.nvars() {
            return Err(JetError::Arity {
                expected: source.nvars(),
                got: args.len(),
            });
        }
        let target = match args.first() {
            Some(a) => a.space().clone(),
            None => {
                return Err(JetError::Arity {
                    expected: 1,
                    got: 0,
                })
            }
        };
        for (i, a) in args.iter().enumerate() {
            if !a.space().same_as(&target) {
                return Err(JetError::SpaceMismatch {
                    left: format!("{:?}", target),
                    right: format!("{:?}", a.space()),
                });
            }
            if !a.constant_term().is_zero() {
                return Err(JetError::NonzeroConstantArgument { index: i });
            }
        }
        // Arguments have zero constant term, so monomials above the target
        // order vanish.
        let limit = source.count_upto(target.order());
        let mut monomials: Vec<Option<Jet<C>>> = Vec::with_capacity(limit);
        monomials.push(Some(Jet::one(&target)));
        for idx in 1..limit {
            let exp = source.exponent(idx);
            let v = exp
                .iter()
                .position(|&e| e > 0)
                .expect("non-constant monomial");
            let parent = source.lower(v, idx).expect("parent monomial");
            let m = monomials[parent]
                .as_ref()
                .expect("parent computed")
                .checked_mul(&args[v])?;
            monomials.push(Some(m));
        }
        Ok(PowerTable {
            source: source.clone(),
            target,
            monomials,
        })
    }

    /// Evaluate `f(args)` for `f` in the source space.
    pub fn apply(&self, f: &Jet<C>) -> Result<Jet<C>, JetError> {
        if !f.space().same_as(&self.source) {
            return Err(JetError::SpaceMismatch {
                left: format!("{:?}", self.source),
                right: format!("{:?}", f.space()),
            });
        }
        let mut out = Jet::<C>::zero(&self.target);
        for (idx, c) in f.coeffs.iter().enumerate().take(self.monomials.len()) {
            if c.is_zero() {
                continue;
            }
            let m = self.monomials[idx].as_ref().expect("computed");
            for (o, mc) in out.coeffs.iter_mut().zip(&m.coeffs) {
                if !mc.is_zero() {
                    o.add_mul(c, mc);
                }
            }
        }
        Ok(out)
    }
}

impl<C: Coeff> Jet<C> {
    /// Substitute `args[k]` for variable `k` of `self`. Every argument must
    /// have zero constant term.
    pub fn compose(&self, args: &[Jet<C>]) -> Result<Jet<C>, JetError> {
        PowerTable::new(self.space(), args)?.apply(self)
    }

    fn split_constant(&self) -> (C, Jet<C>) {
        let c = self.constant_term().clone();
        let mut u = self.clone();
        u.coeffs[0] = C::zero();
        (c, u)
    }

    /// `1 / self`; the constant term must be nonzero.
    pub fn reciprocal(&self) -> Result<Jet<C>, JetError> {
        let (c, u) = self.split_constant();
        let c_inv = c.inv().ok_or(JetError::ZeroConstantTerm)?;
        let r = Series::recip1p(self.order()).compose(&u.scale(&c_inv))?;
        Ok(r.scale(&c_inv))
    }

    /// Square root with positive real constant term.
    pub fn sqrt(&self) -> Result<Jet<C>, JetError> {
        let (c, u) = self.split_constant();
        if !c.is_pos_real() {
            return Err(JetError::NonPositiveConstantTerm);
        }
        let root = c.sqrt_pos_real().ok_or_else(|| {
            JetError::NotRepresentable(format!("square root of {c:?} is irrational"))
        })?;
        let c_inv = c.inv().ok_or(JetError::ZeroConstantTerm)?;
        let s = Series::sqrt1p(self.order()).compose(&u.scale(&c_inv))?;
        Ok(s.scale(&root))
    }

    /// `log(self / c)` where `c` is the constant term; the additive constant
    /// `log c` is dropped so the result stays exact.
    pub fn log_normalized(&self) -> Result<Jet<C>, JetError> {
        let (c, u) = self.split_constant();
        let c_inv = c.inv().ok_or(JetError::ZeroConstantTerm)?;
        Series::log1p(self.order()).compose(&u.scale(&c_inv))
    }

    fn elementary(
        &self,
        series: fn(usize) -> Series<C>,
        name: &str,
        shifted: impl Fn(num_complex::Complex64, Jet<C>, Jet<C>) -> Option<Jet<C>>,
    ) -> Result<Jet<C>, JetError> {
        let (c, u) = self.split_constant();
        if c.is_zero() {
            return series(self.order()).compose(&u);
        }
        // A nonzero constant needs transcendental values, only available in binary64.
        let z = c.to_c64();
        if C::from_c64(z).is_none() {
            return Err(JetError::NotRepresentable(format!(
                "{name} of a series with constant term {c:?}"
            )));
        }
        let base = series(self.order()).compose(&u)?;
        let partner = match name {
            "sin" => Series::cos(self.order()).compose(&u)?,
            "cos" => Series::sin(self.order()).compose(&u)?,
            _ => Jet::zero(u.space()),
        };
        shifted(z, base, partner).ok_or_else(|| JetError::NotRepresentable(name.into()))
    }

    pub fn exp(&self) -> Result<Jet<C>, JetError> {
        self.elementary(Series::exp, "exp", |z, e, _| {
            Some(e.scale(&C::from_c64(z.exp())?))
        })
    }

    pub fn sin(&self) -> Result<Jet<C>, JetError> {
        // sin(c + u) = sin c cos u + cos c sin u
        self.elementary(Series::sin, "sin", |z, s, c| {
            Some(&c.scale(&C::from_c64(z.sin())?) + &s.scale(&C::from_c64(z.cos())?))
        })
    }

    pub fn cos(&self) -> Result<Jet<C>, JetError> {
        // cos(c + u) = cos c cos u - sin c sin u
        self.elementary(Series::cos, "cos", |z, c, s| {
            Some(&c.scale(&C::from_c64(z.cos())?) - &s.scale(&C::from_c64(z.sin())?))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::ExactComplex as Q;
    use num_complex::Complex64;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn reciprocal_of_one_minus_x() {
        let s = Space::new(["x"], 2);
        let x = Jet::<Q>::var(&s, 0);
        let r = (Jet::one(&s) - x.clone()).reciprocal().unwrap();
        assert_eq!(r, Jet::one(&s) + x.clone() + &x * &x);
    }

    #[test]
    fn sqrt_binomial() {
        let s = Space::new(["x"], 2);
        let x = Jet::<Q>::var(&s, 0);
        let r = (Jet::one(&s) + x.scale_i64(2)).sqrt().unwrap();
        let expected = Jet::one(&s) + x.clone() - (&x * &x).scale(&q(1, 2));
        assert_eq!(r, expected);
    }

    #[test]
    fn sqrt_and_reciprocal_errors() {
        let s = Space::new(["x"], 3);
        let x = Jet::<Q>::var(&s, 0);
        assert_eq!(x.reciprocal(), Err(JetError::ZeroConstantTerm));
        assert_eq!(
            (Jet::constant(&s, q(-1, 1)) + x.clone()).sqrt(),
            Err(JetError::NonPositiveConstantTerm)
        );
        assert!(matches!(
            (Jet::constant(&s, q(2, 1)) + x).sqrt(),
            Err(JetError::NotRepresentable(_))
        ));
    }

    #[test]
    fn square_of_complex_coordinate() {
        let s = Space::new(["x", "t"], 3);
        let x = Jet::<Q>::var(&s, 0);
        let t = Jet::<Q>::var(&s, 1);
        let z = &x + &t.scale(&Q::imag_unit());
        let f = Series::new(vec![
            <Q as Coeff>::zero(),
            <Q as Coeff>::zero(),
            <Q as Coeff>::one(),
        ])
        .to_jet("u");
        let sq = f.compose(&[z]).unwrap();
        let expected = &(&x * &x) - &(&t * &t) + (&x * &t).scale(&Q::imag_unit().scale_i64(2));
        assert_eq!(sq, expected);
    }

    #[test]
    fn exp_at_zero_is_one() {
        let s = Space::new(["x"], 4);
        let e = Series::<Q>::exp(4)
            .to_jet("u")
            .compose(&[Jet::zero(&s)])
            .unwrap();
        assert_eq!(e, Jet::one(&s));
    }

    #[test]
    fn nonzero_constant_argument_rejected() {
        let s = Space::new(["x"], 3);
        let f = Series::<Q>::exp(3).to_jet("u");
        let arg = Jet::one(&s) + Jet::var(&s, 0);
        assert_eq!(
            f.compose(&[arg]),
            Err(JetError::NonzeroConstantArgument { index: 0 })
        );
    }

    #[test]
    fn transcendental_constants_only_in_binary64() {
        let s = Space::new(["x"], 3);
        let arg = Jet::<Q>::one(&s) + Jet::var(&s, 0);
        assert!(arg.cos().is_err());
        let arg64 = arg.to_binary64();
        let c = arg64.cos().unwrap();
        // d/dx cos(1 + x) at 0 = -sin(1)
        assert!((c.coeff(&[1]) - Complex64::new(-(1f64).sin(), 0.0)).norm() < 1e-15);
        assert!((c.coeff(&[0]) - Complex64::new((1f64).cos(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn log_of_exp() {
        let s = Space::new(["x", "y"], 5);
        let u = Jet::<Q>::var(&s, 0) + Jet::var(&s, 1).scale(&q(1, 3));
        let e = u.exp().unwrap();
        assert_eq!(e.log_normalized().unwrap(), u);
    }
}
