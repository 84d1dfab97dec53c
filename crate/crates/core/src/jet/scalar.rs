//! Coefficient fields for jets.
//!
//! Two modes exist: exact complex rationals and binary64 complex numbers.
//! Each is a separate type, so the two can never meet inside one expression.

use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arithmetic mode of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Binary64,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Binary64 => "binary64",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "binary64" => Ok(Mode::Binary64),
            other => Err(format!(
                "unknown mode `{other}` (expected exact or binary64)"
            )),
        }
    }
}

/// Exact complex rational.
pub type ExactComplex = Complex<BigRational>;

/// A complex coefficient field.
///
/// Methods take references so exact-mode big rationals are not cloned on
/// every operation.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// The imaginary unit.
    fn imag_unit() -> Self;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn conj(&self) -> Self;

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = self.add(&a.mul(b));
    }

    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn scale_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k))
    }

    /// Real part as a coefficient with zero imaginary part.
    fn re(&self) -> Self;
    /// Imaginary part as a coefficient with zero imaginary part.
    fn im(&self) -> Self;
    fn is_real(&self) -> bool;

    /// `max(|re|, |im|)`, used for residual reporting.
    fn abs_max(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    /// Lift a binary64 value; exact mode refuses.
    fn from_c64(z: Complex64) -> Option<Self>;

    /// Square root of a positive real value. Exact mode only succeeds on
    /// perfect rational squares.
    fn sqrt_pos_real(&self) -> Option<Self>;
    /// True if the value is real and strictly positive.
    fn is_pos_real(&self) -> bool;

    /// Real and imaginary parts as text that [`Coeff::from_text`] reads back
    /// exactly: canonical rationals, or shortest round-trip decimals.
    fn to_text(&self) -> (String, String);
    fn from_text(re: &str, im: &str) -> Option<Self>;
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator/denominator: scale via bit shifting.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb - db) - 60;
            let scaled = if shift > 0 {
                BigRational::new(r.numer().clone(), r.denom().clone() << shift as usize)
            } else {
                BigRational::new(r.numer().clone() << (-shift) as usize, r.denom().clone())
            };
            let base = scaled.to_integer().to_f64().unwrap_or(f64::NAN);
            base * 2f64.powi(shift as i32)
        }
    }
}

fn rat_sqrt(r: &BigRational) -> Option<BigRational> {
    if !r.is_positive() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Coeff for ExactComplex {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Complex::new(BigRational::zero(), BigRational::zero())
    }
    fn one() -> Self {
        Complex::new(BigRational::one(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        // Most coefficients are real; skip the cross terms when possible.
        match (self.im.is_zero(), other.im.is_zero()) {
            (true, true) => Complex::new(&self.re * &other.re, BigRational::zero()),
            (true, false) => Complex::new(&self.re * &other.re, &self.re * &other.im),
            (false, true) => Complex::new(&self.re * &other.re, &self.im * &other.re),
            (false, false) => self * other,
        }
    }
    fn neg(&self) -> Self {
        Complex::new(-&self.re, -&self.im)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        if self.im.is_zero() {
            return Some(Complex::new(self.re.recip(), BigRational::zero()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Complex::new(&self.re / &norm, -(&self.im / &norm)))
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -&self.im)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.im.is_zero() && b.im.is_zero() {
            self.re += &a.re * &b.re;
        } else {
            let p = Coeff::mul(a, b);
            self.re += p.re;
            self.im += p.im;
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(rat(num, den), BigRational::zero())
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }
    fn scale_i64(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Complex::new(&self.re * &k, &self.im * &k)
    }

    fn re(&self) -> Self {
        Complex::new(self.re.clone(), BigRational::zero())
    }
    fn im(&self) -> Self {
        Complex::new(self.im.clone(), BigRational::zero())
    }
    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn abs_max(&self) -> f64 {
        rat_to_f64(&self.re.abs()).max(rat_to_f64(&self.im.abs()))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn from_c64(_z: Complex64) -> Option<Self> {
        None
    }

    fn sqrt_pos_real(&self) -> Option<Self> {
        if !self.im.is_zero() {
            return None;
        }
        rat_sqrt(&self.re).map(|r| Complex::new(r, BigRational::zero()))
    }
    fn is_pos_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
    fn to_text(&self) -> (String, String) {
        (format_rational(&self.re), format_rational(&self.im))
    }
    fn from_text(re: &str, im: &str) -> Option<Self> {
        Some(Complex::new(parse_rational(re)?, parse_rational(im)?))
    }
}

impl Coeff for Complex64 {
    const MODE: Mode = Mode::Binary64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }

    fn re(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    fn im(&self) -> Self {
        Complex64::new(self.im, 0.0)
    }
    fn is_real(&self) -> bool {
        self.im == 0.0
    }

    fn abs_max(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }

    fn sqrt_pos_real(&self) -> Option<Self> {
        if self.im == 0.0 && self.re > 0.0 {
            Some(Complex64::new(self.re.sqrt(), 0.0))
        } else {
            None
        }
    }
    fn is_pos_real(&self) -> bool {
        self.im == 0.0 && self.re > 0.0
    }
    fn to_text(&self) -> (String, String) {
        // Debug formatting is the shortest string that parses back to the same bits.
        (format!("{:?}", self.re), format!("{:?}", self.im))
    }
    fn from_text(re: &str, im: &str) -> Option<Self> {
        Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
    }
}

/// Parse a rational literal such as `3`, `-4/6` or `0.125`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = format!("{int_digits}{frac}").parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(digits, den);
        return Some(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// Canonical text form of a rational: `p/q` in lowest terms, or `p` when
/// the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sqrt_requires_perfect_square() {
        let c = <ExactComplex as Coeff>::from_ratio(9, 4);
        assert_eq!(c.sqrt_pos_real(), Some(ExactComplex::from_ratio(3, 2)));
        assert!(ExactComplex::from_ratio(11, 10).sqrt_pos_real().is_none());
        assert!(ExactComplex::from_ratio(-4, 1).sqrt_pos_real().is_none());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("4/1"), Some(rat(4, 1)));
        assert_eq!(parse_rational("-0.125"), Some(rat(-1, 8)));
        assert_eq!(parse_rational("12"), Some(rat(12, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&rat(8, 2)), "4");
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rat_to_f64(&r) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_complex() {
        let z = Complex::new(rat(1, 1), rat(1, 1));
        let w = Coeff::inv(&z).unwrap();
        assert_eq!(Coeff::mul(&z, &w), <ExactComplex as Coeff>::one());
    }
}
