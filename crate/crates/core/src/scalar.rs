//! Scalar towers: exact rationals, exact Gaussian rationals (ℚ(i)) and `f64`.
//!
//! Every algorithm in the crate is written against [`Field`]. The exact towers
//! additionally implement [`ExactField`], which is what the root extraction and
//! the pencil machinery require.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{GeomError, Result};
use crate::matrix::{self, Mat};

/// Exact rational number.
pub type Rational = BigRational;

/// Default relative tolerance for float rank and zero decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for the exact towers.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Literal equality with zero. In float mode this is only used to skip exact zeros.
    fn is_zero(&self) -> bool;
    /// Approximate absolute value, used for pivoting and float tolerances.
    fn magnitude(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;
    /// Square root inside the same tower, if it exists there.
    fn sqrt(&self) -> Option<Self>;

    /// Whether `x` should be treated as zero relative to `scale`.
    fn negligible(x: &Self, scale: f64) -> bool {
        let _ = scale;
        x.is_zero()
    }

    fn rank_impl(m: &Mat<Self>, tol: f64) -> usize {
        let _ = tol;
        matrix::exact_rank(m)
    }

    fn null_space_impl(m: &Mat<Self>, tol: f64) -> Vec<Vec<Self>> {
        let _ = tol;
        matrix::exact_null_space(m)
    }
}

/// Fields with decidable equality that embed into ℚ(i).
pub trait ExactField: Field + Eq {
    fn to_gaussian(&self) -> Gaussian;
    /// Inverse of the embedding; `None` when `g` is not in this tower.
    fn from_gaussian(g: &Gaussian) -> Option<Self>;
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // to_f64 only fails on overflow of huge ratios
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

fn bigint_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub(crate) fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = bigint_sqrt_exact(q.numer())?;
    let d = bigint_sqrt_exact(q.denom())?;
    Some(Rational::new(n, d))
}

impl Field for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        num_traits::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn sqrt(&self) -> Option<Self> {
        rational_sqrt(self)
    }
}

impl ExactField for Rational {
    fn to_gaussian(&self) -> Gaussian {
        Gaussian::real(self.clone())
    }
    fn from_gaussian(g: &Gaussian) -> Option<Self> {
        g.im.is_zero().then(|| g.re.clone())
    }
}

/// Element `re + i·im` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: num_traits::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(Rational::from_i64(re), Rational::from_i64(im))
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    /// `re² + im²`.
    pub fn norm(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Debug for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for Gaussian {
    type Output = Gaussian;
    fn add(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Gaussian {
    type Output = Gaussian;
    fn sub(self, o: Gaussian) -> Gaussian {
        Gaussian::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Gaussian {
    type Output = Gaussian;
    fn mul(self, o: Gaussian) -> Gaussian {
        if self.im.is_zero() && o.im.is_zero() {
            return Gaussian::real(self.re * o.re);
        }
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Gaussian::new(re, im)
    }
}

impl Div for Gaussian {
    type Output = Gaussian;
    fn div(self, o: Gaussian) -> Gaussian {
        if o.im.is_zero() {
            return Gaussian::new(self.re / &o.re, self.im / &o.re);
        }
        let n = o.norm();
        let re = (&self.re * &o.re + &self.im * &o.im) / &n;
        let im = (&self.im * &o.re - &self.re * &o.im) / &n;
        Gaussian::new(re, im)
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-self.re, -self.im)
    }
}

impl Field for Gaussian {
    const EXACT: bool = true;

    fn zero() -> Self {
        Gaussian::from_ints(0, 0)
    }
    fn one() -> Self {
        Gaussian::from_ints(1, 0)
    }
    fn from_i64(v: i64) -> Self {
        Gaussian::from_ints(v, 0)
    }
    fn from_rational(q: &Rational) -> Self {
        Gaussian::real(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn conj(&self) -> Self {
        Gaussian::new(self.re.clone(), -self.im.clone())
    }
    fn sqrt(&self) -> Option<Self> {
        if self.im.is_zero() {
            if !self.re.is_negative() {
                return rational_sqrt(&self.re).map(Gaussian::real);
            }
            return rational_sqrt(&-self.re.clone()).map(|r| Gaussian::new(num_traits::zero(), r));
        }
        // (x + iy)² = re + i·im  ⇒  x² = (re + |z|)/2, y = im / 2x
        let modulus = rational_sqrt(&self.norm())?;
        let x2 = (&self.re + modulus) / Rational::from_i64(2);
        let x = rational_sqrt(&x2)?;
        let y = &self.im / (&x * Rational::from_i64(2));
        Some(Gaussian::new(x, y))
    }
}

impl ExactField for Gaussian {
    fn to_gaussian(&self) -> Gaussian {
        self.clone()
    }
    fn from_gaussian(g: &Gaussian) -> Option<Self> {
        Some(g.clone())
    }
}

impl Field for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn conj(&self) -> Self {
        *self
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn negligible(x: &Self, scale: f64) -> bool {
        x.abs() <= DEFAULT_TOL * scale
    }
    fn rank_impl(m: &Mat<Self>, tol: f64) -> usize {
        matrix::float_rank(m, tol)
    }
    fn null_space_impl(m: &Mat<Self>, tol: f64) -> Vec<Vec<Self>> {
        matrix::float_null_space(m, tol)
    }
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || GeomError::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.sign() == Sign::NoSign {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// A scalar tagged with its tower, used at serialization boundaries.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Gaussian(Gaussian),
    Float(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    ExactRational,
    ExactGaussian,
    Float64,
}

impl Scalar {
    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Rational(_) => ScalarMode::ExactRational,
            Scalar::Gaussian(_) => ScalarMode::ExactGaussian,
            Scalar::Float(_) => ScalarMode::Float64,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Rational(q) => q.to_c64(),
            Scalar::Gaussian(g) => g.to_c64(),
            Scalar::Float(x) => Complex64::new(*x, 0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_field_axioms_on_samples() {
        let a = Gaussian::new(rational(1, 2), rational(-3, 4));
        let b = Gaussian::new(rational(5, 3), rational(2, 7));
        let c = Gaussian::from_ints(-2, 1);
        assert_eq!((a.clone() * b.clone()) / b.clone(), a);
        assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
        assert_eq!(Gaussian::i() * Gaussian::i(), Gaussian::from_ints(-1, 0));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rational(9, 4).sqrt(), Some(rational(3, 2)));
        assert_eq!(rational(2, 1).sqrt(), None);
        assert_eq!(rational(-1, 1).sqrt(), None);
        assert_eq!(Gaussian::from_ints(-4, 0).sqrt(), Some(Gaussian::from_ints(0, 2)));
        // (2+3i)² = -5+12i
        let r = Gaussian::from_ints(-5, 12).sqrt().unwrap();
        assert_eq!(r.clone() * r, Gaussian::from_ints(-5, 12));
        assert_eq!(Gaussian::from_ints(0, 1).sqrt(), None);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rational(-7, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), rational(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
