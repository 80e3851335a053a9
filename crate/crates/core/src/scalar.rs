//! Scalar arithmetic with two interchangeable backends: exact rationals and
//! complex floating point. Every comparison in the floating backend goes
//! through the [`Tol`] contract; the exact backend compares on the nose.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Absolute/relative tolerance pair used by all floating-point checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tol {
    pub eps_abs: f64,
    pub eps_rel: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { eps_abs: 1e-9, eps_rel: 1e-9 }
    }
}

impl Tol {
    pub fn new(eps: f64) -> Self {
        Tol { eps_abs: eps, eps_rel: eps }
    }

    /// `|a - b| <= eps_abs + eps_rel * max(|a|, |b|)` on magnitudes.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps_abs + self.eps_rel * a.abs().max(b.abs())
    }

    pub fn is_zero(&self, r: f64) -> bool {
        r.abs() <= self.eps_abs
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScalarError {
    #[error("malformed rational literal `{0}`")]
    BadRational(String),
    #[error("value {0} is not representable in the exact backend")]
    NotExact(String),
}

/// On-disk form of a scalar: `{"q": "p/q"}` or `{"re": f, "im": f}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Rational { q: String },
    Complex { re: f64, im: f64 },
}

/// The arithmetic interface shared by both backends. Operations are by
/// reference; implementations are cheap to clone.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    /// Complex conjugate; identity on rationals.
    fn conj(&self) -> Self;
    /// Magnitude as f64, used for residual reporting in both backends.
    fn abs(&self) -> f64;
    /// Square root staying inside the backend: principal branch for complex,
    /// exact root of a perfect square for rationals, otherwise `None`.
    fn sqrt(&self) -> Option<Self>;

    fn is_zero(&self) -> bool;

    /// Exact equality for the exact backend, tolerance comparison otherwise.
    fn approx_eq(&self, o: &Self, tol: &Tol) -> bool {
        if Self::EXACT {
            self == o
        } else {
            self.sub(o).abs() <= tol.eps_abs + tol.eps_rel * self.abs().max(o.abs())
        }
    }

    fn to_c64(&self) -> Complex64;
    /// Embeds a rational; every backend contains the rationals.
    fn from_rat(r: &BigRational) -> Self;
    /// Exact rational value if the scalar is one (used when saving exact data).
    fn as_rat(&self) -> Option<BigRational>;

    fn to_json(&self) -> ScalarJson;
    fn from_json(j: &ScalarJson) -> Result<Self, ScalarError>;

    /// Small pseudo-random value for property checks; the ranges exclude zero.
    fn random_small<R: Rng>(rng: &mut R) -> Self;
}

/// Exact rational scalar.
#[derive(Clone, PartialEq, Eq)]
pub struct Rat(pub BigRational);

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let bad = || ScalarError::BadRational(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(p, q))
    } else {
        let p: BigInt = s.trim().parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(p))
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rat(BigRational::zero())
    }
    fn one() -> Self {
        Rat(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn add(&self, o: &Self) -> Self {
        Rat(&self.0 + &o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Rat(&self.0 - &o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Rat(&self.0 * &o.0)
    }
    fn neg(&self) -> Self {
        Rat(-&self.0)
    }
    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn abs(&self) -> f64 {
        rational_to_f64(&self.0).abs()
    }
    fn sqrt(&self) -> Option<Self> {
        if self.0.is_negative() {
            return None;
        }
        let num = self.0.numer().sqrt();
        let den = self.0.denom().sqrt();
        if &num * &num == *self.0.numer() && &den * &den == *self.0.denom() {
            Some(Rat(BigRational::new(num, den)))
        } else {
            None
        }
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.0), 0.0)
    }
    fn from_rat(r: &BigRational) -> Self {
        Rat(r.clone())
    }
    fn as_rat(&self) -> Option<BigRational> {
        Some(self.0.clone())
    }

    fn to_json(&self) -> ScalarJson {
        ScalarJson::Rational { q: format!("{}/{}", self.0.numer(), self.0.denom()) }
    }
    fn from_json(j: &ScalarJson) -> Result<Self, ScalarError> {
        match j {
            ScalarJson::Rational { q } => Ok(Rat(parse_rational(q)?)),
            ScalarJson::Complex { re, im } => {
                if *im != 0.0 || re.fract() != 0.0 {
                    Err(ScalarError::NotExact(format!("{re}+{im}i")))
                } else {
                    Ok(Rat::from_i64(*re as i64))
                }
            }
        }
    }

    fn random_small<R: Rng>(rng: &mut R) -> Self {
        let p = rng.gen_range(-4i64..=4);
        let q = rng.gen_range(1i64..=3);
        let p = if p == 0 { 1 } else { p };
        Rat::from_ratio(p, q)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Complex floating-point scalar.
#[derive(Clone, Copy, PartialEq)]
pub struct C64(pub Complex64);

impl fmt::Debug for C64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for C64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{}", self.0.re)
        } else {
            write!(f, "{}{:+}i", self.0.re, self.0.im)
        }
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        C64(Complex64::new(0.0, 0.0))
    }
    fn one() -> Self {
        C64(Complex64::new(1.0, 0.0))
    }
    fn from_i64(n: i64) -> Self {
        C64(Complex64::new(n as f64, 0.0))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        C64(Complex64::new(p as f64 / q as f64, 0.0))
    }

    fn add(&self, o: &Self) -> Self {
        C64(self.0 + o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        C64(self.0 - o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        C64(self.0 * o.0)
    }
    fn neg(&self) -> Self {
        C64(-self.0)
    }
    fn inv(&self) -> Option<Self> {
        if self.0.norm() == 0.0 {
            None
        } else {
            Some(C64(self.0.inv()))
        }
    }
    fn conj(&self) -> Self {
        C64(self.0.conj())
    }
    fn abs(&self) -> f64 {
        self.0.norm()
    }
    fn sqrt(&self) -> Option<Self> {
        Some(C64(self.0.sqrt()))
    }
    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    fn to_c64(&self) -> Complex64 {
        self.0
    }
    fn from_rat(r: &BigRational) -> Self {
        C64(Complex64::new(rational_to_f64(r), 0.0))
    }
    fn as_rat(&self) -> Option<BigRational> {
        if self.0.im == 0.0 && self.0.re.fract() == 0.0 && self.0.re.abs() < 1e15 {
            Some(BigRational::from_integer(BigInt::from(self.0.re as i64)))
        } else {
            None
        }
    }

    fn to_json(&self) -> ScalarJson {
        ScalarJson::Complex { re: self.0.re, im: self.0.im }
    }
    fn from_json(j: &ScalarJson) -> Result<Self, ScalarError> {
        match j {
            ScalarJson::Complex { re, im } => Ok(C64(Complex64::new(*re, *im))),
            ScalarJson::Rational { q } => {
                let r = parse_rational(q)?;
                Ok(C64::from_rat(&r))
            }
        }
    }

    fn random_small<R: Rng>(rng: &mut R) -> Self {
        // Unit-modulus values keep residual scales comparable across runs.
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        C64(Complex64::from_polar(1.0, theta))
    }
}

/// Residual between two scalar slices, as the largest entrywise difference.
pub fn max_abs_diff<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.sub(y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_identity() {
        let t = Tol::default();
        assert!(Rat::from_i64(1).approx_eq(&Rat::from_i64(1), &t));
        assert!(!Rat::from_i64(1).approx_eq(&Rat::from_i64(2), &t));
    }

    #[test]
    fn float_within_tolerance() {
        let t = Tol::default();
        let a = C64(Complex64::new(1.0, 0.0));
        let b = C64(Complex64::new(1.0 + 1e-12, 0.0));
        assert!(a.approx_eq(&b, &t));
        assert!(!a.approx_eq(&C64::from_i64(2), &t));
    }

    #[test]
    fn rational_sqrt() {
        assert_eq!(Rat::from_ratio(9, 4).sqrt(), Some(Rat::from_ratio(3, 2)));
        assert_eq!(Rat::from_i64(2).sqrt(), None);
    }

    #[test]
    fn json_round_trip() {
        let r = Rat::from_ratio(-7, 3);
        let r2 = Rat::from_json(&r.to_json()).unwrap();
        assert_eq!(r, r2);
        let c = C64(Complex64::new(0.5, -1.25));
        let c2 = C64::from_json(&c.to_json()).unwrap();
        assert_eq!(c, c2);
    }

    proptest! {
        #[test]
        fn approx_eq_reflexive_symmetric(re in -1e3f64..1e3, im in -1e3f64..1e3, d in -1e-12f64..1e-12) {
            let t = Tol::default();
            let a = C64(Complex64::new(re, im));
            let b = C64(Complex64::new(re + d, im));
            prop_assert!(a.approx_eq(&a, &t));
            prop_assert_eq!(a.approx_eq(&b, &t), b.approx_eq(&a, &t));
        }

        #[test]
        fn exact_transitive(p in -50i64..50, q in 1i64..10) {
            let t = Tol::default();
            let a = Rat::from_ratio(p, q);
            let b = Rat::from_ratio(p * 2, q * 2);
            let c = Rat::from_ratio(p * 3, q * 3);
            prop_assert!(a.approx_eq(&b, &t));
            prop_assert!(b.approx_eq(&c, &t));
            prop_assert!(a.approx_eq(&c, &t));
        }
    }
}
