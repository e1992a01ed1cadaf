//! Exact Gaussian rationals `a + b·i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use malachite_base::num::arithmetic::traits::{Abs, AbsSquared, Conjugate, Pow, Reciprocal};
use malachite_base::num::basic::traits::{One as _, Zero as _};
use malachite_base::num::conversion::traits::IsInteger;
use malachite_nz::integer::Integer;
use malachite_nz::natural::Natural;
use malachite_q::gaussian_rational::GaussianRational;
use malachite_q::Rational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar(GaussianRational);

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar(GaussianRational {
            real: re,
            imaginary: im,
        })
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(Rational::from(n))
    }

    pub fn from_integer(n: Integer) -> Self {
        Scalar::real(Rational::from(n))
    }

    pub fn from_natural(n: Natural) -> Self {
        Scalar::real(Rational::from(n))
    }

    /// `num/den + 0i`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::real(Rational::from_signeds(num, den))
    }

    pub fn gaussian(re: (i64, i64), im: (i64, i64)) -> Self {
        Scalar::new(
            Rational::from_signeds(re.0, re.1),
            Rational::from_signeds(im.0, im.1),
        )
    }

    pub fn real(re: Rational) -> Self {
        Scalar::new(re, Rational::ZERO)
    }

    pub fn i() -> Self {
        Scalar::new(Rational::ZERO, Rational::ONE)
    }

    pub fn re(&self) -> &Rational {
        &self.0.real
    }

    pub fn im(&self) -> &Rational {
        &self.0.imaginary
    }

    pub fn is_real(&self) -> bool {
        self.0.imaginary == 0u32
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<Integer> {
        if self.is_real() && self.re().is_integer() {
            Integer::try_from(self.re()).ok()
        } else {
            None
        }
    }

    /// Whether the value prints with a leading minus sign: a negative real,
    /// or a negative multiple of `i`.
    pub fn reads_negative(&self) -> bool {
        if self.is_real() {
            *self.re() < 0u32
        } else {
            *self.re() == 0u32 && *self.im() < 0u32
        }
    }

    pub fn conj(&self) -> Self {
        Scalar((&self.0).conjugate())
    }

    pub fn norm_sqr(&self) -> Rational {
        (&self.0).abs_squared()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar((&self.0).reciprocal()))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    /// Integer power; negative exponents go through the exact inverse.
    pub fn pow(&self, exp: i64) -> Result<Self> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar((&self.0).pow(exp)))
    }

    pub fn pow_u(&self, exp: u64) -> Self {
        Scalar((&self.0).pow(exp))
    }

    fn fmt_rational(q: &Rational) -> String {
        q.to_string()
    }

    fn fmt_rational_latex(q: &Rational) -> String {
        if q.is_integer() {
            q.to_string()
        } else {
            let sign = if *q < 0u32 { "-" } else { "" };
            format!(
                "{}\\frac{{{}}}{{{}}}",
                sign,
                q.numerator_ref(),
                q.denominator_ref()
            )
        }
    }

    fn render(&self, latex: bool) -> String {
        let fmt_q = if latex {
            Self::fmt_rational_latex
        } else {
            Self::fmt_rational
        };
        if self.is_real() {
            return fmt_q(self.re());
        }
        let im_abs = self.im().abs();
        let times = if latex { "" } else { "*" };
        let im_part = if im_abs == 1u32 {
            "i".to_string()
        } else {
            format!("{}{times}i", fmt_q(&im_abs))
        };
        let negative = *self.im() < 0u32;
        if *self.re() == 0u32 {
            let sign = if negative { "-" } else { "" };
            format!("{sign}{im_part}")
        } else {
            let sign = match (negative, latex) {
                (true, true) => "-",
                (false, true) => "+",
                (true, false) => " - ",
                (false, false) => " + ",
            };
            format!("({}{sign}{im_part})", fmt_q(self.re()))
        }
    }

    /// LaTeX form; Gaussian values are parenthesised.
    pub fn to_latex(&self) -> String {
        self.render(true)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let int = |t: &str| Integer::from_str(t.trim()).map_err(|_| bad());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = int(n)?;
            let d = int(d)?;
            if d == 0u32 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::from_integers(n, d))
        }
        None => Ok(Rational::from(int(s)?)),
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.0 == GaussianRational::ZERO
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::real(Rational::ONE)
    }
    fn is_one(&self) -> bool {
        self.0 == GaussianRational::ONE
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Integer> for Scalar {
    fn from(n: Integer) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<Natural> for Scalar {
    fn from(n: Natural) -> Self {
        Scalar::from_natural(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::real(q)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 * &rhs.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the forms produced by `Display`: `p`, `p/q`, `i`, `-3/2*i`,
/// `(p/q + r/s*i)`.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(&t);
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if !t.ends_with('i') {
            return Ok(Scalar::real(parse_rational(t)?));
        }
        let body = &t[..t.len() - 1];
        let body = body.strip_suffix('*').unwrap_or(body);
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => Rational::ONE,
            "-" => -Rational::ONE,
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Scalar::new(parse_rational(re)?, im))
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    re: String,
    #[serde(default = "zero_str")]
    im: String,
}

fn zero_str() -> String {
    "0".into()
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            re: Scalar::fmt_rational(self.re()),
            im: Scalar::fmt_rational(self.im()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        let re = parse_rational(&repr.re).map_err(serde::de::Error::custom)?;
        let im = parse_rational(&repr.im).map_err(serde::de::Error::custom)?;
        Ok(Scalar::new(re, im))
    }
}
