//! Exact univariate polynomials and truncated power series over `Q`.
//!
//! Every Poincaré polynomial in the crate is a [`RationalPoly`] in the formal
//! variable `t`. Coefficients are arbitrary-precision rationals so that series
//! division by `(1 + t)` and friends never round.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("factor `{0}` has zero constant term and is not invertible as a power series")]
    NonInvertible(String),
    #[error("degree {degree} exceeds duality dimension {dim}")]
    DegreeExceedsDimension { degree: usize, dim: usize },
    #[error("q-binomial index k = {k} out of range for n = {n}")]
    BinomialRange { n: usize, k: usize },
    #[error("series is not divisible by t^{0}")]
    NotDivisibleByT(usize),
    #[error("cannot parse polynomial `{0}`")]
    Parse(String),
}

/// Dense polynomial in `t`, index = degree. The highest stored coefficient is
/// nonzero; the zero polynomial stores nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(rat(1), 0)
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    /// `t^degree`
    pub fn t_pow(degree: usize) -> Self {
        Self::monomial(rat(1), degree)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// Sum of `t^d` over the given degrees (with multiplicity).
    pub fn from_degrees(degrees: &[usize]) -> Self {
        degrees
            .iter()
            .fold(Self::zero(), |acc, &d| acc + Self::t_pow(d))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> Rational {
        self.coeffs
            .get(degree)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Total dimension when the polynomial is a Poincaré polynomial.
    pub fn eval_at_one(&self) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// Euler characteristic, i.e. the value at `t = -1`.
    pub fn eval_at_minus_one(&self) -> Rational {
        self.eval(&rat(-1))
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Drop every term of degree greater than `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Coefficients as machine integers, or `None` if any is fractional or too large.
    pub fn to_i64_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_integer() {
                    c.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn has_odd_terms(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero())
    }

    /// Symmetric under `t^d ↦ t^(deg - d)`.
    pub fn is_palindromic(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// `self - other` has no negative coefficients.
    pub fn dominates(&self, other: &Self) -> bool {
        (self - other).is_nonnegative()
    }

    /// Human-oriented rendering with superscript exponents, e.g. `1 + 2t³`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if d == 0 || !abs.is_one() {
                out.push_str(&abs.to_string());
            }
            if d >= 1 {
                out.push('t');
            }
            if d >= 2 {
                out.push_str(&superscript(d));
            }
        }
        out
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

pub fn dominates(q: &RationalPoly, p: &RationalPoly) -> bool {
    q.dominates(p)
}

impl Add<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;

    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..len).map(|d| self.coeff(d) + rhs.coeff(d)).collect())
    }
}

impl Sub<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;

    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..len).map(|d| self.coeff(d) - rhs.coeff(d)).collect())
    }
}

impl Mul<&RationalPoly> for &RationalPoly {
    type Output = RationalPoly;

    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;

    fn neg(self) -> RationalPoly {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalPoly> for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: &RationalPoly) -> RationalPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<RationalPoly> for &RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        -&self
    }
}

impl std::iter::Sum for RationalPoly {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for RationalPoly {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

/// Canonical text form: `c0 + c1*t + c2*t^2 + ...`, zero terms omitted,
/// coefficients always written out as `p` or `p/q`.
impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{d}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for RationalPoly {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SeriesError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut current = String::new();
        for c in compact.chars() {
            match c {
                '+' => {
                    if current.is_empty() || current == "-" {
                        return Err(err());
                    }
                    terms.push(std::mem::take(&mut current));
                }
                '-' if !current.is_empty() && !current.ends_with(['^', '*', '/']) => {
                    terms.push(std::mem::replace(&mut current, "-".into()));
                }
                _ => current.push(c),
            }
        }
        if current.is_empty() || current == "-" {
            return Err(err());
        }
        terms.push(current);

        let mut out = RationalPoly::zero();
        for term in terms {
            let (coef, degree) = parse_term(&term).ok_or_else(err)?;
            out = out + RationalPoly::monomial(coef, degree);
        }
        Ok(out)
    }
}

fn parse_term(term: &str) -> Option<(Rational, usize)> {
    let (neg, body) = match term.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, term),
    };
    let (coef_str, var_str) = match body.find('t') {
        None => (body, None),
        Some(idx) => {
            let coef = body[..idx].strip_suffix('*').unwrap_or(&body[..idx]);
            (coef, Some(&body[idx + 1..]))
        }
    };
    let coef = if coef_str.is_empty() {
        var_str?;
        rat(1)
    } else {
        Rational::from_str(coef_str).ok()?
    };
    let degree = match var_str {
        None => 0,
        Some("") => 1,
        Some(rest) => rest.strip_prefix('^')?.parse().ok()?,
    };
    Some((if neg { -coef } else { coef }, degree))
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serialize rationals as their `p/q` strings.
pub fn serialize_rationals<S: Serializer>(
    values: &[Rational],
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(values.iter().map(|v| v.to_string()))
}

/// Power series known modulo `t^(order + 1)`: coefficients for degrees `0..=order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
    order: usize,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
            order,
        }
    }

    pub fn one(order: usize) -> Self {
        Self::from_poly(&RationalPoly::one(), order)
    }

    pub fn from_poly(p: &RationalPoly, order: usize) -> Self {
        Self {
            coeffs: (0..=order).map(|d| p.coeff(d)).collect(),
            order,
        }
    }

    /// Highest degree whose coefficient is known.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, degree: usize) -> Rational {
        assert!(
            degree <= self.order,
            "coefficient of t^{degree} is beyond truncation order {}",
            self.order
        );
        self.coeffs[degree].clone()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> RationalPoly {
        RationalPoly::from_coeffs(self.coeffs.clone())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
            order,
        }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::NonInvertible(self.to_poly().to_string()));
        }
        let inv0 = c0.recip();
        let mut out = vec![Rational::zero(); self.order + 1];
        out[0] = inv0.clone();
        for d in 1..=self.order {
            let acc = (1..=d).fold(Rational::zero(), |acc, j| {
                acc + &self.coeffs[j] * &out[d - j]
            });
            out[d] = -acc * &inv0;
        }
        Ok(Self {
            coeffs: out,
            order: self.order,
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        Ok(self * &rhs.inverse()?)
    }

    /// Divide by `t^k`. The first `k` coefficients must vanish; the result is
    /// known to `k` fewer degrees.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if k > self.order || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(SeriesError::NotDivisibleByT(k));
        }
        Ok(Self {
            coeffs: self.coeffs[k..].to_vec(),
            order: self.order - k,
        })
    }

    pub fn is_nonnegative_integral(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.is_integer() && !c.is_negative())
    }
}

impl Add<&TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|d| &self.coeffs[d] + &rhs.coeffs[d])
                .collect(),
            order,
        }
    }
}

impl Sub<&TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        TruncatedSeries {
            coeffs: (0..=order)
                .map(|d| &self.coeffs[d] - &rhs.coeffs[d])
                .collect(),
            order,
        }
    }
}

impl Mul<&TruncatedSeries> for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(rhs.order);
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        TruncatedSeries { coeffs: out, order }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(t^{})", self.to_poly(), self.order + 1)
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Expand `num / ∏ factors` as a power series through degree `order`.
pub fn expand_ratio(
    num: &RationalPoly,
    denom_factors: &[RationalPoly],
    order: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let mut out = TruncatedSeries::from_poly(num, order);
    for factor in denom_factors {
        if factor.coeff(0).is_zero() {
            return Err(SeriesError::NonInvertible(factor.to_string()));
        }
        out = out.div(&TruncatedSeries::from_poly(factor, order))?;
    }
    Ok(out)
}

/// `t^dim · p(1/t)`: reverse the coefficients into degree `dim`.
pub fn poincare_dual(p: &RationalPoly, dim: usize) -> Result<RationalPoly, SeriesError> {
    match p.degree() {
        Some(degree) if degree > dim => Err(SeriesError::DegreeExceedsDimension { degree, dim }),
        _ => Ok(RationalPoly::from_coeffs(
            (0..=dim).map(|d| p.coeff(dim - d)).collect(),
        )),
    }
}

/// Poincaré polynomial of the Grassmannian `Gr_k(C^n)`: the Gaussian binomial
/// `[n choose k]_q` at `q = t²`.
pub fn gaussian_binomial(n: usize, k: usize) -> Result<RationalPoly, SeriesError> {
    if k > n {
        return Err(SeriesError::BinomialRange { n, k });
    }
    // row[j] = [m choose j]; [m+1, j] = [m, j-1] + q^j [m, j]
    let mut row = vec![RationalPoly::one()];
    for m in 0..n {
        let mut next = Vec::with_capacity(m + 2);
        for j in 0..=m + 1 {
            let left = if j >= 1 {
                row[j - 1].clone()
            } else {
                RationalPoly::zero()
            };
            let right = row.get(j).map(|p| p.shift(2 * j)).unwrap_or_default();
            next.push(left + right);
        }
        row = next;
    }
    Ok(row.swap_remove(k))
}
