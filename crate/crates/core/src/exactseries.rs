//! Truncated formal power series in `q` over exact rationals.
//!
//! A [`RatSeries`] of order `M` holds the coefficients of `q^0 ..= q^M` and is
//! only known modulo `q^{M+1}`. Binary operations truncate to the smaller of
//! the two orders and never read past either operand's last coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational, always reduced with a positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("exp requires a series with zero constant term")]
    NonzeroConstantTerm,
    #[error("log and rational powers require constant term 1")]
    ConstantTermNotOne,
    #[error("inner series of a composition must have zero constant term")]
    PositiveValuationRequired,
    #[error("series is not reversible (needs zero constant term and nonzero linear term)")]
    NotReversible,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Text form `num/den`, or `num` when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

pub fn parse_rat(s: &str) -> Result<Rat, SeriesError> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n).map_err(|_| SeriesError::Parse(s.to_owned()))?;
            let d = BigInt::from_str(d).map_err(|_| SeriesError::Parse(s.to_owned()))?;
            if d.is_zero() {
                return Err(SeriesError::Parse(s.to_owned()));
            }
            Rat::new(n, d)
        }
        None => Rat::from_integer(BigInt::from_str(s).map_err(|_| SeriesError::Parse(s.to_owned()))?),
    };
    Ok(parsed)
}

/// Serde adapter storing a [`Rat`] as its text form.
pub mod rat_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter storing a list of [`Rat`] as a list of text forms.
pub mod rat_vec_string {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(rat_to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(D::Error::custom)).collect()
    }
}

/// Power series `Σ_{m=0}^{M} c_m q^m  (mod q^{M+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatSeries {
    coeffs: Vec<Rat>,
}

impl RatSeries {
    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty: a series always knows at least its constant term.
    pub fn new(coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        RatSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    /// Pads (with zeros) or cuts `coeffs` so the series has exactly the given order.
    pub fn from_coeffs_with_order(mut coeffs: Vec<Rat>, order: usize) -> Self {
        coeffs.resize(order + 1, Rat::zero());
        RatSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        RatSeries {
            coeffs: vec![Rat::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rat::one(), order)
    }

    pub fn constant(c: Rat, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series variable `q` itself.
    pub fn q(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Rat::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    /// Coefficient of `q^m`.
    ///
    /// # Panics
    /// If `m` exceeds the truncation order: such coefficients are unknown.
    pub fn coeff(&self, m: usize) -> &Rat {
        assert!(
            m <= self.order(),
            "coefficient q^{m} is beyond the truncation order {}",
            self.order()
        );
        &self.coeffs[m]
    }

    /// Lowers the truncation order. Raising it is impossible.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise the truncation order");
        RatSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, or `None` if any coefficient is fractional.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_to_string).collect()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        RatSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Cauchy product, truncated to the smaller order.
    pub fn mul_series(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![Rat::zero(); order + 1];
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RatSeries { coeffs: out }
    }

    /// Multiplicative inverse by back-substitution.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let mut out: Vec<Rat> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for m in 1..=self.order() {
            let mut acc = Rat::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[m - k];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(RatSeries { coeffs: out })
    }

    /// Formal exponential via `D f = (D a) f`, with `D = q d/dq`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let order = self.order();
        // k * a_k, reused by every m
        let da: Vec<Rat> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * rat_int(k as i64))
            .collect();
        let mut f: Vec<Rat> = Vec::with_capacity(order + 1);
        f.push(Rat::one());
        for m in 1..=order {
            let mut acc = Rat::zero();
            for k in 1..=m {
                if !da[k].is_zero() {
                    acc += &da[k] * &f[m - k];
                }
            }
            f.push(acc / rat_int(m as i64));
        }
        Ok(RatSeries { coeffs: f })
    }

    /// Formal logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        let order = self.order();
        let f = &self.coeffs;
        // da[k] = k * a_k
        let mut da: Vec<Rat> = vec![Rat::zero(); order + 1];
        for m in 1..=order {
            let mut acc = f[m].clone() * rat_int(m as i64);
            for k in 1..m {
                if !da[k].is_zero() && !f[m - k].is_zero() {
                    acc -= &da[k] * &f[m - k];
                }
            }
            da[m] = acc;
        }
        let coeffs = da
            .into_iter()
            .enumerate()
            .map(|(k, x)| if k == 0 { x } else { x / rat_int(k as i64) })
            .collect();
        Ok(RatSeries { coeffs })
    }

    /// `self^e = exp(e · log self)` for a series with constant term 1.
    pub fn pow_rat(&self, e: &Rat) -> Result<Self, SeriesError> {
        if e.is_zero() {
            if !self.coeffs[0].is_one() {
                return Err(SeriesError::ConstantTermNotOne);
            }
            return Ok(Self::one(self.order()));
        }
        self.log()?.scale(e).exp()
    }

    pub fn pow_int(&self, e: i64) -> Result<Self, SeriesError> {
        self.pow_rat(&rat_int(e))
    }

    /// `self(g(q))`, truncated to the smaller order. Requires `g(0) = 0`.
    pub fn compose(&self, g: &Self) -> Result<Self, SeriesError> {
        if !g.coeffs[0].is_zero() {
            return Err(SeriesError::PositiveValuationRequired);
        }
        let order = self.order().min(g.order());
        let g = g.truncate(order);
        // Horner: f_N, then acc * g + f_i
        let mut acc = Self::constant(self.coeffs[order].clone(), order);
        for i in (0..order).rev() {
            acc = acc.mul_series(&g);
            acc.coeffs[0] += &self.coeffs[i];
        }
        Ok(acc)
    }

    /// Compositional inverse `h` with `h(g(q)) = q`, by order-by-order
    /// back-substitution.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        let order = self.order();
        if !self.coeffs[0].is_zero() || order == 0 || self.coeffs[1].is_zero() {
            return Err(SeriesError::NotReversible);
        }
        let g1_inv = self.coeffs[1].recip();
        // powers[k] = g^k
        let mut powers: Vec<Self> = Vec::with_capacity(order + 1);
        powers.push(Self::one(order));
        for k in 1..=order {
            let next = powers[k - 1].mul_series(self);
            powers.push(next);
        }
        let mut h = vec![Rat::zero(); order + 1];
        h[1] = g1_inv.clone();
        let mut g1_pow_inv = g1_inv.clone();
        for m in 2..=order {
            g1_pow_inv *= &g1_inv;
            let mut acc = Rat::zero();
            for k in 1..m {
                let c = &powers[k].coeffs[m];
                if !h[k].is_zero() && !c.is_zero() {
                    acc += &h[k] * c;
                }
            }
            h[m] = -acc * &g1_pow_inv;
        }
        Ok(RatSeries { coeffs: h })
    }

    /// `D = q d/dq`: coefficient `m` becomes `m · a_m`.
    pub fn q_derivative(&self) -> Self {
        RatSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, a)| a * rat_int(m as i64))
                .collect(),
        }
    }

    /// Divides by `q^k`, dropping the (necessarily zero) low coefficients.
    /// The order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Self {
        assert!(k <= self.order());
        debug_assert!(self.coeffs[..k].iter().all(Zero::is_zero));
        RatSeries {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }
}

impl fmt::Display for RatSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if wrote {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            match m {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if m == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{m}")?;
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

impl Serialize for RatSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rat_vec_string::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for RatSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coeffs = rat_vec_string::deserialize(d)?;
        if coeffs.is_empty() {
            return Err(D::Error::custom("a series needs at least one coefficient"));
        }
        Ok(RatSeries { coeffs })
    }
}

impl Add for &RatSeries {
    type Output = RatSeries;

    fn add(self, rhs: &RatSeries) -> RatSeries {
        let order = self.order().min(rhs.order());
        RatSeries {
            coeffs: (0..=order).map(|m| &self.coeffs[m] + &rhs.coeffs[m]).collect(),
        }
    }
}

impl Sub for &RatSeries {
    type Output = RatSeries;

    fn sub(self, rhs: &RatSeries) -> RatSeries {
        let order = self.order().min(rhs.order());
        RatSeries {
            coeffs: (0..=order).map(|m| &self.coeffs[m] - &rhs.coeffs[m]).collect(),
        }
    }
}

impl Mul for &RatSeries {
    type Output = RatSeries;

    fn mul(self, rhs: &RatSeries) -> RatSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &RatSeries {
    type Output = RatSeries;

    fn neg(self) -> RatSeries {
        RatSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for RatSeries {
    type Output = RatSeries;
    fn add(self, rhs: RatSeries) -> RatSeries {
        &self + &rhs
    }
}

impl Sub for RatSeries {
    type Output = RatSeries;
    fn sub(self, rhs: RatSeries) -> RatSeries {
        &self - &rhs
    }
}

impl Mul for RatSeries {
    type Output = RatSeries;
    fn mul(self, rhs: RatSeries) -> RatSeries {
        &self * &rhs
    }
}
