//! Tangency sequences and the state space of the Caporaso–Harris recursion.
//!
//! A [`TangencySeq`] `s` records `s_k` tangency conditions of order `k` to a
//! fixed line. Orders are 1-based in the API and 0-based in storage.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangencyError {
    #[error("invalid state: weight(alpha) + weight(beta) = {weight} but d = {d}")]
    InvalidState { d: u32, weight: u64 },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("cannot parse tangency sequence {0:?}")]
    Parse(String),
}

/// Finitely supported sequence of nonnegative integers, stored without
/// trailing zeros so that equality is structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TangencySeq {
    parts: Vec<u32>,
}

impl TangencySeq {
    pub fn new(mut parts: Vec<u32>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        TangencySeq { parts }
    }

    pub fn empty() -> Self {
        TangencySeq { parts: Vec::new() }
    }

    /// `n` tangencies of order 1, i.e. the sequence `(n)`.
    pub fn ones(n: u32) -> Self {
        Self::new(vec![n])
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Largest order with a nonzero entry (0 for the empty sequence).
    pub fn max_order(&self) -> usize {
        self.parts.len()
    }

    /// Number of conditions of order `k` (1-based).
    pub fn get(&self, k: usize) -> u32 {
        assert!(k >= 1, "tangency orders are 1-based");
        self.parts.get(k - 1).copied().unwrap_or(0)
    }

    /// `I s = Σ k · s_k`.
    pub fn weight(&self) -> u64 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u64 + 1) * c as u64)
            .sum()
    }

    /// `|s| = Σ s_k`.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&c| c as u64).sum()
    }

    /// `s + e_k`.
    pub fn plus_unit(&self, k: usize) -> Self {
        let mut parts = self.parts.clone();
        if parts.len() < k {
            parts.resize(k, 0);
        }
        parts[k - 1] += 1;
        Self::new(parts)
    }

    /// `s - e_k`.
    ///
    /// # Panics
    /// If `s_k = 0`.
    pub fn minus_unit(&self, k: usize) -> Self {
        let mut parts = self.parts.clone();
        assert!(self.get(k) > 0, "no order-{k} entry to remove");
        parts[k - 1] -= 1;
        Self::new(parts)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.parts.len() <= other.parts.len() && self.parts.iter().zip(&other.parts).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if !other.le(self) {
            return None;
        }
        let parts = self
            .parts
            .iter()
            .enumerate()
            .map(|(i, &a)| a - other.parts.get(i).copied().unwrap_or(0))
            .collect();
        Some(Self::new(parts))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let len = self.parts.len().max(other.parts.len());
        let parts = (0..len)
            .map(|i| self.parts.get(i).copied().unwrap_or(0) + other.parts.get(i).copied().unwrap_or(0))
            .collect();
        Self::new(parts)
    }
}

impl From<Vec<u32>> for TangencySeq {
    fn from(parts: Vec<u32>) -> Self {
        Self::new(parts)
    }
}

impl fmt::Display for TangencySeq {
    /// Comma-separated parts, e.g. `2,0,1`; the empty sequence prints as `""`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for TangencySeq {
    type Err = TangencyError;

    /// Accepts the comma-separated text form. `""` and `"-"` denote `()`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Self::empty());
        }
        s.split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
            .map_err(|_| TangencyError::Parse(s.to_owned()))
    }
}

impl Serialize for TangencySeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TangencySeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn binomial_u64(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `Π_k C(s_k, t_k)`; zero unless `t ≤ s` componentwise.
pub fn seq_binomial(s: &TangencySeq, t: &TangencySeq) -> BigUint {
    if !t.le(s) {
        return BigUint::ZERO;
    }
    s.parts
        .iter()
        .enumerate()
        .map(|(i, &a)| binomial_u64(a as u64, t.parts.get(i).copied().unwrap_or(0) as u64))
        .product()
}

/// `I^s = Π_k k^{s_k}`.
pub fn seq_weighted_power(s: &TangencySeq) -> BigUint {
    s.parts
        .iter()
        .enumerate()
        .map(|(i, &c)| BigUint::from(i as u64 + 1).pow(c))
        .product()
}

/// A node of the recursion: degree, node count and tangency data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChState {
    pub d: u32,
    pub delta: u32,
    pub alpha: TangencySeq,
    pub beta: TangencySeq,
}

impl ChState {
    pub fn new(d: u32, delta: u32, alpha: TangencySeq, beta: TangencySeq) -> Result<Self, TangencyError> {
        let st = ChState { d, delta, alpha, beta };
        st.validate()?;
        Ok(st)
    }

    /// The absolute state `α = (), β = (d)`.
    pub fn absolute(d: u32, delta: u32) -> Result<Self, TangencyError> {
        Self::new(d, delta, TangencySeq::empty(), TangencySeq::ones(d))
    }

    pub fn validate(&self) -> Result<(), TangencyError> {
        if self.d == 0 {
            return Err(TangencyError::ZeroDegree);
        }
        let weight = self.alpha.weight() + self.beta.weight();
        if weight != self.d as u64 {
            return Err(TangencyError::InvalidState { d: self.d, weight });
        }
        Ok(())
    }

    /// Number of general points the curves must pass through:
    /// `d(d+3)/2 − δ − d + |β|`.
    pub fn point_count(&self) -> Result<i64, TangencyError> {
        self.validate()?;
        Ok(self.point_count_unchecked())
    }

    pub(crate) fn point_count_unchecked(&self) -> i64 {
        let d = self.d as i64;
        d * (d + 3) / 2 - self.delta as i64 - d + self.beta.size() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: &[u32]) -> TangencySeq {
        TangencySeq::new(p.to_vec())
    }

    #[test]
    fn weight_and_size() {
        assert_eq!(t(&[2]).weight(), 2);
        assert_eq!(t(&[0, 1]).weight(), 2);
        assert_eq!(t(&[]).weight(), 0);
        assert_eq!(t(&[2]).size(), 2);
        assert_eq!(t(&[0, 1]).size(), 1);
        assert_eq!(t(&[]).size(), 0);
    }

    #[test]
    fn binomial_and_power() {
        assert_eq!(seq_binomial(&t(&[2, 1]), &t(&[1, 1])), BigUint::from(2u32));
        let s = t(&[3, 0, 2]);
        assert_eq!(seq_binomial(&s, &s), BigUint::one());
        assert_eq!(seq_binomial(&t(&[3]), &t(&[5])), BigUint::ZERO);
        assert_eq!(seq_binomial(&t(&[3]), &t(&[0, 1])), BigUint::ZERO);
        assert_eq!(seq_weighted_power(&t(&[])), BigUint::one());
        assert_eq!(seq_weighted_power(&t(&[0, 2])), BigUint::from(4u32));
        assert_eq!(seq_weighted_power(&t(&[1, 1])), BigUint::from(2u32));
    }

    #[test]
    fn point_count_examples() {
        assert_eq!(ChState::absolute(2, 0).unwrap().point_count().unwrap(), 5);
        assert_eq!(ChState::absolute(1, 0).unwrap().point_count().unwrap(), 2);
        let st = ChState {
            d: 2,
            delta: 1,
            alpha: t(&[1]),
            beta: t(&[1]),
        };
        assert_eq!(st.point_count().unwrap(), 3);
        let bad = ChState {
            d: 3,
            delta: 0,
            alpha: t(&[1]),
            beta: t(&[1]),
        };
        assert_eq!(bad.point_count(), Err(TangencyError::InvalidState { d: 3, weight: 2 }));
    }

    #[test]
    fn canonical_form_trims_trailing_zeros() {
        assert_eq!(t(&[2, 0, 1, 0, 0]), t(&[2, 0, 1]));
        assert_eq!(t(&[0, 0]), TangencySeq::empty());
        assert_eq!(t(&[0, 1]).minus_unit(2), TangencySeq::empty());
    }

    #[test]
    fn text_form() {
        assert_eq!(t(&[2, 0, 1]).to_string(), "2,0,1");
        assert_eq!(TangencySeq::empty().to_string(), "");
        assert_eq!("2,0,1".parse::<TangencySeq>().unwrap(), t(&[2, 0, 1]));
        assert_eq!("".parse::<TangencySeq>().unwrap(), TangencySeq::empty());
        assert_eq!("-".parse::<TangencySeq>().unwrap(), TangencySeq::empty());
        assert_eq!("1,0".parse::<TangencySeq>().unwrap(), t(&[1]));
        assert!("1,x".parse::<TangencySeq>().is_err());
    }

    #[test]
    fn componentwise_order() {
        assert!(t(&[1]).le(&t(&[2, 1])));
        assert!(!t(&[0, 0, 1]).le(&t(&[2, 1])));
        assert_eq!(t(&[2, 1]).checked_sub(&t(&[1, 1])), Some(t(&[1])));
        assert_eq!(t(&[2]).checked_sub(&t(&[0, 1])), None);
        assert_eq!(t(&[1]).sum(&t(&[0, 2])), t(&[1, 2]));
    }

    proptest::proptest! {
        #[test]
        fn trailing_zeros_never_matter(parts in proptest::collection::vec(0u32..5, 0..6), pad in 0usize..4) {
            let mut padded = parts.clone();
            padded.extend(std::iter::repeat_n(0, pad));
            proptest::prop_assert_eq!(TangencySeq::new(padded), TangencySeq::new(parts));
        }
    }
}
