//! Node polynomials `T_δ(d)`, their thresholds, and the exponential (Bell)
//! structure of their generating function.
//!
//! `T_δ` is fitted by exact interpolation of Severi degrees at
//! `d = δ+2, …, 3δ+2` and checked at `d = 3δ+3`. The logarithm of
//! `Σ_δ T_δ(d) u^δ` has coefficients `q_κ(d)/κ!` with each `q_κ` quadratic
//! in `d`; these are the plane restrictions of linear forms in the surface
//! invariants `(x, y, z, t) = (d², −3d, 9, 3)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::chengine::{severi_degree, CacheStore, ChError};
use crate::exactseries::{rat_int, rat_vec_string, Rat, RatSeries};

#[derive(Debug, Error)]
pub enum NodePolyError {
    #[error(transparent)]
    Engine(#[from] ChError),
    #[error("node polynomial T_{delta} predicts {predicted} at d = {d}, recursion gives {actual}")]
    DegreeCheckFailed {
        delta: u32,
        d: u32,
        predicted: Rat,
        actual: BigInt,
    },
    #[error("interpolated T_{delta} has degree below {expected}")]
    DegreeDeficient { delta: u32, expected: usize },
    #[error("q_{kappa}(d) is not quadratic: coefficient of d^{power} is {coeff}")]
    NotQuadratic { kappa: usize, power: usize, coeff: Rat },
    #[error("invalid invariants ({x}, {y}, {z}, {t}): {reason}")]
    InvalidInvariants {
        x: i64,
        y: i64,
        z: i64,
        t: i64,
        reason: &'static str,
    },
}

/// Numerical invariants `x = L², y = L·K, z = K², t = c₂(S)` of a line
/// bundle `L` on a surface `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub t: i64,
}

impl Invariants {
    pub fn validate(&self) -> Result<(), NodePolyError> {
        let err = |reason| NodePolyError::InvalidInvariants {
            x: self.x,
            y: self.y,
            z: self.z,
            t: self.t,
            reason,
        };
        if (self.z + self.t).rem_euclid(12) != 0 {
            return Err(err("z + t must be divisible by 12"));
        }
        if (self.x - self.y).rem_euclid(2) != 0 {
            return Err(err("x and y must have the same parity"));
        }
        Ok(())
    }

    /// `ν = χ(O_S) = (z + t)/12`.
    pub fn nu(&self) -> Result<i64, NodePolyError> {
        self.validate()?;
        Ok((self.z + self.t) / 12)
    }

    /// `χ(L) = (x − y)/2 + ν`.
    pub fn chi(&self) -> Result<i64, NodePolyError> {
        Ok((self.x - self.y) / 2 + self.nu()?)
    }
}

/// `(d², −3d, 9, 3)`.
pub fn plane_invariants(d: u32) -> Invariants {
    let d = d as i64;
    Invariants {
        x: d * d,
        y: -3 * d,
        z: 9,
        t: 3,
    }
}

/// Newton divided differences on exact data, returned in monomial form
/// (lowest degree first).
pub fn interpolate(points: &[(Rat, Rat)]) -> Vec<Rat> {
    let n = points.len();
    assert!(n > 0, "need at least one point");
    let xs: Vec<&Rat> = points.iter().map(|(x, _)| x).collect();
    let mut table: Vec<Rat> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &table[i] - &table[i - 1];
            let den = xs[i] - xs[i - level];
            table[i] = num / den;
        }
    }
    // expand Σ c_k Π_{j<k} (x − x_j) by Horner from the top
    let mut coeffs = vec![Rat::zero(); n];
    coeffs[0] = table[n - 1].clone();
    for (len, k) in (1..).zip((0..n - 1).rev()) {
        // coeffs ← coeffs · (x − x_k) + table[k]
        for i in (0..=len).rev() {
            let shifted = if i > 0 { coeffs[i - 1].clone() } else { Rat::zero() };
            let scaled = if i < len { &coeffs[i] * xs[k] } else { Rat::zero() };
            coeffs[i] = shifted - scaled;
        }
        coeffs[0] += &table[k];
    }
    coeffs
}

/// Horner evaluation of a coefficient list (lowest degree first).
pub fn eval_poly(coeffs: &[Rat], x: &Rat) -> Rat {
    coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodePolynomial {
    pub delta: u32,
    /// Coefficients of `d⁰ … d^{2δ}`.
    #[serde(with = "rat_vec_string")]
    pub coeffs: Vec<Rat>,
    pub fit_range: Vec<u32>,
    #[serde(rename = "verified")]
    pub verified_extra: bool,
}

impl NodePolynomial {
    pub fn evaluate(&self, d: &Rat) -> Rat {
        eval_poly(&self.coeffs, d)
    }

    pub fn evaluate_at(&self, d: i64) -> Rat {
        self.evaluate(&rat_int(d))
    }

    pub fn leading_coefficient(&self) -> &Rat {
        self.coeffs.last().expect("non-empty")
    }
}

pub fn evaluate(p: &NodePolynomial, d: i64) -> Rat {
    p.evaluate_at(d)
}

/// The sampling window `[δ+2, 3δ+2]` and the extra check degree `3δ+3`.
pub fn fit_window(delta: u32) -> (std::ops::RangeInclusive<u32>, u32) {
    (delta + 2..=3 * delta + 2, 3 * delta + 3)
}

pub fn fit_node_polynomial(delta: u32, cache: &CacheStore) -> Result<NodePolynomial, NodePolyError> {
    let (window, extra) = fit_window(delta);
    let points = window
        .clone()
        .map(|d| {
            Ok((
                rat_int(d as i64),
                Rat::from_integer(severi_degree(d, delta, cache)?.into()),
            ))
        })
        .collect::<Result<Vec<_>, ChError>>()?;
    let coeffs = interpolate(&points);
    let expected_degree = 2 * delta as usize;
    if coeffs[expected_degree].is_zero() {
        return Err(NodePolyError::DegreeDeficient {
            delta,
            expected: expected_degree,
        });
    }
    let actual: BigInt = severi_degree(extra, delta, cache)?.into();
    let predicted = eval_poly(&coeffs, &rat_int(extra as i64));
    if predicted != Rat::from_integer(actual.clone()) {
        return Err(NodePolyError::DegreeCheckFailed {
            delta,
            d: extra,
            predicted,
            actual,
        });
    }
    Ok(NodePolynomial {
        delta,
        coeffs,
        fit_range: window.collect(),
        verified_extra: true,
    })
}

/// Degree at which the node polynomial first fails, seen from above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdWitness {
    pub d: u32,
    pub polynomial: Rat,
    pub severi: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdReport {
    pub delta: u32,
    pub threshold: u32,
    /// The mismatch at `threshold − 1`; `None` when the threshold is 1.
    pub witness: Option<ThresholdWitness>,
}

/// Least `d* ≥ 1` with `T_δ(d) = N^{d,δ}` for every `d ∈ [d*, 3δ+3]`.
pub fn threshold(delta: u32, cache: &CacheStore) -> Result<ThresholdReport, NodePolyError> {
    let poly = fit_node_polynomial(delta, cache)?;
    let (_, extra) = fit_window(delta);
    for d in (1..=extra).rev() {
        let severi: BigInt = severi_degree(d, delta, cache)?.into();
        let value = poly.evaluate_at(d as i64);
        if value != Rat::from_integer(severi.clone()) {
            return Ok(ThresholdReport {
                delta,
                threshold: d + 1,
                witness: Some(ThresholdWitness {
                    d,
                    polynomial: value,
                    severi,
                }),
            });
        }
    }
    Ok(ThresholdReport {
        delta,
        threshold: 1,
        witness: None,
    })
}

/// `q_κ(d) = a2·d² + a1·d + a0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogForm {
    pub kappa: usize,
    #[serde(with = "crate::exactseries::rat_string")]
    pub a2: Rat,
    #[serde(with = "crate::exactseries::rat_string")]
    pub a1: Rat,
    #[serde(with = "crate::exactseries::rat_string")]
    pub a0: Rat,
}

impl LogForm {
    pub fn evaluate_at(&self, d: i64) -> Rat {
        eval_poly(&[self.a0.clone(), self.a1.clone(), self.a2.clone()], &rat_int(d))
    }

    /// `a2 ∈ Z`, `a1 ∈ 3Z`, `a0 ∈ 3Z`: the plane image of integer linear
    /// forms in `(x, y, z, t)`.
    pub fn integrality_pattern_holds(&self) -> bool {
        let three = BigInt::from(3);
        let div3 = |r: &Rat| r.is_integer() && r.to_integer().is_multiple_of(&three);
        self.a2.is_integer() && div3(&self.a1) && div3(&self.a0)
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Node polynomials `T_0 … T_{δmax}`.
pub fn node_polynomials(delta_max: u32, cache: &CacheStore) -> Result<Vec<NodePolynomial>, NodePolyError> {
    (0..=delta_max).map(|delta| fit_node_polynomial(delta, cache)).collect()
}

/// `Σ_{δ ≤ δmax} T_δ(d) u^δ` as a series of order `δmax`.
pub fn node_generating_series(polys: &[NodePolynomial], d: i64) -> RatSeries {
    RatSeries::new(polys.iter().map(|p| p.evaluate_at(d)).collect())
}

/// Quadratic forms `q_1 … q_{δmax}` with `q_κ(d) = κ!·[u^κ] log Σ_δ T_δ(d) u^δ`.
pub fn log_forms(delta_max: u32, cache: &CacheStore) -> Result<Vec<LogForm>, NodePolyError> {
    let polys = node_polynomials(delta_max, cache)?;
    log_forms_from(&polys)
}

pub fn log_forms_from(polys: &[NodePolynomial]) -> Result<Vec<LogForm>, NodePolyError> {
    let kappa_max = polys.len() - 1;
    // q_κ has degree ≤ 2κ in d, so 2κ+1 samples determine it exactly
    let samples = (2 * kappa_max + 1).max(4);
    let logs: Vec<(i64, RatSeries)> = (1..=samples as i64)
        .map(|d| {
            let log = node_generating_series(polys, d)
                .log()
                .expect("T_0 = 1 gives constant term 1");
            (d, log)
        })
        .collect();
    let mut forms = Vec::with_capacity(kappa_max);
    for kappa in 1..=kappa_max {
        let kfact = Rat::from_integer(factorial(kappa));
        let n_points = (2 * kappa + 1).max(4);
        let points: Vec<(Rat, Rat)> = logs[..n_points]
            .iter()
            .map(|(d, log)| (rat_int(*d), log.coeff(kappa) * &kfact))
            .collect();
        let coeffs = interpolate(&points);
        if let Some((power, coeff)) = coeffs.iter().enumerate().skip(3).find(|(_, c)| !c.is_zero()) {
            return Err(NodePolyError::NotQuadratic {
                kappa,
                power,
                coeff: coeff.clone(),
            });
        }
        forms.push(LogForm {
            kappa,
            a0: coeffs[0].clone(),
            a1: coeffs[1].clone(),
            a2: coeffs[2].clone(),
        });
    }
    Ok(forms)
}

/// Complete exponential Bell polynomial `P_δ(a₁, …, a_δ)`, i.e.
/// `δ!·[u^δ] exp(Σ_κ a_κ u^κ/κ!)`. `a[0]` holds `a₁`.
///
/// # Panics
/// If fewer than `δ` arguments are supplied.
pub fn bell_polynomial(delta: usize, a: &[Rat]) -> Rat {
    assert!(a.len() >= delta, "P_{delta} needs {delta} arguments, got {}", a.len());
    let mut coeffs = vec![Rat::zero(); delta + 1];
    for kappa in 1..=delta {
        coeffs[kappa] = &a[kappa - 1] / Rat::from_integer(factorial(kappa));
    }
    let e = RatSeries::new(coeffs).exp().expect("zero constant term");
    e.coeff(delta) * Rat::from_integer(factorial(delta))
}

/// `n_δ(d) = P_δ(q₁(d), …, q_δ(d))/δ!` for `δ ≤ δmax`.
///
/// # Panics
/// If `forms` does not cover every `κ ≤ δmax`.
pub fn reconstruct_from_log_forms(delta_max: usize, d: i64, forms: &[LogForm]) -> Vec<Rat> {
    assert!(forms.len() >= delta_max, "log forms must cover kappa <= {delta_max}");
    let args: Vec<Rat> = forms[..delta_max].iter().map(|f| f.evaluate_at(d)).collect();
    (0..=delta_max)
        .map(|delta| bell_polynomial(delta, &args) / Rat::from_integer(factorial(delta)))
        .collect()
}
