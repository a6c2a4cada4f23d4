//! Göttsche–Yau–Zaslow pipeline:
//!
//! ```text
//! Σ n_δ u(q)^δ = B₁(q)^z · B₂(q)^y · B₃(q)^χ · B₄(q)^(−ν/2)
//! ```
//!
//! Plane data fixes `z = 9`, `y = −3d`, `ν = 1`, so taking logarithms leaves,
//! order by order, a linear system `9·ℓ₁[m] − 3d·ℓ₂[m] = R_d[m]` in the
//! coefficients of `ℓᵢ = log Bᵢ`, one equation per degree `d`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::chengine::{severi_degree, CacheStore, ChError};
use crate::exactseries::{rat_frac, rat_int, Rat, RatSeries, SeriesError};
use crate::modforms::FormCatalog;
use crate::nodepoly::{plane_invariants, Invariants, NodePolyError};

#[derive(Debug, Error)]
pub enum GyzError {
    #[error(transparent)]
    Engine(#[from] ChError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("degree {d} is too small for order {order}: need d >= {}", order + 1)]
    DegreeTooSmall { d: u32, order: usize },
    #[error("need at least two distinct degrees, got {0:?}")]
    InvalidDegreeList(Vec<u32>),
    #[error("form catalog has order {have}, need {need}")]
    FormsTooShort { have: usize, need: usize },
    #[error("solution has order {have}, prediction needs {need}")]
    SolutionTooShort { have: usize, need: usize },
    #[error("inconsistent system at q^{order}: {detail}")]
    InconsistentSystem {
        order: usize,
        detail: Box<PairDisagreement>,
    },
    #[error("predicted n_{delta} = {value} is not an integer")]
    NonIntegralPrediction { delta: usize, value: Rat },
    #[error(transparent)]
    InvalidInvariants(#[from] NodePolyError),
}

/// Two degree pairs solving to different `(ℓ₁, ℓ₂)` at the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDisagreement {
    pub pair: (u32, u32),
    pub l1: Rat,
    pub l2: Rat,
    pub reference: (u32, u32),
    pub ref_l1: Rat,
    pub ref_l2: Rat,
}

impl std::fmt::Display for PairDisagreement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "degrees {:?} give (l1, l2) = ({}, {}), degrees {:?} give ({}, {})",
            self.pair, self.l1, self.l2, self.reference, self.ref_l1, self.ref_l2
        )
    }
}

/// `Σ_{δ≤M} N^{d,δ} u(q)^δ  mod q^{M+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneSeries {
    pub d: u32,
    pub series: RatSeries,
}

fn check_forms(forms: &FormCatalog, order: usize) -> Result<(), GyzError> {
    if forms.order < order {
        return Err(GyzError::FormsTooShort {
            have: forms.order,
            need: order,
        });
    }
    Ok(())
}

pub fn plane_generating_series(
    d: u32,
    order: usize,
    cache: &CacheStore,
    forms: &FormCatalog,
) -> Result<PlaneSeries, GyzError> {
    if (d as usize) < order + 1 {
        return Err(GyzError::DegreeTooSmall { d, order });
    }
    check_forms(forms, order)?;
    let counts = (0..=order as u32)
        .map(|delta| Ok(Rat::from_integer(severi_degree(d, delta, cache)?.into())))
        .collect::<Result<Vec<_>, ChError>>()?;
    let series = RatSeries::new(counts).compose(&forms.u.truncate(order))?;
    Ok(PlaneSeries { d, series })
}

/// Record that every pair of degrees produced the same solution at one order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderCertificate {
    pub order: usize,
    pub pairs_checked: usize,
    pub agreed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BSeriesSolution {
    pub order: usize,
    pub b1: RatSeries,
    pub b2: RatSeries,
    pub d_used: Vec<u32>,
    pub consistent: bool,
    pub integral: bool,
    #[serde(skip)]
    pub log_b1: RatSeries,
    #[serde(skip)]
    pub log_b2: RatSeries,
    #[serde(skip)]
    pub certificates: Vec<OrderCertificate>,
}

/// `log(plane series) − χ(d)·log B₃ + ½·log B₄`, which equals
/// `9·ℓ₁ − 3d·ℓ₂`.
fn reduced_log(
    d: u32,
    order: usize,
    cache: &CacheStore,
    forms: &FormCatalog,
    log_b3: &RatSeries,
    log_b4: &RatSeries,
) -> Result<RatSeries, GyzError> {
    let plane = plane_generating_series(d, order, cache, forms)?;
    let chi = plane_invariants(d).chi()?;
    let r = &plane.series.log()? - &log_b3.scale(&rat_int(chi));
    Ok(&r + &log_b4.scale(&rat_frac(1, 2)))
}

/// Solves `9ℓ₁ − 3dᵢℓ₂ = rᵢ`, `9ℓ₁ − 3dⱼℓ₂ = rⱼ`.
fn solve_pair(di: u32, ri: &Rat, dj: u32, rj: &Rat) -> (Rat, Rat) {
    let l2 = (ri - rj) / rat_int(3 * (dj as i64 - di as i64));
    let l1 = (ri + &l2 * rat_int(3 * di as i64)) / rat_int(9);
    (l1, l2)
}

/// Extracts `B₁`, `B₂` to order `M` from plane Severi degrees of the given
/// degrees, requiring every pair of degrees to agree exactly.
pub fn extract_b_series(
    order: usize,
    d_list: &[u32],
    cache: &CacheStore,
    forms: &FormCatalog,
) -> Result<BSeriesSolution, GyzError> {
    let mut degrees = d_list.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.len() < 2 || degrees.len() != d_list.len() {
        return Err(GyzError::InvalidDegreeList(d_list.to_vec()));
    }
    if let Some(&d) = degrees.iter().find(|&&d| (d as usize) < order + 1) {
        return Err(GyzError::DegreeTooSmall { d, order });
    }
    check_forms(forms, order)?;

    let log_b3 = forms.b3.truncate(order).log()?;
    let log_b4 = forms.b4.truncate(order).log()?;
    let reduced = degrees
        .iter()
        .map(|&d| reduced_log(d, order, cache, forms, &log_b3, &log_b4))
        .collect::<Result<Vec<_>, _>>()?;

    let mut l1 = vec![Rat::zero(); order + 1];
    let mut l2 = vec![Rat::zero(); order + 1];
    let mut certificates = Vec::with_capacity(order);
    for m in 1..=order {
        let mut reference: Option<((u32, u32), (Rat, Rat))> = None;
        let mut pairs_checked = 0;
        for i in 0..degrees.len() {
            for j in i + 1..degrees.len() {
                let sol = solve_pair(degrees[i], reduced[i].coeff(m), degrees[j], reduced[j].coeff(m));
                pairs_checked += 1;
                match &reference {
                    None => reference = Some(((degrees[i], degrees[j]), sol)),
                    Some((ref_pair, ref_sol)) if *ref_sol != sol => {
                        return Err(GyzError::InconsistentSystem {
                            order: m,
                            detail: Box::new(PairDisagreement {
                                pair: (degrees[i], degrees[j]),
                                l1: sol.0,
                                l2: sol.1,
                                reference: *ref_pair,
                                ref_l1: ref_sol.0.clone(),
                                ref_l2: ref_sol.1.clone(),
                            }),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        let (_, (a, b)) = reference.expect("at least one pair");
        l1[m] = a;
        l2[m] = b;
        certificates.push(OrderCertificate {
            order: m,
            pairs_checked,
            agreed: true,
        });
    }

    let log_b1 = RatSeries::new(l1);
    let log_b2 = RatSeries::new(l2);
    let b1 = log_b1.exp()?;
    let b2 = log_b2.exp()?;
    let integral = b1.is_integral() && b2.is_integral();
    Ok(BSeriesSolution {
        order,
        b1,
        b2,
        d_used: degrees,
        consistent: certificates.iter().all(|c| c.agreed),
        integral,
        log_b1,
        log_b2,
        certificates,
    })
}

/// Default extraction degrees `M+1, …, M+5`.
pub fn default_degrees(order: usize) -> Vec<u32> {
    (order as u32 + 1..=order as u32 + 5).collect()
}

/// Reads `n_0 … n_M` off the right-hand side for arbitrary invariants.
pub fn gyz_predict(
    inv: &Invariants,
    sol: &BSeriesSolution,
    forms: &FormCatalog,
    order: usize,
) -> Result<Vec<BigInt>, GyzError> {
    if order > sol.order {
        return Err(GyzError::SolutionTooShort {
            have: sol.order,
            need: order,
        });
    }
    check_forms(forms, order)?;
    let chi = inv.chi()?;
    let nu = inv.nu()?;
    let log_rhs = &(&sol.log_b1.truncate(order).scale(&rat_int(inv.z))
        + &sol.log_b2.truncate(order).scale(&rat_int(inv.y)))
        + &(&forms.b3.truncate(order).log()?.scale(&rat_int(chi))
            - &forms.b4.truncate(order).log()?.scale(&rat_frac(nu, 2)));
    let rhs = log_rhs.exp()?;
    let in_u = rhs.compose(&forms.u.truncate(order).revert()?)?;
    in_u.coeffs()
        .iter()
        .enumerate()
        .map(|(delta, v)| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(GyzError::NonIntegralPrediction {
                    delta,
                    value: v.clone(),
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(order: usize) -> (CacheStore, FormCatalog) {
        (CacheStore::new(), FormCatalog::new(order))
    }

    #[test]
    fn plane_series_examples() {
        let (c, f) = setup(3);
        assert_eq!(
            plane_generating_series(2, 1, &c, &f).unwrap().series,
            RatSeries::from_ints(&[1, 3])
        );
        assert_eq!(
            plane_generating_series(3, 1, &c, &f).unwrap().series,
            RatSeries::from_ints(&[1, 12])
        );
        assert_eq!(
            plane_generating_series(5, 0, &c, &f).unwrap().series,
            RatSeries::from_ints(&[1])
        );
        assert!(matches!(
            plane_generating_series(2, 2, &c, &f),
            Err(GyzError::DegreeTooSmall { d: 2, order: 2 })
        ));
        assert!(matches!(
            plane_generating_series(9, 5, &c, &f),
            Err(GyzError::FormsTooShort { have: 3, need: 5 })
        ));
    }

    #[test]
    fn first_order_hand_solve() {
        let (c, f) = setup(1);
        let sol = extract_b_series(1, &[2, 3], &c, &f).unwrap();
        assert_eq!(sol.b1, RatSeries::from_ints(&[1, -1]));
        assert_eq!(sol.b2, RatSeries::from_ints(&[1, 5]));
        assert!(sol.consistent && sol.integral);
        let over = extract_b_series(1, &[2, 3, 4], &c, &f).unwrap();
        assert_eq!((over.b1.clone(), over.b2.clone()), (sol.b1, sol.b2));
        assert_eq!(over.certificates[0].pairs_checked, 3);
    }

    #[test]
    fn order_zero_is_trivial() {
        let (c, f) = setup(0);
        let sol = extract_b_series(0, &[1, 4], &c, &f).unwrap();
        assert_eq!(sol.b1, RatSeries::one(0));
        assert_eq!(sol.b2, RatSeries::one(0));
        assert!(sol.certificates.is_empty());
    }

    #[test]
    fn degree_list_validation() {
        let (c, f) = setup(3);
        assert!(matches!(
            extract_b_series(3, &[5], &c, &f),
            Err(GyzError::InvalidDegreeList(_))
        ));
        assert!(matches!(
            extract_b_series(3, &[5, 5], &c, &f),
            Err(GyzError::InvalidDegreeList(_))
        ));
        assert!(matches!(
            extract_b_series(3, &[3, 5], &c, &f),
            Err(GyzError::DegreeTooSmall { d: 3, order: 3 })
        ));
    }

    #[test]
    fn wrong_forms_are_caught() {
        let (c, mut f) = setup(3);
        // χ is quadratic in d, so a wrong B₃ cannot be absorbed by B₁, B₂
        let mut coeffs = f.b3.coeffs().to_vec();
        coeffs[2] += rat_int(1);
        f.b3 = RatSeries::new(coeffs);
        assert!(matches!(
            extract_b_series(3, &[4, 5, 6], &c, &f),
            Err(GyzError::InconsistentSystem { order: 2, .. })
        ));
    }

    #[test]
    fn predictions_for_the_plane() {
        let (c, f) = setup(4);
        let sol = extract_b_series(4, &default_degrees(4), &c, &f).unwrap();
        let at2 = gyz_predict(&plane_invariants(2), &sol, &f, 1).unwrap();
        assert_eq!(at2, vec![BigInt::from(1), BigInt::from(3)]);
        let at1 = gyz_predict(&plane_invariants(1), &sol, &f, 3).unwrap();
        assert_eq!(at1[3], BigInt::from(75));
        assert_eq!(severi_degree(1, 3, &c).unwrap(), 0u32.into());
        let held_out = gyz_predict(&plane_invariants(11), &sol, &f, 4).unwrap();
        for (delta, n) in held_out.iter().enumerate() {
            assert_eq!(*n, severi_degree(11, delta as u32, &c).unwrap().into());
        }
        assert!(matches!(
            gyz_predict(&plane_invariants(11), &sol, &f, 5),
            Err(GyzError::SolutionTooShort { .. })
        ));
        let bad = Invariants { x: 1, y: 0, z: 9, t: 3 };
        assert!(matches!(
            gyz_predict(&bad, &sol, &f, 2),
            Err(GyzError::InvalidInvariants(_))
        ));
    }

    #[test]
    fn json_shape() {
        let (c, f) = setup(1);
        let sol = extract_b_series(1, &[2, 3], &c, &f).unwrap();
        let json = serde_json::to_string(&sol).unwrap();
        assert_eq!(
            json,
            r#"{"order":1,"b1":["1","-1"],"b2":["1","5"],"d_used":[2,3],"consistent":true,"integral":true}"#
        );
    }
}
