//! The fixed quasimodular series of the Göttsche–Yau–Zaslow formula.
//!
//! With `G₂ = −1/24 + Σ σ₁(n) qⁿ`, `D = q d/dq` and
//! `Δ = q Π (1 − qⁿ)²⁴`:
//!
//! - `u  = D G₂`
//! - `B₃ = D G₂ / q`
//! - `B₄ = Δ · D²G₂ / q²`

use num_traits::{One, Zero};
use serde::Serialize;

use crate::exactseries::{rat_int, Rat, RatSeries};

/// Sum of the divisors of `n`.
pub fn sigma1(n: u64) -> u64 {
    assert!(n >= 1, "sigma1 is defined for n >= 1");
    let mut total = 0;
    let mut k = 1;
    while k * k <= n {
        if n.is_multiple_of(k) {
            total += k;
            if k * k != n {
                total += n / k;
            }
        }
        k += 1;
    }
    total
}

/// `Σ_{n≥1} n^power · σ₁(n) qⁿ` to order `order`, i.e. `D^power G₂` without
/// its constant term.
fn derived_g2(order: usize, power: u32) -> RatSeries {
    let coeffs = (0..=order)
        .map(|n| {
            if n == 0 {
                Rat::zero()
            } else {
                rat_int((n as i64).pow(power) * sigma1(n as u64) as i64)
            }
        })
        .collect();
    RatSeries::new(coeffs)
}

/// `u = D G₂ = q + 6q² + 12q³ + 28q⁴ + …`
pub fn u_series(order: usize) -> RatSeries {
    derived_g2(order, 1)
}

/// `Δ = q Π_{n≥1} (1 − qⁿ)²⁴`.
pub fn delta_series(order: usize) -> RatSeries {
    // Euler product to order M-1 suffices after the shift by q
    let inner = order.saturating_sub(1);
    let mut euler = RatSeries::one(inner);
    for n in 1..=inner {
        let mut factor = vec![Rat::zero(); inner + 1];
        factor[0] = Rat::one();
        factor[n] = rat_int(-1);
        euler = euler.mul_series(&RatSeries::new(factor));
    }
    let mut power = RatSeries::one(inner);
    for _ in 0..24 {
        power = power.mul_series(&euler);
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(Rat::zero());
    coeffs.extend(power.into_coeffs().into_iter().take(order));
    RatSeries::from_coeffs_with_order(coeffs, order)
}

/// `B₃ = D G₂ / q`; `B₃[m] = (m+1) σ₁(m+1)`.
pub fn b3_series(order: usize) -> RatSeries {
    u_series(order + 1).shift_down(1)
}

/// `B₄ = (Δ / q) · (D²G₂ / q)`.
pub fn b4_series(order: usize) -> RatSeries {
    let delta_q = delta_series(order + 1).shift_down(1);
    let d2g2_q = derived_g2(order + 1, 2).shift_down(1);
    delta_q.mul_series(&d2g2_q)
}

/// All fixed series at a common truncation order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormCatalog {
    pub order: usize,
    pub u: RatSeries,
    pub b3: RatSeries,
    pub b4: RatSeries,
    #[serde(rename = "delta")]
    pub delta_form: RatSeries,
}

impl FormCatalog {
    pub fn new(order: usize) -> Self {
        FormCatalog {
            order,
            u: u_series(order),
            b3: b3_series(order),
            b4: b4_series(order),
            delta_form: delta_series(order),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.u.is_integral() && self.b3.is_integral() && self.b4.is_integral() && self.delta_form.is_integral()
    }
}
