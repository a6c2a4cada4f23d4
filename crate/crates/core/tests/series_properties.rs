use num_traits::{One, Zero};
use proptest::prelude::*;
use severi_core::exactseries::{rat_frac, rat_int, Rat, RatSeries};

fn series_from(coeffs: Vec<i64>) -> RatSeries {
    RatSeries::from_ints(&coeffs)
}

/// Schoolbook convolution, written out independently of the library.
fn naive_mul(a: &[Rat], b: &[Rat], order: usize) -> Vec<Rat> {
    (0..=order)
        .map(|m| (0..=m).fold(Rat::zero(), |acc, i| acc + &a[i] * &b[m - i]))
        .collect()
}

/// `Σ_k a^k / k!`, summed term by term.
fn exp_oracle(a: &[Rat]) -> Vec<Rat> {
    let order = a.len() - 1;
    let mut total = vec![Rat::zero(); order + 1];
    total[0] = Rat::one();
    let mut power = total.clone();
    let mut fact = Rat::one();
    for k in 1..=order {
        power = naive_mul(&power, a, order);
        fact *= rat_int(k as i64);
        for (t, p) in total.iter_mut().zip(&power) {
            *t += p / &fact;
        }
    }
    total
}

fn naive_inv(a: &[Rat]) -> Vec<Rat> {
    let mut out = vec![a[0].recip()];
    for m in 1..a.len() {
        let s = (1..=m).fold(Rat::zero(), |acc, k| acc + &a[k] * &out[m - k]);
        out.push(-s / &a[0]);
    }
    out
}

/// Lagrange inversion: `[q^n] g⁻¹ = (1/n) [w^{n−1}] (w/g(w))^n`.
fn lagrange_revert(g: &[Rat]) -> Vec<Rat> {
    let order = g.len() - 1;
    // g(w)/w, known to order M−1
    let g_over_w: Vec<Rat> = g[1..].to_vec();
    let phi = naive_inv(&g_over_w);
    let mut out = vec![Rat::zero(); order + 1];
    let mut power = vec![Rat::zero(); order];
    power[0] = Rat::one();
    for n in 1..=order {
        power = naive_mul(&power, &phi, order - 1);
        out[n] = &power[n - 1] / rat_int(n as i64);
    }
    out
}

#[test]
fn exp_of_q_plus_q2() {
    let a = series_from(vec![0, 1, 1, 0]);
    let expected = RatSeries::new(vec![rat_int(1), rat_int(1), rat_frac(3, 2), rat_frac(7, 6)]);
    assert_eq!(RatSeries::new(exp_oracle(a.coeffs())), expected);
    assert_eq!(a.exp().unwrap(), expected);
}

#[test]
fn revert_q_plus_q2_matches_lagrange() {
    let g = series_from(vec![0, 1, 1, 0, 0, 0, 0, 0]);
    let oracle = lagrange_revert(g.coeffs());
    assert_eq!(g.revert().unwrap().coeffs(), &oracle[..]);
    assert_eq!(&oracle[..4], &[rat_int(0), rat_int(1), rat_int(-1), rat_int(2)]);
}

#[test]
fn square_of_one_plus_q_plus_q2() {
    let a = series_from(vec![1, 1, 1]);
    assert_eq!(
        naive_mul(a.coeffs(), a.coeffs(), 2),
        vec![rat_int(1), rat_int(2), rat_int(3)]
    );
}

fn small_coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mul_matches_convolution(a in small_coeffs(16), b in small_coeffs(16)) {
        let (sa, sb) = (series_from(a), series_from(b));
        prop_assert_eq!((&sa * &sb).into_coeffs(), naive_mul(sa.coeffs(), sb.coeffs(), 15));
    }

    #[test]
    fn exp_matches_term_by_term(mut a in small_coeffs(10)) {
        a[0] = 0;
        let s = series_from(a);
        prop_assert_eq!(s.exp().unwrap().into_coeffs(), exp_oracle(s.coeffs()));
    }

    #[test]
    fn revert_matches_lagrange(mut g in small_coeffs(12), lead in prop::sample::select(vec![-3i64, -1, 1, 2, 5])) {
        g[0] = 0;
        g[1] = lead;
        let s = series_from(g);
        prop_assert_eq!(s.revert().unwrap().into_coeffs(), lagrange_revert(s.coeffs()));
    }

    #[test]
    fn inverse_is_two_sided(mut a in small_coeffs(20), c0 in 1i64..5) {
        a[0] = c0;
        let s = series_from(a);
        let inv = s.inv().unwrap();
        prop_assert_eq!(&s * &inv, RatSeries::one(19));
    }

    #[test]
    fn log_exp_round_trip(mut a in small_coeffs(31)) {
        a[0] = 0;
        let s = series_from(a);
        prop_assert_eq!(s.exp().unwrap().log().unwrap(), s.clone());
        let one_plus = &RatSeries::one(30) + &s;
        prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);
    }

    #[test]
    fn compose_revert_both_ways(mut g in small_coeffs(31)) {
        g[0] = 0;
        g[1] = 1;
        let s = series_from(g);
        let r = s.revert().unwrap();
        prop_assert_eq!(r.compose(&s).unwrap(), RatSeries::q(30));
        prop_assert_eq!(s.compose(&r).unwrap(), RatSeries::q(30));
    }

    #[test]
    fn results_are_canonical(mut a in small_coeffs(12)) {
        a[0] = 1;
        let s = series_from(a).pow_rat(&rat_frac(-3, 2)).unwrap();
        for c in s.coeffs() {
            // canonical form: reduced, positive denominator
            prop_assert_eq!(c.clone(), Rat::new(c.numer().clone(), c.denom().clone()));
            prop_assert!(c.denom() > &0.into());
        }
    }
}
