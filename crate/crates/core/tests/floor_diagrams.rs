//! Independent check of the recursion against the floor-diagram count of
//! Severi degrees: `N^{d,δ} = Σ μ(D)·ν(D)` over floor diagrams `D` of degree
//! `d` with `d(d−1)/2 − δ` edges, where `μ(D) = Π w(e)²` and `ν(D)` counts
//! markings up to the symmetries of the extended diagram.

use std::collections::HashMap;

use num_bigint::BigUint;
use severi_core::chengine::{severi_degree, CacheStore};

/// Edge `from → to` (0-based floors, `from < to`) with a weight.
type Edge = (usize, usize, u32);

/// All edge multisets on `d` ordered floors with `edges` edges and
/// divergence `out − in ≤ 1` at every floor.
fn floor_diagrams(d: usize, edges: usize) -> Vec<Vec<Edge>> {
    fn rec(
        d: usize,
        v: usize,
        inflow: &mut Vec<u32>,
        edges_left: usize,
        cur: &mut Vec<Edge>,
        out: &mut Vec<Vec<Edge>>,
    ) {
        if v == d {
            if edges_left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let budget = inflow[v] + 1;
        // out-edges of v as a multiset, chosen in increasing (to, w) order
        choose(d, v, v + 1, 1, budget, inflow, edges_left, cur, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        d: usize,
        v: usize,
        to: usize,
        w: u32,
        budget: u32,
        inflow: &mut Vec<u32>,
        edges_left: usize,
        cur: &mut Vec<Edge>,
        out: &mut Vec<Vec<Edge>>,
    ) {
        // stop adding edges from v
        rec(d, v + 1, inflow, edges_left, cur, out);
        if edges_left == 0 {
            return;
        }
        let mut to_i = to;
        let mut w_i = w;
        while to_i < d {
            if w_i > budget {
                to_i += 1;
                w_i = 1;
                continue;
            }
            cur.push((v, to_i, w_i));
            inflow[to_i] += w_i;
            choose(d, v, to_i, w_i, budget - w_i, inflow, edges_left - 1, cur, out);
            inflow[to_i] -= w_i;
            cur.pop();
            w_i += 1;
        }
    }

    let mut out = Vec::new();
    let mut inflow = vec![0u32; d];
    rec(d, 0, &mut inflow, edges, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Markings of `D` up to equivalence.
fn markings(d: usize, diagram: &[Edge]) -> u128 {
    let mut inflow = vec![0i64; d];
    let mut outflow = vec![0i64; d];
    for &(a, b, w) in diagram {
        outflow[a] += w as i64;
        inflow[b] += w as i64;
    }
    // Non-floor items: (lowest floor that must precede it, floor it must
    // precede or None).
    let mut items: Vec<(usize, Option<usize>)> = Vec::new();
    let mut symmetry: u128 = 1;
    for v in 0..d {
        let sinks = 1 + inflow[v] - outflow[v];
        assert!(sinks >= 0);
        for _ in 0..sinks {
            items.push((v, None));
        }
        symmetry *= factorial(sinks as usize);
    }
    let mut parallel: HashMap<Edge, usize> = HashMap::new();
    for &e in diagram {
        items.push((e.0, Some(e.1)));
        *parallel.entry(e).or_default() += 1;
    }
    for &m in parallel.values() {
        symmetry *= factorial(m);
    }

    // linear extensions: dp over (floors placed, set of items placed)
    let n = items.len();
    let full = (1usize << n) - 1;
    // items that must come before floor f
    let mut before_floor = vec![0usize; d];
    for (i, &(_, upper)) in items.iter().enumerate() {
        if let Some(f) = upper {
            before_floor[f] |= 1 << i;
        }
    }
    let mut dp = vec![vec![0u128; 1 << n]; d + 1];
    dp[0][0] = 1;
    for floors in 0..=d {
        for set in 0..=full {
            let ways = dp[floors][set];
            if ways == 0 {
                continue;
            }
            if floors < d && set & before_floor[floors] == before_floor[floors] {
                dp[floors + 1][set] += ways;
            }
            for (i, &(lower, _)) in items.iter().enumerate() {
                if set & (1 << i) == 0 && lower < floors {
                    dp[floors][set | (1 << i)] += ways;
                }
            }
        }
    }
    let total = dp[d][full];
    assert_eq!(total % symmetry, 0);
    total / symmetry
}

fn floor_count(d: usize, delta: usize) -> u128 {
    let max = d * (d - 1) / 2;
    if delta > max {
        return 0;
    }
    floor_diagrams(d, max - delta)
        .iter()
        .map(|diag| {
            let mu: u128 = diag.iter().map(|&(_, _, w)| (w as u128).pow(2)).product();
            mu * markings(d, diag)
        })
        .sum()
}

#[test]
fn small_degrees_by_hand() {
    assert_eq!(floor_count(1, 0), 1);
    assert_eq!(floor_count(2, 0), 1);
    assert_eq!(floor_count(2, 1), 3);
    assert_eq!(floor_count(3, 1), 12);
    assert_eq!(floor_count(3, 2), 21);
    assert_eq!(floor_count(3, 3), 15);
}

#[test]
fn recursion_matches_floor_diagrams() {
    let cache = CacheStore::new();
    for d in 1..=5usize {
        for delta in 0..=d * (d - 1) / 2 + 1 {
            let expected = floor_count(d, delta);
            let got = severi_degree(d as u32, delta as u32, &cache).unwrap();
            assert_eq!(got, BigUint::from(expected), "N^{{{d},{delta}}}");
        }
    }
}

#[test]
fn sextics_with_many_nodes_match_floor_diagrams() {
    // fewer edges keep the marking dp small
    let cache = CacheStore::new();
    for delta in 8..=16usize {
        let expected = floor_count(6, delta);
        let got = severi_degree(6, delta as u32, &cache).unwrap();
        assert_eq!(got, BigUint::from(expected), "N^{{6,{delta}}}");
    }
}
