//! Relative and absolute Severi degrees of the plane via the
//! Caporaso–Harris recursion.
//!
//! `N^{d,δ}(α,β)` counts reduced, possibly reducible, degree-`d` curves with
//! `δ` nodes through the appropriate number of general points, having
//! tangency `α` at fixed points of a line and tangency `β` at free points.
//! The recursion is evaluated with an explicit work stack and memoized in a
//! [`CacheStore`] that can be persisted to disk.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use parking_lot::RwLock;
use rayon::prelude::*;
use thiserror::Error;

use crate::tangency::{seq_binomial, seq_weighted_power, ChState, TangencyError, TangencySeq};

/// Memo keys are states in canonical form.
pub type SeveriKey = ChState;

pub const CACHE_HEADER: &str = "SEVERI-CACHE v1";
const CACHE_MAGIC: &str = "SEVERI-CACHE";

#[derive(Debug, Error)]
pub enum ChError {
    #[error(transparent)]
    InvalidState(#[from] TangencyError),
    #[error("cache corruption: {key} stored as {stored}, recomputed as {computed}")]
    CacheCorruption {
        key: String,
        stored: BigUint,
        computed: BigUint,
    },
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("cache version mismatch: expected {expected:?}, found {found:?}")]
    VersionMismatch { expected: String, found: String },
    #[error("cache parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn key_text(k: &SeveriKey) -> String {
    format!("{} {} {} {}", k.d, k.delta, seq_field(&k.alpha), seq_field(&k.beta))
}

fn seq_field(s: &TangencySeq) -> String {
    if s.is_empty() {
        "-".to_owned()
    } else {
        s.to_string()
    }
}

/// Process-wide memo table for Severi degrees.
///
/// Readers run concurrently; inserts take the write lock. A value stored
/// under a key is never replaced by a different one.
#[derive(Debug, Default)]
pub struct CacheStore {
    map: RwLock<HashMap<SeveriKey, BigUint>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

impl CacheStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn version(&self) -> &'static str {
        CACHE_HEADER
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    pub fn clear(&self) {
        self.map.write().clear();
        self.hits.store(0, Ordering::Relaxed);
        self.misses.store(0, Ordering::Relaxed);
    }

    pub fn get(&self, key: &SeveriKey) -> Option<BigUint> {
        self.map.read().get(key).cloned()
    }

    /// Stores `value`, or checks it against the value already present.
    pub fn insert(&self, key: SeveriKey, value: BigUint) -> Result<(), ChError> {
        let mut map = self.map.write();
        check_insert(&mut map, key, value)
    }

    fn insert_all(&self, entries: HashMap<SeveriKey, BigUint>) -> Result<(), ChError> {
        let mut map = self.map.write();
        map.reserve(entries.len());
        for (k, v) in entries {
            check_insert(&mut map, k, v)?;
        }
        Ok(())
    }

    /// Sorted snapshot of all entries.
    pub fn entries(&self) -> Vec<(SeveriKey, BigUint)> {
        let mut v: Vec<_> = self.map.read().iter().map(|(k, n)| (k.clone(), n.clone())).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Writes the cache in its line-oriented text form, entries sorted.
    /// The file is replaced atomically via a sibling temporary file.
    pub fn save(&self, path: &Path) -> Result<(), ChError> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        self.write_to(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), ChError> {
        writeln!(w, "{CACHE_HEADER}")?;
        for (k, n) in self.entries() {
            writeln!(w, "{} {}", key_text(&k), n)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ChError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ChError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| ChError::Parse {
            line: 1,
            msg: "empty cache file".into(),
        })?;
        if header != CACHE_HEADER {
            if header.starts_with(CACHE_MAGIC) {
                return Err(ChError::VersionMismatch {
                    expected: CACHE_HEADER.into(),
                    found: header.into(),
                });
            }
            return Err(ChError::Parse {
                line: 1,
                msg: format!("bad header {header:?}"),
            });
        }
        let mut map = HashMap::with_capacity(text.len() / 16);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = parse_entry(line).map_err(|msg| ChError::Parse { line: lineno, msg })?;
            check_insert(&mut map, key, value)?;
        }
        Ok(CacheStore {
            map: RwLock::new(map),
            ..Default::default()
        })
    }
}

fn parse_entry(line: &str) -> Result<(SeveriKey, BigUint), String> {
    let mut fields = line.split_whitespace();
    let (Some(d), Some(delta), Some(alpha), Some(beta), Some(n), None) = (
        fields.next(),
        fields.next(),
        fields.next(),
        fields.next(),
        fields.next(),
        fields.next(),
    ) else {
        return Err(format!("expected 5 fields, found {}", line.split_whitespace().count()));
    };
    let d: u32 = d.parse().map_err(|_| format!("bad degree {d:?}"))?;
    let delta: u32 = delta.parse().map_err(|_| format!("bad node count {delta:?}"))?;
    let alpha: TangencySeq = alpha.parse().map_err(|e: TangencyError| e.to_string())?;
    let beta: TangencySeq = beta.parse().map_err(|e: TangencyError| e.to_string())?;
    let n: BigUint = match n.parse::<u64>() {
        Ok(small) => BigUint::from(small),
        Err(_) => n.parse().map_err(|_| format!("bad value {n:?}"))?,
    };
    let key = ChState::new(d, delta, alpha, beta).map_err(|e| e.to_string())?;
    Ok((key, n))
}

fn check_insert(map: &mut HashMap<SeveriKey, BigUint>, key: SeveriKey, value: BigUint) -> Result<(), ChError> {
    match map.get(&key) {
        Some(stored) if *stored != value => Err(ChError::CacheCorruption {
            key: key_text(&key),
            stored: stored.clone(),
            computed: value,
        }),
        Some(_) => Ok(()),
        None => {
            map.insert(key, value);
            Ok(())
        }
    }
}

fn max_nodes(d: u32) -> u64 {
    let d = d as u64;
    d * d.saturating_sub(1) / 2
}

/// Values fixed without recursing: the node bound, negative point count, and
/// lines.
fn base_value(st: &ChState) -> Option<BigUint> {
    if st.delta as u64 > max_nodes(st.d) || st.point_count_unchecked() < 0 {
        return Some(BigUint::zero());
    }
    if st.d == 1 {
        return Some(if st.delta == 0 { BigUint::one() } else { BigUint::zero() });
    }
    None
}

/// One term `coef · N(child)` of the recursion.
type Term = (BigUint, ChState);

/// The recursion step for `st` (with `d ≥ 2`), dropping children that are
/// zero by the guards.
fn transitions(st: &ChState) -> Vec<Term> {
    let mut terms = Vec::new();
    let parent_pc = st.point_count_unchecked();
    let mut push = |coef: BigUint, child: ChState| {
        debug_assert_eq!(child.point_count_unchecked(), parent_pc - 1, "dimension drop violated");
        if base_value(&child).is_some_and(|v| v.is_zero()) {
            return;
        }
        terms.push((coef, child));
    };

    // Move one free tangency point of order k onto a fixed point.
    for k in 1..=st.beta.max_order() {
        if st.beta.get(k) > 0 {
            let child = ChState {
                d: st.d,
                delta: st.delta,
                alpha: st.alpha.plus_unit(k),
                beta: st.beta.minus_unit(k),
            };
            push(BigUint::from(k), child);
        }
    }

    // Split off the line: degree d-1 curves with α' ≤ α, β' ≥ β.
    let d = st.d as i64;
    let delta = st.delta as i64;
    let beta_size = st.beta.size() as i64;
    let beta_weight = st.beta.weight() as i64;
    // δ' ≤ δ − |β| − |α'|, so α' must have at most δ − |β| entries.
    let alpha_budget = delta - beta_size;
    if alpha_budget < 0 {
        return terms;
    }
    let child_max_nodes = max_nodes(st.d - 1) as i64;
    for alpha_sub in sub_sequences(&st.alpha, alpha_budget as u64) {
        let free_weight = d - 1 - alpha_sub.weight() as i64 - beta_weight;
        if free_weight < 0 {
            continue;
        }
        // δ' = δ + |Δ| − (d−1) ≥ 0 needs |Δ| ≥ d−1−δ; |Δ| = weight − excess.
        let min_size = (d - 1 - delta).max(0);
        let max_excess = free_weight - min_size;
        if max_excess < 0 {
            continue;
        }
        let alpha_coef = seq_binomial(&st.alpha, &alpha_sub);
        for added in partitions_with_excess(free_weight as u64, max_excess as u64) {
            let new_delta = delta + added.size() as i64 - (d - 1);
            if new_delta < 0 || new_delta > child_max_nodes {
                continue;
            }
            let beta_new = st.beta.sum(&added);
            let coef = &alpha_coef * seq_binomial(&beta_new, &st.beta) * seq_weighted_power(&added);
            let child = ChState {
                d: st.d - 1,
                delta: new_delta as u32,
                alpha: alpha_sub.clone(),
                beta: beta_new,
            };
            push(coef, child);
        }
    }
    terms
}

/// All `t ≤ s` componentwise with `|t| ≤ max_size`.
fn sub_sequences(s: &TangencySeq, max_size: u64) -> Vec<TangencySeq> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; s.max_order()];
    fn rec(s: &[u32], i: usize, budget: u64, cur: &mut Vec<u32>, out: &mut Vec<TangencySeq>) {
        if i == s.len() {
            out.push(TangencySeq::new(cur.clone()));
            return;
        }
        let top = (s[i] as u64).min(budget);
        for c in 0..=top {
            cur[i] = c as u32;
            rec(s, i + 1, budget - c, cur, out);
        }
        cur[i] = 0;
    }
    rec(s.parts(), 0, max_size, &mut cur, &mut out);
    out
}

/// Multiplicity vectors of partitions of `weight` whose excess
/// `Σ (k−1)·m_k` is at most `max_excess`.
fn partitions_with_excess(weight: u64, max_excess: u64) -> Vec<TangencySeq> {
    let mut out = Vec::new();
    // choose parts of size ≥ 2 from the largest down; the rest are ones
    let mut mult = vec![0u32; weight as usize + 1];
    fn rec(k: u64, weight_left: u64, excess_left: u64, mult: &mut Vec<u32>, out: &mut Vec<TangencySeq>) {
        if k < 2 {
            let mut parts: Vec<u32> = mult[1..].to_vec();
            if !parts.is_empty() {
                parts[0] = weight_left as u32;
            }
            out.push(TangencySeq::new(parts));
            return;
        }
        let mut m = 0u64;
        loop {
            mult[k as usize] = m as u32;
            rec(k - 1, weight_left - m * k, excess_left - m * (k - 1), mult, out);
            m += 1;
            if m * k > weight_left || m * (k - 1) > excess_left {
                break;
            }
        }
        mult[k as usize] = 0;
    }
    let top = weight.min(max_excess + 1);
    if weight == 0 {
        out.push(TangencySeq::empty());
        return out;
    }
    rec(top, weight, max_excess, &mut mult, &mut out);
    out
}

struct Frame {
    key: ChState,
    terms: Vec<Term>,
    next: usize,
}

/// `N^{d,δ}(α,β)`.
pub fn relative_severi(
    d: u32,
    delta: u32,
    alpha: TangencySeq,
    beta: TangencySeq,
    cache: &CacheStore,
) -> Result<BigUint, ChError> {
    let st = ChState::new(d, delta, alpha, beta)?;
    evaluate(&st, cache)
}

/// Evaluates a validated state, memoizing every intermediate state.
pub fn evaluate(root: &ChState, cache: &CacheStore) -> Result<BigUint, ChError> {
    root.validate()?;
    if let Some(v) = base_value(root) {
        return Ok(v);
    }
    if let Some(v) = cache.get(root) {
        cache.hits.fetch_add(1, Ordering::Relaxed);
        return Ok(v);
    }

    let mut local: HashMap<ChState, BigUint> = HashMap::new();
    let mut stack = vec![Frame {
        key: root.clone(),
        terms: transitions(root),
        next: 0,
    }];

    while let Some(top) = stack.last_mut() {
        let mut pending = None;
        while top.next < top.terms.len() {
            let child = &top.terms[top.next].1;
            if child.d == 1 || local.contains_key(child) {
                top.next += 1;
                continue;
            }
            if let Some(v) = cache.get(child) {
                cache.hits.fetch_add(1, Ordering::Relaxed);
                local.insert(child.clone(), v);
                top.next += 1;
                continue;
            }
            pending = Some(child.clone());
            break;
        }
        match pending {
            Some(child) => {
                let terms = transitions(&child);
                stack.push(Frame {
                    key: child,
                    terms,
                    next: 0,
                });
            }
            None => {
                let frame = stack.pop().expect("non-empty stack");
                let mut total = BigUint::zero();
                for (coef, child) in &frame.terms {
                    let v = match base_value(child) {
                        Some(v) => v,
                        None => local[child].clone(),
                    };
                    if !v.is_zero() {
                        total += coef * v;
                    }
                }
                cache.misses.fetch_add(1, Ordering::Relaxed);
                local.insert(frame.key, total);
            }
        }
    }

    let value = local[root].clone();
    cache.insert_all(local)?;
    Ok(value)
}

/// Absolute Severi degree `N^{d,δ} = N^{d,δ}((), (d))`.
pub fn severi_degree(d: u32, delta: u32, cache: &CacheStore) -> Result<BigUint, ChError> {
    evaluate(&ChState::absolute(d, delta)?, cache)
}

/// `N^{d,δ}` for `1 ≤ d ≤ dmax`, `0 ≤ δ ≤ δmax`; row `d−1` holds degree `d`.
///
/// Rows are computed in parallel on the current rayon pool; the result does
/// not depend on the number of threads.
pub fn severi_table(dmax: u32, delta_max: u32, cache: &CacheStore) -> Result<Vec<Vec<BigUint>>, ChError> {
    if dmax == 0 {
        return Err(TangencyError::ZeroDegree.into());
    }
    // largest degrees first so the expensive rows start early
    let mut rows: Vec<(u32, Vec<BigUint>)> = (1..=dmax)
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|d| {
            let row = (0..=delta_max)
                .map(|delta| severi_degree(d, delta, cache))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((d, row))
        })
        .collect::<Result<Vec<_>, ChError>>()?;
    rows.sort_by_key(|(d, _)| *d);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn cache_save(cache: &CacheStore, path: &Path) -> Result<(), ChError> {
    cache.save(path)
}

pub fn cache_load(path: &Path) -> Result<CacheStore, ChError> {
    CacheStore::load(path)
}
