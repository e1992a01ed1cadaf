//! Multi-indices in `N^r` and the composition combinatorics built on them.
//!
//! Ordering is graded-lexicographic throughout: first by height `|α|`, then
//! lexicographically by entries. Indices of different rank are ordered by
//! rank first so that a `BTreeMap<MultiIndex, _>` is always well defined.

use std::cmp::Ordering;
use std::fmt;

use malachite_base::num::basic::traits::One;
use malachite_nz::natural::Natural;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    /// Panics on an empty entry list: rank must be at least one.
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index rank must be at least 1");
        MultiIndex(entries)
    }

    pub fn try_new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Precondition("multi-index rank must be at least 1".into()));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(rank: usize) -> Self {
        MultiIndex::new(vec![0; rank])
    }

    /// The standard unit index `e_k` (0-based `k`).
    pub fn unit(rank: usize, k: usize) -> Self {
        let mut v = vec![0; rank];
        v[k] = 1;
        MultiIndex::new(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn height(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    fn check_rank(&self, other: &MultiIndex) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: other.rank(),
            });
        }
        Ok(())
    }

    /// `α! = Π α_k!`.
    pub fn factorial(&self) -> Natural {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// `Π C(α_k, β_k)`, zero unless `β ≤ α`.
    pub fn binom(&self, beta: &MultiIndex) -> Result<Natural> {
        self.check_rank(beta)?;
        Ok(self
            .0
            .iter()
            .zip(&beta.0)
            .map(|(&a, &b)| binomial(a, b))
            .product())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiIndex) -> Result<bool> {
        self.check_rank(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// `self ≤ other` and `self ≠ other`.
    pub fn lt(&self, other: &MultiIndex) -> Result<bool> {
        Ok(self.le(other)? && self != other)
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Result<MultiIndex> {
        if !other.le(self)? {
            return Err(Error::Precondition(format!("{other} is not below {self}")));
        }
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        self.check_rank(other)?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Every `β ≤ α`, in graded-lex order.
    pub fn enumerate_below(&self) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(self.0.iter().map(|&a| a as usize + 1).product());
        let mut cur = vec![0u32; self.rank()];
        fn rec(alpha: &[u32], k: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if k == alpha.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for v in 0..=alpha[k] {
                cur[k] = v;
                rec(alpha, k + 1, cur, out);
            }
        }
        rec(&self.0, 0, &mut cur, &mut out);
        out.sort();
        out
    }

    /// Keeps the coordinates listed in `keep` (0-based) and zeroes the rest.
    pub fn project(&self, keep: &[usize]) -> Result<MultiIndex> {
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.rank()) {
            return Err(Error::Precondition(format!(
                "coordinate {bad} out of range for rank {}",
                self.rank()
            )));
        }
        Ok(MultiIndex(
            self.0
                .iter()
                .enumerate()
                .map(|(k, &a)| if keep.contains(&k) { a } else { 0 })
                .collect(),
        ))
    }
}

/// All multi-indices of the given rank with `|α| ≤ max_height`, graded-lex.
pub fn indices_up_to(rank: usize, max_height: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for h in 0..=max_height {
        out.extend(indices_of_height(rank, h));
    }
    out
}

/// All multi-indices of the given rank with `|α| = height`, lex order.
pub fn indices_of_height(rank: usize, height: u32) -> Vec<MultiIndex> {
    assert!(rank >= 1);
    if rank == 1 {
        return vec![MultiIndex::new(vec![height])];
    }
    // r-tuples summing to `height` are exactly the r-compositions
    compositions(height, rank)
        .into_iter()
        .map(MultiIndex::new)
        .collect()
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.height().cmp(&other.height()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;

    /// Accepts `2,1`, `(2,1)` or `2`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(t);
        let entries = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("invalid multi-index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::try_new(entries)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(deserializer)?;
        MultiIndex::try_new(v).map_err(serde::de::Error::custom)
    }
}

/// An `l`-composition of `target`: `l ≥ 2` nonnegative parts summing to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LComposition {
    parts: Vec<u32>,
    target: u32,
}

impl LComposition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::Precondition(
                "a composition needs at least two parts".into(),
            ));
        }
        let target = parts.iter().sum();
        Ok(LComposition { parts, target })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn multinomial(&self) -> Natural {
        multinomial_unchecked(self.target, &self.parts)
    }
}

/// Every `l`-tuple of nonnegative integers summing to `n`, lex order.
pub fn enumerate_compositions(n: u32, l: usize) -> Result<Vec<LComposition>> {
    if l < 2 {
        return Err(Error::Precondition(format!(
            "compositions need l >= 2, got {l}"
        )));
    }
    Ok(compositions(n, l)
        .into_iter()
        .map(|parts| LComposition { parts, target: n })
        .collect())
}

fn compositions(n: u32, l: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; l];
    fn rec(rem: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k + 1 == cur.len() {
            cur[k] = rem;
            out.push(cur.clone());
            return;
        }
        for v in 0..=rem {
            cur[k] = v;
            rec(rem - v, k + 1, cur, out);
        }
    }
    rec(n, 0, &mut cur, &mut out);
    out
}

/// `n! / Π k_i!`; the parts must sum to `n`.
pub fn multinomial(n: u32, parts: &[u32]) -> Result<Natural> {
    let s: u64 = parts.iter().map(|&k| k as u64).sum();
    if s != n as u64 {
        return Err(Error::Precondition(format!(
            "parts {parts:?} sum to {s}, not {n}"
        )));
    }
    Ok(multinomial_unchecked(n, parts))
}

fn multinomial_unchecked(n: u32, parts: &[u32]) -> Natural {
    // product of binomials avoids the big n! division
    let mut acc = Natural::ONE;
    let mut seen = 0;
    for &k in parts {
        seen += k;
        acc *= binomial(seen, k);
    }
    debug_assert_eq!(seen, n);
    acc
}

pub fn factorial(n: u32) -> Natural {
    (1..=n).map(Natural::from).product()
}

pub fn binomial(n: u32, k: u32) -> Natural {
    if k > n {
        return Natural::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = Natural::ONE;
    for i in 0..k {
        acc = acc * Natural::from(n - i) / Natural::from(i + 1);
    }
    acc
}
