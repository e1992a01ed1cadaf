//! Truncated formal power series in auxiliary variables `t = (t_1..t_r)`
//! with polynomial coefficients. Truncation is by total `t`-degree only; the
//! coefficient polynomials are never truncated.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    rank: usize,
    bound: u32,
    coeffs: BTreeMap<MultiIndex, Polynomial>,
}

impl TruncatedSeries {
    pub fn zero(rank: usize, bound: u32) -> Self {
        TruncatedSeries {
            rank,
            bound,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize, bound: u32) -> Self {
        let mut s = Self::zero(rank, bound);
        s.coeffs.insert(MultiIndex::zero(rank), Polynomial::one());
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Adds `p·t^index`; terms beyond the bound are discarded.
    pub fn add_term(&mut self, index: MultiIndex, p: &Polynomial) -> Result<()> {
        if index.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: index.rank(),
            });
        }
        if index.height() > self.bound || p.is_zero() {
            return Ok(());
        }
        let slot = self.coeffs.entry(index.clone()).or_default();
        *slot = &*slot + p;
        if slot.is_zero() {
            self.coeffs.remove(&index);
        }
        Ok(())
    }

    pub fn coeff(&self, index: &MultiIndex) -> Result<Polynomial> {
        if index.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: index.rank(),
            });
        }
        if index.height() > self.bound {
            return Err(Error::BeyondTruncation {
                index: index.clone(),
                bound: self.bound,
            });
        }
        Ok(self.coeffs.get(index).cloned().unwrap_or_default())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Polynomial)> {
        self.coeffs.iter()
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.rank, self.bound.min(other.bound));
        for (k, p) in self.coeffs.iter().chain(&other.coeffs) {
            out.add_term(k.clone(), p)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let bound = self.bound.min(other.bound);
        let mut out = Self::zero(self.rank, bound);
        for (ka, pa) in &self.coeffs {
            for (kb, pb) in &other.coeffs {
                if ka.height() + kb.height() > bound {
                    continue;
                }
                out.add_term(ka.add(kb)?, &(pa * pb))?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> TruncatedSeries {
        let mut out = Self::zero(self.rank, self.bound);
        for (k, p) in &self.coeffs {
            let q = p.scale(c);
            if !q.is_zero() {
                out.coeffs.insert(k.clone(), q);
            }
        }
        out
    }

    /// Re-truncates at a lower (or equal) bound.
    pub fn truncate(&self, bound: u32) -> TruncatedSeries {
        TruncatedSeries {
            rank: self.rank,
            bound: bound.min(self.bound),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.height() <= bound)
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
        }
    }

    /// `exp(s) = Σ_{k≤D} s^k / k!` for a series without constant term.
    ///
    /// Since `s^k` starts in degree `k`, the sum is exact up to the bound.
    pub fn exp(&self) -> Result<TruncatedSeries> {
        if self.coeffs.contains_key(&MultiIndex::zero(self.rank)) {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut result = Self::one(self.rank, self.bound);
        let mut power = Self::one(self.rank, self.bound);
        for k in 1..=self.bound {
            power = power.mul(self)?;
            if power.coeffs.is_empty() {
                break;
            }
            let inv_k = Scalar::ratio(1, k as i64);
            power = power.scale(&inv_k);
            result = result.add(&power)?;
        }
        Ok(result)
    }
}

/// `exp(s)` truncated at total degree `bound`.
pub fn series_exp(s: &TruncatedSeries, bound: u32) -> Result<TruncatedSeries> {
    if bound > s.bound() {
        return Err(Error::Precondition(format!(
            "requested bound {bound} exceeds the input's bound {}",
            s.bound()
        )));
    }
    s.truncate(bound).exp()
}
