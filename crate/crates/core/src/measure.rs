//! Finitely supported measures on `Z^d`, convolution, and modified
//! differences `Δ_{f;y} = δ_{−y} − f(y)δ₀`.
//!
//! Measures act on functions by `(μ*f)(x) = Σ_g μ(g) f(x − g)`, so `δ_{−y}`
//! translates by `+y` and `(Δ_{f;y}*g)(x) = g(x+y) − f(y)g(x)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupfn::{Exponential, GroupElement, GroupFunction};
use crate::scalar::Scalar;

/// A finitely supported measure. Zero weights are never stored, so the
/// zero measure has no atoms and no fixed dimension.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FinMeasure {
    atoms: BTreeMap<GroupElement, Scalar>,
}

impl FinMeasure {
    pub fn zero() -> Self {
        FinMeasure::default()
    }

    pub fn dirac(y: GroupElement) -> Self {
        FinMeasure {
            atoms: BTreeMap::from([(y, Scalar::one())]),
        }
    }

    /// Builds a measure from weighted points, summing repeats.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (GroupElement, Scalar)>) -> Result<Self> {
        let mut m = FinMeasure::zero();
        for (g, w) in atoms {
            m.add_atom(g, &w)?;
        }
        Ok(m)
    }

    /// The common dimension of the support, `None` for the zero measure.
    pub fn dim(&self) -> Option<usize> {
        self.atoms.keys().next().map(GroupElement::dim)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &BTreeMap<GroupElement, Scalar> {
        &self.atoms
    }

    pub fn weight(&self, g: &GroupElement) -> Scalar {
        self.atoms.get(g).cloned().unwrap_or_else(Scalar::zero)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        match self.dim() {
            Some(e) if e != d => Err(Error::DimensionMismatch {
                expected: e,
                found: d,
            }),
            _ => Ok(()),
        }
    }

    fn add_atom(&mut self, g: GroupElement, w: &Scalar) -> Result<()> {
        self.check_dim(g.dim())?;
        if w.is_zero() {
            return Ok(());
        }
        let slot = self.atoms.entry(g.clone()).or_insert_with(Scalar::zero);
        *slot += w;
        if slot.is_zero() {
            self.atoms.remove(&g);
        }
        Ok(())
    }

    pub fn add(&self, other: &FinMeasure) -> Result<FinMeasure> {
        let mut out = self.clone();
        for (g, w) in &other.atoms {
            out.add_atom(g.clone(), w)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FinMeasure) -> Result<FinMeasure> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> FinMeasure {
        if c.is_zero() {
            return FinMeasure::zero();
        }
        FinMeasure {
            atoms: self.atoms.iter().map(|(g, w)| (g.clone(), w * c)).collect(),
        }
    }

    /// `(μ*ν)(g) = Σ_{a+b=g} μ(a)ν(b)`.
    pub fn convolve(&self, other: &FinMeasure) -> Result<FinMeasure> {
        if let (Some(a), Some(b)) = (self.dim(), other.dim()) {
            if a != b {
                return Err(Error::DimensionMismatch {
                    expected: a,
                    found: b,
                });
            }
        }
        let mut out = FinMeasure::zero();
        for (a, wa) in &self.atoms {
            for (b, wb) in &other.atoms {
                out.add_atom(a + b, &(wa * wb))?;
            }
        }
        Ok(out)
    }

    /// `Σ_g μ(g) f(x − g)`.
    pub fn apply(&self, f: &impl GroupFunction, x: &GroupElement) -> Result<Scalar> {
        self.check_dim(x.dim())?;
        let mut acc = Scalar::zero();
        for (g, w) in &self.atoms {
            acc += &(w * &f.value_at(&(x - g))?);
        }
        Ok(acc)
    }
}

impl fmt::Display for FinMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (k, (g, w)) in self.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if w.is_one() {
                write!(f, "δ{g}")?;
            } else {
                write!(f, "{w}·δ{g}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FinMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct Atom {
    g: GroupElement,
    w: Scalar,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    atoms: Vec<Atom>,
}

impl Serialize for FinMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            atoms: self
                .atoms
                .iter()
                .map(|(g, w)| Atom {
                    g: g.clone(),
                    w: w.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(de)?;
        FinMeasure::from_atoms(repr.atoms.into_iter().map(|a| (a.g, a.w)))
            .map_err(serde::de::Error::custom)
    }
}

pub fn dirac(y: GroupElement) -> FinMeasure {
    FinMeasure::dirac(y)
}

pub fn convolve(mu: &FinMeasure, nu: &FinMeasure) -> Result<FinMeasure> {
    mu.convolve(nu)
}

/// `Δ_{f;y} = δ_{−y} − f(y)δ₀`.
pub fn modified_diff(f: &impl GroupFunction, y: &GroupElement) -> Result<FinMeasure> {
    let fy = f.value_at(y)?;
    FinMeasure::from_atoms([
        (-y, Scalar::one()),
        (GroupElement::zero(y.dim()), -fy),
    ])
}

/// `Δ_{f;y_1} * … * Δ_{f;y_k}`.
pub fn diff_product(f: &impl GroupFunction, ys: &[GroupElement]) -> Result<FinMeasure> {
    let (first, rest) = ys
        .split_first()
        .ok_or_else(|| Error::Precondition("diff_product needs at least one point".into()))?;
    let mut acc = modified_diff(f, first)?;
    for y in rest {
        acc = acc.convolve(&modified_diff(f, y)?)?;
    }
    Ok(acc)
}

pub fn apply_measure(mu: &FinMeasure, f: &impl GroupFunction, x: &GroupElement) -> Result<Scalar> {
    mu.apply(f, x)
}

/// A tuple and point at which `Δ_{m;y_1..y_{n+1}} * f` does not vanish.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DegreeWitness {
    pub ys: Vec<GroupElement>,
    pub x: GroupElement,
    pub value: Scalar,
}

/// Searches the sampled `(n+1)`-tuples and points for a nonzero value of
/// `Δ_{m;y_1..y_{n+1}} * f`. `None` means every sample is annihilated.
pub fn degree_witness(
    f: &impl GroupFunction,
    m: &Exponential,
    n: usize,
    tuples: &[Vec<GroupElement>],
    points: &[GroupElement],
) -> Result<Option<DegreeWitness>> {
    for ys in tuples {
        if ys.len() != n + 1 {
            return Err(Error::Precondition(format!(
                "degree {n} needs tuples of length {}, got {}",
                n + 1,
                ys.len()
            )));
        }
        let mu = diff_product(m, ys)?;
        for x in points {
            let value = mu.apply(f, x)?;
            if !value.is_zero() {
                return Ok(Some(DegreeWitness {
                    ys: ys.clone(),
                    x: x.clone(),
                    value,
                }));
            }
        }
    }
    Ok(None)
}

/// True iff every sampled product of `n+1` modified differences of `m`
/// annihilates `f` at every sampled point.
pub fn monomial_degree_check(
    f: &impl GroupFunction,
    m: &Exponential,
    n: usize,
    tuples: &[Vec<GroupElement>],
    points: &[GroupElement],
) -> Result<bool> {
    Ok(degree_witness(f, m, n, tuples, points)?.is_none())
}
