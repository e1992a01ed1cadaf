//! Sparse multivariate polynomials over [`Scalar`].
//!
//! A polynomial is a map from monomials to nonzero coefficients. Monomials
//! are sorted `(Var, exponent)` lists with positive exponents, so two equal
//! polynomials always have identical term maps and structural equality is
//! mathematical equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;

/// Subscript of a variable: `x_j` (rank-1 family) or `x_μ` (multi-index family).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarTag {
    Idx(u32),
    Multi(MultiIndex),
}

/// A variable label. `sym` names the family (`x` for Bell variables, `t`
/// and `u` for the two arguments of an addition formula).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub sym: char,
    pub tag: VarTag,
}

impl Var {
    /// `x_j`, `j ≥ 1`.
    pub fn x(j: u32) -> Self {
        Var::indexed('x', j)
    }

    /// `x_μ`, `|μ| ≥ 1`.
    pub fn xm(mu: MultiIndex) -> Self {
        Var::multi('x', mu)
    }

    pub fn indexed(sym: char, j: u32) -> Self {
        assert!(j >= 1, "variable subscripts start at 1");
        Var {
            sym,
            tag: VarTag::Idx(j),
        }
    }

    pub fn multi(sym: char, mu: MultiIndex) -> Self {
        assert!(mu.height() >= 1, "multi-index variables need |mu| >= 1");
        Var {
            sym,
            tag: VarTag::Multi(mu),
        }
    }

    pub fn with_sym(&self, sym: char) -> Self {
        Var {
            sym,
            tag: self.tag.clone(),
        }
    }

    /// Weight used for the isobaric grading of Bell polynomials.
    pub fn weight(&self) -> u32 {
        match &self.tag {
            VarTag::Idx(j) => *j,
            VarTag::Multi(mu) => mu.height(),
        }
    }

    fn write_subscript(&self, f: &mut impl fmt::Write, latex: bool) -> fmt::Result {
        match &self.tag {
            VarTag::Idx(j) if latex => write!(f, "{}_{{{j}}}", self.sym),
            VarTag::Idx(j) => write!(f, "{}_{j}", self.sym),
            VarTag::Multi(mu) => {
                let sep = if latex { ", " } else { "," };
                let body: Vec<String> = mu.entries().iter().map(|e| e.to_string()).collect();
                write!(f, "{}_{{{}}}", self.sym, body.join(sep))
            }
        }
    }

    pub fn to_latex(&self) -> String {
        let mut s = String::new();
        self.write_subscript(&mut s, true).unwrap();
        s
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_subscript(f, false)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Product of variable powers, sorted by variable, exponents positive.
///
/// `Ord` is the canonical printing order: higher total degree first, then
/// lexicographically larger exponent vectors first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in powers {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn weighted_degree(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.weight() * e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn write(&self, f: &mut impl fmt::Write, latex: bool) -> fmt::Result {
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 && !latex {
                f.write_char('*')?;
            }
            v.write_subscript(f, latex)?;
            match (*e, latex) {
                (1, _) => {}
                (e, true) => write!(f, "^{{{e}}}")?,
                (e, false) => write!(f, "^{e}")?,
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0) {
                match a.0.cmp(&b.0) {
                    // self carries a smaller variable that other lacks
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => match b.1.cmp(&a.1) {
                        Ordering::Equal => {}
                        o => return o,
                    },
                }
            }
            other.0.len().cmp(&self.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        self.write(f, false)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Polynomial::monomial(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Polynomial::monomial(Monomial::var(v), Scalar::one())
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Adds `c·m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Exact evaluation; every occurring variable must be assigned.
    pub fn eval(&self, assignment: &BTreeMap<Var, Scalar>) -> Result<Scalar> {
        let mut powers: HashMap<(&Var, u32), Scalar> = HashMap::new();
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let value = assignment
                    .get(v)
                    .ok_or_else(|| Error::MissingVariable(v.clone()))?;
                let p = powers
                    .entry((v, *e))
                    .or_insert_with(|| value.pow_u(*e as u64));
                t *= &*p;
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Replaces every variable by a polynomial; all variables must be covered.
    pub fn substitute(&self, subs: &BTreeMap<Var, Polynomial>) -> Result<Polynomial> {
        let mut powers: HashMap<(&Var, u32), Polynomial> = HashMap::new();
        let mut acc = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone());
            for (v, e) in &m.0 {
                let q = subs.get(v).ok_or_else(|| Error::MissingVariable(v.clone()))?;
                let p = powers.entry((v, *e)).or_insert_with(|| q.pow(*e));
                t = &t * &*p;
                if t.is_zero() {
                    break;
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Sets the given variables to zero, leaving the rest untouched.
    pub fn drop_vars(&self, vars: &BTreeSet<Var>) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0.iter().all(|(v, _)| !vars.contains(v)))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Applies a variable renaming; the map must be injective on `vars()`.
    pub fn rename(&self, f: impl Fn(&Var) -> Var) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::from_powers(m.0.iter().map(|(v, e)| (f(v), *e))),
                c.clone(),
            )
        }))
    }

    /// True when every coefficient is a (real) integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.to_integer().is_some())
    }

    pub fn to_latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.reads_negative();
            let mag = if negative { -c } else { c.clone() };
            match (k, negative, latex) {
                (0, true, _) => out.push('-'),
                (0, false, _) => {}
                (_, true, true) => out.push('-'),
                (_, false, true) => out.push('+'),
                (_, true, false) => out.push_str(" - "),
                (_, false, false) => out.push_str(" + "),
            }
            let coeff = if latex { mag.to_latex() } else { mag.to_string() };
            if m.is_one() {
                out.push_str(&coeff);
                continue;
            }
            if !mag.is_one() {
                out.push_str(&coeff);
                if !latex {
                    out.push('*');
                }
            }
            m.write(&mut out, latex).unwrap();
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Scalar::one())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl From<Var> for Polynomial {
    fn from(v: Var) -> Self {
        Polynomial::var(v)
    }
}

impl From<Scalar> for Polynomial {
    fn from(c: Scalar) -> Self {
        Polynomial::constant(c)
    }
}
