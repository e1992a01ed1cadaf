//! Generalized moment sequences of rank `r` on `Z^d`.
//!
//! A sequence `(f_α)_{|α|≤N}` satisfies
//! `f_α(x+y) = Σ_{β≤α} C(α,β) f_β(x) f_{α−β}(y)`. Every such sequence is
//! `f_α = B_α(a(x)) m(x)` for an exponential `m` and additive functions
//! `a_μ`, `1 ≤ |μ| ≤ N`. [`MomentSpec`] holds that data, [`construct`]
//! turns it into closed forms, [`verify_rank`] checks tabulated data
//! against the equation, and [`reconstruct`] recovers the data from tables.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{mv_bell, without_top_variable};
use crate::error::{Error, Result};
use crate::groupfn::{
    additivity_witness, classify_table, AdditiveFn, BoxGeometry, Classification, ClosedFormFn,
    Exponential, GroupElement, TabulatedFn,
};
use crate::multiindex::{binomial, enumerate_compositions, indices_up_to, MultiIndex};
use crate::poly::{Polynomial, Var};
use crate::scalar::Scalar;

/// Exponential plus additive family: the data behind a moment sequence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MomentSpec {
    rank: usize,
    order: u32,
    exponential: Exponential,
    additive: BTreeMap<MultiIndex, AdditiveFn>,
}

impl MomentSpec {
    /// Requires an additive function for every `1 ≤ |μ| ≤ order` and nothing
    /// else.
    pub fn new(
        rank: usize,
        order: u32,
        exponential: Exponential,
        additive: BTreeMap<MultiIndex, AdditiveFn>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Precondition("rank must be at least 1".into()));
        }
        let d = exponential.dim();
        if d == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        for (mu, a) in &additive {
            if mu.rank() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: mu.rank(),
                });
            }
            if mu.is_zero() || mu.height() > order {
                return Err(Error::Precondition(format!(
                    "additive index {mu} outside 1 ≤ |μ| ≤ {order}"
                )));
            }
            if a.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: a.dim(),
                });
            }
        }
        for mu in indices_up_to(rank, order).into_iter().skip(1) {
            if !additive.contains_key(&mu) {
                return Err(Error::MissingAdditive(mu));
            }
        }
        Ok(MomentSpec {
            rank,
            order,
            exponential,
            additive,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.exponential.dim()
    }

    pub fn exponential(&self) -> &Exponential {
        &self.exponential
    }

    pub fn additive(&self) -> &BTreeMap<MultiIndex, AdditiveFn> {
        &self.additive
    }

    /// The assignment `x_μ ↦ a_μ` used by the Bell closed forms.
    fn variable_family(&self) -> BTreeMap<Var, AdditiveFn> {
        self.additive
            .iter()
            .map(|(mu, a)| (Var::xm(mu.clone()), a.clone()))
            .collect()
    }
}

impl fmt::Display for MomentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "rank {}, order {}, dimension {}",
            self.rank,
            self.order,
            self.dim()
        )?;
        write!(f, "m: bases")?;
        for b in self.exponential.bases() {
            write!(f, " {b}")?;
        }
        for (mu, a) in &self.additive {
            write!(f, "\na_{mu}:")?;
            for v in a.gen_values() {
                write!(f, " {v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct AdditiveEntry {
    mu: MultiIndex,
    #[serde(rename = "fn")]
    function: AdditiveFn,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    r: usize,
    #[serde(rename = "N")]
    n: u32,
    d: usize,
    m: Exponential,
    a: Vec<AdditiveEntry>,
}

impl Serialize for MomentSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr {
            r: self.rank,
            n: self.order,
            d: self.dim(),
            m: self.exponential.clone(),
            a: self
                .additive
                .iter()
                .map(|(mu, a)| AdditiveEntry {
                    mu: mu.clone(),
                    function: a.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SpecRepr::deserialize(de)?;
        if repr.m.dim() != repr.d {
            return Err(D::Error::custom(format!(
                "d = {} but the exponential has {} bases",
                repr.d,
                repr.m.dim()
            )));
        }
        let mut additive = BTreeMap::new();
        for e in repr.a {
            if additive.insert(e.mu.clone(), e.function).is_some() {
                return Err(D::Error::custom(format!("additive index {} listed twice", e.mu)));
            }
        }
        MomentSpec::new(repr.r, repr.n, repr.m, additive).map_err(D::Error::custom)
    }
}

/// Closed-form functions indexed by multi-indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedFamily {
    rank: usize,
    order: u32,
    members: BTreeMap<MultiIndex, ClosedFormFn>,
}

impl ClosedFamily {
    pub fn new(rank: usize, order: u32, members: BTreeMap<MultiIndex, ClosedFormFn>) -> Self {
        ClosedFamily {
            rank,
            order,
            members,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn members(&self) -> &BTreeMap<MultiIndex, ClosedFormFn> {
        &self.members
    }

    pub fn member(&self, alpha: &MultiIndex) -> Result<&ClosedFormFn> {
        if alpha.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: alpha.rank(),
            });
        }
        self.members
            .get(alpha)
            .ok_or_else(|| Error::MissingMember(alpha.clone()))
    }

    /// Tabulates every member on the box of the given radius.
    pub fn tabulate(&self, radius: i64) -> Result<TabulatedSequence> {
        let d = self
            .members
            .values()
            .next()
            .map(ClosedFormFn::dim)
            .ok_or_else(|| Error::Precondition("empty family".into()))?;
        let tables = self
            .members
            .par_iter()
            .map(|(alpha, f)| Ok((alpha.clone(), TabulatedFn::tabulate(d, radius, f)?)))
            .collect::<Result<Vec<_>>>()?;
        TabulatedSequence::new(self.rank, self.order, tables.into_iter().collect())
    }
}

/// A moment sequence held as its data plus the Bell closed forms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MomentSequence {
    spec: MomentSpec,
    family: ClosedFamily,
}

impl MomentSequence {
    pub fn spec(&self) -> &MomentSpec {
        &self.spec
    }

    pub fn family(&self) -> &ClosedFamily {
        &self.family
    }

    pub fn member(&self, alpha: &MultiIndex) -> Result<&ClosedFormFn> {
        self.family.member(alpha).map_err(|e| match e {
            Error::MissingMember(a) => Error::Precondition(format!(
                "index {a} has height above the order {}",
                self.spec.order
            )),
            other => other,
        })
    }

    pub fn eval_member(&self, alpha: &MultiIndex, x: &GroupElement) -> Result<Scalar> {
        self.member(alpha)?.eval(x)
    }

    pub fn tabulate(&self, radius: i64) -> Result<TabulatedSequence> {
        self.family.tabulate(radius)
    }
}

impl fmt::Display for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.spec)?;
        for (alpha, g) in &self.family.members {
            if g.coeff_poly() == &Polynomial::one() {
                write!(f, "\nf_{alpha}(x) = m(x)")?;
            } else {
                write!(f, "\nf_{alpha}(x) = ({})·m(x)", g.coeff_poly())?;
            }
        }
        Ok(())
    }
}

/// `f_α = B_α(a(x)) m(x)` for every `|α| ≤ N`.
pub fn construct(spec: &MomentSpec) -> Result<MomentSequence> {
    let vars = spec.variable_family();
    let mut members = BTreeMap::new();
    for alpha in indices_up_to(spec.rank, spec.order) {
        let poly = mv_bell(&alpha).value;
        let family = poly
            .vars()
            .into_iter()
            .map(|v| {
                let a = vars.get(&v).cloned().ok_or_else(|| match &v.tag {
                    crate::poly::VarTag::Multi(mu) => Error::MissingAdditive(mu.clone()),
                    _ => Error::MissingVariable(v.clone()),
                })?;
                Ok((v, a))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        members.insert(
            alpha,
            ClosedFormFn::new(spec.exponential.clone(), poly, family)?,
        );
    }
    Ok(MomentSequence {
        spec: spec.clone(),
        family: ClosedFamily::new(spec.rank, spec.order, members),
    })
}

pub fn eval_member(seq: &MomentSequence, alpha: &MultiIndex, x: &GroupElement) -> Result<Scalar> {
    seq.eval_member(alpha, x)
}

/// Tables for every `|α| ≤ N` on one shared box.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TabulatedSequence {
    rank: usize,
    order: u32,
    members: BTreeMap<MultiIndex, TabulatedFn>,
}

impl TabulatedSequence {
    pub fn new(rank: usize, order: u32, members: BTreeMap<MultiIndex, TabulatedFn>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Precondition("rank must be at least 1".into()));
        }
        let mut shape = None;
        for (alpha, t) in &members {
            if alpha.rank() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: alpha.rank(),
                });
            }
            if alpha.height() > order {
                return Err(Error::Precondition(format!(
                    "member {alpha} has height above the order {order}"
                )));
            }
            match shape {
                None => shape = Some((t.dim(), t.radius())),
                Some((d, r)) => {
                    if t.dim() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: t.dim(),
                        });
                    }
                    if t.radius() != r {
                        return Err(Error::Precondition(format!(
                            "member {alpha} has radius {} but others have {r}",
                            t.radius()
                        )));
                    }
                }
            }
        }
        for alpha in indices_up_to(rank, order) {
            if !members.contains_key(&alpha) {
                return Err(Error::MissingMember(alpha));
            }
        }
        Ok(TabulatedSequence {
            rank,
            order,
            members,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn first(&self) -> &TabulatedFn {
        self.members.values().next().expect("the zero index is always present")
    }

    pub fn dim(&self) -> usize {
        self.first().dim()
    }

    pub fn radius(&self) -> i64 {
        self.first().radius()
    }

    pub fn geometry(&self) -> BoxGeometry {
        self.first().geometry()
    }

    pub fn members(&self) -> &BTreeMap<MultiIndex, TabulatedFn> {
        &self.members
    }

    pub fn member(&self, alpha: &MultiIndex) -> Result<&TabulatedFn> {
        self.members
            .get(alpha)
            .ok_or_else(|| Error::MissingMember(alpha.clone()))
    }

    pub fn member_mut(&mut self, alpha: &MultiIndex) -> Result<&mut TabulatedFn> {
        self.members
            .get_mut(alpha)
            .ok_or_else(|| Error::MissingMember(alpha.clone()))
    }
}

#[derive(Serialize, Deserialize)]
struct MemberEntry {
    alpha: MultiIndex,
    table: TabulatedFn,
}

#[derive(Serialize, Deserialize)]
struct TablesRepr {
    r: usize,
    #[serde(rename = "N")]
    n: u32,
    members: Vec<MemberEntry>,
}

impl Serialize for TabulatedSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TablesRepr {
            r: self.rank,
            n: self.order,
            members: self
                .members
                .iter()
                .map(|(alpha, t)| MemberEntry {
                    alpha: alpha.clone(),
                    table: t.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TabulatedSequence {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = TablesRepr::deserialize(de)?;
        let mut members = BTreeMap::new();
        for e in repr.members {
            if members.insert(e.alpha.clone(), e.table).is_some() {
                return Err(D::Error::custom(format!("member {} listed twice", e.alpha)));
            }
        }
        TabulatedSequence::new(repr.r, repr.n, members).map_err(D::Error::custom)
    }
}

/// Sampling policy for the verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Check every pair or tuple when there are at most this many.
    pub exhaustive_limit: u128,
    /// Number of uniformly drawn pairs or tuples otherwise.
    pub budget: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            exhaustive_limit: 100_000,
            budget: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Zero,
    Fail,
}

/// Which branch of the `f_0(0) ∈ {0, 1}` dichotomy the input is on.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dichotomy {
    /// `f_0(0) = 1`: `f_0` must be an exponential.
    Exponential,
    /// `f_0(0) = 0`: every member must vanish.
    Zero,
    /// Any other value of `f_0(0)`.
    Invalid,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Failure {
    pub alpha: MultiIndex,
    pub points: Vec<GroupElement>,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub reason: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub status: Status,
    pub classification: Dichotomy,
    pub generating_value: Scalar,
    /// Number of pairs or tuples checked.
    pub checked: usize,
    pub exhaustive: bool,
    /// Total failures found; `failures` keeps the first few.
    pub failure_count: usize,
    pub failures: Vec<Failure>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Zero => "zero",
            Status::Fail => "fail",
        };
        write!(
            f,
            "status: {status}\nf_0(0) = {}\nchecked: {} ({})",
            self.generating_value,
            self.checked,
            if self.exhaustive { "exhaustive" } else { "sampled" }
        )?;
        if self.failure_count > 0 {
            write!(f, "\nfailures: {}", self.failure_count)?;
        }
        for fl in &self.failures {
            let pts: Vec<String> = fl.points.iter().map(ToString::to_string).collect();
            write!(
                f,
                "\n  α = {} at [{}]: {} ≠ {} ({})",
                fl.alpha,
                pts.join(", "),
                fl.lhs,
                fl.rhs,
                fl.reason
            )?;
        }
        Ok(())
    }
}

const KEPT_FAILURES: usize = 16;
const CHUNK: usize = 64;

#[derive(Default)]
struct FailureLog {
    count: usize,
    kept: Vec<Failure>,
}

impl FailureLog {
    fn push(&mut self, f: Failure) {
        self.count += 1;
        if self.kept.len() < KEPT_FAILURES {
            self.kept.push(f);
        }
    }

    fn merge(mut self, other: FailureLog) -> FailureLog {
        self.count += other.count;
        let room = KEPT_FAILURES - self.kept.len();
        self.kept.extend(other.kept.into_iter().take(room));
        self
    }
}

/// Checks `f_0(0)` and, on the degenerate branch, that nothing else is
/// nonzero.
fn dichotomy(seq: &TabulatedSequence, log: &mut FailureLog) -> (Dichotomy, Scalar) {
    let d = seq.dim();
    let origin = GroupElement::zero(d);
    let zero_index = MultiIndex::zero(seq.rank);
    let f0 = seq.members[&zero_index]
        .get(&origin)
        .expect("origin is in every box")
        .clone();
    if f0.is_one() {
        return (Dichotomy::Exponential, f0);
    }
    if f0.is_zero() {
        for (alpha, t) in &seq.members {
            if let Some((x, v)) = t.entries().find(|(_, v)| !v.is_zero()) {
                log.push(Failure {
                    alpha: alpha.clone(),
                    points: vec![x],
                    lhs: v.clone(),
                    rhs: Scalar::zero(),
                    reason: "f_0(0) = 0 forces every member to vanish".into(),
                });
            }
        }
        return (Dichotomy::Zero, f0);
    }
    log.push(Failure {
        alpha: zero_index,
        points: vec![origin],
        lhs: f0.clone(),
        rhs: Scalar::one(),
        reason: "f_0(0) must be 0 or 1".into(),
    });
    (Dichotomy::Invalid, f0)
}

fn finish(
    log: FailureLog,
    class: Dichotomy,
    generating_value: Scalar,
    checked: usize,
    exhaustive: bool,
) -> VerifyReport {
    let status = if log.count > 0 {
        Status::Fail
    } else if class == Dichotomy::Zero {
        Status::Zero
    } else {
        Status::Pass
    };
    VerifyReport {
        status,
        classification: class,
        generating_value,
        checked,
        exhaustive,
        failure_count: log.count,
        failures: log.kept,
    }
}

/// Draws a value pair `(u, v)` uniformly from `|u|, |v|, |u+v| ≤ r`.
fn sample_coordinate_pair(rng: &mut ChaCha8Rng, r: i64) -> (i64, i64) {
    loop {
        let u = rng.gen_range(-r..=r);
        let v = rng.gen_range(-r..=r);
        if (u + v).abs() <= r {
            return (u, v);
        }
    }
}

/// In-box pairs `(x, y, x+y)` as table indices: all of them when the count
/// is within the limit, otherwise a seeded uniform draw with replacement.
fn pair_indices(geom: BoxGeometry, cfg: &VerifyConfig) -> (Vec<[usize; 3]>, bool) {
    let idx = |x: &GroupElement| geom.index_of(x).expect("in-box point");
    if geom.pair_count() <= cfg.exhaustive_limit {
        let pts: Vec<GroupElement> = geom.points().collect();
        let mut out = Vec::new();
        for (i, x) in pts.iter().enumerate() {
            for (j, y) in pts.iter().enumerate() {
                if let Some(k) = geom.index_of(&(x + y)) {
                    out.push([i, j, k]);
                }
            }
        }
        return (out, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let out = (0..cfg.budget)
        .map(|_| {
            let (xs, ys): (Vec<i64>, Vec<i64>) = (0..geom.dim())
                .map(|_| sample_coordinate_pair(&mut rng, geom.radius()))
                .unzip();
            let x = GroupElement::new(xs);
            let y = GroupElement::new(ys);
            [idx(&x), idx(&y), idx(&(&x + &y))]
        })
        .collect();
    (out, false)
}

/// Checks `f_α(x+y) = Σ_{β≤α} C(α,β) f_β(x) f_{α−β}(y)` for every member on
/// in-box pairs, together with the `f_0(0) ∈ {0, 1}` dichotomy.
pub fn verify_rank(seq: &TabulatedSequence, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let geom = seq.geometry();
    if geom.radius() < 1 {
        return Err(Error::Precondition("verification needs a box of radius at least 1".into()));
    }
    let mut log = FailureLog::default();
    let (class, f0) = dichotomy(seq, &mut log);

    let alphas: Vec<&MultiIndex> = seq.members.keys().collect();
    let values: Vec<&[Scalar]> = seq.members.values().map(TabulatedFn::values).collect();
    let position = |a: &MultiIndex| alphas.binary_search(&a).expect("member present");
    let mut expansions = Vec::with_capacity(alphas.len());
    for alpha in &alphas {
        let mut terms = Vec::new();
        for beta in alpha.enumerate_below() {
            let rest = alpha.checked_sub(&beta)?;
            let c = Scalar::from(alpha.binom(&beta)?);
            terms.push((position(&beta), position(&rest), c));
        }
        expansions.push(terms);
    }

    let (pairs, exhaustive) = pair_indices(geom, cfg);
    let check = pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut local = FailureLog::default();
            for &[i, j, k] in chunk {
                for (a, terms) in expansions.iter().enumerate() {
                    let lhs = &values[a][k];
                    let mut rhs = Scalar::zero();
                    for (b, c, coeff) in terms {
                        let (u, v) = (&values[*b][i], &values[*c][j]);
                        if u.is_zero() || v.is_zero() {
                            continue;
                        }
                        rhs += &(coeff * &(u * v));
                    }
                    if lhs != &rhs {
                        local.push(Failure {
                            alpha: alphas[a].clone(),
                            points: vec![geom.point_at(i), geom.point_at(j)],
                            lhs: lhs.clone(),
                            rhs,
                            reason: "functional equation".into(),
                        });
                    }
                }
            }
            local
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(FailureLog::default(), FailureLog::merge);
    log = log.merge(check);
    Ok(finish(log, class, f0, pairs.len(), exhaustive))
}

/// Number of `l`-tuples in `[-r, r]^l` whose sum lies in `[-r, r]`.
fn coordinate_tuple_count(r: i64, l: usize) -> u128 {
    // counts[s] = number of tuples so far with sum s - offset
    let side = (2 * r + 1) as usize;
    let mut counts: Vec<u128> = vec![1];
    for _ in 0..l {
        let mut next = vec![0u128; counts.len() + side - 1];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for v in 0..side {
                next[s + v] += c;
            }
        }
        counts = next;
    }
    let offset = (l as i64) * r;
    counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as i64 - offset).abs() <= r)
        .map(|(_, &c)| c)
        .sum()
}

fn coordinate_tuples(r: i64, l: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(l);
    fn rec(r: i64, l: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == l {
            if cur.iter().sum::<i64>().abs() <= r {
                out.push(cur.clone());
            }
            return;
        }
        // prune: the remaining entries can move the sum by at most r each
        let partial: i64 = cur.iter().sum();
        let left = (l - cur.len()) as i64;
        if partial.abs() > r + left * r {
            return;
        }
        for v in -r..=r {
            cur.push(v);
            rec(r, l, cur, out);
            cur.pop();
        }
    }
    rec(r, l, &mut cur, &mut out);
    out
}

type TupleIndices = (Vec<usize>, usize);

fn tuple_indices(geom: BoxGeometry, l: usize, cfg: &VerifyConfig) -> (Vec<TupleIndices>, bool) {
    let d = geom.dim();
    let r = geom.radius();
    let idx = |x: &GroupElement| geom.index_of(x).expect("in-box point");
    let assemble = |per_coord: Vec<&[i64]>| -> TupleIndices {
        let pts: Vec<GroupElement> = (0..l)
            .map(|t| GroupElement::new(per_coord.iter().map(|c| c[t]).collect()))
            .collect();
        let sum = pts
            .iter()
            .fold(GroupElement::zero(d), |acc, p| &acc + p);
        (pts.iter().map(idx).collect(), idx(&sum))
    };

    let per_coord = coordinate_tuple_count(r, l);
    let total = per_coord.checked_pow(d as u32);
    if total.is_some_and(|t| t <= cfg.exhaustive_limit) {
        let base = coordinate_tuples(r, l);
        let mut out = Vec::new();
        let mut digits = vec![0usize; d];
        loop {
            out.push(assemble(digits.iter().map(|&k| base[k].as_slice()).collect()));
            let mut pos = 0;
            while pos < d {
                digits[pos] += 1;
                if digits[pos] < base.len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == d {
                break;
            }
        }
        return (out, true);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.budget);
    for _ in 0..cfg.budget {
        let coords: Vec<Vec<i64>> = (0..d)
            .map(|_| loop {
                let c: Vec<i64> = (0..l).map(|_| rng.gen_range(-r..=r)).collect();
                if c.iter().sum::<i64>().abs() <= r {
                    break c;
                }
            })
            .collect();
        out.push(assemble(coords.iter().map(Vec::as_slice).collect()));
    }
    (out, false)
}

/// Checks `φ_n(x_1+…+x_l) = Σ_{k_1+…+k_l=n} (n; k_1..k_l) Π φ_{k_t}(x_t)`
/// on rank-1 tables. Tuples `(x, y, 0, …, 0)` from the pair set are
/// included alongside the general `l`-tuples, and `φ_n(0) = 0` for `n ≥ 1`
/// is checked first.
pub fn verify_multivariable(
    seq: &TabulatedSequence,
    l: usize,
    cfg: &VerifyConfig,
) -> Result<VerifyReport> {
    if seq.rank != 1 {
        return Err(Error::RankMismatch {
            expected: 1,
            found: seq.rank,
        });
    }
    if l < 2 {
        return Err(Error::Precondition("the multivariable equation needs l >= 2".into()));
    }
    let geom = seq.geometry();
    if geom.radius() < 1 {
        return Err(Error::Precondition(
            "no nontrivial l-tuples fit in a box of radius 0".into(),
        ));
    }
    let mut log = FailureLog::default();
    let (class, f0) = dichotomy(seq, &mut log);

    let d = seq.dim();
    let origin = geom.index_of(&GroupElement::zero(d)).expect("origin");
    let phi: Vec<&[Scalar]> = seq.members.values().map(TabulatedFn::values).collect();
    for (n, values) in phi.iter().enumerate().skip(1) {
        if !values[origin].is_zero() {
            log.push(Failure {
                alpha: MultiIndex::new(vec![n as u32]),
                points: vec![GroupElement::zero(d)],
                lhs: values[origin].clone(),
                rhs: Scalar::zero(),
                reason: "φ_n(0) must vanish for n >= 1".into(),
            });
        }
    }

    // Compositions come in lex order; each term records how many leading
    // parts it shares with its predecessor so partial products can be reused.
    let mut expansions = Vec::new();
    for n in 0..=seq.order {
        let comps = enumerate_compositions(n, l)?;
        let mut terms: Vec<(Vec<usize>, Scalar, usize)> = Vec::with_capacity(comps.len());
        for c in comps {
            let parts: Vec<usize> = c.parts().iter().map(|&k| k as usize).collect();
            let shared = terms.last().map_or(0, |(prev, _, _)| {
                prev.iter().zip(&parts).take_while(|(a, b)| a == b).count()
            });
            terms.push((parts, Scalar::from(c.multinomial()), shared));
        }
        expansions.push(terms);
    }

    let (mut tuples, exhaustive) = tuple_indices(geom, l, cfg);
    let (pairs, _) = pair_indices(geom, cfg);
    tuples.extend(pairs.into_iter().map(|[i, j, k]| {
        let mut pts = vec![origin; l];
        pts[0] = i;
        pts[1] = j;
        (pts, k)
    }));

    let check = tuples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut local = FailureLog::default();
            // prefix[t] = Π_{s<t} φ_{k_s}(x_s), None once a factor vanishes
            let mut prefix: Vec<Option<Scalar>> = vec![None; l + 1];
            prefix[0] = Some(Scalar::one());
            for (pts, sum) in chunk {
                for (n, terms) in expansions.iter().enumerate() {
                    let lhs = &phi[n][*sum];
                    let mut rhs = Scalar::zero();
                    for (i, (parts, coeff, shared)) in terms.iter().enumerate() {
                        let from = if i == 0 { 0 } else { *shared };
                        for t in from..l {
                            prefix[t + 1] = prefix[t].as_ref().and_then(|p| {
                                let v = &phi[parts[t]][pts[t]];
                                (!v.is_zero()).then(|| p * v)
                            });
                        }
                        if let Some(prod) = &prefix[l] {
                            rhs += &(prod * coeff);
                        }
                    }
                    if lhs != &rhs {
                        local.push(Failure {
                            alpha: MultiIndex::new(vec![n as u32]),
                            points: pts.iter().map(|&p| geom.point_at(p)).collect(),
                            lhs: lhs.clone(),
                            rhs,
                            reason: format!("{l}-variable equation"),
                        });
                    }
                }
            }
            local
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(FailureLog::default(), FailureLog::merge);
    log = log.merge(check);
    Ok(finish(log, class, f0, tuples.len(), exhaustive))
}

fn not_moment(alpha: &MultiIndex, reason: impl Into<String>, witness: Vec<GroupElement>) -> Error {
    Error::NotMomentSequence {
        alpha: alpha.clone(),
        reason: reason.into(),
        witness,
    }
}

/// A point or pair showing that a table is not an exponential.
fn exponential_witness(t: &TabulatedFn) -> Vec<GroupElement> {
    let origin = GroupElement::zero(t.dim());
    if !t.get(&origin).is_some_and(One::is_one) {
        return vec![origin];
    }
    let at = |x: &GroupElement| t.get(x).expect("in-box point");
    t.geometry()
        .pairs()
        .into_iter()
        .find(|(x, y)| at(&(x + y)) != &(at(x) * at(y)))
        .map(|(x, y)| vec![x, y])
        .unwrap_or_default()
}

fn additive_or_fail(alpha: &MultiIndex, g: &TabulatedFn) -> Result<AdditiveFn> {
    match classify_table(g)? {
        Classification::Additive(a) => Ok(a),
        _ => {
            let witness = additivity_witness(g)
                .map(|(x, y)| vec![x, y])
                .unwrap_or_default();
            Err(not_moment(
                alpha,
                "the residual f_α/m − P_α(a) is not additive",
                witness,
            ))
        }
    }
}

/// Recovers `m` and the additive family from tables, by induction on `|α|`
/// in graded-lex order: `m = f_0`, then `a_α = f_α/m − P_α(a)` where `P_α`
/// is `B_α` without its top variable `x_α`.
pub fn reconstruct(seq: &TabulatedSequence) -> Result<MomentSpec> {
    reconstruct_inner(seq, None)
}

/// The same induction, but each step starts from a seed `χ_α` for the top
/// variable: `η = (f_α − B_α(a, χ_α) m)/m` must be additive and
/// `a_α = χ_α + η`. Missing seeds are zero. The result does not depend on
/// the seeds.
pub fn reconstruct_with_seeds(
    seq: &TabulatedSequence,
    seeds: &BTreeMap<MultiIndex, AdditiveFn>,
) -> Result<MomentSpec> {
    reconstruct_inner(seq, Some(seeds))
}

fn reconstruct_inner(
    seq: &TabulatedSequence,
    seeds: Option<&BTreeMap<MultiIndex, AdditiveFn>>,
) -> Result<MomentSpec> {
    let geom = seq.geometry();
    if geom.radius() < 2 {
        return Err(Error::Precondition(
            "reconstruction needs a box of radius at least 2".into(),
        ));
    }
    let d = seq.dim();
    let zero = MultiIndex::zero(seq.rank);
    let f0 = seq.member(&zero)?;
    let m = match classify_table(f0)? {
        Classification::Exponential(m) => m,
        _ => {
            return Err(not_moment(
                &zero,
                "f_0 is not an exponential",
                exponential_witness(f0),
            ))
        }
    };
    let m_inv: Vec<Scalar> = f0
        .values()
        .iter()
        .map(Scalar::inv)
        .collect::<Result<_>>()?;

    let points: Vec<GroupElement> = geom.points().collect();
    let mut additive: BTreeMap<MultiIndex, AdditiveFn> = BTreeMap::new();
    // a_μ(x) at every box point, in point order
    let mut a_values: BTreeMap<Var, Vec<Scalar>> = BTreeMap::new();

    let eval_at = |p: &Polynomial, k: usize, a_values: &BTreeMap<Var, Vec<Scalar>>| {
        let assignment = p
            .vars()
            .into_iter()
            .map(|v| {
                let val = a_values
                    .get(&v)
                    .map(|vals| vals[k].clone())
                    .ok_or_else(|| Error::MissingVariable(v.clone()))?;
                Ok((v, val))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        p.eval(&assignment)
    };

    for alpha in indices_up_to(seq.rank, seq.order).into_iter().skip(1) {
        let f = seq.member(&alpha)?;
        let a_alpha = match seeds {
            None => {
                let p = without_top_variable(&alpha)?;
                let g = f.map(|x, v| {
                    let k = geom.index_of(x).expect("in-box point");
                    Ok(&(v * &m_inv[k]) - &eval_at(&p, k, &a_values)?)
                })?;
                additive_or_fail(&alpha, &g)?
            }
            Some(seeds) => {
                let chi = seeds.get(&alpha).cloned().unwrap_or_else(|| AdditiveFn::zero(d));
                let b = mv_bell(&alpha).value;
                let top = Var::xm(alpha.clone());
                let mut with_chi = a_values.clone();
                with_chi.insert(
                    top,
                    points.iter().map(|x| chi.eval(x)).collect::<Result<_>>()?,
                );
                let eta = f.map(|x, v| {
                    let k = geom.index_of(x).expect("in-box point");
                    let bell = eval_at(&b, k, &with_chi)?;
                    Ok(&(v * &m_inv[k]) - &bell)
                })?;
                &chi + &additive_or_fail(&alpha, &eta)?
            }
        };
        a_values.insert(
            Var::xm(alpha.clone()),
            points.iter().map(|x| a_alpha.eval(x)).collect::<Result<_>>()?,
        );
        additive.insert(alpha, a_alpha);
    }

    let spec = MomentSpec::new(seq.rank, seq.order, m, additive)?;
    let rebuilt = construct(&spec)?.tabulate(geom.radius())?;
    for (alpha, t) in &seq.members {
        let r = &rebuilt.members[alpha];
        if let Some((x, _)) = t.entries().zip(r.values()).find(|((_, a), b)| a != b).map(|(e, _)| e) {
            return Err(not_moment(
                alpha,
                "the recovered closed form disagrees with the table",
                vec![x],
            ));
        }
    }
    Ok(spec)
}

/// Rank-2 sequences collapse to rank 1 via `φ_n = Σ_k C(n,k) f_{(k,n−k)}`.
/// The result is again a moment sequence, with additive data
/// `b_n = Σ_k C(n,k) a_{(k,n−k)}`.
pub fn collapse_rank2(seq: &MomentSequence) -> Result<MomentSequence> {
    let spec = seq.spec();
    if spec.rank != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: spec.rank,
        });
    }
    let d = spec.dim();
    let mut additive = BTreeMap::new();
    for n in 1..=spec.order {
        let mut b = AdditiveFn::zero(d);
        for k in 0..=n {
            let a = &spec.additive[&MultiIndex::new(vec![k, n - k])];
            let c = Scalar::from(binomial(n, k));
            b = &b + &AdditiveFn::new(a.gen_values().iter().map(|v| v * &c).collect());
        }
        additive.insert(MultiIndex::new(vec![n]), b);
    }
    construct(&MomentSpec::new(1, spec.order, spec.exponential.clone(), additive)?)
}

/// The collapse taken literally: `φ_n` as the closed form
/// `(Σ_k C(n,k) B_{(k,n−k)})(a(x)) m(x)` over the original additive family.
pub fn collapse_rank2_direct(seq: &MomentSequence) -> Result<ClosedFamily> {
    let spec = seq.spec();
    if spec.rank != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: spec.rank,
        });
    }
    let mut members = BTreeMap::new();
    for n in 0..=spec.order {
        let mut poly = Polynomial::zero();
        let mut family = BTreeMap::new();
        for k in 0..=n {
            let f = seq.member(&MultiIndex::new(vec![k, n - k]))?;
            let c = Scalar::from(binomial(n, k));
            poly = &poly + &f.coeff_poly().scale(&c);
            family.extend(f.additive_family().iter().map(|(v, a)| (v.clone(), a.clone())));
        }
        members.insert(
            MultiIndex::new(vec![n]),
            ClosedFormFn::new(spec.exponential.clone(), poly, family)?,
        );
    }
    Ok(ClosedFamily::new(1, spec.order, members))
}

/// Pointwise `φ_n = Σ_k C(n,k) f_{(k,n−k)}` on rank-2 tables.
pub fn collapse_tables(seq: &TabulatedSequence) -> Result<TabulatedSequence> {
    if seq.rank != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: seq.rank,
        });
    }
    let mut members = BTreeMap::new();
    for n in 0..=seq.order {
        let mut acc = TabulatedFn::zeros(seq.dim(), seq.radius())?;
        for k in 0..=n {
            let f = seq.member(&MultiIndex::new(vec![k, n - k]))?;
            let c = Scalar::from(binomial(n, k));
            acc = acc.map(|x, v| Ok(v + &(&c * f.get(x).expect("shared box"))))?;
        }
        members.insert(MultiIndex::new(vec![n]), acc);
    }
    TabulatedSequence::new(1, seq.order, members)
}

/// Validates a coordinate set (0-based): nonempty, in range, no repeats.
/// Returns it sorted.
fn keep_coordinates(keep: &[usize], rank: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::Precondition("keep must name at least one coordinate".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Precondition(format!("coordinate {} repeated", w[0])));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&k| k >= rank) {
        return Err(Error::Precondition(format!(
            "coordinate {bad} out of range for rank {rank}"
        )));
    }
    Ok(sorted)
}

/// Places a rank-`|keep|` index into rank `rank`, zero off `keep`.
fn embed(nu: &MultiIndex, keep: &[usize], rank: usize) -> MultiIndex {
    let mut e = vec![0; rank];
    for (&k, &v) in keep.iter().zip(nu.entries()) {
        e[k] = v;
    }
    MultiIndex::new(e)
}

/// The subfamily of indices supported on `keep` (0-based coordinates),
/// re-indexed to rank `|keep|`.
pub fn project_seq(seq: &MomentSequence, keep: &[usize]) -> Result<MomentSequence> {
    let spec = seq.spec();
    let keep = keep_coordinates(keep, spec.rank)?;
    let additive = indices_up_to(keep.len(), spec.order)
        .into_iter()
        .skip(1)
        .map(|nu| {
            let a = spec.additive[&embed(&nu, &keep, spec.rank)].clone();
            (nu, a)
        })
        .collect();
    construct(&MomentSpec::new(
        keep.len(),
        spec.order,
        spec.exponential.clone(),
        additive,
    )?)
}

pub fn project_tables(seq: &TabulatedSequence, keep: &[usize]) -> Result<TabulatedSequence> {
    let keep = keep_coordinates(keep, seq.rank)?;
    let members = indices_up_to(keep.len(), seq.order)
        .into_iter()
        .map(|nu| {
            let t = seq.member(&embed(&nu, &keep, seq.rank))?.clone();
            Ok((nu, t))
        })
        .collect::<Result<_>>()?;
    TabulatedSequence::new(keep.len(), seq.order, members)
}

/// Replaces the exponential by the constant one, keeping the additive
/// family, so member `α` becomes `B_α(a(x))`.
pub fn normalize(seq: &MomentSequence) -> Result<MomentSequence> {
    let spec = seq.spec();
    construct(&MomentSpec::new(
        spec.rank,
        spec.order,
        Exponential::identity(spec.dim()),
        spec.additive.clone(),
    )?)
}

/// Pointwise `f_α / f_0`. Requires `f_0` to vanish nowhere on the box.
pub fn normalize_tables(seq: &TabulatedSequence) -> Result<TabulatedSequence> {
    let f0 = seq.member(&MultiIndex::zero(seq.rank))?;
    let inv: Vec<Scalar> = f0
        .values()
        .iter()
        .map(Scalar::inv)
        .collect::<Result<_>>()?;
    let geom = seq.geometry();
    let members = seq
        .members
        .iter()
        .map(|(alpha, t)| {
            let n = t.map(|x, v| Ok(v * &inv[geom.index_of(x).expect("shared box")]))?;
            Ok((alpha.clone(), n))
        })
        .collect::<Result<_>>()?;
    TabulatedSequence::new(seq.rank, seq.order, members)
}

/// A random Gaussian rational with small numerators and denominators.
pub fn random_scalar(rng: &mut impl Rng, nonzero: bool) -> Scalar {
    loop {
        let re = (rng.gen_range(-3..=3), rng.gen_range(1..=3));
        let im = if rng.gen_bool(0.5) {
            (0, 1)
        } else {
            (rng.gen_range(-2..=2), rng.gen_range(1..=2))
        };
        let s = Scalar::gaussian(re, im);
        if !(nonzero && s.is_zero()) {
            return s;
        }
    }
}

/// A random spec with nonzero exponential bases and nonzero generator
/// values throughout.
pub fn random_spec(rng: &mut impl Rng, rank: usize, order: u32, d: usize) -> Result<MomentSpec> {
    let m = Exponential::new((0..d).map(|_| random_scalar(rng, true)).collect())?;
    let additive = indices_up_to(rank, order)
        .into_iter()
        .skip(1)
        .map(|mu| {
            let a = AdditiveFn::new((0..d).map(|_| random_scalar(rng, true)).collect());
            (mu, a)
        })
        .collect();
    MomentSpec::new(rank, order, m, additive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from(n)
    }

    fn g(v: &[i64]) -> GroupElement {
        GroupElement::new(v.to_vec())
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn spec_1d(base: i64, gens: &[(Vec<u32>, i64)], rank: usize, order: u32) -> MomentSpec {
        let additive = gens
            .iter()
            .map(|(mu, v)| (MultiIndex::new(mu.clone()), AdditiveFn::new(vec![s(*v)])))
            .collect();
        MomentSpec::new(rank, order, Exponential::new(vec![s(base)]).unwrap(), additive).unwrap()
    }

    #[test]
    fn construct_examples() {
        let spec = spec_1d(1, &[(vec![1], 1), (vec![2], 0)], 1, 2);
        let seq = construct(&spec).unwrap();
        for x in -3..=3 {
            assert_eq!(seq.eval_member(&mi(&[0]), &g(&[x])).unwrap(), s(1));
            assert_eq!(seq.eval_member(&mi(&[1]), &g(&[x])).unwrap(), s(x));
            assert_eq!(seq.eval_member(&mi(&[2]), &g(&[x])).unwrap(), s(x * x));
        }
        assert!(seq.eval_member(&mi(&[3]), &g(&[0])).is_err());
        assert!(seq.eval_member(&mi(&[1, 0]), &g(&[0])).is_err());

        let spec = spec_1d(2, &[(vec![1], 1), (vec![2], 5)], 1, 2);
        let seq = construct(&spec).unwrap();
        assert_eq!(seq.eval_member(&mi(&[2]), &g(&[3])).unwrap(), s(192));
        assert_eq!(seq.eval_member(&mi(&[1]), &g(&[3])).unwrap(), s(24));
        assert_eq!(seq.eval_member(&mi(&[2]), &g(&[0])).unwrap(), s(0));

        let spec = spec_1d(3, &[(vec![1, 0], 1), (vec![0, 1], 2)], 2, 1);
        let seq = construct(&spec).unwrap();
        assert_eq!(seq.family().members().len(), 3);
        assert_eq!(seq.eval_member(&mi(&[0, 1]), &g(&[2])).unwrap(), s(4 * 9));
        assert_eq!(seq.eval_member(&mi(&[1, 0]), &g(&[2])).unwrap(), s(2 * 9));
    }

    #[test]
    fn spec_requires_full_family() {
        let m = Exponential::identity(1);
        let a = BTreeMap::from([(mi(&[1]), AdditiveFn::zero(1))]);
        assert_eq!(
            MomentSpec::new(1, 2, m.clone(), a.clone()),
            Err(Error::MissingAdditive(mi(&[2])))
        );
        let mut extra = a.clone();
        extra.insert(mi(&[0]), AdditiveFn::zero(1));
        assert!(MomentSpec::new(1, 1, m, extra).is_err());
    }

    #[test]
    fn verify_pass_zero_fail() {
        let spec = spec_1d(2, &[(vec![1], 1), (vec![2], 5)], 1, 2);
        let tabs = construct(&spec).unwrap().tabulate(3).unwrap();
        let cfg = VerifyConfig::default();
        let report = verify_rank(&tabs, &cfg).unwrap();
        assert_eq!(report.status, Status::Pass, "{report}");
        assert!(report.exhaustive);

        let zeros = TabulatedSequence::new(
            1,
            2,
            indices_up_to(1, 2)
                .into_iter()
                .map(|a| (a, TabulatedFn::zeros(1, 3).unwrap()))
                .collect(),
        )
        .unwrap();
        assert_eq!(verify_rank(&zeros, &cfg).unwrap().status, Status::Zero);

        let mut bad = tabs.clone();
        let t = bad.member_mut(&mi(&[2])).unwrap();
        let old = t.get(&g(&[1])).unwrap().clone();
        t.set(&g(&[1]), &old + &s(1)).unwrap();
        let report = verify_rank(&bad, &cfg).unwrap();
        assert_eq!(report.status, Status::Fail);
        assert!(report.failures.iter().all(|f| f.alpha == mi(&[2])));
        assert!(report.failures[0].points.iter().any(|p| p == &g(&[1]))
            || report.failures[0].points.iter().fold(g(&[0]), |a, p| &a + p) == g(&[1]));
    }

    #[test]
    fn degenerate_branch_with_nonzero_member_fails() {
        let mut members: BTreeMap<_, _> = indices_up_to(1, 1)
            .into_iter()
            .map(|a| (a, TabulatedFn::zeros(1, 2).unwrap()))
            .collect();
        members.get_mut(&mi(&[1])).unwrap().set(&g(&[2]), s(1)).unwrap();
        let tabs = TabulatedSequence::new(1, 1, members).unwrap();
        let report = verify_rank(&tabs, &VerifyConfig::default()).unwrap();
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.classification, Dichotomy::Zero);
    }

    #[test]
    fn sampling_is_deterministic_and_parallel_safe() {
        let spec = spec_1d(2, &[(vec![1, 0], 1), (vec![0, 1], 3)], 2, 1);
        let tabs = construct(&spec).unwrap().tabulate(2).unwrap();
        let cfg = VerifyConfig {
            exhaustive_limit: 0,
            budget: 300,
            seed: 7,
        };
        let a = verify_rank(&tabs, &cfg).unwrap();
        let b = verify_rank(&tabs, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(!a.exhaustive);
        assert_eq!(a.checked, 300);
        assert_eq!(a.status, Status::Pass);
    }

    #[test]
    fn tuple_counts_match_enumeration() {
        for (r, l) in [(1, 2), (2, 3), (3, 4), (4, 3)] {
            assert_eq!(
                coordinate_tuple_count(r, l),
                coordinate_tuples(r, l).len() as u128
            );
        }
        assert_eq!(coordinate_tuple_count(4, 2), 61);
    }

    #[test]
    fn multivariable_checks() {
        let spec = spec_1d(2, &[(vec![1], 1), (vec![2], -1), (vec![3], 2)], 1, 3);
        let tabs = construct(&spec).unwrap().tabulate(3).unwrap();
        let cfg = VerifyConfig::default();
        for l in 2..=4 {
            let report = verify_multivariable(&tabs, l, &cfg).unwrap();
            assert_eq!(report.status, Status::Pass, "l = {l}: {report}");
        }
        let mut bad = tabs.clone();
        bad.member_mut(&mi(&[1])).unwrap().set(&g(&[0]), s(1)).unwrap();
        let report = verify_multivariable(&bad, 3, &cfg).unwrap();
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.failures[0].reason, "φ_n(0) must vanish for n >= 1");
        assert!(verify_multivariable(&tabs, 1, &cfg).is_err());
    }

    #[test]
    fn reconstruct_polynomial_tables() {
        let members = [(0u32, 0u32), (1, 1), (2, 2)]
            .into_iter()
            .map(|(n, p)| {
                let t = TabulatedFn::from_fn(1, 4, |x| Ok(s(x.coords()[0].pow(p)))).unwrap();
                (mi(&[n]), t)
            })
            .collect();
        let tabs = TabulatedSequence::new(1, 2, members).unwrap();
        let spec = reconstruct(&tabs).unwrap();
        assert!(spec.exponential().is_identity());
        assert_eq!(spec.additive()[&mi(&[1])], AdditiveFn::new(vec![s(1)]));
        assert_eq!(spec.additive()[&mi(&[2])], AdditiveFn::zero(1));

        let mut bad = tabs.clone();
        *bad.member_mut(&mi(&[1])).unwrap() =
            TabulatedFn::from_fn(1, 4, |x| Ok(s(x.coords()[0].pow(2)))).unwrap();
        match reconstruct(&bad) {
            Err(Error::NotMomentSequence { alpha, witness, .. }) => {
                assert_eq!(alpha, mi(&[1]));
                assert_eq!(witness.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reconstruct_round_trip_and_seed_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = random_spec(&mut rng, 2, 2, 2).unwrap();
        let tabs = construct(&spec).unwrap().tabulate(2).unwrap();
        assert_eq!(reconstruct(&tabs).unwrap(), spec);
        let seeds = spec
            .additive()
            .keys()
            .map(|mu| (mu.clone(), AdditiveFn::new(vec![s(7), Scalar::i()])))
            .collect();
        assert_eq!(reconstruct_with_seeds(&tabs, &seeds).unwrap(), spec);
    }

    #[test]
    fn transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = random_spec(&mut rng, 2, 3, 1).unwrap();
        let seq = construct(&spec).unwrap();

        let collapsed = collapse_rank2(&seq).unwrap();
        let direct = collapse_rank2_direct(&seq).unwrap();
        let tabs = seq.tabulate(2).unwrap();
        let via_tables = collapse_tables(&tabs).unwrap();
        assert_eq!(collapsed.tabulate(2).unwrap(), via_tables);
        assert_eq!(direct.tabulate(2).unwrap(), via_tables);

        assert_eq!(project_seq(&seq, &[0, 1]).unwrap(), seq);
        let p = project_seq(&seq, &[0]).unwrap();
        assert_eq!(p.spec().rank(), 1);
        assert_eq!(p.tabulate(2).unwrap(), project_tables(&tabs, &[0]).unwrap());
        assert!(project_seq(&seq, &[]).is_err());
        assert!(project_seq(&seq, &[2]).is_err());

        let n = normalize(&seq).unwrap();
        assert_eq!(normalize(&n).unwrap(), n);
        assert_eq!(n.tabulate(2).unwrap(), normalize_tables(&tabs).unwrap());
    }

    #[test]
    fn json_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = random_spec(&mut rng, 2, 2, 1).unwrap();
        let j = serde_json::to_value(&spec).unwrap();
        assert_eq!(j["N"], 2);
        assert_eq!(serde_json::from_value::<MomentSpec>(j).unwrap(), spec);
        let tabs = construct(&spec).unwrap().tabulate(1).unwrap();
        let text = serde_json::to_string(&tabs).unwrap();
        assert_eq!(serde_json::from_str::<TabulatedSequence>(&text).unwrap(), tabs);
        let report = verify_rank(&tabs, &VerifyConfig::default()).unwrap();
        let j = serde_json::to_value(&report).unwrap();
        assert_eq!(j["status"], "pass");
        assert_eq!(serde_json::from_value::<VerifyReport>(j).unwrap(), report);
    }
}
