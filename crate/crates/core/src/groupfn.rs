//! The group `Z^d` and the function classes living on it: exponentials,
//! additive functions, closed-form exponential polynomials `P(a(x))·m(x)`,
//! and functions tabulated on an `∞`-norm box.
//!
//! Exponentials and additive functions on `Z^d` are determined by their
//! values on the standard basis, so both are stored as generator data.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, Var};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<i64>);

impl GroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        GroupElement(coords)
    }

    pub fn zero(d: usize) -> Self {
        GroupElement(vec![0; d])
    }

    pub fn unit(d: usize, k: usize) -> Self {
        let mut v = vec![0; d];
        v[k] = 1;
        GroupElement(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn inf_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.dim(), rhs.dim());
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.dim(), rhs.dim());
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Anything that can be evaluated at a point of `Z^d`.
pub trait GroupFunction {
    fn value_at(&self, x: &GroupElement) -> Result<Scalar>;
}

impl<F> GroupFunction for F
where
    F: Fn(&GroupElement) -> Result<Scalar>,
{
    fn value_at(&self, x: &GroupElement) -> Result<Scalar> {
        self(x)
    }
}

/// `m(x) = Π c_i^{x_i}` with nonzero bases `c_i = m(e_i)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "ExponentialRepr")]
pub struct Exponential {
    bases: Vec<Scalar>,
}

#[derive(Deserialize)]
struct ExponentialRepr {
    bases: Vec<Scalar>,
}

impl TryFrom<ExponentialRepr> for Exponential {
    type Error = Error;
    fn try_from(r: ExponentialRepr) -> Result<Self> {
        Exponential::new(r.bases)
    }
}

impl Exponential {
    pub fn new(bases: Vec<Scalar>) -> Result<Self> {
        if bases.iter().any(Zero::is_zero) {
            return Err(Error::Precondition("exponential bases must be nonzero".into()));
        }
        Ok(Exponential { bases })
    }

    /// The exponential identically one.
    pub fn identity(d: usize) -> Self {
        Exponential {
            bases: vec![Scalar::one(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[Scalar] {
        &self.bases
    }

    pub fn is_identity(&self) -> bool {
        self.bases.iter().all(One::is_one)
    }

    pub fn eval(&self, x: &GroupElement) -> Result<Scalar> {
        check_dim(self.dim(), x.dim())?;
        let mut acc = Scalar::one();
        for (c, &e) in self.bases.iter().zip(x.coords()) {
            if e != 0 {
                acc *= &c.pow(e)?;
            }
        }
        Ok(acc)
    }
}

impl GroupFunction for Exponential {
    fn value_at(&self, x: &GroupElement) -> Result<Scalar> {
        self.eval(x)
    }
}

/// `a(x) = Σ v_i x_i` with `v_i = a(e_i)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AdditiveFn {
    gen_values: Vec<Scalar>,
}

impl AdditiveFn {
    pub fn new(gen_values: Vec<Scalar>) -> Self {
        AdditiveFn { gen_values }
    }

    pub fn zero(d: usize) -> Self {
        AdditiveFn {
            gen_values: vec![Scalar::zero(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.gen_values.len()
    }

    pub fn gen_values(&self) -> &[Scalar] {
        &self.gen_values
    }

    pub fn eval(&self, x: &GroupElement) -> Result<Scalar> {
        check_dim(self.dim(), x.dim())?;
        let mut acc = Scalar::zero();
        for (v, &e) in self.gen_values.iter().zip(x.coords()) {
            if e != 0 {
                acc += &(v * &Scalar::from(e));
            }
        }
        Ok(acc)
    }
}

impl Add for &AdditiveFn {
    type Output = AdditiveFn;
    fn add(self, rhs: &AdditiveFn) -> AdditiveFn {
        AdditiveFn::new(
            self.gen_values
                .iter()
                .zip(&rhs.gen_values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl GroupFunction for AdditiveFn {
    fn value_at(&self, x: &GroupElement) -> Result<Scalar> {
        self.eval(x)
    }
}

/// `f(x) = P(a(x))·m(x)`: a polynomial in additive functions times an
/// exponential.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedFormFn {
    exponential: Exponential,
    coeff_poly: Polynomial,
    additive_family: BTreeMap<Var, AdditiveFn>,
}

impl ClosedFormFn {
    pub fn new(
        exponential: Exponential,
        coeff_poly: Polynomial,
        additive_family: BTreeMap<Var, AdditiveFn>,
    ) -> Result<Self> {
        for v in coeff_poly.vars() {
            match additive_family.get(&v) {
                None => return Err(Error::MissingVariable(v)),
                Some(a) => check_dim(exponential.dim(), a.dim())?,
            }
        }
        Ok(ClosedFormFn {
            exponential,
            coeff_poly,
            additive_family,
        })
    }

    pub fn exponential(&self) -> &Exponential {
        &self.exponential
    }

    pub fn coeff_poly(&self) -> &Polynomial {
        &self.coeff_poly
    }

    pub fn additive_family(&self) -> &BTreeMap<Var, AdditiveFn> {
        &self.additive_family
    }

    pub fn dim(&self) -> usize {
        self.exponential.dim()
    }

    /// `P(a(x))` without the exponential factor.
    pub fn eval_polynomial_part(&self, x: &GroupElement) -> Result<Scalar> {
        check_dim(self.dim(), x.dim())?;
        let mut assignment = BTreeMap::new();
        for v in self.coeff_poly.vars() {
            let a = self
                .additive_family
                .get(&v)
                .ok_or_else(|| Error::MissingVariable(v.clone()))?;
            assignment.insert(v, a.eval(x)?);
        }
        self.coeff_poly.eval(&assignment)
    }

    pub fn eval(&self, x: &GroupElement) -> Result<Scalar> {
        Ok(&self.eval_polynomial_part(x)? * &self.exponential.eval(x)?)
    }

    /// Same function with a different exponential factor.
    pub fn with_exponential(&self, m: Exponential) -> Result<Self> {
        ClosedFormFn::new(m, self.coeff_poly.clone(), self.additive_family.clone())
    }
}

impl GroupFunction for ClosedFormFn {
    fn value_at(&self, x: &GroupElement) -> Result<Scalar> {
        self.eval(x)
    }
}

/// Values on the full box `{x : |x|_∞ ≤ radius}` in `Z^d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TabulatedFn {
    d: usize,
    radius: i64,
    values: Vec<Scalar>,
}

impl TabulatedFn {
    pub fn from_fn(
        d: usize,
        radius: i64,
        mut f: impl FnMut(&GroupElement) -> Result<Scalar>,
    ) -> Result<Self> {
        if d == 0 || radius < 0 {
            return Err(Error::Precondition(format!(
                "invalid box: d={d}, radius={radius}"
            )));
        }
        let values = BoxGeometry::new(d, radius)
            .points()
            .map(|x| f(&x))
            .collect::<Result<Vec<_>>>()?;
        Ok(TabulatedFn { d, radius, values })
    }

    /// Tabulates any group function on the box.
    pub fn tabulate(d: usize, radius: i64, f: &impl GroupFunction) -> Result<Self> {
        Self::from_fn(d, radius, |x| f.value_at(x))
    }

    pub fn zeros(d: usize, radius: i64) -> Result<Self> {
        Self::from_fn(d, radius, |_| Ok(Scalar::zero()))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn geometry(&self) -> BoxGeometry {
        BoxGeometry::new(self.d, self.radius)
    }

    pub fn get(&self, x: &GroupElement) -> Option<&Scalar> {
        self.geometry().index_of(x).map(|k| &self.values[k])
    }

    pub fn set(&mut self, x: &GroupElement, v: Scalar) -> Result<()> {
        let k = self
            .geometry()
            .index_of(x)
            .ok_or_else(|| Error::OutOfDomain(x.clone()))?;
        self.values[k] = v;
        Ok(())
    }

    /// Values in the box's canonical point order.
    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (GroupElement, &Scalar)> {
        self.geometry().points().zip(self.values.iter())
    }

    /// Pointwise map into a new table on the same box.
    pub fn map(&self, mut f: impl FnMut(&GroupElement, &Scalar) -> Result<Scalar>) -> Result<Self> {
        let values = self
            .entries()
            .map(|(x, v)| f(&x, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(TabulatedFn {
            d: self.d,
            radius: self.radius,
            values,
        })
    }
}

impl GroupFunction for TabulatedFn {
    fn value_at(&self, x: &GroupElement) -> Result<Scalar> {
        check_dim(self.d, x.dim())?;
        self.get(x).cloned().ok_or_else(|| Error::OutOfDomain(x.clone()))
    }
}

#[derive(Serialize, Deserialize)]
struct TablePoint {
    x: GroupElement,
    v: Scalar,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    d: usize,
    radius: i64,
    values: Vec<TablePoint>,
}

impl Serialize for TabulatedFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableRepr {
            d: self.d,
            radius: self.radius,
            values: self
                .entries()
                .map(|(x, v)| TablePoint { x, v: v.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TabulatedFn {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = TableRepr::deserialize(de)?;
        if repr.d == 0 || repr.radius < 0 {
            return Err(D::Error::custom("table needs d >= 1 and radius >= 0"));
        }
        let geom = BoxGeometry::new(repr.d, repr.radius);
        let mut values: Vec<Option<Scalar>> = vec![None; geom.len()];
        for p in repr.values {
            let k = geom.index_of(&p.x).ok_or_else(|| {
                D::Error::custom(format!("point {} is outside the declared box", p.x))
            })?;
            if values[k].replace(p.v).is_some() {
                return Err(D::Error::custom(format!("point {} listed twice", p.x)));
            }
        }
        let values = values
            .into_iter()
            .zip(geom.points())
            .map(|(v, x)| v.ok_or_else(|| D::Error::custom(format!("no value at point {x}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(TabulatedFn {
            d: repr.d,
            radius: repr.radius,
            values,
        })
    }
}

/// Index arithmetic for the box `[-R, R]^d`, points in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxGeometry {
    d: usize,
    radius: i64,
}

impl BoxGeometry {
    pub fn new(d: usize, radius: i64) -> Self {
        BoxGeometry { d, radius }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.dim() == self.d && x.inf_norm() <= self.radius
    }

    pub fn index_of(&self, x: &GroupElement) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let side = self.side();
        Some(
            x.coords()
                .iter()
                .fold(0usize, |acc, &c| acc * side + (c + self.radius) as usize),
        )
    }

    pub fn point_at(&self, mut k: usize) -> GroupElement {
        let side = self.side();
        let mut coords = vec![0i64; self.d];
        for c in coords.iter_mut().rev() {
            *c = (k % side) as i64 - self.radius;
            k /= side;
        }
        GroupElement(coords)
    }

    pub fn points(self) -> impl Iterator<Item = GroupElement> {
        (0..self.len()).map(move |k| self.point_at(k))
    }

    /// Number of ordered pairs `(x, y)` in the box with `x + y` in the box.
    pub fn pair_count(&self) -> u128 {
        let r = self.radius as u128;
        (3 * r * r + 3 * r + 1).pow(self.d as u32)
    }

    /// All in-box pairs whose sum stays in the box, lexicographic in `(x, y)`.
    pub fn pairs(&self) -> Vec<(GroupElement, GroupElement)> {
        let mut out = Vec::new();
        for x in self.points() {
            for y in self.points() {
                if self.contains(&(&x + &y)) {
                    out.push((x.clone(), y));
                }
            }
        }
        out
    }
}

/// Outcome of [`classify_table`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Classification {
    Exponential(Exponential),
    Additive(AdditiveFn),
    Neither,
}

/// Decides whether a table is (the restriction of) an exponential or an
/// additive function, testing the functional equation on every in-box pair
/// and reading generator data off the unit vectors.
pub fn classify_table(t: &TabulatedFn) -> Result<Classification> {
    if t.radius() < 1 {
        return Err(Error::Precondition(
            "classification needs a box of radius at least 1".into(),
        ));
    }
    let geom = t.geometry();
    let pairs = geom.pairs();
    let at = |x: &GroupElement| t.get(x).expect("in-box point");

    let multiplicative = !t.is_identically_zero()
        && pairs
            .iter()
            .all(|(x, y)| at(&(x + y)) == &(at(x) * at(y)));
    if multiplicative {
        let bases = (0..t.dim())
            .map(|k| at(&GroupElement::unit(t.dim(), k)).clone())
            .collect();
        if let Ok(m) = Exponential::new(bases) {
            if t.entries().all(|(x, v)| m.eval(&x).as_ref() == Ok(v)) {
                return Ok(Classification::Exponential(m));
            }
        }
    }

    let additive = pairs
        .iter()
        .all(|(x, y)| at(&(x + y)) == &(at(x) + at(y)));
    if additive {
        let a = AdditiveFn::new(
            (0..t.dim())
                .map(|k| at(&GroupElement::unit(t.dim(), k)).clone())
                .collect(),
        );
        if t.entries().all(|(x, v)| a.eval(&x).as_ref() == Ok(v)) {
            return Ok(Classification::Additive(a));
        }
    }
    Ok(Classification::Neither)
}

/// Finds an in-box pair violating additivity, if any.
pub fn additivity_witness(t: &TabulatedFn) -> Option<(GroupElement, GroupElement)> {
    let at = |x: &GroupElement| t.get(x).expect("in-box point");
    t.geometry()
        .pairs()
        .into_iter()
        .find(|(x, y)| at(&(x + y)) != &(at(x) + at(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(v: &[i64]) -> GroupElement {
        GroupElement::new(v.to_vec())
    }

    fn s(n: i64) -> Scalar {
        Scalar::from(n)
    }

    #[test]
    fn exponential_examples() {
        let m = Exponential::new(vec![s(2)]).unwrap();
        assert_eq!(m.eval(&g(&[3])).unwrap(), s(8));
        assert_eq!(m.eval(&g(&[0])).unwrap(), s(1));
        assert_eq!(m.eval(&g(&[-2])).unwrap(), Scalar::ratio(1, 4));
        assert!(matches!(
            m.eval(&g(&[1, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Exponential::new(vec![s(0)]).is_err());
    }

    #[test]
    fn additive_examples() {
        assert_eq!(AdditiveFn::new(vec![s(3)]).eval(&g(&[5])).unwrap(), s(15));
        assert_eq!(AdditiveFn::new(vec![s(3)]).eval(&g(&[0])).unwrap(), s(0));
        assert_eq!(
            AdditiveFn::new(vec![s(1), s(-1)]).eval(&g(&[2, 2])).unwrap(),
            s(0)
        );
    }

    #[test]
    fn closed_form_examples() {
        let m = Exponential::new(vec![s(2)]).unwrap();
        let x1 = Var::x(1);
        let x2 = Var::x(2);
        let fam: BTreeMap<_, _> = [
            (x1.clone(), AdditiveFn::new(vec![s(1)])),
            (x2.clone(), AdditiveFn::new(vec![s(5)])),
        ]
        .into_iter()
        .collect();
        let f = ClosedFormFn::new(m.clone(), Polynomial::var(x1.clone()), fam.clone()).unwrap();
        assert_eq!(f.eval(&g(&[3])).unwrap(), s(24));
        let one = ClosedFormFn::new(m.clone(), Polynomial::one(), BTreeMap::new()).unwrap();
        assert_eq!(one.eval(&g(&[-3])).unwrap(), m.eval(&g(&[-3])).unwrap());
        let b2 = Polynomial::var(x1.clone()).pow(2) + Polynomial::var(x2);
        let f2 = ClosedFormFn::new(m, b2, fam).unwrap();
        assert_eq!(f2.eval(&g(&[3])).unwrap(), s(192));
        assert!(ClosedFormFn::new(
            Exponential::identity(1),
            Polynomial::var(Var::x(7)),
            BTreeMap::new()
        )
        .is_err());
    }

    #[test]
    fn classify_examples() {
        let exp = TabulatedFn::from_fn(1, 3, |x| s(2).pow(x.coords()[0])).unwrap();
        assert_eq!(
            classify_table(&exp).unwrap(),
            Classification::Exponential(Exponential::new(vec![s(2)]).unwrap())
        );
        let add = TabulatedFn::from_fn(1, 3, |x| Ok(s(3 * x.coords()[0]))).unwrap();
        assert_eq!(
            classify_table(&add).unwrap(),
            Classification::Additive(AdditiveFn::new(vec![s(3)]))
        );
        let sq = TabulatedFn::from_fn(1, 3, |x| Ok(s(x.coords()[0].pow(2)))).unwrap();
        assert_eq!(classify_table(&sq).unwrap(), Classification::Neither);
        let tiny = TabulatedFn::zeros(1, 0).unwrap();
        assert!(classify_table(&tiny).is_err());
    }

    #[test]
    fn box_geometry() {
        let b = BoxGeometry::new(2, 2);
        assert_eq!(b.len(), 25);
        for (k, x) in b.points().enumerate() {
            assert_eq!(b.index_of(&x), Some(k));
        }
        assert_eq!(b.pairs().len() as u128, b.pair_count());
        assert_eq!(b.index_of(&g(&[3, 0])), None);
    }

    #[test]
    fn table_json_round_trip_and_holes() {
        let t = TabulatedFn::from_fn(2, 1, |x| Ok(s(x.coords()[0] - 2 * x.coords()[1]))).unwrap();
        let j = serde_json::to_string(&t).unwrap();
        let back: TabulatedFn = serde_json::from_str(&j).unwrap();
        assert_eq!(back, t);
        let hole = r#"{"d":1,"radius":1,"values":[{"x":[0],"v":{"re":"1","im":"0"}}]}"#;
        assert!(serde_json::from_str::<TabulatedFn>(hole).is_err());
        let m: Result<Exponential, _> = serde_json::from_str(r#"{"bases":[{"re":"0","im":"0"}]}"#);
        assert!(m.is_err());
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-4i64..5, 1i64..4, -3i64..4, 1i64..3)
            .prop_map(|(a, b, c, d)| Scalar::gaussian((a, b), (c, d)))
    }

    fn arb_nonzero() -> impl Strategy<Value = Scalar> {
        arb_scalar().prop_filter("nonzero", |s| !s.is_zero())
    }

    fn arb_point(d: usize) -> impl Strategy<Value = GroupElement> {
        prop::collection::vec(-6i64..7, d).prop_map(GroupElement::new)
    }

    proptest! {
        #[test]
        fn exponential_is_multiplicative(
            bases in prop::collection::vec(arb_nonzero(), 2),
            x in arb_point(2),
            y in arb_point(2),
        ) {
            let m = Exponential::new(bases).unwrap();
            prop_assert_eq!(m.eval(&(&x + &y)).unwrap(), m.eval(&x).unwrap() * m.eval(&y).unwrap());
        }

        #[test]
        fn additive_is_additive(
            v in prop::collection::vec(arb_scalar(), 2),
            x in arb_point(2),
            y in arb_point(2),
        ) {
            let a = AdditiveFn::new(v);
            prop_assert_eq!(a.eval(&(&x + &y)).unwrap(), a.eval(&x).unwrap() + a.eval(&y).unwrap());
        }

        #[test]
        fn classification_recovers_generators(
            bases in prop::collection::vec(arb_nonzero(), 2),
            v in prop::collection::vec(arb_scalar(), 2),
        ) {
            let m = Exponential::new(bases).unwrap();
            let t = TabulatedFn::tabulate(2, 2, &m).unwrap();
            prop_assert_eq!(classify_table(&t).unwrap(), Classification::Exponential(m));
            let a = AdditiveFn::new(v);
            let t = TabulatedFn::tabulate(2, 2, &a).unwrap();
            prop_assert_eq!(classify_table(&t).unwrap(), Classification::Additive(a));
        }
    }
}
