//! Complete and multivariate Bell polynomials.
//!
//! Four constructions are provided and cross-checked against each other:
//!
//! - [`complete_bell`]: the rank-1 recurrence
//!   `B_{n+1} = Σ_i C(n,i) B_{n-i} x_{i+1}`.
//! - [`bell_via_gf`]: coefficient extraction from
//!   `Σ_α B_α t^α/α! = exp(Σ_{|μ|≥1} x_μ t^μ/μ!)`. This is the canonical
//!   definition.
//! - [`mv_bell`]: the partition sum
//!   `B_α = α! Σ Π_μ x_μ^{c_μ} / (c_μ! (μ!)^{c_μ})` over all
//!   decompositions `α = Σ_{0<μ≤α} c_μ μ`.
//! - [`aczel_form`]: the rank-1 sum over `j_1 + 2j_2 + … + n j_n = n`.
//!
//! Rank-1 results from `complete_bell`, `bell_via_gf` and `aczel_form` use the
//! variables `x_1, x_2, …`; `mv_bell` always uses multi-index variables
//! `x_μ`, including at rank 1 (see [`rank1_to_indexed`]).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use malachite_base::num::arithmetic::traits::Pow;
use malachite_base::num::basic::traits::One as _;
use malachite_nz::integer::Integer;
use malachite_nz::natural::Natural;
use malachite_q::Rational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::multiindex::{binomial, factorial, MultiIndex};
use crate::poly::{Monomial, Polynomial, Var, VarTag};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// A Bell polynomial together with its index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BellPoly {
    pub index: MultiIndex,
    pub value: Polynomial,
}

impl BellPoly {
    /// The variables `B_α` is declared over: `x_1..x_n` at rank 1 with
    /// indexed variables, otherwise `x_μ` for `0 < μ ≤ α`.
    pub fn declared_vars(&self) -> Vec<Var> {
        let indexed = self
            .value
            .vars()
            .iter()
            .any(|v| matches!(v.tag, VarTag::Idx(_)));
        if indexed || (self.index.rank() == 1 && self.value.vars().is_empty()) {
            (1..=self.index.height()).map(Var::x).collect()
        } else {
            self.index
                .enumerate_below()
                .into_iter()
                .skip(1)
                .map(Var::xm)
                .collect()
        }
    }

    fn subscript(&self, latex: bool) -> String {
        let sep = if latex { ", " } else { "," };
        let parts: Vec<String> = self.index.entries().iter().map(|e| e.to_string()).collect();
        parts.join(sep)
    }

    /// One row of a LaTeX Bell table, e.g.
    /// `B_{3}(x_{1},x_{2},x_{3})=x_{1}^{3}+3x_{1}x_{2}+x_{3}`.
    pub fn to_latex_row(&self) -> String {
        let vars = self.declared_vars();
        let args = match (vars.is_empty(), self.index.rank()) {
            (true, 1) => String::new(),
            (true, _) => "(x)".to_string(),
            (false, r) => {
                let sep = if r == 1 { "," } else { ", " };
                let names: Vec<String> = vars.iter().map(Var::to_latex).collect();
                format!("({})", names.join(sep))
            }
        };
        format!(
            "B_{{{}}}{}={}",
            self.subscript(true),
            args,
            self.value.to_latex()
        )
    }
}

impl fmt::Display for BellPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B_{{{}}} = {}", self.subscript(false), self.value)
    }
}

fn rational_scalar(num: Natural, den: Natural) -> Scalar {
    Scalar::real(Rational::from_naturals(num, den))
}

fn int_scalar(n: Natural) -> Scalar {
    Scalar::from_natural(n)
}

fn complete_cache() -> &'static Mutex<Vec<Polynomial>> {
    static CACHE: OnceLock<Mutex<Vec<Polynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Polynomial::one()]))
}

fn mv_cache() -> &'static Mutex<HashMap<MultiIndex, Polynomial>> {
    static CACHE: OnceLock<Mutex<HashMap<MultiIndex, Polynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `B_n(x_1..x_n)` by the recurrence. Lower-order values are memoized.
pub fn complete_bell(n: u32) -> BellPoly {
    let mut table = complete_cache().lock().unwrap_or_else(|e| e.into_inner());
    while table.len() <= n as usize {
        let m = table.len() as u32 - 1;
        // B_{m+1} = Σ_{i=0}^{m} C(m,i) B_{m-i} x_{i+1}
        let mut next = Polynomial::zero();
        for i in 0..=m {
            let term = &table[(m - i) as usize] * &Polynomial::var(Var::x(i + 1));
            next = &next + &term.scale(&int_scalar(binomial(m, i)));
        }
        table.push(next);
    }
    BellPoly {
        index: MultiIndex::new(vec![n]),
        value: table[n as usize].clone(),
    }
}

/// `B_α` by generating-function extraction.
pub fn bell_via_gf(alpha: &MultiIndex) -> Result<BellPoly> {
    let rank = alpha.rank();
    let bound = alpha.height();
    let var_for = |mu: &MultiIndex| {
        if rank == 1 {
            Var::x(mu.entries()[0])
        } else {
            Var::xm(mu.clone())
        }
    };
    let mut s = TruncatedSeries::zero(rank, bound);
    for mu in crate::multiindex::indices_up_to(rank, bound).into_iter().skip(1) {
        let c = rational_scalar(Natural::ONE, mu.factorial());
        s.add_term(mu.clone(), &Polynomial::var(var_for(&mu)).scale(&c))?;
    }
    let coeff = s.exp()?.coeff(alpha)?;
    let value = coeff.scale(&int_scalar(alpha.factorial()));
    if !value.has_integer_coeffs() {
        return Err(Error::Internal(format!(
            "B_{alpha} from the generating function has a non-integer coefficient"
        )));
    }
    Ok(BellPoly {
        index: alpha.clone(),
        value,
    })
}

/// `B_α` by the partition sum over decompositions `α = Σ c_μ μ`,
/// `0 < μ ≤ α`. Memoized per index.
pub fn mv_bell(alpha: &MultiIndex) -> BellPoly {
    if let Some(p) = mv_cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .get(alpha)
    {
        return BellPoly {
            index: alpha.clone(),
            value: p.clone(),
        };
    }
    let value = partition_sum(alpha);
    mv_cache()
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(alpha.clone(), value.clone());
    BellPoly {
        index: alpha.clone(),
        value,
    }
}

fn partition_sum(alpha: &MultiIndex) -> Polynomial {
    let parts: Vec<MultiIndex> = alpha.enumerate_below().into_iter().skip(1).collect();
    let alpha_fact = alpha.factorial();
    let mut out = Polynomial::zero();
    let mut mult = vec![0u32; parts.len()];

    fn rec(
        k: usize,
        residual: &mut Vec<u32>,
        parts: &[MultiIndex],
        mult: &mut Vec<u32>,
        alpha_fact: &Natural,
        out: &mut Polynomial,
    ) {
        if residual.iter().all(|&r| r == 0) {
            let mut den = Natural::ONE;
            let mut powers = Vec::new();
            for (mu, &c) in parts.iter().zip(mult.iter()) {
                if c > 0 {
                    den *= factorial(c) * mu.factorial().pow(u64::from(c));
                    powers.push((Var::xm(mu.clone()), c));
                }
            }
            out.add_term(
                Monomial::from_powers(powers),
                &rational_scalar(alpha_fact.clone(), den),
            );
            return;
        }
        if k == parts.len() {
            return;
        }
        let mu = parts[k].entries();
        let max = mu
            .iter()
            .zip(residual.iter())
            .filter(|(&m, _)| m > 0)
            .map(|(&m, &r)| r / m)
            .min()
            .unwrap_or(0);
        for c in (0..=max).rev() {
            for (r, &m) in residual.iter_mut().zip(mu) {
                *r -= c * m;
            }
            mult[k] = c;
            rec(k + 1, residual, parts, mult, alpha_fact, out);
            for (r, &m) in residual.iter_mut().zip(mu) {
                *r += c * m;
            }
        }
        mult[k] = 0;
    }

    let mut residual = alpha.entries().to_vec();
    rec(0, &mut residual, &parts, &mut mult, &alpha_fact, &mut out);
    out
}

/// `n! Σ_{j_1+2j_2+…+n j_n = n} Π_k (1/j_k!) (x_k/k!)^{j_k}`.
pub fn aczel_form(n: u32) -> Result<BellPoly> {
    if n == 0 {
        return Err(Error::Precondition("aczel_form needs n >= 1".into()));
    }
    let n_fact = factorial(n);
    let mut out = Polynomial::zero();
    let mut js = vec![0u32; n as usize + 1];

    fn rec(k: u32, rem: u32, js: &mut Vec<u32>, n_fact: &Natural, out: &mut Polynomial) {
        if k == 0 {
            if rem == 0 {
                let mut den = Natural::ONE;
                let mut powers = Vec::new();
                for (kk, &j) in js.iter().enumerate().skip(1) {
                    if j > 0 {
                        den *= factorial(j) * factorial(kk as u32).pow(u64::from(j));
                        powers.push((Var::x(kk as u32), j));
                    }
                }
                out.add_term(
                    Monomial::from_powers(powers),
                    &rational_scalar(n_fact.clone(), den),
                );
            }
            return;
        }
        for j in 0..=rem / k {
            js[k as usize] = j;
            rec(k - 1, rem - j * k, js, n_fact, out);
        }
        js[k as usize] = 0;
    }

    rec(n, n, &mut js, &n_fact, &mut out);
    Ok(BellPoly {
        index: MultiIndex::new(vec![n]),
        value: out,
    })
}

/// The canonical Bell polynomial used by the addition check: the recurrence
/// value at rank 1, the partition sum otherwise.
fn bell_for_rank(alpha: &MultiIndex) -> Polynomial {
    if alpha.rank() == 1 {
        complete_bell(alpha.entries()[0]).value
    } else {
        mv_bell(alpha).value
    }
}

/// Checks `B_α(t+u) = Σ_{β≤α} C(α,β) B_β(t) B_{α−β}(u)` symbolically.
pub fn addition_check(alpha: &MultiIndex) -> Result<bool> {
    let b_alpha = bell_for_rank(alpha);
    let subs: BTreeMap<Var, Polynomial> = b_alpha
        .vars()
        .into_iter()
        .map(|v| {
            let sum = &Polynomial::var(v.with_sym('t')) + &Polynomial::var(v.with_sym('u'));
            (v, sum)
        })
        .collect();
    let lhs = b_alpha.substitute(&subs)?;

    let mut rhs = Polynomial::zero();
    for beta in alpha.enumerate_below() {
        let rest = alpha.checked_sub(&beta)?;
        let bt = bell_for_rank(&beta).rename(|v| v.with_sym('t'));
        let bu = bell_for_rank(&rest).rename(|v| v.with_sym('u'));
        let c = int_scalar(alpha.binom(&beta)?);
        rhs = &rhs + &(&bt * &bu).scale(&c);
    }
    Ok(lhs == rhs)
}

/// Renames rank-1 multi-index variables `x_{(j)}` to `x_j`.
pub fn rank1_to_indexed(p: &Polynomial) -> Polynomial {
    p.rename(|v| match &v.tag {
        VarTag::Multi(mu) if mu.rank() == 1 => Var::indexed(v.sym, mu.entries()[0]),
        _ => v.clone(),
    })
}

/// Splits `B_α = x_α + P_α` and returns `P_α`, the part free of the top
/// variable. Errors if `B_α` is not of that shape.
pub fn without_top_variable(alpha: &MultiIndex) -> Result<Polynomial> {
    if alpha.is_zero() {
        return Err(Error::Precondition("the zero index has no top variable".into()));
    }
    let b = mv_bell(alpha).value;
    let top = Var::xm(alpha.clone());
    let rest = b.drop_vars(&BTreeSet::from([top.clone()]));
    if &b - &rest != Polynomial::var(top) {
        return Err(Error::Internal(format!("B_{alpha} is not linear in x_{alpha}")));
    }
    Ok(rest)
}

/// The `n`-th Bell number, `B_n(1, …, 1)`.
pub fn bell_number(n: u32) -> Integer {
    let b = complete_bell(n).value;
    let ones: BTreeMap<Var, Scalar> = b.vars().into_iter().map(|v| (v, Scalar::one())).collect();
    b.eval(&ones)
        .ok()
        .and_then(|s| s.to_integer())
        .expect("Bell polynomials have integer coefficients")
}
