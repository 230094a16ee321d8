//! The Weyl algebra at a point.
//!
//! An element is a truncated sum `Σ ħ^k c · X^{i₁}…X^{i_l}` with Gaussian
//! rational coefficients `c`, one per fiber monomial. Terms of degree
//! `2k + l` above the element's order are dropped.
//!
//! The fiber product uses the standard Darboux Poisson tensor: `ω^{a,n+a} = 1`
//! and `ω^{n+a,a} = −1` for `a = 1 … n`, all other entries zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::coeff::{GaussianRational, Rational};
use crate::error::{Error, Result};
use crate::grading::{self, check_dimension, Part, SymIndex};
use crate::par::{fold_merge, Exec};

/// `ω^{ij}` of the standard Darboux form, 1-based indices.
pub fn poisson_tensor(two_n: usize, i: usize, j: usize) -> i64 {
    let n = two_n / 2;
    if j == i + n && i <= n {
        1
    } else if i == j + n && j <= n {
        -1
    } else {
        0
    }
}

/// `ω_{ij}` of the standard Darboux form, the inverse of [`poisson_tensor`]:
/// `ω_{n+a,a} = 1`, `ω_{a,n+a} = −1`.
pub fn symplectic_form(two_n: usize, i: usize, j: usize) -> i64 {
    -poisson_tensor(two_n, i, j)
}

/// Key of a fiber term; the derived order is the flattened series order
/// (degree, then ħ-power, then lexicographic index).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiberKey {
    degree: u32,
    pub k: u32,
    pub index: SymIndex,
}

impl FiberKey {
    pub fn new(k: u32, index: SymIndex) -> Self {
        Self { degree: 2 * k + index.len() as u32, k, index }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

fn falling(n: u16, m: u16) -> BigInt {
    (0..m).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j))
}

fn factorial(m: u16) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// One term `coeff · ħ^t · X^index` of the product of two fiber monomials.
#[derive(Clone, Debug)]
pub(crate) struct Contraction {
    pub t: u32,
    pub index: SymIndex,
    pub coeff: GaussianRational,
}

/// All terms of `X^a ∘ X^b`, i.e.
/// `Σ_t (1/t!) (iħ/2)^t ω^{i₁j₁}…ω^{i_tj_t} ∂ᵗX^a/∂X^{i…} ∂ᵗX^b/∂X^{j…}`.
///
/// `t` only runs over what both monomials can absorb, so no truncation enters.
pub(crate) fn contract(two_n: usize, a: &SymIndex, b: &SymIndex) -> Vec<Contraction> {
    let n = two_n / 2;
    let ea = a.exponents(two_n);
    let eb = b.exponents(two_n);
    // partial states: (t, left derivative counts, right derivative counts, numerator, denominator)
    let mut states: Vec<(u32, Vec<u16>, Vec<u16>, BigInt, BigInt)> =
        vec![(0, vec![0; two_n], vec![0; two_n], BigInt::one(), BigInt::one())];
    for p in 0..n {
        let q = p + n;
        // c_plus pairs (left p, right q, ω = +1); c_minus pairs (left q, right p, ω = −1)
        let max_plus = ea[p].min(eb[q]);
        let max_minus = ea[q].min(eb[p]);
        let mut next = Vec::with_capacity(states.len() * (max_plus as usize + 1) * (max_minus as usize + 1));
        for (t, dl, dr, num, den) in &states {
            for cp in 0..=max_plus {
                for cm in 0..=max_minus {
                    let mut dl = dl.clone();
                    let mut dr = dr.clone();
                    dl[p] += cp;
                    dl[q] += cm;
                    dr[q] += cp;
                    dr[p] += cm;
                    let mut num = num
                        * falling(ea[p], cp)
                        * falling(ea[q], cm)
                        * falling(eb[q], cp)
                        * falling(eb[p], cm);
                    if cm % 2 == 1 {
                        num = -num;
                    }
                    let den = den * factorial(cp) * factorial(cm);
                    next.push((t + cp as u32 + cm as u32, dl, dr, num, den));
                }
            }
        }
        states = next;
    }
    states
        .into_iter()
        .map(|(t, dl, dr, num, den)| {
            let exps: Vec<u16> = (0..two_n).map(|j| ea[j] - dl[j] + eb[j] - dr[j]).collect();
            let w = Rational::new(num, den * (BigInt::one() << t));
            Contraction { t, index: SymIndex::from_exponents(&exps), coeff: GaussianRational::i_pow(t).scale(&w) }
        })
        .collect()
}

/// Memoizes [`contract`] over one product.
#[derive(Default)]
pub(crate) struct ContractionCache {
    map: HashMap<(SymIndex, SymIndex), std::sync::Arc<Vec<Contraction>>>,
}

impl ContractionCache {
    pub fn get(&mut self, two_n: usize, a: &SymIndex, b: &SymIndex) -> std::sync::Arc<Vec<Contraction>> {
        self.map
            .entry((a.clone(), b.clone()))
            .or_insert_with(|| std::sync::Arc::new(contract(two_n, a, b)))
            .clone()
    }
}

/// A single stored term `coeff · ħ^k · X^{xidx}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylTerm {
    pub k: u32,
    pub xidx: SymIndex,
    pub coeff: GaussianRational,
}

impl WeylTerm {
    /// `2k + l`.
    pub fn degree(&self) -> u32 {
        degree(self.k, &self.xidx)
    }
}

/// `2k + l` for ħ-power `k` and fiber index of length `l`.
pub fn degree(k: u32, xidx: &SymIndex) -> u32 {
    2 * k + xidx.len() as u32
}

/// Truncated element of the Weyl algebra at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    two_n: usize,
    order: u32,
    terms: BTreeMap<FiberKey, GaussianRational>,
}

impl WeylElement {
    pub fn zero(two_n: usize, order: u32) -> Result<Self> {
        check_dimension(two_n)?;
        Ok(Self { two_n, order, terms: BTreeMap::new() })
    }

    pub fn scalar(two_n: usize, order: u32, c: GaussianRational) -> Result<Self> {
        Self::from_terms(two_n, order, [(0, SymIndex::scalar(), c)])
    }

    pub fn one(two_n: usize, order: u32) -> Result<Self> {
        Self::scalar(two_n, order, GaussianRational::one())
    }

    /// The linear function `X^i` (1-based `i`).
    pub fn x(two_n: usize, order: u32, i: usize) -> Result<Self> {
        Self::from_terms(two_n, order, [(0, SymIndex::new(two_n, &[i])?, GaussianRational::one())])
    }

    /// Sums the given terms; those above `order` are dropped.
    pub fn from_terms(
        two_n: usize,
        order: u32,
        terms: impl IntoIterator<Item = (u32, SymIndex, GaussianRational)>,
    ) -> Result<Self> {
        let mut e = Self::zero(two_n, order)?;
        for (k, idx, c) in terms {
            if idx.max_entry() > two_n {
                return Err(Error::InvalidSymIndex {
                    two_n,
                    entries: idx.entries().iter().map(|&x| x as usize).collect(),
                    reason: "entry out of range",
                });
            }
            e.add_term(k, idx, c);
        }
        Ok(e)
    }

    pub fn two_n(&self) -> usize {
        self.two_n
    }

    pub fn order(&self) -> u32 {
        self.order
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

    /// Terms in series order.
    pub fn terms(&self) -> impl Iterator<Item = WeylTerm> + '_ {
        self.terms.iter().map(|(key, c)| WeylTerm { k: key.k, xidx: key.index.clone(), coeff: c.clone() })
    }

    pub fn coeff(&self, k: u32, xidx: &SymIndex) -> GaussianRational {
        self.terms.get(&FiberKey::new(k, xidx.clone())).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn add_term(&mut self, k: u32, xidx: SymIndex, c: GaussianRational) {
        let key = FiberKey::new(k, xidx);
        if key.degree > self.order || c.is_zero() {
            return;
        }
        accumulate(&mut self.terms, key, c);
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.two_n != other.two_n || self.order != other.order {
            return Err(Error::Mismatch {
                left_dim: self.two_n,
                right_dim: other.two_n,
                left_order: self.order,
                right_order: other.order,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (key, c) in &other.terms {
            accumulate(&mut out.terms, key.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-GaussianRational::one()))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self { two_n: self.two_n, order: self.order, terms: BTreeMap::new() };
        if c.is_zero() {
            return out;
        }
        for (key, a) in &self.terms {
            out.terms.insert(key.clone(), a * c);
        }
        out
    }

    /// Same element with terms above `order` removed and the order lowered.
    pub fn truncate(&self, order: u32) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.degree <= order).map(|(k, c)| (k.clone(), c.clone())).collect();
        Self { two_n: self.two_n, order, terms }
    }

    /// Terms of exactly the given degree.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.degree == d).map(|(k, c)| (k.clone(), c.clone())).collect();
        Self { two_n: self.two_n, order: self.order, terms }
    }

    /// The ∘-product, with the default execution strategy.
    pub fn circ(&self, other: &Self) -> Result<Self> {
        self.circ_with(other, Exec::default())
    }

    pub fn circ_with(&self, other: &Self, exec: Exec) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.product(other, exec, true))
    }

    /// Commutative product of fiber polynomials (only the `t = 0` term of ∘).
    pub fn symmetric_product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.product(other, Exec::Sequential, false))
    }

    fn product(&self, other: &Self, exec: Exec, contract_terms: bool) -> Self {
        let two_n = self.two_n;
        let order = self.order;
        let left: Vec<(&FiberKey, &GaussianRational)> = self.terms.iter().collect();
        let right: Vec<(&FiberKey, &GaussianRational)> = other.terms.iter().collect();
        let terms = fold_merge(
            &left,
            left.len() * right.len(),
            exec,
            BTreeMap::new,
            |acc, (ka, ca)| {
                for (kb, cb) in &right {
                    if ka.degree + kb.degree > order {
                        continue;
                    }
                    let c = *ca * *cb;
                    if contract_terms {
                        for term in contract(two_n, &ka.index, &kb.index) {
                            let key = FiberKey::new(ka.k + kb.k + term.t, term.index);
                            accumulate(acc, key, &c * &term.coeff);
                        }
                    } else {
                        accumulate(acc, FiberKey::new(ka.k + kb.k, ka.index.merge(&kb.index)), c);
                    }
                }
            },
            merge_maps,
        );
        Self { two_n, order, terms }
    }

    /// `u∘v − v∘u`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.circ(other)?.sub(&other.circ(self)?)
    }

    /// Bounded metric over the stored terms, in `[0, 1)`.
    ///
    /// `Σ_k 2^{−(k+1)} ρ_k/(1+ρ_k)` with
    /// `ρ_k = Σ_l 2^{−(l+2)} (ρ_l^Re/(1+ρ_l^Re) + ρ_l^Im/(1+ρ_l^Im))` and
    /// `ρ_l^Re` the sum of `|Re|` of the component differences of rank `l` at `ħ^k`.
    pub fn distance(&self, other: &Self) -> Result<Rational> {
        if self.two_n != other.two_n {
            return Err(Error::Mismatch {
                left_dim: self.two_n,
                right_dim: other.two_n,
                left_order: self.order,
                right_order: other.order,
            });
        }
        let mut diff = self.terms.clone();
        for (key, c) in &other.terms {
            accumulate(&mut diff, key.clone(), -c);
        }
        let mut sums: BTreeMap<(u32, usize), (Rational, Rational)> = BTreeMap::new();
        for (key, c) in &diff {
            let e = sums.entry((key.k, key.index.len())).or_insert_with(|| (Rational::zero(), Rational::zero()));
            e.0 += c.re.abs();
            e.1 += c.im.abs();
        }
        let one = Rational::one();
        let bounded = |r: &Rational| r / (&one + r);
        let mut rho_k: BTreeMap<u32, Rational> = BTreeMap::new();
        for ((k, l), (re, im)) in &sums {
            let w = Rational::new(BigInt::one(), BigInt::one() << (l + 2));
            *rho_k.entry(*k).or_insert_with(Rational::zero) += w * (bounded(re) + bounded(im));
        }
        Ok(rho_k
            .iter()
            .map(|(k, r)| Rational::new(BigInt::one(), BigInt::one() << (k + 1)) * bounded(r))
            .sum())
    }

    /// `|φ(v)_p|`: absolute value of the real coordinate at series position `p`.
    /// Positions beyond the stored terms give zero.
    pub fn seminorm(&self, p: &BigUint) -> Result<Rational> {
        let addr = grading::fiber_unposition(self.two_n, p)?;
        let c = self.coeff(addr.k, &addr.index);
        Ok(match addr.part {
            Part::Real => c.re.abs(),
            Part::Imag => c.im.abs(),
        })
    }
}

pub(crate) fn accumulate<K: Ord>(map: &mut BTreeMap<K, GaussianRational>, key: K, c: GaussianRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub(crate) fn merge_maps<K: Ord>(
    mut a: BTreeMap<K, GaussianRational>,
    b: BTreeMap<K, GaussianRational>,
) -> BTreeMap<K, GaussianRational> {
    for (k, c) in b {
        accumulate(&mut a, k, c);
    }
    a
}

/// `X1*X2` style rendering of a fiber monomial; empty for the scalar index.
pub(crate) fn fiber_monomial_text(xidx: &SymIndex) -> String {
    xidx.entries().iter().map(|e| format!("X{e}")).collect::<Vec<_>>().join("*")
}

impl fmt::Display for WeylElement {
    /// `hbar^k * X1*X2 * (a+bi)` terms joined by ` + `, in series order; `0` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono = fiber_monomial_text(&key.index);
            write!(f, "hbar^{} * {} * ({})", key.k, if mono.is_empty() { "1".into() } else { mono }, c)?;
        }
        Ok(())
    }
}
