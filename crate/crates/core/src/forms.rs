//! Weyl-algebra-valued differential forms on a single Darboux chart.
//!
//! A section is a finite sum of terms `P(q) · ħ^k · X^{i₁}…X^{i_l} · dq^{j₁}∧…∧dq^{j_p}`
//! with polynomial coefficients `P`. Fiber parts multiply by ∘ pointwise in `q`,
//! form parts by the wedge product.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::grading::{check_dimension, SymIndex};
use crate::par::{fold_merge, Exec};
use crate::poly::Poly;
use crate::weyl::{fiber_monomial_text, ContractionCache, FiberKey, WeylElement};

/// Strictly increasing list of 1-based coordinate indices, `dq^{j₁}∧…∧dq^{j_p}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FormIndex(Vec<u16>);

impl FormIndex {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(two_n: usize, entries: &[usize]) -> Result<Self> {
        if entries.iter().any(|&e| e == 0 || e > two_n) || entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFormIndex { two_n, entries: entries.to_vec() });
        }
        Ok(Self(entries.iter().map(|&e| e as u16).collect()))
    }

    /// Sorts `entries` into increasing order. Returns the permutation sign, or
    /// `None` when an index repeats (the form vanishes).
    pub fn normalize(entries: &[usize]) -> Option<(i8, FormIndex)> {
        let mut v: Vec<u16> = entries.iter().map(|&e| e as u16).collect();
        let mut sign = 1i8;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, FormIndex(v)))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u16] {
        &self.0
    }

    pub fn contains(&self, j: u16) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// `self ∧ other`, as a sign and a normalized index, or `None` if it vanishes.
    pub fn wedge(&self, other: &FormIndex) -> Option<(i8, FormIndex)> {
        let mut inversions = 0usize;
        for &a in &self.0 {
            for &b in &other.0 {
                match a.cmp(&b) {
                    Ordering::Equal => return None,
                    Ordering::Greater => inversions += 1,
                    Ordering::Less => {}
                }
            }
        }
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Some((if inversions % 2 == 0 { 1 } else { -1 }, FormIndex(v)))
    }

    /// `dq^j ∧ self`.
    pub fn prepend(&self, j: u16) -> Option<(i8, FormIndex)> {
        FormIndex(vec![j]).wedge(self)
    }

    /// Interior product with `∂/∂q^j`: sign and remaining index, `None` if `j` is absent.
    pub fn contract(&self, j: u16) -> Option<(i8, FormIndex)> {
        let at = self.0.iter().position(|&e| e == j)?;
        let mut v = self.0.clone();
        v.remove(at);
        Some((if at % 2 == 0 { 1 } else { -1 }, FormIndex(v)))
    }
}

impl Ord for FormIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FormIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|j| format!("dq{j}")).collect();
        f.write_str(&s.join("^"))
    }
}

/// Key of a section term: fiber part in series order, then form part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectionKey {
    pub fiber: FiberKey,
    pub form: FormIndex,
}

impl SectionKey {
    pub fn new(k: u32, xidx: SymIndex, form: FormIndex) -> Self {
        Self { fiber: FiberKey::new(k, xidx), form }
    }

    pub fn k(&self) -> u32 {
        self.fiber.k
    }

    pub fn xidx(&self) -> &SymIndex {
        &self.fiber.index
    }

    /// Weyl degree `2k + l`.
    pub fn degree(&self) -> u32 {
        self.fiber.degree()
    }
}

/// How the term-pair loop combines `u` and `v`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum PairMode {
    /// `u ∘ v`.
    Product,
    /// `u ∘ v − (−1)^{j₁j₂} v ∘ u`, fused: only odd contraction orders survive, doubled.
    Commutator,
}

/// A Weyl-algebra-valued differential form with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylFormSection {
    two_n: usize,
    order: u32,
    terms: BTreeMap<SectionKey, Poly>,
}

impl WeylFormSection {
    pub fn zero(two_n: usize, order: u32) -> Result<Self> {
        check_dimension(two_n)?;
        Ok(Self { two_n, order, terms: BTreeMap::new() })
    }

    pub fn one(two_n: usize, order: u32) -> Result<Self> {
        Self::function(two_n, order, Poly::one(two_n))
    }

    /// The 0-form `f(q)` with no fiber dependence.
    pub fn function(two_n: usize, order: u32, f: Poly) -> Result<Self> {
        let mut s = Self::zero(two_n, order)?;
        s.add_term(SectionKey::new(0, SymIndex::scalar(), FormIndex::empty()), f);
        Ok(s)
    }

    /// Single term `P · ħ^k · X^{xidx} · dq^{form}`.
    pub fn monomial(two_n: usize, order: u32, k: u32, xidx: SymIndex, form: FormIndex, p: Poly) -> Result<Self> {
        let mut s = Self::zero(two_n, order)?;
        if xidx.max_entry() > two_n || form.entries().last().is_some_and(|&e| e as usize > two_n) {
            return Err(Error::InvalidFormIndex {
                two_n,
                entries: form.entries().iter().map(|&e| e as usize).collect(),
            });
        }
        s.add_term(SectionKey::new(k, xidx, form), p);
        Ok(s)
    }

    /// Constant-coefficient 0-form from a fiber element.
    pub fn from_weyl(w: &WeylElement) -> Self {
        let mut s = Self { two_n: w.two_n(), order: w.order(), terms: BTreeMap::new() };
        for t in w.terms() {
            s.add_term(SectionKey::new(t.k, t.xidx, FormIndex::empty()), Poly::constant(w.two_n(), t.coeff));
        }
        s
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

    pub fn terms(&self) -> impl Iterator<Item = (&SectionKey, &Poly)> {
        self.terms.iter()
    }

    pub fn get(&self, key: &SectionKey) -> Option<&Poly> {
        self.terms.get(key)
    }

    /// Adds `p` at `key`, dropping it if its Weyl degree exceeds the order.
    pub fn add_term(&mut self, key: SectionKey, p: Poly) {
        if key.degree() > self.order || p.is_zero() {
            return;
        }
        add_poly(&mut self.terms, key, &p, &GaussianRational::one());
    }

    pub(crate) fn add_scaled_term(&mut self, key: SectionKey, p: &Poly, c: &GaussianRational) {
        if key.degree() > self.order || p.is_zero() || c.is_zero() {
            return;
        }
        add_poly(&mut self.terms, key, p, c);
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
        for (k, p) in &other.terms {
            add_poly(&mut out.terms, k.clone(), p, &GaussianRational::one());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        let m1 = -GaussianRational::one();
        for (k, p) in &other.terms {
            add_poly(&mut out.terms, k.clone(), p, &m1);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = self.empty_like(self.order);
        for (k, p) in &self.terms {
            out.add_scaled_term(k.clone(), p, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-GaussianRational::one())
    }

    /// Adds `c ħ^k · other`, dropping terms above this section's order.
    pub(crate) fn add_shifted(&mut self, other: &Self, k: u32, c: &GaussianRational) {
        for (key, p) in &other.terms {
            let nk = SectionKey::new(key.k() + k, key.xidx().clone(), key.form.clone());
            self.add_scaled_term(nk, p, c);
        }
    }

    pub(crate) fn empty_like(&self, order: u32) -> Self {
        Self { two_n: self.two_n, order, terms: BTreeMap::new() }
    }

    /// Drops terms above `order` and sets the order to it.
    pub fn truncate(&self, order: u32) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.degree() <= order).map(|(k, p)| (k.clone(), p.clone())).collect();
        Self { two_n: self.two_n, order, terms }
    }

    /// Same terms under a different order; terms above a lowered order are dropped.
    pub fn with_order(&self, order: u32) -> Self {
        self.truncate(order)
    }

    /// Terms of form degree `p`.
    pub fn form_part(&self, p: usize) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.form.degree() == p).map(|(k, q)| (k.clone(), q.clone())).collect();
        Self { two_n: self.two_n, order: self.order, terms }
    }

    /// Terms of Weyl degree `d`.
    pub fn degree_part(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(k, q)| (k.clone(), q.clone())).collect();
        Self { two_n: self.two_n, order: self.order, terms }
    }

    /// Distinct form degrees that occur.
    pub fn form_degrees(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(|k| k.form.degree()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Smallest Weyl degree among the terms.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(SectionKey::degree).min()
    }

    /// Terms with an empty fiber index, as `(k, form) -> poly`.
    pub fn fiber_free_part(&self) -> Self {
        let terms = self.terms.iter().filter(|(k, _)| k.xidx().is_empty()).map(|(k, q)| (k.clone(), q.clone())).collect();
        Self { two_n: self.two_n, order: self.order, terms }
    }

    /// Fiber product combined with the wedge of form parts.
    pub fn wedge_circ(&self, other: &Self) -> Result<Self> {
        self.wedge_circ_with(other, Exec::default())
    }

    pub fn wedge_circ_with(&self, other: &Self, exec: Exec) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.pair_loop(other, self.order, PairMode::Product, exec))
    }

    /// `u ∘ v − (−1)^{j₁j₂} v ∘ u` evaluated directly from two products, one
    /// homogeneous form-degree pair at a time.
    pub fn graded_commutator(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.empty_like(self.order);
        for j1 in self.form_degrees() {
            let u = self.form_part(j1);
            for j2 in other.form_degrees() {
                let v = other.form_part(j2);
                let uv = u.wedge_circ(&v)?;
                let vu = v.wedge_circ(&u)?;
                let sign = if (j1 * j2) % 2 == 0 { -GaussianRational::one() } else { GaussianRational::one() };
                for (k, p) in uv.terms {
                    add_poly(&mut out.terms, k, &p, &GaussianRational::one());
                }
                for (k, p) in vu.terms {
                    add_poly(&mut out.terms, k, &p, &sign);
                }
            }
        }
        Ok(out)
    }

    /// The graded commutator computed in one fused pass, truncated at `cap`.
    pub(crate) fn commutator_capped(&self, other: &Self, cap: u32, exec: Exec) -> Self {
        self.pair_loop(other, cap, PairMode::Commutator, exec)
    }

    /// `(1/iħ)[u, v]`: commutator at two degrees above the order, then an exact
    /// shift down in ħ. Fails if any ħ⁰ term would have to be divided.
    pub fn ih_bracket(&self, other: &Self) -> Result<Self> {
        self.ih_bracket_with(other, Exec::default())
    }

    pub fn ih_bracket_with(&self, other: &Self, exec: Exec) -> Result<Self> {
        self.check_compatible(other)?;
        self.commutator_capped(other, self.order + 2, exec).div_ih(self.order, "commutator")
    }

    /// `(1/iħ)[u, v]` for operands of any orders on the same chart, exact through `order`.
    pub fn ih_bracket_to(&self, other: &Self, order: u32) -> Result<Self> {
        self.check_dim(other)?;
        self.commutator_capped(other, order + 2, Exec::default()).div_ih(order, "commutator")
    }

    /// `u ∘ v` for operands of any orders on the same chart, truncated at `order`.
    pub fn wedge_circ_to(&self, other: &Self, order: u32) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.pair_loop(other, order, PairMode::Product, Exec::default()))
    }

    /// `(1/iħ)(u ∘ v)` for operands of any orders, exact through `order`.
    pub fn ih_product_to(&self, other: &Self, order: u32) -> Result<Self> {
        self.check_dim(other)?;
        self.pair_loop(other, order + 2, PairMode::Product, Exec::default()).div_ih(order, "product")
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.two_n != other.two_n {
            return Err(Error::Mismatch {
                left_dim: self.two_n,
                right_dim: other.two_n,
                left_order: self.order,
                right_order: other.order,
            });
        }
        Ok(())
    }

    /// `(1/iħ)(u ∘ v)` with the product taken two degrees above the order.
    pub fn ih_product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        self.pair_loop(other, self.order + 2, PairMode::Product, Exec::default()).div_ih(self.order, "product")
    }

    /// Exact division by `iħ`; the result carries `order`.
    pub fn div_ih(&self, order: u32, context: &'static str) -> Result<Self> {
        let minus_i = -GaussianRational::i();
        let mut out = self.empty_like(order);
        for (key, p) in &self.terms {
            if key.k() == 0 {
                return Err(Error::HbarResidue { context });
            }
            let nk = SectionKey::new(key.k() - 1, key.xidx().clone(), key.form.clone());
            out.add_scaled_term(nk, p, &minus_i);
        }
        Ok(out)
    }

    /// Multiplies by `iħ`, dropping terms above `order`.
    pub fn mul_ih(&self, order: u32) -> Self {
        let i = GaussianRational::i();
        let mut out = self.empty_like(order);
        for (key, p) in &self.terms {
            let nk = SectionKey::new(key.k() + 1, key.xidx().clone(), key.form.clone());
            out.add_scaled_term(nk, p, &i);
        }
        out
    }

    /// Exterior derivative in `q`: `d(P · X^I · dq^J) = Σ_m ∂_m P · X^I · dq^m ∧ dq^J`.
    pub fn exterior_d(&self) -> Self {
        let mut out = self.empty_like(self.order);
        for (key, p) in &self.terms {
            for m in 0..self.two_n {
                let j = (m + 1) as u16;
                let Some((sign, form)) = key.form.prepend(j) else { continue };
                let dp = p.derivative(m);
                if dp.is_zero() {
                    continue;
                }
                let nk = SectionKey::new(key.k(), key.xidx().clone(), form);
                out.add_scaled_term(nk, &dp, &GaussianRational::from_int(sign as i64));
            }
        }
        out
    }

    /// Multiplies every coefficient by the polynomial `f`.
    pub fn mul_function(&self, f: &Poly) -> Self {
        let mut out = self.empty_like(self.order);
        for (key, p) in &self.terms {
            out.add_term(key.clone(), p.mul_ref(f));
        }
        out
    }

    /// First key (in storage order) where the two sections differ.
    pub fn first_difference(&self, other: &Self) -> Option<(SectionKey, Poly, Poly)> {
        let keys: std::collections::BTreeSet<&SectionKey> = self.terms.keys().chain(other.terms.keys()).collect();
        for k in keys {
            let a = self.terms.get(k).cloned().unwrap_or_else(|| Poly::zero(self.two_n));
            let b = other.terms.get(k).cloned().unwrap_or_else(|| Poly::zero(self.two_n));
            if a != b {
                return Some((k.clone(), a, b));
            }
        }
        None
    }

    /// `Ok` when both sides agree termwise, else the first differing term.
    pub fn expect_equal(&self, other: &Self, check: &'static str) -> Result<()> {
        match self.first_difference(other) {
            None => Ok(()),
            Some((key, a, b)) => Err(Error::IdentityMismatch {
                check,
                term: key_text(&key),
                left: a.to_string(),
                right: b.to_string(),
            }),
        }
    }

    fn pair_loop(&self, other: &Self, cap: u32, mode: PairMode, exec: Exec) -> Self {
        let two_n = self.two_n;
        let left: Vec<(&SectionKey, &Poly)> = self.terms.iter().collect();
        let right: Vec<(&SectionKey, &Poly)> = other.terms.iter().collect();
        let two = GaussianRational::from_int(2);
        let (terms, _) = fold_merge(
            &left,
            left.len() * right.len(),
            exec,
            || (BTreeMap::new(), ContractionCache::default()),
            |(acc, cache), (ka, pa)| {
                for (kb, pb) in &right {
                    if ka.degree() + kb.degree() > cap {
                        continue;
                    }
                    let Some((sign, form)) = ka.form.wedge(&kb.form) else { continue };
                    if mode == PairMode::Commutator && (ka.xidx().is_empty() || kb.xidx().is_empty()) {
                        continue;
                    }
                    let contractions = cache.get(two_n, ka.xidx(), kb.xidx());
                    let prod = pa.mul_ref(pb);
                    let sign = GaussianRational::from_int(sign as i64);
                    for c in contractions.iter() {
                        let mut coeff = &sign * &c.coeff;
                        if mode == PairMode::Commutator {
                            if c.t % 2 == 0 {
                                continue;
                            }
                            coeff = &coeff * &two;
                        }
                        let key = SectionKey::new(ka.k() + kb.k() + c.t, c.index.clone(), form.clone());
                        if key.degree() > cap {
                            continue;
                        }
                        add_poly(acc, key, &prod, &coeff);
                    }
                }
            },
            |(a, ca), (b, _)| {
                let mut a = a;
                for (k, p) in b {
                    add_poly(&mut a, k, &p, &GaussianRational::one());
                }
                (a, ca)
            },
        );
        Self { two_n, order: cap, terms }
    }
}

pub(crate) fn add_poly(map: &mut BTreeMap<SectionKey, Poly>, key: SectionKey, p: &Poly, c: &GaussianRational) {
    if p.is_zero() || c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            let scaled = if c.is_one() { p.clone() } else { p.scale(c) };
            v.insert(scaled);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            o.get_mut().add_scaled(p, c);
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn key_text(key: &SectionKey) -> String {
    let mono = fiber_monomial_text(key.xidx());
    let mut s = format!("hbar^{} * {}", key.k(), if mono.is_empty() { "1".into() } else { mono });
    if key.form.degree() > 0 {
        s.push_str(&format!(" * {}", key.form));
    }
    s
}

impl fmt::Display for WeylFormSection {
    /// `hbar^k * X1*X2 * dq1^dq2 * (poly)` terms joined by ` + `; the form
    /// factor is omitted for 0-forms and `1` stands for the empty fiber monomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (key, p) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{} * ({p})", key_text(key))?;
        }
        Ok(())
    }
}
