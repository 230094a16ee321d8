//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! These are the coefficient functions of sections on a Darboux chart, in the
//! coordinates `q1 … q{2n}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::coeff::{CoeffShape, GaussianRational};

/// Exponent vector, ordered so that iteration yields the canonical print order:
/// higher total degree first, then lexicographically larger exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .total_degree()
            .cmp(&self.total_degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `nvars` commuting variables with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    /// The coordinate `q{j+1}` (0-based `j`).
    pub fn var(nvars: usize, j: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[j] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, GaussianRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u16>, GaussianRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    /// Coefficient of the given exponent vector.
    pub fn coeff(&self, exps: &[u16]) -> GaussianRational {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    /// Largest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::total_degree)
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn add_assign_ref(&mut self, other: &Poly) {
        debug_assert_eq!(self.nvars, other.nvars);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Poly, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        let mut p = Poly::zero(self.nvars);
        p.add_scaled(self, c);
        p
    }

    pub fn mul_ref(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut p = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.mul(mb), ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// `∂/∂q{j+1}` (0-based `j`).
    pub fn derivative(&self, j: usize) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[j];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[j] -= 1;
            p.add_term(dm, c * &GaussianRational::from_int(e as i64));
        }
        p
    }

    /// Splits off variable `j` (0-based): returns `power -> coefficient polynomial`
    /// in the remaining variables.
    pub fn split_variable(&self, j: usize) -> BTreeMap<u16, Poly> {
        let mut out: BTreeMap<u16, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut rest = m.0.clone();
            let e = rest.remove(j);
            out.entry(e).or_insert_with(|| Poly::zero(self.nvars - 1)).add_term(Monomial(rest), c.clone());
        }
        out
    }

    /// Renders with variable names produced by `name(j)` for 0-based `j`.
    pub fn display_with<F: Fn(usize) -> String>(&self, name: F) -> String {
        let mut out = String::new();
        write_sum(
            &mut out,
            self.terms.iter().map(|(m, c)| (c, monomial_text(&m.0, &name))),
        );
        out
    }
}

pub(crate) fn monomial_text<F: Fn(usize) -> String>(exps: &[u16], name: &F) -> String {
    let mut parts = Vec::new();
    for (j, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(name(j)),
            _ => parts.push(format!("{}^{}", name(j), e)),
        }
    }
    parts.join("*")
}

/// Writes `c1*m1 + c2*m2 - …`, or `0` when empty. An empty monomial string means the constant.
pub(crate) fn write_sum<'a>(
    out: &mut String,
    terms: impl Iterator<Item = (&'a GaussianRational, String)>,
) {
    let mut first = true;
    for (c, mono) in terms {
        let (neg, shape) = c.signed_shape();
        if first {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        first = false;
        match (shape, mono.is_empty()) {
            (CoeffShape::Unit, true) => out.push('1'),
            (CoeffShape::Unit, false) => out.push_str(&mono),
            (CoeffShape::Token(t), true) => out.push_str(&t),
            (CoeffShape::Token(t), false) => {
                out.push_str(&t);
                out.push('*');
                out.push_str(&mono);
            }
        }
    }
    if first {
        out.push('0');
    }
}

impl fmt::Display for Poly {
    /// Canonical form in `q1 … q{nvars}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(|j| format!("q{}", j + 1)))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_assign_ref(o);
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        p.add_scaled(o, &-GaussianRational::one());
        p
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.mul_ref(o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-GaussianRational::one())
    }
}
