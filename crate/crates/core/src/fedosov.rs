//! Abelian connections, flat lifts and the star product.
//!
//! The abelian covariant derivative is `D = d + (1/iħ)[Γ̃, ·]` with
//! `Γ̃ = ω_{ij} X^i dq^j + Γ + r`. The ω-part acts as `−δ`, where
//! `δ = dq^k ∧ ∂/∂X^k`, and `r` is fixed by `δ⁻¹ r = 0` and centrality of the
//! curvature. Everything is exact through a stated degree; higher terms are
//! dropped, never approximated.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::One;

use crate::coeff::GaussianRational;
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::forms::{FormIndex, SectionKey, WeylFormSection};
use crate::grading::{check_dimension, SymIndex};
use crate::parse::parse_hbar_poly;
use crate::par::{map_collect, Exec};
use crate::poly::{monomial_text, write_sum, Poly};
use crate::weyl::symplectic_form;

/// `δ v = dq^k ∧ ∂v/∂X^k`.
pub fn delta(v: &WeylFormSection) -> WeylFormSection {
    let mut out = v.empty_like(v.order());
    for (key, p) in v.terms() {
        let entries = key.xidx().entries();
        for (pos, &k) in entries.iter().enumerate() {
            // one derivative per distinct fiber index, weighted by multiplicity
            if pos > 0 && entries[pos - 1] == k {
                continue;
            }
            let mult = entries.iter().filter(|&&e| e == k).count() as i64;
            let Some((sign, form)) = key.form.prepend(k) else { continue };
            let rest = key.xidx().without(k).expect("index present");
            out.add_scaled_term(SectionKey::new(key.k(), rest, form), p, &GaussianRational::from_int(sign as i64 * mult));
        }
    }
    out
}

/// `δ⁻¹`: on a term with fiber length `l` and form degree `p`, `l + p > 0`,
/// maps `X^I dq^J` to `(1/(l+p)) Σ_k X^k X^I ι_{∂_k} dq^J`; zero when `l + p = 0`.
pub fn delta_inv(v: &WeylFormSection) -> WeylFormSection {
    let mut out = v.empty_like(v.order());
    for (key, p) in v.terms() {
        let lp = key.xidx().len() + key.form.degree();
        if lp == 0 {
            continue;
        }
        for &k in key.form.entries() {
            let (sign, form) = key.form.contract(k).expect("index present");
            let c = GaussianRational::ratio(sign as i64, lp as i64);
            out.add_scaled_term(SectionKey::new(key.k(), key.xidx().with(k), form), p, &c);
        }
    }
    out
}

/// Projection onto terms with no fiber index and no form part.
pub fn pi0(v: &WeylFormSection) -> WeylFormSection {
    let mut out = v.empty_like(v.order());
    for (key, p) in v.terms() {
        if key.xidx().is_empty() && key.form.degree() == 0 {
            out.add_term(key.clone(), p.clone());
        }
    }
    out
}

/// `Ω = −(1/2) ω_{jl} dq^j ∧ dq^l`.
pub fn omega_form(two_n: usize, order: u32) -> Result<WeylFormSection> {
    let mut s = WeylFormSection::zero(two_n, order)?;
    for j in 1..=two_n {
        for l in (j + 1)..=two_n {
            // the (j,l) and (l,j) summands coincide
            let w = -symplectic_form(two_n, j, l);
            if w != 0 {
                s.add_term(SectionKey::new(0, SymIndex::scalar(), FormIndex::new(two_n, &[j, l])?), Poly::constant(two_n, w.into()));
            }
        }
    }
    Ok(s)
}

/// `ω_{ij} X^i dq^j`.
pub fn omega_part(two_n: usize, order: u32) -> Result<WeylFormSection> {
    let mut s = WeylFormSection::zero(two_n, order)?;
    for i in 1..=two_n {
        for j in 1..=two_n {
            let w = symplectic_form(two_n, i, j);
            if w != 0 {
                s.add_term(
                    SectionKey::new(0, SymIndex::new(two_n, &[i])?, FormIndex::new(two_n, &[j])?),
                    Poly::constant(two_n, w.into()),
                );
            }
        }
    }
    Ok(s)
}

/// A function of `q` valued in formal series of `ħ`, truncated at `ħ^{⌊N/2⌋}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    two_n: usize,
    order: u32,
    terms: BTreeMap<u32, Poly>,
}

impl Observable {
    pub fn zero(two_n: usize, order: u32) -> Result<Self> {
        check_dimension(two_n)?;
        Ok(Self { two_n, order, terms: BTreeMap::new() })
    }

    /// An ħ-free observable.
    pub fn from_poly(two_n: usize, order: u32, f: Poly) -> Result<Self> {
        Self::from_hbar_terms(two_n, order, [(0, f)])
    }

    /// Builds from `ħ-power → poly`; powers with `2k > N` are dropped.
    pub fn from_hbar_terms(two_n: usize, order: u32, terms: impl IntoIterator<Item = (u32, Poly)>) -> Result<Self> {
        let mut o = Self::zero(two_n, order)?;
        for (k, p) in terms {
            o.add_term(k, &p);
        }
        Ok(o)
    }

    /// Parses a polynomial in `q1 … q{2n}` and `hbar`.
    pub fn parse(text: &str, two_n: usize, order: u32) -> Result<Self> {
        check_dimension(two_n)?;
        Self::from_hbar_terms(two_n, order, parse_hbar_poly(text, two_n)?)
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

    /// Coefficient of `ħ^k`.
    pub fn hbar_coeff(&self, k: u32) -> Poly {
        self.terms.get(&k).cloned().unwrap_or_else(|| Poly::zero(self.two_n))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &Poly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, k: u32, p: &Poly) {
        if 2 * k > self.order || p.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(|| Poly::zero(self.two_n));
        e.add_assign_ref(p);
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, p) in &other.terms {
            out.add_term(k, &-p);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, p) in &other.terms {
            out.add_term(k, p);
        }
        out
    }

    /// Same terms under another order, dropping powers beyond it.
    pub fn with_order(&self, order: u32) -> Self {
        Self::from_hbar_terms(self.two_n, order, self.terms.clone()).expect("dimension already checked")
    }

    /// `Σ_k ħ^k f_k` as a 0-form with no fiber part.
    pub fn to_section(&self, order: u32) -> WeylFormSection {
        let mut s = WeylFormSection::zero(self.two_n, order).expect("dimension already checked");
        for (&k, p) in &self.terms {
            s.add_term(SectionKey::new(k, SymIndex::scalar(), FormIndex::empty()), p.clone());
        }
        s
    }

    /// One line per ħ-power: `hbar^k * (poly)`.
    pub fn graded_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let lines: Vec<String> = self.terms.iter().map(|(k, p)| format!("hbar^{k} * ({p})")).collect();
        lines.join("\n")
    }
}

impl fmt::Display for Observable {
    /// Flat sum in ascending ħ-power, each power in polynomial print order, e.g.
    /// `q1*q2 + (1/2)i*hbar`. Re-parses to an equal value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |j: usize| format!("q{}", j + 1);
        let mut items = Vec::new();
        for (&k, p) in &self.terms {
            for (m, c) in p.terms() {
                let mut mono = monomial_text(&m.0, &name);
                let h = match k {
                    0 => String::new(),
                    1 => "hbar".into(),
                    _ => format!("hbar^{k}"),
                };
                if !h.is_empty() {
                    if !mono.is_empty() {
                        mono.push('*');
                    }
                    mono.push_str(&h);
                }
                items.push((c, mono));
            }
        }
        let mut out = String::new();
        write_sum(&mut out, items.into_iter());
        f.write_str(&out)
    }
}

type LiftCache = HashMap<(Vec<u16>, u32), Arc<WeylFormSection>>;

/// `Γ̃ = ω_{ij} X^i dq^j + Γ + r` with `r` exact through `N + 2`.
#[derive(Clone, Debug)]
pub struct AbelianConnection {
    conn: Connection,
    order: u32,
    work: u32,
    gamma: WeylFormSection,
    base: WeylFormSection,
    r: WeylFormSection,
    /// Lifts of single `q`-monomials keyed by exponents and order. Lifting is
    /// linear and commutes with `ħ`, so every lift is assembled from these.
    lifts: Arc<Mutex<LiftCache>>,
}

/// Builds the abelian connection for observables truncated at order `N`.
///
/// `r` solves `r = δ⁻¹(ℛ + ∂r + (1/iħ) r∘r)`. The right side in degree `d − 1`
/// only involves parts of `r` below degree `d`, so the fixed point is reached
/// one degree at a time, each product of homogeneous parts formed once.
pub fn build_abelian(conn: &Connection, order: u32) -> Result<AbelianConnection> {
    let two_n = conn.two_n();
    let work = order + 2;
    let gamma = conn.gamma_form(work)?;
    let base = omega_part(two_n, work)?.add(&gamma)?;
    let mut rhs = conn.curvature(work)?;
    let mut parts: Vec<WeylFormSection> = Vec::new();
    let mut r = WeylFormSection::zero(two_n, work)?;
    for d in 3..=work {
        let rd = delta_inv(&rhs.degree_part(d - 1)).degree_part(d);
        if !rd.is_zero() {
            rhs = rhs.add(&conn.cov_deriv(&rd)?)?;
            // (1/iħ)(r_d∘r_b + r_b∘r_d) = (1/iħ)[r_d, r_b] for 1-forms, landing in degree d + b − 2
            for rb in parts.iter().chain(std::iter::once(&rd)) {
                let Some(b) = rb.min_degree() else { continue };
                if d + b - 2 >= work {
                    continue;
                }
                let mut t = rd.ih_bracket_to(rb, work)?;
                if b == d {
                    t = t.scale(&GaussianRational::ratio(1, 2));
                }
                rhs = rhs.add(&t)?;
            }
            r = r.add(&rd)?;
        }
        parts.push(rd);
    }
    Ok(AbelianConnection { conn: conn.clone(), order, work, gamma, base, r, lifts: Arc::default() })
}

impl AbelianConnection {
    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn two_n(&self) -> usize {
        self.conn.two_n()
    }

    /// Observable truncation order `N`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree through which `r` is exact.
    pub fn working_order(&self) -> u32 {
        self.work
    }

    /// `ω_{ij} X^i dq^j + Γ`.
    pub fn base(&self) -> &WeylFormSection {
        &self.base
    }

    pub fn r(&self) -> &WeylFormSection {
        &self.r
    }

    /// `Γ̃ = base + r`.
    pub fn total(&self) -> WeylFormSection {
        self.base.add(&self.r).expect("same chart")
    }

    /// `Dv = dv − δv + (1/iħ)[Γ + r, v]`, exact through `order` when `v` is
    /// exact one degree higher.
    pub fn apply(&self, v: &WeylFormSection, order: u32) -> Result<WeylFormSection> {
        if order > self.work {
            return Err(Error::Mismatch { left_dim: self.two_n(), right_dim: v.two_n(), left_order: self.work, right_order: order });
        }
        let conn_part = self.gamma.add(&self.r)?;
        let d = v.exterior_d().truncate(order);
        let dl = delta(v).truncate(order);
        d.sub(&dl)?.add(&conn_part.ih_bracket_to(v, order)?)
    }

    /// `D v` via the bracket with the full `Γ̃`, without the `−δ` shortcut.
    pub fn apply_literal(&self, v: &WeylFormSection, order: u32) -> Result<WeylFormSection> {
        v.exterior_d().truncate(order).add(&self.total().ih_bracket_to(v, order)?)
    }

    /// `dΓ̃ + (1/iħ) Γ̃∘Γ̃` through degree `N`.
    pub fn total_curvature(&self) -> Result<WeylFormSection> {
        let t = self.total();
        t.exterior_d().truncate(self.order).add(&t.ih_product_to(&t, self.order)?)
    }

    /// Checks that the total curvature is `Ω` through degree `N`.
    pub fn check_centrality(&self) -> Result<()> {
        self.total_curvature()?.expect_equal(&omega_form(self.two_n(), self.order)?, "abelian curvature")
    }

    /// Checks `D²v = 0` through degree `N`, treating `v` as exact.
    pub fn check_d_squared(&self, v: &WeylFormSection) -> Result<()> {
        let v = v.with_order(self.order + 2);
        let dv = self.apply(&v, self.order + 1)?;
        let ddv = self.apply(&dv, self.order)?;
        ddv.expect_equal(&WeylFormSection::zero(self.two_n(), self.order)?, "D squared")
    }

    /// The flat section over `f`, exact through `order` (at most `N + 2`).
    ///
    /// Solves `v = f + δ⁻¹(∂v + (1/iħ)[r, v])` degree by degree: the bracket
    /// raises degree, so the degree-`d` part needs only the parts below it.
    pub fn lift_to(&self, f: &Observable, order: u32) -> Result<WeylFormSection> {
        if f.two_n() != self.two_n() || order > self.work {
            return Err(Error::Mismatch { left_dim: self.two_n(), right_dim: f.two_n(), left_order: self.work, right_order: order });
        }
        let mut wanted: Vec<(Vec<u16>, u32)> = Vec::new();
        for (&k, p) in &f.terms {
            if 2 * k <= order {
                wanted.extend(p.terms().map(|(m, _)| (m.0.clone(), order - 2 * k)));
            }
        }
        wanted.sort();
        wanted.dedup();
        let missing: Vec<(Vec<u16>, u32)> = {
            let cache = self.lifts.lock().expect("lift cache poisoned");
            wanted.iter().filter(|w| !cache.contains_key(*w)).cloned().collect()
        };
        let fresh = map_collect(&missing, Exec::default(), |(e, o)| self.lift_monomial(e, *o));
        let mut cache = self.lifts.lock().expect("lift cache poisoned");
        for (w, v) in missing.into_iter().zip(fresh) {
            cache.insert(w, Arc::new(v?));
        }
        let mut v = WeylFormSection::zero(self.two_n(), order)?;
        for (&k, p) in &f.terms {
            if 2 * k > order {
                continue;
            }
            for (m, c) in p.terms() {
                v.add_shifted(&cache[&(m.0.clone(), order - 2 * k)], k, c);
            }
        }
        Ok(v)
    }

    /// `σ⁻¹(q^e)` solved degree by degree: `v_d = δ⁻¹(∂v + (1/iħ)[r, v])_{d−1}`.
    fn lift_monomial(&self, exponents: &[u16], order: u32) -> Result<WeylFormSection> {
        let two_n = self.two_n();
        let f = WeylFormSection::function(two_n, order, Poly::from_terms(two_n, [(exponents.to_vec(), GaussianRational::one())]))?;
        let mut v = WeylFormSection::zero(self.two_n(), order)?;
        let mut rhs = WeylFormSection::zero(self.two_n(), order)?;
        for d in 0..=order {
            let mut vd = f.degree_part(d);
            if d > 0 {
                vd = vd.add(&delta_inv(&rhs.degree_part(d - 1)).degree_part(d))?;
            }
            if vd.is_zero() {
                continue;
            }
            if d < order {
                // only degrees below `order` of the right side are ever read
                rhs = rhs.add(&self.conn.cov_deriv(&vd)?)?.add(&self.r.ih_bracket_to(&vd, order - 1)?.with_order(order))?;
            }
            v = v.add(&vd)?;
        }
        Ok(v)
    }

    /// `σ⁻¹(f)`, exact one degree above `N` so that `D` of it is exact through `N`.
    pub fn flat_lift(&self, f: &Observable) -> Result<WeylFormSection> {
        self.lift_to(f, self.order + 1)
    }

    /// Checks `D σ⁻¹(f) = 0` through `N` and `σ(σ⁻¹(f)) = f`.
    pub fn check_lift(&self, f: &Observable) -> Result<()> {
        let v = self.flat_lift(f)?;
        self.apply(&v, self.order)?.expect_equal(&WeylFormSection::zero(self.two_n(), self.order)?, "flat lift")?;
        let back = sigma(&v, self.order);
        if back != f.with_order(self.order) {
            return Err(Error::IdentityMismatch {
                check: "lift round trip",
                term: "sigma".into(),
                left: back.to_string(),
                right: f.to_string(),
            });
        }
        Ok(())
    }

    /// `f₁ * f₂ = σ(σ⁻¹(f₁) ∘ σ⁻¹(f₂))`, truncated at `ħ^{⌊N/2⌋}`.
    pub fn star(&self, f1: &Observable, f2: &Observable) -> Result<Observable> {
        let v1 = self.flat_lift(f1)?;
        let v2 = self.flat_lift(f2)?;
        Ok(sigma(&v1.wedge_circ_to(&v2, self.order)?, self.order))
    }

    /// `{f₁, f₂} = (1/iħ)(f₁*f₂ − f₂*f₁)`, truncated at `ħ^{⌊N/2⌋}`.
    ///
    /// The commutator is formed from lifts two degrees deeper so the quotient
    /// keeps order `N`.
    pub fn moyal_bracket(&self, f1: &Observable, f2: &Observable) -> Result<Observable> {
        let deep = self.order + 2;
        let v1 = self.lift_to(f1, deep)?;
        let v2 = self.lift_to(f2, deep)?;
        let c = v1.wedge_circ_to(&v2, deep)?.sub(&v2.wedge_circ_to(&v1, deep)?)?;
        let s = sigma(&c, deep).to_section(deep);
        Ok(sigma(&s.div_ih(self.order, "star commutator")?, self.order))
    }
}

/// The fiber-free, form-free part of `v`, as an observable of the given order.
pub fn sigma(v: &WeylFormSection, order: u32) -> Observable {
    let mut o = Observable::zero(v.two_n(), order).expect("dimension already checked");
    for (key, p) in v.terms() {
        if key.xidx().is_empty() && key.form.degree() == 0 {
            o.add_term(key.k(), p);
        }
    }
    o
}

/// Self-check on a section: `δδ⁻¹ + δ⁻¹δ + π₀ = id`.
pub fn check_homotopy(v: &WeylFormSection) -> Result<()> {
    let lhs = delta(&delta_inv(v)).add(&delta_inv(&delta(v)))?.add(&pi0(v))?;
    lhs.expect_equal(v, "homotopy identity")
}
