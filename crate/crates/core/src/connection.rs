//! Symplectic connections on a Darboux chart.
//!
//! Coefficients are lowered-index symbols `Γ_{ijk}(q)`, totally symmetric. The
//! Weyl-valued connection 1-form is `Γ = (1/2) Γ_{ijk} X^i X^j dq^k`, which makes
//! `(1/iħ)[Γ, X^m] = −Γ^m_{jk} X^j dq^k` with `Γ^m_{jk} = ω^{mi} Γ_{ijk}`.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::GaussianRational;
use crate::error::{Error, Result};
use crate::forms::{FormIndex, SectionKey, WeylFormSection};
use crate::grading::{check_dimension, sym_dim, sym_rank, to_u64, SymIndex};
use crate::poly::Poly;
use crate::weyl::poisson_tensor;

fn sorted3(i: usize, j: usize, k: usize) -> [usize; 3] {
    let mut a = [i, j, k];
    a.sort_unstable();
    a
}

/// Raw connection input: one record per supplied index triple, any order.
#[derive(Clone, Debug, Default)]
pub struct ConnectionTable {
    pub two_n: usize,
    pub entries: Vec<([usize; 3], Poly)>,
}

impl ConnectionTable {
    pub fn new(two_n: usize) -> Self {
        Self { two_n, entries: Vec::new() }
    }

    pub fn push(&mut self, index: [usize; 3], p: Poly) -> &mut Self {
        self.entries.push((index, p));
        self
    }

    /// Checks total symmetry: every supplied permutation of a triple must carry
    /// the same polynomial. Unlisted components are zero.
    pub fn validate(&self) -> Result<Connection> {
        check_dimension(self.two_n)?;
        let mut seen: BTreeMap<[usize; 3], ([usize; 3], Poly)> = BTreeMap::new();
        for (index, p) in &self.entries {
            if index.iter().any(|&e| e == 0 || e > self.two_n) {
                return Err(Error::ConnectionIndex { two_n: self.two_n, index: *index });
            }
            let key = sorted3(index[0], index[1], index[2]);
            match seen.get(&key) {
                Some((first, q)) if q != p => {
                    return Err(Error::SymmetryViolation {
                        first: *first,
                        first_poly: q.to_string(),
                        second: *index,
                        second_poly: p.to_string(),
                    });
                }
                Some(_) => {}
                None => {
                    seen.insert(key, (*index, p.clone()));
                }
            }
        }
        let gamma = seen.into_iter().filter(|(_, (_, p))| !p.is_zero()).map(|(k, (_, p))| (k, p)).collect();
        Ok(Connection { two_n: self.two_n, gamma })
    }
}

/// A validated symplectic connection, stored on `i ≤ j ≤ k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    two_n: usize,
    gamma: BTreeMap<[usize; 3], Poly>,
}

impl Connection {
    pub fn flat(two_n: usize) -> Result<Self> {
        check_dimension(two_n)?;
        Ok(Self { two_n, gamma: BTreeMap::new() })
    }

    pub fn two_n(&self) -> usize {
        self.two_n
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.is_empty()
    }

    /// Nonzero canonical components.
    pub fn components(&self) -> impl Iterator<Item = (&[usize; 3], &Poly)> {
        self.gamma.iter()
    }

    /// `Γ_{ijk}`, 1-based, any index order.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> Poly {
        self.gamma.get(&sorted3(i, j, k)).cloned().unwrap_or_else(|| Poly::zero(self.two_n))
    }

    /// `Γ^l_{jk} = ω^{li} Γ_{ijk}`.
    pub fn raised(&self, l: usize, j: usize, k: usize) -> Poly {
        let mut out = Poly::zero(self.two_n);
        for i in 1..=self.two_n {
            let w = poisson_tensor(self.two_n, l, i);
            if w != 0 {
                out.add_scaled(&self.gamma(i, j, k), &GaussianRational::from_int(w));
            }
        }
        out
    }

    /// `(1/2) Γ_{ijk} X^i X^j dq^k` summed over all indices.
    pub fn gamma_form(&self, order: u32) -> Result<WeylFormSection> {
        let mut s = WeylFormSection::zero(self.two_n, order)?;
        let half = GaussianRational::ratio(1, 2);
        let one = GaussianRational::from_int(1);
        for i in 1..=self.two_n {
            for j in i..=self.two_n {
                let xidx = SymIndex::new(self.two_n, &[i, j])?;
                // the (i,j) and (j,i) summands coincide off the diagonal
                let c = if i == j { &half } else { &one };
                for k in 1..=self.two_n {
                    let g = self.gamma(i, j, k);
                    if g.is_zero() {
                        continue;
                    }
                    s.add_scaled_term(SectionKey::new(0, xidx.clone(), FormIndex::new(self.two_n, &[k])?), &g, c);
                }
            }
        }
        Ok(s)
    }

    /// `∂v = dv + (1/iħ)[Γ, v]`, exact through the order of `v`.
    pub fn cov_deriv(&self, v: &WeylFormSection) -> Result<WeylFormSection> {
        self.check_chart(v)?;
        let g = self.gamma_form(v.order() + 2)?;
        v.exterior_d().add(&g.ih_bracket_to(v, v.order())?)
    }

    /// `ℛ = dΓ + (1/iħ) Γ∘Γ`.
    pub fn curvature(&self, order: u32) -> Result<WeylFormSection> {
        let g = self.gamma_form(order.max(2))?;
        let quad = g.ih_product_to(&g, order)?;
        g.exterior_d().truncate(order).add(&quad)
    }

    /// Components `R_{ijkl} = ∂_kΓ_{ijl} − ∂_lΓ_{ijk} + ω^{zu}(Γ_{zik}Γ_{ujl} − Γ_{zil}Γ_{ujk})`.
    pub fn curvature_tensor(&self) -> CurvatureTensor {
        let n2 = self.two_n;
        let mut components = BTreeMap::new();
        for i in 1..=n2 {
            for j in 1..=n2 {
                for k in 1..=n2 {
                    for l in 1..=n2 {
                        let mut r = &self.gamma(i, j, l).derivative(k - 1) - &self.gamma(i, j, k).derivative(l - 1);
                        for z in 1..=n2 {
                            for u in 1..=n2 {
                                let w = poisson_tensor(n2, z, u);
                                if w == 0 {
                                    continue;
                                }
                                let t = &(&self.gamma(z, i, k) * &self.gamma(u, j, l))
                                    - &(&self.gamma(z, i, l) * &self.gamma(u, j, k));
                                r.add_scaled(&t, &GaussianRational::from_int(w));
                            }
                        }
                        if !r.is_zero() {
                            components.insert([i, j, k, l], r);
                        }
                    }
                }
            }
        }
        CurvatureTensor { two_n: n2, components }
    }

    /// Checks `∂²v = (1/iħ)[ℛ, v]` modulo degree above the order of `v`.
    pub fn second_deriv_check(&self, v: &WeylFormSection) -> Result<()> {
        let lhs = self.cov_deriv(&self.cov_deriv(v)?)?;
        let rhs = self.curvature(v.order() + 2)?.ih_bracket_to(v, v.order())?;
        lhs.expect_equal(&rhs, "second covariant derivative")
    }

    /// `ϖ^m_j` as the components of a 1-form, read off `(1/iħ)[Γ, X^m] = −ϖ^m_j X^j`.
    pub fn connection_forms(&self) -> Result<Vec<Vec<Vec<Poly>>>> {
        let n2 = self.two_n;
        let g = self.gamma_form(4)?;
        let mut w = vec![vec![vec![Poly::zero(n2); n2]; n2]; n2];
        for m in 1..=n2 {
            let xm = WeylFormSection::monomial(n2, 2, 0, SymIndex::new(n2, &[m])?, FormIndex::empty(), Poly::one(n2))?;
            let b = g.ih_bracket_to(&xm, 2)?;
            for (key, p) in b.terms() {
                let (&[j], &[k]) = (key.xidx().entries(), key.form.entries()) else { continue };
                if key.k() == 0 {
                    w[m - 1][j as usize - 1][k as usize - 1] = -p;
                }
            }
        }
        Ok(w)
    }

    /// The induced connection matrix on symmetric rank-`l` tensors.
    pub fn induced_matrix(&self, l: usize) -> Result<InducedMatrix> {
        let pattern = InducedPattern::derive(self.two_n, l)?;
        let w = self.connection_forms()?;
        let dim = pattern.rows.len();
        let mut entries = vec![vec![vec![Poly::zero(self.two_n); self.two_n]; dim]; dim];
        for (r, row) in pattern.entries.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                for (&(a, b), &n) in cell {
                    for k in 0..self.two_n {
                        entries[r][c][k].add_scaled(&w[a as usize - 1][b as usize - 1][k], &GaussianRational::from_int(n));
                    }
                }
            }
        }
        Ok(InducedMatrix { pattern, entries })
    }

    fn check_chart(&self, v: &WeylFormSection) -> Result<()> {
        if v.two_n() != self.two_n {
            return Err(Error::Mismatch { left_dim: self.two_n, right_dim: v.two_n(), left_order: v.order(), right_order: v.order() });
        }
        Ok(())
    }
}

/// `R_{ijkl}` for all index values, zero components omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTensor {
    two_n: usize,
    components: BTreeMap<[usize; 4], Poly>,
}

impl CurvatureTensor {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Poly {
        self.components.get(&[i, j, k, l]).cloned().unwrap_or_else(|| Poly::zero(self.two_n))
    }

    pub fn components(&self) -> impl Iterator<Item = (&[usize; 4], &Poly)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// `(1/4) R_{ijkl} X^i X^j dq^k ∧ dq^l` summed over all indices.
    pub fn assemble(&self, order: u32) -> Result<WeylFormSection> {
        let mut s = WeylFormSection::zero(self.two_n, order)?;
        let quarter = GaussianRational::ratio(1, 4);
        for (&[i, j, k, l], r) in &self.components {
            let Some((sign, form)) = FormIndex::normalize(&[k, l]) else { continue };
            let xidx = SymIndex::from_unsorted(vec![i as u16, j as u16]);
            let c = &quarter * &GaussianRational::from_int(sign as i64);
            s.add_scaled_term(SectionKey::new(0, xidx, form), r, &c);
        }
        Ok(s)
    }
}

/// Integer combination of symbols `ϖ^a_b`, keyed by `(a, b)`.
pub type PatternEntry = BTreeMap<(u16, u16), i64>;

/// The induced matrix as combinations of `ϖ^a_b`, rows and columns in rank order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedPattern {
    pub l: usize,
    pub rows: Vec<SymIndex>,
    pub entries: Vec<Vec<PatternEntry>>,
}

impl InducedPattern {
    /// Expands `∂(dq^{i₁}⊙…⊙dq^{i_l}) = Σ_r Σ_j −ϖ^j_{i_r} (dq^{i₁}⊙…dq^j…⊙dq^{i_l})`.
    pub fn derive(two_n: usize, l: usize) -> Result<Self> {
        check_dimension(two_n)?;
        let dim = to_u64(&sym_dim(two_n, l)) as usize;
        let mut rows = Vec::with_capacity(dim);
        for r in 1..=dim {
            rows.push(crate::grading::sym_unrank(two_n, l, &(r as u64).into())?);
        }
        let mut entries = vec![vec![PatternEntry::new(); dim]; dim];
        for (row, idx) in rows.iter().enumerate() {
            for (pos, &ir) in idx.entries().iter().enumerate() {
                for j in 1..=two_n as u16 {
                    let mut e = idx.entries().to_vec();
                    e[pos] = j;
                    let col = to_u64(&sym_rank(two_n, &SymIndex::from_unsorted(e))?) as usize - 1;
                    let cell = entries[row].get_mut(col).expect("rank in range");
                    *cell.entry((j, ir)).or_insert(0) -= 1;
                    cell.retain(|_, v| *v != 0);
                }
            }
        }
        Ok(Self { l, rows, entries })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Renders a pattern entry as `-2w^1_2`, `-w^1_1 - w^2_2` or `0`.
pub fn pattern_text(e: &PatternEntry) -> String {
    if e.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (&(a, b), &n)) in e.iter().enumerate() {
        let sym = format!("w^{a}_{b}");
        let mag = n.unsigned_abs();
        let body = if mag == 1 { sym } else { format!("{mag}{sym}") };
        match (i, n < 0) {
            (0, true) => s.push_str(&format!("-{body}")),
            (0, false) => s.push_str(&body),
            (_, true) => s.push_str(&format!(" - {body}")),
            (_, false) => s.push_str(&format!(" + {body}")),
        }
    }
    s
}

/// Induced matrix with entries evaluated as 1-forms (coefficient of `dq^k` at index `k−1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMatrix {
    pub pattern: InducedPattern,
    pub entries: Vec<Vec<Vec<Poly>>>,
}

impl fmt::Display for InducedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(pattern_text).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
