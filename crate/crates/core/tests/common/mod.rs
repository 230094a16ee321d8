//! Independent oracles and seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fedosov_core::coeff::rat;
use fedosov_core::connection::{Connection, ConnectionTable, PatternEntry};
use fedosov_core::fedosov::Observable;
use fedosov_core::forms::{FormIndex, SectionKey, WeylFormSection};
use fedosov_core::grading::{FiberAddress, Part, SymIndex};
use fedosov_core::poly::Poly;
use fedosov_core::weyl::WeylElement;
use fedosov_core::GaussianRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gr(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
    GaussianRational::new(rat(re.0, re.1), rat(im.0, im.1))
}

/// Small nonzero Gaussian rational, real with probability 1/2.
pub fn coeff(r: &mut impl Rng) -> GaussianRational {
    loop {
        let re = (r.gen_range(-3..=3), r.gen_range(1..=3));
        let im = if r.gen_bool(0.5) { (0, 1) } else { (r.gen_range(-2..=2), r.gen_range(1..=2)) };
        let c = gr(re, im);
        if c != GaussianRational::from_int(0) {
            return c;
        }
    }
}

pub fn real_coeff(r: &mut impl Rng) -> GaussianRational {
    let n = [-3, -2, -1, 1, 2, 3].choose(r).copied().unwrap();
    GaussianRational::ratio(n, r.gen_range(1..=3))
}

pub fn exponents(r: &mut impl Rng, nvars: usize, max_deg: u32) -> Vec<u16> {
    let d = r.gen_range(0..=max_deg);
    let mut e = vec![0u16; nvars];
    for _ in 0..d {
        e[r.gen_range(0..nvars)] += 1;
    }
    e
}

pub fn random_poly(r: &mut impl Rng, nvars: usize, max_deg: u32, max_terms: usize) -> Poly {
    let n = r.gen_range(1..=max_terms);
    Poly::from_terms(nvars, (0..n).map(|_| (exponents(r, nvars, max_deg), coeff(r))).collect::<Vec<_>>())
}

pub fn random_index(r: &mut impl Rng, two_n: usize, l: usize) -> SymIndex {
    SymIndex::from_unsorted((0..l).map(|_| r.gen_range(1..=two_n as u16)).collect())
}

/// Terms of Weyl degree at most `max_deg`.
pub fn random_weyl(r: &mut impl Rng, two_n: usize, order: u32, max_deg: u32, max_terms: usize) -> WeylElement {
    let mut w = WeylElement::zero(two_n, order).unwrap();
    for _ in 0..r.gen_range(1..=max_terms) {
        let d = r.gen_range(0..=max_deg);
        let k = r.gen_range(0..=d / 2);
        w.add_term(k, random_index(r, two_n, (d - 2 * k) as usize), coeff(r));
    }
    w
}

/// Homogeneous of Weyl degree `d`.
pub fn random_homogeneous(r: &mut impl Rng, two_n: usize, order: u32, d: u32, max_terms: usize) -> WeylElement {
    let mut w = WeylElement::zero(two_n, order).unwrap();
    for _ in 0..r.gen_range(1..=max_terms) {
        let k = r.gen_range(0..=d / 2);
        w.add_term(k, random_index(r, two_n, (d - 2 * k) as usize), coeff(r));
    }
    w
}

pub fn random_form(r: &mut impl Rng, two_n: usize, p: usize) -> FormIndex {
    let mut all: Vec<usize> = (1..=two_n).collect();
    all.shuffle(r);
    let mut e = all[..p].to_vec();
    e.sort_unstable();
    FormIndex::new(two_n, &e).unwrap()
}

pub struct SectionShape {
    pub max_deg: u32,
    pub form_degrees: Vec<usize>,
    pub poly_deg: u32,
    pub max_terms: usize,
}

pub fn random_section(r: &mut impl Rng, two_n: usize, order: u32, shape: &SectionShape) -> WeylFormSection {
    let mut s = WeylFormSection::zero(two_n, order).unwrap();
    for _ in 0..r.gen_range(1..=shape.max_terms) {
        let d = r.gen_range(0..=shape.max_deg);
        let k = r.gen_range(0..=d / 2);
        let p = *shape.form_degrees.choose(r).unwrap();
        let key = SectionKey::new(k, random_index(r, two_n, (d - 2 * k) as usize), random_form(r, two_n, p.min(two_n)));
        s.add_term(key, random_poly(r, two_n, shape.poly_deg, 2));
    }
    s
}

/// Random observable with ħ^0 part of q-degree at most `qdeg`, optionally an ħ^1 part.
pub fn random_observable(r: &mut impl Rng, two_n: usize, order: u32, qdeg: u32, with_hbar: bool) -> Observable {
    let mut terms = vec![(0, random_poly(r, two_n, qdeg, 3))];
    if with_hbar && r.gen_bool(0.5) {
        terms.push((1, random_poly(r, two_n, qdeg.saturating_sub(1), 2)));
    }
    Observable::from_hbar_terms(two_n, order, terms).unwrap()
}

fn c(n: i64) -> Poly {
    Poly::constant(2, GaussianRational::from_int(n))
}

/// The fixed test connections: zero, constant and degree-1 coefficients on 2n = 2 and 4.
pub fn test_connections() -> Vec<(&'static str, Connection)> {
    let q = |two_n: usize, j: usize| Poly::var(two_n, j);
    let k = |two_n: usize, n: i64, d: i64| Poly::constant(two_n, GaussianRational::ratio(n, d));
    let mut out = vec![("flat 2n=2", Connection::flat(2).unwrap()), ("flat 2n=4", Connection::flat(4).unwrap())];
    let t = ConnectionTable { two_n: 2, entries: vec![([1, 1, 1], c(1)), ([1, 2, 2], c(1))] };
    out.push(("constant 2n=2", t.validate().unwrap()));
    let t = ConnectionTable {
        two_n: 2,
        entries: vec![([1, 1, 1], q(2, 0)), ([1, 1, 2], q(2, 1)), ([2, 2, 2], &c(1) + &q(2, 0))],
    };
    out.push(("linear 2n=2", t.validate().unwrap()));
    let t = ConnectionTable {
        two_n: 4,
        entries: vec![([1, 1, 3], k(4, 1, 1)), ([2, 3, 4], k(4, 2, 1)), ([4, 4, 4], k(4, -1, 2))],
    };
    out.push(("constant 2n=4", t.validate().unwrap()));
    let t = ConnectionTable {
        two_n: 4,
        entries: vec![([1, 1, 2], q(4, 2)), ([1, 3, 3], &q(4, 0) + &k(4, 1, 2)), ([2, 4, 4], q(4, 1))],
    };
    out.push(("linear 2n=4", t.validate().unwrap()));
    out
}

/// All nondecreasing `l`-tuples over `1..=two_n` in lexicographic order.
pub fn brute_tuples(two_n: usize, l: usize) -> Vec<Vec<u16>> {
    fn go(two_n: u16, l: usize, lo: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for v in lo..=two_n {
            cur.push(v);
            go(two_n, l, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(two_n as u16, l, 1, &mut Vec::new(), &mut out);
    out
}

/// Every fiber address up to `max_deg`, sorted by degree, then ħ-power, then
/// index in lexicographic order, then real before imaginary.
pub fn brute_addresses(two_n: usize, max_deg: u32) -> Vec<FiberAddress> {
    let mut all = Vec::new();
    for d in 0..=max_deg {
        for k in 0..=d / 2 {
            for t in brute_tuples(two_n, (d - 2 * k) as usize) {
                for part in [Part::Real, Part::Imag] {
                    all.push((d, k, t.clone(), part));
                }
            }
        }
    }
    all.sort();
    all.into_iter().map(|(_, k, t, part)| FiberAddress::new(part, k, SymIndex::from_unsorted(t))).collect()
}

pub fn binom(n: u64, k: u64) -> u128 {
    let mut num = 1u128;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    num
}

fn pi(two_n: usize, a: usize, b: usize) -> i64 {
    let n = two_n / 2;
    if b == a + n && a <= n {
        1
    } else if a == b + n && b <= n {
        -1
    } else {
        0
    }
}

/// `Σ_t (iħ/2)^t/t! ω^{a₁b₁}…ω^{a_tb_t} ∂_{a₁…a_t} f ∂_{b₁…b_t} g`, through `ħ^{max_t}`,
/// expanded over all ordered index sequences.
pub fn moyal_oracle(f: &Poly, g: &Poly, two_n: usize, max_t: u32) -> BTreeMap<u32, Poly> {
    let mut out = BTreeMap::new();
    let mut fact = 1i64;
    for t in 0..=max_t {
        if t > 0 {
            fact *= t as i64;
        }
        let mut acc = Poly::zero(two_n);
        let total = (two_n as u64).pow(t);
        for code in 0..total {
            let mut seq = Vec::new();
            let mut c = code;
            for _ in 0..t {
                seq.push((c % two_n as u64) as usize + 1);
                c /= two_n as u64;
            }
            let mut sign = 1;
            let mut df = f.clone();
            let mut dg = g.clone();
            for &a in &seq {
                let b = (1..=two_n).find(|&b| pi(two_n, a, b) != 0).unwrap();
                sign *= pi(two_n, a, b);
                df = df.derivative(a - 1);
                dg = dg.derivative(b - 1);
            }
            acc.add_scaled(&(&df * &dg), &GaussianRational::from_int(sign));
        }
        // (i/2)^t / t!
        let w = GaussianRational::i_pow(t) * GaussianRational::ratio(1, fact * (1i64 << t));
        let term = acc.scale(&w);
        if !term.is_zero() {
            out.insert(t, term);
        }
    }
    out
}

/// `ω^{ij} ∂_i f ∂_j g`.
pub fn poisson(f: &Poly, g: &Poly, two_n: usize) -> Poly {
    let mut out = Poly::zero(two_n);
    for i in 1..=two_n {
        for j in 1..=two_n {
            let w = pi(two_n, i, j);
            if w != 0 {
                out.add_scaled(&(&f.derivative(i - 1) * &g.derivative(j - 1)), &GaussianRational::from_int(w));
            }
        }
    }
    out
}

fn entry(items: &[((u16, u16), i64)]) -> PatternEntry {
    items.iter().copied().collect()
}

/// Reference n = 1, l = 2 induced matrix, `(upper, lower) → coefficient`.
pub fn reference_matrix() -> Vec<Vec<PatternEntry>> {
    vec![
        vec![entry(&[((1, 1), -2)]), entry(&[((2, 1), -2)]), entry(&[])],
        vec![entry(&[((1, 2), -1)]), entry(&[((1, 1), -1), ((2, 2), -1)]), entry(&[((2, 1), -1)])],
        vec![entry(&[]), entry(&[((2, 1), -2)]), entry(&[((2, 2), -2)])],
    ]
}
