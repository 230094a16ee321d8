mod common;

use common::{coeff, random_homogeneous, random_weyl, rng};
use fedosov_core::grading::{fiber_position, fiber_unposition, FiberAddress, Part, SymIndex};
use fedosov_core::par::Exec;
use fedosov_core::weyl::WeylElement;
use fedosov_core::{GaussianRational, Rational};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

/// Applies `X^i ↦ Σ_j s[i][j] X^j` to every fiber monomial.
fn substitute(u: &WeylElement, s: &[Vec<i64>]) -> WeylElement {
    let two_n = u.two_n();
    let order = u.order();
    let images: Vec<WeylElement> = (0..two_n)
        .map(|i| {
            WeylElement::from_terms(
                two_n,
                order,
                (0..two_n).filter(|&j| s[i][j] != 0).map(|j| {
                    (0, SymIndex::new(two_n, &[j + 1]).unwrap(), GaussianRational::from_int(s[i][j]))
                }),
            )
            .unwrap()
        })
        .collect();
    let mut out = WeylElement::zero(two_n, order).unwrap();
    for t in u.terms() {
        let mut m = WeylElement::from_terms(two_n, order, [(t.k, SymIndex::scalar(), t.coeff.clone())]).unwrap();
        for &e in t.xidx.entries() {
            m = m.symmetric_product(&images[e as usize - 1]).unwrap();
        }
        out = out.add(&m).unwrap();
    }
    out
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// A product of block shears `[[I,B],[0,I]]` and `[[I,0],[C,I]]` with symmetric `B`, `C`.
fn random_symplectic(r: &mut impl Rng, two_n: usize) -> Vec<Vec<i64>> {
    let n = two_n / 2;
    let mut s: Vec<Vec<i64>> = (0..two_n).map(|i| (0..two_n).map(|j| (i == j) as i64).collect()).collect();
    for step in 0..3 {
        let mut g: Vec<Vec<i64>> = (0..two_n).map(|i| (0..two_n).map(|j| (i == j) as i64).collect()).collect();
        for a in 0..n {
            for b in a..n {
                let v = r.gen_range(-2..=2);
                if step % 2 == 0 {
                    g[a][n + b] = v;
                    g[b][n + a] = v;
                } else {
                    g[n + a][b] = v;
                    g[n + b][a] = v;
                }
            }
        }
        s = matmul(&s, &g);
    }
    s
}

fn is_symplectic(s: &[Vec<i64>]) -> bool {
    let two_n = s.len();
    let n = two_n / 2;
    let j = |a: usize, b: usize| -> i64 {
        if b == a + n {
            1
        } else if a == b + n {
            -1
        } else {
            0
        }
    };
    (0..two_n).all(|a| {
        (0..two_n).all(|b| {
            let v: i64 = (0..two_n).map(|p| (0..two_n).map(|q| s[a][p] * j(p, q) * s[b][q]).sum::<i64>()).sum();
            v == j(a, b)
        })
    })
}

fn coordinate(u: &WeylElement, addr: &FiberAddress) -> Rational {
    let c = u.coeff(addr.k, &addr.index);
    match addr.part {
        Part::Real => c.re,
        Part::Imag => c.im,
    }
}

#[test]
fn small_products() {
    let x1 = WeylElement::x(2, 4, 1).unwrap();
    let x2 = WeylElement::x(2, 4, 2).unwrap();
    let p = x1.circ(&x2).unwrap();
    let expected = WeylElement::from_terms(
        2,
        4,
        [(0, SymIndex::new(2, &[1, 2]).unwrap(), GaussianRational::one()), (1, SymIndex::scalar(), GaussianRational::ratio(1, 2) * GaussianRational::i())],
    )
    .unwrap();
    assert_eq!(p, expected);
    assert_eq!(x1.commutator(&x2).unwrap(), WeylElement::from_terms(2, 4, [(1, SymIndex::scalar(), GaussianRational::i())]).unwrap());
    assert_eq!(x1.circ(&x1).unwrap(), WeylElement::from_terms(2, 4, [(0, SymIndex::new(2, &[1, 1]).unwrap(), GaussianRational::one())]).unwrap());
}

#[test]
fn parallel_and_sequential_agree() {
    let mut r = rng(7);
    let u = random_weyl(&mut r, 4, 10, 5, 40);
    let v = random_weyl(&mut r, 4, 10, 5, 40);
    assert_eq!(u.circ_with(&v, Exec::Sequential).unwrap(), u.circ_with(&v, Exec::Parallel).unwrap());
}

#[test]
fn shears_are_symplectic() {
    let mut r = rng(3);
    for two_n in [2, 4, 6] {
        assert!(is_symplectic(&random_symplectic(&mut r, two_n)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn circ_is_associative(seed in seeds()) {
        let mut r = rng(seed);
        let two_n = if r.gen_bool(0.5) { 2 } else { 4 };
        let u = random_weyl(&mut r, two_n, 8, 4, 4);
        let v = random_weyl(&mut r, two_n, 8, 4, 4);
        let w = random_weyl(&mut r, two_n, 8, 4, 4);
        prop_assert_eq!(u.circ(&v).unwrap().circ(&w).unwrap(), u.circ(&v.circ(&w).unwrap()).unwrap());
    }

    #[test]
    fn degree_is_additive(seed in seeds()) {
        let mut r = rng(seed);
        let two_n = if r.gen_bool(0.5) { 2 } else { 4 };
        let du = r.gen_range(0..=4);
        let dv = r.gen_range(0..=4);
        let u = random_homogeneous(&mut r, two_n, 8, du, 4);
        let v = random_homogeneous(&mut r, two_n, 8, dv, 4);
        for t in u.circ(&v).unwrap().terms() {
            prop_assert_eq!(t.degree(), du + dv);
        }
    }

    #[test]
    fn unit_bilinearity(seed in seeds()) {
        let mut r = rng(seed);
        let u = random_weyl(&mut r, 4, 6, 4, 5);
        let v = random_weyl(&mut r, 4, 6, 4, 5);
        let w = random_weyl(&mut r, 4, 6, 4, 5);
        let c = coeff(&mut r);
        let one = WeylElement::one(4, 6).unwrap();
        prop_assert_eq!(one.circ(&u).unwrap(), u.clone());
        prop_assert_eq!(u.circ(&one).unwrap(), u.clone());
        let lhs = u.scale(&c).add(&v).unwrap().circ(&w).unwrap();
        let rhs = u.circ(&w).unwrap().scale(&c).add(&v.circ(&w).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(u.commutator(&u).unwrap().is_zero());
        prop_assert!(one.commutator(&v).unwrap().is_zero());
    }

    #[test]
    fn linear_symplectomorphisms_commute_with_circ(seed in seeds()) {
        let mut r = rng(seed);
        let two_n = if r.gen_bool(0.5) { 2 } else { 4 };
        let s = random_symplectic(&mut r, two_n);
        let u = random_weyl(&mut r, two_n, 6, 3, 4);
        let v = random_weyl(&mut r, two_n, 6, 3, 4);
        let lhs = substitute(&u.circ(&v).unwrap(), &s);
        let rhs = substitute(&u, &s).circ(&substitute(&v, &s)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn metric_axioms(seed in seeds()) {
        let mut r = rng(seed);
        let u = random_weyl(&mut r, 2, 6, 6, 5);
        let v = random_weyl(&mut r, 2, 6, 6, 5);
        let w = random_weyl(&mut r, 2, 6, 6, 5);
        let one = Rational::from_integer(1.into());
        prop_assert!(u.distance(&u).unwrap().is_zero());
        prop_assert_eq!(u.distance(&v).unwrap(), v.distance(&u).unwrap());
        prop_assert!(u.distance(&w).unwrap() <= u.distance(&v).unwrap() + v.distance(&w).unwrap());
        prop_assert!(u.distance(&v).unwrap() < one);
        if u != v {
            prop_assert!(!u.distance(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn product_coordinates_depend_only_on_lower_degrees(seed in seeds(), p in 1u64..120) {
        let mut r = rng(seed);
        let u = random_weyl(&mut r, 2, 8, 8, 8);
        let b = random_weyl(&mut r, 2, 8, 4, 4);
        let addr = fiber_unposition(2, &BigUint::from(p)).unwrap();
        let low = WeylElement::from_terms(2, 8, u.terms().filter(|t| t.degree() <= addr.degree()).map(|t| (t.k, t.xidx, t.coeff))).unwrap();
        prop_assert_eq!(coordinate(&u.circ(&b).unwrap(), &addr), coordinate(&low.circ(&b).unwrap(), &addr));
        prop_assert_eq!(fiber_position(2, &addr).unwrap(), BigUint::from(p));
    }
}
