//! Index combinatorics for symmetric tensors and for the ordering of the
//! Weyl fiber as a single real sequence.
//!
//! A component `v[k,l]_{i₁…i_l}` of a Weyl algebra element is labelled by an
//! ħ-power `k` and a nondecreasing multi-index. Its degree is `2k + l`. The
//! fiber is flattened into one sequence of reals ordered by
//!
//! 1. degree,
//! 2. ħ-power within a degree,
//! 3. lexicographic order of the multi-index,
//! 4. real part before imaginary part.
//!
//! All positions and ranks are 1-based.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

pub(crate) fn check_dimension(two_n: usize) -> Result<()> {
    if two_n < 2 || two_n % 2 != 0 {
        return Err(Error::InvalidDimension(two_n));
    }
    Ok(())
}

/// Nondecreasing multi-index `i₁ ≤ … ≤ i_l` with 1-based entries.
///
/// The empty index labels the scalar component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SymIndex(Vec<u16>);

impl SymIndex {
    /// The scalar (length zero) index.
    pub fn scalar() -> Self {
        Self(Vec::new())
    }

    /// Validates monotonicity and the range `1..=two_n`.
    pub fn new(two_n: usize, entries: &[usize]) -> Result<Self> {
        let bad = |reason| Error::InvalidSymIndex { two_n, entries: entries.to_vec(), reason };
        if entries.iter().any(|&e| e == 0 || e > two_n) {
            return Err(bad("entry out of range"));
        }
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("entries must be nondecreasing"));
        }
        Ok(Self(entries.iter().map(|&e| e as u16).collect()))
    }

    /// Sorts arbitrary 1-based entries into canonical order.
    pub fn from_unsorted(mut entries: Vec<u16>) -> Self {
        entries.sort_unstable();
        Self(entries)
    }

    /// Index whose multiplicity of `j` is `exps[j-1]`.
    pub fn from_exponents(exps: &[u16]) -> Self {
        let mut v = Vec::with_capacity(exps.iter().map(|&e| e as usize).sum());
        for (j, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                v.push(j as u16 + 1);
            }
        }
        Self(v)
    }

    /// Multiplicity vector of length `two_n`.
    pub fn exponents(&self, two_n: usize) -> Vec<u16> {
        let mut e = vec![0u16; two_n];
        for &i in &self.0 {
            e[i as usize - 1] += 1;
        }
        e
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u16] {
        &self.0
    }

    pub fn max_entry(&self) -> usize {
        self.0.last().map_or(0, |&e| e as usize)
    }

    /// Index with `j` inserted at its sorted position.
    pub fn with(&self, j: u16) -> Self {
        let mut v = self.0.clone();
        let at = v.partition_point(|&e| e <= j);
        v.insert(at, j);
        Self(v)
    }

    /// Index with one occurrence of `j` removed, if present.
    pub fn without(&self, j: u16) -> Option<Self> {
        let at = self.0.iter().position(|&e| e == j)?;
        let mut v = self.0.clone();
        v.remove(at);
        Some(Self(v))
    }

    /// Multiset union.
    pub fn merge(&self, other: &SymIndex) -> Self {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Self(v)
    }
}

impl fmt::Display for SymIndex {
    /// `()` for the scalar index, `(1,2,2)` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, e) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Number of nondecreasing `l`-tuples over `1..=two_n`: `(2n+l−1)! / ((2n−1)! l!)`.
pub fn sym_dim(two_n: usize, l: usize) -> BigUint {
    binomial((two_n + l - 1) as u64, l as u64)
}

/// 1-based position of `idx` among nondecreasing tuples of its length in lexicographic order.
///
/// `C(2n+l−1, l) − Σ_{s=1}^{l} C(2n+s−i_{l−s+1}−1, s)`.
pub fn sym_rank(two_n: usize, idx: &SymIndex) -> Result<BigUint> {
    check_dimension(two_n)?;
    if idx.max_entry() > two_n || idx.0.contains(&0) || idx.0.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSymIndex {
            two_n,
            entries: idx.0.iter().map(|&e| e as usize).collect(),
            reason: "not a valid nondecreasing index",
        });
    }
    let l = idx.len();
    let mut rank = sym_dim(two_n, l);
    for s in 1..=l {
        let i = idx.0[l - s] as usize;
        rank -= binomial((two_n + s - i - 1) as u64, s as u64);
    }
    Ok(rank)
}

/// Inverse of [`sym_rank`] by greedy choice of each entry.
pub fn sym_unrank(two_n: usize, l: usize, rank: &BigUint) -> Result<SymIndex> {
    check_dimension(two_n)?;
    let max = sym_dim(two_n, l);
    if rank.is_zero() || rank > &max {
        return Err(Error::RankOutOfRange { rank: rank.to_string(), max: max.to_string() });
    }
    let mut remaining = rank.clone();
    let mut out = Vec::with_capacity(l);
    let mut lo = 1usize;
    for pos in 0..l {
        let tail = (l - pos - 1) as u64;
        let mut c = lo;
        loop {
            // completions of the tail with every entry >= c
            let count = binomial((two_n - c) as u64 + tail, tail);
            if remaining <= count {
                break;
            }
            remaining -= count;
            c += 1;
        }
        out.push(c as u16);
        lo = c;
    }
    Ok(SymIndex(out))
}

/// Real or imaginary part of a fiber component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Real,
    Imag,
}

/// Labels one real coordinate `Re/Im(v[k,l]_{i₁…i_l})` of the fiber.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiberAddress {
    pub part: Part,
    pub k: u32,
    pub index: SymIndex,
}

impl FiberAddress {
    pub fn new(part: Part, k: u32, index: SymIndex) -> Self {
        Self { part, k, index }
    }

    pub fn degree(&self) -> u32 {
        2 * self.k + self.index.len() as u32
    }
}

/// Number of complex components of degree `d`: `Σ_{g=0}^{⌊d/2⌋} C(2n+d−2g−1, d−2g)`.
pub fn degree_block_size(two_n: usize, d: u32) -> BigUint {
    (0..=d / 2).map(|g| sym_dim(two_n, (d - 2 * g) as usize)).sum()
}

fn blocks_below(two_n: usize, d: u32) -> BigUint {
    (0..d).map(|c| degree_block_size(two_n, c)).sum()
}

/// 1-based position of an address in the flattened fiber sequence.
pub fn fiber_position(two_n: usize, addr: &FiberAddress) -> Result<BigUint> {
    let p1 = sym_rank(two_n, &addr.index)?;
    let d = addr.degree();
    let p2: BigUint =
        (0..addr.k).map(|g| sym_dim(two_n, (d - 2 * g) as usize)).sum::<BigUint>() + p1;
    let p3 = p2 + blocks_below(two_n, d);
    let twice = p3 * 2u32;
    Ok(match addr.part {
        Part::Real => twice - 1u32,
        Part::Imag => twice,
    })
}

/// Inverse of [`fiber_position`].
pub fn fiber_unposition(two_n: usize, p: &BigUint) -> Result<FiberAddress> {
    check_dimension(two_n)?;
    if p.is_zero() {
        return Err(Error::RankOutOfRange { rank: "0".into(), max: "unbounded".into() });
    }
    let part = if (p % 2u32).is_one() { Part::Real } else { Part::Imag };
    let mut p3 = (p + 1u32) / 2u32;
    let mut d = 0u32;
    loop {
        let block = degree_block_size(two_n, d);
        if p3 <= block {
            break;
        }
        p3 -= block;
        d += 1;
    }
    let mut k = 0u32;
    loop {
        let l = (d - 2 * k) as usize;
        let size = sym_dim(two_n, l);
        if p3 <= size {
            return Ok(FiberAddress { part, k, index: sym_unrank(two_n, l, &p3)? });
        }
        p3 -= size;
        k += 1;
    }
}

/// Convenience for small ranks and positions.
pub fn to_u64(n: &BigUint) -> u64 {
    n.to_u64().expect("value exceeds u64")
}
