//! Exact rationals with an inline fast path.
//!
//! Coefficients met in practice are small, and `BigRational` pays for a heap
//! allocation and a multiword gcd on every operation. Values whose reduced
//! numerator and denominator fit in `i64` are kept inline and combined in
//! `i128`; anything larger falls back to `BigRational`. The representation is
//! canonical (inline whenever it fits), so derived equality and hashing are
//! value equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    /// Reduced, `den > 0`.
    Small { num: i64, den: i64 },
    /// Reduced and too large for `Small`.
    Big(BigRational),
}

impl Rational {
    /// `num/den`, reduced. Panics when `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Self::from_big(BigRational::new(num, den))
    }

    pub fn from_integer(n: BigInt) -> Self {
        match n.to_i64() {
            Some(num) => Rational::Small { num, den: 1 },
            None => Rational::Big(BigRational::from_integer(n)),
        }
    }

    /// `num/den` from machine integers. Panics when `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Rational::Small { num, den },
            _ => Rational::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) => Rational::Small { num, den },
            _ => Rational::Big(r),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Rational::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small { num, .. } => BigInt::from(*num),
            Rational::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small { den, .. } => BigInt::from(*den),
            Rational::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rational::Small { den, .. } => *den == 1,
            Rational::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rational::Small { num, .. } => *num < 0,
            Rational::Big(r) => r.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Rational::Small { num, den } => Self::from_i128(*den as i128, *num as i128),
            Rational::Big(r) => Self::from_big(r.recip()),
        }
    }

    fn add_ref(&self, o: &Self) -> Self {
        match (self, o) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                if b == d {
                    Self::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Self::from_i128(*a as i128 * *d as i128 + *c as i128 * *b as i128, *b as i128 * *d as i128)
                }
            }
            _ => Self::from_big(self.to_big() + o.to_big()),
        }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        match (self, o) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                Self::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Self::from_big(self.to_big() * o.to_big()),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::Small { num: n, den: 1 }
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Self::from_big(r)
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::Small { num: 0, den: 1 }
    }
    fn is_zero(&self) -> bool {
        matches!(self, Rational::Small { num: 0, .. })
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::Small { num: 1, den: 1 }
    }
    fn is_one(&self) -> bool {
        matches!(self, Rational::Small { num: 1, den: 1 })
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        match (self, o) {
            (Rational::Small { num: a, den: b }, Rational::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self {
            // -i64::MIN does not fit
            Rational::Small { num, den } => Rational::from_i128(-(*num as i128), *den as i128),
            Rational::Big(r) => Rational::from_big(-r),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $atr:ident, $af:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $f(self, o: &Rational) -> Rational {
                let ($a, $b) = (self, o);
                $body
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $f(self, o: Rational) -> Rational {
                self.$f(&o)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $f(self, o: &Rational) -> Rational {
                (&self).$f(o)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $f(self, o: Rational) -> Rational {
                (&self).$f(&o)
            }
        }
        impl $atr<&Rational> for Rational {
            fn $af(&mut self, o: &Rational) {
                *self = (&*self).$f(o);
            }
        }
        impl $atr<Rational> for Rational {
            fn $af(&mut self, o: Rational) {
                *self = (&*self).$f(&o);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, |a, b| a.add_ref(b));
binop!(Sub, sub, SubAssign, sub_assign, |a, b| a.add_ref(&-b));
binop!(Mul, mul, MulAssign, mul_assign, |a, b| a.mul_ref(b));
binop!(Div, div, DivAssign, div_assign, |a, b| {
    assert!(!b.is_zero(), "division by zero rational");
    a.mul_ref(&b.recip())
});

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small { num, den: 1 } => write!(f, "{num}"),
            Rational::Small { num, den } => write!(f, "{num}/{den}"),
            Rational::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn agrees_with_big_rationals_across_the_overflow_boundary() {
        let samples = [
            (0, 1),
            (1, 1),
            (-3, 4),
            (7, -6),
            (i64::MAX, 1),
            (i64::MIN, 1),
            (1, i64::MAX),
            (i64::MAX - 1, i64::MAX),
            (-(1 << 40), 3),
            (5, 1 << 50),
        ];
        for &(a, b) in &samples {
            for &(c, d) in &samples {
                let (x, y) = (Rational::ratio(a, b), Rational::ratio(c, d));
                let (bx, by) = (big(a, b), big(c, d));
                assert_eq!((&x + &y).to_big(), &bx + &by);
                assert_eq!((&x - &y).to_big(), &bx - &by);
                assert_eq!((&x * &y).to_big(), &bx * &by);
                if !by.is_zero() {
                    assert_eq!((&x / &y).to_big(), &bx / &by);
                }
                assert_eq!(x.cmp(&y), bx.cmp(&by));
                assert_eq!(Rational::from(bx.clone()), x);
            }
        }
    }

    #[test]
    fn canonical_after_shrinking() {
        let huge = Rational::ratio(i64::MAX, 1) * Rational::ratio(4, 1);
        assert!(matches!(huge, Rational::Big(_)));
        let back = &huge / &Rational::ratio(4, 1);
        assert_eq!(back, Rational::ratio(i64::MAX, 1));
        assert!(matches!(back, Rational::Small { .. }));
        assert_eq!(-Rational::ratio(i64::MIN, 1), Rational::from_integer(-BigInt::from(i64::MIN)));
        assert_eq!(Rational::ratio(6, -4).to_string(), "-3/2");
    }
}
