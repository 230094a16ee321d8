//! Gaussian rationals: exact complex numbers `a + bi` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

pub use crate::rational::Rational;

/// Builds the rational `num/den`.
///
/// Panics when `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::ratio(num, den)
}

/// Complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    /// `num/den` as a real Gaussian rational.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_real(rat(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    /// `i^t`.
    pub fn i_pow(t: u32) -> Self {
        match t % 4 {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `|re| + |im|`, the ℓ¹ modulus. Stays inside ℚ, unlike the Euclidean one.
    pub fn l1_norm(&self) -> Rational {
        self.re.abs() + self.im.abs()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, r: &Rational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self { re: Rational::one(), im: Rational::zero() }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::from_real(r)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: radd(&self.re, &o.re), im: radd(&self.im, &o.im) }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        // coefficients are overwhelmingly purely real or purely imaginary
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => GaussianRational { re: rmul(&self.re, &o.re), im: Rational::zero() },
            (true, false) => GaussianRational { re: rmul(&self.re, &o.re), im: rmul(&self.re, &o.im) },
            (false, true) => GaussianRational { re: rmul(&self.re, &o.re), im: rmul(&self.im, &o.re) },
            (false, false) => GaussianRational {
                re: rmul(&self.re, &o.re) - rmul(&self.im, &o.im),
                im: rmul(&self.re, &o.im) + rmul(&self.im, &o.re),
            },
        }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: GaussianRational) -> GaussianRational {
        &self + &o
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: GaussianRational) -> GaussianRational {
        &self - &o
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: GaussianRational) -> GaussianRational {
        &self * &o
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero.
    fn div(self, o: GaussianRational) -> GaussianRational {
        &self * &o.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        if !o.re.is_zero() {
            self.re += &o.re;
        }
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        if !o.re.is_zero() {
            self.re -= &o.re;
        }
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &GaussianRational) {
        *self = &*self * o;
    }
}

fn radd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        b.clone()
    } else if b.is_zero() {
        a.clone()
    } else {
        a + b
    }
}

fn rmul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        Rational::zero()
    } else if a.is_one() {
        b.clone()
    } else if b.is_one() {
        a.clone()
    } else {
        a * b
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// How a coefficient is rendered in front of a monomial.
pub(crate) enum CoeffShape {
    /// The coefficient is `±1`; only the sign is printed.
    Unit,
    /// A bare token such as `3/2`, `(1/2)i` or `(1+2i)`.
    Token(String),
}

impl GaussianRational {
    /// Splits off a leading sign so sums print as `a - b` instead of `a + -b`.
    /// Returns `(negative, shape)`.
    pub(crate) fn signed_shape(&self) -> (bool, CoeffShape) {
        if self.im.is_zero() {
            let neg = self.re.is_negative();
            let a = self.re.abs();
            if a.is_one() {
                return (neg, CoeffShape::Unit);
            }
            return (neg, CoeffShape::Token(fmt_rational(&a)));
        }
        if self.re.is_zero() {
            let neg = self.im.is_negative();
            let b = self.im.abs();
            let tok = if b.is_one() {
                "i".to_string()
            } else if b.is_integer() {
                format!("{}i", fmt_rational(&b))
            } else {
                format!("({})i", fmt_rational(&b))
            };
            return (neg, CoeffShape::Token(tok));
        }
        (false, CoeffShape::Token(format!("({self})")))
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical `a+bi` form, e.g. `3/2`, `-i`, `1/2-3i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let b = self.im.abs();
        let bpart = if b.is_one() { "i".to_string() } else { format!("{}i", fmt_rational(&b)) };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{bpart}")
            } else {
                write!(f, "{bpart}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", fmt_rational(&self.re), sign, bpart)
        }
    }
}
