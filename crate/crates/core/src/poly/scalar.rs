use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Coefficient field of a [`Polynomial`](super::Polynomial).
///
/// Two implementations exist: [`Rational`] and [`GaussianRational`]. Mixing the
/// two is a type error, so a polynomial never changes scalar mode silently.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Eq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_rational(r: Rational) -> Self;

    /// Exact inverse, `None` for zero.
    fn checked_inv(&self) -> Option<Self>;

    /// The imaginary unit, if the field has one.
    fn imaginary_unit() -> Option<Self>;

    fn to_c64(&self) -> Complex64;

    /// Sign used when printing: a term with a "negative" coefficient is
    /// written as ` - <magnitude>`.
    fn is_negative(&self) -> bool;

    /// Text of the coefficient, and whether it needs parentheses when
    /// followed by `*monomial`.
    fn render(&self) -> (String, bool);

    fn from_i64(v: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(v)))
    }
}

pub(crate) fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    // BigRational::to_f64 handles huge numerators/denominators gracefully.
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Coeff for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn imaginary_unit() -> Option<Self> {
        None
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn render(&self) -> (String, bool) {
        (render_rational(self), false)
    }
}

/// Exact complex scalar `re + im*i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Self::new(re, im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Coeff for GaussianRational {
    fn from_rational(r: Rational) -> Self {
        Self::new(r, Rational::zero())
    }

    fn checked_inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &norm, -(&self.im / &norm)))
    }

    fn imaginary_unit() -> Option<Self> {
        Some(Self::i())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(&self.re) || (self.re.is_zero() && Signed::is_negative(&self.im))
    }

    fn render(&self) -> (String, bool) {
        let imag = |im: &Rational| {
            if im.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", render_rational(im))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => (render_rational(&self.re), false),
            (true, false) => (imag(&self.im), false),
            (false, false) => {
                let text = if Signed::is_negative(&self.im) {
                    format!("{} - {}", render_rational(&self.re), imag(&-self.im.clone()))
                } else {
                    format!("{} + {}", render_rational(&self.re), imag(&self.im))
                };
                (text, true)
            }
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (text, paren) = self.render();
        if paren {
            write!(f, "({text})")
        } else {
            f.write_str(&text)
        }
    }
}

/// Shorthand for `num/den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
