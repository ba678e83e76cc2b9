use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::{rpow, Rational};

/// An element `a + b·√6` of the real quadratic field `Q(√6)`.
///
/// Every bound in the small-`t0` analysis is a product of rationals and
/// powers of `√(27/8) = (3/4)√6`, so this field holds all of them and
/// orders them exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt6 {
    a: Rational,
    b: Rational,
}

impl QSqrt6 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt6 { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        QSqrt6 {
            a,
            b: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn sqrt6() -> Self {
        QSqrt6::new(Rational::zero(), Rational::one())
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    /// The value as a rational, when the `√6` part vanishes.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign. Mixed signs are settled by comparing `a²` with `6b²`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * Rational::from_integer(6.into());
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// `r^(k/2)`, given `root = √r` as an element of the field.
    pub fn half_pow(r: &Rational, root: &QSqrt6, k: i64) -> QSqrt6 {
        let q = k.div_euclid(2);
        let base = QSqrt6::from_rational(rpow(r, q));
        if k.rem_euclid(2) == 0 {
            base
        } else {
            base * root
        }
    }

    /// `(27/8)^(k/2)`.
    pub fn pow_27_8_half(k: i64) -> QSqrt6 {
        let root = QSqrt6::new(Rational::zero(), super::rat(3, 4));
        Self::half_pow(&super::rat(27, 8), &root, k)
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 6f64.sqrt()
    }
}

impl From<Rational> for QSqrt6 {
    fn from(r: Rational) -> Self {
        QSqrt6::from_rational(r)
    }
}

impl PartialOrd for QSqrt6 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt6 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl Add<&QSqrt6> for &QSqrt6 {
    type Output = QSqrt6;
    fn add(self, o: &QSqrt6) -> QSqrt6 {
        QSqrt6::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl Add for QSqrt6 {
    type Output = QSqrt6;
    fn add(self, o: QSqrt6) -> QSqrt6 {
        &self + &o
    }
}

impl Sub<&QSqrt6> for &QSqrt6 {
    type Output = QSqrt6;
    fn sub(self, o: &QSqrt6) -> QSqrt6 {
        QSqrt6::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl Neg for QSqrt6 {
    type Output = QSqrt6;
    fn neg(self) -> QSqrt6 {
        QSqrt6::new(-self.a, -self.b)
    }
}

impl Mul<&QSqrt6> for &QSqrt6 {
    type Output = QSqrt6;
    fn mul(self, o: &QSqrt6) -> QSqrt6 {
        let six = Rational::from_integer(6.into());
        QSqrt6::new(
            &self.a * &o.a + &self.b * &o.b * six,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

impl Mul<&QSqrt6> for QSqrt6 {
    type Output = QSqrt6;
    fn mul(self, o: &QSqrt6) -> QSqrt6 {
        &self * o
    }
}

impl Mul for QSqrt6 {
    type Output = QSqrt6;
    fn mul(self, o: QSqrt6) -> QSqrt6 {
        &self * &o
    }
}

impl Mul<&Rational> for QSqrt6 {
    type Output = QSqrt6;
    fn mul(self, r: &Rational) -> QSqrt6 {
        QSqrt6::new(self.a * r, self.b * r)
    }
}

impl fmt::Display for QSqrt6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt(6)", self.b);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}*sqrt(6)", self.a, sign, self.b.abs())
    }
}

impl Serialize for QSqrt6 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rat;

    #[test]
    fn sqrt_27_8_squares_back() {
        let r = QSqrt6::pow_27_8_half(1);
        assert_eq!(&r * &r, QSqrt6::from_rational(rat(27, 8)));
        let inv = QSqrt6::pow_27_8_half(-1);
        assert_eq!(&r * &inv, QSqrt6::one());
        assert_eq!(inv, QSqrt6::new(rat(0, 1), rat(2, 9)));
    }

    #[test]
    fn ordering_with_mixed_signs() {
        // 5 - 2√6 ≈ 0.101 and 2√6 - 5 is its negation.
        let x = QSqrt6::new(rat(5, 1), rat(-2, 1));
        assert_eq!(x.signum(), Ordering::Greater);
        assert_eq!(x.clone().neg().signum(), Ordering::Less);
        // 2.449 < √6 < 2.450
        assert!(QSqrt6::from_rational(rat(2449, 1000)) < QSqrt6::sqrt6());
        assert!(QSqrt6::from_rational(rat(2450, 1000)) > QSqrt6::sqrt6());
    }

    #[test]
    fn display_forms() {
        assert_eq!(QSqrt6::from_rational(rat(27, 8)).to_string(), "27/8");
        assert_eq!(
            QSqrt6::new(rat(1, 1), rat(-3, 4)).to_string(),
            "1 - 3/4*sqrt(6)"
        );
    }
}
