//! The additive character `chi(x) = exp(2 pi i {x})` and exact norm exponents.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use super::rational::{self, Rational};
use super::scalar::PadicScalar;
use crate::error::{Error, Result};

/// A root of unity `exp(2 pi i e)` with `e` in `[0, 1)` having p-power denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitRootExponent {
    p: u32,
    e: Rational,
}

impl UnitRootExponent {
    pub fn new(p: u32, e: Rational) -> Result<Self> {
        let (_, cof) = rational::split_p(e.denom(), p);
        if !cof.is_one() {
            return Err(Error::InvalidArgument(format!(
                "exponent {} has a denominator that is not a power of {p}",
                rational::format_rational(&e)
            )));
        }
        let e = &e - e.floor();
        Ok(UnitRootExponent { p, e })
    }

    pub fn one(p: u32) -> Self {
        UnitRootExponent { p, e: Rational::zero() }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn exponent(&self) -> &Rational {
        &self.e
    }

    /// Multiplicative order `p^a` (the reduced denominator).
    pub fn order_exponent(&self) -> u32 {
        rational::split_p(self.e.denom(), self.p).0 as u32
    }

    /// Product of roots of unity.
    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.p, &self.e + &other.e).expect("closed under addition")
    }

    pub fn conj(&self) -> Self {
        Self::new(self.p, -self.e.clone()).expect("closed under negation")
    }

    pub fn pow(&self, k: i64) -> Self {
        Self::new(self.p, &self.e * rational::int(k)).expect("closed under scaling")
    }

    pub fn is_one(&self) -> bool {
        self.e.is_zero()
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let t = self.e.to_f64().unwrap() * std::f64::consts::TAU;
        num_complex::Complex64::new(t.cos(), t.sin())
    }
}

impl fmt::Display for UnitRootExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format_rational(&self.e))
    }
}

/// `chi(x)` for a truncated p-adic scalar.
pub fn character(x: &PadicScalar) -> UnitRootExponent {
    UnitRootExponent { p: x.prime(), e: x.fractional_part() }
}

/// `chi(r)` for a rational, read p-adically.
pub fn character_of_rational(p: u32, r: &Rational) -> UnitRootExponent {
    UnitRootExponent { p, e: rational::fractional_part(r, p) }
}

/// A norm value `p^(-e)`; `Infinite` encodes the norm of zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormExponent {
    Finite(Rational),
    Infinite,
}

impl NormExponent {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            NormExponent::Finite(e) => Some(e),
            NormExponent::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, NormExponent::Infinite)
    }

    /// The real norm `p^(-e)` as a float.
    pub fn norm_f64(&self, p: u32) -> f64 {
        match self {
            NormExponent::Infinite => 0.0,
            NormExponent::Finite(e) => (p as f64).powf(-e.to_f64().unwrap()),
        }
    }

    pub fn shift(&self, by: &Rational) -> Self {
        match self {
            NormExponent::Finite(e) => NormExponent::Finite(e + by),
            NormExponent::Infinite => NormExponent::Infinite,
        }
    }
}

impl PartialOrd for NormExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by exponent, so a *larger* exponent is a *smaller* norm.
impl Ord for NormExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormExponent::Infinite, NormExponent::Infinite) => Ordering::Equal,
            (NormExponent::Infinite, _) => Ordering::Greater,
            (_, NormExponent::Infinite) => Ordering::Less,
            (NormExponent::Finite(a), NormExponent::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExponent::Infinite => f.write_str("inf"),
            NormExponent::Finite(e) => f.write_str(&rational::format_rational(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{int, rat};

    #[test]
    fn characters() {
        let x = PadicScalar::from_rational(2, &int(5), 8).unwrap();
        assert!(character(&x).is_one());
        let h = PadicScalar::from_rational(2, &rat(1, 2), 8).unwrap();
        assert_eq!(character(&h).exponent(), &rat(1, 2));
        let t = PadicScalar::from_rational(2, &rat(3, 4), 8).unwrap();
        let c = character(&t);
        assert_eq!(c.exponent(), &rat(3, 4));
        let z = c.to_complex();
        assert!((z.re - 0.0).abs() < 1e-12 && (z.im + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponents_reduce_mod_one() {
        let e = UnitRootExponent::new(3, rat(10, 9)).unwrap();
        assert_eq!(e.exponent(), &rat(1, 9));
        assert_eq!(e.order_exponent(), 2);
        assert!(UnitRootExponent::new(2, rat(1, 3)).is_err());
        assert!(e.pow(9).is_one());
    }

    #[test]
    fn norm_ordering() {
        let a = NormExponent::Finite(rat(1, 2));
        let b = NormExponent::Finite(int(-1));
        assert!(b < a && a < NormExponent::Infinite);
        assert_eq!(NormExponent::Infinite.norm_f64(2), 0.0);
    }
}
