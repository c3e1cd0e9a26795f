//! Truncated p-adic scalars with tracked absolute precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::rational::{self, pow_p, pow_p_int, split_p, Rational};
use crate::error::{Error, Result};

/// Default absolute precision (digits known modulo `p^N`).
pub const DEFAULT_PRECISION: i64 = 32;

/// An element of `Q_p` known modulo `p^N`.
///
/// Stored as `p^v * u` with `u` a unit residue in `[0, p^(N - v))`. The zero
/// flag (`v = None`) means "zero modulo `p^N`".
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    p: u32,
    valuation: Option<i64>,
    unit: BigInt,
    precision: i64,
}

impl PadicScalar {
    pub fn zero(p: u32, precision: i64) -> Self {
        PadicScalar { p, valuation: None, unit: BigInt::zero(), precision }
    }

    pub fn one(p: u32, precision: i64) -> Self {
        Self::from_int(p, 1, precision)
    }

    pub fn from_int(p: u32, n: i64, precision: i64) -> Self {
        Self::from_rational(p, &Rational::from_integer(BigInt::from(n)), precision)
            .expect("integers are p-integral")
    }

    /// Build from `p^shift * n` where `n` is any integer; normalizes the unit part.
    fn from_shifted(p: u32, shift: i64, n: BigInt, precision: i64) -> Self {
        if shift >= precision {
            return Self::zero(p, precision);
        }
        let modulus = pow_p_int(p, (precision - shift) as u32);
        let n = n.mod_floor(&modulus);
        if n.is_zero() {
            return Self::zero(p, precision);
        }
        let (extra, unit) = split_p(&n, p);
        PadicScalar { p, valuation: Some(shift + extra), unit, precision }
    }

    /// The expansion of a rational with denominator of any form (units are
    /// inverted modulo `p^N`).
    pub fn from_rational(p: u32, r: &Rational, precision: i64) -> Result<Self> {
        rational::check_prime(p)?;
        let Some(v) = rational::valuation(r, p) else {
            return Ok(Self::zero(p, precision));
        };
        if v >= precision {
            return Ok(Self::zero(p, precision));
        }
        let unit_part = r * pow_p(p, -v);
        let k = (precision - v) as u32;
        let res = rational::residue_mod_pk(&unit_part, p, k).expect("unit part is p-integral");
        Ok(PadicScalar { p, valuation: Some(v), unit: res, precision })
    }

    /// Digits `d_v, d_{v+1}, ...` (lowest first) starting at valuation `v`.
    pub fn from_digits(p: u32, start: i64, digits: &[u32], precision: i64) -> Result<Self> {
        rational::check_prime(p)?;
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::Parse(format!("digit {d} out of range for p = {p}")));
        }
        let mut n = BigInt::zero();
        for &d in digits.iter().rev() {
            n = n * p + d;
        }
        Ok(Self::from_shifted(p, start, n, precision))
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// `None` encodes `+inf`.
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    /// Digits from index `v` up to `N - 1`, lowest first.
    pub fn digits(&self) -> Vec<u32> {
        let Some(v) = self.valuation else { return Vec::new() };
        let mut out = Vec::with_capacity((self.precision - v) as usize);
        let mut n = self.unit.clone();
        let pb = BigInt::from(self.p);
        for _ in v..self.precision {
            let (q, r) = n.div_rem(&pb);
            out.push(r.to_u32().unwrap());
            n = q;
        }
        out
    }

    /// Digit at index `i` (zero below the valuation, `None` at or above precision).
    pub fn digit(&self, i: i64) -> Option<u32> {
        if i >= self.precision {
            return None;
        }
        match self.valuation {
            Some(v) if i >= v => Some(self.digits()[(i - v) as usize]),
            _ => Some(0),
        }
    }

    /// The rational `sum_{v <= i < N} d_i p^i`.
    pub fn to_rational(&self) -> Rational {
        match self.valuation {
            None => Rational::zero(),
            Some(v) => Rational::from_integer(self.unit.clone()) * pow_p(self.p, v),
        }
    }

    /// `sum_{i < 0} d_i p^i`, in `[0, 1)`.
    pub fn fractional_part(&self) -> Rational {
        match self.valuation {
            Some(v) if v < 0 => {
                let m = pow_p_int(self.p, (-v) as u32);
                Rational::new(self.unit.mod_floor(&m), m)
            }
            _ => Rational::zero(),
        }
    }

    /// Residue modulo `p^k` for an element of `Z_p` known to at least `k` digits.
    pub fn residue(&self, k: u32) -> Option<BigInt> {
        if (k as i64) > self.precision {
            return None;
        }
        match self.valuation {
            None => Some(BigInt::zero()),
            Some(v) if v < 0 => None,
            Some(v) => {
                let m = pow_p_int(self.p, k);
                Some((&self.unit * pow_p_int(self.p, v as u32)).mod_floor(&m))
            }
        }
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.p, other.p))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let n = self.precision.min(other.precision);
        let (va, vb) = match (self.valuation, other.valuation) {
            (None, None) => return Ok(Self::zero(self.p, n)),
            (None, Some(_)) => return Ok(other.truncate(n)),
            (Some(_), None) => return Ok(self.truncate(n)),
            (Some(a), Some(b)) => (a, b),
        };
        let base = va.min(vb);
        let lift = |x: &Self, v: i64| &x.unit * pow_p_int(x.p, (v - base) as u32);
        Ok(Self::from_shifted(self.p, base, lift(self, va) + lift(other, vb), n))
    }

    pub fn neg(&self) -> Self {
        match self.valuation {
            None => self.clone(),
            Some(v) => Self::from_shifted(self.p, v, -self.unit.clone(), self.precision),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Product; precision is `min(N_a, N_b, N_a + v_b, N_b + v_a)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let mut n = self.precision.min(other.precision);
        if let Some(vb) = other.valuation {
            n = n.min(self.precision + vb);
        }
        if let Some(va) = self.valuation {
            n = n.min(other.precision + va);
        }
        match (self.valuation, other.valuation) {
            (Some(va), Some(vb)) => {
                Ok(Self::from_shifted(self.p, va + vb, &self.unit * &other.unit, n))
            }
            _ => Ok(Self::zero(self.p, n)),
        }
    }

    /// Inverse; loses `2 v(a)` digits of absolute precision.
    pub fn inv(&self) -> Result<Self> {
        let v = self.valuation.ok_or(Error::DivisionByZero)?;
        let k = (self.precision - v) as u32;
        let m = pow_p_int(self.p, k);
        let inv = rational::mod_inverse(&self.unit, &m).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_shifted(self.p, -v, inv, self.precision - 2 * v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Drop digits at or above `n`.
    pub fn truncate(&self, n: i64) -> Self {
        if n >= self.precision {
            return self.clone();
        }
        match self.valuation {
            None => Self::zero(self.p, n),
            Some(v) => Self::from_shifted(self.p, v, self.unit.clone(), n),
        }
    }

    /// Equality modulo the smaller of the two precisions.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.p == other.p && self.sub(other).is_ok_and(|d| d.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.approx_eq(&Self::one(self.p, self.precision))
    }

    /// Text form `p:v:d_v d_{v+1} ...` (lowest digit first). Zero is `p:N:`.
    pub fn to_literal(&self) -> String {
        let start = self.valuation.unwrap_or(self.precision);
        let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
        format!("{}:{}:{}", self.p, start, digits.join(" "))
    }

    /// Parse the literal produced by [`to_literal`](Self::to_literal); the
    /// precision is the index one past the last digit.
    pub fn parse_literal(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad p-adic literal `{s}`"));
        let mut parts = s.trim().splitn(3, ':');
        let p: u32 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let start: i64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let digits = parts
            .next()
            .ok_or_else(bad)?
            .split_whitespace()
            .map(|d| d.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let precision = start + digits.len() as i64;
        Self::from_digits(p, start, &digits, precision)
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicScalar({} prec {})", self.to_literal(), self.precision)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{int, rat};
    use num_traits::One;

    fn s(p: u32, r: Rational) -> PadicScalar {
        PadicScalar::from_rational(p, &r, 8).unwrap()
    }

    #[test]
    fn one_plus_one_in_base_two() {
        let two = s(2, int(1)).add(&s(2, int(1))).unwrap();
        assert_eq!(two.valuation(), Some(1));
        assert_eq!(two.digits()[0], 1);
    }

    #[test]
    fn minus_one_plus_one_is_zero() {
        let m1 = s(2, int(-1));
        assert_eq!(m1.digits(), vec![1; 8]);
        let z = m1.add(&s(2, int(1))).unwrap();
        assert!(z.is_zero());
        // integer oracle: 255 + 1 = 0 mod 2^8
        assert_eq!((255u32 + 1) % 256, 0);
    }

    #[test]
    fn identities() {
        let x = s(5, rat(7, 3));
        assert_eq!(x.add(&PadicScalar::zero(5, 8)).unwrap(), x);
        assert!(x.mul(&PadicScalar::one(5, 8)).unwrap().approx_eq(&x));
    }

    #[test]
    fn valuation_of_products() {
        let v = s(3, int(3)).mul(&s(3, int(9))).unwrap();
        assert_eq!(v.valuation(), Some(3));
    }

    #[test]
    fn inverse_of_three_in_q2() {
        let three = PadicScalar::from_int(2, 3, 16);
        let inv = three.inv().unwrap();
        assert_eq!(&inv.digits()[..6], &[1, 1, 0, 1, 0, 1]);
        // oracle: 3 * inv = 1 mod 2^16
        let r = inv.residue(16).unwrap();
        assert_eq!((r * 3u32) % 65536u32, BigInt::one());
    }

    #[test]
    fn inverse_precision_loss() {
        let x = PadicScalar::from_rational(2, &rat(4, 3), 20).unwrap();
        let inv = x.inv().unwrap();
        assert_eq!(inv.valuation(), Some(-2));
        assert_eq!(inv.precision(), 16);
        assert!(x.mul(&inv).unwrap().approx_eq(&PadicScalar::one(2, 20)));
        assert!(PadicScalar::zero(2, 8).inv().is_err());
    }

    #[test]
    fn mismatched_primes() {
        assert_eq!(
            s(2, int(1)).add(&s(3, int(1))),
            Err(Error::PrimeMismatch(2, 3))
        );
    }

    #[test]
    fn fractional_part_from_digits() {
        assert_eq!(s(2, rat(1, 2)).fractional_part(), rat(1, 2));
        assert_eq!(s(3, rat(14, 9)).fractional_part(), rat(5, 9));
        assert_eq!(s(3, int(10)).fractional_part(), int(0));
    }

    #[test]
    fn literal_roundtrip() {
        let x = PadicScalar::from_rational(3, &rat(-5, 9), 6).unwrap();
        let lit = x.to_literal();
        assert!(lit.starts_with("3:-2:"));
        assert_eq!(PadicScalar::parse_literal(&lit).unwrap(), x);
        let z = PadicScalar::zero(2, 5);
        assert_eq!(PadicScalar::parse_literal(&z.to_literal()).unwrap(), z);
        assert!(PadicScalar::parse_literal("2:0:1 2").is_err());
    }

    #[test]
    fn rational_roundtrip_within_precision() {
        let r = rat(5, 8);
        let x = PadicScalar::from_rational(2, &r, 10).unwrap();
        assert_eq!(x.to_rational(), r);
    }
}
