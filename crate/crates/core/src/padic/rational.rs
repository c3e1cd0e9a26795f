//! Exact rationals and their p-adic valuation / fractional part.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| !p.is_multiple_of(i))
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `p^e` as a rational, `e` of either sign.
pub fn pow_p(p: u32, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

pub fn pow_p_int(p: u32, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// Strip factors of `p` from a nonzero integer; returns the count and the cofactor.
pub fn split_p(n: &BigInt, p: u32) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut count = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return (count, m);
        }
        m = q;
        count += 1;
    }
}

/// p-adic valuation; `None` encodes `+inf` (the rational zero).
pub fn valuation(r: &Rational, p: u32) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let (vn, _) = split_p(r.numer(), p);
    let (vd, _) = split_p(r.denom(), p);
    Some(vn - vd)
}

/// `true` iff `r` lies in `Z_p`.
pub fn is_p_integral(r: &Rational, p: u32) -> bool {
    valuation(r, p).is_none_or(|v| v >= 0)
}

/// Modular inverse of `a` modulo `m` (`gcd(a, m) = 1` required).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Reduce a p-integral rational to its residue modulo `p^k` as an integer in `[0, p^k)`.
pub fn residue_mod_pk(r: &Rational, p: u32, k: u32) -> Option<BigInt> {
    if !is_p_integral(r, p) {
        return None;
    }
    let m = pow_p_int(p, k);
    let inv = mod_inverse(r.denom(), &m)?;
    Some((r.numer() * inv).mod_floor(&m))
}

/// The p-adic fractional part `{r}`: the rational in `[0, 1)` with denominator a
/// power of `p` such that `r - {r}` lies in `Z_p`.
pub fn fractional_part(r: &Rational, p: u32) -> Rational {
    match valuation(r, p) {
        None => Rational::zero(),
        Some(v) if v >= 0 => Rational::zero(),
        Some(v) => {
            let k = (-v) as u32;
            let scaled = r * pow_p(p, -v);
            let res = residue_mod_pk(&scaled, p, k).expect("scaled value is p-integral");
            Rational::new(res, pow_p_int(p, k))
        }
    }
}

/// Reduce `r` modulo `p^k Z_p`, returning the representative with p-power
/// denominator in `[0, p^k)`.
pub fn reduce_mod_pk(r: &Rational, p: u32, k: i64) -> Rational {
    fractional_part(&(r * pow_p(p, -k)), p) * pow_p(p, k)
}

pub fn to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

pub fn biguint_of(n: &BigInt) -> BigUint {
    match n.sign() {
        Sign::Minus => panic!("negative value has no unsigned representation"),
        _ => n.magnitude().clone(),
    }
}

/// Decimal rendering with `digits` places after the point (truncated toward zero).
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (a.numer() * &scale) / a.denom();
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let sign = if neg && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

/// Parse `a`, `a/b` or `-a/b`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractional_parts() {
        assert_eq!(fractional_part(&rat(1, 2), 2), rat(1, 2));
        assert_eq!(fractional_part(&rat(7, 1), 2), rat(0, 1));
        // 1/3 + 2/9 + 1 = 14/9
        assert_eq!(fractional_part(&rat(14, 9), 3), rat(5, 9));
        // 1/6 in Q_2: 1/6 = (1/2) * (1/3), 1/3 = ...0101011 so {1/6} = 1/2
        assert_eq!(fractional_part(&rat(1, 6), 2), rat(1, 2));
        assert_eq!(fractional_part(&rat(-1, 4), 2), rat(3, 4));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&int(4), 2), Some(2));
        assert_eq!(valuation(&rat(3, 8), 2), Some(-3));
        assert_eq!(valuation(&int(0), 5), None);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&rat(-7, 4), 2), "-1.75");
        assert_eq!(to_decimal(&rat(5, 1), 0), "5");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3", "-1/2", "7/9"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
