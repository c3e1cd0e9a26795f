//! Exact arithmetic in the cyclotomic fields `Q(zeta_{p^a})`.
//!
//! Elements are kept in the power basis `1, zeta, ..., zeta^(phi - 1)` reduced
//! modulo `Phi_{p^a}(x) = sum_{t < p} x^(t p^(a-1))`, so zero testing is a
//! coefficient check. Elements of different orders are compared and combined by
//! embedding the lower order into the higher one.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::character::UnitRootExponent;
use super::rational::{self, Rational};

#[derive(Clone)]
pub struct Cyclotomic {
    p: u32,
    /// Order is `p^level`.
    level: u32,
    coeffs: Vec<Rational>,
}

fn order_of(p: u32, level: u32) -> usize {
    (p as usize).pow(level)
}

fn phi(p: u32, level: u32) -> usize {
    if level == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(level - 1)
    }
}

/// Reduced power-basis expansion of `zeta^i`, `0 <= i < p^level`: either a single
/// index with coefficient `+1`, or `p - 1` indices each with coefficient `-1`.
fn reduce_exponent(p: u32, level: u32, i: usize) -> Result<usize, impl Iterator<Item = usize>> {
    let ph = phi(p, level);
    if level == 0 {
        return Ok(0);
    }
    if i < ph {
        return Ok(i);
    }
    let step = (p as usize).pow(level - 1);
    let r = i - ph;
    Err((0..p as usize - 1).map(move |t| r + t * step))
}

impl Cyclotomic {
    pub fn zero(p: u32) -> Self {
        Cyclotomic { p, level: 0, coeffs: vec![Rational::zero()] }
    }

    pub fn from_rational(p: u32, r: Rational) -> Self {
        Cyclotomic { p, level: 0, coeffs: vec![r] }
    }

    pub fn one(p: u32) -> Self {
        Self::from_rational(p, rational::int(1))
    }

    /// `zeta_{p^level}^i`.
    pub fn root(p: u32, level: u32, i: i64) -> Self {
        let m = order_of(p, level) as i64;
        let mut counts = vec![0i128; m as usize];
        counts[i.rem_euclid(m) as usize] = 1;
        Self::from_exponent_counts(p, level, &counts, &BigInt::from(1))
    }

    pub fn from_exponent(e: &UnitRootExponent) -> Self {
        let p = e.prime();
        let level = e.order_exponent();
        let num = (e.exponent() * Rational::from_integer(BigInt::from(order_of(p, level))))
            .to_integer()
            .to_i64()
            .unwrap();
        Self::root(p, level, num)
    }

    /// `(1 / denom) * sum_i counts[i] zeta^i` over all exponents `0 <= i < p^level`.
    pub fn from_exponent_counts(p: u32, level: u32, counts: &[i128], denom: &BigInt) -> Self {
        let m = order_of(p, level);
        assert_eq!(counts.len(), m);
        let mut acc = vec![0i128; phi(p, level)];
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            match reduce_exponent(p, level, i) {
                Ok(j) => acc[j] += c,
                Err(js) => js.for_each(|j| acc[j] -= c),
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|c| Rational::new(BigInt::from(c), denom.clone()))
            .collect();
        Cyclotomic { p, level, coeffs }
    }

    /// Same as [`from_exponent_counts`](Self::from_exponent_counts) with rational weights.
    pub fn from_exponent_weights(p: u32, level: u32, weights: &[Rational]) -> Self {
        let m = order_of(p, level);
        assert_eq!(weights.len(), m);
        let mut coeffs = vec![Rational::zero(); phi(p, level)];
        for (i, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            match reduce_exponent(p, level, i) {
                Ok(j) => coeffs[j] += w,
                Err(js) => js.for_each(|j| coeffs[j] -= w),
            }
        }
        Cyclotomic { p, level, coeffs }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> usize {
        order_of(self.p, self.level)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value, if this element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    /// Embed into `Q(zeta_{p^level})`, `level >= self.level`.
    pub fn embed(&self, level: u32) -> Self {
        assert!(level >= self.level);
        if level == self.level {
            return self.clone();
        }
        let stride = (self.p as usize).pow(level - self.level);
        let mut coeffs = vec![Rational::zero(); phi(self.p, level)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * stride] = c.clone();
        }
        Cyclotomic { p: self.p, level, coeffs }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "cyclotomic primes differ");
        let level = self.level.max(other.level);
        (self.embed(level), other.embed(level))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { p: self.p, level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Cyclotomic { p: self.p, level: self.level, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let m = a.order();
        let mut weights = vec![Rational::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                weights[(i + j) % m] += x * y;
            }
        }
        Self::from_exponent_weights(a.p, a.level, &weights)
    }

    /// Multiply by `zeta_{p^level}^k` without a full product.
    pub fn mul_root(&self, level: u32, k: i64) -> Self {
        let level = level.max(self.level);
        let a = self.embed(level);
        let m = a.order() as i64;
        let mut weights = vec![Rational::zero(); m as usize];
        for (i, x) in a.coeffs.iter().enumerate() {
            if !x.is_zero() {
                weights[(i as i64 + k).rem_euclid(m) as usize] += x;
            }
        }
        Self::from_exponent_weights(a.p, level, &weights)
    }

    /// The exponent `e` with `self = exp(2 pi i e)`, if this is a `p`-power
    /// root of unity.
    pub fn as_root(&self) -> Option<UnitRootExponent> {
        let nonzero = self.coeffs.iter().filter(|c| !c.is_zero()).count();
        if nonzero != 1 && nonzero + 1 != self.p as usize {
            return None;
        }
        let level = self.level.max(1);
        let m = order_of(self.p, level) as i64;
        (0..m)
            .find(|&i| &Self::root(self.p, level, i) == self)
            .map(|i| UnitRootExponent::new(self.p, rational::rat(i, m)).unwrap())
    }

    /// Complex conjugation, `zeta -> zeta^(-1)`.
    pub fn conj(&self) -> Self {
        let m = self.order();
        let mut weights = vec![Rational::zero(); m];
        for (i, x) in self.coeffs.iter().enumerate() {
            weights[(m - i) % m] += x;
        }
        Self::from_exponent_weights(self.p, self.level, &weights)
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let t = std::f64::consts::TAU * i as f64 / m;
                Complex64::new(t.cos(), t.sin()) * c.to_f64().unwrap()
            })
            .sum()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Terms `c*z^i` over the order-`p^a` root `z`, e.g. `-1*z^1 + 1/2*z^0`; a
/// rational prints as itself.
impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return f.write_str(&rational::format_rational(&r));
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*z{}^{}", rational::format_rational(c), self.order(), i))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{int, rat};

    #[test]
    fn roots_sum_to_zero() {
        for (p, level) in [(2, 1), (3, 1), (5, 1), (3, 2), (2, 3)] {
            let m = order_of(p, level) as i64;
            let step = m / p as i64;
            let sum = (0..p as i64)
                .map(|t| Cyclotomic::root(p, level, t * step))
                .fold(Cyclotomic::zero(p), |a, b| a.add(&b));
            assert!(sum.is_zero(), "p={p} level={level}");
        }
    }

    #[test]
    fn exponent_conversion() {
        let one = Cyclotomic::from_exponent(&UnitRootExponent::one(5));
        assert_eq!(one.as_rational(), Some(int(1)));
        let minus = Cyclotomic::from_exponent(&UnitRootExponent::new(2, rat(1, 2)).unwrap());
        assert_eq!(minus.as_rational(), Some(int(-1)));
        assert_eq!(minus.mul(&minus), Cyclotomic::one(2));
    }

    #[test]
    fn conjugation_inverts_roots() {
        let z = Cyclotomic::root(3, 2, 4);
        assert_eq!(z.mul(&z.conj()), Cyclotomic::one(3));
        assert_eq!(z.conj(), Cyclotomic::root(3, 2, 5));
    }

    #[test]
    fn embedding_preserves_value() {
        let z = Cyclotomic::root(3, 1, 1);
        let w = Cyclotomic::root(3, 2, 3);
        assert_eq!(z, w);
        assert_eq!(z.embed(3).level(), 3);
        assert_eq!(
            Cyclotomic::root(2, 2, 1).mul(&Cyclotomic::root(2, 2, 1)),
            Cyclotomic::from_rational(2, int(-1))
        );
    }

    #[test]
    fn mul_root_matches_mul() {
        let x = Cyclotomic::root(3, 2, 2).add(&Cyclotomic::from_rational(3, rat(1, 3)));
        assert_eq!(x.mul_root(2, 7), x.mul(&Cyclotomic::root(3, 2, 7)));
    }
}
