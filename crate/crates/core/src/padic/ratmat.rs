//! Exact rational square matrices.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::{self, format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| rational::int(x))).collect();
        RatMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rational::one())
    }

    pub fn scalar(n: usize, c: Rational) -> Self {
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { c.clone() } else { Rational::zero() })
            .collect();
        RatMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        RatMatrix { n, entries: (0..n * n).map(|k| self.entries[(k % n) * n + k / n].clone()).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        RatMatrix { n, entries }
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatMatrix { n: self.n, entries: self.entries.iter().map(|e| e * c).collect() }
    }

    pub fn det(&self) -> Rational {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Rational::zero();
            };
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let pv = a[col * n + col].clone();
            det *= &pv;
            for r in col + 1..n {
                let f = &a[r * n + col] / &pv;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let t = &f * &a[col * n + j];
                    a[r * n + j] -= t;
                }
            }
        }
        det
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut b = Self::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero()).ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    b.swap(pivot * n + j, col * n + j);
                }
            }
            let pv = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &pv;
                b[col * n + j] /= &pv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col].clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let ta = &f * &a[col * n + j];
                    let tb = &f * &b[col * n + j];
                    a[r * n + j] -= ta;
                    b[r * n + j] -= tb;
                }
            }
        }
        Ok(RatMatrix { n, entries: b })
    }

    /// `A^k` for any integer `k` (negative powers invert).
    pub fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut result = Self::identity(self.n);
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(result)
    }

    /// Minimum p-adic valuation over the entries (`None` for the zero matrix).
    pub fn min_valuation(&self, p: u32) -> Option<i64> {
        self.entries.iter().filter_map(|e| rational::valuation(e, p)).min()
    }

    pub fn is_p_integral(&self, p: u32) -> bool {
        self.min_valuation(p).is_none_or(|v| v >= 0)
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    /// Entries modulo `p^k` of a p-integral matrix.
    pub fn residues(&self, p: u32, k: u32) -> Option<Vec<u64>> {
        self.entries
            .iter()
            .map(|e| rational::residue_mod_pk(e, p, k).and_then(|r| r.to_u64()))
            .collect()
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(rational::to_i64).collect()
    }

    pub fn to_bigint(&self) -> Option<Vec<BigInt>> {
        self.entries.iter().map(|e| e.is_integer().then(|| e.to_integer())).collect()
    }

    /// Inline form `a,b;c,d` (rows separated by `;`, entries by `,` or spaces).
    pub fn parse_inline(s: &str) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = s
            .split(';')
            .map(|row| {
                row.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse(format!("matrix `{s}` is not square")));
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    pub fn to_inline(&self) -> String {
        (0..self.n)
            .map(|i| self.row(i).iter().map(format_rational).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_inline())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_inline())
    }
}
