//! p-adic vectors and matrices at finite precision.

use num_bigint::BigInt;

use super::rational::Rational;
use super::scalar::PadicScalar;
use super::ratmat::RatMatrix;
use crate::error::{Error, Result};

/// A vector in `Q_p^d` with one prime and one precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicVector {
    p: u32,
    components: Vec<PadicScalar>,
}

impl PadicVector {
    /// Components are truncated to their common minimum precision.
    pub fn new(components: Vec<PadicScalar>) -> Result<Self> {
        let p = components.first().map(|c| c.prime()).ok_or_else(|| {
            Error::InvalidArgument("empty vector".into())
        })?;
        if let Some(c) = components.iter().find(|c| c.prime() != p) {
            return Err(Error::PrimeMismatch(p, c.prime()));
        }
        let n = components.iter().map(|c| c.precision()).min().unwrap();
        let components = components.iter().map(|c| c.truncate(n)).collect();
        Ok(PadicVector { p, components })
    }

    pub fn from_rationals(p: u32, xs: &[Rational], precision: i64) -> Result<Self> {
        Self::new(
            xs.iter()
                .map(|x| PadicScalar::from_rational(p, x, precision))
                .collect::<Result<_>>()?,
        )
    }

    pub fn zero(p: u32, d: usize, precision: i64) -> Self {
        PadicVector { p, components: vec![PadicScalar::zero(p, precision); d] }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn precision(&self) -> i64 {
        self.components[0].precision()
    }

    pub fn components(&self) -> &[PadicScalar] {
        &self.components
    }

    pub fn get(&self, i: usize) -> &PadicScalar {
        &self.components[i]
    }

    /// Minimum component valuation, so `|x|_p = p^(-valuation)`.
    pub fn valuation(&self) -> Option<i64> {
        self.components.iter().filter_map(|c| c.valuation()).min()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect::<Result<_>>()?,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect::<Result<_>>()?,
        )
    }

    /// Componentwise equality modulo the smaller precision.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.approx_eq(b))
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.components.iter().map(|c| c.to_rational()).collect()
    }

    /// Residues modulo `p^k` of an integral vector.
    pub fn residues(&self, k: u32) -> Option<Vec<BigInt>> {
        self.components.iter().map(|c| c.residue(k)).collect()
    }
}

/// A square matrix over `Q_p` with uniform prime and precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicMatrix {
    p: u32,
    n: usize,
    entries: Vec<PadicScalar>,
}

impl PadicMatrix {
    pub fn new(p: u32, n: usize, entries: Vec<PadicScalar>) -> Result<Self> {
        if entries.len() != n * n || n == 0 {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        if let Some(e) = entries.iter().find(|e| e.prime() != p) {
            return Err(Error::PrimeMismatch(p, e.prime()));
        }
        let prec = entries.iter().map(|e| e.precision()).min().unwrap();
        let entries = entries.iter().map(|e| e.truncate(prec)).collect();
        Ok(PadicMatrix { p, n, entries })
    }

    pub fn from_rat(p: u32, m: &RatMatrix, precision: i64) -> Result<Self> {
        let entries = m
            .entries()
            .iter()
            .map(|e| PadicScalar::from_rational(p, e, precision))
            .collect::<Result<_>>()?;
        Self::new(p, m.dim(), entries)
    }

    pub fn identity(p: u32, n: usize, precision: i64) -> Self {
        let entries = (0..n * n)
            .map(|i| {
                if i / n == i % n {
                    PadicScalar::one(p, precision)
                } else {
                    PadicScalar::zero(p, precision)
                }
            })
            .collect();
        PadicMatrix { p, n, entries }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> i64 {
        self.entries[0].precision()
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicScalar {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[PadicScalar] {
        &self.entries
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::new(self.n, self.entries.iter().map(|e| e.to_rational()).collect())
            .expect("square by construction")
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.entries[(k % n) * n + k / n].clone()).collect();
        PadicMatrix { p: self.p, n, entries }
    }

    pub fn apply(&self, x: &PadicVector) -> Result<PadicVector> {
        if x.prime() != self.p {
            return Err(Error::PrimeMismatch(self.p, x.prime()));
        }
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.dim() });
        }
        let prec = self.precision().min(x.precision());
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = PadicScalar::zero(self.p, prec);
            for j in 0..self.n {
                acc = acc.add(&self.get(i, j).mul(x.get(j))?)?;
            }
            out.push(acc);
        }
        PadicVector::new(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if other.p != self.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let prec = self.precision().min(other.precision());
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = PadicScalar::zero(self.p, prec);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(self.p, n, entries)
    }

    /// Gaussian elimination with pivots of minimal valuation; returns the
    /// reduced rows, the row swaps' sign and the pivots.
    fn eliminate(&self, mut aug: Vec<Vec<PadicScalar>>) -> Result<(Vec<Vec<PadicScalar>>, bool)> {
        let n = self.n;
        let mut negate = false;
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !aug[r][col].is_zero())
                .min_by_key(|&r| aug[r][col].valuation().unwrap())
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                aug.swap(pivot, col);
                negate = !negate;
            }
            let inv = aug[col][col].inv()?;
            for r in 0..n {
                if r == col || aug[r][col].is_zero() {
                    continue;
                }
                let factor = aug[r][col].mul(&inv)?;
                let pivot_row = aug[col].clone();
                for (c, pv) in pivot_row.iter().enumerate() {
                    aug[r][c] = aug[r][c].sub(&factor.mul(pv)?)?;
                }
            }
        }
        Ok((aug, negate))
    }

    fn rows(&self) -> Vec<Vec<PadicScalar>> {
        (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn det(&self) -> Result<PadicScalar> {
        match self.eliminate(self.rows()) {
            Ok((rows, negate)) => {
                let mut d = PadicScalar::one(self.p, self.precision());
                for (i, row) in rows.iter().enumerate() {
                    d = d.mul(&row[i])?;
                }
                Ok(if negate { d.neg() } else { d })
            }
            Err(Error::SingularMatrix) => Ok(PadicScalar::zero(self.p, self.precision())),
            Err(e) => Err(e),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.n;
        let id = Self::identity(self.p, n, self.precision());
        let aug: Vec<Vec<PadicScalar>> = self
            .rows()
            .into_iter()
            .zip(id.rows())
            .map(|(mut a, b)| {
                a.extend(b);
                a
            })
            .collect();
        let (rows, _) = self.eliminate(aug)?;
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let inv = row[i].inv()?;
            for v in &row[n..] {
                entries.push(v.mul(&inv)?);
            }
        }
        Self::new(self.p, n, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{int, rat};

    fn m(p: u32, rows: &[&[i64]]) -> PadicMatrix {
        PadicMatrix::from_rat(p, &RatMatrix::from_ints(rows), 16).unwrap()
    }

    #[test]
    fn vector_valuation() {
        let x = PadicVector::from_rationals(2, &[int(4), rat(1, 2)], 16).unwrap();
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(PadicVector::zero(2, 3, 8).valuation(), None);
    }

    #[test]
    fn determinants() {
        assert_eq!(m(2, &[&[1, -1], &[1, 1]]).det().unwrap().to_rational(), int(2));
        let d = m(2, &[&[0, 1], &[2, 0]]).det().unwrap();
        assert!(d.approx_eq(&PadicScalar::from_int(2, -2, 16)));
        assert!(m(3, &[&[1, 2], &[2, 4]]).det().unwrap().is_zero());
    }

    #[test]
    fn inverse_and_identity() {
        let a = m(3, &[&[0, 1], &[3, 0]]);
        let prod = a.mul(&a.inv().unwrap()).unwrap();
        let id = PadicMatrix::identity(3, 2, prod.precision());
        for (x, y) in prod.entries().iter().zip(id.entries()) {
            assert!(x.approx_eq(y));
        }
        let x = PadicVector::from_rationals(3, &[rat(1, 3), int(5)], 16).unwrap();
        assert!(PadicMatrix::identity(3, 2, 16).apply(&x).unwrap().approx_eq(&x));
        assert_eq!(m(2, &[&[1, 1], &[1, 1]]).inv(), Err(Error::SingularMatrix));
    }

    #[test]
    fn det_is_multiplicative() {
        let a = m(2, &[&[1, 3], &[2, 5]]);
        let b = m(2, &[&[0, 1], &[2, 6]]);
        let lhs = a.mul(&b).unwrap().det().unwrap();
        let rhs = a.det().unwrap().mul(&b.det().unwrap()).unwrap();
        assert!(lhs.approx_eq(&rhs));
    }
}
