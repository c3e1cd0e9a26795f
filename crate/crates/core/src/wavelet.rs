//! Locally constant functions on `Q_p^d` with exact cyclotomic values, and the
//! Haar type wavelet bases attached to a dilation matrix.
//!
//! A function with support level `L` and constancy level `M` vanishes outside
//! `p^(-L) Z_p^d` and is constant on cosets of `p^M Z_p^d`. The cell of
//! `x = p^(-L) u` is keyed by `u mod p^(L+M)`. A global factor `p^(amp2/2)`
//! carries the half-integer normalizations of the wavelets.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dilation;
use crate::error::{Error, Result};
use crate::metric::{cartesian, Ball, DeformedMetric};
use crate::padic::rational::{self, format_rational, pow_p, Rational};
use crate::padic::{Cyclotomic, RatMatrix, UnitRootExponent};

/// Largest `p^(L+M)` a function may use as its key modulus.
const MAX_MODULUS: u64 = 1 << 40;

pub type Key = Vec<u64>;

/// An exact value `value * p^(amp2/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaled {
    pub value: Cyclotomic,
    pub amp2: i64,
}

impl Scaled {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The value as a rational, when the amplitude is an integer power of `p`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.value.is_zero() {
            return Some(Rational::zero());
        }
        if self.amp2 % 2 != 0 {
            return None;
        }
        self.value.as_rational().map(|r| r * pow_p(self.value.prime(), self.amp2 / 2))
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex() * (self.value.prime() as f64).powf(self.amp2 as f64 / 2.0)
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) => f.write_str(&format_rational(&r)),
            None => write!(f, "({}) * p^({}/2)", self.value, self.amp2),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocallyConstantFunction {
    p: u32,
    d: usize,
    support_level: i64,
    constancy_level: i64,
    values: BTreeMap<Key, Cyclotomic>,
    amp2: i64,
}

fn modulus_for(p: u32, levels: i64) -> Result<u64> {
    let m = (p as u64).checked_pow(levels as u32).filter(|&m| m <= MAX_MODULUS);
    m.ok_or_else(|| Error::Guard { guard: "key modulus", detail: format!("p^{levels} exceeds 2^40") })
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Keys on the grid `to = (L', M')` of the cells inside the cell `u` of the
/// grid `from = (L, M)`, where `L' >= L` and `M' >= M`.
pub fn refined_keys(p: u32, from: (i64, i64), to: (i64, i64), u: &[u64]) -> Vec<Key> {
    let m = modulus_for(p, to.0 + to.1).unwrap();
    let p = p as u64;
    let shift = p.pow((to.0 - from.0) as u32);
    let step = p.pow((to.0 + from.1) as u32) % m;
    let sub = p.pow((to.1 - from.1) as u32) as i64;
    cartesian(&vec![(0..sub).collect::<Vec<i64>>(); u.len()])
        .into_iter()
        .map(|w| u.iter().zip(&w).map(|(&c, &wi)| (mulmod(c, shift, m) + mulmod(step, wi as u64, m)) % m).collect())
        .collect()
}

/// Minimum valuation over the entries of a vector (`None` for zero).
pub fn vector_valuation(x: &[Rational], p: u32) -> Option<i64> {
    x.iter().filter_map(|c| rational::valuation(c, p)).min()
}

impl LocallyConstantFunction {
    pub fn zero(p: u32, d: usize, support_level: i64, constancy_level: i64) -> Result<Self> {
        if constancy_level < -support_level {
            return Err(Error::InvalidArgument(format!(
                "constancy level {constancy_level} below {}",
                -support_level
            )));
        }
        modulus_for(p, support_level + constancy_level)?;
        Ok(LocallyConstantFunction {
            p,
            d,
            support_level,
            constancy_level,
            values: BTreeMap::new(),
            amp2: 0,
        })
    }

    /// Build from sample points; points in the same cell must agree.
    pub fn from_points(
        p: u32,
        d: usize,
        support_level: i64,
        constancy_level: i64,
        points: impl IntoIterator<Item = (Vec<Rational>, Cyclotomic)>,
    ) -> Result<Self> {
        let mut f = Self::zero(p, d, support_level, constancy_level)?;
        for (x, v) in points {
            let key = f.key_of(&x).ok_or_else(|| {
                Error::InvalidArgument(format!("point outside p^{} Z_p^d", -support_level))
            })?;
            if let Some(old) = f.values.get(&key) {
                if old != &v {
                    return Err(Error::InvalidArgument("conflicting values in one cell".into()));
                }
            }
            f.insert(key, v);
        }
        Ok(f)
    }

    /// Build from an explicit cell table.
    pub fn from_cells(
        p: u32,
        d: usize,
        support_level: i64,
        constancy_level: i64,
        cells: impl IntoIterator<Item = (Key, Cyclotomic)>,
    ) -> Result<Self> {
        let mut f = Self::zero(p, d, support_level, constancy_level)?;
        let m = f.modulus();
        for (k, v) in cells {
            if k.len() != d || k.iter().any(|&c| c >= m) {
                return Err(Error::InvalidArgument("cell key out of range".into()));
            }
            f.insert(k, v);
        }
        Ok(f)
    }

    fn insert(&mut self, key: Key, v: Cyclotomic) {
        if v.is_zero() {
            self.values.remove(&key);
        } else {
            self.values.insert(key, v);
        }
    }

    pub fn with_amplitude(mut self, amp2: i64) -> Self {
        self.amp2 = amp2;
        self
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn support_level(&self) -> i64 {
        self.support_level
    }

    pub fn constancy_level(&self) -> i64 {
        self.constancy_level
    }

    pub fn amp2(&self) -> i64 {
        self.amp2
    }

    pub fn cells(&self) -> &BTreeMap<Key, Cyclotomic> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        modulus_for(self.p, self.support_level + self.constancy_level).unwrap()
    }

    /// Measure `p^(-dM)` of one cell.
    pub fn cell_measure(&self) -> Rational {
        pow_p(self.p, -(self.d as i64) * self.constancy_level)
    }

    /// Key of the cell containing `x`, `None` if `x` is outside `p^(-L) Z_p^d`.
    pub fn key_of(&self, x: &[Rational]) -> Option<Key> {
        let levels = (self.support_level + self.constancy_level) as u32;
        let scale = pow_p(self.p, self.support_level);
        x.iter()
            .map(|c| rational::residue_mod_pk(&(c * &scale), self.p, levels).and_then(|r| r.to_u64()))
            .collect()
    }

    /// A representative point of the cell with key `u`.
    pub fn point_of(&self, key: &[u64]) -> Vec<Rational> {
        let scale = pow_p(self.p, -self.support_level);
        key.iter().map(|&u| Rational::from_integer(u.into()) * &scale).collect()
    }

    /// Value at `x` without the amplitude factor.
    pub fn evaluate(&self, x: &[Rational]) -> Cyclotomic {
        self.key_of(x)
            .and_then(|k| self.values.get(&k).cloned())
            .unwrap_or_else(|| Cyclotomic::zero(self.p))
    }

    pub fn evaluate_scaled(&self, x: &[Rational]) -> Scaled {
        Scaled { value: self.evaluate(x), amp2: self.amp2 }
    }

    /// Translate a key of a function with levels `(l, m)`, `m >= M`, into a key
    /// of `self`; `None` if the cell is outside the support level of `self`.
    fn convert_key(&self, u: &[u64], l: i64) -> Option<Key> {
        let m = self.modulus();
        let p = self.p as u64;
        if self.support_level >= l {
            let f = p.pow((self.support_level - l) as u32) % m;
            Some(u.iter().map(|&c| mulmod(c % m, f, m)).collect())
        } else {
            let q = p.pow((l - self.support_level) as u32);
            u.iter().map(|&c| (c % q == 0).then(|| (c / q) % m)).collect()
        }
    }

    fn lookup_foreign(&self, u: &[u64], l: i64) -> Option<&Cyclotomic> {
        self.convert_key(u, l).and_then(|k| self.values.get(&k))
    }

    /// Same function on a finer grid.
    pub fn refine(&self, support_level: i64, constancy_level: i64) -> Result<Self> {
        if support_level < self.support_level || constancy_level < self.constancy_level {
            return Err(Error::InvalidArgument("refinement must not coarsen".into()));
        }
        let mut out = Self::zero(self.p, self.d, support_level, constancy_level)?;
        out.amp2 = self.amp2;
        let from = (self.support_level, self.constancy_level);
        for (u, v) in &self.values {
            for key in refined_keys(self.p, from, (support_level, constancy_level), u) {
                out.values.insert(key, v.clone());
            }
        }
        Ok(out)
    }

    /// Coarsest representation: merge equal sibling cells, shrink the support level.
    pub fn normalize(&self) -> Self {
        let mut f = self.clone();
        if f.values.is_empty() {
            f.support_level = 0;
            f.constancy_level = 0;
            return f;
        }
        loop {
            let mut changed = false;
            if f.constancy_level > -f.support_level {
                if let Some(g) = f.coarsen_constancy() {
                    f = g;
                    changed = true;
                }
            }
            if f.support_level + f.constancy_level >= 1 && f.values.keys().all(|k| k.iter().all(|&c| c % f.p as u64 == 0)) {
                let p = f.p as u64;
                f.values = std::mem::take(&mut f.values)
                    .into_iter()
                    .map(|(k, v)| (k.into_iter().map(|c| c / p).collect(), v))
                    .collect();
                f.support_level -= 1;
                changed = true;
            }
            if !changed {
                return f;
            }
        }
    }

    fn coarsen_constancy(&self) -> Option<Self> {
        let coarse_mod = self.modulus() / self.p as u64;
        let children = (self.p as usize).pow(self.d as u32);
        let mut groups: BTreeMap<Key, (usize, &Cyclotomic)> = BTreeMap::new();
        for (k, v) in &self.values {
            let parent: Key = k.iter().map(|&c| c % coarse_mod).collect();
            match groups.get_mut(&parent) {
                Some((n, w)) => {
                    if *w != v {
                        return None;
                    }
                    *n += 1;
                }
                None => {
                    groups.insert(parent, (1, v));
                }
            }
        }
        if groups.values().any(|(n, _)| *n != children) {
            return None;
        }
        let values = groups.into_iter().map(|(k, (_, v))| (k, v.clone())).collect();
        Some(LocallyConstantFunction { values, constancy_level: self.constancy_level - 1, ..self.clone() })
    }

    fn common_levels(&self, other: &Self) -> (i64, i64) {
        (self.support_level.max(other.support_level), self.constancy_level.max(other.constancy_level))
    }

    /// Exact equality as functions on `Q_p^d`, including the amplitude.
    /// Amplitudes of different parity are compared numerically (tolerance 1e-12).
    pub fn same_function(&self, other: &Self) -> bool {
        if self.p != other.p || self.d != other.d {
            return false;
        }
        let (l, m) = self.common_levels(other);
        let (Ok(a), Ok(b)) = (self.refine(l, m), other.refine(l, m)) else {
            return false;
        };
        let diff = a.amp2 - b.amp2;
        let keys: std::collections::BTreeSet<&Key> = a.values.keys().chain(b.values.keys()).collect();
        let zero = Cyclotomic::zero(self.p);
        let same = keys.into_iter().all(|k| {
            let x = a.values.get(k).unwrap_or(&zero);
            let y = b.values.get(k).unwrap_or(&zero);
            if diff % 2 == 0 {
                let f = pow_p(self.p, diff / 2);
                x.scale(&f) == *y
            } else {
                let xs = Scaled { value: x.clone(), amp2: a.amp2 }.to_complex();
                let ys = Scaled { value: y.clone(), amp2: b.amp2 }.to_complex();
                (xs - ys).norm() < 1e-12
            }
        });
        same
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        let mut f = self.clone();
        f.values = self.values.iter().map(|(k, v)| (k.clone(), v.mul(c))).filter(|(_, v)| !v.is_zero()).collect();
        f
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&Cyclotomic::from_rational(self.p, r.clone()))
    }

    /// Pointwise sum; amplitudes must differ by an even number.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        if (self.amp2 - other.amp2) % 2 != 0 {
            return Err(Error::InvalidArgument("amplitudes differ by an odd half power".into()));
        }
        let (l, m) = self.common_levels(other);
        let amp2 = self.amp2.min(other.amp2);
        let mut a = self.refine(l, m)?;
        let b = other.refine(l, m)?;
        let fa = pow_p(self.p, (a.amp2 - amp2) / 2);
        let fb = pow_p(self.p, (b.amp2 - amp2) / 2);
        a.values = a.values.into_iter().map(|(k, v)| (k, v.scale(&fa))).collect();
        for (k, v) in b.values {
            let v = v.scale(&fb);
            let sum = match a.values.get(&k) {
                Some(w) => w.add(&v),
                None => v,
            };
            a.insert(k, sum);
        }
        a.amp2 = amp2;
        Ok(a)
    }

    /// `int f dmu`.
    pub fn mean(&self) -> Scaled {
        let mut sum = Cyclotomic::zero(self.p);
        for v in self.values.values() {
            sum = sum.add(v);
        }
        Scaled { value: sum.scale(&self.cell_measure()), amp2: self.amp2 }
    }

    /// `<f, g> = int f conj(g) dmu`, exact.
    pub fn inner_product(&self, other: &Self) -> Result<Scaled> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.d != other.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: other.d });
        }
        let swap = other.constancy_level > self.constancy_level;
        let (fine, coarse) = if swap { (other, self) } else { (self, other) };
        let mut sum = Cyclotomic::zero(self.p);
        for (u, v) in &fine.values {
            if let Some(w) = coarse.lookup_foreign(u, fine.support_level) {
                sum = sum.add(&v.mul(&w.conj()));
            }
        }
        let mut value = sum.scale(&fine.cell_measure());
        if swap {
            value = value.conj();
        }
        Ok(Scaled { value, amp2: self.amp2 + other.amp2 })
    }

    /// `<f, f>` as an exact rational.
    pub fn norm_squared(&self) -> Result<Rational> {
        self.inner_product(self)?
            .as_rational()
            .ok_or_else(|| Error::InvalidArgument("squared norm is not rational".into()))
    }

    /// Cell values including the amplitude, as complex floats.
    pub fn complex_cells(&self) -> BTreeMap<Key, Complex64> {
        let a = (self.p as f64).powf(self.amp2 as f64 / 2.0);
        self.values.iter().map(|(k, v)| (k.clone(), v.to_complex() * a)).collect()
    }
}

impl fmt::Display for LocallyConstantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "levels L={} M={} amplitude p^({}/2) cells {}",
            self.support_level,
            self.constancy_level,
            self.amp2,
            self.values.len()
        )?;
        for (k, v) in &self.values {
            let x: Vec<String> = self.point_of(k).iter().map(format_rational).collect();
            let val = match v.as_root() {
                Some(e) => format!("root {}", format_rational(e.exponent())),
                None => v.to_string(),
            };
            writeln!(f, "  ({}) {}", x.join(","), val)?;
        }
        Ok(())
    }
}

/// Indicator of a ball of a deformed metric.
pub fn indicator_ball(metric: &DeformedMetric, ball: &Ball) -> Result<LocallyConstantFunction> {
    let (p, d) = (metric.prime(), metric.dim());
    let j = ball.t.div_euclid(metric.period() as i64);
    let cval = vector_valuation(&ball.center, p).unwrap_or(j);
    let support_level = -(j.min(cval));
    let basis = metric.chain_lattice(ball.t);
    // Lambda_t mod p^(j+1): images of a box under the basis
    let lat = dilation_free_box(&basis, p, j + 1);
    let points = lat.into_iter().map(|l| {
        let x: Vec<Rational> = ball.center.iter().zip(&l).map(|(a, b)| a + b).collect();
        (x, Cyclotomic::one(p))
    });
    LocallyConstantFunction::from_points(p, d, support_level, j + 1, points)
}

/// Representatives of `B Z_p^d` modulo `p^m Z_p^d` (requires `p^m Z_p^d <= B Z_p^d`).
fn dilation_free_box(basis: &RatMatrix, p: u32, m: i64) -> Vec<Vec<Rational>> {
    let c = (m - basis.min_valuation(p).unwrap_or(0)).max(0);
    let side = (p as i64).pow(c as u32);
    let d = basis.dim();
    cartesian(&vec![(0..side).collect(); d])
        .into_iter()
        .map(|z| basis.apply(&z.into_iter().map(rational::int).collect::<Vec<_>>()))
        .collect()
}

/// Unit ball indicator `Omega(|x|_p)` on `Q_p^d`.
pub fn unit_indicator(p: u32, d: usize) -> LocallyConstantFunction {
    LocallyConstantFunction::from_cells(p, d, 0, 0, [(vec![0; d], Cyclotomic::one(p))]).unwrap()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WaveletIndex {
    pub k: Vec<i64>,
    pub j: i64,
    /// Fractions in `[0, 1)` with `p`-power denominators.
    pub n: Vec<Rational>,
}

impl fmt::Display for WaveletIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k: Vec<String> = self.k.iter().map(|c| c.to_string()).collect();
        let n: Vec<String> = self.n.iter().map(format_rational).collect();
        write!(f, "k=({}) j={} n=({})", k.join(","), self.j, n.join(","))
    }
}

/// One term `coefficient * Omega(x in A Z_p^d + digit)` of a mother wavelet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotherTerm {
    pub coefficient: UnitRootExponent,
    pub digit: Vec<i64>,
}

/// A dilation `A` with `|det A|_p = p^(-1)` together with its digit set
/// `m_l` for `Z_p^d / A Z_p^d` and the representatives `k` of
/// `Z_p^d / A^T Z_p^d`, both chosen lexicographically in `{0..p-1}^d`.
#[derive(Clone, Debug)]
pub struct WaveletSystem {
    p: u32,
    a: RatMatrix,
    a_inv: RatMatrix,
    at_inv: RatMatrix,
    digits: Vec<Vec<i64>>,
    ks: Vec<Vec<i64>>,
}

fn lexicographic_reps(p: u32, d: usize, inv: &RatMatrix) -> Vec<Vec<i64>> {
    let mut reps: Vec<Vec<i64>> = Vec::new();
    for u in cartesian(&vec![(0..p as i64).collect(); d]) {
        let fresh = reps.iter().all(|r| {
            let diff: Vec<Rational> = u.iter().zip(r).map(|(a, b)| rational::int(a - b)).collect();
            !inv.apply(&diff).iter().all(|c| rational::is_p_integral(c, p))
        });
        if fresh {
            reps.push(u);
        }
    }
    reps
}

impl WaveletSystem {
    pub fn new(p: u32, a: RatMatrix) -> Result<Self> {
        rational::check_prime(p)?;
        if !a.is_p_integral(p) {
            return Err(Error::InvalidArgument(format!("{a} has entries outside Z_p")));
        }
        if dilation::det_valuation(&a, p) != Some(1) {
            return Err(Error::InvalidArgument(format!("|det {a}|_p must be p^-1")));
        }
        let a_inv = a.inv()?;
        let at_inv = a_inv.transpose();
        let d = a.dim();
        let digits = lexicographic_reps(p, d, &a_inv);
        let ks: Vec<Vec<i64>> = lexicographic_reps(p, d, &at_inv).into_iter().filter(|k| k.iter().any(|&c| c != 0)).collect();
        debug_assert_eq!(digits.len(), p as usize);
        debug_assert_eq!(ks.len(), p as usize - 1);
        Ok(WaveletSystem { p, a, a_inv, at_inv, digits, ks })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.a
    }

    /// `(A^T)^(-1)`.
    pub fn dual_inverse(&self) -> &RatMatrix {
        &self.at_inv
    }

    /// Digit set `m_0 = 0, m_1, ..., m_(p-1)`.
    pub fn digits(&self) -> &[Vec<i64>] {
        &self.digits
    }

    /// The `p - 1` nonzero representatives of `Z_p^d / A^T Z_p^d`.
    pub fn enumerate_k(&self) -> &[Vec<i64>] {
        &self.ks
    }

    /// Whether `x` lies in `A^T Z_p^d`.
    pub fn in_dual_lattice(&self, x: &[i64]) -> bool {
        let x: Vec<Rational> = x.iter().map(|&c| rational::int(c)).collect();
        self.at_inv.apply(&x).iter().all(|c| rational::is_p_integral(c, self.p))
    }

    fn check_k(&self, k: &[i64]) -> Result<()> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: k.len() });
        }
        if self.in_dual_lattice(k) {
            return Err(Error::InvalidArgument(format!("k={k:?} represents zero in Z_p^d / A^T Z_p^d")));
        }
        Ok(())
    }

    /// `chi(k . A^(-1) y)`.
    fn mother_value(&self, k: &[i64], y: &[Rational]) -> UnitRootExponent {
        let z = self.a_inv.apply(y);
        let dot: Rational = k.iter().zip(&z).map(|(&a, b)| b * rational::int(a)).sum();
        crate::padic::character_of_rational(self.p, &dot)
    }

    /// `Psi_k = sum_l chi(k . A^(-1) m_l) Omega(x in A Z_p^d + m_l)`.
    pub fn expand_mother(&self, k: &[i64]) -> Result<Vec<MotherTerm>> {
        self.check_k(k)?;
        Ok(self
            .digits
            .iter()
            .map(|m| {
                let y: Vec<Rational> = m.iter().map(|&c| rational::int(c)).collect();
                MotherTerm { coefficient: self.mother_value(k, &y), digit: m.clone() }
            })
            .collect())
    }

    pub fn mother_wavelet(&self, k: &[i64]) -> Result<LocallyConstantFunction> {
        self.wavelet(&WaveletIndex { k: k.to_vec(), j: 0, n: vec![Rational::zero(); self.dim()] })
    }

    /// `Psi_(k;jn)(x) = p^(j/2) Psi_k(A^(-j) x - n)`.
    pub fn wavelet(&self, idx: &WaveletIndex) -> Result<LocallyConstantFunction> {
        self.check_k(&idx.k)?;
        let (p, d, j) = (self.p, self.dim(), idx.j);
        if idx.n.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: idx.n.len() });
        }
        if idx.n.iter().any(|c| &rational::fractional_part(c, p) != c) {
            return Err(Error::InvalidArgument("translation must be a canonical fraction in [0,1)^d".into()));
        }
        let aj = self.a.pow(j)?;
        let cell = self.a.pow(-(j + 1))?;
        let ajn = aj.apply(&idx.n);
        let aj_val = aj.min_valuation(p).unwrap();
        let support_level = -(vector_valuation(&ajn, p).map_or(aj_val, |v| v.min(aj_val)));
        let constancy_level = -cell.min_valuation(p).unwrap();
        let c = (constancy_level - aj_val).max(0);
        let side = (p as i64).pow(c as u32);
        let points = cartesian(&vec![(0..side).collect(); d]).into_iter().map(|y| {
            let y: Vec<Rational> = y.into_iter().map(rational::int).collect();
            let shifted: Vec<Rational> = y.iter().zip(&idx.n).map(|(a, b)| a + b).collect();
            let x = aj.apply(&shifted);
            (x, Cyclotomic::from_exponent(&self.mother_value(&idx.k, &y)))
        });
        Ok(LocallyConstantFunction::from_points(p, d, support_level, constancy_level, points)?.with_amplitude(j))
    }

    /// All indices with `|j| <= scales` and translations of digit depth `depth`.
    pub fn family(&self, scales: i64, depth: u32) -> Vec<WaveletIndex> {
        let side = (self.p as i64).pow(depth);
        let ns = cartesian(&vec![(0..side).collect(); self.dim()]);
        let mut out = Vec::new();
        for k in &self.ks {
            for j in -scales..=scales {
                for n in &ns {
                    let n = n.iter().map(|&c| rational::rat(c, side)).collect();
                    out.push(WaveletIndex { k: k.clone(), j, n });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct OrthonormalityReport {
    pub family_size: usize,
    pub pairs: usize,
    pub failures: Vec<(WaveletIndex, WaveletIndex, Scaled)>,
    /// Whether `A` passed the dilation check for the metric.
    pub dilation: bool,
}

impl OrthonormalityReport {
    pub fn passed(&self) -> bool {
        self.dilation && self.failures.is_empty()
    }
}

/// Exact Gram matrix check `<Psi_a, Psi_b> = delta_ab` over the truncated family.
pub fn orthonormality_suite(
    sys: &WaveletSystem,
    metric: &DeformedMetric,
    scales: i64,
    depth: u32,
) -> Result<OrthonormalityReport> {
    let dilation = dilation::is_dilation(sys.matrix(), metric)?.verdict;
    let family = sys.family(scales, depth);
    let funcs = family.iter().map(|i| sys.wavelet(i)).collect::<Result<Vec<_>>>()?;
    let n = funcs.len();
    let mut failures: Vec<(usize, usize, Scaled)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let funcs = &funcs;
            (a..n).filter_map(move |b| {
                let g = funcs[a].inner_product(&funcs[b]).expect("same prime and dimension");
                let ok = if a == b { g.is_one() } else { g.is_zero() };
                (!ok).then_some((a, b, g))
            })
        })
        .collect();
    failures.sort_by_key(|(a, b, _)| (*a, *b));
    Ok(OrthonormalityReport {
        family_size: n,
        pairs: n * (n + 1) / 2,
        failures: failures.into_iter().map(|(a, b, g)| (family[a].clone(), family[b].clone(), g)).collect(),
        dilation,
    })
}

/// `sum_(k; -J <= j < 0) |<Omega, Psi_(k;j0)>|^2`, exact; equals `1 - p^(-J)`.
pub fn parseval_check(sys: &WaveletSystem, scales: i64) -> Result<Rational> {
    if scales < 1 {
        return Err(Error::InvalidArgument("Parseval sum needs J >= 1".into()));
    }
    let omega = unit_indicator(sys.prime(), sys.dim());
    let mut total = Rational::zero();
    for k in sys.enumerate_k() {
        for j in -scales..0 {
            let idx = WaveletIndex { k: k.clone(), j, n: vec![Rational::zero(); sys.dim()] };
            let c = omega.inner_product(&sys.wavelet(&idx)?)?;
            let sq = Scaled { value: c.value.mul(&c.value.conj()), amp2: 2 * c.amp2 };
            total += sq
                .as_rational()
                .ok_or_else(|| Error::InvalidArgument("coefficient modulus is not rational".into()))?;
        }
    }
    Ok(total)
}

/// Export of one wavelet: index, support ball `A^j (n + Z_p^d)`, cell table
/// with root-of-unity exponents.
pub fn export_wavelet(sys: &WaveletSystem, idx: &WaveletIndex) -> Result<String> {
    let f = sys.wavelet(idx)?;
    let n: Vec<String> = idx.n.iter().map(format_rational).collect();
    Ok(format!(
        "wavelet {idx}\nmatrix {}\nsupport A^{}(({}) + Z_p^d)\n{f}",
        sys.matrix(),
        idx.j,
        n.join(",")
    ))
}
