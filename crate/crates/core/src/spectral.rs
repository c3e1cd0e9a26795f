//! Fourier transform of locally constant functions and the Fourier
//! multiplier `D^alpha f = F^(-1)(||k||^alpha F f)`.
//!
//! `F f(k) = int chi(k . x) f(x) dx`. For `f` with levels `(L, M)` the
//! transform has levels `(M, L)` and is an exact character sum over the
//! `p^(d(L+M))` cells, with values in `Q(zeta_(p^(L+M)))`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::DeformedMetric;
use crate::padic::rational::{self, format_rational, pow_p, Rational};
use crate::padic::{Cyclotomic, NormExponent};
use crate::wavelet::{refined_keys, Key, LocallyConstantFunction, WaveletIndex, WaveletSystem};

/// Largest `L + M` accepted by the character sum.
pub const MAX_TOTAL_LEVEL: i64 = 8;
/// Largest number of quotient cells `p^(d(L+M))`.
pub const MAX_CELLS: u64 = 1 << 20;
/// Tolerance of the floating point layer.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

fn check_guard(f: &LocallyConstantFunction) -> Result<u64> {
    let total = f.support_level() + f.constancy_level();
    if total > MAX_TOTAL_LEVEL {
        return Err(Error::Guard { guard: "fourier levels", detail: format!("L+M = {total} > {MAX_TOTAL_LEVEL}") });
    }
    let side = (f.prime() as u64).pow(total as u32);
    match side.checked_pow(f.dim() as u32) {
        Some(n) if n <= MAX_CELLS => Ok(side),
        _ => Err(Error::Guard {
            guard: "fourier cells",
            detail: format!("p^(d(L+M)) = {}^{} exceeds 2^20", side, f.dim()),
        }),
    }
}

fn decode(mut idx: u64, side: u64, d: usize) -> Key {
    let mut key = vec![0; d];
    for c in key.iter_mut().rev() {
        *c = idx % side;
        idx /= side;
    }
    key
}

fn dot_mod(a: &[u64], b: &[u64], m: u64) -> u64 {
    a.iter().zip(b).fold(0u64, |acc, (&x, &y)| ((acc as u128 + x as u128 * y as u128) % m as u128) as u64)
}

/// Values as integer numerators over one common denominator, with exponents
/// in `zeta_(p^level)`.
struct IntegerCells {
    cells: Vec<(Key, Vec<(u64, i128)>)>,
    denom: BigInt,
}

fn integer_cells(f: &LocallyConstantFunction, level: u32) -> Option<IntegerCells> {
    let p = f.prime();
    let mut denom = BigInt::from(1);
    for v in f.cells().values() {
        for c in v.coeffs() {
            denom = denom.lcm(c.denom());
        }
    }
    let mut cells = Vec::with_capacity(f.cells().len());
    let mut bound: u128 = 0;
    for (k, v) in f.cells() {
        let stride = (p as u64).pow(level - v.level());
        let mut terms = Vec::new();
        for (i, c) in v.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let n = (c.numer() * (&denom / c.denom())).to_i64()?;
            bound += n.unsigned_abs() as u128;
            terms.push((i as u64 * stride, n as i128));
        }
        cells.push((k.clone(), terms));
    }
    (bound < 1u128 << 100).then_some(IntegerCells { cells, denom })
}

/// Exact character sum `sum_u f(u) zeta^(sign v.u)` scaled by the cell measure.
fn transform(f: &LocallyConstantFunction, sign: i64) -> Result<LocallyConstantFunction> {
    let side = check_guard(f)?;
    let (p, d) = (f.prime(), f.dim());
    let total = (f.support_level() + f.constancy_level()) as u32;
    let level = f.cells().values().map(|v| v.level()).max().unwrap_or(0).max(total);
    let q = (p as u64).pow(level);
    let lift = q / side;
    let measure = f.cell_measure();
    let n_out = side.pow(d as u32);
    let out: Vec<(Key, Cyclotomic)> = match integer_cells(f, level) {
        Some(ic) => {
            let denom = &ic.denom * measure.denom();
            let numer = Rational::from_integer(measure.numer().clone());
            (0..n_out)
                .into_par_iter()
                .filter_map(|idx| {
                    let v = decode(idx, side, d);
                    let mut counts = vec![0i128; q as usize];
                    for (u, terms) in &ic.cells {
                        let t = dot_mod(&v, u, side) * lift;
                        let t = if sign < 0 { (q - t) % q } else { t };
                        for &(off, n) in terms {
                            counts[((t + off) % q) as usize] += n;
                        }
                    }
                    let mut val = Cyclotomic::from_exponent_counts(p, level, &counts, &denom);
                    if val.is_zero() {
                        return None;
                    }
                    if !numer.is_one() {
                        val = val.scale(&numer);
                    }
                    Some((v, val))
                })
                .collect()
        }
        None => (0..n_out)
            .into_par_iter()
            .filter_map(|idx| {
                let v = decode(idx, side, d);
                let mut sum = Cyclotomic::zero(p);
                for (u, val) in f.cells() {
                    let t = dot_mod(&v, u, side) as i64 * lift as i64;
                    sum = sum.add(&val.mul_root(level, sign * t));
                }
                let val = sum.scale(&measure);
                (!val.is_zero()).then_some((v, val))
            })
            .collect(),
    };
    Ok(LocallyConstantFunction::from_cells(p, d, f.constancy_level(), f.support_level(), out)?.with_amplitude(f.amp2()))
}

pub fn fourier(f: &LocallyConstantFunction) -> Result<LocallyConstantFunction> {
    transform(f, 1)
}

/// `F^(-1) g(x) = int chi(-k . x) g(k) dk`.
pub fn inverse_fourier(g: &LocallyConstantFunction) -> Result<LocallyConstantFunction> {
    transform(g, -1)
}

/// A function with complex float values (amplitude folded in).
#[derive(Clone, Debug)]
pub struct FloatFunction {
    pub p: u32,
    pub d: usize,
    pub support_level: i64,
    pub constancy_level: i64,
    pub values: BTreeMap<Key, Complex64>,
}

impl FloatFunction {
    pub fn from_exact(f: &LocallyConstantFunction) -> Self {
        FloatFunction {
            p: f.prime(),
            d: f.dim(),
            support_level: f.support_level(),
            constancy_level: f.constancy_level(),
            values: f.complex_cells(),
        }
    }

    pub fn refine(&self, support_level: i64, constancy_level: i64) -> FloatFunction {
        let from = (self.support_level, self.constancy_level);
        let to = (support_level, constancy_level);
        let values = self
            .values
            .iter()
            .flat_map(|(u, v)| refined_keys(self.p, from, to, u).into_iter().map(move |k| (k, *v)))
            .collect();
        FloatFunction { values, support_level, constancy_level, ..self.clone() }
    }

    /// Largest pointwise difference, compared on a common grid.
    pub fn distance(&self, other: &FloatFunction) -> f64 {
        let l = self.support_level.max(other.support_level);
        let m = self.constancy_level.max(other.constancy_level);
        let (a, b) = (self.refine(l, m), other.refine(l, m));
        a.values
            .keys()
            .chain(b.values.keys())
            .map(|k| {
                let x = a.values.get(k).copied().unwrap_or_default();
                let y = b.values.get(k).copied().unwrap_or_default();
                (x - y).norm()
            })
            .fold(0.0, f64::max)
    }
}

fn float_transform(f: &FloatFunction, sign: f64) -> Result<FloatFunction> {
    let shape = LocallyConstantFunction::zero(f.p, f.d, f.support_level, f.constancy_level)?;
    let side = check_guard(&shape)?;
    let d = f.d;
    let measure = shape.cell_measure().to_f64().unwrap();
    let n_out = side.pow(d as u32);
    let values = (0..n_out)
        .into_par_iter()
        .filter_map(|idx| {
            let v = decode(idx, side, d);
            let s: Complex64 = f
                .values
                .iter()
                .map(|(u, val)| {
                    let t = std::f64::consts::TAU * dot_mod(&v, u, side) as f64 / side as f64;
                    val * Complex64::new(t.cos(), sign * t.sin())
                })
                .sum::<Complex64>()
                * measure;
            (s.norm() > 1e-14).then_some((v, s))
        })
        .collect();
    Ok(FloatFunction {
        p: f.p,
        d,
        support_level: f.constancy_level,
        constancy_level: f.support_level,
        values,
    })
}

/// `||k||^alpha = p^(-alpha e)` as an exact exponent pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralValue {
    pub p: u32,
    pub norm: NormExponent,
    pub alpha: Rational,
}

impl SpectralValue {
    /// `alpha * e`, the value being `p^(-alpha e)`; `None` for `||0||^alpha`.
    pub fn exponent(&self) -> Option<Rational> {
        self.norm.finite().map(|e| e * &self.alpha)
    }

    pub fn mul(&self, other: &Self) -> Option<Rational> {
        Some(self.exponent()? + other.exponent()?)
    }

    /// The value as a rational when `alpha e` is an integer.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.alpha.is_zero() {
            return Some(rational::int(1));
        }
        match self.exponent() {
            None => Some(Rational::zero()),
            Some(x) if x.is_integer() => Some(pow_p(self.p, -x.to_integer().to_i64()?)),
            Some(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.alpha.is_zero() {
            return 1.0;
        }
        match self.exponent() {
            None => 0.0,
            Some(x) => (self.p as f64).powf(-x.to_f64().unwrap()),
        }
    }
}

impl fmt::Display for SpectralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent() {
            Some(x) => write!(f, "p^(-{})", format_rational(&x)),
            None => f.write_str("0"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum DAlphaResult {
    Exact(LocallyConstantFunction),
    /// Some multiplier value was irrational.
    Float(FloatFunction),
}

/// `D^alpha f = F^(-1)(||k||^alpha F f)` with `||.||` the deformed norm of
/// `metric` on the frequency side. The multiplier is constant on every cell of
/// `F f` except the one containing zero, on which `F f` must vanish when
/// `alpha != 0`.
pub fn apply_d_alpha(f: &LocallyConstantFunction, alpha: &Rational, metric: &DeformedMetric) -> Result<DAlphaResult> {
    if metric.prime() != f.prime() {
        return Err(Error::PrimeMismatch(metric.prime(), f.prime()));
    }
    if metric.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: metric.dim(), got: f.dim() });
    }
    if alpha.is_zero() {
        return Ok(DAlphaResult::Exact(f.clone()));
    }
    let g = fourier(f)?;
    let zero_key = vec![0u64; f.dim()];
    if g.cells().contains_key(&zero_key) {
        return Err(Error::SingularMultiplier(format!(
            "F f does not vanish near k = 0 (alpha = {})",
            format_rational(alpha)
        )));
    }
    let multipliers: Vec<(Key, SpectralValue)> = g
        .cells()
        .keys()
        .map(|k| {
            let norm = metric.norm_exponent(&g.point_of(k));
            (k.clone(), SpectralValue { p: f.prime(), norm, alpha: alpha.clone() })
        })
        .collect();
    if multipliers.iter().all(|(_, m)| m.as_rational().is_some()) {
        let cells = multipliers.iter().map(|(k, m)| (k.clone(), g.cells()[k].scale(&m.as_rational().unwrap())));
        let h = LocallyConstantFunction::from_cells(f.prime(), f.dim(), g.support_level(), g.constancy_level(), cells)?
            .with_amplitude(g.amp2());
        return Ok(DAlphaResult::Exact(inverse_fourier(&h)?));
    }
    let mut h = FloatFunction::from_exact(&g);
    for (k, m) in &multipliers {
        if let Some(v) = h.values.get_mut(k) {
            *v *= m.to_f64();
        }
    }
    Ok(DAlphaResult::Float(float_transform(&h, -1.0)?))
}

/// `F[Psi_l](k) = Omega(|k + (A^T)^(-1) l|_p)`, checked exactly.
pub fn fourier_mother_predicate(sys: &WaveletSystem, l: &[i64]) -> Result<bool> {
    let psi = sys.mother_wavelet(l)?;
    let lv: Vec<Rational> = l.iter().map(|&c| rational::int(c)).collect();
    let shift: Vec<Rational> = sys.dual_inverse().apply(&lv).iter().map(|c| -c).collect();
    let level = -crate::wavelet::vector_valuation(&shift, sys.prime()).unwrap_or(0).min(0);
    let expected = LocallyConstantFunction::from_points(
        sys.prime(),
        sys.dim(),
        level,
        0,
        [(shift, Cyclotomic::one(sys.prime()))],
    )?;
    Ok(fourier(&psi)?.same_function(&expected))
}

/// `||(A^T)^(-j-1) k||^alpha`, measured with `freq_metric`.
pub fn eigenvalue(sys: &WaveletSystem, freq_metric: &DeformedMetric, idx: &WaveletIndex, alpha: &Rational) -> Result<SpectralValue> {
    let m = sys.matrix().transpose().pow(-idx.j - 1)?;
    let k: Vec<Rational> = idx.k.iter().map(|&c| rational::int(c)).collect();
    Ok(SpectralValue { p: sys.prime(), norm: freq_metric.norm_exponent(&m.apply(&k)), alpha: alpha.clone() })
}

#[derive(Clone, Debug)]
pub struct EigenCheck {
    pub index: WaveletIndex,
    pub alpha: Rational,
    pub eigenvalue: SpectralValue,
    pub exact: bool,
    /// Largest pointwise deviation (0 on the exact path).
    pub residual: f64,
    pub passed: bool,
}

impl EigenCheck {
    pub fn row(&self) -> String {
        let e = self.eigenvalue.exponent().map_or("inf".to_string(), |x| format_rational(&x));
        format!(
            "{} alpha={} exponent={} {} residual={:.3e} {}",
            self.index,
            format_rational(&self.alpha),
            e,
            if self.exact { "exact" } else { "float" },
            self.residual,
            if self.passed { "ok" } else { "FAIL" }
        )
    }
}

/// `D^alpha Psi_(k;jn) = ||(A^T)^(-j-1) k||^alpha Psi_(k;jn)`, where the operator
/// and the eigenvalue both use `freq_metric`.
pub fn eigen_check(sys: &WaveletSystem, freq_metric: &DeformedMetric, idx: &WaveletIndex, alpha: &Rational) -> Result<EigenCheck> {
    let psi = sys.wavelet(idx)?;
    let lambda = eigenvalue(sys, freq_metric, idx, alpha)?;
    let (exact, residual, passed) = match apply_d_alpha(&psi, alpha, freq_metric)? {
        DAlphaResult::Exact(h) => {
            let ok = match lambda.as_rational() {
                Some(r) => h.same_function(&psi.scale_rational(&r)),
                None => false,
            };
            (true, 0.0, ok)
        }
        DAlphaResult::Float(h) => {
            let mut target = FloatFunction::from_exact(&psi);
            let lv = lambda.to_f64();
            target.values.values_mut().for_each(|v| *v *= lv);
            let r = h.distance(&target);
            (false, r, r < FLOAT_TOLERANCE)
        }
    };
    Ok(EigenCheck { index: idx.clone(), alpha: alpha.clone(), eigenvalue: lambda, exact, residual, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{cyclic_dilation, matrix_s, quincunx};
    use crate::padic::rational::{int, rat};
    use crate::padic::RatMatrix;
    use crate::wavelet::unit_indicator;

    fn exact(r: DAlphaResult) -> LocallyConstantFunction {
        match r {
            DAlphaResult::Exact(f) => f,
            DAlphaResult::Float(_) => panic!("expected exact result"),
        }
    }

    #[test]
    fn unit_ball_is_self_dual() {
        for (p, d) in [(2, 1), (2, 2), (3, 2), (5, 1)] {
            let omega = unit_indicator(p, d);
            assert!(fourier(&omega).unwrap().same_function(&omega));
        }
        let z = LocallyConstantFunction::zero(2, 2, 1, 1).unwrap();
        assert!(fourier(&z).unwrap().is_zero());
    }

    #[test]
    fn mother_fourier_identity() {
        let systems = [
            WaveletSystem::new(2, matrix_s()).unwrap(),
            WaveletSystem::new(2, quincunx()).unwrap(),
            WaveletSystem::new(3, cyclic_dilation(3, 2)).unwrap(),
            WaveletSystem::new(2, RatMatrix::from_ints(&[&[2]])).unwrap(),
            WaveletSystem::new(5, RatMatrix::from_ints(&[&[5]])).unwrap(),
        ];
        for sys in &systems {
            for k in sys.enumerate_k() {
                assert!(fourier_mother_predicate(sys, k).unwrap(), "{} {k:?}", sys.matrix());
            }
        }
    }

    #[test]
    fn inversion_and_plancherel() {
        let sys = WaveletSystem::new(3, cyclic_dilation(3, 2)).unwrap();
        let a = sys.wavelet(&WaveletIndex { k: vec![1, 0], j: -1, n: vec![rat(1, 3), rat(2, 9)] }).unwrap();
        let b = sys.wavelet(&WaveletIndex { k: vec![2, 0], j: 1, n: vec![rat(1, 3), int(0)] }).unwrap();
        let f = a.clone().with_amplitude(0).add(&b.with_amplitude(2)).unwrap().add(&unit_indicator(3, 2)).unwrap();
        let ff = fourier(&f).unwrap();
        assert!(inverse_fourier(&ff).unwrap().same_function(&f));
        assert_eq!(f.inner_product(&f).unwrap(), ff.inner_product(&ff).unwrap());
        let fa = fourier(&a).unwrap();
        assert_eq!(f.inner_product(&a).unwrap(), ff.inner_product(&fa).unwrap());
    }

    #[test]
    fn guards() {
        let big = LocallyConstantFunction::zero(2, 2, 5, 5).unwrap();
        assert!(matches!(fourier(&big), Err(Error::Guard { .. })));
        let wide = LocallyConstantFunction::zero(3, 3, 3, 2).unwrap();
        assert!(matches!(fourier(&wide), Err(Error::Guard { .. })));
    }

    #[test]
    fn d_alpha_basics() {
        let m = DeformedMetric::standard(2, 1).unwrap();
        let sys = WaveletSystem::new(2, RatMatrix::from_ints(&[&[2]])).unwrap();
        let psi = sys.mother_wavelet(&[1]).unwrap();
        assert!(exact(apply_d_alpha(&psi, &int(0), &m).unwrap()).same_function(&psi));
        let d1 = exact(apply_d_alpha(&psi, &int(1), &m).unwrap());
        assert!(d1.same_function(&psi.scale_rational(&int(2))));
        let ev = eigenvalue(&sys, &m, &WaveletIndex { k: vec![1], j: 0, n: vec![int(0)] }, &int(1)).unwrap();
        assert_eq!(ev.as_rational(), Some(int(2)));
        assert!(matches!(apply_d_alpha(&unit_indicator(2, 1), &int(1), &m), Err(Error::SingularMultiplier(_))));
        assert!(apply_d_alpha(&unit_indicator(2, 1), &int(0), &m).is_ok());
    }

    #[test]
    fn composition_adds_exponents() {
        let sys = WaveletSystem::new(2, quincunx()).unwrap();
        let metric = DeformedMetric::metric_q(rat(1, 2)).unwrap().dual().unwrap();
        let a = sys.wavelet(&WaveletIndex { k: vec![0, 1], j: 1, n: vec![rat(1, 2), int(0)] }).unwrap();
        let b = sys.wavelet(&WaveletIndex { k: vec![0, 1], j: -2, n: vec![int(0), rat(1, 4)] }).unwrap();
        let f = a.add(&b.with_amplitude(1)).unwrap();
        let d2 = exact(apply_d_alpha(&f, &int(2), &metric).unwrap());
        let d4 = exact(apply_d_alpha(&d2, &int(2), &metric).unwrap());
        assert!(d4.same_function(&exact(apply_d_alpha(&f, &int(4), &metric).unwrap())));
    }

    #[test]
    fn eigen_relation() {
        let cases = [
            (WaveletSystem::new(2, matrix_s()).unwrap(), DeformedMetric::metric_s(rat(1, 2)).unwrap()),
            (WaveletSystem::new(2, quincunx()).unwrap(), DeformedMetric::metric_q(rat(1, 2)).unwrap()),
            (
                WaveletSystem::new(3, cyclic_dilation(3, 2)).unwrap(),
                DeformedMetric::new(3, vec![rat(1, 2), int(0)], None).unwrap(),
            ),
        ];
        for (sys, metric) in &cases {
            let freq = metric.dual().unwrap();
            let p = sys.prime() as i64;
            for k in sys.enumerate_k() {
                for j in -1..=1 {
                    for n in [vec![int(0), int(0)], vec![rat(1, p), int(0)]] {
                        let idx = WaveletIndex { k: k.clone(), j, n };
                        for alpha in [int(1), int(2), rat(1, 2)] {
                            let c = eigen_check(sys, &freq, &idx, &alpha).unwrap();
                            assert!(c.passed, "{}", c.row());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn eigen_relation_needs_dual_norm_for_s() {
        let sys = WaveletSystem::new(2, matrix_s()).unwrap();
        let metric = DeformedMetric::metric_s(rat(1, 2)).unwrap();
        let idx = |j| WaveletIndex { k: vec![1, 0], j, n: vec![int(0), int(0)] };
        for j in [-2, 0, 2] {
            assert!(eigen_check(&sys, &metric, &idx(j), &int(2)).unwrap().passed);
        }
        for j in [-1, 1] {
            let c = eigen_check(&sys, &metric, &idx(j), &int(2)).unwrap();
            assert!(!c.passed, "{}", c.row());
        }
    }

    #[test]
    fn float_layer_matches_exact() {
        // alpha = 1/2 against the standard norm: all exponents are integers
        // times 1/2, so compare the float result with the rescaled exact one
        let sys = WaveletSystem::new(2, RatMatrix::from_ints(&[&[2]])).unwrap();
        let m = DeformedMetric::standard(2, 1).unwrap();
        let psi = sys.wavelet(&WaveletIndex { k: vec![1], j: 0, n: vec![rat(1, 2)] }).unwrap();
        let DAlphaResult::Float(h) = apply_d_alpha(&psi, &rat(1, 2), &m).unwrap() else {
            panic!("p^(1/2) is irrational");
        };
        let mut want = FloatFunction::from_exact(&psi);
        want.values.values_mut().for_each(|v| *v *= 2f64.sqrt());
        assert!(h.distance(&want) < FLOAT_TOLERANCE);
    }
}
