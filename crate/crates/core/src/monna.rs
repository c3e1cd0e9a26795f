//! Digit expansions with respect to an integer dilation and the map `rho`
//! from `Q_p^d` to `R^d` that reverses them:
//! `sum_i A^i x_i -> sum_i A^(-i-1) x_i`.
//!
//! The image of `Z_p^d` is the self-affine set `R = { sum_(i>=0) A^(-i-1) x_i }`,
//! sampled here by its `p^T` truncations and measured by box counting.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::cartesian;
use crate::padic::rational::{self, format_rational, pow_p, Rational};
use crate::padic::{Cyclotomic, PadicScalar, PadicVector, RatMatrix};
use crate::wavelet::LocallyConstantFunction;

/// Largest number of sample points `p^T`.
pub const MAX_POINTS: u64 = 1 << 22;

/// An integer matrix `A` with `|det A|_p = p^(-1)` and a digit set for
/// `Z_p^d / A Z_p^d` starting with `0`.
#[derive(Clone, Debug)]
pub struct DigitSystem {
    p: u32,
    a: RatMatrix,
    a_inv: RatMatrix,
    digits: Vec<Vec<i64>>,
}

impl DigitSystem {
    pub fn new(p: u32, a: RatMatrix, digits: Vec<Vec<i64>>) -> Result<Self> {
        rational::check_prime(p)?;
        if !a.is_integer() {
            return Err(Error::InvalidArgument(format!("{a} must have integer entries")));
        }
        if rational::valuation(&a.det(), p) != Some(1) {
            return Err(Error::InvalidArgument(format!("|det {a}|_p must be p^-1")));
        }
        let a_inv = a.inv()?;
        let d = a.dim();
        if digits.len() != p as usize {
            return Err(Error::InvalidArgument(format!("need {p} digits, got {}", digits.len())));
        }
        if digits.iter().any(|x| x.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: digits[0].len() });
        }
        if digits[0].iter().any(|&c| c != 0) {
            return Err(Error::InvalidArgument("first digit must be 0".into()));
        }
        let sys = DigitSystem { p, a, a_inv, digits };
        for i in 0..sys.digits.len() {
            for j in 0..i {
                let diff: Vec<Rational> =
                    sys.digits[i].iter().zip(&sys.digits[j]).map(|(x, y)| rational::int(x - y)).collect();
                if sys.in_image(&diff) {
                    return Err(Error::InvalidArgument(format!(
                        "digits {:?} and {:?} agree modulo A Z_p^d",
                        sys.digits[i], sys.digits[j]
                    )));
                }
            }
        }
        Ok(sys)
    }

    /// Lexicographic digits in `{0..p-1}^d`.
    pub fn standard(p: u32, a: RatMatrix) -> Result<Self> {
        let d = a.dim();
        let inv = a.inv()?;
        let mut digits: Vec<Vec<i64>> = Vec::new();
        for u in cartesian(&vec![(0..p as i64).collect(); d]) {
            let fresh = digits.iter().all(|r| {
                let diff: Vec<Rational> = u.iter().zip(r).map(|(x, y)| rational::int(x - y)).collect();
                !inv.apply(&diff).iter().all(|c| rational::is_p_integral(c, p))
            });
            if fresh {
                digits.push(u);
            }
        }
        Self::new(p, a, digits)
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

    pub fn digits(&self) -> &[Vec<i64>] {
        &self.digits
    }

    fn in_image(&self, x: &[Rational]) -> bool {
        self.a_inv.apply(x).iter().all(|c| rational::is_p_integral(c, self.p))
    }

    fn digit_vec(&self, i: usize) -> Vec<Rational> {
        self.digits[i].iter().map(|&c| rational::int(c)).collect()
    }

    pub fn header(&self) -> String {
        let digits: Vec<String> = self
            .digits
            .iter()
            .map(|x| format!("({})", x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("p={} A={} digits={}", self.p, self.a, digits.join(" "))
    }
}

/// `x = sum_(i = start)^(start + len - 1) A^i n_(digits[i - start])` modulo
/// `A^(start + len) Z_p^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    pub start: i64,
    pub digits: Vec<usize>,
}

/// Digits of `x` up to index `depth`, by the recursion `x_0 = x mod A`,
/// `x <- A^(-1) (x - x_0)`.
pub fn digit_expansion_rational(x: &[Rational], sys: &DigitSystem, depth: i64) -> Result<DigitExpansion> {
    if x.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: x.len() });
    }
    let p = sys.p;
    if x.iter().any(|c| !c.is_zero() && rational::valuation(c, p).is_none()) {
        return Err(Error::InvalidArgument("not a p-adic number".into()));
    }
    let integral = |v: &[Rational]| v.iter().all(|c| rational::is_p_integral(c, p));
    let mut start = 0i64;
    let mut y = x.to_vec();
    while !integral(&y) {
        y = sys.a.apply(&y);
        start -= 1;
        if start < -256 {
            return Err(Error::InvalidArgument("digit expansion does not start".into()));
        }
    }
    let mut digits = Vec::new();
    for i in start..=depth {
        let n = (0..sys.digits.len())
            .find(|&l| {
                let diff: Vec<Rational> = y.iter().zip(sys.digit_vec(l)).map(|(a, b)| a - b).collect();
                sys.in_image(&diff)
            })
            .ok_or(Error::NoMatchingDigit(i))?;
        let diff: Vec<Rational> = y.iter().zip(sys.digit_vec(n)).map(|(a, b)| a - b).collect();
        y = sys.a_inv.apply(&diff);
        digits.push(n);
    }
    Ok(DigitExpansion { start, digits })
}

pub fn digit_expansion(x: &PadicVector, sys: &DigitSystem, depth: i64) -> Result<DigitExpansion> {
    if x.prime() != sys.p {
        return Err(Error::PrimeMismatch(sys.p, x.prime()));
    }
    digit_expansion_rational(&x.to_rationals(), sys, depth)
}

/// `sum_i A^i n_(x_i)`, exact.
pub fn resum(exp: &DigitExpansion, sys: &DigitSystem) -> Result<Vec<Rational>> {
    let mut acc = vec![Rational::zero(); sys.dim()];
    for (off, &n) in exp.digits.iter().enumerate() {
        let term = sys.a.pow(exp.start + off as i64)?.apply(&sys.digit_vec(n));
        acc.iter_mut().zip(term).for_each(|(a, t)| *a += t);
    }
    Ok(acc)
}

/// Whether `x - y` lies in `A^k Z_p^d`.
pub fn congruent(x: &[Rational], y: &[Rational], sys: &DigitSystem, k: i64) -> Result<bool> {
    let diff: Vec<Rational> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    Ok(sys.a.pow(-k)?.apply(&diff).iter().all(|c| rational::is_p_integral(c, sys.p)))
}

/// `sum_i A^(-i-1) n_(x_i)` over an expansion.
pub fn rho_of_expansion(exp: &DigitExpansion, sys: &DigitSystem) -> Result<Vec<Rational>> {
    let mut acc = vec![Rational::zero(); sys.dim()];
    for (off, &n) in exp.digits.iter().enumerate() {
        let term = sys.a.pow(-(exp.start + off as i64) - 1)?.apply(&sys.digit_vec(n));
        acc.iter_mut().zip(term).for_each(|(a, t)| *a += t);
    }
    Ok(acc)
}

/// `rho(x)` truncated after digit index `depth`.
pub fn rho(x: &PadicVector, sys: &DigitSystem, depth: i64) -> Result<Vec<Rational>> {
    rho_of_expansion(&digit_expansion(x, sys, depth)?, sys)
}

pub fn rho_rational(x: &[Rational], sys: &DigitSystem, depth: i64) -> Result<Vec<Rational>> {
    rho_of_expansion(&digit_expansion_rational(x, sys, depth)?, sys)
}

/// The one dimensional Monna map `sum x_i p^i -> sum x_i p^(-i-1)` on the
/// known digits.
pub fn monna_1d(x: &PadicScalar) -> Rational {
    let Some(v) = x.valuation() else {
        return Rational::zero();
    };
    x.digits()
        .iter()
        .enumerate()
        .map(|(off, &c)| rational::int(c as i64) * pow_p(x.prime(), -(v + off as i64) - 1))
        .sum()
}

/// Truncated tile points `sum_(i<T) A^(-i-1) x_i` as integer numerators over
/// a shared denominator. Point `idx` has digits given by the base-`p` digits
/// of `idx`, most significant first.
#[derive(Clone, Debug)]
pub struct RealPointSet {
    pub p: u32,
    pub d: usize,
    pub depth: u32,
    pub scale: i64,
    pub numerators: Vec<i64>,
    pub header: String,
}

impl RealPointSet {
    pub fn len(&self) -> usize {
        self.numerators.len() / self.d.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> Vec<Rational> {
        self.numerators[i * self.d..(i + 1) * self.d]
            .iter()
            .map(|&n| Rational::new(n.into(), self.scale.into()))
            .collect()
    }

    pub fn digits_of(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.depth as usize];
        for c in out.iter_mut().rev() {
            *c = i % self.p as usize;
            i /= self.p as usize;
        }
        out
    }

    /// CSV with a `#` header; `precision` decimal digits per coordinate.
    pub fn to_csv(&self, precision: usize, grid: Option<i64>) -> String {
        let mut out = format!("# {} T={}", self.header, self.depth);
        if let Some(m) = grid {
            let _ = write!(out, " m={m}");
        }
        out.push('\n');
        let cols: Vec<String> = (1..=self.d).map(|i| format!("x{i}")).collect();
        out += &cols.join(",");
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.point(i).iter().map(|c| rational::to_decimal(c, precision)).collect();
            out += &row.join(",");
            out.push('\n');
        }
        out
    }
}

/// All `p^T` truncations of the series defining `R`.
pub fn sample_r(sys: &DigitSystem, depth: u32) -> Result<RealPointSet> {
    let p = sys.p as u64;
    let count = p.checked_pow(depth).filter(|&n| n <= MAX_POINTS).ok_or_else(|| Error::Guard {
        guard: "sample points",
        detail: format!("{p}^{depth} exceeds 2^22"),
    })?;
    if depth == 0 {
        return Err(Error::InvalidArgument("series depth must be at least 1".into()));
    }
    let d = sys.dim();
    let b = sys.a.pow(-(depth as i64))?;
    let mut denom = BigInt::one();
    for e in b.entries() {
        denom = denom.lcm(e.denom());
    }
    let overflow = || Error::Guard { guard: "point numerators", detail: "do not fit in 64 bits".into() };
    let scale = denom.to_i64().ok_or_else(overflow)?;
    let numer: Vec<i128> = b
        .entries()
        .iter()
        .map(|e| (e * Rational::from_integer(denom.clone())).to_integer().to_i128())
        .collect::<Option<_>>()
        .ok_or_else(overflow)?;
    let a: Vec<i128> = sys.a.to_i64().unwrap().into_iter().map(|x| x as i128).collect();
    let digits: Vec<Vec<i128>> = sys.digits.iter().map(|x| x.iter().map(|&c| c as i128).collect()).collect();
    // Horner level by level: children of w are A w + x, in digit order.
    let mut ws: Vec<i128> = vec![0; d];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(ws.len() * digits.len());
        for w in ws.chunks(d) {
            let aw: Vec<i128> = (0..d)
                .map(|r| (0..d).try_fold(0i128, |acc, c| acc.checked_add(a[r * d + c].checked_mul(w[c])?)))
                .collect::<Option<_>>()
                .ok_or_else(overflow)?;
            for x in &digits {
                next.extend(aw.iter().zip(x).map(|(u, v)| u + v));
            }
        }
        ws = next;
    }
    debug_assert_eq!(ws.len() as u64, count * d as u64);
    let numerators: Vec<i64> = ws
        .par_chunks(d)
        .flat_map_iter(|w| {
            (0..d).map(|r| {
                (0..d)
                    .try_fold(0i128, |acc, c| acc.checked_add(numer[r * d + c].checked_mul(w[c])?))
                    .and_then(|v| v.to_i64())
            })
        })
        .collect::<Option<_>>()
        .ok_or_else(overflow)?;
    Ok(RealPointSet { p: sys.p, d, depth, scale, numerators, header: sys.header() })
}

/// Occupied grid cells of side `p^(-m)`.
fn occupied(points: &RealPointSet, m: u32) -> HashSet<Vec<i64>> {
    let f = (points.p as i128).pow(m);
    let s = points.scale as i128;
    points
        .numerators
        .par_chunks(points.d)
        .map(|x| x.iter().map(|&n| ((n as i128 * f).div_euclid(s)) as i64).collect::<Vec<i64>>())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureEstimate {
    pub grid: u32,
    /// Occupied cells times cell volume.
    pub outer: Rational,
    /// Cells all of whose corners lie within the truncation error of a
    /// sample point. Zero when `A^(-T)` does not contract in the sup norm.
    pub inner: Rational,
    pub occupied: usize,
}

/// Bound on `|x - x_T|_inf` for `x` in `R` and `x_T` its truncation after `T`
/// digits: `R = R_T + A^(-T) R` gives `sup|R| <= sup|R_T| / (1 - |A^(-T)|)`.
fn truncation_error(points: &RealPointSet, sys: &DigitSystem) -> Result<Option<Rational>> {
    let b = sys.a.pow(-(points.depth as i64))?;
    let n = b.dim();
    let norm = (0..n)
        .map(|r| (0..n).map(|c| b.get(r, c).abs()).sum::<Rational>())
        .max()
        .unwrap_or_else(Rational::zero);
    if norm >= Rational::one() {
        return Ok(None);
    }
    let top = points.numerators.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0);
    let sup = Rational::new(top.into(), points.scale.into());
    Ok(Some(&norm * sup / (Rational::one() - &norm)))
}

/// Box-counting bracket for the Lebesgue measure of `R`.
pub fn estimate_measure(points: &RealPointSet, sys: &DigitSystem, m: u32) -> Result<MeasureEstimate> {
    let d = points.d;
    let f = (points.p as i128).pow(m);
    let s = points.scale as i128;
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, x) in points.numerators.chunks(d).enumerate() {
        let cell = x.iter().map(|&n| (n as i128 * f).div_euclid(s) as i64).collect();
        buckets.entry(cell).or_default().push(i);
    }
    let vol = pow_p(points.p, -(d as i64) * m as i64);
    let inner = match truncation_error(points, sys)? {
        None => 0,
        Some(delta) => {
            // distances in units of 1 / (scale p^m)
            let units = (delta * Rational::from_integer((s * f).into())).ceil().to_integer();
            let units = units.to_i128().ok_or(Error::Guard { guard: "truncation error", detail: "too large".into() })?;
            let reach = (units / s) as i64 + 1;
            let around: Vec<Vec<i64>> = cartesian(&vec![(-reach..reach).collect(); d]);
            let hit = |corner: &Vec<i64>| {
                around.iter().any(|o| {
                    let cell: Vec<i64> = corner.iter().zip(o).map(|(a, b)| a + b).collect();
                    buckets.get(&cell).is_some_and(|ids| {
                        ids.iter().any(|&i| {
                            let x = &points.numerators[i * d..(i + 1) * d];
                            x.iter().zip(corner).all(|(&n, &c)| (n as i128 * f - c as i128 * s).abs() <= units)
                        })
                    })
                })
            };
            let corners: HashSet<Vec<i64>> = buckets
                .keys()
                .flat_map(|c| cartesian(&vec![vec![0, 1]; d]).into_iter().map(move |o| c.iter().zip(o).map(|(a, b)| a + b).collect()))
                .collect();
            let good: HashSet<&Vec<i64>> = corners.par_iter().filter(|c| hit(c)).collect();
            let offsets = cartesian(&vec![vec![0, 1]; d]);
            buckets
                .keys()
                .filter(|c| {
                    offsets.iter().all(|o| {
                        let k: Vec<i64> = c.iter().zip(o).map(|(a, b)| a + b).collect();
                        good.contains(&k)
                    })
                })
                .count()
        }
    };
    Ok(MeasureEstimate {
        grid: m,
        outer: Rational::from_integer(buckets.len().into()) * &vol,
        inner: Rational::from_integer(inner.into()) * vol,
        occupied: buckets.len(),
    })
}

/// Box-counting estimate of `mu(R n (R + k))`, `k` a nonzero integer vector.
pub fn overlap_measure(points: &RealPointSet, k: &[i64], m: u32) -> Result<Rational> {
    if k.len() != points.d {
        return Err(Error::DimensionMismatch { expected: points.d, got: k.len() });
    }
    if k.iter().all(|&c| c == 0) {
        return Err(Error::InvalidArgument("overlap needs k != 0".into()));
    }
    let cells = occupied(points, m);
    let shift = (points.p as i64).pow(m);
    let shared = cells
        .par_iter()
        .filter(|c| {
            let s: Vec<i64> = c.iter().zip(k).map(|(a, b)| a + b * shift).collect();
            cells.contains(&s)
        })
        .count();
    Ok(Rational::from_integer(shared.into()) * pow_p(points.p, -(points.d as i64) * m as i64))
}

/// Whether `|det A|_p = |det A|^(-1)`, for an integer matrix.
pub fn det_compatibility(a: &RatMatrix, p: u32) -> Result<bool> {
    if !a.is_integer() {
        return Err(Error::InvalidArgument(format!("{a} must have integer entries")));
    }
    let det = a.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let v = rational::valuation(&det, p).unwrap();
    Ok(det.abs() == pow_p(p, v))
}

/// A piece `[lo, hi)` of a real function with constant value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub value: Cyclotomic,
}

/// The `rho`-image of a one dimensional function for `A = [p]` with digits
/// `0..p-1`: each cell `c + p^M Z_p` maps onto `[rho(c), rho(c) + p^(-M))`.
/// Adjacent pieces with equal values are merged. The amplitude is ignored.
pub fn real_image_1d(f: &LocallyConstantFunction) -> Result<Vec<Interval>> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
    }
    let p = f.prime();
    let sys = DigitSystem::standard(p, RatMatrix::from_ints(&[&[p as i64]]))?;
    let m = f.constancy_level();
    let width = pow_p(p, -m);
    let mut pieces: Vec<Interval> = f
        .cells()
        .iter()
        .map(|(k, v)| {
            let x = f.point_of(k);
            let lo = rho_rational(&x, &sys, m - 1).map(|r| r[0].clone())?;
            Ok(Interval { hi: &lo + &width, lo, value: v.clone() })
        })
        .collect::<Result<_>>()?;
    pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::new();
    for piece in pieces {
        match merged.last_mut() {
            Some(last) if last.hi == piece.lo && last.value == piece.value => last.hi = piece.hi,
            _ => merged.push(piece),
        }
    }
    Ok(merged)
}

pub fn export_intervals(header: &str, pieces: &[Interval]) -> String {
    let mut out = format!("# {header}\nlo,hi,value\n");
    for iv in pieces {
        let _ = writeln!(out, "{},{},{}", format_rational(&iv.lo), format_rational(&iv.hi), iv.value);
    }
    out
}

/// The real Haar wavelet `+1` on `[0, 1/2)`, `-1` on `[1/2, 1)`, shifted by `shift`.
pub fn haar(shift: &Rational) -> Vec<Interval> {
    let one = Cyclotomic::one(2);
    vec![
        Interval { lo: shift.clone(), hi: shift + rational::rat(1, 2), value: one.clone() },
        Interval { lo: shift + rational::rat(1, 2), hi: shift + rational::int(1), value: one.neg() },
    ]
}

/// The 2-adic mother wavelet `chi(x/2) Omega(|x|_2)` and its translate by
/// `1/2` map to the Haar wavelet on `[0,1)` and `[1,2)`.
pub fn haar_image_check() -> Result<bool> {
    let sys = crate::wavelet::WaveletSystem::new(2, RatMatrix::from_ints(&[&[2]]))?;
    let mother = sys.mother_wavelet(&[1])?;
    let moved = sys.wavelet(&crate::wavelet::WaveletIndex { k: vec![1], j: 0, n: vec![rational::rat(1, 2)] })?;
    let zero = LocallyConstantFunction::zero(2, 1, 0, 0)?;
    Ok(real_image_1d(&mother)? == haar(&Rational::zero())
        && real_image_1d(&moved)? == haar(&rational::int(1))
        && real_image_1d(&zero)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::quincunx;
    use crate::padic::rational::{int, rat};

    fn one_d(p: u32, digits: &[i64]) -> DigitSystem {
        DigitSystem::new(p, RatMatrix::from_ints(&[&[p as i64]]), digits.iter().map(|&c| vec![c]).collect()).unwrap()
    }

    #[test]
    fn systems() {
        let q = DigitSystem::standard(2, quincunx()).unwrap();
        assert_eq!(q.digits(), &[vec![0, 0], vec![0, 1]]);
        assert!(DigitSystem::new(2, quincunx(), vec![vec![0, 0], vec![1, 1]]).is_err());
        assert!(DigitSystem::new(2, RatMatrix::parse_inline("1/2,0;0,4").unwrap(), vec![vec![0, 0], vec![1, 0]]).is_err());
        assert!(DigitSystem::new(2, RatMatrix::from_ints(&[&[4]]), vec![vec![0], vec![1]]).is_err());
        assert!(DigitSystem::new(2, RatMatrix::from_ints(&[&[2]]), vec![vec![1], vec![0]]).is_err());
    }

    #[test]
    fn expansions() {
        let sys = one_d(3, &[0, 1, 2]);
        // 1/3 + 2/9 + 1 = digits at -2..0: 2, 1, 1
        let x = [rat(1, 3) + rat(2, 9) + int(1)];
        let e = digit_expansion_rational(&x, &sys, 2).unwrap();
        assert_eq!(e.start, -2);
        assert_eq!(e.digits, vec![2, 1, 1, 0, 0]);
        let q = DigitSystem::standard(2, quincunx()).unwrap();
        let x = [int(1), int(0)];
        let e = digit_expansion_rational(&x, &q, 10).unwrap();
        assert!(congruent(&resum(&e, &q).unwrap(), &x, &q, 11).unwrap());
        let digit = [int(0), int(1)];
        assert_eq!(digit_expansion_rational(&digit, &q, 3).unwrap().digits, vec![1, 0, 0, 0]);
        let px = PadicVector::from_rationals(2, &x, 24).unwrap();
        assert_eq!(digit_expansion(&px, &q, 10).unwrap(), e);
    }

    #[test]
    fn monna_values() {
        assert_eq!(monna_1d(&PadicScalar::from_rational(2, &rat(1, 2), 8).unwrap()), int(1));
        assert_eq!(monna_1d(&PadicScalar::zero(2, 8)), int(0));
        assert_eq!(monna_1d(&PadicScalar::from_int(2, 3, 8)), rat(3, 4));
        let sys = one_d(2, &[0, 1]);
        let x = PadicVector::from_rationals(2, &[rat(13, 4)], 16).unwrap();
        assert_eq!(rho(&x, &sys, 6).unwrap()[0], monna_1d(x.get(0)));
        assert_eq!(rho(&PadicVector::zero(2, 1, 16), &sys, 6).unwrap(), vec![int(0)]);
    }

    #[test]
    fn alternative_digits_stretch_the_image() {
        // digits {0, 1+p, ..., (p-1)(1+p)}
        let p = 3;
        let sys = one_d(p, &[0, 4, 8]);
        let pts = sample_r(&sys, 6).unwrap();
        let hi = pts.numerators.iter().max().unwrap();
        assert!(Rational::new((*hi).into(), pts.scale.into()) <= int(4));
        assert!(pts.numerators.iter().all(|&n| n >= 0));
    }

    #[test]
    fn small_samples() {
        let pts = sample_r(&one_d(2, &[0, 1]), 3).unwrap();
        let xs: Vec<Rational> = (0..8).map(|i| pts.point(i)[0].clone()).collect();
        assert_eq!(xs, (0..8).map(|i| rat(i, 8)).collect::<Vec<_>>());
        assert_eq!(pts.digits_of(6), vec![1, 1, 0]);
        assert!(sample_r(&one_d(2, &[0, 1]), 23).is_err());
        let three = sample_r(&one_d(2, &[0, 3]), 12).unwrap();
        assert!(three.numerators.iter().all(|&n| n >= 0 && n <= 3 * three.scale));
        let csv = pts.to_csv(4, Some(2));
        assert!(csv.starts_with("# p=2 A=[2] digits=(0) (1) T=3 m=2\nx1\n0.0000\n0.1250\n"));
    }

    #[test]
    fn one_d_measures() {
        let sys = one_d(2, &[0, 1]);
        let pts = sample_r(&sys, 12).unwrap();
        for m in 1..=12 {
            let e = estimate_measure(&pts, &sys, m).unwrap();
            assert_eq!((e.outer, e.inner), (int(1), int(1)));
        }
        assert_eq!(overlap_measure(&pts, &[1], 8).unwrap(), int(0));
        let three = one_d(2, &[0, 3]);
        let wide = sample_r(&three, 14).unwrap();
        let e = estimate_measure(&wide, &three, 8).unwrap();
        assert_eq!((e.outer, e.inner), (int(3), int(3)));
        assert_eq!(overlap_measure(&wide, &[1], 8).unwrap(), int(2));
        assert!(overlap_measure(&wide, &[0], 8).is_err());
    }

    #[test]
    fn incompatible_determinant_fails_condition_a() {
        let six = DigitSystem::new(2, RatMatrix::from_ints(&[&[6]]), vec![vec![0], vec![1]]).unwrap();
        assert!(!det_compatibility(six.matrix(), 2).unwrap());
        let pts = sample_r(&six, 16).unwrap();
        assert!(estimate_measure(&pts, &six, 8).unwrap().outer < rat(1, 2));
        assert!(det_compatibility(&quincunx(), 2).unwrap());
        assert!(det_compatibility(&RatMatrix::from_ints(&[&[5]]), 5).unwrap());
    }

    #[test]
    fn quincunx_tile_brackets_one() {
        let q = DigitSystem::standard(2, quincunx()).unwrap();
        let pts = sample_r(&q, 16).unwrap();
        let e = estimate_measure(&pts, &q, 5).unwrap();
        assert!(e.inner <= int(1) && int(1) <= e.outer, "{e:?}");
    }

    #[test]
    fn haar() {
        assert!(haar_image_check().unwrap());
    }

    #[test]
    fn translation_identity() {
        // rho(A^j (n + z)) = A^(-j) (rho(n) + rho(z)) for n with negative digits only
        let q = DigitSystem::standard(2, quincunx()).unwrap();
        let n = resum(&DigitExpansion { start: -3, digits: vec![1, 0, 1] }, &q).unwrap();
        let z = resum(&DigitExpansion { start: 0, digits: vec![1, 1, 0, 1] }, &q).unwrap();
        let sum: Vec<Rational> = n.iter().zip(&z).map(|(a, b)| a + b).collect();
        for j in -2..=2 {
            let aj = q.matrix().pow(j).unwrap();
            let lhs = rho_rational(&aj.apply(&sum), &q, 3 + j).unwrap();
            let rn = rho_rational(&n, &q, 3).unwrap();
            let rz = rho_rational(&z, &q, 3).unwrap();
            let inner: Vec<Rational> = rn.iter().zip(&rz).map(|(a, b)| a + b).collect();
            assert_eq!(lhs, q.matrix().pow(-j).unwrap().apply(&inner), "j={j}");
        }
    }
}
