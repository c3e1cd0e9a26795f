//! Deformed ultrametrics on `Q_p^d`, their balls, and linear isometries.
//!
//! A metric is `max_l p^(-s_l) |(Ux)_l - (Uy)_l|_p` with weight exponents
//! `0 <= s_l < 1` and an optional conjugating isometry `U`. Coordinates with
//! equal weights form blocks; blocks are ordered by decreasing `s`. Between
//! `Z_p^d` and `p Z_p^d` the balls centered at zero form a chain with one step
//! per block, and every ball is a translate of `p^j` times a chain member.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::rational::{self, format_rational, parse_rational, pow_p, Rational};
use crate::padic::{NormExponent, PadicMatrix, PadicScalar, PadicVector, RatMatrix};

#[derive(Clone, PartialEq, Eq)]
pub struct DeformedMetric {
    p: u32,
    weights: Vec<Rational>,
    conj: Option<RatMatrix>,
    conj_inv: Option<RatMatrix>,
    /// Coordinate blocks of equal weight, by decreasing weight.
    blocks: Vec<Vec<usize>>,
    /// Distinct weights, decreasing.
    levels: Vec<Rational>,
}

impl DeformedMetric {
    pub fn new(p: u32, weights: Vec<Rational>, conj: Option<RatMatrix>) -> Result<Self> {
        rational::check_prime(p)?;
        if weights.is_empty() {
            return Err(Error::InvalidMetric("no coordinates".into()));
        }
        if let Some(w) = weights.iter().find(|w| *w < &Rational::zero() || *w >= &Rational::one()) {
            return Err(Error::InvalidMetric(format!(
                "weight exponent {} outside [0, 1)",
                format_rational(w)
            )));
        }
        let conj_inv = match &conj {
            Some(u) => {
                if u.dim() != weights.len() {
                    return Err(Error::DimensionMismatch { expected: weights.len(), got: u.dim() });
                }
                let pm = PadicMatrix::from_rat(p, u, crate::padic::DEFAULT_PRECISION)?;
                if !is_isometry_standard(&pm)? {
                    return Err(Error::InvalidMetric(format!("conjugation {u} is not in O_d")));
                }
                Some(u.inv()?)
            }
            None => None,
        };
        let mut levels: Vec<Rational> = weights.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        levels.reverse();
        let blocks = levels
            .iter()
            .map(|lv| (0..weights.len()).filter(|&l| &weights[l] == lv).collect())
            .collect();
        Ok(DeformedMetric { p, weights, conj, conj_inv, blocks, levels })
    }

    pub fn standard(p: u32, d: usize) -> Result<Self> {
        Self::new(p, vec![Rational::zero(); d], None)
    }

    /// The metric `s` on `Q_2^2`: `q_1 = 2^(-s1)`, `q_2 = 1`.
    pub fn metric_s(s1: Rational) -> Result<Self> {
        Self::new(2, vec![s1, Rational::zero()], None)
    }

    /// The rotated metric `q(x, y) = s(Ux, Uy)` with `U = [[1,0],[1,1]]`.
    pub fn metric_q(s1: Rational) -> Result<Self> {
        Self::metric_s(s1)?.conjugated_by(&u_matrix())
    }

    /// Complete flag with `s_1 > s_2 > ... > s_d = 0` evenly spaced.
    pub fn complete_flag(p: u32, d: usize) -> Result<Self> {
        let weights = (0..d).map(|l| rational::rat((d - 1 - l) as i64, d as i64)).collect();
        Self::new(p, weights, None)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn conjugation(&self) -> Option<&RatMatrix> {
        self.conj.as_ref()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of chain steps from `Z_p^d` down to `p Z_p^d`.
    pub fn period(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_complete_flag(&self) -> bool {
        self.period() == self.dim()
    }

    /// Metric `x, y -> self(Vx, Vy)`.
    pub fn conjugated_by(&self, v: &RatMatrix) -> Result<Self> {
        let u = match &self.conj {
            Some(u) => u.mul(v),
            None => v.clone(),
        };
        let conj = (u != RatMatrix::identity(self.dim())).then_some(u);
        Self::new(self.p, self.weights.clone(), conj)
    }

    /// The metric whose ball chain is the annihilator chain of this one: block
    /// order reversed and conjugation `U^(-T)`. If `A` is a dilation for this
    /// metric, `A^T` is a dilation for the dual.
    pub fn dual(&self) -> Result<Self> {
        let r = self.period();
        let mut weights = vec![Rational::zero(); self.dim()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &l in block {
                weights[l] = self.levels[r - 1 - b].clone();
            }
        }
        Self::new(self.p, weights, self.conj_inv.as_ref().map(RatMatrix::transpose))
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got: d })
        }
    }

    fn exponent_from_valuations(&self, vals: impl Iterator<Item = Option<i64>>) -> NormExponent {
        vals.zip(&self.weights)
            .filter_map(|(v, s)| v.map(|v| rational::int(v) + s))
            .min()
            .map_or(NormExponent::Infinite, NormExponent::Finite)
    }

    /// Norm exponent of an exact rational vector.
    pub fn norm_exponent(&self, x: &[Rational]) -> NormExponent {
        let z;
        let x = match &self.conj {
            Some(u) => {
                z = u.apply(x);
                &z
            }
            None => x,
        };
        self.exponent_from_valuations(x.iter().map(|c| rational::valuation(c, self.p)))
    }

    pub fn norm_exponent_padic(&self, x: &PadicVector) -> Result<NormExponent> {
        self.check_dim(x.dim())?;
        if x.prime() != self.p {
            return Err(Error::PrimeMismatch(self.p, x.prime()));
        }
        let z = match &self.conj {
            Some(u) => PadicMatrix::from_rat(self.p, u, x.precision())?.apply(x)?,
            None => x.clone(),
        };
        Ok(self.exponent_from_valuations(z.components().iter().map(|c| c.valuation())))
    }

    /// Distance exponent `e` with `d(x, y) = p^(-e)`; `Infinite` iff `x = y`
    /// at the working precision.
    pub fn deformed_distance(&self, x: &PadicVector, y: &PadicVector) -> Result<NormExponent> {
        self.check_dim(x.dim())?;
        self.norm_exponent_padic(&x.sub(y)?)
    }

    pub fn distance_rational(&self, x: &[Rational], y: &[Rational]) -> NormExponent {
        let diff: Vec<Rational> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm_exponent(&diff)
    }

    fn split_position(&self, t: i64) -> (i64, usize) {
        let r = self.period() as i64;
        (t.div_euclid(r), t.rem_euclid(r) as usize)
    }

    /// Diameter exponent of the chain lattice at position `t`.
    pub fn diameter_exponent(&self, t: i64) -> Rational {
        let (j, i) = self.split_position(t);
        rational::int(j) + &self.levels[self.period() - 1 - i]
    }

    /// Smallest chain position whose diameter exponent is `>= e`.
    pub fn position_for_exponent(&self, e: &Rational) -> i64 {
        let r = self.period() as i64;
        let mut t = r * (e.floor().to_integer().try_into().unwrap_or(0i64) - 1);
        while &self.diameter_exponent(t) < e {
            t += 1;
        }
        t
    }

    /// Diagonal of `D` where the chain member at offset `i` is `U^(-1) D Z_p^d`.
    fn step_diagonal(&self, i: usize) -> Vec<bool> {
        let r = self.period();
        let mut free = vec![false; self.dim()];
        for block in &self.blocks[..r - i] {
            for &l in block {
                free[l] = true;
            }
        }
        free
    }

    /// Basis `B` with chain lattice `B Z_p^d = p^j U^(-1) D_i Z_p^d`.
    pub fn chain_lattice(&self, t: i64) -> RatMatrix {
        let (j, i) = self.split_position(t);
        let free = self.step_diagonal(i);
        let d = self.dim();
        let diag = RatMatrix::new(
            d,
            (0..d * d)
                .map(|k| {
                    if k / d != k % d {
                        Rational::zero()
                    } else if free[k / d] {
                        Rational::one()
                    } else {
                        rational::int(self.p as i64)
                    }
                })
                .collect(),
        )
        .unwrap();
        let base = match &self.conj_inv {
            Some(ui) => ui.mul(&diag),
            None => diag,
        };
        base.scale(&pow_p(self.p, j))
    }

    /// Representatives of `Lambda_t / p^(j + depth) Z_p^d`, as `p^j U^(-1) b` with
    /// `b` ranging over a box.
    fn lattice_elements(&self, t: i64, depth: u32) -> Vec<Vec<Rational>> {
        let (j, i) = self.split_position(t);
        let free = self.step_diagonal(i);
        let p = self.p as i64;
        let full = p.pow(depth);
        let ranges: Vec<Vec<i64>> = free
            .iter()
            .map(|&f| if f { (0..full).collect() } else { (0..full / p).map(|x| x * p).collect() })
            .collect();
        let scale = pow_p(self.p, j);
        cartesian(&ranges)
            .into_iter()
            .map(|b| {
                let b: Vec<Rational> = b.into_iter().map(rational::int).collect();
                let v = match &self.conj_inv {
                    Some(ui) => ui.apply(&b),
                    None => b,
                };
                v.into_iter().map(|c| c * &scale).collect()
            })
            .collect()
    }

    /// Residues modulo `p^k` of the chain lattice at position `t`, which must
    /// satisfy `p^k Z_p^d <= Lambda_t <= Z_p^d`.
    pub fn lattice_residues(&self, t: i64, k: u32) -> Result<BTreeSet<Vec<u64>>> {
        let (j, _) = self.split_position(t);
        if j < 0 || j >= k as i64 {
            return Err(Error::InvalidArgument(format!("chain position {t} not between Z_p^d and p^{k} Z_p^d")));
        }
        self.lattice_elements(t, k - j as u32)
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| rational::residue_mod_pk(c, self.p, k).and_then(|r| r.to_u64()))
                    .collect::<Option<Vec<u64>>>()
                    .ok_or_else(|| Error::InvalidArgument("lattice element not p-integral".into()))
            })
            .collect()
    }

    /// The ball `center + Lambda_t` with a canonical center.
    pub fn ball(&self, t: i64, center: &[Rational]) -> Result<Ball> {
        self.check_dim(center.len())?;
        let (j, _) = self.split_position(t);
        let reduce = |v: &[Rational]| -> Vec<Rational> {
            v.iter().map(|c| rational::reduce_mod_pk(c, self.p, j + 1)).collect()
        };
        let best = self
            .lattice_elements(t, 1)
            .iter()
            .map(|l| {
                let shifted: Vec<Rational> = center.iter().zip(l).map(|(a, b)| a + b).collect();
                reduce(&shifted)
            })
            .min()
            .expect("lattice quotient is non-empty");
        Ok(Ball { t, center: best })
    }

    /// Balls containing zero from `Z_p^d` down to `p Z_p^d`, inclusive.
    pub fn ball_chain(&self) -> Vec<Ball> {
        let zero = vec![Rational::zero(); self.dim()];
        (0..=self.period() as i64).map(|t| self.ball(t, &zero).unwrap()).collect()
    }

    pub fn ball_contains(&self, ball: &Ball, x: &[Rational]) -> bool {
        self.distance_rational(x, &ball.center) >= NormExponent::Finite(self.diameter_exponent(ball.t))
    }

    pub fn ball_contains_padic(&self, ball: &Ball, x: &PadicVector) -> Result<bool> {
        let c = PadicVector::from_rationals(self.p, &ball.center, x.precision())?;
        Ok(self.deformed_distance(x, &c)? >= NormExponent::Finite(self.diameter_exponent(ball.t)))
    }

    /// The closed ball `{y : d(x, y) <= p^(-e)}`.
    pub fn ball_of(&self, x: &[Rational], radius: &NormExponent) -> Result<Ball> {
        let e = radius
            .finite()
            .ok_or_else(|| Error::InvalidArgument("radius zero does not define a ball".into()))?;
        self.ball(self.position_for_exponent(e), x)
    }

    /// Maximal proper subballs; `p^(block size)` of them, partitioning `ball`.
    pub fn maximal_subballs(&self, ball: &Ball) -> Vec<Ball> {
        let subs: BTreeSet<Ball> = self
            .lattice_elements(ball.t, 1)
            .iter()
            .map(|l| {
                let c: Vec<Rational> = ball.center.iter().zip(l).map(|(a, b)| a + b).collect();
                self.ball(ball.t + 1, &c).unwrap()
            })
            .collect();
        subs.into_iter().collect()
    }

    /// Haar measure `mu(Lambda_t)`.
    pub fn ball_measure(&self, t: i64) -> Rational {
        let b = self.chain_lattice(t);
        let v = rational::valuation(&b.det(), self.p).unwrap();
        pow_p(self.p, -v)
    }
}

impl fmt::Debug for DeformedMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DeformedMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(format_rational).collect();
        write!(f, "p={} s=({})", self.p, w.join(","))?;
        if let Some(u) = &self.conj {
            write!(f, " U={u}")?;
        }
        Ok(())
    }
}

/// `U = [[1,0],[1,1]]`, the rotation taking the metric `s` to `q`.
pub fn u_matrix() -> RatMatrix {
    RatMatrix::from_ints(&[&[1, 0], &[1, 1]])
}

/// A ball `center + Lambda_t`; two balls are equal iff position and canonical
/// center agree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ball {
    pub t: i64,
    pub center: Vec<Rational>,
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.center.iter().map(format_rational).collect();
        write!(f, "t={} n=({})", self.t, c.join(","))
    }
}

/// All vectors with `i`-th entry drawn from `ranges[i]`, in lexicographic order.
pub fn cartesian(ranges: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for r in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                r.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Isometries of the standard metric: entries in `Z_p` and `|det|_p = 1`.
pub fn is_isometry_standard(m: &PadicMatrix) -> Result<bool> {
    if m.entries().iter().any(|e| e.valuation().is_some_and(|v| v < 0)) {
        return Ok(false);
    }
    Ok(m.det()?.valuation() == Some(0))
}

/// Isometries of a deformed metric: standard isometries that are block upper
/// triangular modulo `p` (entry `(a, b)` in `p Z_p` whenever `s_a < s_b`).
/// A conjugated metric is handled by testing `U M U^(-1)` against the base.
pub fn is_isometry_deformed(m: &PadicMatrix, metric: &DeformedMetric) -> Result<bool> {
    if m.dim() != metric.dim() {
        return Err(Error::DimensionMismatch { expected: metric.dim(), got: m.dim() });
    }
    let m = match (&metric.conj, &metric.conj_inv) {
        (Some(u), Some(ui)) => {
            let prec = m.precision();
            let pu = PadicMatrix::from_rat(metric.p, u, prec)?;
            let pui = PadicMatrix::from_rat(metric.p, ui, prec)?;
            pu.mul(m)?.mul(&pui)?
        }
        _ => m.clone(),
    };
    if !is_isometry_standard(&m)? {
        return Ok(false);
    }
    let w = &metric.weights;
    for a in 0..m.dim() {
        for b in 0..m.dim() {
            if w[a] < w[b] && m.get(a, b).valuation().is_some_and(|v| v < 1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A random element of `Q_p^d` with coordinate valuations in `[-span, span]`.
pub fn random_vector<R: Rng>(rng: &mut R, p: u32, d: usize, span: i64, precision: i64) -> PadicVector {
    let comps = (0..d)
        .map(|_| {
            if rng.gen_ratio(1, 8) {
                return PadicScalar::zero(p, precision);
            }
            let v = rng.gen_range(-span..=span);
            let len = (precision - v) as usize;
            let mut digits: Vec<u32> = (0..len).map(|_| rng.gen_range(0..p)).collect();
            digits[0] = rng.gen_range(1..p);
            PadicScalar::from_digits(p, v, &digits, precision).unwrap()
        })
        .collect();
    PadicVector::new(comps).unwrap()
}

/// Empirical isometry test: `d(Mx, My) = d(x, y)` on `trials` random pairs.
pub fn isometry_oracle<R: Rng>(
    m: &PadicMatrix,
    metric: &DeformedMetric,
    trials: usize,
    rng: &mut R,
) -> Result<bool> {
    if trials == 0 {
        return Err(Error::InvalidArgument("oracle needs at least one trial".into()));
    }
    let (p, d) = (metric.prime(), metric.dim());
    for _ in 0..trials {
        let x = random_vector(rng, p, d, 2, 12);
        let y = random_vector(rng, p, d, 2, 12);
        let before = metric.deformed_distance(&x, &y)?;
        let after = metric.deformed_distance(&m.apply(&x)?, &m.apply(&y)?)?;
        if before != after {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct MetricFile {
    prime: u32,
    dimension: usize,
    weights: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conjugation: Option<Vec<Vec<i64>>>,
}

impl DeformedMetric {
    /// Parse the metric description file (TOML with `prime`, `dimension`,
    /// `weights` as rational strings, optional integer `conjugation` rows).
    pub fn from_file_text(text: &str) -> Result<Self> {
        let f: MetricFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let weights = f.weights.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>>>()?;
        if weights.len() != f.dimension {
            return Err(Error::DimensionMismatch { expected: f.dimension, got: weights.len() });
        }
        let conj = match f.conjugation {
            Some(rows) => {
                let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
                if refs.len() != f.dimension || refs.iter().any(|r| r.len() != f.dimension) {
                    return Err(Error::Parse("conjugation must be dimension x dimension".into()));
                }
                Some(RatMatrix::from_ints(&refs))
            }
            None => None,
        };
        Self::new(f.prime, weights, conj)
    }

    pub fn to_file_text(&self) -> String {
        let f = MetricFile {
            prime: self.p,
            dimension: self.dim(),
            weights: self.weights.iter().map(format_rational).collect(),
            conjugation: self.conj.as_ref().map(|u| {
                let v = u.to_i64().expect("conjugations have integer entries");
                v.chunks(self.dim()).map(|c| c.to_vec()).collect()
            }),
        };
        toml::to_string(&f).expect("metric file serializes")
    }

    /// Inline form `s1,s2,...` optionally followed by `@` and an inline
    /// conjugation matrix, e.g. `1/2,0@1,0;1,1`.
    pub fn parse_inline(p: u32, s: &str) -> Result<Self> {
        let (w, u) = match s.split_once('@') {
            Some((w, u)) => (w, Some(RatMatrix::parse_inline(u)?)),
            None => (s, None),
        };
        let weights = w.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        if let Some(u) = &u {
            if !u.is_integer() {
                return Err(Error::Parse("conjugation entries must be integers".into()));
            }
        }
        Self::new(p, weights, u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::rational::{int, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pv(p: u32, xs: &[Rational]) -> PadicVector {
        PadicVector::from_rationals(p, xs, 16).unwrap()
    }

    #[test]
    fn undeformed_distance() {
        let m = DeformedMetric::standard(2, 2).unwrap();
        let d = m.deformed_distance(&pv(2, &[int(0), int(0)]), &pv(2, &[int(1), int(0)])).unwrap();
        assert_eq!(d, NormExponent::Finite(int(0)));
        let x = pv(2, &[int(3), rat(1, 3)]);
        assert_eq!(m.deformed_distance(&x, &x).unwrap(), NormExponent::Infinite);
    }

    #[test]
    fn metric_s_and_q_distances() {
        let s = DeformedMetric::metric_s(rat(1, 2)).unwrap();
        let d = s.deformed_distance(&pv(2, &[int(1), int(0)]), &pv(2, &[int(0), int(0)])).unwrap();
        assert_eq!(d, NormExponent::Finite(rat(1, 2)));
        // q((1,1), 0) = max(q |1|, |2|_2) = q
        let q = DeformedMetric::metric_q(rat(1, 2)).unwrap();
        let d = q.deformed_distance(&pv(2, &[int(1), int(1)]), &pv(2, &[int(0), int(0)])).unwrap();
        assert_eq!(d, NormExponent::Finite(rat(1, 2)));
    }

    #[test]
    fn chains() {
        let s = DeformedMetric::metric_s(rat(1, 2)).unwrap();
        let chain = s.ball_chain();
        assert_eq!(chain.len(), 3);
        let z = [int(0), int(0)];
        assert!(s.ball_contains(&chain[1], &[int(1), int(2)]));
        assert!(!s.ball_contains(&chain[1], &[int(0), int(1)]));
        assert!(s.ball_contains(&chain[2], &[int(2), int(2)]));
        assert!(!s.ball_contains(&chain[2], &[int(1), int(0)]));
        assert!(chain.iter().all(|b| s.ball_contains(b, &z)));
        assert_eq!(DeformedMetric::standard(3, 3).unwrap().ball_chain().len(), 2);
        assert_eq!(DeformedMetric::complete_flag(3, 3).unwrap().ball_chain().len(), 4);
        // diameters: q_1 then p^-1 q_2 = 1/2 for the pZ^2 member
        assert_eq!(s.diameter_exponent(0), int(0));
        assert_eq!(s.diameter_exponent(1), rat(1, 2));
        assert_eq!(s.diameter_exponent(2), int(1));
    }

    #[test]
    fn subballs_metric_s() {
        let s = DeformedMetric::metric_s(rat(1, 2)).unwrap();
        let unit = &s.ball_chain()[0];
        let subs = s.maximal_subballs(unit);
        assert_eq!(subs.len(), 2);
        assert_eq!(subs[0], s.ball(1, &[int(0), int(0)]).unwrap());
        assert_eq!(subs[1], s.ball(1, &[int(0), int(1)]).unwrap());
    }

    #[test]
    fn subballs_metric_q() {
        let q = DeformedMetric::metric_q(rat(1, 2)).unwrap();
        let subs = q.maximal_subballs(&q.ball_chain()[0]);
        assert_eq!(subs.len(), 2);
        // first subball is 2Z^2 u (2Z^2 + (1,1))
        assert!(q.ball_contains(&subs[0], &[int(1), int(1)]));
        assert!(q.ball_contains(&subs[0], &[int(2), int(0)]));
        assert!(!q.ball_contains(&subs[0], &[int(0), int(1)]));
        assert!(q.ball_contains(&subs[1], &[int(0), int(1)]));
        assert!(q.ball_contains(&subs[1], &[int(1), int(0)]));
    }

    #[test]
    fn ball_of_radius() {
        let s = DeformedMetric::metric_s(rat(1, 2)).unwrap();
        let b = s.ball_of(&[rat(1, 2), int(3)], &NormExponent::Finite(rat(1, 4))).unwrap();
        assert_eq!(b.t, 1);
        assert!(s.ball_contains(&b, &[rat(1, 2), int(1)]));
        assert!(s.ball_of(&[int(0), int(0)], &NormExponent::Infinite).is_err());
    }

    #[test]
    fn standard_isometries() {
        let p = |rows: &[&[i64]]| PadicMatrix::from_rat(2, &RatMatrix::from_ints(rows), 16).unwrap();
        assert!(is_isometry_standard(&p(&[&[1, 0], &[1, 1]])).unwrap());
        assert!(is_isometry_standard(&p(&[&[1, 0], &[0, 1]])).unwrap());
        let half = RatMatrix::parse_inline("1/2,0;0,2").unwrap();
        assert!(!is_isometry_standard(&PadicMatrix::from_rat(2, &half, 16).unwrap()).unwrap());
    }

    #[test]
    fn deformed_isometries_and_oracle() {
        let s = DeformedMetric::metric_s(rat(1, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = |rows: &[&[i64]]| PadicMatrix::from_rat(2, &RatMatrix::from_ints(rows), 16).unwrap();
        let upper = p(&[&[1, 1], &[0, 1]]);
        let lower = p(&[&[1, 0], &[1, 1]]);
        assert!(is_isometry_deformed(&upper, &s).unwrap());
        assert!(isometry_oracle(&upper, &s, 300, &mut rng).unwrap());
        assert!(!is_isometry_deformed(&lower, &s).unwrap());
        assert!(!isometry_oracle(&lower, &s, 300, &mut rng).unwrap());
        let squeeze = PadicMatrix::from_rat(2, &RatMatrix::parse_inline("2,0;0,1/2").unwrap(), 16).unwrap();
        assert!(!isometry_oracle(&squeeze, &s, 300, &mut rng).unwrap());
        assert!(!isometry_oracle(&p(&[&[0, 0], &[0, 0]]), &s, 10, &mut rng).unwrap());
        let std = DeformedMetric::standard(2, 2).unwrap();
        assert_eq!(
            is_isometry_deformed(&lower, &std).unwrap(),
            is_isometry_standard(&lower).unwrap()
        );
    }

    #[test]
    fn file_roundtrip() {
        let q = DeformedMetric::metric_q(rat(1, 2)).unwrap();
        let text = q.to_file_text();
        assert_eq!(DeformedMetric::from_file_text(&text).unwrap(), q);
        assert_eq!(DeformedMetric::from_file_text(&text).unwrap().to_file_text(), text);
        assert!(DeformedMetric::from_file_text("prime = 2\ndimension = 2\nweights = [\"1\", \"0\"]").is_err());
        let inline = DeformedMetric::parse_inline(2, "1/2,0@1,0;1,1").unwrap();
        assert_eq!(inline, q);
    }

    #[test]
    fn dual_of_q_has_same_chain() {
        let q = DeformedMetric::metric_q(rat(1, 2)).unwrap();
        let qd = q.dual().unwrap();
        for (a, b) in q.ball_chain().iter().zip(qd.ball_chain()) {
            assert_eq!(q.maximal_subballs(a).len(), qd.maximal_subballs(&b).len());
            for x in [[int(1), int(1)], [int(0), int(1)], [int(2), int(0)]] {
                assert_eq!(q.ball_contains(a, &x), qd.ball_contains(&b, &x));
            }
        }
    }
}
