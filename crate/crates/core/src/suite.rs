//! The end-to-end verification suite: nine criteria covering isometries,
//! dilations, wavelet bases, spectral identities, tiles and core invariants.
//!
//! Details are deterministic for a fixed seed; wall-clock time is reported
//! separately so that reports can be compared byte for byte.

use std::time::{Duration, Instant};

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dilation::{
    class_mod4, conjugate_dilation, cyclic_dilation, is_dilation, lift_class, matrix_s, quincunx,
    s_dilation_classify, verify_quincunx_actions,
};
use crate::error::Result;
use crate::metric::{is_isometry_deformed, isometry_oracle, u_matrix, DeformedMetric};
use crate::monna::{det_compatibility, estimate_measure, haar_image_check, overlap_measure, sample_r, DigitSystem};
use crate::padic::character::{character, character_of_rational};
use crate::padic::rational::{int, pow_p, rat, valuation};
use crate::padic::{PadicMatrix, PadicScalar, RatMatrix, Rational};
use crate::spectral::{eigen_check, fourier, fourier_mother_predicate, inverse_fourier, FLOAT_TOLERANCE};
use crate::wavelet::{orthonormality_suite, parseval_check, WaveletSystem};

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const ORACLE_TRIALS: usize = 1000;
pub const PROPERTY_CASES: usize = 10_000;
pub const OVERLAP_BOUND: f64 = 0.1;
pub const AREA_RANGE: (f64, f64) = (0.9, 1.3);

pub const NAMES: [&str; 9] = [
    "isometry classification",
    "s-dilation classification",
    "ball actions",
    "orthonormality",
    "Parseval partial sums",
    "mother wavelet Fourier identity",
    "eigenfunction relation",
    "Monna map and tiles",
    "core invariants",
];

const LIMITS: [Option<u64>; 9] = [Some(10), Some(5), None, Some(60), None, None, None, Some(120), None];

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub number: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CriterionReport {
    pub fn within_limit(&self) -> bool {
        self.limit.is_none_or(|l| self.elapsed < l)
    }

    /// `PASS n. name: detail`, optionally with the timing against its bound.
    pub fn line(&self, timing: bool) -> String {
        let ok = self.passed && (!timing || self.within_limit());
        let mut out = format!("{} {}. {}: {}", if ok { "PASS" } else { "FAIL" }, self.number, self.name, self.detail);
        if timing {
            out += &format!(" [{:.2}s", self.elapsed.as_secs_f64());
            if let Some(l) = self.limit {
                out += &format!(" < {}s", l.as_secs());
            }
            out.push(']');
        }
        out
    }
}

/// Run criterion `number` (1 to 9).
pub fn run(number: usize, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let result = match number {
        1 => isometries(seed),
        2 => s_dilations(),
        3 => actions(),
        4 => orthonormality(),
        5 => parseval(),
        6 => fourier_mother(),
        7 => eigen(),
        8 => monna(),
        9 => invariants(seed),
        _ => panic!("criteria are numbered 1 to 9"),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport {
        number,
        name: NAMES[number - 1],
        passed,
        detail,
        elapsed: start.elapsed(),
        limit: LIMITS[number - 1].map(Duration::from_secs),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    (1..=9).map(|n| run(n, seed)).collect()
}

type Verdict = Result<(bool, String)>;

fn isometries(seed: u64) -> Verdict {
    let mut parts = Vec::new();
    let mut disagreements = Vec::new();
    for p in [2u32, 3] {
        let metric = DeformedMetric::complete_flag(p, 2)?;
        let m = (p * p) as u64;
        let results: Vec<(u64, bool, bool)> = (0..m.pow(4))
            .into_par_iter()
            .map(|idx| {
                let e: Vec<i64> = (0..4).map(|i| (idx / m.pow(i) % m) as i64).collect();
                let a = RatMatrix::from_ints(&[&[e[0], e[1]], &[e[2], e[3]]]);
                let pm = PadicMatrix::from_rat(p, &a, 12)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (idx << 8) ^ p as u64);
                let classified = is_isometry_deformed(&pm, &metric)?;
                Ok((idx, classified, isometry_oracle(&pm, &metric, ORACLE_TRIALS, &mut rng)?))
            })
            .collect::<Result<_>>()?;
        let iso = results.iter().filter(|r| r.1).count();
        disagreements.extend(results.iter().filter(|r| r.1 != r.2).map(|r| (p, r.0)));
        parts.push(format!("p={p}: {iso}/{} isometry classes", results.len()));
    }
    let detail = format!(
        "{}; {ORACLE_TRIALS} oracle trials each; {} disagreements {disagreements:?}",
        parts.join(", "),
        disagreements.len()
    );
    Ok((disagreements.is_empty(), detail))
}

fn s_dilations() -> Verdict {
    let s = DeformedMetric::metric_s(rat(1, 2))?;
    let mut mismatches = 0;
    let mut dilations = 0;
    for idx in 0..256 {
        let class = class_mod4(idx);
        let expected = s_dilation_classify(&lift_class(class, 4, 0))?;
        dilations += expected as usize;
        for shift in 0..3 {
            if is_dilation(&lift_class(class, 4, shift * 37), &s)?.verdict != expected {
                mismatches += 1;
            }
        }
    }
    let uqu = u_matrix().mul(&quincunx()).mul(&u_matrix().inv()?);
    let named = is_dilation(&matrix_s(), &s)?.verdict
        && !is_dilation(&quincunx(), &s)?.verdict
        && is_dilation(&uqu, &s)?.verdict
        && is_dilation(&conjugate_dilation(2, &quincunx(), &u_matrix())?, &s)?.verdict;
    Ok((
        mismatches == 0 && named,
        format!("{dilations}/256 classes are s-dilations, {mismatches} mismatches over 3 lifts each; S yes, Q no, UQU^-1 yes: {named}"),
    ))
}

fn actions() -> Verdict {
    let checks = verify_quincunx_actions();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.holds).map(|c| c.name).collect();
    Ok((failed.is_empty(), format!("{}/{} identities hold {failed:?}", checks.len() - failed.len(), checks.len())))
}

struct Family {
    name: &'static str,
    sys: WaveletSystem,
    metric: DeformedMetric,
}

fn families() -> Result<Vec<Family>> {
    Ok(vec![
        Family { name: "S/s", sys: WaveletSystem::new(2, matrix_s())?, metric: DeformedMetric::metric_s(rat(1, 2))? },
        Family { name: "Q/q", sys: WaveletSystem::new(2, quincunx())?, metric: DeformedMetric::metric_q(rat(1, 2))? },
        Family {
            name: "cyclic(3,2)",
            sys: WaveletSystem::new(3, cyclic_dilation(3, 2))?,
            metric: DeformedMetric::complete_flag(3, 2)?,
        },
    ])
}

fn orthonormality() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for f in families()? {
        let r = orthonormality_suite(&f.sys, &f.metric, 2, 2)?;
        pass &= r.passed() && r.pairs >= 400;
        parts.push(format!("{} {} functions {} pairs {} failures", f.name, r.family_size, r.pairs, r.failures.len()));
    }
    Ok((pass, parts.join("; ")))
}

fn parseval() -> Verdict {
    let systems = [
        WaveletSystem::new(2, RatMatrix::from_ints(&[&[2]]))?,
        WaveletSystem::new(3, RatMatrix::from_ints(&[&[3]]))?,
        WaveletSystem::new(2, quincunx())?,
        WaveletSystem::new(2, matrix_s())?,
        WaveletSystem::new(3, cyclic_dilation(3, 2))?,
    ];
    let mut bad = Vec::new();
    let mut checked = 0;
    for sys in &systems {
        for j in [1, 4, 8] {
            checked += 1;
            let got = parseval_check(sys, j)?;
            if got != int(1) - pow_p(sys.prime(), -j) {
                bad.push(format!("{} J={j}: {got}", sys.matrix()));
            }
        }
    }
    Ok((bad.is_empty(), format!("{checked} sums (A in [2], [3], Q, S, cyclic(3,2); J = 1, 4, 8) equal 1 - p^-J {bad:?}")))
}

/// Nonzero vectors in `{0..p-1}^d`.
pub fn nonzero_residues(p: u32, d: usize) -> Vec<Vec<i64>> {
    let mut out = crate::metric::cartesian(&vec![(0..p as i64).collect(); d]);
    out.retain(|v| v.iter().any(|&c| c != 0));
    out
}

fn fourier_mother() -> Verdict {
    let systems = [
        WaveletSystem::new(2, matrix_s())?,
        WaveletSystem::new(2, quincunx())?,
        WaveletSystem::new(2, RatMatrix::from_ints(&[&[2]]))?,
        WaveletSystem::new(3, RatMatrix::from_ints(&[&[3]]))?,
        WaveletSystem::new(5, RatMatrix::from_ints(&[&[5]]))?,
    ];
    let mut total = 0;
    let mut bad = Vec::new();
    for sys in &systems {
        for k in nonzero_residues(sys.prime(), sys.dim()).into_iter().filter(|k| !sys.in_dual_lattice(k)) {
            total += 1;
            if !fourier_mother_predicate(sys, &k)? {
                bad.push(format!("{} k={k:?}", sys.matrix()));
            }
        }
    }
    Ok((bad.is_empty(), format!("{total} (A, k) pairs over S, Q, [2], [3], [5] {bad:?}")))
}

fn eigen() -> Verdict {
    let alphas = [int(1), int(2), rat(1, 2)];
    let mut pass = true;
    let mut parts = Vec::new();
    for f in families()? {
        let dual = f.metric.dual()?;
        let family = f.sys.family(2, 2);
        let rows: Vec<_> = family
            .par_iter()
            .flat_map_iter(|idx| alphas.iter().map(|a| eigen_check(&f.sys, &dual, idx, a)).collect::<Vec<_>>())
            .collect::<Result<_>>()?;
        let failed = rows.iter().filter(|r| !r.passed).count();
        let exact = rows.iter().filter(|r| r.exact).count();
        let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        pass &= failed == 0 && worst < FLOAT_TOLERANCE;
        if let Some(r) = rows.iter().find(|r| !r.passed) {
            parts.push(format!("first failure {}", r.row()));
        }
        parts.push(format!(
            "{} {} checks ({exact} exact, {} float, residual < {:.0e}: {}) {failed} failures",
            f.name,
            rows.len(),
            rows.len() - exact,
            FLOAT_TOLERANCE,
            worst < FLOAT_TOLERANCE
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn f64_of(r: &Rational) -> f64 {
    r.to_f64().unwrap()
}

/// The eight nonzero `k` with entries in `{-1, 0, 1}`.
pub fn unit_shifts() -> Vec<Vec<i64>> {
    let mut out = crate::metric::cartesian(&[vec![-1, 0, 1], vec![-1, 0, 1]]);
    out.retain(|k| k != &[0, 0]);
    out
}

fn monna() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = haar_image_check()?;
    notes.push(format!("haar image {pass}"));

    let one = DigitSystem::new(2, RatMatrix::from_ints(&[&[2]]), vec![vec![0], vec![1]])?;
    let pts = sample_r(&one, 22)?;
    let mut exact_one = true;
    for m in 0..=10 {
        exact_one &= estimate_measure(&pts, &one, m)?.outer == int(1);
    }
    pass &= exact_one;
    notes.push(format!("[2] digits 0,1 T=22: measure 1 for m = 0..10 {exact_one}"));

    let three = DigitSystem::new(2, RatMatrix::from_ints(&[&[2]]), vec![vec![0], vec![3]])?;
    let e3 = estimate_measure(&sample_r(&three, 22)?, &three, 10)?;
    let a_fails = f64_of(&e3.outer) > 1.5;
    pass &= a_fails;
    notes.push(format!("[2] digits 0,3: estimate {} ({})", e3.outer, if a_fails { "(A) fails" } else { "not detected" }));

    let q = DigitSystem::standard(2, quincunx())?;
    let qp = sample_r(&q, 20)?;
    let e6 = estimate_measure(&qp, &q, 6)?;
    let e7 = estimate_measure(&qp, &q, 7)?;
    let (outer, inner) = (f64_of(&e7.outer), f64_of(&e7.inner));
    let area_ok = (AREA_RANGE.0..=AREA_RANGE.1).contains(&outer) && inner <= 1.0 && 1.0 <= outer;
    pass &= area_ok;
    notes.push(format!(
        "quincunx T=20: outer {:.4} -> {outer:.4}, inner {:.4} -> {inner:.4} (m = 6 -> 7) {area_ok}",
        f64_of(&e6.outer),
        f64_of(&e6.inner)
    ));

    let mut overlaps = Vec::new();
    let mut overlap_ok = true;
    for k in unit_shifts() {
        let a = f64_of(&overlap_measure(&qp, &k, 6)?);
        let b = f64_of(&overlap_measure(&qp, &k, 7)?);
        let ok = b <= OVERLAP_BOUND && (b < a || a == 0.0);
        overlap_ok &= ok;
        overlaps.push(format!("{k:?} {a:.4}->{b:.4}{}", if ok { "" } else { " (!)" }));
    }
    pass &= overlap_ok;
    notes.push(format!("overlaps m = 6 -> 7, bound {OVERLAP_BOUND}: [{}]", overlaps.join(" ")));

    let mut det_ok = det_compatibility(&quincunx(), 2)? && !det_compatibility(&RatMatrix::from_ints(&[&[6]]), 2)?;
    for p in [2, 3, 5, 7] {
        det_ok &= det_compatibility(&RatMatrix::from_ints(&[&[p]]), p as u32)?;
    }
    pass &= det_ok;
    notes.push(format!("det compatibility {det_ok}"));
    Ok((pass, notes.join("; ")))
}

fn invariants(seed: u64) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = [0usize; 5];
    let metrics = [
        DeformedMetric::metric_s(rat(1, 2))?,
        DeformedMetric::metric_q(rat(1, 2))?,
        DeformedMetric::complete_flag(3, 2)?,
        DeformedMetric::standard(5, 2)?,
    ];
    for i in 0..PROPERTY_CASES {
        let metric = &metrics[i % metrics.len()];
        let p = metric.prime();
        let x = sample::random_point(&mut rng, p, 2, 4);
        let y = sample::random_point(&mut rng, p, 2, 4);
        let z = sample::random_point(&mut rng, p, 2, 4);
        if metric.distance_rational(&x, &z) < metric.distance_rational(&x, &y).min(metric.distance_rational(&y, &z)) {
            failures[0] += 1;
        }

        let a = sample::random_rational(&mut rng, p, 6);
        let b = sample::random_rational(&mut rng, p, 6);
        let (pa, pb) = (PadicScalar::from_rational(p, &a, 16)?, PadicScalar::from_rational(p, &b, 16)?);
        let sum_char = character(&pa.add(&pb)?);
        if sum_char != character(&pa).mul(&character(&pb)) || character_of_rational(p, &(&a + &b)) != sum_char {
            failures[1] += 1;
        }

        if !a.is_zero() && !b.is_zero() {
            let want = valuation(&a, p).unwrap() + valuation(&b, p).unwrap();
            if pa.mul(&pb)?.valuation() != Some(want) || valuation(&(&a * &b), p) != Some(want) {
                failures[2] += 1;
            }
        }

        let fp = [2u32, 3][i % 2];
        let d = rng.gen_range(1..=2);
        let (l, m) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
        let f = sample::random_function(&mut rng, fp, d, l, m);
        let ff = fourier(&f)?;
        if f.inner_product(&f)? != ff.inner_product(&ff)? {
            failures[3] += 1;
        }
        if !inverse_fourier(&ff)?.same_function(&f) {
            failures[4] += 1;
        }
    }
    let names = ["ultrametric", "character additivity", "valuation additivity", "Plancherel", "inversion"];
    let summary: Vec<String> = names.iter().zip(failures).map(|(n, f)| format!("{n} {f}")).collect();
    Ok((failures.iter().all(|&f| f == 0), format!("{PROPERTY_CASES} cases each, failures: {}", summary.join(", "))))
}

/// Random inputs shared by the suite, the property tests and the benches.
pub mod sample {
    use rand::Rng;

    use crate::padic::rational::{self, pow_p};
    use crate::padic::{Cyclotomic, Rational};
    use crate::wavelet::LocallyConstantFunction;

    /// `(n / m) p^v` with `n, m` small and prime to `p`; zero one time in ten.
    pub fn random_rational<R: Rng>(rng: &mut R, p: u32, span: i64) -> Rational {
        if rng.gen_ratio(1, 10) {
            return rational::int(0);
        }
        let unit = |rng: &mut R| loop {
            let n: i64 = rng.gen_range(1..200);
            if n % p as i64 != 0 {
                return n;
            }
        };
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let (n, d) = (unit(rng), unit(rng));
        rational::rat(sign * n, d) * pow_p(p, rng.gen_range(-span..=span))
    }

    pub fn random_point<R: Rng>(rng: &mut R, p: u32, d: usize, span: i64) -> Vec<Rational> {
        (0..d).map(|_| random_rational(rng, p, span)).collect()
    }

    /// A small integer combination of `p^level`-th roots of unity.
    pub fn random_value<R: Rng>(rng: &mut R, p: u32, level: u32) -> Cyclotomic {
        let mut v = Cyclotomic::zero(p);
        for _ in 0..rng.gen_range(1..=2) {
            let w = rational::int(rng.gen_range(-2..=2));
            let r = Cyclotomic::root(p, level, rng.gen_range(0..(p as i64).pow(level)));
            v = v.add(&r.scale(&w));
        }
        v
    }

    /// A function on `p^(-l) Z_p^d`, constant on `p^m` cosets, with up to four cells.
    pub fn random_function<R: Rng>(rng: &mut R, p: u32, d: usize, l: i64, m: i64) -> LocallyConstantFunction {
        let f = LocallyConstantFunction::zero(p, d, l, m).expect("levels within guards");
        let modulus = f.modulus();
        let cells: Vec<(Vec<u64>, Cyclotomic)> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let key = (0..d).map(|_| rng.gen_range(0..modulus)).collect();
                let level = rng.gen_range(0..=2);
                (key, random_value(rng, p, level))
            })
            .collect();
        LocallyConstantFunction::from_cells(p, d, l, m, cells).expect("keys in range")
    }
}
