use std::fmt::Write as _;
use std::path::Path;

use padic_wavelets::dilation::is_dilation;
use padic_wavelets::metric::{is_isometry_deformed, is_isometry_standard, isometry_oracle};
use padic_wavelets::monna::{
    det_compatibility, estimate_measure, export_intervals, overlap_measure, real_image_1d, sample_r, DigitSystem,
};
use padic_wavelets::padic::rational::{format_rational, int, parse_rational, pow_p};
use padic_wavelets::spectral::{eigen_check, fourier_mother_predicate};
use padic_wavelets::suite::{self, nonzero_residues};
use padic_wavelets::wavelet::{export_wavelet, orthonormality_suite, parseval_check};
use padic_wavelets::{Error, PadicMatrix, RatMatrix, Rational, Result, WaveletIndex, WaveletSystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Target;

pub struct Report {
    pub text: String,
    pub passed: bool,
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn header(out: &mut String, command: &str, target: &Target, a: &RatMatrix) {
    let _ = writeln!(out, "command {command}");
    let _ = writeln!(out, "prime {}", target.prime());
    let _ = writeln!(out, "matrix {a}");
}

fn verdict(out: &mut String, passed: bool) {
    let _ = writeln!(out, "result {}", if passed { "PASS" } else { "FAIL" });
}

pub fn isometry(target: &Target, trials: usize, seed: u64) -> Result<Report> {
    let a = target.matrix()?;
    let metric = target.metric(a.dim())?;
    let p = target.prime();
    let m = PadicMatrix::from_rat(p, &a, 16)?;
    let mut out = String::new();
    header(&mut out, "verify-isometry", target, &a);
    let _ = writeln!(out, "metric {metric}");
    let standard = is_isometry_standard(&m)?;
    let classified = is_isometry_deformed(&m, &metric)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled = isometry_oracle(&m, &metric, trials, &mut rng)?;
    let _ = writeln!(out, "standard isometry {standard}");
    let _ = writeln!(out, "deformed isometry {classified}");
    let _ = writeln!(out, "oracle trials {trials} seed {seed} isometry {sampled}");
    let _ = writeln!(out, "agreement {}", classified == sampled);
    verdict(&mut out, classified == sampled);
    Ok(Report { text: out, passed: classified == sampled })
}

pub fn dilation(target: &Target, expect: bool) -> Result<Report> {
    let a = target.matrix()?;
    let metric = target.metric(a.dim())?;
    let cert = is_dilation(&a, &metric)?;
    let mut out = String::from("command verify-dilation\n");
    out += &cert.report();
    let _ = writeln!(out, "expected {}", if expect { "dilation" } else { "not a dilation" });
    let passed = cert.verdict == expect;
    verdict(&mut out, passed);
    Ok(Report { text: out, passed })
}

pub fn basis(target: &Target, scales: i64, depth: u32, csv: Option<&Path>) -> Result<Report> {
    let a = target.matrix()?;
    let metric = target.metric(a.dim())?;
    let sys = WaveletSystem::new(target.prime(), a.clone())?;
    let report = orthonormality_suite(&sys, &metric, scales, depth)?;
    let mut out = String::new();
    header(&mut out, "basis", target, &a);
    let _ = writeln!(out, "metric {metric}");
    let _ = writeln!(out, "dilation {}", report.dilation);
    let ks: Vec<String> = sys.enumerate_k().iter().map(|k| format!("{k:?}")).collect();
    let _ = writeln!(out, "k {}", ks.join(" "));
    let _ = writeln!(out, "scales {scales} depth {depth}");
    let _ = writeln!(out, "family {} pairs {} failures {}", report.family_size, report.pairs, report.failures.len());
    for (x, y, g) in report.failures.iter().take(10) {
        let _ = writeln!(out, "  <{x}, {y}> = {g}");
    }
    if let Some(path) = csv {
        let zero = vec![Rational::from_integer(0.into()); sys.dim()];
        let mut body = String::new();
        for k in sys.enumerate_k() {
            body += &export_wavelet(&sys, &WaveletIndex { k: k.clone(), j: 0, n: zero.clone() })?;
            body.push('\n');
        }
        write_file(path, &body)?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    verdict(&mut out, report.passed());
    Ok(Report { text: out, passed: report.passed() })
}

pub fn parseval(target: &Target, scales: i64) -> Result<Report> {
    let a = target.matrix()?;
    let sys = WaveletSystem::new(target.prime(), a.clone())?;
    let sum = parseval_check(&sys, scales)?;
    let expected = int(1) - pow_p(target.prime(), -scales);
    let mut out = String::new();
    header(&mut out, "parseval", target, &a);
    let _ = writeln!(out, "scales {scales}");
    let _ = writeln!(out, "sum {}", format_rational(&sum));
    let _ = writeln!(out, "expected {}", format_rational(&expected));
    verdict(&mut out, sum == expected);
    Ok(Report { text: out, passed: sum == expected })
}

pub fn spectral(target: &Target, alpha: &str, scales: i64, depth: u32) -> Result<Report> {
    let a = target.matrix()?;
    let metric = target.metric(a.dim())?;
    let alpha = parse_rational(alpha)?;
    let sys = WaveletSystem::new(target.prime(), a.clone())?;
    let dual = metric.dual()?;
    let mut out = String::new();
    header(&mut out, "spectral", target, &a);
    let _ = writeln!(out, "metric {metric}");
    let _ = writeln!(out, "frequency metric {dual}");
    let mut passed = true;
    for k in nonzero_residues(sys.prime(), sys.dim()).into_iter().filter(|k| !sys.in_dual_lattice(k)) {
        let ok = fourier_mother_predicate(&sys, &k)?;
        passed &= ok;
        let _ = writeln!(out, "fourier mother k={k:?} {}", if ok { "ok" } else { "FAIL" });
    }
    for idx in sys.family(scales, depth) {
        let row = eigen_check(&sys, &dual, &idx, &alpha)?;
        passed &= row.passed;
        let _ = writeln!(out, "eigen {}", row.row());
    }
    verdict(&mut out, passed);
    Ok(Report { text: out, passed })
}

fn parse_digits(text: &str) -> Result<Vec<Vec<i64>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad digit `{c}`"))))
                .collect()
        })
        .collect()
}

pub fn monna(target: &Target, digits: Option<&str>, series: Option<u32>, grid: Option<u32>, csv: Option<&Path>) -> Result<Report> {
    let a = match target.matrix {
        Some(_) => target.matrix()?,
        None => padic_wavelets::dilation::quincunx(),
    };
    let p = target.prime();
    let d = a.dim();
    let sys = match digits {
        Some(text) => DigitSystem::new(p, a.clone(), parse_digits(text)?)?,
        None => DigitSystem::standard(p, a.clone())?,
    };
    let t = series.unwrap_or(if d == 1 { 22 } else { 20 });
    let m = grid.unwrap_or(if d == 1 { 10 } else { 7 });
    let points = sample_r(&sys, t)?;
    let mut out = format!("command monna\n{}\n", sys.header());
    let _ = writeln!(out, "series depth {t} points {}", points.len());
    let det = det_compatibility(&a, p)?;
    let _ = writeln!(out, "det compatibility {det}");
    let mut passed = det;
    for g in [m, m + 1] {
        let e = estimate_measure(&points, &sys, g)?;
        let _ = writeln!(
            out,
            "measure m={g} outer {} ({:.6}) inner {} ({:.6})",
            format_rational(&e.outer),
            to_f64(&e.outer),
            format_rational(&e.inner),
            to_f64(&e.inner)
        );
        if g == m {
            let bracket = e.inner <= int(1) && int(1) <= e.outer;
            passed &= bracket;
            let _ = writeln!(out, "condition A bracket {bracket}");
        }
    }
    let shifts = padic_wavelets::metric::cartesian(&vec![vec![-1, 0, 1]; d]);
    for k in shifts.into_iter().filter(|k| k.iter().any(|&c| c != 0)) {
        let a0 = overlap_measure(&points, &k, m)?;
        let a1 = overlap_measure(&points, &k, m + 1)?;
        let shrinking = a1 == int(0) || a1 < a0;
        passed &= shrinking;
        let _ = writeln!(
            out,
            "condition B k={k:?} m={m} {:.6} m={} {:.6} {}",
            to_f64(&a0),
            m + 1,
            to_f64(&a1),
            if shrinking { "shrinking" } else { "NOT SHRINKING" }
        );
    }
    if d == 1 && a == RatMatrix::from_ints(&[&[p as i64]]) && sys.digits().iter().enumerate().all(|(i, x)| x[0] == i as i64) {
        let ws = WaveletSystem::new(p, a.clone())?;
        for k in ws.enumerate_k() {
            let pieces = real_image_1d(&ws.mother_wavelet(k)?)?;
            out += &export_intervals(&format!("real image of the mother wavelet k={k:?}"), &pieces);
        }
    }
    if let Some(path) = csv {
        write_file(path, &points.to_csv(8, Some(m as i64)))?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    verdict(&mut out, passed);
    Ok(Report { text: out, passed })
}

fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn verify_all(seed: u64, timings: bool) -> Report {
    let mut out = String::new();
    let mut passed = true;
    for n in 1..=suite::NAMES.len() {
        let r = suite::run(n, seed);
        passed &= r.passed && (!timings || r.within_limit());
        let _ = writeln!(out, "{}", r.line(timings));
    }
    verdict(&mut out, passed);
    Report { text: out, passed }
}
