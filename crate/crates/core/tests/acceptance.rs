//! One PASS/FAIL line per criterion, with wall-clock bounds enforced. Exits
//! non-zero if any criterion fails.

use padic_wavelets::suite::{run, DEFAULT_SEED, NAMES};

fn main() {
    let mut failed = 0;
    for n in 1..=NAMES.len() {
        let r = run(n, DEFAULT_SEED);
        failed += !(r.passed && r.within_limit()) as usize;
        println!("{}", r.line(true));
    }
    println!("acceptance: {}/{} criteria passed", NAMES.len() - failed, NAMES.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
