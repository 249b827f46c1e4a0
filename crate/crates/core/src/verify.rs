//! Verification suites: closed forms against exhaustive scans, the two
//! congruence routes against each other, and the Adams-operation identities
//! together with the K-theory test against the congruences.

use std::fmt::{Display, Write as _};

use clap::ValueEnum;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::congruence::{
    e_exponent, e_exponent_bruteforce, f_exponent, fg_global, fg_global_divisibility,
    fg_local_closed, fg_local_direct, fg_residues, local_integer, modulus_val, relevant_primes,
    satisfies_c,
};
use crate::error::Error;
use crate::ktheory::{
    adams_coeff, complexify, eigenvector_v1, fg_ktheory, phi_endomorphism, psi, psi_ko, substitute,
};
use crate::padic::{LocalInt, Prime};
use crate::report::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// e(p, n) against the residue scan, with the full set equality
    Exponent,
    /// e(p, n) <= f(p, n) on p <= 13, n <= 40
    Bounds,
    /// closed form vs congruences, monotonicity, odd squares, residue invariance
    Congruence,
    /// Adams identities, phi, and the K-theory test vs the congruences
    Ktheory,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Exponent => "exponent",
            Suite::Bounds => "bounds",
            Suite::Congruence => "congruence",
            Suite::Ktheory => "ktheory",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub inputs: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub suite: String,
    pub cases_run: u64,
    pub failures: Vec<CaseFailure>,
    pub skipped: Vec<Skipped>,
}

impl VerifyOutcome {
    fn new(suite: Suite) -> Self {
        VerifyOutcome {
            suite: suite.name().to_string(),
            cases_run: 0,
            failures: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn expect_eq<T: PartialEq + Display>(&mut self, inputs: impl Display, expected: T, got: T) {
        self.cases_run += 1;
        if expected != got {
            self.failures.push(CaseFailure {
                inputs: inputs.to_string(),
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
    }

    fn skip(&mut self, inputs: impl Display, reason: impl Display) {
        self.skipped.push(Skipped {
            inputs: inputs.to_string(),
            reason: reason.to_string(),
        });
    }
}

/// Process exit status for a batch of outcomes: 0 iff nothing failed.
pub fn exit_code(outcomes: &[VerifyOutcome]) -> i32 {
    if outcomes.iter().all(VerifyOutcome::passed) {
        0
    } else {
        1
    }
}

pub fn run(suite: Suite, scan_guard: u64) -> Vec<VerifyOutcome> {
    match suite {
        Suite::Exponent => vec![exponent_suite(scan_guard, e_exponent)],
        Suite::Bounds => vec![bounds_suite()],
        Suite::Congruence => vec![congruence_suite()],
        Suite::Ktheory => vec![ktheory_suite()],
        Suite::All => vec![
            exponent_suite(scan_guard, e_exponent),
            bounds_suite(),
            congruence_suite(),
            ktheory_suite(),
        ],
    }
}

/// The grid on which the closed form is compared with the scan.
pub fn exponent_grid() -> Vec<(Prime, u32)> {
    let mut grid: Vec<(Prime, u32)> = (1..=10).map(|n| (2, n)).collect();
    for p in [3, 5, 7] {
        grid.extend((1..=12).map(|n| (p, n)));
    }
    grid
}

/// Scans every grid point and compares the recovered exponent with
/// `closed_form`. A set-equality violation is a failure; an oversized scan
/// is a skip.
pub fn exponent_suite(scan_guard: u64, closed_form: fn(Prime, u32) -> u64) -> VerifyOutcome {
    let mut outcome = VerifyOutcome::new(Suite::Exponent);
    for (p, n) in exponent_grid() {
        let inputs = format!("e(p = {p}, n = {n})");
        match e_exponent_bruteforce(p, n, scan_guard) {
            Ok(scanned) => outcome.expect_eq(inputs, scanned, closed_form(p, n)),
            Err(err @ Error::ScanTooLarge { .. }) => outcome.skip(inputs, err),
            Err(err) => {
                outcome.cases_run += 1;
                outcome.failures.push(CaseFailure {
                    inputs,
                    expected: "D_p-compatible classes below the exponent".into(),
                    got: err.to_string(),
                });
            }
        }
    }
    outcome
}

pub const BOUND_PRIMES: [Prime; 6] = [2, 3, 5, 7, 11, 13];
pub const BOUND_MAX_LEVEL: u32 = 40;

/// Checks `e(p, n) <= f(p, n)`. Equalities above `n = 5` are not failures.
pub fn bounds_suite() -> VerifyOutcome {
    let mut outcome = VerifyOutcome::new(Suite::Bounds);
    for p in BOUND_PRIMES {
        for n in 1..=BOUND_MAX_LEVEL {
            let (e, f) = (e_exponent(p, n), f_exponent(p, n));
            outcome.cases_run += 1;
            if e > f {
                outcome.failures.push(CaseFailure {
                    inputs: format!("(p = {p}, n = {n})"),
                    expected: format!("e <= f = {f}"),
                    got: format!("e = {e}"),
                });
            }
        }
    }
    outcome
}

/// Seed for the sampled congruence cases; fixed so runs are reproducible.
const SAMPLE_SEED: u64 = 0x0046_472d_636f_6e67;

/// The sampled integers for the route-consistency check: uniform draws from
/// `[-10^5, 10^5]` plus targeted `p^t u`.
pub fn congruence_samples(count: usize) -> Vec<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut out: Vec<BigInt> = (0..count)
        .map(|_| BigInt::from(rng.gen_range(-100_000i64..=100_000)))
        .collect();
    for p in [2u64, 3, 5, 7, 11, 13] {
        for t in 0..=12u32 {
            for u in [1i64, -1, 3, -3, 5, 7, 17, -15, 33] {
                out.push(BigInt::from(p).pow(t) * u);
            }
        }
    }
    out
}

pub fn congruence_suite() -> VerifyOutcome {
    let mut outcome = VerifyOutcome::new(Suite::Congruence);

    let samples = congruence_samples(10_000);
    let routes: Vec<(String, bool, bool)> = samples
        .par_iter()
        .flat_map_iter(|k| {
            (1..=8u32).flat_map(move |n| {
                relevant_primes(n).into_iter().map(move |p| {
                    let local = LocalInt::integer(k.clone(), p).expect("prime");
                    (
                        format!("closed vs direct (k = {k}, n = {n}, p = {p})"),
                        fg_local_direct(&local, n).overall,
                        fg_local_closed(&local, n),
                    )
                })
            })
        })
        .collect();
    for (inputs, direct, closed) in routes {
        outcome.expect_eq(inputs, direct, closed);
    }

    for k in -2000i64..=2000 {
        let q = BigRational::from_integer(k.into());
        let members: Vec<bool> = (1..=12)
            .map(|n| fg_global(&q, n).expect("integers are local").member)
            .collect();
        for n in 1..12usize {
            if members[n] {
                outcome.expect_eq(format!("monotone (k = {k}, n = {n})"), true, members[n - 1]);
            }
        }
    }

    for j in 0..=50i64 {
        let q = BigRational::from_integer(((2 * j + 1) * (2 * j + 1)).into());
        for n in 1..=12 {
            let member = fg_global(&q, n).expect("integers are local").member;
            outcome.expect_eq(
                format!("odd square ({}^2, n = {n})", 2 * j + 1),
                true,
                member,
            );
        }
    }
    for n in 1..=12 {
        let member = fg_global(&BigRational::from_integer(0.into()), n)
            .unwrap()
            .member;
        outcome.expect_eq(format!("zero (n = {n})"), true, member);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 1);
    for _ in 0..500 {
        let k: i64 = rng.gen_range(-100_000..=100_000);
        let t: i64 = rng.gen_range(-20..=20);
        for m in 1..=8u32 {
            for p in relevant_primes(m.max(2)) {
                let a = local_integer(k, p);
                let shift = BigInt::from(p).pow(modulus_val(m, p) as u32) * t;
                outcome.expect_eq(
                    format!("residue invariance (k = {k}, t = {t}, m = {m}, p = {p})"),
                    satisfies_c(&a, m).0,
                    satisfies_c(&a.minus_integer(&shift), m).0,
                );
            }
        }
    }

    for (n, modulus) in [(1u32, 1u64), (2, 24), (3, 360), (4, 40320)] {
        let expected: Vec<u64> = (0..modulus)
            .filter(|&r| fg_global_divisibility(&BigInt::from(r), n))
            .collect();
        match fg_residues(n, modulus, modulus) {
            Ok(got) => outcome.expect_eq(
                format!("residues (n = {n}, M = {modulus})"),
                format!("{expected:?}"),
                format!("{got:?}"),
            ),
            Err(err) => outcome.skip(format!("residues (n = {n})"), err),
        }
    }
    outcome
}

pub fn ktheory_suite() -> VerifyOutcome {
    let mut outcome = VerifyOutcome::new(Suite::Ktheory);

    for n in 1..=8 {
        for l in 1..=5i64 {
            for m in 1..=5i64 {
                let composed = substitute(&psi(l, n), &psi(m, n)).expect("same level");
                outcome.expect_eq(
                    format!("psi^{l} o psi^{m} = psi^{} (n = {n})", l * m),
                    psi(l * m, n),
                    composed,
                );
            }
        }
        outcome.expect_eq(
            format!("psi^2 o psi^3 = psi^3 o psi^2 (n = {n})"),
            substitute(&psi(2, n), &psi(3, n)).expect("same level"),
            substitute(&psi(3, n), &psi(2, n)).expect("same level"),
        );
    }

    for l in -20..=20i64 {
        for j in 1..=12 {
            outcome.expect_eq(
                format!("c_{j}({l}) integral"),
                true,
                adams_coeff(l, j).is_integer(),
            );
        }
    }

    for n in 1..=8 {
        let v2 = eigenvector_v1(2, n).expect("l >= 2");
        for l in [3, 5] {
            outcome.expect_eq(
                format!("eigenvector l = 2 vs l = {l} (n = {n})"),
                &v2,
                &eigenvector_v1(l, n).expect("l >= 2"),
            );
        }
    }

    for l in 0..=5i64 {
        for n in 1..=6 {
            let k = BigRational::from_integer((l * l).into());
            outcome.expect_eq(
                format!("phi({}) = psi^{l} (n = {n})", l * l),
                psi(l, n),
                phi_endomorphism(&k, n),
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 2);
    for _ in 0..200 {
        let mut draw = || {
            BigRational::new(
                rng.gen_range(-40i64..=40).into(),
                rng.gen_range(1i64..=9).into(),
            )
        };
        let (a, b) = (draw(), draw());
        let n = 1 + (a.numer().bits() as usize % 6);
        let composed =
            substitute(&phi_endomorphism(&a, n), &phi_endomorphism(&b, n)).expect("same level");
        outcome.expect_eq(
            format!("phi({a}) o phi({b}) = phi({}) (n = {n})", &a * &b),
            phi_endomorphism(&(&a * &b), n),
            composed,
        );
    }

    for l in -6..=6i64 {
        for n in 1..=10 {
            let ko = psi_ko(l, n);
            outcome.expect_eq(
                format!("psi_ko({l}) integral (n = {n})"),
                true,
                ko.is_integral(),
            );
            let two = BigRational::from_integer(2.into());
            outcome.expect_eq(
                format!("2 psi_ko({l}) = complexified psi^{l} (n = {n})"),
                complexify(&psi(l, n)),
                ko.scale(&two),
            );
        }
    }

    let cross: Vec<(i64, usize, bool, bool)> = (-2000i64..=2000)
        .into_par_iter()
        .flat_map_iter(|k| {
            let q = BigRational::from_integer(k.into());
            (1..=5usize)
                .map(|n| {
                    let congruences = fg_global(&q, n as u32).expect("integers are local").member;
                    (k, n, congruences, fg_ktheory(&q, n).in_fg)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    for (k, n, congruences, ktheory) in cross {
        outcome.expect_eq(
            format!("k-theory vs congruences (k = {k}, n = {n})"),
            congruences,
            ktheory,
        );
    }
    outcome
}

pub fn render(outcomes: &[VerifyOutcome], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(outcomes).expect("outcomes serialize");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut out = String::from("suite,kind,inputs,expected,got\n");
            for o in outcomes {
                for f in &o.failures {
                    writeln!(
                        out,
                        "{},failure,{},{},{}",
                        o.suite,
                        csv_field(&f.inputs),
                        csv_field(&f.expected),
                        csv_field(&f.got)
                    )
                    .unwrap();
                }
                for s in &o.skipped {
                    writeln!(
                        out,
                        "{},skipped,{},,{}",
                        o.suite,
                        csv_field(&s.inputs),
                        csv_field(&s.reason)
                    )
                    .unwrap();
                }
            }
            out
        }
        OutputFormat::Human => {
            let mut out = String::new();
            for o in outcomes {
                writeln!(
                    out,
                    "{}: {} cases, {} failures, {} skipped  {}",
                    o.suite,
                    o.cases_run,
                    o.failures.len(),
                    o.skipped.len(),
                    if o.passed() { "PASS" } else { "FAIL" }
                )
                .unwrap();
                for f in &o.failures {
                    writeln!(
                        out,
                        "  FAIL {}: expected {}, got {}",
                        f.inputs, f.expected, f.got
                    )
                    .unwrap();
                }
                for s in &o.skipped {
                    writeln!(out, "  skip {}: {}", s.inputs, s.reason).unwrap();
                }
            }
            out
        }
    }
}

// failure text is free-form; quote it when it carries commas
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::DEFAULT_SCAN_GUARD;

    #[test]
    fn exponent_suite_passes_on_the_grid() {
        let o = exponent_suite(DEFAULT_SCAN_GUARD, e_exponent);
        assert!(o.passed(), "{:?}", o.failures);
        assert!(o.cases_run >= 30);
        assert!(o.skipped.is_empty());
    }

    #[test]
    fn corrupted_closed_form_is_caught() {
        fn off_by_one(p: Prime, n: u32) -> u64 {
            e_exponent(p, n) + u64::from(p == 2 && n == 4)
        }
        let o = exponent_suite(DEFAULT_SCAN_GUARD, off_by_one);
        assert_eq!(o.failures.len(), 1);
        assert_eq!(exit_code(&[o]), 1);
    }

    #[test]
    fn small_guard_skips_instead_of_failing() {
        let o = exponent_suite(1000, e_exponent);
        assert!(o.passed());
        assert!(!o.skipped.is_empty());
    }

    #[test]
    fn bounds_suite_reports_known_gaps() {
        let o = bounds_suite();
        assert_eq!(o.cases_run, 240);
        let inputs: Vec<&str> = o.failures.iter().map(|f| f.inputs.as_str()).collect();
        assert_eq!(
            inputs,
            vec![
                "(p = 7, n = 7)",
                "(p = 11, n = 6)",
                "(p = 11, n = 11)",
                "(p = 13, n = 7)",
                "(p = 13, n = 13)"
            ]
        );
        assert_eq!(exit_code(&[o]), 1);
    }

    #[test]
    fn outcome_json_round_trips() {
        let outcomes = vec![bounds_suite(), exponent_suite(1000, e_exponent)];
        let json = render(&outcomes, OutputFormat::Json);
        let back: Vec<VerifyOutcome> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, outcomes);
    }
}
