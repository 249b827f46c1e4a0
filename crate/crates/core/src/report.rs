//! Records and renderers behind the command-line tool.
//!
//! Every command builds a serializable record first and renders it second, so
//! the JSON output parses back into the same record. Rows are sorted by
//! `(p, n)`, residues ascend, and fractions print in lowest terms as `a/b`.

use std::fmt::Write as _;

use clap::ValueEnum;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::congruence::{
    self, fg_global, fg_local_closed, fg_local_direct, CongruenceVerdict, ExponentRow,
    LevelEvidence, DEFAULT_SCAN_GUARD,
};
use crate::error::Result;
use crate::ktheory::{fg_ktheory, EndoVerdict};
use crate::padic::{LocalInt, Prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportConfig {
    pub format: OutputFormat,
    pub pmax: u64,
    pub nmax: u32,
    pub scan_guard: u64,
    pub jobs: Option<usize>,
    /// Largest level at which `check` also runs the K-theory test.
    pub cross_check_bound: u32,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            format: OutputFormat::Human,
            pmax: 13,
            nmax: 12,
            scan_guard: DEFAULT_SCAN_GUARD,
            jobs: None,
            cross_check_bound: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeEvidence {
    pub p: Prime,
    pub member: bool,
    pub levels: Vec<LevelEvidence>,
}

impl From<&CongruenceVerdict> for PrimeEvidence {
    fn from(v: &CongruenceVerdict) -> Self {
        PrimeEvidence {
            p: v.prime,
            member: v.overall,
            levels: v.per_level.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub p: Prime,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiRecord {
    pub k: String,
    pub n: usize,
    /// Coefficients of `x, x^2, ..., x^n`.
    pub phi: Vec<String>,
    pub display: String,
    pub integral: bool,
    pub parity_ok: bool,
    pub in_fg: bool,
}

impl From<&EndoVerdict> for PhiRecord {
    fn from(v: &EndoVerdict) -> Self {
        PhiRecord {
            k: v.k.to_string(),
            n: v.n,
            phi: v.phi.coeffs().iter().map(ToString::to_string).collect(),
            display: v.phi.to_string(),
            integral: v.integral,
            parity_ok: v.parity_ok,
            in_fg: v.in_fg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEvidence {
    pub primes: Vec<PrimeEvidence>,
    pub failure: Option<Failure>,
    /// Closed-form verdict; present for single-prime checks.
    pub closed_form: Option<bool>,
    pub ktheory: Option<PhiRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub k: String,
    pub n: u32,
    pub member: bool,
    pub evidence: CheckEvidence,
}

/// Membership of `k` in FG_n, or in FG_{n,p} when `prime` is given.
///
/// The global form also runs the K-theory test while `n <= cross_check_bound`;
/// the local form decides by both the closed form and the congruences and
/// requires them to agree.
pub fn check(
    k: &BigRational,
    n: u32,
    prime: Option<Prime>,
    cross_check_bound: u32,
) -> Result<CheckRecord> {
    if n == 0 {
        return Err(crate::Error::ZeroLevel);
    }
    match prime {
        Some(p) => {
            let local = LocalInt::new(k.clone(), p)?;
            let direct = fg_local_direct(&local, n);
            let closed = fg_local_closed(&local, n);
            assert_eq!(
                closed, direct.overall,
                "closed form and congruences disagree for k = {k}, n = {n}, p = {p}"
            );
            Ok(CheckRecord {
                k: k.to_string(),
                n,
                member: direct.overall,
                evidence: CheckEvidence {
                    failure: direct.first_failure().map(|m| Failure { p, m }),
                    primes: vec![PrimeEvidence::from(&direct)],
                    closed_form: Some(closed),
                    ktheory: None,
                },
            })
        }
        None => {
            let global = fg_global(k, n)?;
            let ktheory =
                (n <= cross_check_bound).then(|| PhiRecord::from(&fg_ktheory(k, n as usize)));
            Ok(CheckRecord {
                k: k.to_string(),
                n,
                member: global.member,
                evidence: CheckEvidence {
                    primes: global.per_prime.iter().map(PrimeEvidence::from).collect(),
                    failure: global.failure().map(|(p, m)| Failure { p, m }),
                    closed_form: None,
                    ktheory,
                },
            })
        }
    }
}

pub fn phi(k: &BigRational, n: usize) -> Result<PhiRecord> {
    if n == 0 {
        return Err(crate::Error::ZeroLevel);
    }
    Ok(PhiRecord::from(&fg_ktheory(k, n)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueRecord {
    pub n: u32,
    pub modulus: u64,
    pub residues: Vec<u64>,
}

/// Residues mod `modulus` (default: the smallest sound modulus) solving C_1..C_n.
pub fn residues(n: u32, modulus: Option<u64>, guard: u64) -> Result<ResidueRecord> {
    if n == 0 {
        return Err(crate::Error::ZeroLevel);
    }
    let modulus = match modulus {
        Some(m) => m,
        None => {
            let minimal = congruence::minimal_sound_modulus(n);
            u64::try_from(&minimal).map_err(|_| crate::Error::ScanTooLarge {
                classes: minimal.to_string(),
                guard,
            })?
        }
    };
    Ok(ResidueRecord {
        n,
        modulus,
        residues: congruence::fg_residues(n, modulus, guard)?,
    })
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn yes_no(b: bool, yes: &str, no: &str) -> String {
    if b { yes } else { no }.to_string()
}

fn phi_summary(r: &PhiRecord) -> String {
    let mut parts = vec![r.display.clone()];
    if r.integral {
        parts.push("integral".into());
        parts.push(yes_no(r.parity_ok, "parity ok", "parity fails"));
    } else {
        parts.push("not integral".into());
    }
    parts.push(yes_no(r.in_fg, "in FG", "not in FG"));
    parts.join(", ")
}

pub fn render_check(r: &CheckRecord, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Csv => {
            let mut out = String::from("k,n,p,m,product_valuation,modulus_valuation,satisfied\n");
            for prime in &r.evidence.primes {
                for l in &prime.levels {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        r.k,
                        r.n,
                        prime.p,
                        l.m,
                        l.product_valuation,
                        l.modulus_valuation,
                        l.satisfied
                    )
                    .unwrap();
                }
            }
            out
        }
        OutputFormat::Human => {
            let mut out = format!("k = {}, n = {}\nmember: {}", r.k, r.n, r.member);
            if let Some(f) = &r.evidence.failure {
                write!(out, " (fails at p = {}, level {})", f.p, f.m).unwrap();
            }
            out.push('\n');
            for prime in &r.evidence.primes {
                writeln!(
                    out,
                    "p = {}: {}",
                    prime.p,
                    yes_no(prime.member, "ok", "fails")
                )
                .unwrap();
                for l in &prime.levels {
                    writeln!(
                        out,
                        "  C_{}: valuation {} vs {}  {}",
                        l.m,
                        l.product_valuation,
                        l.modulus_valuation,
                        yes_no(l.satisfied, "ok", "FAIL")
                    )
                    .unwrap();
                }
            }
            if let Some(closed) = r.evidence.closed_form {
                writeln!(out, "closed form: {closed}").unwrap();
            }
            if let Some(kt) = &r.evidence.ktheory {
                writeln!(out, "k-theory: {}", phi_summary(kt)).unwrap();
            }
            out
        }
    }
}

pub fn render_phi(r: &PhiRecord, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Csv => {
            let mut out = String::from("k,n,j,coefficient\n");
            for (j, c) in r.phi.iter().enumerate() {
                writeln!(out, "{},{},{},{}", r.k, r.n, j + 1, c).unwrap();
            }
            out
        }
        OutputFormat::Human => format!("{}\n", phi_summary(r)),
    }
}

pub fn render_residues(r: &ResidueRecord, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(r),
        OutputFormat::Csv => {
            let mut out = String::from("n,modulus,residue\n");
            for x in &r.residues {
                writeln!(out, "{},{},{}", r.n, r.modulus, x).unwrap();
            }
            out
        }
        OutputFormat::Human => {
            let list: Vec<String> = r.residues.iter().map(ToString::to_string).collect();
            format!(
                "[{}] mod {} ({} residues)\n",
                list.join(", "),
                r.modulus,
                r.residues.len()
            )
        }
    }
}

pub fn render_table(rows: &[ExponentRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(rows),
        OutputFormat::Csv => {
            let mut out = String::from("p,n,e,f,status\n");
            for r in rows {
                writeln!(out, "{},{},{},{},{}", r.p, r.n, r.e, r.f, r.status.as_str()).unwrap();
            }
            out
        }
        OutputFormat::Human => {
            let mut out = format!("{:>4} {:>4} {:>4} {:>4}  status\n", "p", "n", "e", "f");
            for r in rows {
                writeln!(
                    out,
                    "{:>4} {:>4} {:>4} {:>4}  {}",
                    r.p,
                    r.n,
                    r.e,
                    r.f,
                    r.status.as_str()
                )
                .unwrap();
            }
            out
        }
    }
}
