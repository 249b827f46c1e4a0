//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Each export returns a JSON document, and errors come back as their display text.

use hpn_degrees::congruence::exponent_table;
use hpn_degrees::padic::parse_rational;
use hpn_degrees::report;
use wasm_bindgen::prelude::*;

/// Residue grids beyond this many classes would stall the page.
const BROWSER_SCAN_GUARD: u64 = 1 << 20;

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records serialize")
}

/// Residues of `FG_n` modulo `modulus`, or modulo the smallest sound modulus when it is 0.
#[wasm_bindgen]
pub fn residues(n: u32, modulus: u64) -> Result<String, String> {
    let modulus = (modulus != 0).then_some(modulus);
    report::residues(n, modulus, BROWSER_SCAN_GUARD)
        .map(|r| to_json(&r))
        .map_err(|e| e.to_string())
}

/// The endomorphism `phi_k` on the truncated ring, with its integrality verdict.
#[wasm_bindgen]
pub fn phi(k: &str, n: u32) -> Result<String, String> {
    let k = parse_rational(k).map_err(|e| e.to_string())?;
    if n == 0 {
        return Err(hpn_degrees::Error::ZeroLevel.to_string());
    }
    report::phi(&k, n as usize)
        .map(|r| to_json(&r))
        .map_err(|e| e.to_string())
}

/// Membership of `k` in `FG_n` with per-prime evidence.
#[wasm_bindgen]
pub fn check(k: &str, n: u32) -> Result<String, String> {
    let k = parse_rational(k).map_err(|e| e.to_string())?;
    report::check(&k, n, None, 8)
        .map(|r| to_json(&r))
        .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn table(pmax: u64, nmax: u32) -> String {
    to_json(&exponent_table(pmax, nmax))
}
