//! Best responses over the downward closure of E, and the regularisation
//! that turns an optimum over the closure back into a genuine member of E.

use super::{DbrOracle, OracleAnswer};
use crate::error::{Error, Result};
use crate::game::PureStrategy;

/// Denominator used to snap float weights to rationals.
const SNAP_DENOMINATOR_BITS: u32 = 30;

/// Best response over sub-pure strategies for signed weights: solve on the
/// positive part of `w`, then drop every covered target whose weight is not
/// positive. The answer maximizes `w . e` over the downward closure of E.
pub fn relaxed_best_response(oracle: &dyn DbrOracle, w: &[f64]) -> Result<OracleAnswer> {
    let positive: Vec<f64> = w.iter().map(|&v| v.max(0.0)).collect();
    let full = oracle.best_response(&positive)?;
    let mut bits = full.strategy.bits().to_vec();
    let mut dropped = false;
    for (i, bit) in bits.iter_mut().enumerate() {
        if *bit && w[i] <= 0.0 {
            *bit = false;
            dropped = true;
        }
    }
    Ok(OracleAnswer::new(PureStrategy::new(bits).with_subpure(dropped), w))
}

fn bit_length(v: u64) -> u32 {
    u64::BITS - v.leading_zeros()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Snaps `v` to a fraction over `2^30` and returns (|numerator|, denominator)
/// in lowest terms.
fn snap(v: f64) -> Result<(u64, u64)> {
    let den = 1u64 << SNAP_DENOMINATOR_BITS;
    let scaled = (v.abs() * den as f64).round();
    if !(scaled < 2f64.powi(62)) {
        return Err(Error::Invalid(format!("weight {v} too large to snap to a rational")));
    }
    let num = scaled as u64;
    let g = gcd(num, den).max(1);
    Ok((num / g, den / g))
}

/// Largest bit length of any numerator or denominator of `w` after snapping
/// to rationals with denominator `2^30`.
pub fn bit_complexity(w: &[f64]) -> Result<u32> {
    let mut q = 1;
    for &v in w {
        let (num, den) = snap(v)?;
        q = q.max(bit_length(num)).max(bit_length(den));
    }
    Ok(q)
}

/// Solves DBR for nonnegative `w` through the regularised objective
/// `w . e + eps |e|` with `eps = 2^-q / (2n)`. The perturbation breaks every
/// tie towards larger coverage, so the result is a genuine member of E, and
/// it is too small to overturn any strict preference under `w`. The reported
/// value is `w . e` for the original weights.
pub fn regularized_dbr(oracle: &dyn DbrOracle, w: &[f64]) -> Result<OracleAnswer> {
    let n = oracle.dim();
    if w.len() != n {
        return Err(Error::dims(n, w.len()));
    }
    if let Some(v) = w.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Invalid(format!("regularized DBR needs nonnegative weights, got {v}")));
    }
    let q = bit_complexity(w)?;
    let eps = 2f64.powi(-(q as i32)) / (2.0 * n as f64);
    let perturbed: Vec<f64> = w
        .iter()
        .map(|&v| {
            let (num, den) = snap(v).expect("validated by bit_complexity");
            num as f64 / den as f64 + eps
        })
        .collect();
    let answer = oracle.best_response(&perturbed)?;
    Ok(OracleAnswer::new(answer.strategy.with_subpure(false), w))
}
