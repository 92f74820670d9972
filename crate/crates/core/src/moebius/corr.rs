use num_complex::Complex64;

use crate::circle::phase_to_f64;
use crate::dynamics::birkhoff::Kahan;
use crate::error::{Error, Result};
use crate::moebius::sieve::Weights;
use crate::moebius::par_blocks;

/// `β mod 1` as a 64-bit wrapping phase.
pub fn beta_phase(beta: f64) -> u64 {
    let f = beta.rem_euclid(1.0);
    // f < 1, so the product stays below 2^64 except at f = 1 − ε rounding up
    (f * 18_446_744_073_709_551_616.0).min(u64::MAX as f64) as u64
}

#[inline]
pub(crate) fn unit64(p: u64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * phase_to_f64((p as u128) << 64))
}

/// `|(1/N) Σ_{n ≤ N} w(n) e(βn)|`.
pub fn davenport_avg<W: Weights>(w: &W, n: usize, beta: f64) -> Result<f64> {
    davenport_avg_phase(w, n, beta_phase(beta))
}

pub fn davenport_avg_phase<W: Weights>(w: &W, n: usize, beta: u64) -> Result<f64> {
    if n == 0 || n > w.limit() {
        return Err(Error::invalid(format!(
            "N = {n} must lie in 1..={} (table limit)",
            w.limit()
        )));
    }
    let parts = par_blocks(n, |lo, hi| {
        let mut s = Kahan::default();
        let mut ph = beta.wrapping_mul(lo as u64 + 1);
        for m in lo + 1..=hi {
            let v = w.weight(m);
            if v != 0.0 {
                s.add(v * unit64(ph));
            }
            ph = ph.wrapping_add(beta);
        }
        s.value()
    });
    let mut s = Kahan::default();
    for p in parts {
        s.add(p);
    }
    Ok(s.value().norm() / n as f64)
}

/// `𝔼_{0 ≤ L < N} |𝔼_{1 ≤ n ≤ R} w(L + n) e(βn)|`, with windows clipped at
/// the end of the table (missing weights count as 0, the divisor stays `R`).
pub fn short_interval_corr<W: Weights>(w: &W, n: usize, r: usize, beta: f64) -> Result<f64> {
    short_interval_corr_phase(w, n, r, beta_phase(beta))
}

pub fn short_interval_corr_phase<W: Weights>(w: &W, n: usize, r: usize, beta: u64) -> Result<f64> {
    if r < 10 || r > n || n > w.limit() {
        return Err(Error::invalid(format!(
            "need 10 ≤ R ≤ N ≤ table limit, got R = {r}, N = {n}, limit {}",
            w.limit()
        )));
    }
    let term = |m: usize| -> Complex64 {
        let v = w.weight(m);
        if v == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            v * unit64(beta.wrapping_mul(m as u64))
        }
    };
    // |Σ_{n ≤ R} w(L+n) e(βn)| = |Σ_{L < m ≤ L+R} w(m) e(βm)|; slide the window
    // within each block and recompute it at the block start
    let parts = par_blocks(n, |lo, hi| {
        let mut win = Kahan::default();
        for m in lo + 1..=lo + r {
            win.add(term(m));
        }
        let mut acc = 0.0;
        for l in lo..hi {
            acc += win.value().norm();
            win.add(-term(l + 1));
            win.add(term(l + r + 1));
        }
        acc
    });
    let total: f64 = parts.iter().sum();
    Ok(total / (n as f64 * r as f64))
}
