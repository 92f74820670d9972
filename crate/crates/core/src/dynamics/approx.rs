//! The approximations `H_n^{(1)}`, `H_n^{(2)}` and `H*_n` of the Birkhoff sum
//! for `n = Σ_{k_− ≤ k ≤ k_+} n_k q_k`, and their residuals against `H_n`.
//!
//! Residuals are assembled mode by mode from differences of exact phases,
//! so a residual of size `10^{-30}` is measured as such rather than drowned
//! by the rounding of two `O(1)` quantities.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::circle::CirclePoint;
use crate::dynamics::birkhoff::Kahan;
use crate::dynamics::resonant::q_pow;
use crate::dynamics::skew::{add_phase, centered, e, e_minus_one, mul_phase, FiberValue, Mode, SkewProduct};
use crate::error::{Error, Result};
use crate::num::pow2;
use crate::ostrowski::{DigitKind, DigitWindow, OstrowskiDigits};

/// `n` and the partial sums `n̄_k` of a window-supported digit vector.
pub(crate) struct WindowNumber {
    pub n: BigInt,
    /// `n̄_{k}` for `k = k_− − 1, …, k_+` (index `k − (k_− − 1)`)
    partial: Vec<BigInt>,
    k_minus: usize,
}

impl WindowNumber {
    pub(crate) fn new(t: &SkewProduct, w: DigitWindow, d: &OstrowskiDigits, bound_mult: i64) -> Result<Self> {
        let cf = t.cf();
        if w.k_plus > cf.depth() {
            return Err(Error::OutOfRange {
                value: format!("window top {}", w.k_plus),
                depth: cf.depth(),
            });
        }
        for (k, v) in d.nonzero() {
            if !w.contains(k) {
                return Err(Error::invalid(format!(
                    "digit at {k} lies outside the window [{}, {}]",
                    w.k_minus, w.k_plus
                )));
            }
            let cap = BigInt::from(cf.a(k).clone()) * bound_mult;
            if BigInt::from(v).abs() > cap {
                return Err(Error::invalid(format!(
                    "|n_{k}| = {} exceeds {bound_mult}·a_{k}",
                    v.abs()
                )));
            }
        }
        let mut partial = vec![BigInt::zero()];
        let mut acc = BigInt::zero();
        for k in w.k_minus..=w.k_plus {
            acc += BigInt::from(d.get(k)) * BigInt::from(cf.q(k).clone());
            partial.push(acc.clone());
        }
        Ok(WindowNumber {
            n: acc,
            partial,
            k_minus: w.k_minus,
        })
    }

    /// `n̄_k`, with `n̄_{k_−−1} = 0`.
    pub(crate) fn bar(&self, k: usize) -> &BigInt {
        &self.partial[k + 1 - self.k_minus]
    }
}

fn scale_in(md: &Mode, w: DigitWindow) -> Option<usize> {
    md.scale.as_ref().map(|(k, _)| *k).filter(|&k| w.contains(k))
}

/// Error attached to a phase `N·mα` computed from the stored `mα`.
fn phase_err(md: &Mode, n: &BigInt, bits: u32) -> f64 {
    md.alpha_err * crate::dynamics::skew::abs_f64(n) + pow2(-(bits as i64))
}

/// `H_n^{(1)}(x) = nĥ(0) + Σ_k Σ_{m=m_k q_k} ĥ(m) (e(n_k m q_k α) − 1)/(e(mα) − 1)
/// · e(m(x + n̄_{k−1}α))`.
pub fn approx_h1(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits, x: &CirclePoint) -> Result<FiberValue> {
    let wn = WindowNumber::new(t, w, n_digits, 1)?;
    let bits = t.bits();
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes() {
        let Some(k) = scale_in(md, w) else { continue };
        let nk = BigInt::from(n_digits.get(k)) * BigInt::from(t.cf().q(k).clone());
        let (xp, xe) = t.x_phase(&md.freq, x);
        let shift = wn.bar(k - 1);
        let ph = add_phase(&xp, &mul_phase(&md.alpha_phase, shift, bits), bits);
        let (v, e) = t.ratio_term(md, &nk, &ph, xe + phase_err(md, shift, bits));
        acc.add(v);
        err += e;
    }
    Ok(FiberValue::new(wn.n, t.mean(), acc.value().re, err))
}

fn check_x_digits(x_digits: &OstrowskiDigits) -> Result<()> {
    if x_digits.kind() != DigitKind::Real {
        return Err(Error::invalid("x digits must be a real-kind numeration"));
    }
    Ok(())
}

/// `H_n^{(2)}(x) = nĥ(0) + Σ_k Σ_{m=m_k q_k} ĥ(m)
/// (e((n_k + x̃_k) m q_k α) − e(x̃_k m q_k α))/(e(mα) − 1)`,
/// evaluated literally as a quotient of complex exponentials.
pub fn approx_h2(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits, x_digits: &OstrowskiDigits) -> Result<FiberValue> {
    check_x_digits(x_digits)?;
    let wn = WindowNumber::new(t, w, n_digits, 1)?;
    let bits = t.bits();
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes() {
        let Some(k) = scale_in(md, w) else { continue };
        let q = BigInt::from(t.cf().q(k).clone());
        let l0 = BigInt::from(x_digits.get(k)) * &q;
        let l1 = BigInt::from(n_digits.get(k) + x_digits.get(k)) * &q;
        let c1 = centered(&mul_phase(&md.alpha_phase, &l1, bits), bits);
        let c0 = centered(&mul_phase(&md.alpha_phase, &l0, bits), bits);
        let v = md.coeff * (e(c1) - e(c0)) / e_minus_one(md.a);
        let den = 2.0 * md.sin_a.abs();
        let amp = md.coeff.norm() / den;
        err += amp * (8.0 * f64::EPSILON + std::f64::consts::TAU * (phase_err(md, &l1, bits) + phase_err(md, &l0, bits)))
            + v.norm() * 4.0 * f64::EPSILON;
        acc.add(v);
    }
    Ok(FiberValue::new(wn.n, t.mean(), acc.value().re, err))
}

/// Whether a mode survives the truncation `h*` at `k_+`.
fn kept_by_truncation(md: &Mode, k_plus: usize) -> bool {
    matches!(&md.scale, Some((k, _)) if *k <= k_plus)
}

/// `H*_n(x)`: the Birkhoff sum of `h*`, which keeps `ĥ(0)` and the lattice
/// frequencies `m_j q_j`, `j ≤ k_+`.
pub fn truncated_h(t: &SkewProduct, n: &BigInt, x: &CirclePoint, k_plus: usize) -> Result<FiberValue> {
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes().iter().filter(|m| kept_by_truncation(m, k_plus)) {
        let (xp, xe) = t.x_phase(&md.freq, x);
        let (v, e) = t.ratio_term(md, n, &xp, xe);
        acc.add(v);
        err += e;
    }
    Ok(FiberValue::new(n.clone(), t.mean(), acc.value().re, err))
}

/// `H_n(x) − H*_n(x)`, summed over the discarded modes only.
pub fn truncation_error(t: &SkewProduct, n: &BigInt, x: &CirclePoint, k_plus: usize) -> Result<(f64, f64)> {
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes().iter().filter(|m| !kept_by_truncation(m, k_plus)) {
        let (xp, xe) = t.x_phase(&md.freq, x);
        let (v, e) = t.ratio_term(md, n, &xp, xe);
        acc.add(v);
        err += e;
    }
    Ok((acc.value().re, err))
}

/// `H_n(x) − H_n^{(1)}(x)`, mode by mode.
pub fn residual_h1(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits, x: &CirclePoint) -> Result<(f64, f64)> {
    let wn = WindowNumber::new(t, w, n_digits, 1)?;
    let bits = t.bits();
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes() {
        let (xp, xe) = t.x_phase(&md.freq, x);
        match scale_in(md, w) {
            None => {
                let (v, e) = t.ratio_term(md, &wn.n, &xp, xe);
                acc.add(v);
                err += e;
            }
            Some(k) => {
                let at = |s: &BigInt| add_phase(&xp, &mul_phase(&md.alpha_phase, s, bits), bits);
                let e_n = phase_err(md, &wn.n, bits) + xe;
                let (a, ea) = t.diff_term(md, &at(&wn.n), &at(wn.bar(k)), 2.0 * e_n);
                let (b, eb) = t.diff_term(md, &xp, &at(wn.bar(k - 1)), 2.0 * e_n);
                acc.add(a - b);
                err += ea + eb;
            }
        }
    }
    Ok((acc.value().re, err))
}

/// `H_n(x) − H_n^{(2)}(x)`, mode by mode.
pub fn residual_h2(
    t: &SkewProduct,
    w: DigitWindow,
    n_digits: &OstrowskiDigits,
    x: &CirclePoint,
    x_digits: &OstrowskiDigits,
) -> Result<(f64, f64)> {
    check_x_digits(x_digits)?;
    let wn = WindowNumber::new(t, w, n_digits, 1)?;
    let bits = t.bits();
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes() {
        let (xp, xe) = t.x_phase(&md.freq, x);
        match scale_in(md, w) {
            None => {
                let (v, e) = t.ratio_term(md, &wn.n, &xp, xe);
                acc.add(v);
                err += e;
            }
            Some(k) => {
                let q = BigInt::from(t.cf().q(k).clone());
                let l0 = BigInt::from(x_digits.get(k)) * &q;
                let l1 = BigInt::from(n_digits.get(k) + x_digits.get(k)) * &q;
                let u1 = add_phase(&xp, &mul_phase(&md.alpha_phase, &wn.n, bits), bits);
                let v1 = mul_phase(&md.alpha_phase, &l1, bits);
                let v0 = mul_phase(&md.alpha_phase, &l0, bits);
                let e_n = xe + phase_err(md, &wn.n, bits) + phase_err(md, &l1, bits);
                let (a, ea) = t.diff_term(md, &u1, &v1, e_n);
                let (b, eb) = t.diff_term(md, &xp, &v0, xe + phase_err(md, &l0, bits));
                acc.add(a - b);
                err += ea + eb;
            }
        }
    }
    Ok((acc.value().re, err))
}

/// `Σ_k |n_k| q_k^{−(τ−1)}`.
pub fn step_bound(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits) -> Result<f64> {
    WindowNumber::new(t, w, n_digits, 1)?;
    let tau = t.h().tau().value();
    Ok(n_digits
        .nonzero()
        .map(|(k, v)| v.unsigned_abs() as f64 * q_pow(t.cf(), k, 1.0 - tau))
        .sum())
}

/// `|Σ_k Σ_{m_k} ĥ(m_k q_k)(e(n_k m_k q_k²α) − 1)/(e(m_k q_kα) − 1)|`, the
/// quantity the step bound controls.
pub fn step_sum(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits) -> Result<f64> {
    WindowNumber::new(t, w, n_digits, 1)?;
    let zero = BigUint::zero();
    let mut acc = Kahan::default();
    for md in t.modes() {
        let Some(k) = scale_in(md, w) else { continue };
        let nk = BigInt::from(n_digits.get(k)) * BigInt::from(t.cf().q(k).clone());
        let (v, _) = t.ratio_term(md, &nk, &zero, 0.0);
        acc.add(v);
    }
    Ok(acc.value().norm())
}
