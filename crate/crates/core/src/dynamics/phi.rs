use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::circle::{phase_to_f64, CirclePoint};
use crate::dynamics::approx::{approx_h2, WindowNumber};
use crate::dynamics::birkhoff::Kahan;
use crate::dynamics::skew::{e, linear_frac, mul_phase, FiberValue, SkewProduct};
use crate::error::{Error, Result};
use crate::ostrowski::{DigitWindow, OstrowskiDigits};

/// Tables with `a_k` above this are evaluated on demand.
pub const EAGER_LIMIT: u64 = 10_000_000;

/// One mode at scale `k`, reduced to what `φ̃_k` needs.
#[derive(Clone, Debug)]
struct PhiMode {
    coeff: Complex64,
    /// `m q_k α` as a wrapping phase
    step: u128,
    a: f64,
    sin_a: f64,
}

/// `φ̃_k(l) = l q_k ĥ(0) + Σ_{m_k} ĥ(m_k q_k)(e(l m_k q_k² α) − 1)/(e(m_k q_k α) − 1)`
/// and its reduction `φ_k(l mod a_k) = φ̃_k(l) mod 1` on `0 ≤ l < a_k`.
#[derive(Clone, Debug)]
pub struct PhiTable {
    k: usize,
    a_k: u64,
    q_k: BigInt,
    mean: f64,
    modes: Vec<PhiMode>,
    /// oscillatory part of `φ̃_k(l)` for `l < a_k`, when materialized
    osc: Option<Vec<f64>>,
}

pub fn phi_table(t: &SkewProduct, k: usize) -> Result<PhiTable> {
    build_table(t, k, true)
}

fn build_table(t: &SkewProduct, k: usize, eager: bool) -> Result<PhiTable> {
    let cf = t.cf();
    if k == 0 || k > cf.depth() {
        return Err(Error::OutOfRange {
            value: format!("scale {k}"),
            depth: cf.depth(),
        });
    }
    let a_k = cf
        .a_u64(k)
        .ok_or_else(|| Error::invalid(format!("a_{k} does not fit in 64 bits")))?;
    let q_k = BigInt::from(cf.q(k).clone());
    let bits = t.bits();
    let modes: Vec<PhiMode> = t
        .modes_at(k)
        .map(|md| {
            let s = mul_phase(&md.alpha_phase, &q_k, bits);
            PhiMode {
                coeff: md.coeff,
                step: CirclePoint::from_fixed(&BigInt::from(s), bits).phase_u128(),
                a: md.a,
                sin_a: md.sin_a,
            }
        })
        .collect();
    let mut table = PhiTable {
        k,
        a_k,
        q_k,
        mean: t.mean(),
        modes,
        osc: None,
    };
    if eager && !table.modes.is_empty() && a_k <= EAGER_LIMIT {
        let v: Vec<f64> = (0..a_k as i64).map(|l| table.osc_direct(l)).collect();
        table.osc = Some(v);
    }
    Ok(table)
}

impl PhiTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> u64 {
        self.a_k
    }

    pub fn is_empty(&self) -> bool {
        self.a_k == 0
    }

    /// Whether only the linear part `l q_k ĥ(0)` is present.
    pub fn is_linear(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn is_materialized(&self) -> bool {
        self.osc.is_some()
    }

    fn osc_direct(&self, l: i64) -> f64 {
        if l == 0 {
            return 0.0;
        }
        let mut s = Kahan::default();
        for md in &self.modes {
            let ph = md.step.wrapping_mul(l as u128);
            let mut b = phase_to_f64(ph);
            if b >= 0.5 {
                b -= 1.0;
            }
            // (e(b) − 1)/(e(a) − 1) = e((b − a)/2) sin(πb)/sin(πa)
            s.add(md.coeff * e(0.5 * (b - md.a)) * ((PI * b).sin() / md.sin_a));
        }
        s.value().re
    }

    fn osc(&self, l: i64) -> f64 {
        match &self.osc {
            Some(v) if l >= 0 && (l as u64) < self.a_k => v[l as usize],
            _ => self.osc_direct(l),
        }
    }

    /// `φ̃_k(l)` for any integer `l`.
    pub fn lifted(&self, l: i64) -> FiberValue {
        FiberValue::new(BigInt::from(l) * &self.q_k, self.mean, self.osc(l), 0.0)
    }

    /// `φ_k(l) ∈ [0, 1)`, with `l` read mod `a_k`.
    pub fn reduced(&self, l: i64) -> f64 {
        self.lifted(l.rem_euclid(self.a_k as i64)).mod1()
    }

    /// `𝔼_{l < a_k} e(φ_k(l))`.
    pub fn mean_unit(&self) -> Result<Complex64> {
        if self.a_k > EAGER_LIMIT {
            return Err(Error::TooLarge {
                estimate: self.a_k as f64,
                limit: EAGER_LIMIT as f64,
            });
        }
        let mut s = Kahan::default();
        for l in 0..self.a_k as i64 {
            s.add(Complex64::from_polar(1.0, TAU * self.reduced(l)));
        }
        Ok(s.value() / self.a_k as f64)
    }
}

/// Per-window tables evaluated on demand (a ladder touches two entries each).
fn tables(t: &SkewProduct, w: DigitWindow) -> Result<Vec<PhiTable>> {
    (w.k_minus..=w.k_plus).map(|k| build_table(t, k, false)).collect()
}

fn digit_range(t: &SkewProduct, w: DigitWindow, d: &OstrowskiDigits, mult: i64, what: &str) -> Result<()> {
    for (k, v) in d.nonzero() {
        if !w.contains(k) {
            continue;
        }
        let a = t.cf().a_u64(k).map(|a| a as i64).unwrap_or(i64::MAX);
        if v.abs() > a.saturating_mul(mult) {
            return Err(Error::invalid(format!("{what} digit at {k} is {v}, beyond {mult}·a_{k}")));
        }
    }
    Ok(())
}

/// `Σ_k (φ̃_k(n_k + x̃_k) − φ̃_k(x̃_k))` over the window.
pub fn phi_tilde_ladder(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits, x_digits: &OstrowskiDigits) -> Result<FiberValue> {
    WindowNumber::new(t, w, n_digits, 1)?;
    digit_range(t, w, x_digits, 2, "x")?;
    let mut steps = BigInt::zero();
    let mut osc = Kahan::default();
    for tab in tables(t, w)? {
        let (n, x) = (n_digits.get(tab.k), x_digits.get(tab.k));
        let hi = tab.lifted(n + x);
        let lo = tab.lifted(x);
        steps += hi.steps - lo.steps;
        osc.add(Complex64::new(hi.osc - lo.osc, 0.0));
    }
    Ok(FiberValue::new(steps, t.mean(), osc.value().re, 0.0))
}

/// `Σ_k (φ_k(n_k + x̃_k) − φ_k(x̃_k)) mod 1`.
pub fn phi_ladder(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits, x_digits: &OstrowskiDigits) -> Result<f64> {
    WindowNumber::new(t, w, n_digits, 1)?;
    digit_range(t, w, x_digits, 2, "x")?;
    let mut s = 0.0;
    for tab in tables(t, w)? {
        let (n, x) = (n_digits.get(tab.k), x_digits.get(tab.k));
        s += tab.reduced(n + x) - tab.reduced(x);
    }
    Ok(s.rem_euclid(1.0))
}

/// `H_n^{(2)}` by the literal quotient against the `φ̃` ladder: the integer
/// multiples of `ĥ(0)` must agree exactly; returns `|osc difference|`.
pub fn h2_identity_gap(t: &SkewProduct, w: DigitWindow, n_digits: &OstrowskiDigits, x_digits: &OstrowskiDigits) -> Result<f64> {
    let a = approx_h2(t, w, n_digits, x_digits)?;
    let b = phi_tilde_ladder(t, w, n_digits, x_digits)?;
    if a.steps != b.steps {
        return Err(Error::invalid(format!(
            "linear parts differ: {} vs {} multiples of ĥ(0)",
            a.steps, b.steps
        )));
    }
    Ok((a.osc - b.osc).abs())
}

/// `‖Σ_k (φ̃_k(n_k) − φ̃_k(n'_k))‖` for digit vectors congruent mod `a_k`
/// with entries bounded by `4a_k`.
pub fn incre_per_residual(t: &SkewProduct, w: DigitWindow, n: &OstrowskiDigits, n2: &OstrowskiDigits) -> Result<f64> {
    digit_range(t, w, n, 4, "n")?;
    digit_range(t, w, n2, 4, "n'")?;
    let mut steps = BigInt::zero();
    let mut osc = 0.0;
    for tab in tables(t, w)? {
        let (u, v) = (n.get(tab.k), n2.get(tab.k));
        if (u - v).rem_euclid(tab.a_k as i64) != 0 {
            return Err(Error::invalid(format!("digits at {} are not congruent mod a_k", tab.k)));
        }
        let (p, q) = (tab.lifted(u), tab.lifted(v));
        steps += p.steps - q.steps;
        osc += p.osc - q.osc;
    }
    let v = (linear_frac(&steps, t.mean()) + osc).rem_euclid(1.0);
    Ok(v.min(1.0 - v))
}

/// One entry of [`product_decay`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFactor {
    pub k: usize,
    pub factor: f64,
    pub partial_product: f64,
}

/// Partial products of `|𝔼_{l<a_k} e(φ_k(l))|` over the resonant `k` of the
/// window.
pub fn product_decay(t: &SkewProduct, k_minus: usize, k_plus: usize) -> Result<Vec<DecayFactor>> {
    let w = DigitWindow::new(k_minus, k_plus)?;
    if k_plus > t.cf().depth() {
        return Err(Error::OutOfRange {
            value: format!("k_plus {k_plus}"),
            depth: t.cf().depth(),
        });
    }
    let mut out = Vec::new();
    let mut prod = 1.0;
    for k in w.k_minus..=w.k_plus {
        if !t.is_resonant(k) {
            continue;
        }
        let factor = phi_table(t, k)?.mean_unit()?.norm();
        prod *= factor;
        out.push(DecayFactor {
            k,
            factor,
            partial_product: prod,
        });
    }
    Ok(out)
}

/// `(q_{k+1} − q_{k−1}) ĥ(0)`, the drift of `φ̃_k` over one period.
pub fn period_drift(t: &SkewProduct, k: usize) -> FiberValue {
    let cf = t.cf();
    let d = BigInt::from(cf.q(k + 1).clone()) - BigInt::from(cf.q(k - 1).clone());
    FiberValue::new(d, t.mean(), 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Preset;
    use crate::dynamics::fourier::FourierModel;
    use crate::dynamics::{make_coboundary, resonant_set, synth_h, SynthOptions};
    use crate::ostrowski::{encode_real, DigitKind};
    use crate::tau::Tau;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;
    use num_traits::ToPrimitive;

    fn tau() -> Tau {
        Tau::parse("2.5").unwrap()
    }

    fn system(h0: f64) -> SkewProduct {
        let cf = Preset::Liouville(1).build(14, 1024).unwrap();
        let m = resonant_set(&cf, tau(), 8).unwrap();
        let h = synth_h(&m, tau(), 4, 1.0, SynthOptions { h0, ..Default::default() }).unwrap();
        SkewProduct::new(cf, h, 1024).unwrap()
    }

    #[test]
    fn linear_only_tables() {
        let cf = Preset::Silver.build(20, 256).unwrap();
        let h = FourierModel::constant(0.3, tau()).unwrap();
        let t = SkewProduct::new(cf, h, 256).unwrap();
        let tab = phi_table(&t, 4).unwrap();
        assert!(tab.is_linear());
        assert_eq!(tab.lifted(0).value(), 0.0);
        assert_eq!(tab.lifted(2).steps, BigInt::from(24));
        let zero = FourierModel::zero(tau()).unwrap();
        let t0 = SkewProduct::new(Preset::Liouville(1).build(12, 512).unwrap(), zero, 512).unwrap();
        for f in product_decay(&t0, 2, 8).unwrap() {
            assert_eq!(f.partial_product, 1.0);
        }
    }

    #[test]
    fn table_matches_direct_sum() {
        // oracle: φ̃_k(l) is the Birkhoff sum of the scale-k modes over
        // l·q_k steps from 0, summed term by term
        let t = system(0.0);
        let k = 6;
        let tab = phi_table(&t, k).unwrap();
        assert!(tab.is_materialized());
        let q = BigInt::from(t.cf().q(k).clone());
        for l in [0i64, 1, 5, 63] {
            let mut s = Complex64::zero();
            for md in t.modes_at(k) {
                let step = crate::dynamics::skew::centered(&md.alpha_phase, 1024);
                let n = l * q.to_i64().unwrap();
                let mut g = Complex64::zero();
                for j in 0..n {
                    g += e((j as f64 * step).rem_euclid(1.0));
                }
                s += md.coeff * g;
            }
            assert!((tab.lifted(l).osc - s.re).abs() < 1e-12, "l={l}");
        }
    }

    #[test]
    fn identity_holds_on_random_inputs() {
        let t = system(0.0);
        let w = DigitWindow::new(2, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut d = OstrowskiDigits::zero(DigitKind::Integer);
            for k in 2..=9 {
                let a = t.cf().a_u64(k).unwrap() as i64;
                d.set(k, rng.random_range(-a..=a));
            }
            let x = CirclePoint::from_f64(rng.random::<f64>() - 0.3, 1024);
            let xd = encode_real(&x, t.cf(), 12).unwrap();
            assert!(h2_identity_gap(&t, w, &d, &xd).unwrap() < 2f64.powi(-40));
        }
    }

    #[test]
    fn ladder_reduces_mod_period() {
        let t = system(0.0);
        let w = DigitWindow::new(5, 5).unwrap();
        let mut n = OstrowskiDigits::zero(DigitKind::Integer);
        n.set(5, 3);
        let mut x = OstrowskiDigits::zero(DigitKind::Real);
        x.set(5, 7);
        let tab = phi_table(&t, 5).unwrap();
        let want = (tab.reduced(10) - tab.reduced(7)).rem_euclid(1.0);
        assert!((phi_ladder(&t, w, &n, &x).unwrap() - want).abs() < 1e-15);
        assert_eq!(phi_ladder(&t, w, &OstrowskiDigits::zero(DigitKind::Integer), &x).unwrap(), 0.0);
    }

    #[test]
    fn near_periodicity() {
        let t = system(0.0);
        for k in [4usize, 6, 8] {
            let tab = phi_table(&t, k).unwrap();
            let a = tab.len() as i64;
            let drift = period_drift(&t, k);
            for l in [0i64, 1, 3] {
                let p = tab.lifted(l + a);
                let q = tab.lifted(l);
                let d = FiberValue::new(p.steps - q.steps - drift.steps.clone(), 0.0, p.osc - q.osc, 0.0);
                assert!(d.mod1().min(1.0 - d.mod1()) < 1e-3, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn coboundary_products_stay_positive() {
        let cf = Preset::Liouville(1).build(12, 1024).unwrap();
        let mut g = BTreeMap::new();
        for k in 1..=8 {
            let q = BigInt::from(cf.q(k).clone());
            let z = e(0.17 * k as f64) * 0.05;
            g.insert(-q.clone(), z.conj());
            g.insert(q, z);
        }
        let g = FourierModel::with_fitted_const(g, tau()).unwrap();
        let t = make_coboundary(&g, 0.0, cf, 1024).unwrap();
        let f = product_decay(&t, 1, 8).unwrap();
        assert!(!f.is_empty());
        assert!(f.iter().all(|d| d.partial_product > 0.1));
    }
}
