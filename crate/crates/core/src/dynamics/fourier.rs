use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::num::log2_biguint;
use crate::tau::Tau;

/// `|m|^{-τ}` for frequencies far beyond the `f64` integer range.
pub(crate) fn abs_pow_neg(m: &BigInt, tau: f64) -> f64 {
    (-tau * log2_biguint(m.magnitude())).exp2()
}

/// A finitely supported Fourier series `h(x) = Σ ĥ(m) e(mx)` with decay
/// `|ĥ(m)| ≤ C |m|^{-τ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierModel {
    coeff: BTreeMap<BigInt, Complex64>,
    tau: Tau,
    decay_const: f64,
}

impl FourierModel {
    /// Validate the decay bound against the stated constant.
    pub fn new(coeff: BTreeMap<BigInt, Complex64>, tau: Tau, decay_const: f64) -> Result<Self> {
        let tau = tau.require_above_two()?;
        if !(decay_const >= 0.0 && decay_const.is_finite()) {
            return Err(Error::invalid("decay constant must be finite and non-negative"));
        }
        for (m, c) in &coeff {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::invalid(format!("coefficient at {m} is not finite")));
            }
            if m.is_zero() {
                continue;
            }
            let bound = decay_const * abs_pow_neg(m, tau.value());
            if c.norm() > bound * (1.0 + 1e-9) {
                return Err(Error::invalid(format!(
                    "|ĥ({m})| = {:.3e} exceeds C|m|^-τ = {bound:.3e}",
                    c.norm()
                )));
            }
        }
        let mut coeff = coeff;
        coeff.retain(|_, c| *c != Complex64::zero());
        Ok(FourierModel {
            coeff,
            tau,
            decay_const,
        })
    }

    /// Use the smallest constant that makes the decay bound hold.
    pub fn with_fitted_const(coeff: BTreeMap<BigInt, Complex64>, tau: Tau) -> Result<Self> {
        let c = Self::fitted_const(&coeff, tau);
        Self::new(coeff, tau, c)
    }

    fn fitted_const(coeff: &BTreeMap<BigInt, Complex64>, tau: Tau) -> f64 {
        coeff
            .iter()
            .filter(|(m, _)| !m.is_zero())
            .map(|(m, c)| c.norm() / abs_pow_neg(m, tau.value()))
            .fold(0.0, f64::max)
    }

    /// The constant function `c`.
    pub fn constant(c: f64, tau: Tau) -> Result<Self> {
        let mut coeff = BTreeMap::new();
        coeff.insert(BigInt::zero(), Complex64::new(c, 0.0));
        Self::new(coeff, tau, 0.0)
    }

    pub fn zero(tau: Tau) -> Result<Self> {
        Self::new(BTreeMap::new(), tau, 0.0)
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    pub fn decay_const(&self) -> f64 {
        self.decay_const
    }

    pub fn coeffs(&self) -> &BTreeMap<BigInt, Complex64> {
        &self.coeff
    }

    pub fn coeff(&self, m: &BigInt) -> Complex64 {
        self.coeff.get(m).copied().unwrap_or_else(Complex64::zero)
    }

    /// `ĥ(0)` (real part; a real model has a real mean).
    pub fn mean(&self) -> f64 {
        self.coeff(&BigInt::zero()).re
    }

    /// Non-zero frequencies with their coefficients.
    pub fn oscillatory(&self) -> impl Iterator<Item = (&BigInt, &Complex64)> {
        self.coeff.iter().filter(|(m, _)| !m.is_zero())
    }

    pub fn support_len(&self) -> usize {
        self.coeff.len()
    }

    /// Largest `|m|` in the support.
    pub fn max_frequency(&self) -> BigInt {
        self.coeff.keys().map(|m| m.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// `ĥ(−m) = conj ĥ(m)` for all `m` (the model is a real function).
    pub fn is_real(&self) -> bool {
        self.coeff.iter().all(|(m, c)| {
            let other = self.coeff(&-m);
            other == c.conj()
        })
    }

    /// `Σ |ĥ(m)|` over `m ≠ 0`, a sup-norm bound for `h − ĥ(0)`.
    pub fn oscillatory_l1(&self) -> f64 {
        self.oscillatory().map(|(_, c)| c.norm()).sum()
    }

    /// Evaluate at a float `x`; accurate only while `|m x|` stays moderate.
    pub fn eval_f64(&self, x: f64) -> Complex64 {
        let mut s = Complex64::zero();
        for (m, c) in &self.coeff {
            let mf = crate::num::bigint_scaled_f64(m, 0);
            let ph = (mf * x).rem_euclid(1.0);
            s += c * Complex64::from_polar(1.0, std::f64::consts::TAU * ph);
        }
        s
    }

    /// JSON list `[{m, re, im}]` with `m` as a decimal string.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeff
                .iter()
                .map(|(m, c)| serde_json::json!({"m": m.to_string(), "re": c.re, "im": c.im}))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value, tau: Tau) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Format("Fourier model must be a JSON list".into()))?;
        let mut coeff = BTreeMap::new();
        for e in arr {
            let m = match e.get("m") {
                Some(serde_json::Value::String(s)) => s
                    .parse::<BigInt>()
                    .map_err(|_| Error::Format(format!("bad frequency {s:?}")))?,
                Some(serde_json::Value::Number(n)) if n.is_i64() => BigInt::from(n.as_i64().unwrap()),
                _ => return Err(Error::Format("entry without frequency m".into())),
            };
            let num = |k: &str| {
                e.get(k)
                    .and_then(|x| x.as_f64())
                    .ok_or_else(|| Error::Format(format!("entry {m} missing {k}")))
            };
            let z = Complex64::new(num("re")?, num("im")?);
            coeff.insert(m, z);
        }
        Self::with_fitted_const(coeff, tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau() -> Tau {
        Tau::parse("2.5").unwrap()
    }

    #[test]
    fn decay_bound_is_enforced() {
        let mut c = BTreeMap::new();
        c.insert(BigInt::from(4), Complex64::new(1.0 / 32.0, 0.0)); // 4^-2.5 = 1/32
        assert!(FourierModel::new(c.clone(), tau(), 1.0).is_ok());
        assert!(FourierModel::new(c.clone(), tau(), 0.5).is_err());
        let m = FourierModel::with_fitted_const(c, tau()).unwrap();
        assert!((m.decay_const() - 1.0).abs() < 1e-12);
        assert!(FourierModel::zero(Tau::parse("2").unwrap()).is_err());
    }

    #[test]
    fn realness_and_json() {
        let mut c = BTreeMap::new();
        let z = Complex64::new(0.1, -0.2);
        c.insert(BigInt::from(3), z);
        c.insert(BigInt::from(-3), z.conj());
        c.insert(BigInt::zero(), Complex64::new(0.25, 0.0));
        let m = FourierModel::with_fitted_const(c, tau()).unwrap();
        assert!(m.is_real());
        let back = FourierModel::from_json(&m.to_json(), tau()).unwrap();
        assert_eq!(back, m);
        let v = m.eval_f64(0.3);
        assert!(v.im.abs() < 1e-15);
        let direct = 0.25 + 2.0 * (z * Complex64::from_polar(1.0, std::f64::consts::TAU * 0.9)).re;
        assert!((v.re - direct).abs() < 1e-14);
    }
}
