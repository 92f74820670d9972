//! The decay exponent τ and the resonance test `q_{k+1} > q_k^{τ/2}`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow};

use crate::cf::ContinuedFraction;
use crate::error::{Error, Result};
use crate::num::log2_biguint;

/// A rational exponent `num/den`, kept exact so the resonance test can be
/// decided in integers when floating logs are too close to call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tau {
    num: u64,
    den: u64,
}

impl Tau {
    pub fn new(num: u64, den: u64) -> Result<Tau> {
        if den == 0 || num == 0 {
            return Err(Error::invalid("tau must be a positive rational"));
        }
        let g = num.gcd(&den);
        Ok(Tau {
            num: num / g,
            den: den / g,
        })
    }

    /// Parse a decimal such as `"2.5"` exactly.
    pub fn parse(s: &str) -> Result<Tau> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| Error::invalid(format!("bad tau {s:?}")))?;
            let d: u64 = d.trim().parse().map_err(|_| Error::invalid(format!("bad tau {s:?}")))?;
            return Tau::new(n, d);
        }
        let (i, f) = s.split_once('.').unwrap_or((s, ""));
        if f.len() > 12 || !(i.bytes().chain(f.bytes()).all(|b| b.is_ascii_digit())) || i.is_empty() {
            return Err(Error::invalid(format!(
                "tau must be a decimal with at most 12 fractional digits, got {s:?}"
            )));
        }
        let num: u64 = format!("{i}{f}")
            .parse()
            .map_err(|_| Error::invalid(format!("bad tau {s:?}")))?;
        Tau::new(num, 10u64.pow(f.len() as u32))
    }

    /// Require `τ > 2`, as every Fourier model does.
    pub fn require_above_two(self) -> Result<Tau> {
        if self.num > 2 * self.den {
            Ok(self)
        } else {
            Err(Error::invalid(format!("tau must exceed 2, got {self}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Largest exact power we are willing to form, in bits.
const EXACT_BITS_LIMIT: u64 = 1 << 26;

/// `q_{k+1} > q_k^{τ/2}`, i.e. `q_{k+1}^{2 den} > q_k^{num}`.
pub fn is_resonant(cf: &ContinuedFraction, k: usize, tau: Tau) -> bool {
    resonance_test(cf.q(k), cf.q(k + 1), tau)
}

pub(crate) fn resonance_test(qk: &BigUint, qk1: &BigUint, tau: Tau) -> bool {
    if qk.is_one() {
        return !qk1.is_one();
    }
    let lhs = 2.0 * tau.den as f64 * log2_biguint(qk1);
    let rhs = tau.num as f64 * log2_biguint(qk);
    let margin = 1e-9 * lhs.abs().max(rhs.abs());
    if lhs > rhs + margin {
        return true;
    }
    if lhs < rhs - margin {
        return false;
    }
    let cost = (qk.bits() * tau.num).max(qk1.bits() * 2 * tau.den);
    if cost > EXACT_BITS_LIMIT {
        // the logs agree to nine digits and the exact powers are too large
        // to form; the float decision is the best available
        return lhs > rhs;
    }
    Pow::pow(qk1, 2 * tau.den) > Pow::pow(qk, tau.num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Preset;

    #[test]
    fn parses_exact_rationals() {
        let t = Tau::parse("2.5").unwrap();
        assert_eq!((t.num(), t.den()), (5, 2));
        assert_eq!(Tau::parse("7/3").unwrap().value(), 7.0 / 3.0);
        assert!(Tau::parse("2").unwrap().require_above_two().is_err());
        assert!(Tau::parse("x").is_err());
    }

    #[test]
    fn exact_tie_breaking() {
        // 8 vs 4^{3/2} = 8: not strictly greater
        let t = Tau::new(3, 1).unwrap();
        assert!(!resonance_test(&BigUint::from(4u32), &BigUint::from(8u32), t));
        assert!(resonance_test(&BigUint::from(4u32), &BigUint::from(9u32), t));
    }

    #[test]
    fn fibonacci_resonance_dies_out() {
        let cf = Preset::Golden.build(40, 256).unwrap();
        let t = Tau::parse("2.5").unwrap();
        let res: Vec<usize> = (1..40).filter(|&k| is_resonant(&cf, k, t)).collect();
        // by hand: 2 > 1, 3 > 2^1.25, 5 > 3^1.25, 8 > 5^1.25, 13 < 8^1.25 ≈ 13.45
        assert_eq!(res, vec![2, 3, 4, 5]);
    }
}
