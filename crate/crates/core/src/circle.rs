//! Fixed-point points of the circle `ℝ/ℤ` with an explicit error bound.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::cf::ContinuedFraction;
use crate::num::{biguint_scaled_f64, f64_to_fixed, pow2};

/// A point `value · 2^{-bits}` of `[0, 1)`, known to within `err`.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePoint {
    value: BigUint,
    bits: u32,
    err: f64,
}

fn reduce(x: &BigInt, bits: u32) -> BigUint {
    let m = BigInt::from(1u32) << bits as usize;
    let r = ((x % &m) + &m) % &m;
    r.to_biguint().unwrap()
}

impl CirclePoint {
    pub fn zero(bits: u32) -> Self {
        CirclePoint {
            value: BigUint::zero(),
            bits,
            err: 0.0,
        }
    }

    /// `num · 2^{-bits} mod 1`, taken as exact.
    pub fn from_fixed(num: &BigInt, bits: u32) -> Self {
        CirclePoint {
            value: reduce(num, bits),
            bits,
            err: 0.0,
        }
    }

    /// The dyadic value of `x` reduced mod 1; exact whenever `bits` is large
    /// enough to hold every bit of `x`.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        let fixed = f64_to_fixed(x, bits);
        let exact = f64_to_fixed(x, bits + 80) == (&fixed << 80usize);
        CirclePoint {
            value: reduce(&fixed, bits),
            bits,
            err: if exact { 0.0 } else { pow2(-(bits as i64)) },
        }
    }

    /// `n α mod 1` from the α enclosure of `cf`.
    pub fn multiple_of_alpha(cf: &ContinuedFraction, n: &BigInt, bits: u32) -> Self {
        let (lo, width) = cf.alpha_fixed(bits);
        let v = BigInt::from(lo) * n;
        let w = biguint_scaled_f64(&width, bits as i64) + pow2(-(bits as i64));
        CirclePoint {
            value: reduce(&v, bits),
            bits,
            err: w * n.magnitude().to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn alpha(cf: &ContinuedFraction, bits: u32) -> Self {
        Self::multiple_of_alpha(cf, &BigInt::from(1u32), bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Widen the error bound (used when a caller knows of extra uncertainty).
    pub fn with_extra_err(mut self, e: f64) -> Self {
        self.err += e;
        self
    }

    /// `err < 2^{-P/2}`: the point still carries at least half its bits.
    pub fn is_reliable(&self) -> bool {
        self.err < pow2(-(self.bits as i64) / 2)
    }

    /// Re-express at `bits` of precision (truncating costs one ulp).
    pub fn rescale(&self, bits: u32) -> Self {
        if bits >= self.bits {
            CirclePoint {
                value: &self.value << (bits - self.bits) as usize,
                bits,
                err: self.err,
            }
        } else {
            let dropped = &self.value >> (self.bits - bits) as usize;
            let lost = (&dropped << (self.bits - bits) as usize) != self.value;
            CirclePoint {
                value: dropped,
                bits,
                err: self.err + if lost { pow2(-(bits as i64)) } else { 0.0 },
            }
        }
    }

    fn aligned(&self, other: &CirclePoint) -> (CirclePoint, CirclePoint) {
        let b = self.bits.min(other.bits);
        (self.rescale(b), other.rescale(b))
    }

    pub fn add(&self, other: &CirclePoint) -> CirclePoint {
        let (x, y) = self.aligned(other);
        let m = BigUint::from(1u32) << x.bits as usize;
        let mut v = &x.value + &y.value;
        if v >= m {
            v -= &m;
        }
        CirclePoint {
            value: v,
            bits: x.bits,
            err: x.err + y.err,
        }
    }

    pub fn neg(&self) -> CirclePoint {
        let m = BigUint::from(1u32) << self.bits as usize;
        let v = if self.value.is_zero() {
            BigUint::zero()
        } else {
            m - &self.value
        };
        CirclePoint {
            value: v,
            bits: self.bits,
            err: self.err,
        }
    }

    pub fn sub(&self, other: &CirclePoint) -> CirclePoint {
        self.add(&other.neg())
    }

    /// `n · x mod 1`; the error scales by `|n|`.
    pub fn mul_int(&self, n: &BigInt) -> CirclePoint {
        let v = BigInt::from(self.value.clone()) * n;
        CirclePoint {
            value: reduce(&v, self.bits),
            bits: self.bits,
            err: self.err * n.magnitude().to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn mul_i64(&self, n: i64) -> CirclePoint {
        self.mul_int(&BigInt::from(n))
    }

    /// The value in `[0, 1)`.
    pub fn to_f64(&self) -> f64 {
        let v = biguint_scaled_f64(&self.value, self.bits as i64);
        if v >= 1.0 {
            // rounding up from just below 1
            0.0
        } else {
            v
        }
    }

    /// Distance to the nearest integer.
    pub fn norm(&self) -> f64 {
        let v = self.to_f64();
        v.min(1.0 - v)
    }

    /// Signed representative in `[−α, 1−α)` as a fixed-point numerator at
    /// `self.bits()`.
    pub fn representative_fixed(&self, cf: &ContinuedFraction) -> BigInt {
        let (alpha, _) = cf.alpha_fixed(self.bits);
        let m = BigUint::from(1u32) << self.bits as usize;
        let threshold = &m - alpha; // (1 − α) · 2^bits
        if self.value >= threshold {
            BigInt::from(self.value.clone()) - BigInt::from(m)
        } else {
            BigInt::from(self.value.clone())
        }
    }

    pub fn representative(&self, cf: &ContinuedFraction) -> f64 {
        let r = self.representative_fixed(cf);
        let mag = biguint_scaled_f64(r.magnitude(), self.bits as i64);
        if r.sign() == Sign::Minus {
            -mag
        } else {
            mag
        }
    }

    /// The top 128 bits as a wrapping phase, for fast inner loops.
    pub fn phase_u128(&self) -> u128 {
        if self.bits >= 128 {
            (&self.value >> (self.bits - 128) as usize).to_u128().unwrap()
        } else {
            self.value.to_u128().unwrap() << (128 - self.bits)
        }
    }

    /// The top 64 bits as a wrapping phase.
    pub fn phase_u64(&self) -> u64 {
        (self.phase_u128() >> 64) as u64
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17} (±{:.1e})", self.to_f64(), self.err)
    }
}

/// Convert a 128-bit wrapping phase to `[0, 1)`.
pub fn phase_to_f64(p: u128) -> f64 {
    // the top 64 bits carry more than enough precision for an f64
    ((p >> 64) as u64 as f64) * pow2(-64) + ((p as u64) as f64) * pow2(-128)
}

/// Convert a float in any range to a 128-bit wrapping phase (value mod 1).
pub fn f64_to_phase(x: f64) -> u128 {
    let fixed = f64_to_fixed(x, 128);
    let m = BigInt::from(1u32) << 128usize;
    let r = ((fixed % &m) + &m) % &m;
    r.to_u128().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Preset;

    #[test]
    fn additive_identities() {
        let x = CirclePoint::from_f64(0.3, 128);
        assert_eq!(x.add(&CirclePoint::zero(128)), x);
        let s = x.add(&CirclePoint::from_f64(0.7, 128));
        assert!(s.norm() < 2.0 * pow2(-52));
        assert!(x.add(&x.neg()).value().is_zero());
    }

    #[test]
    fn q_k_alpha_is_small() {
        let cf = Preset::Golden.build(30, 256).unwrap();
        // for k = 1 the distance to the nearest integer is 1 − α, not |θ_1|
        for k in 2..=30 {
            let q = BigInt::from(cf.q(k).clone());
            let x = CirclePoint::multiple_of_alpha(&cf, &q, 256);
            let bound = 1.0 / cf.q(k + 1).to_f64().unwrap();
            let lower = 1.0 / (cf.q(k + 1) + cf.q(k)).to_f64().unwrap();
            assert!(x.norm() < bound && x.norm() > lower, "k={k}");
        }
    }

    #[test]
    fn representative_range() {
        let cf = Preset::Silver.build(20, 128).unwrap();
        let a = cf.alpha_f64();
        for i in 0..100 {
            let x = CirclePoint::from_f64(i as f64 / 100.0, 128);
            let r = x.representative(&cf);
            assert!(r >= -a && r < 1.0 - a);
        }
    }

    #[test]
    fn rescale_and_phase() {
        let x = CirclePoint::from_f64(0.25, 64);
        assert_eq!(x.phase_u128(), 1u128 << 126);
        assert_eq!(phase_to_f64(f64_to_phase(-0.25)), 0.75);
        let y = x.rescale(256).rescale(64);
        assert_eq!(y, x);
    }
}
