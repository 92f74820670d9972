//! Conversions between big integers and `f64` that keep relative accuracy
//! for values far outside the `i64` range.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

/// `2^e` for any exponent in the representable range, including subnormals.
pub(crate) fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e >= -1022 {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e >= -1074 {
        f64::from_bits(1u64 << (e + 1074))
    } else {
        0.0
    }
}

/// Nearest-ish `f64` to `n · 2^-shift`, accurate to a couple of ulps.
pub(crate) fn biguint_scaled_f64(n: &BigUint, shift: i64) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let bits = n.bits() as i64;
    if bits <= 64 {
        let v = n.to_u64().unwrap() as f64;
        // split the scaling so that neither factor under- or overflows
        let half = shift / 2;
        return v * pow2(-half) * pow2(-(shift - half));
    }
    let drop = bits - 64;
    let top = (n >> (drop as usize)).to_u64().unwrap() as f64;
    let e = drop - shift;
    let half = e / 2;
    top * pow2(half) * pow2(e - half)
}

pub(crate) fn bigint_scaled_f64(n: &BigInt, shift: i64) -> f64 {
    let mag = biguint_scaled_f64(n.magnitude(), shift);
    if n.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

pub(crate) fn biguint_f64(n: &BigUint) -> f64 {
    biguint_scaled_f64(n, 0)
}

/// `log2(n)` with relative accuracy near machine precision.
pub(crate) fn log2_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "log2 of zero");
    let bits = n.bits() as i64;
    if bits <= 64 {
        return (n.to_u64().unwrap() as f64).log2();
    }
    let drop = bits - 64;
    let top = (n >> (drop as usize)).to_u64().unwrap() as f64;
    top.log2() + drop as f64
}

/// Exact decomposition of a finite `f64` as `mantissa · 2^exponent`.
pub(crate) fn f64_parts(x: f64) -> (i64, i64) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    if exp == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), exp - 1075)
    }
}

/// `floor(x · 2^bits)` as an exact big integer (sign preserved).
pub(crate) fn f64_to_fixed(x: f64, bits: u32) -> BigInt {
    let (m, e) = f64_parts(x);
    let m = BigInt::from(m);
    let shift = e + bits as i64;
    if shift >= 0 {
        m << (shift as usize)
    } else {
        // arithmetic shift floors toward -inf
        m >> ((-shift) as usize)
    }
}
