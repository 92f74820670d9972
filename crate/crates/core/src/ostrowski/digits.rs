use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cf::{sign_of, ContinuedFraction};
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::num::{bigint_scaled_f64, pow2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitKind {
    /// `n = Σ n_k q_k`
    Integer,
    /// `x = Σ x̃_k θ_k`
    Real,
}

/// Digits `n_k` (or `x̃_k`) indexed from `k = 1`.
///
/// Digits are signed so that the relaxed decompositions `n = Σ n_k q_k` with
/// `|n_k| ≪ a_k` used by the Birkhoff approximations fit the same type; the
/// validity predicate checks the strict Ostrowski conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct OstrowskiDigits {
    digits: Vec<i64>,
    kind: DigitKind,
    tail_err: f64,
}

impl OstrowskiDigits {
    pub fn zero(kind: DigitKind) -> Self {
        OstrowskiDigits {
            digits: Vec::new(),
            kind,
            tail_err: 0.0,
        }
    }

    /// Integer-kind digits from `n_1, n_2, …`.
    pub fn from_vec(digits: Vec<i64>) -> Self {
        let mut d = OstrowskiDigits {
            digits,
            kind: DigitKind::Integer,
            tail_err: 0.0,
        };
        d.trim();
        d
    }

    pub fn from_map(map: &BTreeMap<usize, i64>, kind: DigitKind) -> Result<Self> {
        let mut d = OstrowskiDigits::zero(kind);
        for (&k, &v) in map {
            if k == 0 {
                return Err(Error::invalid("digit indices start at 1"));
            }
            d.set(k, v);
        }
        Ok(d)
    }

    fn trim(&mut self) {
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
    }

    pub fn kind(&self) -> DigitKind {
        self.kind
    }

    /// Zero for integer numerations.
    pub fn tail_err_bound(&self) -> f64 {
        self.tail_err
    }

    /// Digit at `k ≥ 1` (zero outside the stored support).
    pub fn get(&self, k: usize) -> i64 {
        if k == 0 {
            return 0;
        }
        self.digits.get(k - 1).copied().unwrap_or(0)
    }

    pub fn set(&mut self, k: usize, v: i64) {
        assert!(k >= 1, "digit indices start at 1");
        if self.digits.len() < k {
            self.digits.resize(k, 0);
        }
        self.digits[k - 1] = v;
        self.trim();
    }

    /// Highest index with a non-zero digit.
    pub fn max_index(&self) -> usize {
        self.digits.len()
    }

    /// Lowest index with a non-zero digit, if any.
    pub fn min_index(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0).map(|i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// `(k, digit)` over the non-zero digits.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| (i + 1, d))
    }

    /// The digits restricted to `[lo, hi]`.
    pub fn restrict(&self, lo: usize, hi: usize) -> OstrowskiDigits {
        let mut d = OstrowskiDigits::zero(self.kind);
        for (k, v) in self.nonzero() {
            if k >= lo && k <= hi {
                d.set(k, v);
            }
        }
        d
    }

    pub fn to_map(&self) -> BTreeMap<usize, i64> {
        self.nonzero().collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m: serde_json::Map<String, serde_json::Value> = self
            .nonzero()
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(v)))
            .collect();
        serde_json::Value::Object(m)
    }

    pub fn from_json(v: &serde_json::Value, kind: DigitKind) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Format("digits must be a JSON object".into()))?;
        let mut map = BTreeMap::new();
        for (k, x) in obj {
            let k: usize = k.parse().map_err(|_| Error::Format(format!("bad index {k:?}")))?;
            let x = x
                .as_i64()
                .ok_or_else(|| Error::Format(format!("bad digit at {k}")))?;
            map.insert(k, x);
        }
        Self::from_map(&map, kind)
    }
}

/// Greedy Ostrowski numeration of `n < q_{K+1}`.
pub fn encode_int(n: &BigUint, cf: &ContinuedFraction) -> Result<OstrowskiDigits> {
    let top = cf.depth();
    if n >= cf.q(top + 1) {
        return Err(Error::OutOfRange {
            value: n.to_string(),
            depth: top,
        });
    }
    let mut digits = vec![0i64; top];
    let mut r = n.clone();
    for k in (1..=top).rev() {
        if r.is_zero() {
            break;
        }
        let (d, rem) = r.div_rem(cf.q(k));
        // d ≤ a_k because r < q_{k+1} at every step
        digits[k - 1] = d
            .to_i64()
            .ok_or_else(|| Error::invalid(format!("digit at {k} does not fit in 64 bits")))?;
        r = rem;
    }
    Ok(OstrowskiDigits::from_vec(digits))
}

/// `Σ n_k q_k` for a valid integer numeration.
pub fn decode_int(d: &OstrowskiDigits, cf: &ContinuedFraction) -> Result<BigUint> {
    if d.kind != DigitKind::Integer {
        return Err(Error::InvalidNumeration(
            "decode_int called on a real-kind numeration".into(),
        ));
    }
    check_valid(d, cf)?;
    Ok(decode_signed(d, cf)?.to_biguint().unwrap())
}

/// `Σ n_k q_k` for arbitrary signed digits, as in the relaxed expansions.
pub fn decode_signed(d: &OstrowskiDigits, cf: &ContinuedFraction) -> Result<BigInt> {
    if d.max_index() > cf.depth() + 1 {
        return Err(Error::OutOfRange {
            value: format!("digit index {}", d.max_index()),
            depth: cf.depth(),
        });
    }
    let mut s = BigInt::zero();
    for (k, v) in d.nonzero() {
        s += BigInt::from(v) * BigInt::from(cf.q(k).clone());
    }
    Ok(s)
}

/// `n̄_k = Σ_{j ≤ k} n_j q_j` (digits below the window are zero by assumption).
pub fn partial_sum(d: &OstrowskiDigits, cf: &ContinuedFraction, k: usize) -> Result<BigInt> {
    decode_signed(&d.restrict(1, k), cf)
}

pub fn is_valid(d: &OstrowskiDigits, cf: &ContinuedFraction) -> bool {
    check_valid(d, cf).is_ok()
}

/// The Ostrowski conditions: `0 ≤ n_k ≤ a_k`, `n_1 ≤ a_1 − 1`, and
/// `n_k = 0` whenever `n_{k+1} = a_{k+1}`.
pub fn check_valid(d: &OstrowskiDigits, cf: &ContinuedFraction) -> Result<()> {
    if d.max_index() > cf.depth() {
        return Err(Error::InvalidNumeration(format!(
            "digit at index {} beyond depth {}",
            d.max_index(),
            cf.depth()
        )));
    }
    for k in 1..=d.max_index() {
        let v = d.get(k);
        let cap = cf.a(k).to_i64().unwrap_or(i64::MAX);
        let cap = if k == 1 { cap - 1 } else { cap };
        if v < 0 || v > cap {
            return Err(Error::InvalidNumeration(format!("digit {v} at k={k} outside [0, {cap}]")));
        }
        if k >= 2 && v == cap && v > 0 && d.get(k - 1) != 0 {
            return Err(Error::InvalidNumeration(format!(
                "digit at k={} must vanish since the digit at k={k} is maximal",
                k - 1
            )));
        }
    }
    Ok(())
}

/// Real Ostrowski numeration of the representative of `x` in `[−α, 1−α)`
/// through depth `depth`.
///
/// With `t_k = |θ_k|` and `s_k = sign θ_k`, the tail `T_k = Σ_{j≥k} x̃_j θ_j`
/// satisfies `s_k T_k ∈ [−t_k, t_{k−1} − t_k)`, widened to `[−t_k, t_{k−1})`
/// when `x̃_{k−1} = 0`. Peeling one scale at a time gives
/// `x̃_k = 0` if `s_k T_k ≤ t_{k+1}`, else `⌈(s_k T_k − t_{k+1}) / t_k⌉`.
pub fn encode_real(x: &CirclePoint, cf: &ContinuedFraction, depth: usize) -> Result<OstrowskiDigits> {
    if depth == 0 || depth > cf.depth() {
        return Err(Error::invalid(format!(
            "real numeration depth {depth} outside 1..={}",
            cf.depth()
        )));
    }
    let bits = x.bits().max(cf.precision_bits());
    let xs = x.rescale(bits);
    let mut rem = xs.representative_fixed(cf);
    // accumulated uncertainty of `rem`, in units of 2^{-bits}
    let unit = pow2(-(bits as i64));
    let mut err_units = xs.err() / unit + 2.0;
    let mids: Vec<(BigInt, f64)> = (0..=depth + 1)
        .map(|k| {
            let t = cf.theta(k).rescale(bits);
            let w = bigint_scaled_f64(&(&t.hi - &t.lo), 0);
            ((&t.lo + &t.hi) >> 1usize, w / 2.0 + 1.0)
        })
        .collect();
    let mut digits = vec![0i64; depth];
    for k in 1..=depth {
        let s = ContinuedFraction::theta_sign(k);
        let (tk, tk_err) = (mids[k].0.abs(), mids[k].1);
        let (tk1, tk1_err) = (mids[k + 1].0.abs(), mids[k + 1].1);
        let v = if s > 0 { rem.clone() } else { -rem.clone() };
        let shifted = &v - &tk1;
        let digit = if sign_of(&shifted) <= 0 {
            BigInt::zero()
        } else {
            // ceil(shifted / tk)
            let (q, r) = shifted.div_mod_floor(&tk);
            if r.is_zero() {
                q
            } else {
                q + 1
            }
        };
        // distance of `shifted` to the nearest decision boundary: zero when
        // shifted ≤ 0, otherwise the nearest multiple of t_k
        let gap = if sign_of(&shifted) <= 0 {
            -shifted.clone()
        } else {
            let (_, r) = shifted.div_mod_floor(&tk);
            let other = &tk - &r;
            r.min(other)
        };
        let dig_f = digit.to_f64().unwrap_or(f64::INFINITY);
        let budget = err_units + tk1_err + (dig_f + 1.0) * tk_err;
        let gap_f = bigint_scaled_f64(&gap, 0);
        if gap_f <= budget {
            return Err(Error::BoundaryAmbiguous(format!(
                "x̃_{k} undecided: margin {:.3e} vs error {:.3e}",
                gap_f * unit,
                budget * unit
            )));
        }
        let d = digit
            .to_i64()
            .ok_or_else(|| Error::invalid(format!("digit at {k} does not fit in 64 bits")))?;
        digits[k - 1] = d;
        if d != 0 {
            rem -= &digit * &mids[k].0;
            err_units += dig_f * tk_err;
        }
    }
    let t_last = cf.theta(depth).abs().hi_f64();
    let mut out = OstrowskiDigits::from_vec(digits);
    out.kind = DigitKind::Real;
    out.tail_err = t_last + err_units * unit;
    check_valid(&out, cf)?;
    Ok(out)
}

/// `Σ x̃_k θ_k` as a float, from the digits of a real numeration.
pub fn reconstruct_real(d: &OstrowskiDigits, cf: &ContinuedFraction) -> f64 {
    let bits = cf.precision_bits();
    let mut s = BigInt::zero();
    for (k, v) in d.nonzero() {
        let t = cf.theta(k);
        s += BigInt::from(v) * ((&t.lo + &t.hi) >> 1usize);
    }
    bigint_scaled_f64(&s, bits as i64)
}
