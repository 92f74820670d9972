//! Continued fractions with certified convergent data.
//!
//! Indexing follows a shifted convention: `p_1 = 0, q_1 = 1, p_2 = 1, q_2 = a_1`
//! and `p_{k+1} = a_k p_k + p_{k-1}`. Under this convention `q_k` is the
//! denominator that in most textbooks is called `q_{k-1}`, and
//! `θ_k = q_k α − p_k` has sign `(−1)^{k+1}`. We also keep the seeds
//! `p_0 = 1, q_0 = 0`, so `θ_0 = −1`.
//!
//! A finite list of quotients does not determine α. We complete it with an
//! all-ones tail, `α = [0; a_1, …, a_K, 1, 1, …]`, which is irrational, so the
//! enclosure can be made as tight as the requested precision.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{bigint_scaled_f64, log2_biguint};

/// Partial quotients `a_1, …, a_K`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialQuotients {
    a: Vec<BigUint>,
}

impl PartialQuotients {
    pub fn new(a: Vec<BigUint>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 partial quotients, got {}",
                a.len()
            )));
        }
        if let Some(i) = a.iter().position(|x| x.is_zero()) {
            return Err(Error::invalid(format!("a_{} = 0; quotients must be >= 1", i + 1)));
        }
        Ok(PartialQuotients { a })
    }

    pub fn from_u64s(a: &[u64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| BigUint::from(x)).collect())
    }

    /// Parse a list of decimal strings.
    pub fn from_decimal_strs<S: AsRef<str>>(a: &[S]) -> Result<Self> {
        let parsed = a
            .iter()
            .map(|s| {
                s.as_ref()
                    .trim()
                    .parse::<BigUint>()
                    .map_err(|_| Error::invalid(format!("not a positive integer: {:?}", s.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `a_k` with 1-based `k`.
    pub fn get(&self, k: usize) -> &BigUint {
        &self.a[k - 1]
    }

    pub fn as_slice(&self) -> &[BigUint] {
        &self.a
    }

    /// The first `k` quotients (`k ≥ 2`).
    pub fn truncate(&self, k: usize) -> Result<Self> {
        Self::new(self.a[..k.min(self.a.len())].to_vec())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.a
                .iter()
                .map(|x| serde_json::Value::String(x.to_string()))
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Format("quotients must be a JSON array".into()))?;
        let strs = arr
            .iter()
            .map(|x| match x {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) if n.is_u64() => Ok(n.to_string()),
                _ => Err(Error::Format(format!("bad quotient entry {x}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_decimal_strs(&strs)
    }
}

impl Serialize for PartialQuotients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialQuotients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        PartialQuotients::from_decimal_strs(&v).map_err(serde::de::Error::custom)
    }
}

/// Closed interval `[lo, hi] · 2^{-bits}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

impl DyadicInterval {
    pub fn new(lo: BigInt, hi: BigInt, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid("interval with lo > hi"));
        }
        Ok(DyadicInterval { lo, hi, bits })
    }

    /// Enclosure of a decimal literal such as `"0.41421356237309504880"`,
    /// taking the digits as exact.
    pub fn from_decimal(s: &str, bits: u32) -> Result<Self> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits = format!("{int_part}{frac_part}");
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::invalid(format!("not a decimal number: {s:?}")));
        }
        let mut num: BigInt = digits.parse().unwrap();
        if neg {
            num = -num;
        }
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let scaled = num << bits as usize;
        let (lo, r) = scaled.div_mod_floor(&den);
        let hi = if r.is_zero() { lo.clone() } else { &lo + 1 };
        Ok(DyadicInterval { lo, hi, bits })
    }

    pub fn lo_f64(&self) -> f64 {
        bigint_scaled_f64(&self.lo, self.bits as i64)
    }

    pub fn hi_f64(&self) -> f64 {
        bigint_scaled_f64(&self.hi, self.bits as i64)
    }

    pub fn mid_f64(&self) -> f64 {
        bigint_scaled_f64(&(&self.lo + &self.hi), self.bits as i64 + 1)
    }

    pub fn width_f64(&self) -> f64 {
        bigint_scaled_f64(&(&self.hi - &self.lo), self.bits as i64)
    }

    /// `Some(±1)` when the whole interval lies strictly on one side of zero.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.sign().is_none()
    }

    /// Enclosure of `|x|`.
    pub fn abs(&self) -> DyadicInterval {
        match self.sign() {
            Some(1) => self.clone(),
            Some(_) => DyadicInterval {
                lo: -self.hi.clone(),
                hi: -self.lo.clone(),
                bits: self.bits,
            },
            None => DyadicInterval {
                lo: BigInt::zero(),
                hi: self.lo.abs().max(self.hi.abs()),
                bits: self.bits,
            },
        }
    }

    /// Re-express at another scale, widening outward when bits decrease.
    pub fn rescale(&self, bits: u32) -> DyadicInterval {
        if bits >= self.bits {
            let s = (bits - self.bits) as usize;
            DyadicInterval {
                lo: &self.lo << s,
                hi: &self.hi << s,
                bits,
            }
        } else {
            let s = (self.bits - bits) as usize;
            let lo = &self.lo >> s; // floor
            let hi = -((-&self.hi) >> s); // ceil
            DyadicInterval { lo, hi, bits }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lo": self.lo.to_string(),
            "hi": self.hi.to_string(),
            "bits": self.bits,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let get = |k: &str| -> Result<BigInt> {
            let x = v.get(k).ok_or_else(|| Error::Format(format!("missing {k}")))?;
            match x {
                serde_json::Value::String(s) => s
                    .parse()
                    .map_err(|_| Error::Format(format!("bad integer for {k}"))),
                serde_json::Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().unwrap())),
                _ => Err(Error::Format(format!("bad value for {k}"))),
            }
        };
        let bits = v
            .get("bits")
            .and_then(|b| b.as_u64())
            .ok_or_else(|| Error::Format("missing bits".into()))?;
        DyadicInterval::new(get("lo")?, get("hi")?, bits as u32)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo_f64(), self.hi_f64())
    }
}

/// A continued fraction with its convergents and certified enclosures.
///
/// `p` and `q` hold indices `0..=K+1`; `theta` holds `θ_0..=θ_{K+1}`, of which
/// `θ_1..=θ_K` are certified against the sandwich
/// `1/(q_{k+1}+q_k) < |θ_k| < 1/q_{k+1}`.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    quotients: PartialQuotients,
    p: Vec<BigUint>,
    q: Vec<BigUint>,
    theta: Vec<DyadicInterval>,
    alpha: DyadicInterval,
    precision: u32,
    theta_f64: Vec<f64>,
    qtheta_f64: Vec<f64>,
}

/// Bits of precision that certainly suffice for [`cf_from_quotients`].
pub fn min_precision_bits(a: &PartialQuotients) -> u32 {
    let (_, q) = convergents(a);
    let top = q.last().unwrap().bits() as u32;
    (2 * top + 32).max(64)
}

fn convergents(a: &PartialQuotients) -> (Vec<BigUint>, Vec<BigUint>) {
    let k = a.len();
    let mut p = Vec::with_capacity(k + 2);
    let mut q = Vec::with_capacity(k + 2);
    p.push(BigUint::one());
    q.push(BigUint::zero());
    p.push(BigUint::zero());
    q.push(BigUint::one());
    for i in 1..=k {
        let ai = a.get(i);
        let pn = ai * &p[i] + &p[i - 1];
        let qn = ai * &q[i] + &q[i - 1];
        p.push(pn);
        q.push(qn);
    }
    (p, q)
}

/// Build a continued fraction from its quotients with `precision_bits` of
/// enclosure accuracy.
pub fn cf_from_quotients(a: &PartialQuotients, precision_bits: u32) -> Result<ContinuedFraction> {
    if precision_bits < 64 {
        return Err(Error::invalid(format!(
            "precisionBits must be >= 64, got {precision_bits}"
        )));
    }
    let k = a.len();
    let (p, q) = convergents(a);
    let pbits = precision_bits as usize;

    // Enclose the golden tail φ = (1+√5)/2 with guard bits, then map both
    // endpoints through the Möbius map t ↦ (p_{K+1} t + p_K)/(q_{K+1} t + q_K),
    // which is monotone in t.
    let guard = pbits + 2 * q[k + 1].bits() as usize + 64;
    let five = BigUint::from(5u32) << (2 * guard);
    let s = five.sqrt();
    let one_g = BigUint::one() << guard;
    let phi_lo = &one_g + &s; // φ · 2^{guard+1}
    let phi_hi = &phi_lo + 1u32;
    let two_g1 = BigUint::one() << (guard + 1);
    let eval = |phi: &BigUint, ceil: bool| -> BigUint {
        let num = (&p[k + 1] * phi + &p[k] * &two_g1) << pbits;
        let den = &q[k + 1] * phi + &q[k] * &two_g1;
        let (d, r) = num.div_rem(&den);
        if ceil && !r.is_zero() {
            d + 1u32
        } else {
            d
        }
    };
    let e1_lo = eval(&phi_lo, false);
    let e1_hi = eval(&phi_lo, true);
    let e2_lo = eval(&phi_hi, false);
    let e2_hi = eval(&phi_hi, true);
    let lo = BigInt::from(e1_lo.min(e2_lo));
    let hi = BigInt::from(e1_hi.max(e2_hi));
    let alpha = DyadicInterval {
        lo,
        hi,
        bits: precision_bits,
    };
    build(a.clone(), p, q, alpha)
}

fn build(
    quotients: PartialQuotients,
    p: Vec<BigUint>,
    q: Vec<BigUint>,
    alpha: DyadicInterval,
) -> Result<ContinuedFraction> {
    let bits = alpha.bits;
    let one = BigInt::one() << bits as usize;
    let theta: Vec<DyadicInterval> = (0..p.len())
        .map(|i| {
            let qi = BigInt::from(q[i].clone());
            let pi = BigInt::from(p[i].clone()) * &one;
            DyadicInterval {
                lo: &qi * &alpha.lo - &pi,
                hi: &qi * &alpha.hi - &pi,
                bits,
            }
        })
        .collect();
    let theta_f64 = theta.iter().map(|t| t.mid_f64()).collect();
    let qtheta_f64 = theta
        .iter()
        .zip(&q)
        .map(|(t, qi)| {
            let qi = BigInt::from(qi.clone());
            bigint_scaled_f64(&((&t.lo + &t.hi) * qi), bits as i64 + 1)
        })
        .collect();
    let cf = ContinuedFraction {
        quotients,
        p,
        q,
        theta,
        alpha,
        precision: bits,
        theta_f64,
        qtheta_f64,
    };
    cf.verify()?;
    Ok(cf)
}

impl ContinuedFraction {
    /// Number of quotients `K`; convergents are known up to index `K+1`.
    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    pub fn quotients(&self) -> &PartialQuotients {
        &self.quotients
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision
    }

    /// `a_k`, 1-based, `k ≤ K`.
    pub fn a(&self, k: usize) -> &BigUint {
        self.quotients.get(k)
    }

    /// `a_k` as `u64`, if it fits.
    pub fn a_u64(&self, k: usize) -> Option<u64> {
        self.a(k).to_u64()
    }

    /// `q_k` for `0 ≤ k ≤ K+1`.
    pub fn q(&self, k: usize) -> &BigUint {
        &self.q[k]
    }

    pub fn p(&self, k: usize) -> &BigUint {
        &self.p[k]
    }

    pub fn q_u128(&self, k: usize) -> Option<u128> {
        self.q[k].to_u128()
    }

    /// `q_1, …, q_K`.
    pub fn denominators(&self) -> &[BigUint] {
        &self.q[1..=self.depth()]
    }

    /// `p_1, …, p_K`.
    pub fn numerators(&self) -> &[BigUint] {
        &self.p[1..=self.depth()]
    }

    pub fn alpha(&self) -> &DyadicInterval {
        &self.alpha
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.mid_f64()
    }

    /// Enclosure of `θ_k` for `0 ≤ k ≤ K+1` (certified for `1 ≤ k ≤ K`).
    pub fn theta(&self, k: usize) -> &DyadicInterval {
        &self.theta[k]
    }

    pub fn theta_f64(&self, k: usize) -> f64 {
        self.theta_f64[k]
    }

    /// `q_k θ_k` as a float; note `q_k² α ≡ q_k θ_k (mod 1)`.
    pub fn q_theta_f64(&self, k: usize) -> f64 {
        self.qtheta_f64[k]
    }

    /// `(−1)^{k+1}`, the sign of `θ_k`.
    pub fn theta_sign(k: usize) -> i32 {
        if k % 2 == 1 {
            1
        } else {
            -1
        }
    }

    /// Check every structural invariant exactly; used on construction.
    pub fn verify(&self) -> Result<()> {
        let k_max = self.depth();
        let p = &self.p;
        let q = &self.q;
        if !(p[1].is_zero() && q[1].is_one() && p[2].is_one() && &q[2] == self.a(1)) {
            return Err(Error::invalid("initial convergents are wrong"));
        }
        for k in 2..=k_max {
            let a = self.a(k);
            if p[k + 1] != a * &p[k] + &p[k - 1] || q[k + 1] != a * &q[k] + &q[k - 1] {
                return Err(Error::invalid(format!("recurrence fails at k={k}")));
            }
        }
        for k in 1..=k_max + 1 {
            if !p[k].gcd(&q[k]).is_one() {
                return Err(Error::invalid(format!("gcd(p_{k}, q_{k}) != 1")));
            }
        }
        for k in 1..k_max {
            if q[k + 2] < &q[k] * 2u32 {
                return Err(Error::invalid(format!("q_{} < 2 q_{}", k + 2, k)));
            }
        }
        let one = BigInt::one() << self.precision as usize;
        for k in 1..=k_max {
            let t = &self.theta[k];
            match t.sign() {
                Some(s) if s == Self::theta_sign(k) => {}
                _ => {
                    return Err(Error::precision(format!(
                        "sign of θ_{k} not certified at {} bits",
                        self.precision
                    )))
                }
            }
            let abs = t.abs();
            let q1 = BigInt::from(q[k + 1].clone());
            let q0 = BigInt::from(q[k].clone());
            // 1/(q_{k+1}+q_k) < |θ_k| < 1/q_{k+1}, cross-multiplied
            if !(&abs.lo * (&q1 + &q0) > one && &abs.hi * &q1 < one) {
                return Err(Error::precision(format!(
                    "θ-sandwich for k={k} not certified at {} bits; depth {k_max} needs about {}",
                    self.precision,
                    2 * q[k_max + 1].bits() + 32
                )));
            }
        }
        // consecutive signs alternate (implied by the per-index sign check,
        // kept explicit for readers)
        for k in 1..k_max {
            if self.theta[k].sign() == self.theta[k + 1].sign() {
                return Err(Error::invalid(format!("θ_{k} and θ_{} share a sign", k + 1)));
            }
        }
        Ok(())
    }

    /// α as a fixed-point numerator at `bits` (floor of the lower endpoint)
    /// together with the enclosure width in units of `2^{-bits}`.
    pub fn alpha_fixed(&self, bits: u32) -> (BigUint, BigUint) {
        let a = self.alpha.rescale(bits);
        let width = (&a.hi - &a.lo).to_biguint().unwrap();
        (a.lo.to_biguint().expect("alpha > 0"), width)
    }

    /// Largest `k ≤ K` with `q_k ≤ n`; `None` for `n = 0`.
    pub fn scale_of(&self, n: &BigUint) -> Option<usize> {
        if n.is_zero() {
            return None;
        }
        let mut best = 1;
        for k in 1..=self.depth() {
            if &self.q[k] <= n {
                best = k;
            } else {
                break;
            }
        }
        Some(best)
    }

    /// `log2 q_k`.
    pub fn log2_q(&self, k: usize) -> f64 {
        if self.q[k].is_zero() {
            f64::NEG_INFINITY
        } else {
            log2_biguint(&self.q[k])
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strs = |v: &[BigUint]| -> Vec<String> { v.iter().map(|x| x.to_string()).collect() };
        serde_json::json!({
            "quotients": self.quotients.to_json(),
            "p": strs(self.numerators()),
            "q": strs(self.denominators()),
            "theta": (1..=self.depth()).map(|k| self.theta[k].to_json()).collect::<Vec<_>>(),
            "alpha": self.alpha.to_json(),
            "precision_bits": self.precision,
        })
    }
}

/// Interval Euclidean algorithm: extract every quotient on which both
/// endpoints of the enclosure agree, up to `max_k`.
pub fn cf_from_real(enclosure: &DyadicInterval, max_k: usize) -> Result<ContinuedFraction> {
    if enclosure.bits < 64 {
        return Err(Error::invalid("enclosure must carry at least 64 bits"));
    }
    let one = BigInt::one() << enclosure.bits as usize;
    if !(enclosure.lo.is_positive() && enclosure.hi < one) {
        return Err(Error::invalid("enclosure must lie inside (0, 1)"));
    }
    if enclosure.lo == enclosure.hi {
        return Err(Error::Rational);
    }
    // Each endpoint is the rational n/d; run Euclid on both in lockstep.
    let mut lo = (BigInt::from(1u32) << enclosure.bits as usize, enclosure.lo.clone());
    let mut hi = (BigInt::from(1u32) << enclosure.bits as usize, enclosure.hi.clone());
    let mut quotients: Vec<BigUint> = Vec::new();
    while quotients.len() < max_k {
        // current value is num/den with num in (0, den)
        let (ql, rl) = lo.0.div_rem(&lo.1);
        let (qh, rh) = hi.0.div_rem(&hi.1);
        if ql != qh {
            break;
        }
        quotients.push(ql.to_biguint().unwrap());
        if rl.is_zero() || rh.is_zero() {
            if rl.is_zero() && rh.is_zero() {
                return Err(Error::Rational);
            }
            break;
        }
        lo = (lo.1, rl);
        hi = (hi.1, rh);
    }
    if quotients.len() < 2 {
        return Err(Error::precision(format!(
            "enclosure certifies only {} quotient(s); at least 2 are needed",
            quotients.len()
        )));
    }
    // The last agreeing quotient may still sit at a boundary of the true
    // expansion; rebuild and drop trailing quotients until certification holds.
    let mut k = quotients.len();
    loop {
        let pq = PartialQuotients::new(quotients[..k].to_vec())?;
        match cf_from_quotients(&pq, enclosure.bits) {
            Ok(cf) => return Ok(cf),
            Err(e) if e.is_precision() && k > 2 => k -= 1,
            Err(e) => return Err(e),
        }
    }
}

/// Named quotient presets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `a_k = 1`
    Golden,
    /// `a_k = 2`
    Silver,
    /// `a_k = 2^{d k}`
    Liouville(u32),
    /// `a_k = 2^{2^k}`, capped where `a_k` stops fitting in 63 bits.
    Tower,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Preset> {
        let s = s.trim();
        match s {
            "golden" => Ok(Preset::Golden),
            "silver" => Ok(Preset::Silver),
            "tower" => Ok(Preset::Tower),
            _ => {
                if let Some(d) = s.strip_prefix("liouville-") {
                    let d: u32 = d
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad liouville exponent in {s:?}")))?;
                    if d == 0 {
                        return Err(Error::invalid("liouville-d needs d >= 1"));
                    }
                    Ok(Preset::Liouville(d))
                } else {
                    Err(Error::invalid(format!(
                        "unknown preset {s:?}; expected golden, silver, liouville-D or tower"
                    )))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Preset::Golden => "golden".into(),
            Preset::Silver => "silver".into(),
            Preset::Liouville(d) => format!("liouville-{d}"),
            Preset::Tower => "tower".into(),
        }
    }

    /// `a_k` for `k ≥ 1`.
    pub fn quotient(&self, k: usize) -> BigUint {
        match self {
            Preset::Golden => BigUint::one(),
            Preset::Silver => BigUint::from(2u32),
            Preset::Liouville(d) => BigUint::one() << (*d as usize * k),
            Preset::Tower => BigUint::one() << (1usize << k),
        }
    }

    /// Longest quotient list this preset offers (`None` when unbounded).
    pub fn max_len(&self) -> Option<usize> {
        match self {
            Preset::Tower => Some(5),
            _ => None,
        }
    }

    pub fn quotients(&self, k: usize) -> Result<PartialQuotients> {
        let k = self.max_len().map_or(k, |m| k.min(m));
        PartialQuotients::new((1..=k).map(|i| self.quotient(i)).collect())
    }

    /// The deepest prefix (at most `max_k`) certifiable at `precision_bits`.
    pub fn build(&self, max_k: usize, precision_bits: u32) -> Result<ContinuedFraction> {
        let limit = self.max_len().map_or(max_k, |m| max_k.min(m));
        let mut best: Option<ContinuedFraction> = None;
        for k in 2..=limit {
            let pq = self.quotients(k)?;
            if min_precision_bits(&pq) > precision_bits + 32 {
                break;
            }
            match cf_from_quotients(&pq, precision_bits) {
                Ok(cf) => best = Some(cf),
                Err(e) if e.is_precision() => break,
                Err(e) => return Err(e),
            }
        }
        best.ok_or_else(|| {
            Error::precision(format!(
                "preset {} cannot certify two quotients at {precision_bits} bits",
                self.name()
            ))
        })
    }
}

/// Sign helper shared by the numeration code.
pub(crate) fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|x| x.to_u64().unwrap()).collect()
    }

    // naive oracle: iterate the recurrence on u128 from its definition
    fn oracle(a: &[u64]) -> (Vec<u128>, Vec<u128>) {
        let mut p = vec![0u128, 1];
        let mut q = vec![1u128, a[0] as u128];
        for k in 1..a.len() - 1 {
            let pk = a[k] as u128 * p[k] + p[k - 1];
            let qk = a[k] as u128 * q[k] + q[k - 1];
            p.push(pk);
            q.push(qk);
        }
        (p, q)
    }

    #[test]
    fn fibonacci_and_pell_convergents() {
        let cf = cf_from_quotients(&PartialQuotients::from_u64s(&[1, 1, 1, 1, 1]).unwrap(), 128).unwrap();
        assert_eq!(strs(cf.denominators()), vec![1, 1, 2, 3, 5]);
        assert_eq!(strs(cf.numerators()), vec![0, 1, 1, 2, 3]);
        let cf = cf_from_quotients(&PartialQuotients::from_u64s(&[2, 2, 2, 2]).unwrap(), 128).unwrap();
        assert_eq!(strs(cf.denominators()), vec![1, 2, 5, 12]);
        assert_eq!(strs(cf.numerators()), vec![0, 1, 2, 5]);
        let (p, q) = oracle(&[2, 2, 2, 2]);
        assert_eq!(q, vec![1, 2, 5, 12]);
        assert_eq!(p, vec![0, 1, 2, 5]);
    }

    #[test]
    fn shortest_expansion_sandwich() {
        let cf = cf_from_quotients(&PartialQuotients::from_u64s(&[1, 1]).unwrap(), 64).unwrap();
        assert_eq!(strs(cf.denominators()), vec![1, 1]);
        let t = cf.theta(1).abs();
        assert!(t.lo_f64() > 0.5 && t.hi_f64() < 1.0);
    }

    #[test]
    fn golden_alpha_is_golden_conjugate() {
        let cf = Preset::Golden.build(40, 256).unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((cf.alpha_f64() - g).abs() < 1e-16);
        assert!(cf.depth() >= 40);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PartialQuotients::from_u64s(&[1]).is_err());
        assert!(PartialQuotients::from_u64s(&[1, 0, 2]).is_err());
        let pq = PartialQuotients::from_u64s(&[1, 2]).unwrap();
        assert!(matches!(cf_from_quotients(&pq, 32), Err(Error::Invalid(_))));
    }

    #[test]
    fn insufficient_precision_is_explicit() {
        let pq = Preset::Liouville(8).quotients(12).unwrap();
        let err = cf_from_quotients(&pq, 64).unwrap_err();
        assert!(err.is_precision(), "{err:?}");
        assert!(cf_from_quotients(&pq, min_precision_bits(&pq)).is_ok());
    }

    #[test]
    fn sqrt2_from_decimal_enclosure() {
        // √2 − 1 to 40 digits
        let e = DyadicInterval::from_decimal("0.4142135623730950488016887242096980785696", 128).unwrap();
        let cf = cf_from_real(&e, 10).unwrap();
        assert_eq!(cf.depth(), 10);
        assert!(cf.quotients().as_slice().iter().all(|a| a == &BigUint::from(2u32)));
    }

    #[test]
    fn rational_enclosure_is_rejected() {
        let e = DyadicInterval::from_decimal("0.5", 128).unwrap();
        assert_eq!(cf_from_real(&e, 10).unwrap_err(), Error::Rational);
    }

    #[test]
    fn golden_round_trip_from_real() {
        let cf = Preset::Golden.build(30, 128).unwrap();
        let back = cf_from_real(cf.alpha(), 30).unwrap();
        assert_eq!(back.quotients().as_slice(), &cf.quotients().as_slice()[..back.depth()]);
        assert!(back.depth() >= 25);
    }

    #[test]
    fn tower_preset_caps() {
        let cf = Preset::Tower.build(40, 512).unwrap();
        assert_eq!(cf.depth(), 5);
        assert_eq!(cf.a_u64(5), Some(1u64 << 32));
    }

    #[test]
    fn json_round_trip() {
        let pq = PartialQuotients::from_u64s(&[3, 7, 15, 1, 292]).unwrap();
        let j = serde_json::to_string(&pq).unwrap();
        assert_eq!(j, r#"["3","7","15","1","292"]"#);
        let back: PartialQuotients = serde_json::from_str(&j).unwrap();
        assert_eq!(back, pq);
        let cf = cf_from_quotients(&pq, 128).unwrap();
        let e = DyadicInterval::from_json(&cf.alpha().to_json()).unwrap();
        assert_eq!(&e, cf.alpha());
    }
}
