use std::f64::consts::{PI, TAU};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::dynamics::fourier::FourierModel;
use crate::error::{Error, Result};
use crate::num::{bigint_scaled_f64, f64_parts, pow2};
use crate::tau::is_resonant;

/// Centered value in `[−1/2, 1/2)` of a fixed-point phase, with relative
/// accuracy even when the phase is extremely close to an integer.
pub(crate) fn centered(v: &BigUint, bits: u32) -> f64 {
    let half = BigUint::one() << (bits as usize - 1);
    if v >= &half {
        let m = BigUint::one() << bits as usize;
        -crate::num::biguint_scaled_f64(&(m - v), bits as i64)
    } else {
        crate::num::biguint_scaled_f64(v, bits as i64)
    }
}

/// `n · v mod 2^bits`.
pub(crate) fn mul_phase(v: &BigUint, n: &BigInt, bits: u32) -> BigUint {
    let m = BigInt::one() << bits as usize;
    let p = BigInt::from(v.clone()) * n;
    p.mod_floor(&m).to_biguint().unwrap()
}

/// `(a + b) mod 2^bits`.
pub(crate) fn add_phase(a: &BigUint, b: &BigUint, bits: u32) -> BigUint {
    let m = BigUint::one() << bits as usize;
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

/// `(a − b) mod 2^bits`.
pub(crate) fn sub_phase(a: &BigUint, b: &BigUint, bits: u32) -> BigUint {
    let m = BigUint::one() << bits as usize;
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// `e(t) = exp(2πi t)`.
pub(crate) fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

/// `e(a) − 1` without cancellation for small `a`.
pub(crate) fn e_minus_one(a: f64) -> Complex64 {
    let s = (PI * a).sin();
    Complex64::new(-2.0 * s * s, (TAU * a).sin())
}

/// Fractional part of `steps · mean`, computed exactly from the binary
/// expansion of `mean`.
pub(crate) fn linear_frac(steps: &BigInt, mean: f64) -> f64 {
    let (mant, exp) = f64_parts(mean);
    if mant == 0 || exp >= 0 {
        return 0.0;
    }
    let den_bits = (-exp) as u32;
    let m = BigInt::one() << den_bits as usize;
    let r = (steps * BigInt::from(mant)).mod_floor(&m);
    crate::num::bigint_scaled_f64(&r, den_bits as i64)
}

/// A fiber displacement `steps · ĥ(0) + osc`, kept split so that the linear
/// part can be reduced mod 1 exactly however large `steps` is.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberValue {
    pub steps: BigInt,
    pub mean: f64,
    pub osc: f64,
    pub err: f64,
}

impl FiberValue {
    pub fn new(steps: BigInt, mean: f64, osc: f64, err: f64) -> Self {
        FiberValue { steps, mean, osc, err }
    }

    /// `steps · mean` as a float.
    pub fn linear(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            bigint_scaled_f64(&self.steps, 0) * self.mean
        }
    }

    pub fn value(&self) -> f64 {
        self.linear() + self.osc
    }

    /// The displacement mod 1, in `[0, 1)`.
    pub fn mod1(&self) -> f64 {
        let v = (linear_frac(&self.steps, self.mean) + self.osc).rem_euclid(1.0);
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    }

    /// Distance between two displacements on the circle.
    pub fn circle_dist(&self, other: &FiberValue) -> f64 {
        let d = (self.mod1() - other.mod1()).rem_euclid(1.0);
        d.min(1.0 - d)
    }
}

/// One non-zero Fourier mode with its precomputed small divisor.
#[derive(Clone, Debug)]
pub(crate) struct Mode {
    pub freq: BigInt,
    pub coeff: Complex64,
    /// `mα mod 1` at the working precision
    pub alpha_phase: BigUint,
    /// uncertainty of `alpha_phase`
    pub alpha_err: f64,
    /// centered `mα`
    pub a: f64,
    pub sin_a: f64,
    /// `(k, m_k)` with `m = m_k q_k`, `1 ≤ |m_k| ≤ a_k`, when such `k ≤ K` exists
    pub scale: Option<(usize, BigInt)>,
}

/// Lattice position of a frequency: the `k` with `m = m_k q_k`, `|m_k| ≤ a_k`.
///
/// For `k ≥ 2` such a `k` is unique when it exists (`a_j q_j < q_{j+1} ≤ q_k`
/// for `j < k`); we keep the largest one to settle `q_1 = q_2 = 1`.
pub fn lattice_scale(cf: &ContinuedFraction, m: &BigInt) -> Option<(usize, BigInt)> {
    let abs = m.magnitude();
    for k in (1..=cf.depth()).rev() {
        let q = cf.q(k);
        if q > abs {
            continue;
        }
        let (d, r) = abs.div_rem(q);
        if r.is_zero() && &d <= cf.a(k) {
            let mk = BigInt::from_biguint(m.sign(), d);
            return Some((k, mk));
        }
    }
    None
}

/// The skew product `T(x, y) = (x + α, y + h(x))`.
#[derive(Clone, Debug)]
pub struct SkewProduct {
    cf: ContinuedFraction,
    h: FourierModel,
    bits: u32,
    modes: Vec<Mode>,
    resonant: Vec<bool>,
    compliant: bool,
    coboundary: Option<super::CoboundarySpec>,
}

impl SkewProduct {
    /// `h` must be real-valued and its frequencies must lie below
    /// `q_{K+1}`, so that every mode has a known place in the lattice.
    pub fn new(cf: ContinuedFraction, h: FourierModel, bits: u32) -> Result<Self> {
        if bits < 64 {
            return Err(Error::invalid("precision must be at least 64 bits"));
        }
        if !h.is_real() {
            return Err(Error::invalid(
                "h must be real-valued (conjugate-symmetric coefficients)",
            ));
        }
        let top = cf.q(cf.depth() + 1);
        if h.max_frequency().magnitude() >= top {
            return Err(Error::invalid(format!(
                "frequency {} is not below q_(K+1) = {top}; extend the expansion",
                h.max_frequency()
            )));
        }
        let tau = h.tau();
        let resonant: Vec<bool> = (0..=cf.depth())
            .map(|k| k >= 1 && is_resonant(&cf, k, tau))
            .collect();
        let mut modes = Vec::with_capacity(h.support_len());
        for (m, c) in h.oscillatory() {
            modes.push(make_mode(&cf, m, *c, bits)?);
        }
        let compliant = modes
            .iter()
            .all(|md| matches!(md.scale, Some((k, _)) if resonant[k]));
        Ok(SkewProduct {
            cf,
            h,
            bits,
            modes,
            resonant,
            compliant,
            coboundary: None,
        })
    }

    pub(crate) fn with_coboundary(mut self, spec: super::CoboundarySpec) -> Self {
        self.coboundary = Some(spec);
        self
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn h(&self) -> &FourierModel {
        &self.h
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mean(&self) -> f64 {
        self.h.mean()
    }

    /// Whether `support(ĥ) ⊆ M ∪ {0}`.
    pub fn hypothesis_compliant(&self) -> bool {
        self.compliant
    }

    pub fn coboundary(&self) -> Option<&super::CoboundarySpec> {
        self.coboundary.as_ref()
    }

    /// The resonance flag of scale `k` for the decay exponent of `h`.
    pub fn is_resonant(&self, k: usize) -> bool {
        self.resonant.get(k).copied().unwrap_or(false)
    }

    pub(crate) fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Modes sitting on scale `k` of the lattice.
    pub(crate) fn modes_at(&self, k: usize) -> impl Iterator<Item = &Mode> {
        self.modes
            .iter()
            .filter(move |m| matches!(&m.scale, Some((j, _)) if *j == k))
    }

    /// `m·x mod 1` at the working precision, with its error.
    pub(crate) fn x_phase(&self, m: &BigInt, x: &CirclePoint) -> (BigUint, f64) {
        let xs = x.rescale(self.bits);
        let v = mul_phase(xs.value(), m, self.bits);
        let err = xs.err() * m.magnitude().to_f64().unwrap_or(f64::INFINITY);
        (v, err)
    }

    /// `e(x)` evaluated on a phase given at the working precision.
    pub(crate) fn unit(&self, v: &BigUint) -> Complex64 {
        e(centered(v, self.bits))
    }

    /// `ĥ(m)·(e(Nmα) − 1)/(e(mα) − 1) · e(φ)` for the mode, where `φ` is
    /// a phase at the working precision; returns the term and its error.
    ///
    /// The ratio is evaluated as `e((b − a)/2) · sin(πb)/sin(πa)` with `a`,
    /// `b` the centered phases of `mα` and `Nmα`, so nothing cancels.
    pub(crate) fn ratio_term(&self, md: &Mode, n: &BigInt, phase: &BigUint, phase_err: f64) -> (Complex64, f64) {
        if n.is_zero() {
            return (Complex64::zero(), 0.0);
        }
        let bv = mul_phase(&md.alpha_phase, n, self.bits);
        let b = centered(&bv, self.bits);
        let b_err = md.alpha_err * n.magnitude().to_f64().unwrap_or(f64::INFINITY) + pow2(-(self.bits as i64));
        let ratio = (PI * b).sin() / md.sin_a;
        let ph = 0.5 * (b - md.a) + centered(phase, self.bits);
        let t = md.coeff * e(ph) * ratio;
        let amp = md.coeff.norm() / md.sin_a.abs();
        let err = t.norm() * (8.0 * f64::EPSILON + PI * md.alpha_err / md.sin_a.abs() + TAU * (phase_err + b_err))
            + amp * PI * b_err;
        (t, err)
    }

    /// `ĥ(m)·(e(u) − e(v))/(e(mα) − 1)` with the difference taken on exact
    /// phases.
    pub(crate) fn diff_term(&self, md: &Mode, u: &BigUint, v: &BigUint, err_uv: f64) -> (Complex64, f64) {
        let d = centered(&sub_phase(u, v, self.bits), self.bits);
        if d == 0.0 {
            return (Complex64::zero(), 0.0);
        }
        let mid = centered(v, self.bits) + 0.5 * d;
        // e(u) − e(v) = 2i e((u+v)/2) sin(π(u−v)); e(a) − 1 = 2i e(a/2) sin(πa)
        let t = md.coeff * e(mid - 0.5 * md.a) * ((PI * d).sin() / md.sin_a);
        let amp = md.coeff.norm() / md.sin_a.abs();
        let err = t.norm() * (8.0 * f64::EPSILON + PI * md.alpha_err / md.sin_a.abs()) + amp * TAU * err_uv;
        (t, err)
    }

    /// Iterate the map: `T^n(x, y) = (x + nα, y + H_n(x))`, using the closed
    /// expression of the fiber shift.
    pub fn iterate(&self, x: &CirclePoint, y: f64, n: &BigInt) -> Result<(CirclePoint, f64)> {
        let h = super::birkhoff::birkhoff_closed(self, x, n)?;
        let xn = x.add(&CirclePoint::multiple_of_alpha(&self.cf, n, self.bits));
        Ok((xn, (y + h.mod1()).rem_euclid(1.0)))
    }
}

fn make_mode(cf: &ContinuedFraction, m: &BigInt, c: Complex64, bits: u32) -> Result<Mode> {
    let p = CirclePoint::multiple_of_alpha(cf, m, bits);
    let a = centered(p.value(), bits);
    let alpha_err = p.err() + pow2(-(bits as i64));
    if a.abs() <= 4.0 * alpha_err {
        return Err(Error::precision(format!(
            "cannot separate {m}·α from an integer at {bits} bits"
        )));
    }
    Ok(Mode {
        freq: m.clone(),
        coeff: c,
        alpha_phase: p.value().clone(),
        alpha_err,
        a,
        sin_a: (PI * a).sin(),
        scale: lattice_scale(cf, m),
    })
}

pub(crate) fn abs_f64(n: &BigInt) -> f64 {
    n.abs().to_f64().unwrap_or(f64::INFINITY)
}
