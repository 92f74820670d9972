//! Trigonometric approximation of arc indicators.
//!
//! `ψ = 𝟏_D ∗ J_m` where `J_m = F_m² / ‖F_m‖²` is the Jackson kernel built
//! from the Fejér kernel `F_m`. It is a nonnegative trigonometric polynomial
//! of degree `A = 2(m − 1)` with unit mass; so at distance `≥ d` from both
//! endpoints `|ψ − 𝟏_D|` is bounded by the kernel mass outside `[−d, d]`,
//! which has a closed form in the coefficients. The exceptional arcs `U^±`
//! are the `d`-neighbourhoods of the two endpoints.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ostrowski::{Arc, ResidueArcs};

/// Default cap on the degree `A`.
pub const DEFAULT_MAX_DEGREE: usize = 1 << 20;

/// `[start, start + length)` on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleArc {
    pub start: f64,
    pub length: f64,
}

impl CircleArc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) || !start.is_finite() {
            return Err(Error::invalid(format!("arc length {length} must lie in (0, 1]")));
        }
        Ok(CircleArc {
            start: start.rem_euclid(1.0),
            length,
        })
    }

    pub fn is_full(&self) -> bool {
        self.length >= 1.0
    }

    pub fn contains(&self, w: f64) -> bool {
        self.is_full() || (w - self.start).rem_euclid(1.0) < self.length
    }

    /// Circle distance from `w` to the nearer endpoint.
    pub fn boundary_distance(&self, w: f64) -> f64 {
        if self.is_full() {
            return f64::INFINITY;
        }
        let d = |a: f64| {
            let u = (w - a).rem_euclid(1.0);
            u.min(1.0 - u)
        };
        d(self.start).min(d(self.start + self.length))
    }
}

impl From<&Arc> for CircleArc {
    fn from(a: &Arc) -> Self {
        CircleArc {
            start: a.start_f64(),
            length: a.length_f64().min(1.0),
        }
    }
}

/// The Jackson kernel of degree `A` and its exceptional radius.
#[derive(Clone, Debug)]
struct Kernel {
    /// `c_ξ` for `0 ≤ ξ ≤ A` (even in `ξ`), `c_0 = 1`
    coeff: Vec<f64>,
    radius: f64,
    tail: f64,
}

/// Coefficients of `J_m` for `ξ = 0, …, 2(m − 1)`.
///
/// `m F_m` has coefficients `m − |j|`, the autocorrelation of a box of
/// length `m`, so `(m F_m)²` is a fourfold box convolution and each step is a
/// running-sum pass over exact integers.
fn jackson(m: usize) -> Vec<f64> {
    let mut c: Vec<i128> = vec![1; m];
    for _ in 0..3 {
        let mut next = vec![0i128; c.len() + m - 1];
        let mut run = 0i128;
        for (i, slot) in next.iter_mut().enumerate() {
            if i < c.len() {
                run += c[i];
            }
            if i >= m {
                run -= c[i - m];
            }
            *slot = run;
        }
        c = next;
    }
    // centre of the length 4m − 3 sequence is index 2(m − 1)
    let centre = 2 * (m - 1);
    let c0 = c[centre] as f64;
    c[centre..].iter().map(|&v| v as f64 / c0).collect()
}

/// Kernel mass outside `[−d, d]`, with a rounding margin.
fn tail_mass(c: &[f64], d: f64) -> f64 {
    let mut inner = 2.0 * d;
    for (xi, &v) in c.iter().enumerate().skip(1) {
        inner += 2.0 * v * (TAU * xi as f64 * d).sin() / (PI * xi as f64);
    }
    (1.0 - inner).max(0.0) + 4.0 * c.len() as f64 * f64::EPSILON
}

/// Smallest Jackson kernel whose mass outside `[−d, d]` is at most `target`.
fn fit_kernel(d: f64, target: f64, max_degree: usize) -> Result<Kernel> {
    let ok = |m: usize| {
        let c = jackson(m);
        let t = tail_mass(&c, d);
        (t <= target).then_some((c, t))
    };
    // doubling, then bisection on m
    let mut hi = 2usize;
    loop {
        if 2 * (hi - 1) > max_degree {
            return Err(Error::TooLarge {
                estimate: (2 * (hi - 1)) as f64,
                limit: max_degree as f64,
            });
        }
        if ok(hi).is_some() {
            break;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (coeff, tail) = ok(hi).unwrap();
    Ok(Kernel {
        coeff,
        radius: d,
        tail,
    })
}

/// `ψ_r(w) = Σ_{|ξ| ≤ A} θ_{r,ξ} e(ξw)` approximating `𝟏_D` for one arc.
#[derive(Clone, Debug)]
pub struct ArcApproximation {
    pub r: usize,
    pub arc: CircleArc,
    pub degree: usize,
    /// `θ_ξ` for `ξ = −A, …, A`
    coeffs: Vec<Complex64>,
    /// half-width of each exceptional arc around an endpoint
    pub exceptional_radius: f64,
    /// guaranteed `sup |ψ − 𝟏_D|` outside the exceptional arcs
    pub sup_bound: f64,
}

impl ArcApproximation {
    pub fn coeff(&self, xi: i64) -> Complex64 {
        let a = self.degree as i64;
        if xi.abs() > a {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(xi + a) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, w: f64) -> f64 {
        // θ_{−ξ} = conj θ_ξ, so ψ(w) = θ_0 + 2 Re Σ_{ξ ≥ 1} θ_ξ e(ξw)
        let a = self.degree;
        let step = Complex64::from_polar(1.0, TAU * w.rem_euclid(1.0));
        let mut z = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        for xi in 1..=a {
            z *= step;
            if xi % 256 == 0 {
                z = Complex64::from_polar(1.0, TAU * (xi as f64 * w).rem_euclid(1.0));
            }
            s += self.coeffs[a + xi] * z;
        }
        self.coeffs[a].re + 2.0 * s.re
    }

    /// Total length `|U^−| + |U^+|`.
    pub fn exceptional_length(&self) -> f64 {
        if self.arc.is_full() {
            0.0
        } else {
            4.0 * self.exceptional_radius
        }
    }

    pub fn is_exceptional(&self, w: f64) -> bool {
        self.arc.boundary_distance(w) < self.exceptional_radius
    }
}

fn build(r: usize, arc: CircleArc, k: &Kernel) -> ArcApproximation {
    if arc.is_full() {
        return ArcApproximation {
            r,
            arc,
            degree: 0,
            coeffs: vec![Complex64::new(1.0, 0.0)],
            exceptional_radius: 0.0,
            sup_bound: 0.0,
        };
    }
    let a = k.coeff.len() - 1;
    let mut coeffs = Vec::with_capacity(2 * a + 1);
    for xi in -(a as i64)..=(a as i64) {
        let ind = if xi == 0 {
            Complex64::new(arc.length, 0.0)
        } else {
            // ∫_D e(−ξw) dw = e(−ξs)(1 − e(−ξℓ)) / (2πiξ)
            let x = xi as f64;
            let es = Complex64::from_polar(1.0, -TAU * (x * arc.start).rem_euclid(1.0));
            let el = Complex64::from_polar(1.0, -TAU * (x * arc.length).rem_euclid(1.0));
            es * (Complex64::new(1.0, 0.0) - el) / Complex64::new(0.0, TAU * x)
        };
        coeffs.push(ind * k.coeff[xi.unsigned_abs() as usize]);
    }
    ArcApproximation {
        r,
        arc,
        degree: a,
        coeffs,
        exceptional_radius: k.radius,
        sup_bound: k.tail,
    }
}

/// Exceptional radius and error target for `(q_{k_−}, δ)`: `|U| = 4d` just
/// below `δ/(32 q)`, error at most `δ/(16 q)`.
fn targets(q_k_minus: u64, delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) || q_k_minus == 0 {
        return Err(Error::invalid("need δ ∈ (0, 1) and q_{k_−} ≥ 1"));
    }
    let q = q_k_minus as f64;
    Ok((delta / (129.0 * q), delta / (16.0 * q)))
}

pub fn arc_indicator_trigpoly(arc: CircleArc, q_k_minus: u64, delta: f64) -> Result<ArcApproximation> {
    arc_indicator_trigpoly_capped(arc, q_k_minus, delta, DEFAULT_MAX_DEGREE)
}

pub fn arc_indicator_trigpoly_capped(
    arc: CircleArc,
    q_k_minus: u64,
    delta: f64,
    max_degree: usize,
) -> Result<ArcApproximation> {
    let (d, target) = targets(q_k_minus, delta)?;
    if arc.is_full() {
        return Ok(build(0, arc, &Kernel { coeff: vec![1.0], radius: 0.0, tail: 0.0 }));
    }
    let k = fit_kernel(d, target, max_degree)?;
    Ok(build(0, arc, &k))
}

/// Approximations of every `D_r` with a common degree, and
/// `B₀ = max_ξ Σ_r |θ_{r,ξ}|`.
#[derive(Clone, Debug)]
pub struct ArcFamily {
    pub degree: usize,
    pub b0: f64,
    pub members: Vec<ArcApproximation>,
}

impl ArcFamily {
    pub fn exceptional_length(&self) -> f64 {
        self.members.iter().map(|m| m.exceptional_length()).sum()
    }
}

pub fn arc_family_trigpoly(arcs: &ResidueArcs, delta: f64, max_degree: usize) -> Result<ArcFamily> {
    let q = arcs.len() as u64;
    let (d, target) = targets(q, delta)?;
    let list: Vec<CircleArc> = arcs.arcs().iter().map(CircleArc::from).collect();
    let members: Vec<ArcApproximation> = if list.len() == 1 {
        vec![build(0, CircleArc::new(0.0, 1.0)?, &Kernel { coeff: vec![1.0], radius: 0.0, tail: 0.0 })]
    } else {
        let k = fit_kernel(d, target, max_degree)?;
        list.into_iter().enumerate().map(|(r, a)| build(r, a, &k)).collect()
    };
    let degree = members.iter().map(|m| m.degree).max().unwrap_or(0);
    let mut b0: f64 = 0.0;
    for xi in -(degree as i64)..=(degree as i64) {
        b0 = b0.max(members.iter().map(|m| m.coeff(xi).norm()).sum());
    }
    Ok(ArcFamily { degree, b0, members })
}
