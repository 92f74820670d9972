use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::num::{bigint_scaled_f64, pow2};
use crate::ostrowski::digits::encode_int;

/// `r(n) = Σ_{k < k_−} n_k q_k`, the part of the numeration below the window.
pub fn residue(n: &BigUint, cf: &ContinuedFraction, k_minus: usize) -> Result<BigUint> {
    let d = encode_int(n, cf)?;
    let mut r = BigUint::zero();
    for (k, v) in d.nonzero() {
        if k < k_minus {
            r += BigUint::from(v as u64) * cf.q(k);
        }
    }
    Ok(r)
}

/// Half-open arc `[start, start + length)` of the circle.
#[derive(Clone, Debug)]
pub struct Arc {
    /// fixed-point numerator of the left endpoint at the arcs' precision
    start: BigUint,
    length: BigUint,
    bits: u32,
    /// uncertainty of both endpoints, in units of the circle
    err: f64,
}

impl Arc {
    pub fn start_f64(&self) -> f64 {
        crate::num::biguint_scaled_f64(&self.start, self.bits as i64)
    }

    pub fn length_f64(&self) -> f64 {
        crate::num::biguint_scaled_f64(&self.length, self.bits as i64)
    }

    /// Endpoint uncertainty.
    pub fn err(&self) -> f64 {
        self.err
    }

    /// Whether the whole circle is covered.
    pub fn is_full(&self) -> bool {
        self.length == (BigUint::from(1u32) << self.bits as usize)
    }

    /// Offset of `x` from the left endpoint, in `[0, 1)` fixed-point units.
    fn offset(&self, x: &BigUint) -> BigUint {
        let m = BigUint::from(1u32) << self.bits as usize;
        (x + &m - &self.start) % &m
    }

    /// Membership of a fixed-point value (same precision).
    pub fn contains_fixed(&self, x: &BigUint) -> bool {
        self.is_full() || self.offset(x) < self.length
    }

    /// Membership of `t ∈ [0,1)`.
    pub fn contains_f64(&self, t: f64) -> bool {
        let p = CirclePoint::from_f64(t, self.bits).rescale(self.bits);
        self.contains_fixed(p.value())
    }

    /// Distance from `t` to the nearer endpoint.
    pub fn boundary_distance(&self, t: f64) -> f64 {
        if self.is_full() {
            return f64::INFINITY;
        }
        let s = self.start_f64();
        let e = (s + self.length_f64()).fract();
        let d = |a: f64| {
            let u = (t - a).rem_euclid(1.0);
            u.min(1.0 - u)
        };
        d(s).min(d(e))
    }
}

/// The arcs `D_r`, `0 ≤ r < q_{k_−}`: `nα mod 1 ∈ D_r` iff `r(n) = r`.
///
/// `D_r = rα + J_r` where `J_r` is the range of the tail `Σ_{k ≥ k_−} n_k θ_k`.
/// When `r < q_{k_−−1}` the digit at `k_− − 1` vanishes and the tail may start
/// with `n_{k_−} = a_{k_−}`, so `J_r` runs between `−θ_{k_−}` and
/// `−θ_{k_−−1}`. Otherwise `n_{k_−} < a_{k_−}` and `J_r` runs between `−θ_{k_−}`
/// and `−θ_{k_−−1} − θ_{k_−}`. Every endpoint is `jα` with `j < 0`, so no
/// orbit point `nα`, `n ≥ 0`, ever lands on one.
#[derive(Clone, Debug)]
pub struct ResidueArcs {
    k_minus: usize,
    arcs: Vec<Arc>,
    /// indices of `arcs` sorted by left endpoint
    order: Vec<usize>,
    bits: u32,
}

/// Largest `q_{k_−}` for which we materialize the arc list.
const MAX_ARCS: u64 = 1 << 24;

pub fn residue_arcs(cf: &ContinuedFraction, k_minus: usize, bits: u32) -> Result<ResidueArcs> {
    if k_minus == 0 || k_minus > cf.depth() {
        return Err(Error::OutOfRange {
            value: format!("k_minus {k_minus}"),
            depth: cf.depth(),
        });
    }
    let q = cf
        .q(k_minus)
        .to_u64()
        .filter(|&q| q <= MAX_ARCS)
        .ok_or_else(|| Error::TooLarge {
            estimate: cf.q(k_minus).to_f64().unwrap_or(f64::INFINITY),
            limit: MAX_ARCS as f64,
        })?;
    let one = BigUint::from(1u32) << bits as usize;
    if k_minus == 1 {
        let arc = Arc {
            start: BigUint::zero(),
            length: one,
            bits,
            err: 0.0,
        };
        return Ok(ResidueArcs {
            k_minus,
            arcs: vec![arc],
            order: vec![0],
            bits,
        });
    }
    let q_prev = cf.q(k_minus - 1).to_u64().unwrap();
    let t = |k: usize| -> (BigInt, f64) {
        let th = cf.theta(k).abs().rescale(bits);
        let w = bigint_scaled_f64(&(&th.hi - &th.lo), bits as i64);
        ((&th.lo + &th.hi) >> 1usize, w)
    };
    let (t_cur, e_cur) = t(k_minus);
    let (t_prev, e_prev) = t(k_minus - 1);
    let positive = ContinuedFraction::theta_sign(k_minus) > 0;
    let alpha = CirclePoint::alpha(cf, bits);
    let mut arcs = Vec::with_capacity(q as usize);
    let mut ra = CirclePoint::zero(bits);
    for r in 0..q {
        let restricted = r >= q_prev;
        // signed offset of the left endpoint, and the length
        let (off, len, e) = match (restricted, positive) {
            (false, true) => (-t_cur.clone(), &t_cur + &t_prev, e_cur + e_prev),
            (false, false) => (-t_prev.clone(), &t_cur + &t_prev, e_cur + e_prev),
            (true, true) => (-t_cur.clone(), t_prev.clone(), e_cur + e_prev),
            (true, false) => (&t_cur - &t_prev, t_prev.clone(), e_cur + e_prev),
        };
        let start = ra.add(&CirclePoint::from_fixed(&off, bits));
        arcs.push(Arc {
            start: start.value().clone(),
            length: len.to_biguint().expect("arc length positive"),
            bits,
            err: start.err() + e + pow2(-(bits as i64) + 1),
        });
        ra = ra.add(&alpha);
    }
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by(|&i, &j| arcs[i].start.cmp(&arcs[j].start));
    Ok(ResidueArcs {
        k_minus,
        arcs,
        order,
        bits,
    })
}

impl ResidueArcs {
    pub fn k_minus(&self) -> usize {
        self.k_minus
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arc(&self, r: usize) -> &Arc {
        &self.arcs[r]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Total length (should be 1 up to rounding).
    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.length_f64()).sum()
    }

    /// The residue `r` with `x ∈ D_r`; ambiguous when `x` lies within its
    /// own error plus the endpoint error of a boundary.
    pub fn locate(&self, x: &CirclePoint) -> Result<usize> {
        if self.arcs.len() == 1 {
            return Ok(0);
        }
        let xs = x.rescale(self.bits);
        let v = xs.value();
        // last arc whose start is ≤ x, cyclically
        let pos = self.order.partition_point(|&i| &self.arcs[i].start <= v);
        let idx = if pos == 0 {
            *self.order.last().unwrap()
        } else {
            self.order[pos - 1]
        };
        let arc = &self.arcs[idx];
        if !arc.contains_fixed(v) {
            return Err(Error::invalid(format!(
                "arcs do not cover {}: internal inconsistency",
                xs.to_f64()
            )));
        }
        let off = crate::num::biguint_scaled_f64(&arc.offset(v), self.bits as i64);
        let margin = off.min(arc.length_f64() - off);
        if margin <= arc.err + xs.err() {
            return Err(Error::BoundaryAmbiguous(format!(
                "point {} within {:.2e} of an arc endpoint",
                xs.to_f64(),
                margin
            )));
        }
        Ok(idx)
    }
}
