use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::circle::{phase_to_f64, CirclePoint};
use crate::dynamics::birkhoff::Kahan;
use crate::dynamics::{OrbitMod1, SkewProduct};
use crate::error::{Error, Result};
use crate::moebius::sieve::Weights;
use crate::moebius::{par_blocks, BLOCK};
use crate::num::pow2;

/// Re-anchoring period of the incremental orbit.
pub const ANCHOR: u64 = BLOCK as u64;

/// Cap on `N · q_{k_++1}` for the window statistic.
pub const MAX_WINDOW_WORK: f64 = 2e10;

/// Largest error we tolerate on any single phase `e(ζ₁x_n + ζ₂y_n)`.
const PHASE_BUDGET: f64 = 1e-6;

/// `f = e_{(ζ₁, ζ₂)}(x, y) = e(ζ₁x + ζ₂y)`, with `ζ₂ ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TestFunction {
    pub zeta1: i64,
    pub zeta2: u64,
}

impl TestFunction {
    pub fn new(zeta1: i64, zeta2: u64) -> Self {
        TestFunction { zeta1, zeta2 }
    }
}

fn check_limit<W: Weights>(w: &W, n: usize) -> Result<()> {
    if n == 0 || n > w.limit() {
        return Err(Error::invalid(format!(
            "N = {n} must lie in 1..={} (table limit)",
            w.limit()
        )));
    }
    Ok(())
}

/// `(ζ x) mod 1` and `(ζ α) mod 1` as wrapping phases, with their errors.
fn x_alpha_phases(t: &SkewProduct, x: &CirclePoint, n0: u64, zeta: i64) -> (u128, f64, u128, f64) {
    let bits = t.bits();
    let a = CirclePoint::alpha(t.cf(), bits);
    let xn = x.rescale(bits).add(&a.mul_int(&BigInt::from(n0)));
    let z = zeta.unsigned_abs() as f64;
    let xp = xn.mul_i64(zeta);
    let ap = a.mul_i64(zeta);
    (
        xp.phase_u128(),
        z * (xn.err() + pow2(-(bits as i64))) + pow2(-127),
        ap.phase_u128(),
        z * (a.err() + pow2(-(bits as i64))) + pow2(-127),
    )
}

/// `|𝔼_{1 ≤ n ≤ N} w(n) e(ζ₁x_n + ζ₂y_n)|` with `(x_n, y_n) = T^n(x, y)`.
///
/// The fiber coordinate is accumulated incrementally and re-anchored on the
/// closed form every [`ANCHOR`] steps; the run fails with a precision error
/// if the tracked phase error exceeds `10⁻⁶`.
pub fn disjointness_stat<W: Weights>(
    t: &SkewProduct,
    x: &CirclePoint,
    y: f64,
    f: TestFunction,
    w: &W,
    n: usize,
) -> Result<f64> {
    check_limit(w, n)?;
    let z2 = f.zeta2 as f64;
    let parts = par_blocks(n, |lo, hi| -> Result<(Complex64, f64)> {
        let (mut xp, xe, step, se) = x_alpha_phases(t, x, lo as u64 + 1, f.zeta1);
        let mut orbit = if f.zeta2 != 0 {
            Some(OrbitMod1::starting_at(t, x, lo as u64 + 1, ANCHOR)?)
        } else {
            None
        };
        let mut s = Kahan::default();
        let mut worst: f64 = 0.0;
        for (i, m) in (lo + 1..=hi).enumerate() {
            let mut ph = phase_to_f64(xp);
            let mut e = xe + i as f64 * se;
            if let Some(o) = orbit.as_mut() {
                let h = o.next_value()?;
                ph += z2 * (y + h);
                e += z2 * (o.err() + f64::EPSILON);
            }
            worst = worst.max(e);
            let v = w.weight(m);
            if v != 0.0 {
                s.add(v * Complex64::from_polar(1.0, TAU * ph.rem_euclid(1.0)));
            }
            xp = xp.wrapping_add(step);
        }
        Ok((s.value(), worst))
    });
    let mut s = Kahan::default();
    let mut worst: f64 = 0.0;
    for p in parts {
        let (v, e) = p?;
        s.add(v);
        worst = worst.max(e);
    }
    if worst > PHASE_BUDGET {
        return Err(Error::precision(format!(
            "orbit phase error {worst:.2e} exceeds {PHASE_BUDGET:.0e}; raise precision"
        )));
    }
    Ok(s.value().norm() / n as f64)
}

/// The window statistic and the two terms that separate it from
/// [`disjointness_stat`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowDecomp {
    /// `𝔼_L |𝔼_{1 ≤ n < Q} w(L+n) e(ζ₁nα + ζ₂H_{r(n)}(x + Lα))|`, `Q = q_{k_++1}`
    pub stat: f64,
    /// `𝔼_L 𝔼_n |w(L+n)| |e(ζ₂H_n(x + Lα)) − e(ζ₂H_{r(n)}(x + Lα))|`, the
    /// measured cost of freezing the digits at and above `k_−`
    pub defect: f64,
    /// `2Q/N`, the boundary effect of splitting `1..=N` into windows
    pub edge: f64,
    pub q: u64,
}

impl WindowDecomp {
    /// `stat + defect + edge`, an upper bound for the full statistic.
    pub fn bound(&self) -> f64 {
        self.stat + self.defect + self.edge
    }
}

/// `r(s)` for `0 ≤ s < q_{k_++1}`: the greedy numeration with the digits at
/// scales `k_−..=k_+` removed.
pub(crate) fn residue_table(t: &SkewProduct, k_minus: usize, k_plus: usize, q: u64) -> Result<Vec<u32>> {
    let cf = t.cf();
    let qs: Vec<u64> = (k_minus..=k_plus)
        .rev()
        .map(|k| cf.q(k).to_u64().ok_or_else(|| Error::invalid("q_k exceeds 64 bits")))
        .collect::<Result<_>>()?;
    Ok((0..q)
        .map(|s| {
            let mut rem = s;
            for &qk in &qs {
                rem %= qk;
            }
            rem as u32
        })
        .collect())
}

pub fn window_decomp_stat<W: Weights>(
    t: &SkewProduct,
    x: &CirclePoint,
    f: TestFunction,
    w: &W,
    n: usize,
    k_minus: usize,
    k_plus: usize,
) -> Result<f64> {
    Ok(window_decomp_report(t, x, f, w, n, k_minus, k_plus)?.stat)
}

/// Computes [`WindowDecomp`]; `y` drops out of the absolute values, so it is
/// not an input.
pub fn window_decomp_report<W: Weights>(
    t: &SkewProduct,
    x: &CirclePoint,
    f: TestFunction,
    w: &W,
    n: usize,
    k_minus: usize,
    k_plus: usize,
) -> Result<WindowDecomp> {
    check_limit(w, n)?;
    let cf = t.cf();
    if k_minus == 0 || k_minus > k_plus || k_plus + 1 > cf.depth() {
        return Err(Error::OutOfRange {
            value: format!("window [{k_minus}, {k_plus}]"),
            depth: cf.depth(),
        });
    }
    let q = cf
        .q(k_plus + 1)
        .to_u64()
        .filter(|&q| q as usize <= n)
        .ok_or_else(|| Error::invalid(format!("q_{{k_+ + 1}} = {} exceeds N = {n}", cf.q(k_plus + 1))))?;
    if q < 2 {
        return Err(Error::invalid("window must contain at least one step"));
    }
    let work = n as f64 * q as f64;
    if work > MAX_WINDOW_WORK {
        return Err(Error::TooLarge {
            estimate: work,
            limit: MAX_WINDOW_WORK,
        });
    }
    let r = residue_table(t, k_minus, k_plus, q)?;
    let z2 = f.zeta2 as f64;
    // G[m] = e(ζ₂H_m(x)) for m < N + Q; H_r(x + Lα) = H_{L+r}(x) − H_L(x) and
    // the common factor e(−ζ₂H_L(x)) drops out
    let len = n + q as usize;
    let g_parts = par_blocks(len, |lo, hi| -> Result<(Vec<Complex64>, f64)> {
        if f.zeta2 == 0 {
            return Ok((vec![Complex64::new(1.0, 0.0); hi - lo], 0.0));
        }
        let mut o = OrbitMod1::starting_at(t, x, lo as u64, ANCHOR)?;
        let mut v = Vec::with_capacity(hi - lo);
        let mut worst: f64 = 0.0;
        for _ in lo..hi {
            let h = o.next_value()?;
            worst = worst.max(z2 * (o.err() + f64::EPSILON));
            v.push(Complex64::from_polar(1.0, TAU * (z2 * h).rem_euclid(1.0)));
        }
        Ok((v, worst))
    });
    let mut g = Vec::with_capacity(len);
    let mut worst: f64 = 0.0;
    for p in g_parts {
        let (v, e) = p?;
        g.extend(v);
        worst = worst.max(e);
    }
    let (_, _, step, se) = x_alpha_phases(t, x, 0, f.zeta1);
    worst = worst.max(q as f64 * se);
    if worst > PHASE_BUDGET {
        return Err(Error::precision(format!(
            "orbit phase error {worst:.2e} exceeds {PHASE_BUDGET:.0e}; raise precision"
        )));
    }
    let e1: Vec<Complex64> = (0..q)
        .map(|s| Complex64::from_polar(1.0, TAU * phase_to_f64(step.wrapping_mul(s as u128))))
        .collect();
    let parts = par_blocks(n, |lo, hi| {
        let mut stat = 0.0;
        let mut defect = 0.0;
        for l in lo..hi {
            let mut inner = Complex64::new(0.0, 0.0);
            let mut d = 0.0;
            for s in 1..q as usize {
                let v = w.weight(l + s);
                if v == 0.0 {
                    continue;
                }
                let gr = g[l + r[s] as usize];
                inner += v * e1[s] * gr;
                if f.zeta2 != 0 {
                    d += v.abs() * (g[l + s] - gr).norm();
                }
            }
            stat += inner.norm();
            defect += d;
        }
        (stat, defect)
    });
    let denom = n as f64 * (q - 1) as f64;
    let (stat, defect) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(WindowDecomp {
        stat: stat / denom,
        defect: defect / denom,
        edge: 2.0 * q as f64 / n as f64,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Preset;
    use crate::dynamics::FourierModel;
    use crate::dynamics::make_coboundary;
    use crate::moebius::{davenport_avg_phase, short_interval_corr_phase, sieve_mu, Ones};
    use crate::ostrowski::residue;
    use crate::tau::Tau;
    use num_bigint::BigUint;
    use std::collections::BTreeMap;

    fn tau() -> Tau {
        Tau::parse("2.5").unwrap()
    }

    fn zero_system() -> SkewProduct {
        let cf = Preset::Liouville(1).build(10, 256).unwrap();
        SkewProduct::new(cf, FourierModel::zero(tau()).unwrap(), 256).unwrap()
    }

    fn cob_system() -> SkewProduct {
        let cf = Preset::Liouville(1).build(10, 512).unwrap();
        let mut g = BTreeMap::new();
        for (m, z) in [(1i64, Complex64::new(0.05, 0.02)), (2, Complex64::new(-0.03, 0.01))] {
            g.insert(BigInt::from(m), z);
            g.insert(BigInt::from(-m), z.conj());
        }
        let g = FourierModel::with_fitted_const(g, tau()).unwrap();
        make_coboundary(&g, 0.0, cf, 512).unwrap()
    }

    #[test]
    fn trivial_test_function_gives_mertens() {
        let mu = sieve_mu(5000).unwrap();
        let t = cob_system();
        let x = CirclePoint::from_f64(0.2, 512);
        let v = disjointness_stat(&t, &x, 0.4, TestFunction::new(0, 0), &mu, 5000).unwrap();
        assert!((v - mu.mertens(5000).abs() as f64 / 5000.0).abs() < 1e-15);
    }

    #[test]
    fn kronecker_case_is_davenport() {
        let mu = sieve_mu(150_000).unwrap();
        let t = zero_system();
        let x = CirclePoint::from_f64(0.37, 256);
        let n = 150_000;
        let v = disjointness_stat(&t, &x, 0.1, TestFunction::new(1, 3), &mu, n).unwrap();
        let a = CirclePoint::alpha(t.cf(), 256).phase_u64();
        let d = davenport_avg_phase(&mu, n, a).unwrap();
        assert!((v - d).abs() < 1e-12, "{v} vs {d}");
    }

    #[test]
    fn residue_table_matches_numeration() {
        let t = cob_system();
        let q = t.cf().q(6).to_u64().unwrap();
        let tab = residue_table(&t, 3, 5, q).unwrap();
        for s in 0..q {
            let r = residue(&BigUint::from(s), t.cf(), 3).unwrap();
            assert_eq!(BigUint::from(tab[s as usize]), r, "s={s}");
        }
    }

    #[test]
    fn window_collapses_for_zero_h() {
        let mu = sieve_mu(6000).unwrap();
        let t = zero_system();
        let x = CirclePoint::from_f64(0.9, 256);
        let f = TestFunction::new(2, 5);
        let n = 3000;
        let rep = window_decomp_report(&t, &x, f, &mu, n, 3, 3).unwrap();
        let a2 = CirclePoint::alpha(t.cf(), 256).mul_i64(2).phase_u64();
        let want = short_interval_corr_phase(&mu, n, rep.q as usize - 1, a2).unwrap();
        assert!((rep.stat - want).abs() < 1e-12, "{} vs {want}", rep.stat);
        assert_eq!(rep.defect, 0.0);
        // k_− = 1: r(n) = 0 for every n
        let one = window_decomp_report(&t, &x, f, &mu, n, 1, 3).unwrap();
        assert!((one.stat - want).abs() < 1e-12);
    }

    #[test]
    fn window_bound_dominates() {
        let mu = sieve_mu(40_000).unwrap();
        let t = cob_system();
        let f = TestFunction::new(1, 1);
        for (i, xf) in [0.11, 0.52, 0.83].into_iter().enumerate() {
            let x = CirclePoint::from_f64(xf, 512);
            let y = 0.3 * i as f64;
            let full = disjointness_stat(&t, &x, y, f, &mu, 30_000).unwrap();
            let rep = window_decomp_report(&t, &x, f, &mu, 30_000, 3, 3).unwrap();
            assert!(full <= rep.bound() + 1e-12, "{full} > {:?}", rep);
        }
    }

    #[test]
    fn ones_control_does_not_cancel() {
        let t = cob_system();
        let x = CirclePoint::from_f64(0.25, 512);
        let v = disjointness_stat(&t, &x, 0.0, TestFunction::new(0, 1), &Ones(20_000), 20_000).unwrap();
        assert!(v > 0.8);
    }
}
