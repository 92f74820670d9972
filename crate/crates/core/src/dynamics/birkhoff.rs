use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::circle::{phase_to_f64, CirclePoint};
use crate::dynamics::skew::{FiberValue, SkewProduct};
use crate::error::{Error, Result};
use crate::num::pow2;

/// Default cap on `|n|` for the direct sum.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Largest phase-induced error we accept before asking for more bits.
const PHASE_BUDGET: f64 = 1e-9;

/// Compensated complex accumulator.
#[derive(Default, Clone, Copy)]
pub(crate) struct Kahan {
    sum: Complex64,
    c: Complex64,
}

impl Kahan {
    pub(crate) fn add(&mut self, v: Complex64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum
    }
}

/// `H_n(x) = Σ_{l<n} h(x + lα)` by direct summation (`H_n(x) = −H_{|n|}(x + nα)`
/// for `n < 0`), capped at [`DEFAULT_MAX_STEPS`].
pub fn birkhoff_exact(t: &SkewProduct, x: &CirclePoint, n: i64) -> Result<FiberValue> {
    birkhoff_exact_capped(t, x, n, DEFAULT_MAX_STEPS)
}

pub fn birkhoff_exact_capped(t: &SkewProduct, x: &CirclePoint, n: i64, max_steps: u64) -> Result<FiberValue> {
    if n.unsigned_abs() > max_steps {
        return Err(Error::TooLarge {
            estimate: n.unsigned_abs() as f64,
            limit: max_steps as f64,
        });
    }
    if n < 0 {
        let shifted = x.add(&CirclePoint::multiple_of_alpha(t.cf(), &BigInt::from(n), t.bits()));
        let v = birkhoff_exact_capped(t, &shifted, -n, max_steps)?;
        return Ok(FiberValue::new(-v.steps, v.mean, -v.osc, v.err));
    }
    let count = n as u64;
    let mut total = Kahan::default();
    let mut err = 0.0;
    let mut phase_err = 0.0;
    for md in t.modes() {
        let (xp, xe) = t.x_phase(&md.freq, x);
        let start = CirclePoint::from_fixed(&BigInt::from(xp), t.bits()).phase_u128();
        let step = CirclePoint::from_fixed(&BigInt::from(md.alpha_phase.clone()), t.bits()).phase_u128();
        let mut acc = Kahan::default();
        let mut ph = start;
        for _ in 0..count {
            acc.add(Complex64::from_polar(1.0, TAU * phase_to_f64(ph)));
            ph = ph.wrapping_add(step);
        }
        let c = md.coeff.norm();
        let nf = count as f64;
        // rounding of each unit vector and of the compensated sum
        err += c * nf * 6.0 * f64::EPSILON;
        // phase drift: start error plus accumulated step error
        let drift = xe + pow2(-128) + 0.5 * nf * (md.alpha_err + pow2(-128));
        phase_err += c * nf * TAU * drift;
        total.add(md.coeff * acc.value());
    }
    if phase_err > PHASE_BUDGET {
        return Err(Error::precision(format!(
            "direct Birkhoff sum phase error {phase_err:.2e} exceeds budget; raise precision"
        )));
    }
    Ok(FiberValue::new(BigInt::from(n), t.mean(), total.value().re, err + phase_err))
}

/// `H_n(x) = nĥ(0) + Σ_{m≠0} ĥ(m)(e(nmα) − 1)/(e(mα) − 1) e(mx)`.
pub fn birkhoff_closed(t: &SkewProduct, x: &CirclePoint, n: &BigInt) -> Result<FiberValue> {
    let mut acc = Kahan::default();
    let mut err = 0.0;
    for md in t.modes() {
        let (xp, xe) = t.x_phase(&md.freq, x);
        let (v, e) = t.ratio_term(md, n, &xp, xe);
        acc.add(v);
        err += e;
    }
    if err > PHASE_BUDGET.max(1e-6 * acc.value().norm()) && !n.is_zero() {
        return Err(Error::precision(format!(
            "closed-form error {err:.2e} too large; raise precision"
        )));
    }
    Ok(FiberValue::new(n.clone(), t.mean(), acc.value().re, err))
}

/// `H_n(x) mod 1` for `n = n_0, n_0 + 1, …`, by incremental accumulation
/// `H_{n+1}(x) = H_n(x) + h(x + nα)` re-anchored on the closed form every
/// `anchor` steps (anchors at multiples of `anchor`).
pub struct OrbitMod1<'a> {
    t: &'a SkewProduct,
    x: CirclePoint,
    anchor: u64,
    n: u64,
    y: f64,
    steps: Vec<(u128, Complex64)>,
    phases: Vec<u128>,
    mean_frac: f64,
    /// per-step rounding of the update
    round: f64,
    /// per-step growth of the phase drift, weighted by `2π|ĥ(m)|`
    drift_rate: f64,
    since_anchor: u64,
    anchor_err: f64,
    err: f64,
}

impl<'a> OrbitMod1<'a> {
    pub fn new(t: &'a SkewProduct, x: &CirclePoint, anchor: u64) -> Result<Self> {
        Self::starting_at(t, x, 0, anchor)
    }

    pub fn starting_at(t: &'a SkewProduct, x: &CirclePoint, n0: u64, anchor: u64) -> Result<Self> {
        let steps: Vec<(u128, Complex64)> = t
            .modes()
            .iter()
            .map(|md| {
                let s = CirclePoint::from_fixed(&BigInt::from(md.alpha_phase.clone()), t.bits()).phase_u128();
                (s, md.coeff)
            })
            .collect();
        let l1: f64 = t.modes().iter().map(|m| m.coeff.norm()).sum();
        let drift_rate = t
            .modes()
            .iter()
            .map(|m| TAU * m.coeff.norm() * (m.alpha_err + pow2(-127)))
            .sum();
        let mut o = OrbitMod1 {
            t,
            x: x.clone(),
            anchor: anchor.max(1),
            n: n0,
            y: 0.0,
            steps,
            phases: Vec::new(),
            mean_frac: t.mean().rem_euclid(1.0),
            round: 8.0 * f64::EPSILON * (1.0 + l1 + t.modes().len() as f64 * f64::EPSILON),
            drift_rate,
            since_anchor: 0,
            anchor_err: 0.0,
            err: 0.0,
        };
        o.reanchor()?;
        Ok(o)
    }

    fn reanchor(&mut self) -> Result<()> {
        let n = BigInt::from(self.n);
        let v = birkhoff_closed(self.t, &self.x, &n)?;
        self.y = v.mod1();
        let xn = self.x.add(&CirclePoint::multiple_of_alpha(self.t.cf(), &n, self.t.bits()));
        let t = self.t;
        let mut max_xe: f64 = 0.0;
        self.phases = t
            .modes()
            .iter()
            .map(|md| {
                let (p, e) = t.x_phase(&md.freq, &xn);
                max_xe = max_xe.max(e);
                CirclePoint::from_fixed(&BigInt::from(p), t.bits()).phase_u128()
            })
            .collect();
        let l1: f64 = t.modes().iter().map(|m| m.coeff.norm()).sum();
        self.anchor_err = v.err + f64::EPSILON + TAU * l1 * (max_xe + pow2(-127));
        self.since_anchor = 0;
        self.err = self.anchor_err;
        Ok(())
    }

    /// Index of the next value to be returned.
    pub fn position(&self) -> u64 {
        self.n
    }

    /// Error bound on the value most recently returned.
    pub fn err(&self) -> f64 {
        self.err
    }

    /// Returns `H_n(x) mod 1` and advances `n`.
    pub fn next_value(&mut self) -> Result<f64> {
        if self.n.is_multiple_of(self.anchor) && self.since_anchor > 0 {
            self.reanchor()?;
        }
        let out = self.y;
        let k = self.since_anchor as f64;
        self.err = self.anchor_err + k * self.round + 0.5 * k * k * self.drift_rate;
        let mut hv = self.mean_frac;
        for (ph, (step, c)) in self.phases.iter_mut().zip(&self.steps) {
            hv += (c * Complex64::from_polar(1.0, TAU * phase_to_f64(*ph))).re;
            *ph = ph.wrapping_add(*step);
        }
        self.y = (self.y + hv).rem_euclid(1.0);
        self.n += 1;
        self.since_anchor += 1;
        Ok(out)
    }
}

/// `H_n(x) mod 1` for `n = 0, 1, …, len − 1`; see [`OrbitMod1`].
pub fn birkhoff_orbit_mod1(t: &SkewProduct, x: &CirclePoint, len: usize, anchor: usize) -> Result<Vec<f64>> {
    let mut o = OrbitMod1::new(t, x, anchor as u64)?;
    (0..len).map(|_| o.next_value()).collect()
}

/// `g(x)` for the transfer function of a coboundary system, at a circle
/// point (phases taken exactly).
pub fn transfer_eval(t: &SkewProduct, x: &CirclePoint) -> Option<f64> {
    let spec = t.coboundary()?;
    let mut s = Kahan::default();
    for (m, c) in spec.g.oscillatory() {
        let (p, _) = t.x_phase(m, x);
        s.add(c * t.unit(&p));
    }
    Some(s.value().re + spec.g.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Preset;
    use crate::dynamics::{make_coboundary, resonant_set, synth_h, SynthOptions};
    use crate::dynamics::fourier::FourierModel;
    use crate::tau::Tau;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn tau() -> Tau {
        Tau::parse("2.5").unwrap()
    }

    fn golden_system() -> SkewProduct {
        let cf = Preset::Golden.build(40, 256).unwrap();
        let mut c = BTreeMap::new();
        for (m, z) in [(1i64, (0.1, 0.05)), (2, (0.02, -0.01)), (5, (0.004, 0.002))] {
            c.insert(BigInt::from(m), Complex64::new(z.0, z.1));
            c.insert(BigInt::from(-m), Complex64::new(z.0, -z.1));
        }
        c.insert(BigInt::zero(), Complex64::new(0.3, 0.0));
        let h = FourierModel::with_fitted_const(c, tau()).unwrap();
        SkewProduct::new(cf, h, 256).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let t = golden_system();
        let x = CirclePoint::from_f64(0.123, 256);
        let z = birkhoff_exact(&t, &x, 0).unwrap();
        assert_eq!(z.value(), 0.0);
        assert_eq!(birkhoff_closed(&t, &x, &BigInt::zero()).unwrap().value(), 0.0);
        let one = birkhoff_closed(&t, &x, &BigInt::from(1)).unwrap().value();
        let hx = t.h().eval_f64(0.123).re;
        assert!((one - hx).abs() < 1e-14);
    }

    #[test]
    fn constant_h() {
        let cf = Preset::Silver.build(20, 256).unwrap();
        let h = FourierModel::constant(0.25, tau()).unwrap();
        let t = SkewProduct::new(cf, h, 256).unwrap();
        let v = birkhoff_exact(&t, &CirclePoint::from_f64(0.7, 256), 37).unwrap();
        assert_eq!(v.value(), 9.25);
        assert_eq!(v.mod1(), 0.25);
    }

    #[test]
    fn closed_matches_direct() {
        let t = golden_system();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n: i64 = rng.random_range(-3000..3000);
            let x = CirclePoint::from_f64(rng.random::<f64>(), 256);
            let a = birkhoff_exact(&t, &x, n).unwrap();
            let b = birkhoff_closed(&t, &x, &BigInt::from(n)).unwrap();
            assert_eq!(a.steps, b.steps);
            assert!((a.osc - b.osc).abs() <= a.err + b.err + 1e-13, "n={n}: {} vs {}", a.osc, b.osc);
        }
    }

    #[test]
    fn coboundary_telescopes() {
        let cf = Preset::Liouville(1).build(10, 512).unwrap();
        let mut g = BTreeMap::new();
        g.insert(BigInt::from(1), Complex64::new(0.5, 0.0));
        g.insert(BigInt::from(-1), Complex64::new(0.5, 0.0)); // cos(2πx)
        let g = FourierModel::with_fitted_const(g, tau()).unwrap();
        let t = make_coboundary(&g, 0.0, cf, 512).unwrap();
        let x = CirclePoint::from_f64(0.3, 512);
        for n in [1i64, 7, 100, -55, 2049] {
            let h = birkhoff_exact(&t, &x, n).unwrap().value();
            let xn = x.add(&CirclePoint::multiple_of_alpha(t.cf(), &BigInt::from(n), 512));
            let tele = transfer_eval(&t, &xn).unwrap() - transfer_eval(&t, &x).unwrap();
            assert!((h - tele).abs() < 1e-11, "n={n}: {h} vs {tele}");
            let xf = 0.3f64;
            let direct = (TAU * (xf + n as f64 * t.cf().alpha_f64())).cos() - (TAU * xf).cos();
            assert!((h - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_accumulation_matches_closed_form() {
        let cf = Preset::Liouville(1).build(12, 512).unwrap();
        let m = resonant_set(&cf, tau(), 8).unwrap();
        let h = synth_h(&m, tau(), 3, 0.3, SynthOptions::default()).unwrap();
        let t = SkewProduct::new(cf, h, 512).unwrap();
        let x = CirclePoint::from_f64(0.61, 512);
        let orbit = birkhoff_orbit_mod1(&t, &x, 5000, 1024).unwrap();
        for n in [0usize, 1, 999, 1023, 1024, 4999] {
            let c = birkhoff_closed(&t, &x, &BigInt::from(n)).unwrap().mod1();
            let d = (orbit[n] - c).rem_euclid(1.0);
            assert!(d.min(1.0 - d) < 1e-10, "n={n}");
        }
        let mut o = OrbitMod1::starting_at(&t, &x, 3000, 1024).unwrap();
        for n in 3000..3100u64 {
            let v = o.next_value().unwrap();
            assert!(o.err() < 1e-9);
            let d = (v - orbit[n as usize]).rem_euclid(1.0);
            assert!(d.min(1.0 - d) < 1e-10, "n={n}");
        }
    }
}
