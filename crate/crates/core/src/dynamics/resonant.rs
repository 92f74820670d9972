use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::dynamics::fourier::{abs_pow_neg, FourierModel};
use crate::dynamics::skew::{centered, e, e_minus_one, lattice_scale, SkewProduct};
use crate::error::{Error, Result};
use crate::num::{log2_biguint, pow2};
use crate::tau::{is_resonant, Tau};

/// One resonant scale: `q_{k+1} > q_k^{τ/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonantEntry {
    pub k: usize,
    pub q: BigUint,
    pub a: BigUint,
}

/// The set `M = ∪_{resonant k} {±m_k q_k : 1 ≤ m_k ≤ a_k}`, restricted to
/// `k ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantSet {
    tau: Tau,
    depth: usize,
    entries: Vec<ResonantEntry>,
}

pub fn resonant_set(cf: &ContinuedFraction, tau: Tau, depth: usize) -> Result<ResonantSet> {
    let tau = tau.require_above_two()?;
    if depth > cf.depth() {
        return Err(Error::OutOfRange {
            value: format!("resonance depth {depth}"),
            depth: cf.depth(),
        });
    }
    let entries = (1..=depth)
        .filter(|&k| is_resonant(cf, k, tau))
        .map(|k| ResonantEntry {
            k,
            q: cf.q(k).clone(),
            a: cf.a(k).clone(),
        })
        .collect();
    Ok(ResonantSet { tau, depth, entries })
}

impl ResonantSet {
    pub fn tau(&self) -> Tau {
        self.tau
    }

    /// Scales examined.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn entries(&self) -> &[ResonantEntry] {
        &self.entries
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.k).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_scale(&self, k: usize) -> bool {
        self.entries.iter().any(|e| e.k == k)
    }

    /// Membership of a frequency in `M` (zero is not in `M`).
    pub fn contains(&self, m: &BigInt) -> bool {
        let abs = m.magnitude();
        !abs.is_zero()
            && self.entries.iter().any(|e| {
                let (d, r) = num_integer::Integer::div_rem(abs, &e.q);
                r.is_zero() && !d.is_zero() && d <= e.a
            })
    }

    /// `|M|` counting both signs (before removing coincidences).
    pub fn frequency_count(&self) -> BigUint {
        self.entries.iter().map(|e| &e.a * 2u32).sum()
    }

    /// Positive frequencies `m_k q_k` with `m_k ≤ min(a_k, max_multiplier)`.
    pub fn positive_frequencies(&self, max_multiplier: u64) -> Vec<(usize, BigUint)> {
        let mut out = Vec::new();
        for e in &self.entries {
            let top = e.a.to_u64().unwrap_or(u64::MAX).min(max_multiplier);
            for mk in 1..=top {
                out.push((e.k, &e.q * mk));
            }
        }
        out
    }
}

/// Knobs of [`synth_h`].
#[derive(Clone, Copy, Debug)]
pub struct SynthOptions {
    /// multipliers `m_k` used per resonant scale (capped at `a_k`)
    pub max_multiplier: u64,
    /// the mean `ĥ(0)`
    pub h0: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            max_multiplier: 3,
            h0: 0.0,
        }
    }
}

/// Real `h` supported on `M ∪ {0}` with `|ĥ(±m)| = A·m^{−τ}` and seeded
/// random phases.
pub fn synth_h(m: &ResonantSet, tau: Tau, seed: u64, amplitude: f64, opts: SynthOptions) -> Result<FourierModel> {
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::invalid("amplitude must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeff = BTreeMap::new();
    if opts.h0 != 0.0 {
        coeff.insert(BigInt::zero(), Complex64::new(opts.h0, 0.0));
    }
    for (_, f) in m.positive_frequencies(opts.max_multiplier) {
        let phase: f64 = rng.random();
        let f = BigInt::from(f);
        if coeff.contains_key(&f) {
            continue;
        }
        let z = e(phase) * (amplitude * abs_pow_neg(&f, tau.value()));
        coeff.insert(-&f, z.conj());
        coeff.insert(f, z);
    }
    FourierModel::new(coeff, tau, amplitude)
}

/// The pair `(g, c)` behind a coboundary system `h = g(x + α) − g(x) + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoboundarySpec {
    pub g: FourierModel,
    pub c: f64,
}

/// `e(mα) − 1` at the working precision.
fn small_divisor(cf: &ContinuedFraction, m: &BigInt, bits: u32) -> Result<Complex64> {
    let p = CirclePoint::multiple_of_alpha(cf, m, bits);
    let a = centered(p.value(), bits);
    if a.abs() <= 4.0 * (p.err() + pow2(-(bits as i64))) {
        return Err(Error::precision(format!(
            "the enclosure of ‖{m}·α‖ contains 0 at {bits} bits"
        )));
    }
    Ok(e_minus_one(a))
}

/// The system with `ĥ(m) = ĝ(m)(e(mα) − 1)`, `ĥ(0) = c`.
pub fn make_coboundary(g: &FourierModel, c: f64, cf: ContinuedFraction, bits: u32) -> Result<SkewProduct> {
    if !g.is_real() {
        return Err(Error::invalid("g must be real-valued"));
    }
    let mut coeff = BTreeMap::new();
    if c != 0.0 {
        coeff.insert(BigInt::zero(), Complex64::new(c, 0.0));
    }
    for (m, z) in g.oscillatory() {
        if m.sign() == num_bigint::Sign::Minus {
            continue;
        }
        let v = z * small_divisor(&cf, m, bits)?;
        // keep the pair exactly conjugate
        coeff.insert(-m, v.conj());
        coeff.insert(m.clone(), v);
    }
    let h = FourierModel::with_fitted_const(coeff, g.tau())?;
    let spec = CoboundarySpec { g: g.clone(), c };
    Ok(SkewProduct::new(cf, h, bits)?.with_coboundary(spec))
}

/// `ĥ(m)/(e(mα) − 1)` for every `m ≠ 0` in the support: the transfer
/// function of a coboundary, recovered from `h`.
pub fn solve_coboundary(h: &FourierModel, cf: &ContinuedFraction, bits: u32) -> Result<FourierModel> {
    let mut coeff = BTreeMap::new();
    for (m, z) in h.oscillatory() {
        coeff.insert(m.clone(), z / small_divisor(cf, m, bits)?);
    }
    FourierModel::with_fitted_const(coeff, h.tau())
}

/// Output of [`psi_conjugator`].
#[derive(Clone, Debug)]
pub struct Conjugator {
    pub psi: FourierModel,
    /// certified bound on the sup-norm of the discarded tail
    pub tail_bound: f64,
    /// frequencies `|m| ≥ q_depth` were discarded
    pub depth: usize,
    pub resonant: ResonantSet,
}

/// `ζ(s)` for `s > 1`: partial sum plus an integral tail with Euler-Maclaurin
/// correction.
fn zeta(s: f64) -> f64 {
    let n = 1000;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-s);
    }
    let nf = n as f64;
    sum + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s)
}

/// Per-scale bound on `Σ |ĥ(m)/(e(mα) − 1)|` over `m ∉ M` with
/// `q_k ≤ |m| < q_{k+1}`, using `|e(t) − 1| ≥ 4‖t‖`:
/// non-multiples of `q_k` contribute at most `C Σ_{m ≥ q_k} m^{1−τ}`, the
/// multiples `m_k q_k` of a non-resonant scale at most
/// `C ζ(τ+1) q_k^{−τ} q_{k+1}`.
fn scale_bound(c: f64, tau: f64, log_qk: f64, log_qk1: Option<f64>) -> f64 {
    let q_pow = |ex: f64| (ex * log_qk).exp2();
    let non_multiple = c * (q_pow(1.0 - tau) + q_pow(2.0 - tau) / (tau - 2.0));
    let lattice_log = match log_qk1 {
        // q_{k+1} ≤ q_k^{τ/2} off M; when q_{k+1} is known use it
        Some(l1) => (l1 - tau * log_qk).min(-0.5 * tau * log_qk),
        None => -0.5 * tau * log_qk,
    };
    non_multiple + c * zeta(tau + 1.0) * lattice_log.exp2()
}

/// `ψ = Σ_{m ∉ M, m ≠ 0} ĥ(m)/(e(mα) − 1) e(mx)`, truncated at the first
/// depth whose certified tail is below `ε/2` (so the coefficient residual of
/// `h − (ψ(x+α) − ψ(x))` off `M ∪ {0}` stays below `ε`).
pub fn psi_conjugator(h: &FourierModel, cf: &ContinuedFraction, eps: f64, bits: u32) -> Result<Conjugator> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let k_top = cf.depth();
    if h.max_frequency().magnitude() >= cf.q(k_top + 1) {
        return Err(Error::invalid("support of ĥ exceeds the certified lattice"));
    }
    let tau = h.tau().value();
    let c = h.decay_const();
    let resonant = resonant_set(cf, h.tau(), k_top)?;
    // bounds per scale j = 2..=K, then the tail beyond K
    let logq: Vec<f64> = (0..=k_top + 1)
        .map(|k| if k == 0 { 0.0 } else { log2_biguint(cf.q(k)) })
        .collect();
    let mut per_scale = vec![0.0; k_top + 2];
    for j in 2..=k_top {
        per_scale[j] = if resonant.contains_scale(j) {
            // multiples of q_j lie in M; only the non-multiples remain
            c * ((1.0 - tau) * logq[j]).exp2() + c * ((2.0 - tau) * logq[j]).exp2() / (tau - 2.0)
        } else {
            scale_bound(c, tau, logq[j], Some(logq[j + 1]))
        };
    }
    // q_{j+2} ≥ 2 q_j beyond the known expansion
    let r = (tau - 2.0).min(0.5 * tau);
    let beyond = 2.0 * scale_bound(c, tau, logq[k_top + 1], None) / (1.0 - (-r).exp2());
    let mut tail = beyond;
    let mut depth = k_top + 1;
    // walk down while the tail stays small enough
    while depth > 2 && tail + per_scale[depth - 1] < 0.5 * eps {
        depth -= 1;
        tail += per_scale[depth];
    }
    if tail >= 0.5 * eps {
        return Err(Error::precision(format!(
            "tail bound {tail:.2e} exceeds ε/2 even at depth {}; extend the expansion",
            k_top + 1
        )));
    }
    let cut = cf.q(depth).clone();
    let mut coeff = BTreeMap::new();
    for (m, z) in h.oscillatory() {
        if resonant.contains(m) || m.magnitude() >= &cut {
            continue;
        }
        coeff.insert(m.clone(), z / small_divisor(cf, m, bits)?);
    }
    let psi = FourierModel::with_fitted_const(coeff, h.tau())?;
    Ok(Conjugator {
        psi,
        tail_bound: tail,
        depth,
        resonant,
    })
}

impl Conjugator {
    /// `Σ_{m ∉ M ∪ {0}} |ĥ(m) − ψ̂(m)(e(mα) − 1)|`, a sup-norm bound on the
    /// part of `h − (ψ(x+α) − ψ(x))` outside `M ∪ {0}`.
    pub fn residual(&self, h: &FourierModel, cf: &ContinuedFraction, bits: u32) -> Result<f64> {
        let mut keys: Vec<&BigInt> = h.coeffs().keys().chain(self.psi.coeffs().keys()).collect();
        keys.sort();
        keys.dedup();
        let mut s = 0.0;
        for m in keys {
            if m.is_zero() || self.resonant.contains(m) {
                continue;
            }
            let d = h.coeff(m) - self.psi.coeff(m) * small_divisor(cf, m, bits)?;
            s += d.norm();
        }
        Ok(s)
    }

    /// The part of `h` that survives conjugation: `ĥ₁ = ĥ` on `M ∪ {0}`.
    pub fn reduced_h(&self, h: &FourierModel) -> Result<FourierModel> {
        let coeff = h
            .coeffs()
            .iter()
            .filter(|(m, _)| m.is_zero() || self.resonant.contains(m))
            .map(|(m, z)| (m.clone(), *z))
            .collect();
        FourierModel::new(coeff, h.tau(), h.decay_const())
    }
}

/// Frequencies of `h` that sit on a lattice scale, grouped by scale.
pub fn frequencies_by_scale(h: &FourierModel, cf: &ContinuedFraction) -> BTreeMap<usize, Vec<BigInt>> {
    let mut out: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
    for (m, _) in h.oscillatory() {
        if let Some((k, _)) = lattice_scale(cf, m) {
            out.entry(k).or_default().push(m.clone());
        }
    }
    out
}

/// `q_k^{−(τ−1)}` as a float.
pub(crate) fn q_pow(cf: &ContinuedFraction, k: usize, ex: f64) -> f64 {
    (ex * log2_biguint(cf.q(k))).exp2()
}
