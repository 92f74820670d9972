use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::cf::{cf_from_quotients, cf_from_real, ContinuedFraction, DyadicInterval, PartialQuotients, Preset};
use crate::dynamics::{make_coboundary, resonant_set, synth_h, FourierModel, SkewProduct, SynthOptions};
use crate::error::{Error, Result};
use crate::tau::Tau;

/// Every key the config format accepts, with its default.
pub const KEYS: &[(&str, &str)] = &[
    ("alpha", "golden"),
    ("depth", "30"),
    ("tau", "2.5"),
    ("precision", "256"),
    ("seed", "0"),
    ("n", "100000"),
    ("n_list", "10000,100000"),
    ("r_list", "100,1000,10000"),
    ("beta", "golden,1/3+0.000001,0.123456"),
    ("k_minus", "2"),
    ("k_plus", "6"),
    ("zeta1", "1"),
    ("zeta2", "1"),
    ("h", "synthetic"),
    ("h_amplitude", "0.3"),
    ("h_depth", "8"),
    ("h_mean", "0"),
    ("g", "1:0.05:0.02,2:-0.03:0.01"),
    ("c", "0"),
    ("samples", "20"),
    ("delta", "0.1"),
    ("indices", ""),
    ("out", "out"),
];

/// How `α` is given.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSpec {
    Preset(Preset),
    Quotients(PartialQuotients),
    /// decimal expansion of `α ∈ (0, 1)`
    Decimal(String),
}

impl AlphaSpec {
    pub fn parse(s: &str) -> Result<AlphaSpec> {
        let s = s.trim();
        if let Some(list) = s.strip_prefix("quotients:") {
            let parts: Vec<&str> = list.split(',').map(str::trim).collect();
            return Ok(AlphaSpec::Quotients(PartialQuotients::from_decimal_strs(&parts)?));
        }
        if let Some(d) = s.strip_prefix("decimal:") {
            return Ok(AlphaSpec::Decimal(d.trim().to_string()));
        }
        if s.starts_with("0.") {
            return Ok(AlphaSpec::Decimal(s.to_string()));
        }
        Preset::parse(s).map(AlphaSpec::Preset)
    }
}

/// The `h` used to build the skew product.
#[derive(Clone, Debug, PartialEq)]
pub enum HSpec {
    Zero,
    /// random phases on the resonant lattice, `|ĥ(m)| = C|m|^{−τ}`
    Synthetic,
    /// `ĥ(±q_j) = C q_j^{−τ} e(±φ_j)` on every scale `j ≤ h_depth`, resonant or not
    Lattice,
    /// `h = g(x + α) − g(x) + c`
    Coboundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaSpec {
    pub text: String,
    pub value: f64,
    /// `(p, q)` when the spec is a single fraction
    pub rational: Option<(i64, u64)>,
}

impl BetaSpec {
    /// A sum of terms, each `golden`, `p/q` or a decimal.
    pub fn parse(s: &str) -> Result<BetaSpec> {
        let text = s.trim().to_string();
        let terms: Vec<&str> = text.split('+').map(str::trim).collect();
        let mut value = 0.0;
        let mut rational = None;
        for t in &terms {
            if *t == "golden" {
                value += (5f64.sqrt() - 1.0) / 2.0;
            } else if let Some((p, q)) = t.split_once('/') {
                let p: i64 = p.trim().parse().map_err(|_| Error::invalid(format!("bad numerator in β = {text:?}")))?;
                let q: u64 = q.trim().parse().map_err(|_| Error::invalid(format!("bad denominator in β = {text:?}")))?;
                if q == 0 {
                    return Err(Error::invalid("β denominator is zero"));
                }
                value += p as f64 / q as f64;
                if terms.len() == 1 {
                    rational = Some((p, q));
                }
            } else {
                value += t
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("cannot read β term {t:?}")))?;
            }
        }
        Ok(BetaSpec { text, value, rational })
    }

    /// CSV columns `beta_num, beta_den_or_float`.
    pub fn columns(&self) -> (String, String) {
        match self.rational {
            Some((p, q)) => (p.to_string(), q.to_string()),
            None => (format!("{}", self.value), "float".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub alpha: AlphaSpec,
    pub depth: usize,
    pub tau: Tau,
    pub precision: u32,
    pub seed: u64,
    pub n: usize,
    pub n_list: Vec<usize>,
    pub r_list: Vec<usize>,
    pub beta: Vec<BetaSpec>,
    pub k_minus: usize,
    pub k_plus: usize,
    pub zeta1: i64,
    pub zeta2: u64,
    pub h: HSpec,
    pub h_amplitude: f64,
    pub h_depth: usize,
    pub h_mean: f64,
    pub g: Vec<(i64, Complex64)>,
    pub c: f64,
    pub samples: usize,
    pub delta: f64,
    pub indices: Vec<usize>,
    pub out: String,
    /// the effective key/value pairs, for hashing and reports
    raw: BTreeMap<String, String>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("config key {key}: cannot read {v:?}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

/// Decimal strings with an optional scientific suffix such as `1e6`.
fn parse_count(key: &str, v: &str) -> Result<usize> {
    let v = v.trim();
    if let Ok(n) = v.parse::<usize>() {
        return Ok(n);
    }
    let f: f64 = parse_num(key, v)?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1e15 {
        Ok(f as usize)
    } else {
        Err(Error::invalid(format!("config key {key}: {v:?} is not a count")))
    }
}

fn parse_g(v: &str) -> Result<Vec<(i64, Complex64)>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|t| {
            let p: Vec<&str> = t.split(':').collect();
            if p.len() != 3 {
                return Err(Error::invalid(format!("config key g: expected m:re:im, got {t:?}")));
            }
            let m: i64 = parse_num("g", p[0])?;
            if m <= 0 {
                return Err(Error::invalid("config key g: list positive frequencies only"));
            }
            Ok((m, Complex64::new(parse_num("g", p[1])?, parse_num("g", p[2])?)))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn defaults() -> Self {
        Self::from_pairs(&BTreeMap::new()).expect("defaults are valid")
    }

    /// Parses the flat `key = value` format; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("config line {}: expected key = value", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(map)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_pairs(&Self::parse_text(&text)?)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        for k in pairs.keys() {
            if !KEYS.iter().any(|(name, _)| name == k) {
                let known: Vec<&str> = KEYS.iter().map(|(n, _)| *n).collect();
                return Err(Error::invalid(format!("unknown config key {k:?}; known keys: {}", known.join(", "))));
            }
        }
        let mut raw = BTreeMap::new();
        for (k, d) in KEYS {
            raw.insert(k.to_string(), pairs.get(*k).cloned().unwrap_or_else(|| d.to_string()));
        }
        let get = |k: &str| raw[k].as_str();
        let h = match get("h") {
            "zero" => HSpec::Zero,
            "synthetic" => HSpec::Synthetic,
            "lattice" => HSpec::Lattice,
            "coboundary" => HSpec::Coboundary,
            other => {
                return Err(Error::invalid(format!(
                    "config key h: {other:?} is not one of zero, synthetic, lattice, coboundary"
                )))
            }
        };
        let cfg = ExperimentConfig {
            alpha: AlphaSpec::parse(get("alpha"))?,
            depth: parse_num("depth", get("depth"))?,
            tau: Tau::parse(get("tau"))?,
            precision: parse_num("precision", get("precision"))?,
            seed: parse_num("seed", get("seed"))?,
            n: parse_count("n", get("n"))?,
            n_list: get("n_list").split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_count("n_list", s)).collect::<Result<_>>()?,
            r_list: get("r_list").split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_count("r_list", s)).collect::<Result<_>>()?,
            beta: get("beta").split(',').filter(|s| !s.trim().is_empty()).map(BetaSpec::parse).collect::<Result<_>>()?,
            k_minus: parse_num("k_minus", get("k_minus"))?,
            k_plus: parse_num("k_plus", get("k_plus"))?,
            zeta1: parse_num("zeta1", get("zeta1"))?,
            zeta2: parse_num("zeta2", get("zeta2"))?,
            h,
            h_amplitude: parse_num("h_amplitude", get("h_amplitude"))?,
            h_depth: parse_num("h_depth", get("h_depth"))?,
            h_mean: parse_num("h_mean", get("h_mean"))?,
            g: parse_g(get("g"))?,
            c: parse_num("c", get("c"))?,
            samples: parse_num("samples", get("samples"))?,
            delta: parse_num("delta", get("delta"))?,
            indices: parse_list("indices", get("indices"))?,
            out: get("out").to_string(),
            raw,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replace one key and re-validate.
    pub fn with(&self, key: &str, value: &str) -> Result<Self> {
        let mut pairs = self.raw.clone();
        pairs.insert(key.to_string(), value.to_string());
        Self::from_pairs(&pairs)
    }

    fn validate(&self) -> Result<()> {
        self.tau.require_above_two()?;
        if self.precision < 64 {
            return Err(Error::invalid(format!("precision must be at least 64 bits, got {}", self.precision)));
        }
        if self.k_minus < 2 || self.k_plus < self.k_minus {
            return Err(Error::invalid(format!(
                "window needs 2 ≤ k_minus ≤ k_plus, got [{}, {}]",
                self.k_minus, self.k_plus
            )));
        }
        if self.depth < 2 {
            return Err(Error::invalid("depth must be at least 2"));
        }
        if self.n == 0 || self.n_list.contains(&0) || self.r_list.is_empty() {
            return Err(Error::invalid("n, n_list and r_list must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if !(self.h_amplitude >= 0.0 && self.h_amplitude.is_finite()) {
            return Err(Error::invalid("h_amplitude must be finite and non-negative"));
        }
        Ok(())
    }

    /// `key=value` lines in key order, the input of [`Self::hash`]. The
    /// output directory is left out so relocated runs hash alike.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.raw.iter().filter(|(k, _)| k.as_str() != "out") {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// SHA-256 of [`Self::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn raw(&self) -> &BTreeMap<String, String> {
        &self.raw
    }

    pub fn build_cf(&self) -> Result<ContinuedFraction> {
        match &self.alpha {
            AlphaSpec::Preset(p) => p.build(self.depth, self.precision),
            AlphaSpec::Quotients(q) => {
                let q = if q.len() > self.depth { q.truncate(self.depth)? } else { q.clone() };
                cf_from_quotients(&q, self.precision)
            }
            AlphaSpec::Decimal(d) => cf_from_real(&DyadicInterval::from_decimal(d, self.precision)?, self.depth),
        }
    }

    pub fn build_system(&self, cf: ContinuedFraction) -> Result<SkewProduct> {
        let bits = self.precision;
        match self.h {
            HSpec::Zero => SkewProduct::new(cf, FourierModel::constant(self.h_mean, self.tau)?, bits),
            HSpec::Synthetic => {
                let depth = self.h_depth.min(cf.depth());
                let m = resonant_set(&cf, self.tau, depth)?;
                let opts = SynthOptions {
                    h0: self.h_mean,
                    ..SynthOptions::default()
                };
                let h = synth_h(&m, self.tau, self.seed, self.h_amplitude, opts)?;
                SkewProduct::new(cf, h, bits)
            }
            HSpec::Lattice => {
                let h = lattice_h(&cf, self.tau, self.h_depth, self.h_amplitude, self.h_mean, self.seed)?;
                SkewProduct::new(cf, h, bits)
            }
            HSpec::Coboundary => {
                let mut g = BTreeMap::new();
                for &(m, z) in &self.g {
                    g.insert(BigInt::from(m), z);
                    g.insert(BigInt::from(-m), z.conj());
                }
                let g = FourierModel::with_fitted_const(g, self.tau)?;
                make_coboundary(&g, self.c, cf, bits)
            }
        }
    }
}

/// `ĥ(±q_j) = C q_j^{−τ} e(±φ_j)` for distinct `q_j`, `j ≤ depth`.
pub fn lattice_h(cf: &ContinuedFraction, tau: Tau, depth: usize, amplitude: f64, mean: f64, seed: u64) -> Result<FourierModel> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut coeff = BTreeMap::new();
    if mean != 0.0 {
        coeff.insert(BigInt::from(0), Complex64::new(mean, 0.0));
    }
    for j in 1..=depth.min(cf.depth()) {
        let q = BigInt::from(cf.q(j).clone());
        let phase: f64 = rng.random();
        if coeff.contains_key(&q) {
            continue;
        }
        let mag = amplitude * (-tau.value() * crate::num::log2_biguint(cf.q(j))).exp2();
        let z = Complex64::from_polar(mag, std::f64::consts::TAU * phase);
        coeff.insert(-&q, z.conj());
        coeff.insert(q, z);
    }
    FourierModel::new(coeff, tau, amplitude)
}
