use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::cf::ContinuedFraction;
use crate::circle::CirclePoint;
use crate::dynamics::{product_decay, residual_h1, residual_h2, truncation_error};
use crate::error::{Error, Result};
use crate::experiments::config::ExperimentConfig;
use crate::experiments::ReportFile;
use crate::moebius::{
    arc_family_trigpoly, davenport_avg, disjointness_stat, short_interval_corr, sieve_mu, window_decomp_report, Ones,
    TestFunction, DEFAULT_MAX_DEGREE,
};
use crate::ostrowski::{
    decode_int, digit_joint_tv, encode_int, encode_real, inverse_quotient_sum, residue, residue_arcs, DigitKind,
    DigitOdometer, DigitWindow, OstrowskiDigits,
};
use crate::tau::is_resonant;

/// Largest `q_{k+1}` the bijection check enumerates.
const MAX_BIJECTION: u128 = 2_000_000;

struct Csv {
    body: String,
}

impl Csv {
    fn new(cfg: &ExperimentConfig, header: &str) -> Csv {
        let mut body = String::new();
        let _ = writeln!(body, "# config_sha256={}", cfg.hash());
        let _ = writeln!(body, "{header}");
        Csv { body }
    }

    fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.body, "{}", cells.join(","));
    }

    fn file(self, name: &str) -> ReportFile {
        ReportFile::text(name, self.body)
    }
}

macro_rules! cells {
    ($($e:expr),* $(,)?) => { [$(format!("{}", $e)),*] };
}

fn json_file(cfg: &ExperimentConfig, name: &str, mut v: serde_json::Value) -> ReportFile {
    v["config_sha256"] = json!(cfg.hash());
    ReportFile::text(name, serde_json::to_string_pretty(&v).expect("json") + "\n")
}

fn rng(cfg: &ExperimentConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Uniform digits `0 ≤ n_k < a_k` on the window, which are always valid.
fn random_digits(cf: &ContinuedFraction, w: DigitWindow, rng: &mut ChaCha8Rng) -> Result<OstrowskiDigits> {
    let mut d = OstrowskiDigits::zero(DigitKind::Integer);
    for k in w.k_minus..=w.k_plus {
        let a = cf
            .a_u64(k)
            .filter(|&a| a < i64::MAX as u64)
            .ok_or_else(|| Error::invalid(format!("a_{k} too large to sample")))?;
        d.set(k, rng.random_range(0..a) as i64);
    }
    Ok(d)
}

pub(crate) fn cf_info(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let k = cf.depth();
    let strs = |f: &dyn Fn(usize) -> String| -> Vec<String> { (1..=k + 1).map(f).collect() };
    let v = json!({
        "alpha": cfg.raw()["alpha"],
        "depth": k,
        "precision_bits": cf.precision_bits(),
        "a": (1..=k).map(|i| cf.a(i).to_string()).collect::<Vec<_>>(),
        "p": strs(&|i| cf.p(i).to_string()),
        "q": strs(&|i| cf.q(i).to_string()),
        "theta": (1..=k).map(|i| cf.theta(i).to_json()).collect::<Vec<_>>(),
        "alpha_enclosure": cf.alpha().to_json(),
        "resonant": (1..=k).filter(|&i| is_resonant(&cf, i, cfg.tau)).collect::<Vec<_>>(),
        "tau": cfg.tau.to_string(),
    });
    cf.verify()?;
    Ok(vec![json_file(cfg, "cf-info.json", v)])
}

pub(crate) fn ostrowski_check(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let mut csv = Csv::new(cfg, "k,vectors,expected,bijective,round_trip");
    for k in 1..=cfg.k_plus.min(cf.depth()) {
        let expected = cf.q_u128(k + 1).unwrap_or(u128::MAX);
        if expected > MAX_BIJECTION {
            break;
        }
        let mut odo = DigitOdometer::new(&cf, DigitWindow::new(1, k)?)?;
        let mut count = 0u128;
        let mut bijective = true;
        let mut round_trip = true;
        while odo.advance() {
            // increasing order with no gaps means a bijection onto 0..count
            bijective &= odo.value() == count;
            let d = odo.to_digits();
            let n = decode_int(&d, &cf)?;
            round_trip &= n == BigUint::from(odo.value()) && encode_int(&n, &cf)?.to_map() == d.to_map();
            count += 1;
        }
        bijective &= count == expected;
        csv.row(&cells![k, count, expected, bijective, round_trip]);
    }
    Ok(vec![csv.file("ostrowski-check.csv")])
}

pub(crate) fn indep_tv(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let w = DigitWindow::new(cfg.k_minus, cfg.k_plus)?;
    let idx: Vec<usize> = if cfg.indices.is_empty() {
        (cfg.k_minus..=cfg.k_plus).collect()
    } else {
        cfg.indices.clone()
    };
    let tv = digit_joint_tv(&cf, w, &idx)?;
    let bound = 4.0 * inverse_quotient_sum(&cf, &idx);
    let mut csv = Csv::new(cfg, "k_minus,k_plus,indices,tv,bound,holds");
    let list: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
    csv.row(&cells![cfg.k_minus, cfg.k_plus, list.join(" "), tv, bound, tv <= bound]);
    Ok(vec![csv.file("indep-tv.csv")])
}

pub(crate) fn approx_ladder(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let t = cfg.build_system(cf)?;
    let mut rng = rng(cfg);
    let mut csv = Csv::new(cfg, "k_minus,k_plus,samples,median_h1,median_h2");
    let mut k = cfg.k_minus;
    while k <= cfg.k_plus {
        let w = DigitWindow::new(k, cfg.k_plus)?;
        let mut r1 = Vec::with_capacity(cfg.samples);
        let mut r2 = Vec::with_capacity(cfg.samples);
        for _ in 0..cfg.samples {
            let n = random_digits(t.cf(), w, &mut rng)?;
            let x = CirclePoint::from_f64(rng.random(), t.bits());
            let xd = encode_real(&x, t.cf(), t.cf().depth())?;
            r1.push(residual_h1(&t, w, &n, &x)?.0.abs());
            r2.push(residual_h2(&t, w, &n, &x, &xd)?.0.abs());
        }
        csv.row(&cells![k, cfg.k_plus, cfg.samples, median(&mut r1), median(&mut r2)]);
        k += 4;
    }
    Ok(vec![csv.file("approx-ladder.csv")])
}

pub(crate) fn trunc_decay(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let t = cfg.build_system(cf)?;
    let mut rng = rng(cfg);
    let mut csv = Csv::new(cfg, "k_plus,q_next,max_error");
    let top = t.cf().q(t.cf().depth()).clone();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let samples: Vec<(BigInt, CirclePoint)> = (0..cfg.samples)
        .map(|_| {
            let n = random_below(&top, &mut rng);
            (BigInt::from(n), CirclePoint::from_f64(rng.random(), t.bits()))
        })
        .collect();
    for k in cfg.k_minus..=cfg.k_plus.min(t.cf().depth() - 1) {
        let mut worst: f64 = 0.0;
        for (n, x) in &samples {
            worst = worst.max(truncation_error(&t, n, x, k)?.0.abs());
        }
        let q = t.cf().q(k + 1);
        csv.row(&cells![k, q, worst]);
        if worst > 0.0 {
            xs.push(crate::num::log2_biguint(q));
            ys.push(worst.log2());
        }
    }
    let mut files = vec![csv.file("trunc-decay.csv")];
    if xs.len() >= 2 {
        files.push(json_file(
            cfg,
            "trunc-decay.json",
            json!({ "slope": ls_slope(&xs, &ys), "expected": 1.0 - cfg.tau.value(), "points": xs.len() }),
        ));
    }
    Ok(files)
}

fn random_below(top: &BigUint, rng: &mut ChaCha8Rng) -> BigUint {
    // 64 random bits scaled onto [0, top)
    let r: u64 = rng.random();
    (top * BigUint::from(r)) >> 64usize
}

pub(crate) fn phi_product(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let t = cfg.build_system(cf)?;
    let mut csv = Csv::new(cfg, "k,factor,partial_product");
    for f in product_decay(&t, cfg.k_minus, cfg.k_plus.min(t.cf().depth()))? {
        csv.row(&cells![f.k, f.factor, f.partial_product]);
    }
    Ok(vec![csv.file("phi-product.csv")])
}

pub(crate) fn residue_arcs_report(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let bits = cfg.precision;
    let arcs = residue_arcs(&cf, cfg.k_minus, bits)?;
    let alpha = CirclePoint::alpha(&cf, bits);
    let (mut agree, mut disagree, mut ambiguous) = (0u64, 0u64, 0u64);
    let mut p = CirclePoint::zero(bits);
    for n in 0..cfg.n as u64 {
        let r = residue(&BigUint::from(n), &cf, cfg.k_minus)?;
        match arcs.locate(&p) {
            Ok(i) if BigUint::from(i) == r => agree += 1,
            Ok(_) => disagree += 1,
            Err(Error::BoundaryAmbiguous(_)) => ambiguous += 1,
            Err(e) => return Err(e),
        }
        p = p.add(&alpha);
    }
    let mut list = Csv::new(cfg, "r,start,length");
    for (r, a) in arcs.arcs().iter().enumerate() {
        list.row(&cells![r, a.start_f64(), a.length_f64()]);
    }
    let fam = arc_family_trigpoly(&arcs, cfg.delta, DEFAULT_MAX_DEGREE)?;
    let summary = json!({
        "k_minus": cfg.k_minus,
        "arcs": arcs.len(),
        "n": cfg.n,
        "agree": agree,
        "disagree": disagree,
        "ambiguous": ambiguous,
        "total_length": arcs.total_length(),
        "delta": cfg.delta,
        "degree": fam.degree,
        "b0": fam.b0,
        "exceptional_length": fam.exceptional_length(),
    });
    Ok(vec![list.file("residue-arcs.csv"), json_file(cfg, "residue-arcs.json", summary)])
}

pub(crate) fn mu_sieve(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let mu = sieve_mu(cfg.n)?;
    let summary = json!({ "n": cfg.n, "mertens": mu.mertens(cfg.n) });
    Ok(vec![
        ReportFile::binary("mu.mutb", mu.to_bytes()),
        json_file(cfg, "mu-sieve.json", summary),
    ])
}

pub(crate) fn davenport(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let top = *cfg.n_list.iter().max().unwrap_or(&cfg.n);
    let mu = sieve_mu(top)?;
    let mut csv = Csv::new(cfg, "N,beta_num,beta_den_or_float,value");
    for b in &cfg.beta {
        let (num, den) = b.columns();
        for &n in &cfg.n_list {
            csv.row(&cells![n, num, den, davenport_avg(&mu, n, b.value)?]);
        }
    }
    Ok(vec![csv.file("davenport.csv")])
}

pub(crate) fn mrt_corr(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let mu = sieve_mu(cfg.n)?;
    let mut csv = Csv::new(cfg, "N,R,beta_num,beta_den_or_float,value");
    for b in &cfg.beta {
        let (num, den) = b.columns();
        for &r in &cfg.r_list {
            csv.row(&cells![cfg.n, r, num, den, short_interval_corr(&mu, cfg.n, r, b.value)?]);
        }
    }
    Ok(vec![csv.file("mrt-corr.csv")])
}

fn sample_points(cfg: &ExperimentConfig, bits: u32) -> Vec<(f64, CirclePoint, f64)> {
    let mut rng = rng(cfg);
    (0..cfg.samples)
        .map(|_| {
            let x: f64 = rng.random();
            let y: f64 = rng.random();
            (x, CirclePoint::from_f64(x, bits), y)
        })
        .collect()
}

pub(crate) fn disjointness(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let t = cfg.build_system(cf)?;
    let top = *cfg.n_list.iter().max().unwrap_or(&cfg.n);
    let mu = sieve_mu(top)?;
    let f = TestFunction::new(cfg.zeta1, cfg.zeta2);
    let control = TestFunction::new(0, cfg.zeta2.max(1));
    let mut csv = Csv::new(cfg, "sample,x,y,N,value,ones_control");
    for (i, (xf, x, y)) in sample_points(cfg, t.bits()).into_iter().enumerate() {
        for &n in &cfg.n_list {
            let v = disjointness_stat(&t, &x, y, f, &mu, n)?;
            let c = disjointness_stat(&t, &x, y, control, &Ones(n), n)?;
            csv.row(&cells![i, xf, y, n, v, c]);
        }
    }
    Ok(vec![csv.file("disjointness.csv")])
}

pub(crate) fn window_decomp(cfg: &ExperimentConfig) -> Result<Vec<ReportFile>> {
    let cf = cfg.build_cf()?;
    let t = cfg.build_system(cf)?;
    let mu = sieve_mu(cfg.n)?;
    let f = TestFunction::new(cfg.zeta1, cfg.zeta2);
    let a = t.cf().a(cfg.k_minus).to_f64().unwrap_or(f64::INFINITY);
    let mut csv = Csv::new(cfg, "sample,x,y,full,stat,defect,edge,inv_a_k_minus,bound,holds");
    for (i, (xf, x, y)) in sample_points(cfg, t.bits()).into_iter().enumerate() {
        let full = disjointness_stat(&t, &x, y, f, &mu, cfg.n)?;
        let rep = window_decomp_report(&t, &x, f, &mu, cfg.n, cfg.k_minus, cfg.k_plus)?;
        csv.row(&cells![i, xf, y, full, rep.stat, rep.defect, rep.edge, 1.0 / a, rep.bound(), full <= rep.bound()]);
    }
    Ok(vec![csv.file("window-decomp.csv")])
}
