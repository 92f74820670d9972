//! C ABI over `skewmu`.
//!
//! Objects are opaque handles returned through out-pointers by the
//! constructors (`skewmu_cf_from_preset`, `skewmu_system_coboundary`,
//! `skewmu_mu_sieve`, …) and released with the matching `_free`. Every fallible call returns a
//! [`SkewmuStatus`] and writes results through out-pointers; the message of the
//! last failure on the calling thread is available from
//! [`skewmu_last_error`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use skewmu::dynamics::{birkhoff_closed, make_coboundary, resonant_set, synth_h, FourierModel, SkewProduct, SynthOptions};
use skewmu::experiments::{run, write_reports, ExperimentConfig, Subcommand};
use skewmu::moebius::{davenport_avg, disjointness_stat, short_interval_corr, sieve_mu, MoebiusTable, TestFunction};
use skewmu::ostrowski::{decode_int, encode_int, residue, OstrowskiDigits};
use skewmu::{cf_from_quotients, CirclePoint, ContinuedFraction, Error, PartialQuotients, Preset, Tau};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkewmuStatus {
    Ok = 0,
    Invalid = 1,
    Precision = 2,
    BoundaryAmbiguous = 3,
    OutOfRange = 4,
    InvalidNumeration = 5,
    TooLarge = 6,
    Rational = 7,
    Io = 8,
    Format = 9,
    NullPointer = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

impl From<&Error> for SkewmuStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Invalid(_) => SkewmuStatus::Invalid,
            Error::Precision(_) => SkewmuStatus::Precision,
            Error::BoundaryAmbiguous(_) => SkewmuStatus::BoundaryAmbiguous,
            Error::OutOfRange { .. } => SkewmuStatus::OutOfRange,
            Error::InvalidNumeration(_) => SkewmuStatus::InvalidNumeration,
            Error::TooLarge { .. } => SkewmuStatus::TooLarge,
            Error::Rational => SkewmuStatus::Rational,
            Error::Io(_) => SkewmuStatus::Io,
            Error::Format(_) => SkewmuStatus::Format,
        }
    }
}

/// Continued-fraction data of `α`.
pub struct SkewmuCf(ContinuedFraction);

/// A skew product `T(x, y) = (x + α, y + h(x))`.
pub struct SkewmuSystem(SkewProduct);

/// A sieved table of `μ(n)`.
pub struct SkewmuMuTable(MoebiusTable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(SkewmuStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(SkewmuStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SkewmuStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, mapping errors and panics onto a status and the last-error slot.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SkewmuStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SkewmuStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            SkewmuStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SkewmuStatus::Invalid, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failure on this thread (empty before any failure).
/// Successful calls leave it untouched; the pointer stays valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn skewmu_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn skewmu_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// continued fractions -------------------------------------------------------

/// Builds a preset (`golden`, `silver`, `liouville-D`, `tower`) to the deepest
/// prefix of at most `depth` quotients certifiable at `bits`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out_cf` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_from_preset(
    name: *const c_char,
    depth: usize,
    bits: u32,
    out_cf: *mut *mut SkewmuCf,
) -> SkewmuStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let o = out(out_cf, "out_cf")?;
        let cf = Preset::parse(name)?.build(depth, bits)?;
        *o = Box::into_raw(Box::new(SkewmuCf(cf)));
        Ok(())
    })
}

/// # Safety
/// `a` must point to `len` readable values and `out_cf` must be valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_from_quotients(
    a: *const u64,
    len: usize,
    bits: u32,
    out_cf: *mut *mut SkewmuCf,
) -> SkewmuStatus {
    guard(|| {
        if a.is_null() {
            return Err(null("a"));
        }
        let o = out(out_cf, "out_cf")?;
        let q = PartialQuotients::from_u64s(std::slice::from_raw_parts(a, len))?;
        *o = Box::into_raw(Box::new(SkewmuCf(cf_from_quotients(&q, bits)?)));
        Ok(())
    })
}

/// # Safety
/// `cf` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_free(cf: *mut SkewmuCf) {
    if !cf.is_null() {
        drop(Box::from_raw(cf));
    }
}

/// Number of partial quotients; 0 for a null handle.
///
/// # Safety
/// `cf` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_depth(cf: *const SkewmuCf) -> usize {
    cf.as_ref().map_or(0, |c| c.0.depth())
}

/// Midpoint of the `α` enclosure.
///
/// # Safety
/// `cf` must be a live handle and `out_alpha` valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_alpha(cf: *const SkewmuCf, out_alpha: *mut f64) -> SkewmuStatus {
    guard(|| {
        *out(out_alpha, "out_alpha")? = handle(cf, "cf")?.0.alpha_f64();
        Ok(())
    })
}

fn u64_of(v: &BigUint, what: &str) -> Result<u64, Fail> {
    v.to_u64()
        .ok_or_else(|| Fail(SkewmuStatus::OutOfRange, format!("{what} = {v} does not fit in 64 bits")))
}

fn check_index(cf: &ContinuedFraction, k: usize, top: usize) -> Result<(), Fail> {
    if k > top {
        return Err(Error::OutOfRange {
            value: format!("index {k}"),
            depth: cf.depth(),
        }
        .into());
    }
    Ok(())
}

/// `a_k` for `1 ≤ k ≤ depth`.
///
/// # Safety
/// `cf` must be a live handle and `out_a` valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_a(cf: *const SkewmuCf, k: usize, out_a: *mut u64) -> SkewmuStatus {
    guard(|| {
        let c = &handle(cf, "cf")?.0;
        if k == 0 {
            return Err(Fail(SkewmuStatus::Invalid, "quotient indices start at 1".into()));
        }
        check_index(c, k, c.depth())?;
        *out(out_a, "out_a")? = u64_of(c.a(k), "a_k")?;
        Ok(())
    })
}

/// `q_k` for `0 ≤ k ≤ depth + 1`.
///
/// # Safety
/// `cf` must be a live handle and `out_q` valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_cf_q(cf: *const SkewmuCf, k: usize, out_q: *mut u64) -> SkewmuStatus {
    guard(|| {
        let c = &handle(cf, "cf")?.0;
        check_index(c, k, c.depth() + 1)?;
        *out(out_q, "out_q")? = u64_of(c.q(k), "q_k")?;
        Ok(())
    })
}

// Ostrowski numeration -----------------------------------------------------

/// Writes the digits `n_1, n_2, …` of `n` into `digits` (capacity `cap`) and
/// their count into `out_len`. With too small a buffer the call fails with
/// `BufferTooSmall` and `out_len` still receives the required length.
///
/// # Safety
/// `digits` must have room for `cap` values; the other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_ostrowski_encode(
    cf: *const SkewmuCf,
    n: u64,
    digits: *mut i64,
    cap: usize,
    out_len: *mut usize,
) -> SkewmuStatus {
    guard(|| {
        let c = &handle(cf, "cf")?.0;
        let len_slot = out(out_len, "out_len")?;
        let d = encode_int(&BigUint::from(n), c)?;
        let len = d.max_index();
        *len_slot = len;
        if len > cap {
            return Err(Fail(SkewmuStatus::BufferTooSmall, format!("need {len} digits, buffer holds {cap}")));
        }
        if len > 0 && digits.is_null() {
            return Err(null("digits"));
        }
        for k in 1..=len {
            *digits.add(k - 1) = d.get(k);
        }
        Ok(())
    })
}

/// Inverse of [`skewmu_ostrowski_encode`]; fails on an invalid numeration.
///
/// # Safety
/// `digits` must point to `len` readable values; `out_n` must be valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_ostrowski_decode(
    cf: *const SkewmuCf,
    digits: *const i64,
    len: usize,
    out_n: *mut u64,
) -> SkewmuStatus {
    guard(|| {
        let c = &handle(cf, "cf")?.0;
        let o = out(out_n, "out_n")?;
        let v = if len == 0 {
            Vec::new()
        } else if digits.is_null() {
            return Err(null("digits"));
        } else {
            std::slice::from_raw_parts(digits, len).to_vec()
        };
        *o = u64_of(&decode_int(&OstrowskiDigits::from_vec(v), c)?, "n")?;
        Ok(())
    })
}

/// `r(n)`, the part of the numeration of `n` below index `k_minus`.
///
/// # Safety
/// `cf` must be a live handle and `out_r` valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_residue(cf: *const SkewmuCf, n: u64, k_minus: usize, out_r: *mut u64) -> SkewmuStatus {
    guard(|| {
        let c = &handle(cf, "cf")?.0;
        *out(out_r, "out_r")? = u64_of(&residue(&BigUint::from(n), c, k_minus)?, "r")?;
        Ok(())
    })
}

// skew products ------------------------------------------------------------

fn tau_of(num: u64, den: u64) -> Result<Tau, Fail> {
    Ok(Tau::new(num, den)?.require_above_two()?)
}

/// Coboundary system `h = g(x + α) − g(x) + c` with `ĝ(m_i) = re_i + i·im_i`
/// for the positive frequencies `m_i` (the conjugate modes are implied).
/// `cf` is copied, not consumed.
///
/// # Safety
/// `m`, `re`, `im` must each point to `len` values; `cf` and `out_sys` valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn skewmu_system_coboundary(
    cf: *const SkewmuCf,
    tau_num: u64,
    tau_den: u64,
    m: *const i64,
    re: *const f64,
    im: *const f64,
    len: usize,
    c: f64,
    out_sys: *mut *mut SkewmuSystem,
) -> SkewmuStatus {
    guard(|| {
        let cf = &handle(cf, "cf")?.0;
        let o = out(out_sys, "out_sys")?;
        if len > 0 && (m.is_null() || re.is_null() || im.is_null()) {
            return Err(null("coefficient arrays"));
        }
        let mut g = BTreeMap::new();
        for i in 0..len {
            let f = *m.add(i);
            if f <= 0 {
                return Err(Fail(SkewmuStatus::Invalid, "list positive frequencies only".into()));
            }
            let z = Complex64::new(*re.add(i), *im.add(i));
            g.insert(BigInt::from(f), z);
            g.insert(BigInt::from(-f), z.conj());
        }
        let g = FourierModel::with_fitted_const(g, tau_of(tau_num, tau_den)?)?;
        let bits = cf.precision_bits();
        *o = Box::into_raw(Box::new(SkewmuSystem(make_coboundary(&g, c, cf.clone(), bits)?)));
        Ok(())
    })
}

/// Synthetic `h` on the resonant frequencies of the first `depth` scales,
/// `|ĥ(m)| = amplitude·|m|^{−τ}` with seeded random phases and mean `mean`.
///
/// # Safety
/// `cf` must be a live handle and `out_sys` valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn skewmu_system_synthetic(
    cf: *const SkewmuCf,
    tau_num: u64,
    tau_den: u64,
    depth: usize,
    seed: u64,
    amplitude: f64,
    mean: f64,
    out_sys: *mut *mut SkewmuSystem,
) -> SkewmuStatus {
    guard(|| {
        let cf = &handle(cf, "cf")?.0;
        let o = out(out_sys, "out_sys")?;
        let tau = tau_of(tau_num, tau_den)?;
        let set = resonant_set(cf, tau, depth.min(cf.depth()))?;
        let opts = SynthOptions {
            h0: mean,
            ..SynthOptions::default()
        };
        let h = synth_h(&set, tau, seed, amplitude, opts)?;
        *o = Box::into_raw(Box::new(SkewmuSystem(SkewProduct::new(cf.clone(), h, cf.precision_bits())?)));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewmu_system_free(sys: *mut SkewmuSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// `H_n(x) = Σ_{l<n} h(x + lα)` from the closed form, with its error bound.
///
/// # Safety
/// `sys` must be a live handle; `out_value` valid, `out_err` may be null.
#[no_mangle]
pub unsafe extern "C" fn skewmu_birkhoff_sum(
    sys: *const SkewmuSystem,
    x: f64,
    n: i64,
    out_value: *mut f64,
    out_err: *mut f64,
) -> SkewmuStatus {
    guard(|| {
        let t = &handle(sys, "sys")?.0;
        let o = out(out_value, "out_value")?;
        let v = birkhoff_closed(t, &CirclePoint::from_f64(x, t.bits()), &BigInt::from(n))?;
        *o = v.value();
        if let Some(e) = out_err.as_mut() {
            *e = v.err;
        }
        Ok(())
    })
}

// Möbius statistics --------------------------------------------------------

/// # Safety
/// `out_table` must be valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_mu_sieve(n: usize, out_table: *mut *mut SkewmuMuTable) -> SkewmuStatus {
    guard(|| {
        let o = out(out_table, "out_table")?;
        *o = Box::into_raw(Box::new(SkewmuMuTable(sieve_mu(n)?)));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewmu_mu_free(t: *mut SkewmuMuTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// `μ(n)`, or 0 outside `1..=limit` and for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skewmu_mu_get(t: *const SkewmuMuTable, n: usize) -> i8 {
    match t.as_ref() {
        Some(t) if n >= 1 && n < t.0.as_slice().len() => t.0.get(n),
        _ => 0,
    }
}

/// `|(1/N) Σ_{n ≤ N} μ(n) e(βn)|`.
///
/// # Safety
/// `t` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_davenport_avg(
    t: *const SkewmuMuTable,
    n: usize,
    beta: f64,
    out_value: *mut f64,
) -> SkewmuStatus {
    guard(|| {
        let t = &handle(t, "table")?.0;
        *out(out_value, "out_value")? = davenport_avg(t, n, beta)?;
        Ok(())
    })
}

/// `𝔼_{L<N} |𝔼_{n ≤ R} μ(L+n) e(βn)|`.
///
/// # Safety
/// `t` must be a live handle and `out_value` valid.
#[no_mangle]
pub unsafe extern "C" fn skewmu_short_interval_corr(
    t: *const SkewmuMuTable,
    n: usize,
    r: usize,
    beta: f64,
    out_value: *mut f64,
) -> SkewmuStatus {
    guard(|| {
        let t = &handle(t, "table")?.0;
        *out(out_value, "out_value")? = short_interval_corr(t, n, r, beta)?;
        Ok(())
    })
}

/// `|(1/N) Σ_{n ≤ N} μ(n) e(ζ₁x_n + ζ₂y_n)|` along the orbit of `(x, y)`.
///
/// # Safety
/// Both handles must be live and `out_value` valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn skewmu_disjointness_stat(
    sys: *const SkewmuSystem,
    t: *const SkewmuMuTable,
    x: f64,
    y: f64,
    zeta1: i64,
    zeta2: u64,
    n: usize,
    out_value: *mut f64,
) -> SkewmuStatus {
    guard(|| {
        let s = &handle(sys, "sys")?.0;
        let t = &handle(t, "table")?.0;
        let o = out(out_value, "out_value")?;
        let p = CirclePoint::from_f64(x, s.bits());
        *o = disjointness_stat(s, &p, y, TestFunction::new(zeta1, zeta2), t, n)?;
        Ok(())
    })
}

// experiments --------------------------------------------------------------

/// Runs one CLI subcommand with a configuration in the flat `key = value`
/// format (`config` may be null for defaults) and writes its reports to
/// `out_dir`.
///
/// # Safety
/// `name` and `out_dir` must be NUL-terminated strings; `config` may be null.
#[no_mangle]
pub unsafe extern "C" fn skewmu_run_experiment(
    name: *const c_char,
    config: *const c_char,
    out_dir: *const c_char,
) -> SkewmuStatus {
    guard(|| {
        let cmd: Subcommand = str_arg(name, "name")?.parse()?;
        let dir = str_arg(out_dir, "out_dir")?;
        let pairs = if config.is_null() {
            BTreeMap::new()
        } else {
            ExperimentConfig::parse_text(str_arg(config, "config")?)?
        };
        let cfg = ExperimentConfig::from_pairs(&pairs)?;
        write_reports(Path::new(dir), &run(cmd, &cfg)?)?;
        Ok(())
    })
}
