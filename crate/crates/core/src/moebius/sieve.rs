use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Default cap on the bytes a table may occupy in memory.
pub const DEFAULT_MEMORY_BUDGET: usize = 512 << 20;

const MAGIC: &[u8; 4] = b"MUTB";
const VERSION: u32 = 1;
const SEGMENT: usize = 1 << 18;

/// A sequence of weights `w(1), …, w(N)` fed to the correlation statistics.
///
/// Indices outside `1..=limit` read as 0, which is how windows running off
/// the end of the table get clipped.
pub trait Weights: Sync {
    fn limit(&self) -> usize;
    fn weight(&self, n: usize) -> f64;
}

/// `μ(n)` for `1 ≤ n ≤ N`.
#[derive(Clone, PartialEq, Eq)]
pub struct MoebiusTable {
    /// index 0 holds 0
    values: Vec<i8>,
}

impl std::fmt::Debug for MoebiusTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MoebiusTable(N = {})", self.limit())
    }
}

impl Weights for MoebiusTable {
    fn limit(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    fn weight(&self, n: usize) -> f64 {
        self.values.get(n).copied().unwrap_or(0) as f64
    }
}

/// The all-ones sequence, the control that carries no Möbius cancellation.
#[derive(Clone, Copy, Debug)]
pub struct Ones(pub usize);

impl Weights for Ones {
    fn limit(&self) -> usize {
        self.0
    }

    #[inline]
    fn weight(&self, n: usize) -> f64 {
        if n >= 1 && n <= self.0 {
            1.0
        } else {
            0.0
        }
    }
}

pub fn sieve_mu(n: usize) -> Result<MoebiusTable> {
    sieve_mu_with_budget(n, DEFAULT_MEMORY_BUDGET)
}

/// Segmented sieve: within each segment every `m` starts at `μ = 1`, flips
/// sign once per prime `p ≤ √N` dividing it (and is zeroed by `p²`), and
/// flips once more if a prime beyond `√N` is left over.
pub fn sieve_mu_with_budget(n: usize, budget: usize) -> Result<MoebiusTable> {
    // the table plus one segment of cofactors
    let need = n + 1 + SEGMENT * 4;
    if need > budget {
        return Err(Error::TooLarge {
            estimate: need as f64,
            limit: budget as f64,
        });
    }
    if n >= u32::MAX as usize {
        return Err(Error::invalid("sieve limit must stay below 2^32"));
    }
    let primes = small_primes(n.isqrt());
    let mut values = vec![0i8; n + 1];
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get()).min(16);
    let chunks: Vec<(usize, &mut [i8])> = values
        .chunks_mut(SEGMENT)
        .enumerate()
        .map(|(i, c)| (i * SEGMENT, c))
        .collect();
    let per = chunks.len().div_ceil(threads).max(1);
    let mut groups: Vec<Vec<(usize, &mut [i8])>> = Vec::new();
    let mut it = chunks.into_iter().peekable();
    while it.peek().is_some() {
        groups.push(it.by_ref().take(per).collect());
    }
    std::thread::scope(|s| {
        for g in groups {
            let primes = &primes;
            s.spawn(move || {
                let mut rem = vec![0u32; SEGMENT];
                for (lo, out) in g {
                    sieve_segment(lo, out, primes, &mut rem);
                }
            });
        }
    });
    values[0] = 0;
    Ok(MoebiusTable { values })
}

fn small_primes(limit: usize) -> Vec<u32> {
    let mut comp = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !comp[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve_segment(lo: usize, out: &mut [i8], primes: &[u32], rem: &mut [u32]) {
    let len = out.len();
    for (i, (o, r)) in out.iter_mut().zip(rem.iter_mut()).enumerate() {
        *o = 1;
        *r = (lo + i) as u32;
    }
    let hi = lo + len;
    for &p in primes {
        let p = p as usize;
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m < hi {
            let i = m - lo;
            out[i] = -out[i];
            rem[i] /= p as u32;
            m += p;
        }
        let pp = p * p;
        if pp < hi {
            let mut m = lo.div_ceil(pp) * pp;
            while m < hi {
                out[m - lo] = 0;
                m += pp;
            }
        }
    }
    for i in 0..len {
        // the cofactor of a squarefree m is 1 or a single large prime
        if out[i] != 0 && rem[i] > 1 {
            out[i] = -out[i];
        }
    }
}

impl MoebiusTable {
    pub fn get(&self, n: usize) -> i8 {
        self.values[n]
    }

    /// `μ(0), μ(1), …, μ(N)` with the placeholder `μ(0) = 0`.
    pub fn as_slice(&self) -> &[i8] {
        &self.values
    }

    /// `M(n) = Σ_{m ≤ n} μ(m)`.
    pub fn mertens(&self, n: usize) -> i64 {
        self.values[..=n.min(self.limit())].iter().map(|&v| v as i64).sum()
    }

    /// Binary layout, little-endian: `b"MUTB"`, version `u32`, `N` `u64`,
    /// then `⌈N/4⌉` bytes packing `μ(1), μ(2), …` two bits each from the
    /// low end (`00` = 0, `01` = 1, `11` = −1).
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.limit();
        let mut out = Vec::with_capacity(16 + n.div_ceil(4));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        for chunk in self.values[1..].chunks(4) {
            let mut b = 0u8;
            for (j, &v) in chunk.iter().enumerate() {
                let code = match v {
                    0 => 0b00,
                    1 => 0b01,
                    _ => 0b11,
                };
                b |= code << (2 * j);
            }
            out.push(b);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<MoebiusTable> {
        if bytes.len() < 16 || &bytes[..4] != MAGIC {
            return Err(Error::Format("not a MUTB file".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Format(format!("unsupported MUTB version {version}")));
        }
        let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let body = &bytes[16..];
        if body.len() != n.div_ceil(4) {
            return Err(Error::Format(format!(
                "MUTB body holds {} bytes, expected {}",
                body.len(),
                n.div_ceil(4)
            )));
        }
        let mut values = Vec::with_capacity(n + 1);
        values.push(0);
        for i in 0..n {
            let code = (body[i / 4] >> (2 * (i % 4))) & 0b11;
            values.push(match code {
                0b00 => 0,
                0b01 => 1,
                0b11 => -1,
                _ => return Err(Error::Format(format!("bad code at entry {}", i + 1))),
            });
        }
        Ok(MoebiusTable { values })
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<MoebiusTable> {
        let mut buf = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }
}
