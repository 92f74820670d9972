use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::cf::ContinuedFraction;
use crate::error::{Error, Result};
use crate::ostrowski::digits::OstrowskiDigits;
use crate::tau::{is_resonant, Tau};

/// A band of scales `[k_−, k_+]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigitWindow {
    pub k_minus: usize,
    pub k_plus: usize,
}

impl DigitWindow {
    pub fn new(k_minus: usize, k_plus: usize) -> Result<Self> {
        if k_minus == 0 || k_minus > k_plus {
            return Err(Error::invalid(format!(
                "window needs 1 <= k_minus <= k_plus, got [{k_minus}, {k_plus}]"
            )));
        }
        Ok(DigitWindow { k_minus, k_plus })
    }

    pub fn len(&self) -> usize {
        self.k_plus - self.k_minus + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: usize) -> bool {
        k >= self.k_minus && k <= self.k_plus
    }

    pub(crate) fn check_depth(&self, cf: &ContinuedFraction) -> Result<()> {
        if self.k_plus > cf.depth() {
            return Err(Error::OutOfRange {
                value: format!("window top {}", self.k_plus),
                depth: cf.depth(),
            });
        }
        Ok(())
    }
}

/// Largest digit allowed at `k` ignoring the neighbour constraint.
pub(crate) fn digit_max(cf: &ContinuedFraction, k: usize) -> Result<i64> {
    let a = cf
        .a(k)
        .to_i64()
        .ok_or_else(|| Error::invalid(format!("a_{k} does not fit in a 64-bit digit")))?;
    Ok(if k == 1 { a - 1 } else { a })
}

/// Walks the valid digit vectors supported on a window in increasing order
/// of the integer they encode.
pub struct DigitOdometer {
    w: DigitWindow,
    digits: Vec<i64>, // digits[i] is n_{k_minus + i}
    caps: Vec<i64>,
    a: Vec<i64>,
    q: Vec<u128>,
    value: u128,
    started: bool,
    done: bool,
}

impl DigitOdometer {
    pub fn new(cf: &ContinuedFraction, w: DigitWindow) -> Result<Self> {
        w.check_depth(cf)?;
        let top = cf
            .q_u128(w.k_plus + 1)
            .filter(|&q| q < (1u128 << 126))
            .ok_or_else(|| Error::invalid("window too deep for 128-bit enumeration"))?;
        let _ = top;
        let mut caps = Vec::with_capacity(w.len());
        let mut a = Vec::with_capacity(w.len());
        let mut q = Vec::with_capacity(w.len());
        for k in w.k_minus..=w.k_plus {
            caps.push(digit_max(cf, k)?);
            a.push(cf.a(k).to_i64().unwrap());
            q.push(cf.q_u128(k).unwrap());
        }
        Ok(DigitOdometer {
            w,
            digits: vec![0; w.len()],
            caps,
            a,
            q,
            value: 0,
            started: false,
            done: false,
        })
    }

    /// Move to the next vector; `false` once exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let n = self.digits.len();
        for i in 0..n {
            let blocked = i + 1 < n && self.digits[i + 1] == self.a[i + 1];
            if self.digits[i] < self.caps[i] && !blocked {
                self.digits[i] += 1;
                self.value += self.q[i];
                for j in 0..i {
                    self.value -= self.digits[j] as u128 * self.q[j];
                    self.digits[j] = 0;
                }
                return true;
            }
        }
        self.done = true;
        false
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    /// Digit at absolute index `k` (must lie in the window).
    pub fn digit(&self, k: usize) -> i64 {
        self.digits[k - self.w.k_minus]
    }

    pub fn window_digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn to_digits(&self) -> OstrowskiDigits {
        let mut d = OstrowskiDigits::zero(crate::ostrowski::DigitKind::Integer);
        for (i, &v) in self.digits.iter().enumerate() {
            if v != 0 {
                d.set(self.w.k_minus + i, v);
            }
        }
        d
    }
}

/// Iterator over `I_{k_−}^{k_+}`, the integers whose numeration is supported
/// on the window, in increasing order.
pub struct IntervalIter {
    odo: DigitOdometer,
}

impl Iterator for IntervalIter {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        if self.odo.advance() {
            Some(self.odo.value())
        } else {
            None
        }
    }
}

pub fn enumerate_interval(cf: &ContinuedFraction, w: DigitWindow) -> Result<IntervalIter> {
    Ok(IntervalIter {
        odo: DigitOdometer::new(cf, w)?,
    })
}

/// Digit classes that determine how a digit interacts with its neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitClass {
    Zero,
    /// `1 ≤ n_k ≤ a_k − 1`
    Mid,
    /// `n_k = a_k` (impossible at `k = 1`)
    Max,
}

/// Number of digit values of class `c` at scale `k`.
pub(crate) fn class_size(cf: &ContinuedFraction, k: usize, c: DigitClass) -> BigUint {
    match c {
        DigitClass::Zero => BigUint::one(),
        DigitClass::Mid => cf.a(k) - 1u32,
        DigitClass::Max => {
            if k == 1 {
                BigUint::zero()
            } else {
                BigUint::one()
            }
        }
    }
}

/// Count valid numerations supported on `[lo, hi]` with the listed scales
/// pinned to one representative value of the given class.
pub fn count_window(
    cf: &ContinuedFraction,
    lo: usize,
    hi: usize,
    pinned: &[(usize, DigitClass)],
) -> BigUint {
    // state: was the digit just above the current scale maximal?
    let mut free = BigUint::one(); // above not max
    let mut blocked = BigUint::zero(); // above is max
    for k in (lo..=hi).rev() {
        let pin = pinned.iter().find(|(j, _)| *j == k).map(|(_, c)| *c);
        let weight = |c: DigitClass| -> BigUint {
            match pin {
                Some(p) if p != c => BigUint::zero(),
                Some(_) => {
                    if class_size(cf, k, c).is_zero() {
                        BigUint::zero()
                    } else {
                        BigUint::one()
                    }
                }
                None => class_size(cf, k, c),
            }
        };
        let total = &free + &blocked;
        let wz = weight(DigitClass::Zero);
        let wm = weight(DigitClass::Mid);
        let wx = weight(DigitClass::Max);
        let next_free = &total * &wz + &free * &wm;
        let next_blocked = &free * &wx;
        free = next_free;
        blocked = next_blocked;
    }
    free + blocked
}

/// `|I_{lo}^{hi}|`.
pub fn interval_size(cf: &ContinuedFraction, lo: usize, hi: usize) -> BigUint {
    count_window(cf, lo, hi, &[])
}

/// The ensemble `B`: digits `0 ≤ n_k ≤ a_k − 1` at the resonant scales of a
/// window and zero elsewhere.
#[derive(Clone, Debug)]
pub struct EnsembleB {
    resonant: Vec<usize>,
    radices: Vec<u64>,
}

pub fn ensemble_b(cf: &ContinuedFraction, w: DigitWindow, tau: Tau) -> Result<EnsembleB> {
    w.check_depth(cf)?;
    let resonant: Vec<usize> = (w.k_minus..=w.k_plus)
        .filter(|&k| is_resonant(cf, k, tau))
        .collect();
    let radices = resonant
        .iter()
        .map(|&k| {
            cf.a_u64(k)
                .ok_or_else(|| Error::invalid(format!("a_{k} too large to enumerate")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleB { resonant, radices })
}

impl EnsembleB {
    pub fn resonant(&self) -> &[usize] {
        &self.resonant
    }

    /// `Π a_k` over the resonant scales.
    pub fn cardinality(&self) -> BigUint {
        self.radices.iter().map(|&a| BigUint::from(a)).product()
    }

    pub fn iter(&self) -> EnsembleIter<'_> {
        EnsembleIter {
            e: self,
            counter: vec![0; self.radices.len()],
            done: self.radices.contains(&0),
            started: false,
        }
    }

    /// The member with mixed-radix index digits `l_t` (used for sampling).
    pub fn member(&self, l: &[u64]) -> OstrowskiDigits {
        let mut d = OstrowskiDigits::zero(crate::ostrowski::DigitKind::Integer);
        for (&k, &v) in self.resonant.iter().zip(l) {
            if v != 0 {
                d.set(k, v as i64);
            }
        }
        d
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }
}

pub struct EnsembleIter<'a> {
    e: &'a EnsembleB,
    counter: Vec<u64>,
    done: bool,
    started: bool,
}

impl Iterator for EnsembleIter<'_> {
    type Item = OstrowskiDigits;

    fn next(&mut self) -> Option<OstrowskiDigits> {
        if self.done {
            return None;
        }
        if self.started {
            let mut i = 0;
            loop {
                if i == self.counter.len() {
                    self.done = true;
                    return None;
                }
                self.counter[i] += 1;
                if self.counter[i] < self.e.radices[i] {
                    break;
                }
                self.counter[i] = 0;
                i += 1;
            }
        }
        self.started = true;
        Some(self.e.member(&self.counter))
    }
}

/// Same as [`ensemble_b`] followed by iteration.
pub fn enumerate_b(cf: &ContinuedFraction, w: DigitWindow, tau: Tau) -> Result<Vec<OstrowskiDigits>> {
    let e = ensemble_b(cf, w, tau)?;
    let card = e.cardinality();
    if card > BigUint::from(10_000_000u64) {
        return Err(Error::TooLarge {
            estimate: crate::num::biguint_f64(&card),
            limit: 1e7,
        });
    }
    Ok(e.iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_from_quotients, PartialQuotients, Preset};
    use crate::ostrowski::{decode_int, encode_int, is_valid};

    // oracle: filter 0..limit by the support of the greedy numeration
    fn brute(cf: &ContinuedFraction, w: DigitWindow, limit: u64) -> Vec<u128> {
        (0..limit)
            .filter(|&n| {
                let d = encode_int(&BigUint::from(n), cf).unwrap();
                let inside = d.nonzero().all(|(k, _)| w.contains(k));
                inside
            })
            .map(|n| n as u128)
            .collect()
    }

    #[test]
    fn golden_initial_window_is_prefix() {
        let cf = Preset::Golden.build(20, 128).unwrap();
        let w = DigitWindow::new(1, 4).unwrap();
        let v: Vec<u128> = enumerate_interval(&cf, w).unwrap().collect();
        assert_eq!(v, vec![0, 1, 2, 3, 4]);
        assert_eq!(v, brute(&cf, w, 20));
        assert_eq!(cf.q(5).to_u64(), Some(5));
        assert_eq!(interval_size(&cf, 1, 4), BigUint::from(5u32));
    }

    #[test]
    fn windows_match_brute_force() {
        let pq = PartialQuotients::from_u64s(&[3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
        let cf = cf_from_quotients(&pq, 128).unwrap();
        let limit = cf.q(9).to_u64().unwrap();
        for lo in 1..=6 {
            for hi in lo..=7 {
                let w = DigitWindow::new(lo, hi).unwrap();
                let v: Vec<u128> = enumerate_interval(&cf, w).unwrap().collect();
                assert_eq!(v, brute(&cf, w, limit), "[{lo},{hi}]");
                assert_eq!(BigUint::from(v.len()), interval_size(&cf, lo, hi));
            }
        }
    }

    #[test]
    fn single_scale_windows() {
        let cf = Preset::Silver.build(10, 128).unwrap();
        let v: Vec<u128> = enumerate_interval(&cf, DigitWindow::new(1, 1).unwrap()).unwrap().collect();
        assert_eq!(v, vec![0, 1]);
        let v: Vec<u128> = enumerate_interval(&cf, DigitWindow::new(3, 3).unwrap()).unwrap().collect();
        assert_eq!(v, vec![0, 5, 10]);
    }

    #[test]
    fn odometer_yields_valid_digits() {
        let cf = Preset::Silver.build(10, 128).unwrap();
        let mut odo = DigitOdometer::new(&cf, DigitWindow::new(2, 6).unwrap()).unwrap();
        while odo.advance() {
            let d = odo.to_digits();
            assert!(is_valid(&d, &cf));
            assert_eq!(decode_int(&d, &cf).unwrap().to_u128(), Some(odo.value()));
        }
    }

    #[test]
    fn ensemble_sizes() {
        let cf = Preset::Golden.build(30, 128).unwrap();
        let tau = Tau::parse("2.5").unwrap();
        let b = enumerate_b(&cf, DigitWindow::new(10, 20).unwrap(), tau).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].is_zero());
        let pq = PartialQuotients::from_u64s(&[1, 5, 1, 1]).unwrap();
        let cf = cf_from_quotients(&pq, 128).unwrap();
        // q = 1,1,5,6,11: only k = 2 passes inside [2, 2]
        let b = enumerate_b(&cf, DigitWindow::new(2, 2).unwrap(), tau).unwrap();
        assert_eq!(b.len(), 5);
        assert!(b.iter().all(|d| is_valid(d, &cf)));
    }
}
