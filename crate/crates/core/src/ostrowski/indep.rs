use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::cf::ContinuedFraction;
use crate::error::{Error, Result};
use crate::num::biguint_f64;
use crate::ostrowski::window::{class_size, count_window, interval_size, DigitClass, DigitWindow};

/// Largest number of class patterns (3^T) we evaluate.
const MAX_PATTERNS: f64 = 2e6;

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    // scale to keep 64 significant bits through the division
    let shift = (den.bits() as i64 - 64).max(0) as usize;
    let n = num >> shift;
    let d = den >> shift;
    biguint_f64(&n) / biguint_f64(&d)
}

/// Total-variation distance between the law of `(n_{k_1}, …, n_{k_T})` for
/// `n` uniform on `I_{k_−}^{k_+}` and the product of uniform laws on
/// `{0, …, a_{k_t} − 1}`.
///
/// Digits interact only through the rule "a maximal digit forces a zero
/// below it", so the count of `n` with prescribed digits depends only on
/// whether each prescribed digit is zero, interior or maximal. The distance is
/// a sum over those `3^T` class patterns, each evaluated by an exact
/// transfer count.
pub fn digit_joint_tv(cf: &ContinuedFraction, w: DigitWindow, indices: &[usize]) -> Result<f64> {
    w.check_depth(cf)?;
    if indices.is_empty() {
        return Err(Error::invalid("need at least one digit index"));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != indices.len() {
        return Err(Error::invalid("digit indices must be distinct"));
    }
    if let Some(&k) = indices.iter().find(|&&k| !w.contains(k)) {
        return Err(Error::invalid(format!(
            "index {k} outside window [{}, {}]",
            w.k_minus, w.k_plus
        )));
    }
    let t = indices.len();
    let patterns = 3f64.powi(t as i32);
    if patterns > MAX_PATTERNS {
        return Err(Error::TooLarge {
            estimate: patterns,
            limit: MAX_PATTERNS,
        });
    }
    let total = interval_size(cf, w.k_minus, w.k_plus);
    // uniform mass of one tuple with all entries below a_k
    let unif_one: f64 = indices
        .iter()
        .map(|&k| 1.0 / biguint_f64(cf.a(k)))
        .product();
    let classes = [DigitClass::Zero, DigitClass::Mid, DigitClass::Max];
    let mut tv = 0.0;
    let mut idx = vec![0usize; t];
    loop {
        let pinned: Vec<(usize, DigitClass)> =
            indices.iter().zip(&idx).map(|(&k, &c)| (k, classes[c])).collect();
        let mult: BigUint = pinned.iter().map(|&(k, c)| class_size(cf, k, c)).product();
        if !mult.is_zero() {
            let count = count_window(cf, w.k_minus, w.k_plus, &pinned);
            let emp = ratio(&count, &total);
            let has_max = pinned.iter().any(|&(_, c)| c == DigitClass::Max);
            let unif = if has_max { 0.0 } else { unif_one };
            tv += biguint_f64(&mult) * (emp - unif).abs();
        }
        // next pattern
        let mut i = 0;
        while i < t {
            idx[i] += 1;
            if idx[i] < 3 {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == t {
            break;
        }
    }
    Ok(0.5 * tv)
}

/// Fraction of tuples in `Π_t I_{k_t}^{k_{t+1}−1}` whose concatenated
/// numerations fail to be a numeration. `breaks` lists the interior block
/// starts `k_1 < … < k_T` strictly inside the window.
///
/// Concatenation is injective on valid outputs and every `n` in the window
/// arises exactly once, so the defect is `1 − |I_{k_−}^{k_+}| / Π |blocks|`.
pub fn concatenation_defect(cf: &ContinuedFraction, w: DigitWindow, breaks: &[usize]) -> Result<f64> {
    w.check_depth(cf)?;
    let mut starts = vec![w.k_minus];
    for &b in breaks {
        if b <= *starts.last().unwrap() || b > w.k_plus {
            return Err(Error::invalid("block starts must increase strictly inside the window"));
        }
        starts.push(b);
    }
    starts.push(w.k_plus + 1);
    let product: BigUint = starts
        .windows(2)
        .map(|s| interval_size(cf, s[0], s[1] - 1))
        .product();
    let whole = interval_size(cf, w.k_minus, w.k_plus);
    let valid = ratio(&whole, &product);
    Ok((1.0 - valid).max(0.0))
}

/// `Σ_t 1 / a_{k_t}`, the scale of both bounds above.
pub fn inverse_quotient_sum(cf: &ContinuedFraction, indices: &[usize]) -> f64 {
    indices
        .iter()
        .map(|&k| 1.0 / cf.a(k).to_f64().unwrap_or(f64::INFINITY))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_from_quotients, PartialQuotients};
    use crate::ostrowski::window::enumerate_interval;
    use crate::ostrowski::DigitOdometer;
    use std::collections::HashMap;

    // oracle: enumerate the window and tabulate the joint law directly
    fn brute_tv(cf: &ContinuedFraction, w: DigitWindow, idx: &[usize]) -> f64 {
        let mut counts: HashMap<Vec<i64>, u64> = HashMap::new();
        let mut odo = DigitOdometer::new(cf, w).unwrap();
        let mut total = 0u64;
        while odo.advance() {
            let key: Vec<i64> = idx.iter().map(|&k| odo.digit(k)).collect();
            *counts.entry(key).or_default() += 1;
            total += 1;
        }
        let unif: f64 = idx.iter().map(|&k| 1.0 / cf.a_u64(k).unwrap() as f64).product();
        let mut tv = 0.0;
        let mut seen_uniform_support = 0u64;
        for (key, &c) in &counts {
            let inside = key.iter().zip(idx).all(|(&d, &k)| (d as u64) < cf.a_u64(k).unwrap());
            let u = if inside {
                seen_uniform_support += 1;
                unif
            } else {
                0.0
            };
            tv += (c as f64 / total as f64 - u).abs();
        }
        let support: u64 = idx.iter().map(|&k| cf.a_u64(k).unwrap()).product();
        tv += (support - seen_uniform_support) as f64 * unif;
        0.5 * tv
    }

    #[test]
    fn tv_matches_enumeration() {
        let pq = PartialQuotients::from_u64s(&[3, 4, 2, 5, 3, 6, 2]).unwrap();
        let cf = cf_from_quotients(&pq, 128).unwrap();
        for (lo, hi, idx) in [
            (2, 5, vec![3]),
            (2, 5, vec![2, 4]),
            (1, 6, vec![1, 3, 6]),
            (3, 3, vec![3]),
            (2, 7, vec![2, 3, 4, 5]),
        ] {
            let w = DigitWindow::new(lo, hi).unwrap();
            let a = digit_joint_tv(&cf, w, &idx).unwrap();
            let b = brute_tv(&cf, w, &idx);
            assert!((a - b).abs() < 1e-12, "{lo} {hi} {idx:?}: {a} vs {b}");
        }
    }

    #[test]
    fn point_mass_window() {
        let pq = PartialQuotients::from_u64s(&[1, 1, 1]).unwrap();
        let cf = cf_from_quotients(&pq, 64).unwrap();
        let w = DigitWindow::new(1, 1).unwrap();
        assert_eq!(enumerate_interval(&cf, w).unwrap().count(), 1);
        assert_eq!(digit_joint_tv(&cf, w, &[1]).unwrap(), 0.0);
    }

    #[test]
    fn defect_matches_enumeration() {
        let pq = PartialQuotients::from_u64s(&[2, 3, 4, 3, 2, 5]).unwrap();
        let cf = cf_from_quotients(&pq, 128).unwrap();
        let w = DigitWindow::new(2, 6).unwrap();
        let d = concatenation_defect(&cf, w, &[4]).unwrap();
        let whole = enumerate_interval(&cf, w).unwrap().count() as f64;
        let a = enumerate_interval(&cf, DigitWindow::new(2, 3).unwrap()).unwrap().count() as f64;
        let b = enumerate_interval(&cf, DigitWindow::new(4, 6).unwrap()).unwrap().count() as f64;
        assert!((d - (1.0 - whole / (a * b))).abs() < 1e-15);
        assert!(d <= 4.0 * inverse_quotient_sum(&cf, &[4]));
    }
}
