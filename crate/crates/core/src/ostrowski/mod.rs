//! Ostrowski numeration of integers and of circle points, digit windows
//! `I_{k_−}^{k_+}`, the ensemble `B`, residue arcs and digit-independence
//! statistics.
//!
//! Convention: `I_1^k = {0, …, q_{k+1} − 1}` (the integers whose numeration
//! uses scales `1..=k` are exactly those below the next denominator).

mod digits;
mod indep;
mod residue;
mod window;

pub use digits::{
    check_valid, decode_int, decode_signed, encode_int, encode_real, is_valid, partial_sum,
    reconstruct_real, DigitKind, OstrowskiDigits,
};
pub use indep::{concatenation_defect, digit_joint_tv, inverse_quotient_sum};
pub use residue::{residue, residue_arcs, Arc, ResidueArcs};
pub use window::{
    count_window, ensemble_b, enumerate_b, enumerate_interval, interval_size, DigitClass,
    DigitOdometer, DigitWindow, EnsembleB, IntervalIter,
};
