#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use wshift::{RateSummary, WeightSpec};

/// Log-uniform magnitude in `[lo, hi]` with a random sign.
pub fn weight(rng: &mut StdRng, lo: f64, hi: f64, signed: bool) -> f64 {
    let mag = (rng.gen_range(lo.ln()..=hi.ln())).exp();
    if signed && rng.gen_bool(0.5) {
        -mag
    } else {
        mag
    }
}

fn block(rng: &mut StdRng, len: usize, lo: f64, hi: f64, signed: bool) -> Vec<f64> {
    (0..len).map(|_| weight(rng, lo, hi, signed)).collect()
}

/// Eventually periodic spec with periods ≤ 4, core ≤ 4 and `|w| ∈ [lo, hi]`.
pub fn spec(rng: &mut StdRng, lo: f64, hi: f64, signed: bool) -> WeightSpec {
    let core_len = rng.gen_range(0..=4);
    let left = rng.gen_range(1..=4);
    let right = rng.gen_range(1..=4);
    WeightSpec::new(
        rng.gen_range(-3..=3),
        block(rng, core_len, lo, hi, signed),
        block(rng, left, lo, hi, signed),
        block(rng, right, lo, hi, signed),
    )
    .unwrap()
}

pub fn rates_separated(r: &RateSummary, margin: f64) -> bool {
    (r.r_left - 1.0).abs() > margin && (r.r_right - 1.0).abs() > margin
}

/// Spec from [`spec`] with both rates at least `margin` away from 1.
pub fn separated_spec(rng: &mut StdRng, lo: f64, hi: f64, margin: f64) -> WeightSpec {
    loop {
        let s = spec(rng, lo, hi, true);
        if rates_separated(&s.rates(), margin) {
            return s;
        }
    }
}
