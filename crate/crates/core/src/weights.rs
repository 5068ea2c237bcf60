//! Eventually periodic bilateral weight sequences.
//!
//! A [`WeightSpec`] describes an infinite sequence `w: ℤ → ℝ \ {0}` by a finite
//! core flanked by two periodic tails. Long products of weights are carried as
//! [`WeightProduct`], a sign plus a binary-scaled mantissa, so that windows of
//! thousands of indices neither overflow nor underflow and products of powers
//! of two stay exact.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rates whose natural log lies within this band of zero are treated as exactly 1.
pub const RATE_TOLERANCE: f64 = 1e-12;

/// Signed product of weights, stored as `± mantissa · 2^exponent` with the
/// mantissa in `[0.5, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProduct {
    negative: bool,
    mantissa: f64,
    exponent: i64,
}

impl WeightProduct {
    pub const ONE: WeightProduct = WeightProduct {
        negative: false,
        mantissa: 0.5,
        exponent: 1,
    };

    /// Wraps a single nonzero finite scalar.
    pub fn from_scalar(w: f64) -> Self {
        debug_assert!(w != 0.0 && w.is_finite());
        let (m, e) = libm::frexp(w.abs());
        WeightProduct {
            negative: w < 0.0,
            mantissa: m,
            exponent: e as i64,
        }
    }

    fn normalized(negative: bool, mantissa: f64, exponent: i64) -> Self {
        let (m, e) = libm::frexp(mantissa);
        WeightProduct {
            negative,
            mantissa: m,
            exponent: exponent + e as i64,
        }
    }

    pub fn mul(self, other: WeightProduct) -> Self {
        Self::normalized(
            self.negative != other.negative,
            self.mantissa * other.mantissa,
            self.exponent + other.exponent,
        )
    }

    pub fn mul_scalar(self, w: f64) -> Self {
        self.mul(Self::from_scalar(w))
    }

    pub fn recip(self) -> Self {
        Self::normalized(self.negative, 1.0 / self.mantissa, -self.exponent)
    }

    pub fn powu(self, mut n: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(base);
            }
        }
        acc
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `+1.0` or `-1.0`.
    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// Natural log of the magnitude.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.ln() + self.exponent as f64 * LN_2
    }

    pub fn abs(self) -> Self {
        WeightProduct {
            negative: false,
            ..self
        }
    }

    /// The product as an `f64`, saturating to `±inf` or `±0`.
    pub fn value(&self) -> f64 {
        self.sign() * ldexp_saturating(self.mantissa, self.exponent)
    }

    /// `x · Π` with a single rounding of the mantissas; the scaling by powers
    /// of two is exact unless the result leaves the `f64` range.
    pub fn scale(&self, x: f64) -> f64 {
        if x == 0.0 || !x.is_finite() {
            return x * self.sign();
        }
        let (mx, ex) = libm::frexp(x);
        let (m, e) = libm::frexp(mx * self.mantissa);
        self.sign() * ldexp_saturating(m, self.exponent + ex as i64 + e as i64)
    }
}

fn ldexp_saturating(m: f64, e: i64) -> f64 {
    let e = e.clamp(-4000, 4000) as i32;
    libm::ldexp(m, e)
}

/// Eventually periodic bilateral weight sequence.
///
/// `w(n) = core[n - core_start]` on the core,
/// `w(n) = right_period[(n - (core_start + len)) mod q_R]` to the right and
/// `w(n) = left_period[q_L - 1 - ((core_start - 1 - n) mod q_L)]` to the left,
/// so the last entry of `left_period` sits at `core_start - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightSpec")]
pub struct WeightSpec {
    core_start: i64,
    core: Vec<f64>,
    left_period: Vec<f64>,
    right_period: Vec<f64>,
}

#[derive(Deserialize)]
struct RawWeightSpec {
    core_start: i64,
    #[serde(default)]
    core: Vec<f64>,
    left_period: Vec<f64>,
    right_period: Vec<f64>,
}

impl TryFrom<RawWeightSpec> for WeightSpec {
    type Error = Error;

    fn try_from(raw: RawWeightSpec) -> Result<Self> {
        WeightSpec::new(raw.core_start, raw.core, raw.left_period, raw.right_period)
    }
}

impl WeightSpec {
    pub fn new(
        core_start: i64,
        core: Vec<f64>,
        left_period: Vec<f64>,
        right_period: Vec<f64>,
    ) -> Result<Self> {
        if left_period.is_empty() || right_period.is_empty() {
            return Err(Error::InvalidSpec("periods must be nonempty".into()));
        }
        for (name, values) in [
            ("core", &core),
            ("left_period", &left_period),
            ("right_period", &right_period),
        ] {
            if let Some(bad) = values.iter().find(|w| !w.is_finite() || **w == 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{name} contains {bad}; weights must be finite and nonzero"
                )));
            }
        }
        Ok(WeightSpec {
            core_start,
            core,
            left_period,
            right_period,
        })
    }

    /// `w ≡ value`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(0, Vec::new(), vec![value], vec![value])
    }

    /// `w(n) = left` for `n < first_right`, `w(n) = right` for `n ≥ first_right`.
    pub fn step(left: f64, right: f64, first_right: i64) -> Result<Self> {
        Self::new(first_right, Vec::new(), vec![left], vec![right])
    }

    pub fn core_start(&self) -> i64 {
        self.core_start
    }

    /// First index of the right periodic tail.
    pub fn core_end(&self) -> i64 {
        self.core_start + self.core.len() as i64
    }

    pub fn core(&self) -> &[f64] {
        &self.core
    }

    pub fn left_period(&self) -> &[f64] {
        &self.left_period
    }

    pub fn right_period(&self) -> &[f64] {
        &self.right_period
    }

    pub fn weight_at(&self, n: i64) -> f64 {
        let end = self.core_end();
        if n >= end {
            let q = self.right_period.len() as i64;
            self.right_period[(n - end).rem_euclid(q) as usize]
        } else if n < self.core_start {
            let q = self.left_period.len() as i64;
            self.left_period[(q - 1 - (self.core_start - 1 - n).rem_euclid(q)) as usize]
        } else {
            self.core[(n - self.core_start) as usize]
        }
    }

    fn all_stored(&self) -> impl Iterator<Item = f64> + '_ {
        self.core
            .iter()
            .chain(&self.left_period)
            .chain(&self.right_period)
            .map(|w| w.abs())
    }

    /// `inf |w_n|`.
    pub fn w_min(&self) -> f64 {
        self.all_stored().fold(f64::INFINITY, f64::min)
    }

    /// `sup |w_n|`, the operator norm of the backward shift on c0 and ℓp.
    pub fn w_max(&self) -> f64 {
        self.all_stored().fold(0.0, f64::max)
    }

    /// `w(a) ⋯ w(b)`; fails when `a > b`.
    pub fn product(&self, a: i64, b: i64) -> Result<WeightProduct> {
        if a > b {
            return Err(Error::InvalidRange { a, b });
        }
        Ok(self.range_product(a, b))
    }

    /// Like [`product`](Self::product) but an empty range (`a > b`) yields 1.
    pub fn range_product(&self, a: i64, b: i64) -> WeightProduct {
        if a > b {
            return WeightProduct::ONE;
        }
        let start = self.core_start;
        let end = self.core_end();
        let mut acc = WeightProduct::ONE;
        if a < start {
            acc = acc.mul(self.periodic_block(&self.left_period, a, b.min(start - 1)));
        }
        let lo = a.max(start);
        let hi = b.min(end - 1);
        for n in lo..=hi {
            acc = acc.mul_scalar(self.core[(n - start) as usize]);
        }
        if b >= end {
            acc = acc.mul(self.periodic_block(&self.right_period, a.max(end), b));
        }
        acc
    }

    // Any `q` consecutive entries of a periodic tail multiply to the same value,
    // so a block is a power of the period product times a short remainder.
    fn periodic_block(&self, period: &[f64], lo: i64, hi: i64) -> WeightProduct {
        let q = period.len() as i64;
        let len = hi - lo + 1;
        let full = len / q;
        let period_product = period
            .iter()
            .fold(WeightProduct::ONE, |p, &w| p.mul_scalar(w));
        let mut acc = period_product.powu(full as u64);
        for n in (lo + full * q)..=hi {
            acc = acc.mul_scalar(self.weight_at(n));
        }
        acc
    }

    pub fn rates(&self) -> RateSummary {
        let ln_mean = |p: &[f64]| p.iter().map(|w| w.abs().ln()).sum::<f64>() / p.len() as f64;
        let ln_left = ln_mean(&self.left_period);
        let ln_right = ln_mean(&self.right_period);
        RateSummary {
            r_left: ln_left.exp(),
            r_right: ln_right.exp(),
            ln_left,
            ln_right,
        }
    }

    /// Supremum over windows `[a, b]` with `a ≥ a_min`, `b ≤ b_max` and length
    /// `n = b - a + 1 ≥ min_len` of
    ///
    /// `sign · ln|w(a)⋯w(b)| − n · ln_t`,
    ///
    /// taken over all of ℤ. An empty window (allowed when `min_len == 0`)
    /// contributes 0. Returns `None` when the supremum is infinite, i.e. when
    /// an unconstrained end of the window can run into a tail whose per-step
    /// drift is positive.
    pub fn window_sup(
        &self,
        sign: f64,
        ln_t: f64,
        a_min: Option<i64>,
        b_max: Option<i64>,
        min_len: u64,
    ) -> Option<f64> {
        let ql = self.left_period.len() as i64;
        let qr = self.right_period.len() as i64;
        let rates = self.rates();
        if a_min.is_none() && (sign * rates.ln_left - ln_t) * ql as f64 > RATE_TOLERANCE {
            return None;
        }
        if b_max.is_none() && (sign * rates.ln_right - ln_t) * qr as f64 > RATE_TOLERANCE {
            return None;
        }
        // Outside this box a window can be shortened by a full period (drift ≤ 0)
        // or translated by a period without changing its value.
        let mut anchors = vec![self.core_start, self.core_end()];
        anchors.extend(a_min);
        anchors.extend(b_max);
        let lo = anchors.iter().min().unwrap() - 2 * ql - 2;
        let hi = anchors.iter().max().unwrap() + 2 * qr + 2;
        let a_lo = a_min.map_or(lo, |a| a.max(lo));
        let b_hi = b_max.map_or(hi, |b| b.min(hi));

        let mut best = if min_len == 0 { Some(0.0) } else { None };
        if a_lo > b_hi {
            return best.or(Some(f64::NEG_INFINITY));
        }
        // g[i] = sign·Σ_{n=a_lo}^{a_lo+i-1} ln|w(n)| − i·ln_t, window [a, b] ↦ g[b+1-a_lo] − g[a-a_lo].
        let size = (b_hi - a_lo + 1) as usize;
        let mut g = Vec::with_capacity(size + 1);
        g.push(0.0);
        for (i, n) in (a_lo..=b_hi).enumerate() {
            g.push(g[i] + sign * self.weight_at(n).abs().ln() - ln_t);
        }
        let mut suffix_max = vec![f64::NEG_INFINITY; size + 2];
        for i in (1..=size).rev() {
            suffix_max[i] = suffix_max[i + 1].max(g[i]);
        }
        let min_len = min_len.max(1) as usize;
        for start in 0..size {
            let first_end = start + min_len;
            if first_end > size {
                break;
            }
            let candidate = suffix_max[first_end] - g[start];
            best = Some(best.map_or(candidate, |b: f64| b.max(candidate)));
        }
        best.or(Some(f64::NEG_INFINITY))
    }
}

/// Per-side asymptotic growth rates of weight products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    /// `|Π left_period|^{1/q_L}`
    pub r_left: f64,
    /// `|Π right_period|^{1/q_R}`
    pub r_right: f64,
    pub ln_left: f64,
    pub ln_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClass {
    Contracting,
    Neutral,
    Expanding,
}

impl RateClass {
    pub fn of_ln(ln_rate: f64) -> Self {
        if ln_rate.abs() <= RATE_TOLERANCE {
            RateClass::Neutral
        } else if ln_rate < 0.0 {
            RateClass::Contracting
        } else {
            RateClass::Expanding
        }
    }
}

impl RateSummary {
    pub fn left_class(&self) -> RateClass {
        RateClass::of_ln(self.ln_left)
    }

    pub fn right_class(&self) -> RateClass {
        RateClass::of_ln(self.ln_right)
    }
}
