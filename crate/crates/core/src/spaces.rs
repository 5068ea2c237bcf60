//! Finitely supported bilateral sequences, the norms of c0, ℓp and Köthe
//! spaces on a finite window, and the action of the weighted backward shift.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::WeightSpec;

/// Entries with magnitude below this are dropped from a [`SeqVector`].
pub const DROP_THRESHOLD: f64 = 1e-300;

/// A finitely supported sequence `ℤ → ℝ`. No stored value is zero.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, f64)>", into = "Vec<(i64, f64)>")]
pub struct SeqVector {
    entries: BTreeMap<i64, f64>,
}

impl TryFrom<Vec<(i64, f64)>> for SeqVector {
    type Error = Error;

    fn try_from(pairs: Vec<(i64, f64)>) -> Result<Self> {
        SeqVector::from_pairs(pairs)
    }
}

impl From<SeqVector> for Vec<(i64, f64)> {
    fn from(v: SeqVector) -> Self {
        v.entries.into_iter().collect()
    }
}

impl SeqVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs; indices must be distinct
    /// and values finite. Negligible values are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, v) in pairs {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite value {v} at index {i}"
                )));
            }
            if entries.contains_key(&i) {
                return Err(Error::InvalidParameter(format!("duplicate index {i}")));
            }
            if v.abs() >= DROP_THRESHOLD {
                entries.insert(i, v);
            }
        }
        Ok(SeqVector { entries })
    }

    /// Infallible constructor for internally produced entries: drops
    /// negligible values, keeps the last value on duplicate indices.
    pub(crate) fn collect(pairs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        SeqVector {
            entries: pairs
                .into_iter()
                .filter(|(_, v)| v.abs() >= DROP_THRESHOLD)
                .collect(),
        }
    }

    pub fn get(&self, i: i64) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + Clone + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest and largest index of the support.
    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        Some((
            *self.entries.keys().next()?,
            *self.entries.keys().next_back()?,
        ))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::collect(self.iter().map(|(i, v)| (i, c * v)))
    }

    pub fn add(&self, other: &SeqVector) -> Self {
        let mut entries = self.entries.clone();
        for (i, v) in other.iter() {
            *entries.entry(i).or_insert(0.0) += v;
        }
        Self::collect(entries)
    }

    pub fn sub(&self, other: &SeqVector) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// `x|_I`, the restriction to the indices accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self::collect(self.iter().filter(|&(i, _)| keep(i)))
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `e_n`.
pub fn basis(n: i64) -> SeqVector {
    SeqVector::collect([(n, 1.0)])
}

/// A Köthe matrix `a_{j,k} ≥ 0`, nondecreasing in the level `k`, stored for
/// `j` in a finite window and levels `1..=levels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKoetheMatrix")]
pub struct KoetheMatrix {
    j_lo: i64,
    j_hi: i64,
    levels: usize,
    /// Row-major: `table[(j - j_lo) * levels + (k - 1)]`.
    table: Vec<f64>,
}

#[derive(Deserialize)]
struct RawKoetheMatrix {
    j_lo: i64,
    j_hi: i64,
    levels: usize,
    table: Vec<f64>,
}

impl TryFrom<RawKoetheMatrix> for KoetheMatrix {
    type Error = Error;

    fn try_from(raw: RawKoetheMatrix) -> Result<Self> {
        KoetheMatrix::new(raw.j_lo, raw.j_hi, raw.levels, raw.table)
    }
}

impl KoetheMatrix {
    pub fn new(j_lo: i64, j_hi: i64, levels: usize, table: Vec<f64>) -> Result<Self> {
        if j_lo > j_hi || levels == 0 {
            return Err(Error::InvalidParameter(
                "Köthe matrix needs a nonempty window and at least one level".into(),
            ));
        }
        let rows = (j_hi - j_lo + 1) as usize;
        if table.len() != rows * levels {
            return Err(Error::InvalidParameter(format!(
                "Köthe table has {} entries, expected {rows} × {levels}",
                table.len()
            )));
        }
        for (r, row) in table.chunks(levels).enumerate() {
            let j = j_lo + r as i64;
            if row.iter().any(|a| !a.is_finite() || *a < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "row {j} has a negative or non-finite entry"
                )));
            }
            if row.windows(2).any(|p| p[0] > p[1]) {
                return Err(Error::InvalidParameter(format!(
                    "row {j} is not nondecreasing in the level"
                )));
            }
            if row.iter().all(|a| *a == 0.0) {
                return Err(Error::InvalidParameter(format!("row {j} is identically zero")));
            }
        }
        Ok(KoetheMatrix {
            j_lo,
            j_hi,
            levels,
            table,
        })
    }

    /// Builds a matrix by evaluating `f(j, k)`.
    pub fn from_fn(j_lo: i64, j_hi: i64, levels: usize, f: impl Fn(i64, usize) -> f64) -> Result<Self> {
        let table = (j_lo..=j_hi)
            .flat_map(|j| (1..=levels).map(move |k| (j, k)))
            .map(|(j, k)| f(j, k))
            .collect();
        Self::new(j_lo, j_hi, levels, table)
    }

    pub fn window(&self) -> (i64, i64) {
        (self.j_lo, self.j_hi)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn contains(&self, j: i64) -> bool {
        (self.j_lo..=self.j_hi).contains(&j)
    }

    /// `a_{j,k}`.
    pub fn get(&self, j: i64, k: usize) -> Result<f64> {
        if !self.contains(j) {
            return Err(Error::OutOfWindow {
                index: j,
                lo: self.j_lo,
                hi: self.j_hi,
            });
        }
        if k == 0 || k > self.levels {
            return Err(Error::InvalidParameter(format!(
                "level {k} outside 1..={}",
                self.levels
            )));
        }
        Ok(self.table[(j - self.j_lo) as usize * self.levels + (k - 1)])
    }
}

/// The norm of the ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceNorm {
    /// c0 with the sup norm.
    Sup,
    /// ℓp, `1 ≤ p < ∞`.
    Lp { p: f64 },
    /// `‖x‖_k = (Σ |x_j a_{j,k}|^p)^{1/p}`, or `sup_j |x_j a_{j,k}|` when `p` is absent.
    Koethe {
        matrix: KoetheMatrix,
        level: usize,
        p: Option<f64>,
    },
}

impl SpaceNorm {
    pub fn lp(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(SpaceNorm::Lp { p })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceNorm::Sup => Ok(()),
            SpaceNorm::Lp { p } => check_exponent(*p),
            SpaceNorm::Koethe { matrix, level, p } => {
                if let Some(p) = p {
                    check_exponent(*p)?;
                }
                if *level == 0 || *level > matrix.levels() {
                    return Err(Error::InvalidParameter(format!("Köthe level {level} out of range")));
                }
                Ok(())
            }
        }
    }

    /// True for c0 and ℓp, where every `e_n` has norm 1.
    pub fn is_unit_basis(&self) -> bool {
        matches!(self, SpaceNorm::Sup | SpaceNorm::Lp { .. })
    }

    pub fn norm(&self, x: &SeqVector) -> Result<f64> {
        match self {
            SpaceNorm::Sup => Ok(x.sup_norm()),
            SpaceNorm::Lp { p } => Ok(lp_norm(x.iter().map(|(_, v)| v), *p)),
            SpaceNorm::Koethe { matrix, level, p } => {
                let scaled = x
                    .iter()
                    .map(|(j, v)| Ok(v * matrix.get(j, *level)?))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(match p {
                    Some(p) => lp_norm(scaled.into_iter(), *p),
                    None => scaled.iter().fold(0.0, |m, v| m.max(v.abs())),
                })
            }
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("ℓp exponent must satisfy 1 ≤ p < ∞, got {p}")))
    }
}

fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    if p == 1.0 {
        return values.map(f64::abs).sum();
    }
    let scale = values.clone().fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.map(|v| (v.abs() / scale).powf(p)).sum();
    scale * sum.powf(1.0 / p)
}

/// `(B_w x)(n) = w(n+1) x(n+1)`.
pub fn apply_backward(spec: &WeightSpec, x: &SeqVector) -> SeqVector {
    SeqVector::collect(x.iter().map(|(m, v)| (m - 1, spec.weight_at(m) * v)))
}

/// `B_w^{-1} = F_u` with `u(n) = 1 / w(n+1)`.
pub fn apply_backward_inverse(spec: &WeightSpec, x: &SeqVector) -> SeqVector {
    SeqVector::collect(x.iter().map(|(m, v)| (m + 1, v / spec.weight_at(m + 1))))
}

/// `B_w^n x` for any integer `n`, using one weight product per entry.
pub fn iterate(spec: &WeightSpec, x: &SeqVector, n: i64) -> SeqVector {
    if n == 0 {
        return x.clone();
    }
    SeqVector::collect(x.iter().map(|(m, v)| {
        if n > 0 {
            (m - n, spec.range_product(m - n + 1, m).scale(v))
        } else {
            let k = -n;
            (m + k, spec.range_product(m + 1, m + k).recip().scale(v))
        }
    }))
}

/// `P_{A,k}`: keeps the entries whose index lies in `A + kℤ`.
pub fn project_residue(x: &SeqVector, residues: &[i64], k: i64) -> Result<SeqVector> {
    if k < 1 {
        return Err(Error::InvalidParameter(format!("modulus must be ≥ 1, got {k}")));
    }
    let classes: BTreeSet<i64> = residues.iter().map(|a| a.rem_euclid(k)).collect();
    Ok(x.restrict(|i| classes.contains(&i.rem_euclid(k))))
}
