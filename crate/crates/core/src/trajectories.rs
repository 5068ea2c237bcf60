//! Finite pseudotrajectories of `B_w` and the explicit constructions built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{apply_backward, apply_backward_inverse, basis, iterate, SeqVector, SpaceNorm};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pseudotrajectory {
    pub points: Vec<SeqVector>,
    /// Claimed bound on every step defect `‖B_w x_j − x_{j+1}‖`.
    pub delta: f64,
    pub space: SpaceNorm,
    /// Set when the last point repeats the first.
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub max_defect: f64,
    pub defects: Vec<f64>,
}

impl Validation {
    /// Every step defect is strictly below `delta`.
    pub fn within(&self, delta: f64) -> bool {
        self.max_defect < delta
    }
}

impl Pseudotrajectory {
    pub fn new(points: Vec<SeqVector>, delta: f64, space: SpaceNorm, periodic: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a pseudotrajectory needs at least two points".into()));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
        }
        space.validate()?;
        if periodic && points.first() != points.last() {
            return Err(Error::InvalidParameter(
                "periodic pseudotrajectory must end where it starts".into(),
            ));
        }
        Ok(Pseudotrajectory {
            points,
            delta,
            space,
            periodic,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest norm among the points.
    pub fn max_norm(&self) -> Result<f64> {
        self.points
            .iter()
            .try_fold(0.0f64, |m, x| Ok(m.max(self.space.norm(x)?)))
    }
}

/// `‖B_w x_j − x_{j+1}‖` for every step, in the trajectory's own norm.
pub fn validate(traj: &Pseudotrajectory, spec: &WeightSpec) -> Result<Validation> {
    let defects = traj
        .points
        .windows(2)
        .map(|p| traj.space.norm(&apply_backward(spec, &p[0]).sub(&p[1])))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Validation {
        max_defect: defects.iter().copied().fold(0.0, f64::max),
        defects,
    })
}

/// `x_j = y|_{[m+1−j, m+1]}` with `y(i) = ε 2^{−|i|}`, the fixed point of the
/// shift with weights `1/2` at and left of 0 and `2` to the right. Each step
/// misses `y(m+1) e_{m+1}`, so every defect is `ε 2^{−m−1}`; the claimed bound
/// is twice that.
pub fn gen_genhyp(eps: f64, m: i64, length: usize) -> Result<Pseudotrajectory> {
    if length < 2 {
        return Err(Error::InvalidParameter("length must be ≥ 2".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let y = |i: i64| eps * 2f64.powi(-(i.abs().min(2000) as i32));
    let points = (0..length as i64)
        .map(|j| SeqVector::collect((m + 1 - j..=m + 1).map(|i| (i, y(i)))))
        .collect();
    Pseudotrajectory::new(points, 2.0 * y(m + 1), SpaceNorm::Sup, false)
}

/// `0, δe_{−1}, 2δe_{−2}, …, nδe_{−n}, (n−1)δe_{−n−1}, …, δe_{−2n+1}, 0`.
pub fn gen_ramp(delta: f64, n: u64) -> Result<Pseudotrajectory> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be ≥ 1".into()));
    }
    let n = n as i64;
    let mut points = vec![SeqVector::zero()];
    for j in 1..=n {
        points.push(basis(-j).scaled(j as f64 * delta));
    }
    for j in 1..n {
        points.push(basis(-n - j).scaled((n - j) as f64 * delta));
    }
    points.push(SeqVector::zero());
    Pseudotrajectory::new(points, delta, SpaceNorm::Sup, true)
}

/// `S_δ x = (1 − δ/‖x‖) x`, with `S_δ 0 = 0`.
pub fn s_delta(x: &SeqVector, delta: f64, space: &SpaceNorm) -> Result<SeqVector> {
    let norm = space.norm(x)?;
    if norm == 0.0 {
        return Ok(SeqVector::zero());
    }
    Ok(x.scaled(1.0 - delta / norm))
}

/// The closed chain through `ε e_l`:
///
/// `x_0 = 0`, `x_i = (B^{−1} S_δ)^{m−l+1−i} ε e_l` for `1 ≤ i ≤ m−l+1`,
/// `x_{m−l+1+t} = (S_δ B)^t ε e_l` for `1 ≤ t ≤ l−k`, `x_{m−k+2} = 0`.
///
/// Interior defects are exactly `δ`; the first and last defects are the
/// quantities `a` and `b` of the triple criterion as long as every
/// intermediate point has norm at least `δ`.
pub fn gen_sdelta_bridge(spec: &WeightSpec, eps: f64, delta: f64, k: i64, l: i64, m: i64) -> Result<Pseudotrajectory> {
    if !(k <= l && l <= m) {
        return Err(Error::InvalidParameter(format!("need k ≤ l ≤ m, got ({k}, {l}, {m})")));
    }
    if !(delta > 0.0 && eps > delta) {
        return Err(Error::Precondition(format!("need ε > δ > 0, got ε = {eps}, δ = {delta}")));
    }
    let space = SpaceNorm::Sup;
    let peak = basis(l).scaled(eps);
    let mut left = vec![peak.clone()];
    for _ in l..m {
        let next = apply_backward_inverse(spec, &s_delta(left.last().unwrap(), delta, &space)?);
        left.push(next);
    }
    let mut points = vec![SeqVector::zero()];
    points.extend(left.into_iter().rev());
    let mut z = peak;
    for _ in k..l {
        z = s_delta(&apply_backward(spec, &z), delta, &space)?;
        points.push(z.clone());
    }
    points.push(SeqVector::zero());
    Pseudotrajectory::new(points, delta, space, true)
}

/// `y_i = (1 − δ/‖y_{i−1}‖) B^{−1} y_{i−1}`, stopping after the first `y_i`
/// that is zero or has norm below `δ`, or after `max_steps` steps.
pub fn renormalized_pullback_orbit(
    spec: &WeightSpec,
    y0: &SeqVector,
    delta: f64,
    max_steps: usize,
    space: &SpaceNorm,
) -> Result<Vec<SeqVector>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
    }
    let mut orbit = vec![y0.clone()];
    for _ in 0..max_steps {
        let y = orbit.last().unwrap();
        let norm = space.norm(y)?;
        if norm == 0.0 || norm < delta {
            break;
        }
        let next = apply_backward_inverse(spec, y).scaled(1.0 - delta / norm);
        orbit.push(next);
    }
    Ok(orbit)
}

/// Result of [`close_to_zero`]: the new trajectory and where the input sits inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedToZero {
    pub trajectory: Pseudotrajectory,
    pub eta: f64,
    pub n: u64,
    /// Index of the first input point; the whole input follows contiguously.
    pub offset: usize,
}

const ETA_LEVELS: i32 = 40;
const MAX_POWER: u64 = 1 << 20;

/// Turns a periodic pseudotrajectory `x_0, …, x_{k−1}, x_0` into one that starts
/// and ends at 0 by damping copies of the loop geometrically:
///
/// `0, ηⁿ x_0, …, ηⁿ x_{k−1}, …, η x_{k−1}, x_0, …, x_{k−1}, x_0, …, x_{k−1}, η x_0, …, ηⁿ x_{k−1}, 0`.
pub fn close_to_zero(traj: &Pseudotrajectory, spec: &WeightSpec, delta: f64) -> Result<ClosedToZero> {
    if !traj.periodic {
        return Err(Error::Precondition("input must be periodic".into()));
    }
    let check = validate(traj, spec)?;
    if !check.within(delta) {
        return Err(Error::Precondition(format!(
            "input has defect {} ≥ δ = {delta}",
            check.max_defect
        )));
    }
    let space = &traj.space;
    let cycle = &traj.points[..traj.points.len() - 1];
    let first = &cycle[0];
    let tail_image = apply_backward(spec, cycle.last().unwrap());

    let mut eta = None;
    for j in 1..=ETA_LEVELS {
        let e = 1.0 - 2f64.powi(-j);
        let up = space.norm(&tail_image.sub(&first.scaled(1.0 / e)))?;
        let down = space.norm(&tail_image.sub(&first.scaled(e)))?;
        if up < delta && down < delta {
            eta = Some(e);
            break;
        }
    }
    let eta = eta.ok_or_else(|| Error::SearchExhausted("no admissible η".into()))?;

    let mut n = 1u64;
    loop {
        let damp = eta.powf(n as f64);
        if space.norm(&first.scaled(damp))? < delta && space.norm(&tail_image.scaled(damp))? < delta {
            break;
        }
        if n >= MAX_POWER {
            return Err(Error::SearchExhausted(format!("no admissible power up to {MAX_POWER}")));
        }
        n *= 2;
    }

    let block = |p: u64| cycle.iter().map(move |x| x.scaled(eta.powf(p as f64)));
    let mut points = vec![SeqVector::zero()];
    for p in (1..=n).rev() {
        points.extend(block(p));
    }
    let offset = points.len();
    points.extend(cycle.iter().cloned());
    points.extend(cycle.iter().cloned());
    for p in 1..=n {
        points.extend(block(p));
    }
    points.push(SeqVector::zero());
    let out = Pseudotrajectory::new(points, delta, space.clone(), true)?;
    let check = validate(&out, spec)?;
    if !check.within(delta) {
        return Err(Error::SearchExhausted(format!(
            "closed trajectory has defect {} ≥ δ = {delta}",
            check.max_defect
        )));
    }
    Ok(ClosedToZero {
        trajectory: out,
        eta,
        n,
        offset,
    })
}

/// Closes a finite `δ`-pseudotrajectory `x_0, …, x_k` into a periodic one using
/// periodic points `y_1, …, y_k` with `‖y_m − x_{m−1}‖ < δ_1` and
/// `‖B y_m − x_m‖ < δ`, where `δ_1 = δ · max(1, sup|w|)`:
///
/// `x_0, …, x_k, B² y_k, …, B^{p_k−1} y_k, x_{k−1}, B² y_{k−1}, …, x_0`.
///
/// Periods 1 and 2 are replaced by 4. The output is validated at `δ_1`.
pub fn splice_with_periodic(
    traj: &Pseudotrajectory,
    spec: &WeightSpec,
    delta: f64,
    periodic_points: &[(SeqVector, u64)],
) -> Result<Pseudotrajectory> {
    let k = traj.points.len() - 1;
    if periodic_points.len() != k {
        return Err(Error::InvalidParameter(format!(
            "need {k} periodic points, got {}",
            periodic_points.len()
        )));
    }
    let space = &traj.space;
    if !validate(traj, spec)?.within(delta) {
        return Err(Error::Precondition(format!("input is not a {delta}-pseudotrajectory")));
    }
    let delta1 = delta * spec.w_max().max(1.0);
    let x = &traj.points;
    for (idx, (y, p)) in periodic_points.iter().enumerate() {
        let m = idx + 1;
        if *p == 0 {
            return Err(Error::InvalidParameter("period must be ≥ 1".into()));
        }
        if space.norm(&y.sub(&x[m - 1]))? >= delta1 {
            return Err(Error::Precondition(format!("y_{m} is not within δ_1 of x_{}", m - 1)));
        }
        if space.norm(&apply_backward(spec, y).sub(&x[m]))? >= delta {
            return Err(Error::Precondition(format!("B y_{m} is not within δ of x_{m}")));
        }
    }
    let mut points = x.clone();
    for m in (1..=k).rev() {
        let (y, p) = &periodic_points[m - 1];
        let p = if *p <= 2 { 4 } else { *p };
        for i in 2..p {
            points.push(iterate(spec, y, i as i64));
        }
        points.push(x[m - 1].clone());
    }
    let out = Pseudotrajectory::new(points, delta1, space.clone(), true)?;
    let check = validate(&out, spec)?;
    if !check.within(delta1) {
        return Err(Error::Precondition(format!(
            "spliced trajectory has defect {} ≥ δ_1 = {delta1}; periodic points too inexact",
            check.max_defect
        )));
    }
    Ok(out)
}
