//! Acceptance suite. Prints one line per criterion and exits nonzero when a
//! criterion outside `KNOWN_RED` fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wshift::criteria::{
    chain_recurrence_trivial, default_grid, koethe_ute_check, periodic_point_exists, psp_quantities, psp_search,
    shadowing_criterion, ute_classify, ute_numeric_check, Decomposition, Evidence, Reason, Schedule,
    DEFAULT_N_MAX, DEFAULT_WINDOW,
};
use wshift::repro::{hyperbolic_spec, trivcr_spec};
use wshift::solver::{brute_force_shadow, finite_shadow_solve, ShadowMode, ShadowOutcome};
use wshift::trajectories::{close_to_zero, gen_genhyp, gen_ramp, gen_sdelta_bridge, validate};
use wshift::{basis, KoetheMatrix, Pseudotrajectory, SeqVector, SpaceNorm, WeightSpec};

const SEED: u64 = 0x5eed_2024;

/// Criteria expected to fail as specified; see the decisions ledger.
const KNOWN_RED: &[&str] = &["2d"];

const GENHYP_DEFECT: f64 = 0.0625;
const SHADOW_MATCH_TOL: f64 = 1e-9;
/// Ramp defects equal δ up to rounding.
const RAMP_DEFECT_TOL: f64 = 1e-12;
const PSP_LEVELS: u32 = 12;
const MIN_IMPLICATION_SPECS: usize = 500;
const MIN_SOLVER_INSTANCES: usize = 200;
const BRUTE_GRID_STEP: f64 = 1e-2;
const MIN_UTE_SPECS: usize = 200;
const CONSTRUCTIONS: usize = 100;
const BRIDGE_TOL: f64 = 1e-10;
const KOETHE_SPECS: usize = 50;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: &'static str, limit: Option<Duration>, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (pass, mut detail) = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    if let Some(l) = limit {
        detail.push_str(&format!("; limit {:.0} s", l.as_secs_f64()));
    }
    Line {
        id,
        pass: pass && in_time,
        detail,
        elapsed,
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

// 1: generalized hyperbolic spec without bounded-support shadowing.

fn c1a() -> (bool, String) {
    let traj = gen_genhyp(1.0, 3, 20).unwrap();
    let v = validate(&traj, &hyperbolic_spec()).unwrap();
    let exact = v.defects.iter().all(|&d| d == GENHYP_DEFECT);
    (exact, format!("{} defects, max {}, all exactly 2^-4: {exact}", v.defects.len(), v.max_defect))
}

fn c1b() -> (bool, String) {
    let traj = gen_genhyp(1.0, 3, 20).unwrap();
    let mut ok = true;
    let mut coords = Vec::new();
    for bound in 5..=12 {
        let r = finite_shadow_solve(&traj, &hyperbolic_spec(), 1.0, ShadowMode::SupportBounded { bound }).unwrap();
        match r.outcome {
            ShadowOutcome::Infeasible { coordinate, .. } => {
                ok &= coordinate > 4;
                coords.push(coordinate);
            }
            _ => ok = false,
        }
    }
    (ok, format!("conflict coordinates for M = 5..=12: {coords:?}"))
}

fn c1c() -> (bool, String) {
    let traj = gen_genhyp(1.0, 3, 20).unwrap();
    let r = finite_shadow_solve(&traj, &hyperbolic_spec(), 1.0, ShadowMode::Unrestricted).unwrap();
    let ShadowOutcome::Feasible { shadow, error, constrained } = r.outcome else {
        return (false, format!("not feasible: {:?}", r.outcome));
    };
    let dev = constrained
        .iter()
        .map(|&i| (shadow.get(i) - 2f64.powi(-(i.abs() as i32))).abs())
        .fold(0.0, f64::max);
    (
        dev <= SHADOW_MATCH_TOL,
        format!("error {error}, max |x(i) - 2^-|i|| = {dev:e} on {} coordinates", constrained.len()),
    )
}

// 2: trivial chain recurrent set without the periodic shadowing property.

fn c2a() -> (bool, String) {
    let v = chain_recurrence_trivial(&trivcr_spec());
    let Evidence::Series(s) = &v.evidence else {
        return (false, "no series evidence".into());
    };
    let exact = s
        .right_partial_sums
        .iter()
        .enumerate()
        .all(|(n, &sum)| sum == 1.0 - 2f64.powi(-(n as i32 + 1)));
    let ok = v.holds() && v.reason == Reason::IIIB && exact;
    (ok, format!("{:?} via {:?}, {} partial sums exact: {exact}", v.status, v.reason, s.right_partial_sums.len()))
}

fn c2b() -> (bool, String) {
    let v = periodic_point_exists(&trivcr_spec());
    (v.fails(), format!("{:?} ({:?})", v.status, v.reason))
}

fn c2c() -> (bool, String) {
    let traj = gen_ramp(0.1, 11).unwrap();
    let v = validate(&traj, &trivcr_spec()).unwrap();
    let norm = traj.max_norm().unwrap();
    let ok = traj.len() == 23 && v.max_defect <= 0.1 + RAMP_DEFECT_TOL && norm == 11.0 * 0.1 && norm > 1.0;
    (ok, format!("{} points, max defect {}, max norm {norm}", traj.len(), v.max_defect))
}

fn c2d(window: (i64, i64)) -> (bool, String) {
    let grid = default_grid(1.0, PSP_LEVELS);
    let r = psp_search(&trivcr_spec(), 1.0, window, &grid).unwrap();
    match (&r.delta, &r.verdict.evidence) {
        (None, Evidence::TripleSearch { per_delta }) => {
            let ok = per_delta.len() == grid.len()
                && per_delta
                    .iter()
                    .all(|(d, w)| w.as_ref().is_some_and(|w| w.a < *d && w.b < *d));
            (ok, format!("window {window:?}: witness triples for all {} grid values", per_delta.len()))
        }
        (Some(d), _) => (false, format!("window {window:?}: no witness triple at δ = {d}")),
        (None, e) => (false, format!("unexpected evidence {e:?}")),
    }
}

// 3: iA/iB ⇒ window PSP ⇒ iiiA/iiiB on specs without nontrivial periodic points.

fn c3() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(SEED ^ 3);
    let grid = default_grid(1.0, PSP_LEVELS);
    let (mut n, mut uniform, mut psp_clean, mut violations) = (0, 0, 0, 0);
    while n < MIN_IMPLICATION_SPECS {
        let spec = common::separated_spec(&mut rng, 0.25, 4.0, 0.05);
        if !periodic_point_exists(&spec).fails() {
            continue;
        }
        n += 1;
        let sh = shadowing_criterion(&spec);
        let is_uniform = sh.holds() && matches!(sh.reason, Reason::IA | Reason::IB);
        let clean = psp_search(&spec, 1.0, DEFAULT_WINDOW, &grid).unwrap().delta.is_some();
        let cr = chain_recurrence_trivial(&spec).holds();
        uniform += is_uniform as usize;
        psp_clean += clean as usize;
        if (is_uniform && !clean) || (clean && !cr) {
            violations += 1;
        }
    }
    (
        violations == 0,
        format!("{n} specs, {uniform} uniform, {psp_clean} window-PSP, {violations} violations"),
    )
}

// 4: exact solver against the grid oracle.

fn tiny_instance(rng: &mut StdRng) -> (WeightSpec, Pseudotrajectory, f64) {
    let spec = common::spec(rng, 0.9, 1.1, true);
    let len = rng.gen_range(2..=5);
    let points = (0..len as i64)
        .map(|j| {
            let k = rng.gen_range(1..=3);
            let pairs: BTreeMap<i64, f64> =
                (0..k).map(|_| (rng.gen_range(-j..=8 - j), rng.gen_range(-1.0..=1.0))).collect();
            SeqVector::from_pairs(pairs).unwrap()
        })
        .collect();
    let traj = Pseudotrajectory::new(points, 1.0, SpaceNorm::Sup, false).unwrap();
    (spec, traj, rng.gen_range(0.05..=1.0))
}

fn c4() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let (mut feasible, mut exempt, mut mismatches) = (0, 0, Vec::new());
    for idx in 0..MIN_SOLVER_INSTANCES {
        let (spec, traj, eps) = tiny_instance(&mut rng);
        let exact = finite_shadow_solve(&traj, &spec, eps, ShadowMode::Unrestricted).unwrap();
        let brute = brute_force_shadow(&traj, &spec, eps, (0, 8), BRUTE_GRID_STEP).unwrap();
        if (brute.best_error - eps).abs() <= 2.0 * BRUTE_GRID_STEP {
            exempt += 1;
            continue;
        }
        feasible += exact.is_feasible() as usize;
        if exact.is_feasible() != brute.feasible {
            mismatches.push(idx);
        }
    }
    (
        mismatches.is_empty(),
        format!(
            "{MIN_SOLVER_INSTANCES} instances, {feasible} feasible, {exempt} boundary-exempt, mismatches {mismatches:?}"
        ),
    )
}

// 5: rate classification against the numeric envelope.

const FALLBACK_SCHEDULE: Schedule = Schedule::Geometric { c: 1e-3, rho: 1.01 };

fn c5() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(SEED ^ 5);
    let (mut holds, mut mismatches) = (0, 0);
    for _ in 0..MIN_UTE_SPECS {
        let spec = common::separated_spec(&mut rng, 0.25, 4.0, 0.05);
        let u = ute_classify(&spec, &SpaceNorm::Sup).unwrap();
        let schedule = u.schedule.unwrap_or(FALLBACK_SCHEDULE);
        let candidates = [
            Decomposition::AllPlus,
            Decomposition::AllMinus,
            Decomposition::split(spec.core_end() - 1),
        ];
        let numeric = candidates.iter().any(|d| {
            ute_numeric_check(&spec, d, DEFAULT_WINDOW, DEFAULT_N_MAX, &schedule)
                .unwrap()
                .pass
        });
        holds += u.verdict.holds() as usize;
        mismatches += (u.verdict.holds() != numeric) as usize;
    }

    let two = ute_classify(&WeightSpec::constant(2.0).unwrap(), &SpaceNorm::Sup).unwrap();
    let exact = two.verdict.holds()
        && two.verdict.evidence == Evidence::Decomposition(Decomposition::AllPlus)
        && two.envelope.as_ref().is_some_and(|e| {
            e.envelope_plus
                .iter()
                .enumerate()
                .all(|(n, v)| *v == Some(2f64.powi(n as i32 + 1)))
        });

    let neutral = WeightSpec::step(1.0, 2.0, 0).unwrap();
    let nu = ute_classify(&neutral, &SpaceNorm::Sup).unwrap();
    let env = ute_numeric_check(
        &neutral,
        &Decomposition::AllPlus,
        DEFAULT_WINDOW,
        DEFAULT_N_MAX,
        &Schedule::Geometric { c: 0.5, rho: 2f64.sqrt() },
    )
    .unwrap();
    let far_left = !nu.verdict.holds() && !env.pass && env.worst_index == Some(DEFAULT_WINDOW.0);

    (
        mismatches == 0 && exact && far_left,
        format!(
            "{MIN_UTE_SPECS} specs, {holds} UTE, {mismatches} mismatches; w≡2 exact 2^n: {exact}; \
             left 1 / right 2 fails with worst index {:?}",
            env.worst_index
        ),
    )
}

// 6: constructions.

fn small_vector(rng: &mut StdRng, norm: f64) -> SeqVector {
    let k = rng.gen_range(1..=3);
    let pairs: BTreeMap<i64, f64> = (0..k).map(|_| (rng.gen_range(-5..=5), rng.gen_range(-1.0..=1.0))).collect();
    let v = SeqVector::from_pairs(pairs).unwrap();
    let s = v.sup_norm();
    if s == 0.0 {
        basis(0).scaled(norm)
    } else {
        v.scaled(norm / s)
    }
}

fn periodic_instance(rng: &mut StdRng, kind: usize) -> (WeightSpec, Pseudotrajectory, f64) {
    match kind {
        0 => {
            let spec = common::spec(rng, 0.25, 4.0, true);
            let delta = rng.gen_range(0.05..=1.0);
            let r = delta / (2.0 * (spec.w_max() + 2.0));
            let mut cycle: Vec<SeqVector> = (0..rng.gen_range(2..=5)).map(|_| small_vector(rng, r)).collect();
            cycle.push(cycle[0].clone());
            (spec, Pseudotrajectory::new(cycle, delta, SpaceNorm::Sup, true).unwrap(), delta)
        }
        1 => {
            let d = rng.gen_range(0.05..=0.3);
            let traj = gen_ramp(d, rng.gen_range(1..=12)).unwrap();
            (trivcr_spec(), traj, 1.5 * d)
        }
        _ => loop {
            if let Some((spec, traj)) = bridge_instance(rng) {
                let d = 1.25 * validate(&traj, &spec).unwrap().max_defect;
                return (spec, traj, d);
            }
        },
    }
}

fn c6a() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(SEED ^ 6);
    let mut bad = Vec::new();
    for idx in 0..CONSTRUCTIONS {
        let (spec, traj, delta) = periodic_instance(&mut rng, idx % 3);
        let ok = match close_to_zero(&traj, &spec, delta) {
            Ok(c) => {
                let t = &c.trajectory;
                let verbatim = t.points.get(c.offset..c.offset + traj.len()) == Some(&traj.points[..]);
                let ends = t.points.first().is_some_and(SeqVector::is_zero) && t.points.last().is_some_and(SeqVector::is_zero);
                verbatim && ends && validate(t, &spec).unwrap().within(delta)
            }
            Err(_) => false,
        };
        if !ok {
            bad.push(idx);
        }
    }
    (bad.is_empty(), format!("{CONSTRUCTIONS} periodic inputs, failures {bad:?}"))
}

fn bridge_params(rng: &mut StdRng) -> (WeightSpec, f64, f64, i64, i64, i64) {
    let spec = common::spec(rng, 0.5, 2.0, true);
    let mut idx = [rng.gen_range(-6..=6), rng.gen_range(-6..=6), rng.gen_range(-6..=6)];
    idx.sort();
    let eps = rng.gen_range(0.5..=2.0);
    let delta = eps * rng.gen_range(0.005..=0.1);
    (spec, eps, delta, idx[0], idx[1], idx[2])
}

// Bridges whose intermediate points all keep norm ≥ δ.
fn bridge_instance(rng: &mut StdRng) -> Option<(WeightSpec, Pseudotrajectory)> {
    let (spec, eps, delta, k, l, m) = bridge_params(rng);
    let traj = gen_sdelta_bridge(&spec, eps, delta, k, l, m).ok()?;
    let n = traj.len();
    traj.points[1..n - 1]
        .iter()
        .all(|x| x.sup_norm() >= delta)
        .then_some((spec, traj))
}

fn c6b() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0x6b);
    let (mut accepted, mut worst) = (0, 0.0f64);
    let mut draws = 0;
    while accepted < CONSTRUCTIONS && draws < 100_000 {
        draws += 1;
        let (spec, eps, delta, k, l, m) = bridge_params(&mut rng);
        let traj = gen_sdelta_bridge(&spec, eps, delta, k, l, m).unwrap();
        let n = traj.len();
        if !traj.points[1..n - 1].iter().all(|x| x.sup_norm() >= delta) {
            continue;
        }
        accepted += 1;
        let v = validate(&traj, &spec).unwrap();
        let (a, b) = psp_quantities(&spec, eps, delta, k, l, m).unwrap();
        worst = worst
            .max((v.defects[0] - a).abs())
            .max((v.defects[v.defects.len() - 1] - b).abs());
    }
    (
        accepted == CONSTRUCTIONS && worst <= BRIDGE_TOL,
        format!("{accepted} bridges from {draws} draws, worst endpoint deviation {worst:e}"),
    )
}

// 7: Köthe spaces.

fn c7() -> (bool, String) {
    let mut rng = StdRng::seed_from_u64(SEED ^ 7);
    let reach = DEFAULT_N_MAX as i64;
    let (lo, hi) = (DEFAULT_WINDOW.0 - reach, DEFAULT_WINDOW.1 + reach);
    let ones = KoetheMatrix::from_fn(lo, hi, 2, |_, _| 1.0).unwrap();
    let mut mismatches = 0;
    for _ in 0..KOETHE_SPECS {
        let spec = common::spec(&mut rng, 0.25, 4.0, true);
        let decomposition = match rng.gen_range(0..3) {
            0 => Decomposition::AllPlus,
            1 => Decomposition::AllMinus,
            _ => Decomposition::split(rng.gen_range(-5..=5)),
        };
        let schedule = Schedule::Geometric {
            c: rng.gen_range(0.1..=1.0),
            rho: rng.gen_range(0.8..=1.5),
        };
        let k = ute_numeric_check(&spec, &decomposition, DEFAULT_WINDOW, DEFAULT_N_MAX, &schedule).unwrap();
        let q =
            koethe_ute_check(&ones, &spec, 1, 1, &decomposition, DEFAULT_WINDOW, DEFAULT_N_MAX, &schedule).unwrap();
        mismatches += (k != q) as usize;
    }

    let (j_lo, j_hi, levels) = (-20, 20, 4);
    let mut table = Vec::new();
    for _ in j_lo..=j_hi {
        let mut a: f64 = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..=2.0) };
        for _ in 0..levels {
            table.push(a);
            a = a.max(rng.gen_range(0.1..=1.0)) * rng.gen_range(1.0..=2.0);
        }
    }
    let matrix = KoetheMatrix::new(j_lo, j_hi, levels, table).unwrap();
    let mut norm_errors = 0;
    for j in j_lo..=j_hi {
        for level in 1..=levels {
            for p in [None, Some(1.0), Some(2.0), Some(3.5)] {
                let space = SpaceNorm::Koethe {
                    matrix: matrix.clone(),
                    level,
                    p,
                };
                norm_errors += (space.norm(&basis(j)).unwrap() != matrix.get(j, level).unwrap()) as usize;
            }
        }
    }
    (
        mismatches == 0 && norm_errors == 0,
        format!("{KOETHE_SPECS} specs, {mismatches} report mismatches; basis norms off in {norm_errors} cases"),
    )
}

fn main() -> ExitCode {
    let wide = (-8192, 64);
    let lines = vec![
        timed("1a", None, c1a),
        timed("1b", None, c1b),
        timed("1c", None, c1c),
        timed("1", secs(1), || {
            let r = [c1a(), c1b(), c1c()];
            (r.iter().all(|x| x.0), "1a-1c rerun together".into())
        }),
        timed("2a", None, c2a),
        timed("2b", None, c2b),
        timed("2c", None, c2c),
        timed("2d", None, || c2d(DEFAULT_WINDOW)),
        timed("2d-wide", None, || c2d(wide)),
        timed("2", secs(10), || {
            let r = [c2a(), c2b(), c2c(), c2d(DEFAULT_WINDOW)];
            (r.iter().all(|x| x.0), "2a-2d rerun together".into())
        }),
        timed("3", secs(60), c3),
        timed("4", secs(120), c4),
        timed("5", secs(30), c5),
        timed("6a", None, c6a),
        timed("6b", None, c6b),
        timed("6", secs(30), || {
            let r = [c6a(), c6b()];
            (r.iter().all(|x| x.0), "6a-6b rerun together".into())
        }),
        timed("7", None, c7),
    ];
    let mut unexpected = Vec::new();
    for line in &lines {
        let known = KNOWN_RED.iter().any(|k| line.id == *k || (line.id.len() == 1 && k.starts_with(line.id)));
        let tag = match (line.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!(
            "{tag:<12} criterion {:<8} {:>9.3} s  {}",
            line.id,
            line.elapsed.as_secs_f64(),
            line.detail
        );
        if !line.pass && !known {
            unexpected.push(line.id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
