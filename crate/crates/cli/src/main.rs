use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wshift::criteria::DEFAULT_WINDOW;
use wshift::io::{parse_spec, parse_trajectory, to_json};
use wshift::report::{analyze, AnalyzeOptions};
use wshift::repro::{repro_genhyp, repro_trivcr};
use wshift::solver::{finite_shadow_solve, ShadowMode};
use wshift::trajectories::{gen_genhyp, gen_ramp, gen_sdelta_bridge, renormalized_pullback_orbit, validate};
use wshift::{basis, SpaceNorm, WeightSpec};

#[derive(Parser)]
#[command(name = "wshift", version, about = "Dynamics of bilateral weighted shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every decision procedure on a weight spec.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Single δ instead of the grid.
        #[arg(long)]
        delta: Option<f64>,
        /// Grid ε·2^-j for j = 1..=J.
        #[arg(long, default_value_t = 12)]
        grid: u32,
        #[arg(long, value_parser = parse_space, default_value = "sup")]
        space: SpaceNorm,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build one of the explicit constructions.
    Pseudo {
        name: Construction,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        l: Option<i64>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve finite shadowing for a trajectory file.
    Shadow {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_parser = parse_mode, default_value = "unrestricted")]
        mode: ShadowMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a worked counterexample; exits 1 if any check fails.
    Repro {
        case: Case,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the side rates of a weight spec.
    Rates {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Genhyp,
    Ramp,
    SdeltaBridge,
    Pullback,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Genhyp,
    Trivcr,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn parse_mode(s: &str) -> Result<ShadowMode, String> {
    if s == "unrestricted" {
        return Ok(ShadowMode::Unrestricted);
    }
    let bound = s
        .strip_prefix("support:")
        .ok_or("expected unrestricted or support:M")?
        .parse()
        .map_err(|e| format!("bad support bound: {e}"))?;
    Ok(ShadowMode::SupportBounded { bound })
}

fn parse_space(s: &str) -> Result<SpaceNorm, String> {
    if s == "sup" || s == "c0" {
        return Ok(SpaceNorm::Sup);
    }
    let p: f64 = s
        .strip_prefix("lp:")
        .ok_or("expected sup or lp:P")?
        .parse()
        .map_err(|e| format!("bad exponent: {e}"))?;
    SpaceNorm::lp(p).map_err(|e| e.to_string())
}

/// Errors that map to exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_spec(path: &Path) -> Result<WeightSpec, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), InputError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, InputError> {
    value.ok_or_else(|| InputError(format!("missing --{flag}")))
}

fn run(cli: Cli) -> Result<bool, InputError> {
    match cli.command {
        Command::Analyze {
            spec,
            window,
            eps,
            delta,
            grid,
            space,
            out,
        } => {
            let spec = read_spec(&spec)?;
            let options = AnalyzeOptions {
                window: window.unwrap_or(DEFAULT_WINDOW),
                eps,
                grid_levels: grid,
                delta,
                space,
            };
            let report = analyze(&spec, &options)?;
            for entry in &report.properties {
                eprintln!("{:<34} {:?} ({:?})", entry.property, entry.verdict.status, entry.verdict.reason);
            }
            emit(&out, &to_json(&report))?;
            Ok(true)
        }
        Command::Pseudo {
            name,
            spec,
            eps,
            delta,
            m,
            length,
            n,
            k,
            l,
            steps,
            out,
        } => {
            let (traj, spec) = match name {
                Construction::Genhyp => {
                    let t = gen_genhyp(eps.unwrap_or(1.0), require(m, "m")?, require(length, "length")?)?;
                    (t, WeightSpec::step(0.5, 2.0, 1)?)
                }
                Construction::Ramp => {
                    let spec = match spec {
                        Some(p) => read_spec(&p)?,
                        None => WeightSpec::step(1.0, 0.5, 0)?,
                    };
                    (gen_ramp(require(delta, "delta")?, require(n, "n")?)?, spec)
                }
                Construction::SdeltaBridge => {
                    let spec = read_spec(&require(spec, "spec")?)?;
                    let t = gen_sdelta_bridge(
                        &spec,
                        require(eps, "eps")?,
                        require(delta, "delta")?,
                        require(k, "k")?,
                        require(l, "l")?,
                        require(m, "m")?,
                    )?;
                    (t, spec)
                }
                Construction::Pullback => {
                    let spec = read_spec(&require(spec, "spec")?)?;
                    let y0 = basis(require(l, "l")?).scaled(require(eps, "eps")?);
                    let orbit = renormalized_pullback_orbit(&spec, &y0, require(delta, "delta")?, steps, &SpaceNorm::Sup)?;
                    eprintln!("{} points", orbit.len());
                    emit(&out, &to_json(&orbit))?;
                    return Ok(true);
                }
            };
            let v = validate(&traj, &spec)?;
            eprintln!(
                "{} points, max defect {} (claimed bound {}), max norm {}",
                traj.len(),
                v.max_defect,
                traj.delta,
                traj.max_norm()?
            );
            emit(&out, &to_json(&traj))?;
            Ok(true)
        }
        Command::Shadow {
            traj,
            spec,
            eps,
            mode,
            out,
        } => {
            let text = fs::read_to_string(&traj).map_err(|e| InputError(format!("{}: {e}", traj.display())))?;
            let traj = parse_trajectory(&text).map_err(|e| InputError(format!("{}: {e}", traj.display())))?;
            let spec = read_spec(&spec)?;
            let result = finite_shadow_solve(&traj, &spec, eps, mode)?;
            let kind = match &result.outcome {
                wshift::solver::ShadowOutcome::Feasible { error, .. } => format!("feasible, error {error}"),
                wshift::solver::ShadowOutcome::Infeasible { coordinate, .. } => {
                    format!("infeasible at coordinate {coordinate}")
                }
                wshift::solver::ShadowOutcome::Unknown { reason, .. } => format!("unknown: {reason}"),
            };
            eprintln!("{kind}");
            emit(&out, &to_json(&result))?;
            Ok(true)
        }
        Command::Repro { case, window, out } => {
            let report = match case {
                Case::Genhyp => repro_genhyp()?,
                Case::Trivcr => repro_trivcr(window.unwrap_or(DEFAULT_WINDOW))?,
            };
            for c in &report.checks {
                eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            emit(&out, &to_json(&report))?;
            Ok(report.pass)
        }
        Command::Rates { spec, out } => {
            let spec = read_spec(&spec)?;
            emit(&out, &to_json(&spec.rates()))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
