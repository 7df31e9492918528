//! `sphere-spd`: batch front end for the certifiers, kernel evaluation,
//! Gram matrices and witnesses.
//!
//! Exit codes: 0 SPD, 1 NotSPD, 2 SufficientOnly/Inconclusive, 64 spec or
//! usage error, 70 numerical/internal error.

mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sphere_spd::certify::{
    certify_circle_sphere_gamma_loop_with, certify_circle_sphere_with, certify_spec, sufficient_product,
    Counterexample, OuterAxis, Verdict,
};
use sphere_spd::geometry::{sample_config, ProductPoint, SpherePoint};
use sphere_spd::gram::{
    check_pd, gram_matrix, witness_parity_sphere, witness_product, witness_progression_circle, SearchOptions,
    SymMatrix, WitnessKind,
};
use sphere_spd::kernels::{KernelSpec, SpaceDescriptor, Truncation};
use sphere_spd::par::Execution;

use report::{CrossCheck, Report};
use spec::{parse_space, parse_spec, parse_truncation, SpecError, SpecFile, Support};

const EXIT_SPD: u8 = 0;
const EXIT_NOT_SPD: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_SPEC: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "sphere-spd", version, about = "Strict positive definiteness of kernels on S^1 x S^m")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the exact certifier for the spec's space.
    Certify { spec: PathBuf },
    /// Evaluate the truncated kernel at (t, s).
    Eval {
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        s: f64,
    },
    /// Assemble the Gram matrix at seeded points and report its smallest eigenvalue.
    Gram { spec: PathBuf },
    /// Certify, then build a witness configuration for a NotSPD verdict.
    Witness {
        spec: PathBuf,
        /// Candidate configurations for the randomized search.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Run both characterizations and both sufficient tests and check coherence.
    Crosscheck { spec: PathBuf },
}

#[derive(clap::Args, Debug)]
struct Options {
    /// Override the spec's space: circle, sphere:M, circle_sphere:M, circle_tph:FAMILY:D.
    #[arg(long, global = true, value_parser = parse_space)]
    space: Option<SpaceDescriptor>,
    /// Stop the parity-tail loop at this gamma instead of the stabilization bound.
    #[arg(long, global = true)]
    gamma_max: Option<u64>,
    /// Number of seeded points for `gram`.
    #[arg(long, global = true, default_value_t = 30)]
    points: usize,
    /// Override the truncation as K,L.
    #[arg(long, global = true, value_parser = parse_truncation)]
    trunc: Option<Truncation>,
    /// Relative positive definiteness tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Override the spec's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write the (n, lambda_min) curve of `gram` as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Omit the timestamp so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

enum Failure {
    Spec(String),
    Internal(String),
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Spec(e.to_string())
    }
}

impl From<sphere_spd::Error> for Failure {
    fn from(e: sphere_spd::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn io_failure(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Internal(format!("{}: {e}", path.display()))
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Spd => EXIT_SPD,
        Verdict::NotSpd => EXIT_NOT_SPD,
        Verdict::SufficientOnly | Verdict::Inconclusive => EXIT_UNDECIDED,
    }
}

fn load(path: &PathBuf, opts: &Options) -> Result<(SpecFile, KernelSpec), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Spec(format!("{}: {e}", path.display())))?;
    let mut spec = parse_spec(&text, opts.space)?;
    if let Some(t) = opts.trunc {
        spec.truncation = t;
    }
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    let kernel = spec.kernel()?;
    Ok((spec, kernel))
}

/// Seeded distinct points suited to the space.
fn points_for(kernel: &KernelSpec, n: usize, seed: u64) -> Result<Vec<ProductPoint>, Failure> {
    let space = kernel.space();
    let cfg = sample_config(space.sphere_dim().unwrap_or(1), n, n, seed)?;
    Ok(match space {
        // projective factors only have a base point
        SpaceDescriptor::CircleTph { .. } => {
            let z = SpherePoint::north_pole(1);
            cfg.circle.into_iter().map(|x| ProductPoint::new(x, z.clone())).collect()
        }
        _ => cfg.zipped(),
    })
}

fn leading_minor(a: &SymMatrix, n: usize) -> Result<SymMatrix, Failure> {
    Ok(SymMatrix::from_fn(n, Execution::Sequential, |i, j| Ok(a.get(i, j)))?)
}

fn run(cmd: &Command, opts: &Options) -> Result<(Report, u8), Failure> {
    match cmd {
        Command::Certify { spec } => {
            let (file, kernel) = load(spec, opts)?;
            let cert = certify_spec(&kernel, opts.gamma_max)?;
            let code = verdict_code(cert.verdict);
            let mut report = Report::new("certify", file);
            report.certificate = Some(cert);
            Ok((report, code))
        }
        Command::Eval { spec, t, s } => {
            let (file, kernel) = load(spec, opts)?;
            let value = kernel.eval(*t, *s).map_err(|e| Failure::Spec(format!("eval arguments: {e}")))?;
            println!("{value}");
            let mut report = Report::new("eval", file);
            report.value = Some(value);
            Ok((report, EXIT_SPD))
        }
        Command::Gram { spec } => {
            let (file, kernel) = load(spec, opts)?;
            if opts.points == 0 {
                return Err(Failure::Spec("--points must be positive".into()));
            }
            let points = points_for(&kernel, opts.points, file.seed)?;
            let a = gram_matrix(&kernel, &points)?;
            let pd = check_pd(&a, opts.tol)?;
            if let Some(path) = &opts.csv {
                let mut curve = Vec::with_capacity(points.len());
                for n in 1..=points.len() {
                    curve.push((n, leading_minor(&a, n)?.min_eigenpair()?.0));
                }
                report::write_curve_csv(path, &curve).map_err(|e| io_failure(path, e))?;
            }
            let mut report = Report::new("gram", file);
            report.lambda_min = Some(pd.lambda_min);
            report.is_pd = Some(pd.is_pd);
            report.points = Some(points.len());
            report.note = Some("numerics on the truncated kernel can refute but never prove SPD".into());
            Ok((report, if pd.is_pd { EXIT_SPD } else { EXIT_NOT_SPD }))
        }
        Command::Witness { spec, budget } => {
            let (file, kernel) = load(spec, opts)?;
            let cert = certify_spec(&kernel, opts.gamma_max)?;
            let code = verdict_code(cert.verdict);
            let mut report = Report::new("witness", file.clone());
            if cert.verdict == Verdict::NotSpd {
                let witness = match (kernel.space(), cert.counterexample) {
                    (SpaceDescriptor::Circle, Some(Counterexample::Progression { witness, .. })) => {
                        Some(witness_progression_circle(&kernel, witness)?)
                    }
                    (SpaceDescriptor::Sphere { .. }, _) => Some(witness_parity_sphere(&kernel)?),
                    (SpaceDescriptor::CircleSphere { .. }, _) => {
                        let opts = SearchOptions { budget: *budget, seed: file.seed, ..SearchOptions::default() };
                        Some(witness_product(&kernel, &cert, &opts)?)
                    }
                    _ => None,
                };
                match &witness {
                    Some(w) if w.kind == WitnessKind::Searched => {
                        report.lambda_min = Some(w.residual);
                        report.note = Some("searched witness: numerical evidence, not a proof".into());
                    }
                    Some(_) => {}
                    None => report.note = Some("no point model for this space; no witness built".into()),
                }
                report.witness = witness;
            } else {
                report.note = Some(format!("verdict {}: no witness to build", cert.verdict));
            }
            report.certificate = Some(cert);
            Ok((report, code))
        }
        Command::Crosscheck { spec } => {
            let (file, kernel) = load(spec, opts)?;
            let (s2, m) = match (&file.support, kernel.space()) {
                (Support::Product(s2), SpaceDescriptor::CircleSphere { m }) => (s2.clone(), m),
                _ => return Err(Failure::Spec("crosscheck needs a circle_sphere spec".into())),
            };
            let tails = certify_circle_sphere_with(&s2, m, opts.gamma_max)?;
            let gamma_loop = certify_circle_sphere_gamma_loop_with(&s2, m, opts.gamma_max)?;
            let circle_outer = sufficient_product(&s2, m, OuterAxis::CircleOuter)?.verdict;
            let sphere_outer = sufficient_product(&s2, m, OuterAxis::SphereOuter)?.verdict;
            let sufficient = [circle_outer, sphere_outer].contains(&Verdict::SufficientOnly);
            let coherent = tails.verdict == gamma_loop.verdict && !(sufficient && tails.verdict == Verdict::NotSpd);
            let check = CrossCheck { parity_tails: tails.verdict, gamma_loop: gamma_loop.verdict, circle_outer, sphere_outer, coherent };
            let code = if coherent { verdict_code(tails.verdict) } else { EXIT_INTERNAL };
            let mut report = Report::new("crosscheck", file);
            if !coherent {
                report.note = Some("procedures disagree: this is an implementation bug".into());
            }
            report.certificate = Some(tails);
            report.crosscheck = Some(check);
            Ok((report, code))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SPEC } else { EXIT_SPD };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (mut report, code) = match run(&cli.command, &cli.opts) {
        Ok(done) => done,
        Err(Failure::Spec(msg)) => {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_SPEC);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    if !cli.opts.no_timestamp {
        report.stamp();
    }
    log::info!("{}", report.summary());
    match &cli.opts.json {
        Some(path) => {
            if let Err(e) = report::write_text(path, &report.to_json()) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_INTERNAL);
            }
            println!("{}", report.summary());
        }
        None if matches!(cli.command, Command::Eval { .. }) => {}
        None => print!("{}", report.to_json()),
    }
    ExitCode::from(code)
}
