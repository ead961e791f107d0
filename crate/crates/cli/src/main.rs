mod examples;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use eigenpath::io::{parse_path, parse_triple, write_tracker_csv, MatrixLiteral};
use eigenpath::newton::DEFAULT_K_CHECK;
use eigenpath::random::DEFAULT_SEED;
use eigenpath::suite::{run_suite, Suite};
use eigenpath::tracker::DEFAULT_EPSILON;
use eigenpath::{
    build_mesh, certify_approximate_solution, condition_length, condition_report, lift_path,
    newton_iterate, start_by_index, track, CVector, EigenTriple, Error, MatrixPath, TrackerConfig,
    C64,
};

use report::{
    base_config, declare_tolerance, print_json, real_cell, write_csv, RunReport, Verdict,
};

#[derive(Parser)]
#[command(
    name = "eigenpath",
    version,
    about = "Condition numbers, Newton iteration and certified path following for eigenpairs"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "EIGENPATH_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Tolerance for the residual verdict of `newton`.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Print the full run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Also write a CSV table to this file.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Include wall-clock duration in the JSON report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition numbers of an eigentriple.
    Condition {
        /// Triple file {"A", "lambda", "v"}.
        file: PathBuf,
    },
    /// Newton iterates from an approximate eigenpair.
    Newton {
        /// File {"A", "lambda", "v", "target"?}.
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// Certified path following along a matrix path.
    Track(TrackArgs),
    /// Step mesh of a path, without running the corrector.
    Mesh(TrackArgs),
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = Suite::NAMES)]
        suite: String,
        /// Overrides the trial count of every randomized check.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Print, or write to a directory, the worked example input files.
    Examples {
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TrackArgs {
    /// Path file, tagged by "kind": linear, sampled or unitary-orbit.
    path: PathBuf,
    /// Triple file for the starting eigenpair of A(0).
    #[arg(long, conflicts_with = "start_index")]
    start: Option<PathBuf>,
    /// Index of the starting eigenvalue of A(0), ordered by real then imaginary part.
    #[arg(long)]
    start_index: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Newton steps checked at each mesh point.
    #[arg(long, default_value_t = DEFAULT_K_CHECK)]
    k_check: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 3 for numerical failures on valid input, 2 for everything else.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::PathLeavesW { .. }
            | Error::StepNotDefined { .. }
            | Error::IllPosed
            | Error::NotInvertible
            | Error::NoNullVector
            | Error::Infinite,
        ) => 3,
        _ => 2,
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    started: Instant,
}

impl Ctx<'_> {
    fn command_echo(&self) -> Vec<String> {
        std::iter::once("eigenpath".to_string())
            .chain(std::env::args().skip(1))
            .collect()
    }

    fn report<T: Serialize>(
        &self,
        config: Map<String, Value>,
        results: T,
        verdicts: Vec<Verdict>,
    ) -> RunReport<T> {
        RunReport {
            command: self.command_echo(),
            config,
            results,
            verdicts,
            duration_seconds: self
                .cli
                .timing
                .then(|| self.started.elapsed().as_secs_f64()),
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let ctx = Ctx {
        cli,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Condition { file } => condition(&ctx, file),
        Command::Newton { file, steps } => newton(&ctx, file, *steps),
        Command::Track(args) => tracking(&ctx, args),
        Command::Mesh(args) => mesh(&ctx, args),
        Command::Verify { suite, trials } => verify(&ctx, suite, *trials),
        Command::Examples { out } => write_examples(&ctx, out.as_deref()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn condition(ctx: &Ctx, file: &Path) -> Result<ExitCode> {
    let t = parse_triple(&read(file)?)
        .with_context(|| format!("invalid triple in {}", file.display()))?;
    let rep = condition_report(&t);
    let mut config = base_config(ctx.cli.seed, ctx.cli.tol);
    config.insert("input".into(), file.display().to_string().into());
    let verdicts = vec![Verdict::new("well_posed", rep.well_posed)];
    if ctx.cli.json {
        print_json(&ctx.report(config, &rep, verdicts))?;
    } else {
        print_json(&rep)?;
    }
    if let Some(path) = &ctx.cli.csv {
        let cell = |x: Option<f64>| x.map(real_cell).unwrap_or_default();
        write_csv(
            path,
            &[
                "well_posed",
                "mu_lambda",
                "mu_v",
                "mu",
                "dist_to_illposed_fiber_affine",
            ],
            [vec![
                rep.well_posed.to_string(),
                cell(rep.mu_lambda),
                cell(rep.mu_v),
                cell(rep.mu),
                real_cell(rep.dist_to_illposed_fiber_affine),
            ]],
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewtonInput {
    #[serde(rename = "A")]
    a: MatrixLiteral,
    lambda: [f64; 2],
    v: Vec<[f64; 2]>,
    #[serde(default)]
    target: Option<PairLiteral>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairLiteral {
    lambda: [f64; 2],
    v: Vec<[f64; 2]>,
}

fn scalar(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

fn vector(v: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().copied().map(scalar))
}

#[derive(Serialize)]
struct NewtonResults {
    trace: eigenpath::NewtonTrace,
    final_relative_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified: Option<bool>,
}

fn newton(ctx: &Ctx, file: &Path, steps: usize) -> Result<ExitCode> {
    let input: NewtonInput = serde_json::from_str(&read(file)?)
        .map_err(|e| Error::Input(e.to_string()))
        .with_context(|| format!("invalid Newton input in {}", file.display()))?;
    let a = input.a.to_matrix()?;
    let lambda0 = scalar(input.lambda);
    let v0 = vector(&input.v);
    if v0.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: v0.len(),
        }
        .into());
    }
    if !lambda0.re.is_finite()
        || !lambda0.im.is_finite()
        || v0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::Input("non-finite start".into()).into());
    }
    let target = match &input.target {
        Some(p) => Some(
            EigenTriple::new(a.clone(), scalar(p.lambda), vector(&p.v))
                .context("invalid target")?,
        ),
        None => None,
    };
    let trace = newton_iterate(&a, lambda0, &v0, steps, target.as_ref())?;
    let last = trace.iterates.last().expect("trace holds the start");
    let residual = (&a * &last.v - &last.v * last.lambda).norm() / (a.norm() * last.v.norm());
    let certified = target.as_ref().map(|t| {
        certify_approximate_solution(&a, lambda0, &v0, t, steps.clamp(1, DEFAULT_K_CHECK))
    });

    let mut config = base_config(ctx.cli.seed, ctx.cli.tol);
    config.insert("input".into(), file.display().to_string().into());
    config.insert("steps".into(), steps.into());
    declare_tolerance(&mut config, "residual", ctx.cli.tol);
    let mut verdicts = vec![Verdict::with_tolerance(
        "final_residual_within_tol",
        residual <= ctx.cli.tol,
        "residual",
    )];
    if let Some(c) = certified {
        verdicts.push(Verdict::new("certified_approximate_solution", c));
    }
    let undefined = trace.undefined_at;
    let results = NewtonResults {
        trace,
        final_relative_residual: residual,
        certified,
    };

    if let Some(path) = &ctx.cli.csv {
        let rows = results.trace.iterates.iter().enumerate().map(|(k, it)| {
            vec![
                k.to_string(),
                real_cell(it.lambda.re),
                real_cell(it.lambda.im),
                results
                    .trace
                    .distances_to_target
                    .get(k)
                    .map(|&d| real_cell(d))
                    .unwrap_or_default(),
            ]
        });
        write_csv(
            path,
            &["k", "lambda_re", "lambda_im", "dist_to_target"],
            rows,
        )?;
    }
    if ctx.cli.json {
        print_json(&ctx.report(config, &results, verdicts))?;
    } else {
        for (k, it) in results.trace.iterates.iter().enumerate() {
            let d = results
                .trace
                .distances_to_target
                .get(k)
                .map(|d| format!("  dist {d:.6e}"))
                .unwrap_or_default();
            println!(
                "k={k}  lambda = {:.16e} {:+.16e}i{d}",
                it.lambda.re, it.lambda.im
            );
        }
        println!("relative residual: {residual:.6e}");
        if let Some(c) = certified {
            println!("certified: {c}");
        }
    }
    if let Some(k) = undefined {
        eprintln!("error: Newton step {k} is not defined");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn tracker_inputs(args: &TrackArgs) -> Result<(MatrixPath, EigenTriple, TrackerConfig)> {
    let path = parse_path(&read(&args.path)?)
        .with_context(|| format!("invalid path in {}", args.path.display()))?;
    let start = match (&args.start, args.start_index) {
        (Some(file), _) => parse_triple(&read(file)?)
            .with_context(|| format!("invalid triple in {}", file.display()))?,
        (None, index) => start_by_index(&path, index.unwrap_or(0))?,
    };
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        bail!(Error::OutOfRange(format!(
            "epsilon = {} must lie in (0, 1)",
            args.epsilon
        )));
    }
    if args.k_check == 0 {
        bail!(Error::OutOfRange("k-check must be at least 1".into()));
    }
    let cfg = TrackerConfig {
        epsilon: args.epsilon,
        k_check: args.k_check,
        ..TrackerConfig::default()
    };
    Ok((path, start, cfg))
}

fn tracker_config(ctx: &Ctx, args: &TrackArgs, cfg: &TrackerConfig) -> Result<Map<String, Value>> {
    let mut config = base_config(ctx.cli.seed, ctx.cli.tol);
    config.insert("input".into(), args.path.display().to_string().into());
    match (&args.start, args.start_index) {
        (Some(f), _) => config.insert("start".into(), f.display().to_string().into()),
        (None, i) => config.insert("start_index".into(), i.unwrap_or(0).into()),
    };
    config.insert("tracker".into(), serde_json::to_value(cfg)?);
    config.insert("c_eps".into(), cfg.c_eps()?.into());
    declare_tolerance(&mut config, "quadrature_rtol", cfg.quadrature_rtol);
    Ok(config)
}

fn tracking(ctx: &Ctx, args: &TrackArgs) -> Result<ExitCode> {
    let (path, start, cfg) = tracker_inputs(args)?;
    let config = tracker_config(ctx, args, &cfg)?;
    let run = track(&path, &start, &cfg)?;
    if let Some(p) = &ctx.cli.csv {
        let file = fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
        write_tracker_csv(&run, std::io::BufWriter::new(file))?;
    }
    let verdicts = vec![
        Verdict::new("all_certified", run.all_certified),
        Verdict::with_tolerance("bound_satisfied", run.bound_satisfied, "quadrature_rtol"),
        Verdict::with_tolerance(
            "sharp_bound_satisfied",
            run.sharp_bound_satisfied,
            "quadrature_rtol",
        ),
    ];
    if ctx.cli.json {
        print_json(&ctx.report(config, &run, verdicts))?;
    } else {
        println!("steps K:               {}", run.k);
        println!("condition length:      {:.6e}", run.ell_mu);
        println!("step constant C_eps:   {:.6e}", run.c_eps);
        println!("all certified:         {}", run.all_certified);
        println!("K <= 100 l + 1:        {}", run.bound_satisfied);
        println!("K <= (1+e)/C_e l + 1:  {}", run.sharp_bound_satisfied);
        let end = run.triples.last().expect("run has an endpoint");
        println!(
            "final lambda:          {:.16e} {:+.16e}i",
            end.lambda.re, end.lambda.im
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MeshResults {
    #[serde(rename = "K")]
    k: usize,
    ell_mu: f64,
    c_eps: f64,
    bound: f64,
    sharp_bound: f64,
    mesh: eigenpath::Mesh,
    end_mu: f64,
}

fn mesh(ctx: &Ctx, args: &TrackArgs) -> Result<ExitCode> {
    let (path, start, cfg) = tracker_inputs(args)?;
    let config = tracker_config(ctx, args, &cfg)?;
    let lifted = lift_path(&path, &start, cfg.grid)?.converged(cfg.quadrature_rtol)?;
    let ell_mu = condition_length(&lifted)?;
    let mesh = build_mesh(&lifted, &cfg)?;
    let end_mu = lifted.samples.last().expect("lift has samples").mu;
    let results = MeshResults {
        k: mesh.steps(),
        ell_mu,
        c_eps: cfg.c_eps()?,
        bound: 100.0 * ell_mu + 1.0,
        sharp_bound: cfg.step_constant()? * ell_mu + 1.0,
        mesh,
        end_mu,
    };
    let slack = 1.0 + cfg.quadrature_rtol;
    let verdicts = vec![
        Verdict::with_tolerance(
            "bound_satisfied",
            results.k as f64 <= results.bound * slack,
            "quadrature_rtol",
        ),
        Verdict::with_tolerance(
            "sharp_bound_satisfied",
            results.k as f64 <= results.sharp_bound * slack,
            "quadrature_rtol",
        ),
    ];
    if let Some(p) = &ctx.cli.csv {
        let mus = results.mesh.mus.iter().copied().chain([end_mu]);
        let rows = results
            .mesh
            .ts
            .iter()
            .zip(mus)
            .map(|(&t, m)| vec![real_cell(t), real_cell(m)]);
        write_csv(p, &["t", "mu"], rows)?;
    }
    if ctx.cli.json {
        print_json(&ctx.report(config, &results, verdicts))?;
    } else {
        println!("steps K:               {}", results.k);
        println!("condition length:      {:.6e}", results.ell_mu);
        println!("K <= 100 l + 1:        {}", verdicts[0].passed);
        println!("K <= (1+e)/C_e l + 1:  {}", verdicts[1].passed);
        for (t, m) in results.mesh.ts.iter().zip(results.mesh.mus.iter()) {
            println!("t = {t:.12}  mu = {m:.6e}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(ctx: &Ctx, suite: &str, trials: Option<usize>) -> Result<ExitCode> {
    let suite: Suite = suite.parse()?;
    if trials == Some(0) {
        bail!(Error::OutOfRange("trials must be at least 1".into()));
    }
    let reports = run_suite(suite, ctx.cli.seed, trials);
    let mut config = base_config(ctx.cli.seed, ctx.cli.tol);
    config.insert("suite".into(), suite.to_string().into());
    config.insert("trials".into(), trials.map_or(Value::Null, Value::from));
    let mut verdicts = Vec::new();
    for r in &reports {
        for c in &r.checks {
            let key = format!("{}/{}", r.suite, c.name);
            declare_tolerance(&mut config, &key, c.tolerance);
            verdicts.push(Verdict::with_tolerance(key.clone(), c.passed, key));
        }
    }
    if let Some(p) = &ctx.cli.csv {
        let rows = reports.iter().flat_map(|r| {
            r.checks.iter().map(move |c| {
                vec![
                    r.suite.to_string(),
                    format!("\"{}\"", c.name.replace('"', "\"\"")),
                    c.passed.to_string(),
                    real_cell(c.tolerance),
                    c.samples.to_string(),
                    c.violations.to_string(),
                    real_cell(c.worst),
                ]
            })
        });
        write_csv(
            p,
            &[
                "suite",
                "check",
                "passed",
                "tolerance",
                "samples",
                "violations",
                "worst",
            ],
            rows,
        )?;
    }
    if ctx.cli.json {
        print_json(&ctx.report(config, &reports, verdicts))?;
    } else {
        for r in &reports {
            println!("[{}] seed {}", r.suite, r.seed);
            for c in &r.checks {
                println!("  {c}");
            }
        }
        let failed = verdicts.iter().filter(|v| !v.passed).count();
        println!("{} checks, {} failed", verdicts.len(), failed);
    }
    Ok(ExitCode::SUCCESS)
}

fn write_examples(ctx: &Ctx, out: Option<&Path>) -> Result<ExitCode> {
    let files = examples::example_files(ctx.cli.seed);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for (name, value) in &files {
                let path = dir.join(name);
                fs::write(&path, serde_json::to_string_pretty(value)? + "\n")
                    .with_context(|| format!("cannot write {}", path.display()))?;
                println!("{}", path.display());
            }
        }
        None => {
            let all: Map<String, Value> = files.into_iter().collect();
            print_json(&json!(all))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
