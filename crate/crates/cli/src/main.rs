use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gapcert::baa::{run_baa, BaaOptions, EstimateMethod, Family, DEFAULT_SEED};
use gapcert::bounds::{verify_lower_nonstoquastic_with, Analysis, BoundCertificate, QMode};
use gapcert::cheeger::{CutProblem, ExhaustiveOptions};
use gapcert::io::{input_digest, parse_problem, Problem, ReportEnvelope};
use gapcert::routing::{auto_route, check_simpler_reduction, validate_plan, RoutingStrategy};
use gapcert::spectral::{eigendecompose, ground_state_from, hermitian_eigen};
use gapcert::stoquastic::{
    conjugate_diagonal, stoquasticity_check, HermitianMatrix, StoquasticWitness,
};
use gapcert::{Error, HamiltonianDecomposition};

#[derive(Parser)]
#[command(
    name = "gapcert",
    version,
    about = "Spectral gap certificates from weighted Cheeger constants"
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Include wall-clock timings (makes the report depend on the machine).
    #[arg(long, global = true)]
    timings: bool,

    /// Largest vertex count for exhaustive cut enumeration.
    #[arg(long, global = true, default_value_t = 25)]
    exhaustive_limit: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum summary of a problem file.
    Gap { file: PathBuf },
    /// Weighted Cheeger constant of the ground state.
    Cheeger {
        #[arg(long, conflicts_with = "sweep")]
        exhaustive: bool,
        #[arg(long)]
        sweep: bool,
        file: PathBuf,
    },
    /// Frustration check and the diagonal unitary that makes H real and nonpositive off the diagonal.
    Stoquastize { file: PathBuf },
    /// Route negative edges along positive paths.
    Route {
        #[arg(long, default_value = "shortest")]
        strategy: String,
        file: PathBuf,
    },
    /// Check the gap inequalities on one or more problem files.
    Verify(VerifyArgs),
    /// Simulate the checkpointed adiabatic algorithm on a schedule family.
    BaaSim(BaaArgs),
    /// Run the shipped fixtures against their known values.
    Selftest,
}

#[derive(Args)]
struct VerifyArgs {
    /// Also check exact-Q, potential, subgraph, comparison and proof-chain replays.
    #[arg(long)]
    all: bool,
    /// Verify every `*.prob` file in this directory, in name order.
    #[arg(long)]
    dir: Option<PathBuf>,
    #[arg(long, default_value = "shortest")]
    strategy: String,
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct BaaArgs {
    #[arg(long, default_value = "two-level")]
    family: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0.1)]
    theta: f64,
    #[arg(long, default_value_t = 0.5)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-9)]
    gamma_min: f64,
    #[arg(long, default_value = "exhaustive")]
    method: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the checkpoint trace as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Failure modes mapped to exit codes: usage and input problems exit 2.
enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(ReportEnvelope, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let outcome = dispatch(&cli);
    match outcome {
        Ok((mut report, all_hold)) => {
            if cli.timings {
                report.record_timing("total_seconds", started.elapsed().as_secs_f64());
            }
            let text = report.to_json();
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if all_hold { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let limit = cli.exhaustive_limit;
    match &cli.command {
        Command::Gap { file } => single(file, gap),
        Command::Cheeger { sweep, file, .. } => single(file, |p, r| cheeger(p, *sweep, limit, r)),
        Command::Stoquastize { file } => single(file, stoquastize),
        Command::Route { strategy, file } => {
            let strategy: RoutingStrategy = strategy.parse()?;
            single(file, |p, r| route(p, strategy, r))
        }
        Command::Verify(args) => verify_many(args, limit),
        Command::BaaSim(args) => baa_sim(args),
        Command::Selftest => selftest(limit),
    }
}

fn read(path: &Path) -> Result<(Problem, String), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Failure::Usage(format!("{} is not UTF-8: {e}", path.display())))?;
    let problem =
        parse_problem(text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok((problem, input_digest(&bytes)))
}

fn single(
    path: &Path,
    f: impl FnOnce(&Problem, &mut ReportEnvelope) -> Result<bool, Failure>,
) -> Outcome {
    let (problem, digest) = read(path)?;
    let mut report = ReportEnvelope::new(digest);
    let ok = f(&problem, &mut report)?;
    Ok((report, ok))
}

fn decomposition(problem: &Problem) -> Result<HamiltonianDecomposition, Failure> {
    match problem {
        Problem::Decomposition(d) => Ok(d.clone()),
        Problem::Hermitian(h) => match h.as_real() {
            Some(m) => Ok(HamiltonianDecomposition::from_dense_combinatorial(&m)?),
            None => Err(Failure::Usage(
                "complex Hermitian input: run `stoquastize` to obtain a real form first".into(),
            )),
        },
    }
}

fn gap(problem: &Problem, report: &mut ReportEnvelope) -> Result<bool, Failure> {
    let eigenvalues = match problem {
        Problem::Decomposition(d) => eigendecompose(&d.dense())?.eigenvalues,
        Problem::Hermitian(h) => hermitian_eigen(h.matrix())?.0,
    };
    let n = eigenvalues.len();
    let gap = if n >= 2 {
        Some(eigenvalues[1] - eigenvalues[0])
    } else {
        None
    };
    report.push(
        "spectrum",
        &json!({
            "eigenvalues": eigenvalues,
            "lambda0": eigenvalues[0],
            "gap": gap,
            "spread": eigenvalues[n - 1] - eigenvalues[0],
        }),
    )?;
    Ok(true)
}

fn cheeger(
    problem: &Problem,
    sweep: bool,
    limit: usize,
    report: &mut ReportEnvelope,
) -> Result<bool, Failure> {
    let d = decomposition(problem)?;
    let sys = eigendecompose(&d.dense())?;
    let ground = ground_state_from(&d, &sys)?;
    let cp = CutProblem::ground_weighted(&d, &ground)?;
    let result = if sweep {
        cp.sweep(&cp.spectral_ordering()?)?
    } else {
        cp.exhaustive(ExhaustiveOptions {
            limit,
            record_ratios: false,
        })?
    };
    report.push("cheeger", &result)?;
    Ok(true)
}

fn stoquastize(problem: &Problem, report: &mut ReportEnvelope) -> Result<bool, Failure> {
    let h = match problem {
        Problem::Hermitian(h) => h.clone(),
        Problem::Decomposition(d) => HermitianMatrix::from_real(&d.dense())?,
    };
    let verdict = stoquasticity_check(&h)?;
    report.push("stoquasticity", &verdict)?;
    if let StoquasticWitness::Unitary { phases } = &verdict.witness {
        let rotated = conjugate_diagonal(h.matrix(), phases).map(|z| z.re);
        let d = HamiltonianDecomposition::from_dense_combinatorial(&rotated)?;
        report.push("rotated_problem", &gapcert::io::serialize_decomposition(&d))?;
    }
    Ok(true)
}

fn route(
    problem: &Problem,
    strategy: RoutingStrategy,
    report: &mut ReportEnvelope,
) -> Result<bool, Failure> {
    let d = decomposition(problem)?;
    match auto_route(&d.graph, strategy) {
        Ok(plan) => {
            let routed = validate_plan(&d.graph, &plan)?;
            report.push("routing_plan", &plan)?;
            report.push("routed_graph", &routed)?;
            if plan.routes.iter().all(|r| r.paths.len() == 1) && !plan.routes.is_empty() {
                if let Ok(v) = check_simpler_reduction(&d.graph, &plan) {
                    report.push("simpler_reduction", &v)?;
                    return Ok(v.holds);
                }
            }
            Ok(true)
        }
        Err(e @ Error::RoutingInfeasible { .. }) => {
            report.push("routing_infeasible", &json!({ "error": e.to_string() }))?;
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

/// Certificates for one decomposition. Returns whether all of them hold.
fn certify(
    d: &HamiltonianDecomposition,
    all: bool,
    strategy: RoutingStrategy,
    limit: usize,
    label: Option<&str>,
    report: &mut ReportEnvelope,
) -> Result<bool, Failure> {
    let opts = ExhaustiveOptions {
        limit,
        record_ratios: false,
    };
    let analysis = Analysis::with_options(d, opts)?;
    let mut certs: Vec<BoundCertificate> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    if d.graph.has_negative_edges() {
        let plan = auto_route(&d.graph, strategy)?;
        certs.push(verify_lower_nonstoquastic_with(&analysis, &plan)?);
    } else {
        certs.push(analysis.upper()?);
        certs.push(analysis.lower_stoquastic(QMode::DegreeRelaxed)?);
        if all {
            certs.push(analysis.lower_stoquastic(QMode::ExactExcited)?);
            if d.potential.values().iter().all(|&w| w >= 0.0) {
                certs.push(analysis.comparison()?);
            } else {
                notes.push("comparison skipped: negative potential entries".into());
            }
            for level in 0..d.vertex_count().min(2) {
                certs.push(analysis.potential_bound(level)?);
            }
            certs.push(analysis.subgraph_bottleneck(analysis.cheeger.argmin_cut.vertices())?);
            let checks = analysis.replay_cheeger_chain()?;
            let ok = checks.iter().all(|c| c.holds);
            report.push(
                "chain_replay",
                &json!({ "file": label, "holds": ok, "checks": checks }),
            )?;
            if !ok {
                notes.push("chain replay failed".into());
            }
        }
    }
    let holds = certs.iter().all(|c| c.holds) && !notes.iter().any(|n| n.contains("failed"));
    report.push(
        "certificates",
        &json!({ "file": label, "holds": holds, "certificates": certs, "notes": notes }),
    )?;
    Ok(holds)
}

fn verify_many(args: &VerifyArgs, limit: usize) -> Outcome {
    let strategy: RoutingStrategy = args.strategy.parse()?;
    let mut files = args.files.clone();
    if let Some(dir) = &args.dir {
        let entries = fs::read_dir(dir)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", dir.display())))?;
        let mut found: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "prob"))
            .collect();
        found.sort();
        files.extend(found);
    }
    if files.is_empty() {
        return Err(Failure::Usage(
            "verify needs at least one file or --dir".into(),
        ));
    }
    let mut inputs = Vec::new();
    for f in &files {
        inputs.push((f.clone(), read(f)?));
    }
    let digest = if inputs.len() == 1 {
        inputs[0].1 .1.clone()
    } else {
        let joined: Vec<String> = inputs.iter().map(|(_, (_, d))| d.clone()).collect();
        input_digest(joined.join("\n").as_bytes())
    };
    let mut report = ReportEnvelope::new(digest);
    let mut all_hold = true;
    for (path, (problem, _)) in &inputs {
        let label = path.display().to_string();
        let label = if inputs.len() == 1 {
            None
        } else {
            Some(label.as_str())
        };
        if let Problem::Hermitian(h) = problem {
            if h.as_real().is_none() {
                let verdict = stoquasticity_check(h)?;
                report.push(
                    "stoquasticity",
                    &json!({ "file": label, "report": verdict }),
                )?;
                continue;
            }
        }
        let d = decomposition(problem)?;
        all_hold &= certify(&d, args.all, strategy, limit, label, &mut report)?;
    }
    Ok((report, all_hold))
}

fn baa_sim(args: &BaaArgs) -> Outcome {
    let family: Family = args.family.parse()?;
    let method: EstimateMethod = args.method.parse()?;
    let opts = BaaOptions {
        gamma_min: args.gamma_min,
        samples: args.samples,
        theta: args.theta,
        kappa: args.kappa,
        method,
        seed: args.seed,
        ..BaaOptions::default()
    };
    let (init, fin) = family.endpoints()?;
    let mut digest_src = gapcert::io::serialize_decomposition(&init);
    digest_src.push_str(&gapcert::io::serialize_decomposition(&fin));
    let mut report = ReportEnvelope::new(input_digest(digest_src.as_bytes()));
    let (run, ok) = match run_baa(&init, &fin, opts) {
        Ok(run) => (run, true),
        Err(Error::GapCollapse {
            bound,
            gamma_min,
            tau,
            run,
        }) => {
            report.push(
                "gap_collapse",
                &json!({ "bound": bound, "gamma_min": gamma_min, "tau": tau }),
            )?;
            (*run, false)
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &args.csv {
        fs::write(path, run.to_csv())
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    report.push("baa_run", &run)?;
    Ok((report, ok))
}

const FIXTURES: [(&str, &str); 5] = [
    (
        "barrier_path",
        include_str!("../../core/fixtures/barrier_path.prob"),
    ),
    ("p3", include_str!("../../core/fixtures/p3.prob")),
    ("k2", include_str!("../../core/fixtures/k2.prob")),
    ("c4", include_str!("../../core/fixtures/c4.prob")),
    (
        "grid_crossing",
        include_str!("../../core/fixtures/grid_crossing.prob"),
    ),
];

fn selftest(limit: usize) -> Outcome {
    let mut report = ReportEnvelope::new(input_digest(
        FIXTURES
            .iter()
            .map(|(_, t)| *t)
            .collect::<String>()
            .as_bytes(),
    ));
    let mut checks = Vec::new();
    let mut record = |name: &str, value: f64, expected: f64| {
        let ok = (value - expected).abs() <= 1e-9 * expected.abs().max(1.0);
        checks.push(json!({ "name": name, "value": value, "expected": expected, "holds": ok }));
        ok
    };
    let mut ok = true;
    for (name, text) in FIXTURES {
        let d = decomposition(&parse_problem(text)?)?;
        match name {
            "k2" => {
                let a = Analysis::new(&d)?;
                ok &= record("k2: 2h", 2.0 * a.h(), 2.0);
                ok &= record("k2: gamma", a.gamma(), 2.0);
            }
            "p3" => {
                let a = Analysis::new(&d)?;
                ok &= record("p3: h", a.h(), 1.0);
                ok &= record("p3: gamma", a.gamma(), 1.0);
            }
            "c4" => {
                let a = Analysis::new(&d)?;
                ok &= record("c4: gamma", a.gamma(), 2.0);
                ok &= record("c4: h", a.h(), 1.0);
            }
            "barrier_path" => {
                let mut sub = ReportEnvelope::new(String::new());
                let holds = certify(
                    &d,
                    true,
                    RoutingStrategy::ShortestPaths,
                    limit,
                    Some(name),
                    &mut sub,
                )?;
                ok &= record(
                    "barrier path: all certificates hold",
                    holds as u8 as f64,
                    1.0,
                );
            }
            "grid_crossing" => {
                let plan = auto_route(&d.graph, RoutingStrategy::ShortestPaths)?;
                let routed = validate_plan(&d.graph, &plan)?;
                let k = plan.routes.first().map_or(0, |r| r.paths.len());
                ok &= record("grid crossing: paths", k as f64, 2.0);
                ok &= record("grid crossing: minimum residual", routed.min_residual, 0.5);
            }
            _ => unreachable!("fixture list is fixed"),
        }
    }
    report.push("selftest", &json!({ "holds": ok, "checks": checks }))?;
    Ok((report, ok))
}
