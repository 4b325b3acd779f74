//! Command-line front end: parse point files, run trajectories, construct
//! sensitivity witnesses, certify scrambled pairs, refute candidate
//! scrambled sets, search mod-1 hitting times, and drive seeded sweeps.
//!
//! Exit codes: 0 on success, 2 on invalid input, 3 when a search budget ran
//! out (partial evidence is still printed). Set LIYORKE_LOG=debug for
//! diagnostics on stderr.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use liyorke_core::io::{
    self, certificate_value, format_decimal, prediction_value, report_value, witness_value,
};
use liyorke_core::sample::{neighborhood_for, random_case1_point, random_const_point};
use liyorke_core::*;

/// Certification cost grows like exp(2^(M-1)); beyond this free index the
/// default budget has no chance, so the witness command refuses early.
const MAX_WITNESS_INDEX: usize = 12;

#[derive(Parser)]
#[command(
    name = "liyorke",
    version,
    about = "Trajectories, sensitivity witnesses, and scrambled-pair certification \
             for a harmonically driven skew product"
)]
struct Cli {
    /// Numeric tolerance for fast-forward evolution (at most 1e-6).
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Step budget for hitting-time searches and certification.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,

    /// Modulus tolerance for certification and refutation (in (0, 0.1]).
    #[arg(long, global = true, default_value_t = 1e-3)]
    eps: f64,

    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format; defaults to csv for row-oriented commands (iterate,
    /// sweep) and json for document-oriented ones.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a point and print trajectory rows at log-spaced times.
    Iterate {
        /// Point JSON file.
        point_file: PathBuf,
        /// Horizon: largest step count to report.
        #[arg(long, default_value_t = 10_000)]
        n: u64,
    },
    /// Construct a proximity witness inside a neighborhood of a point.
    Witness {
        /// Point JSON file (the neighborhood center).
        point_file: PathBuf,
        /// Neighborhood radius on the circle coordinate.
        #[arg(long)]
        delta: f64,
        /// First coordinate index the neighborhood leaves unconstrained.
        #[arg(long, default_value_t = 1)]
        free_index: usize,
    },
    /// Certify a mixed pair as scrambled, or predict a same-shape pair's
    /// limiting distance.
    Certify {
        /// Pair JSON file: {"x": <point>, "y": <point>}.
        pair_file: PathBuf,
    },
    /// Scan a candidate scrambled set for a provably convergent pair.
    RefuteSet {
        /// Set JSON file: {"points": [<point>, ...]}.
        set_file: PathBuf,
    },
    /// Find the first time a dyadically weighted harmonic sum enters a
    /// mod-1 target ball.
    Lemma1 {
        /// Dyadic weight exponent: the sum is scaled by 2^-p.
        #[arg(long)]
        p: u32,
        /// Harmonic start: the sum begins at 1/m.
        #[arg(long)]
        m: u64,
        /// Target on the circle.
        #[arg(long)]
        target: f64,
        /// Ball radius around the target; defaults to --eps.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Search budget; defaults to --budget.
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Run the witness + certification pipeline over seeded random inputs.
    Sweep {
        /// Number of sampled inputs.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("LIYORKE_LOG"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            if let Err(e) = emit(&cli.out, &output) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            match failure {
                Failure::Input(message) => {
                    eprintln!("error: {message}");
                    ExitCode::from(2)
                }
                Failure::BudgetExhausted { message, partial } => {
                    // Partial evidence still goes to the requested sink so
                    // callers can inspect how far the search got.
                    if let Err(e) = emit(&cli.out, &partial) {
                        eprintln!("error: cannot write output: {e}");
                        return ExitCode::from(2);
                    }
                    eprintln!("error: {message}");
                    ExitCode::from(3)
                }
            }
        }
    }
}

enum Failure {
    Input(String),
    BudgetExhausted { message: String, partial: String },
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if !(cli.tol > 0.0 && cli.tol <= 1e-6) {
        return Err(Failure::Input(format!("--tol must lie in (0, 1e-6], got {}", cli.tol)));
    }
    if cli.budget < 1 {
        return Err(Failure::Input("--budget must be at least 1".to_string()));
    }
    if !(cli.eps > 0.0 && cli.eps <= 0.1) {
        return Err(Failure::Input(format!("--eps must lie in (0, 0.1], got {}", cli.eps)));
    }
    match &cli.command {
        Command::Iterate { point_file, n } => cmd_iterate(cli, point_file, *n),
        Command::Witness { point_file, delta, free_index } => {
            cmd_witness(cli, point_file, *delta, *free_index)
        }
        Command::Certify { pair_file } => cmd_certify(cli, pair_file),
        Command::RefuteSet { set_file } => cmd_refute_set(cli, set_file),
        Command::Lemma1 { p, m, target, epsilon, n_max } => {
            cmd_lemma1(cli, *p, *m, *target, *epsilon, *n_max)
        }
        Command::Sweep { samples } => cmd_sweep(cli, *samples),
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn format_for(cli: &Cli, row_oriented: bool) -> Format {
    cli.format.unwrap_or(if row_oriented { Format::Csv } else { Format::Json })
}

/// Document commands have no tabular form; reject csv instead of guessing.
fn require_json(cli: &Cli, command: &str) -> Result<(), Failure> {
    if cli.format == Some(Format::Csv) {
        return Err(Failure::Input(format!("{command} has no csv form; use --format json")));
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("built documents serialize")
}

/// Step counts 0, then one per octave-eighth of the log scale, then the
/// horizon itself.
fn log_spaced(horizon: u64) -> Vec<u64> {
    let mut times = vec![0u64];
    let mut k = 0u32;
    loop {
        let t = 10f64.powf(k as f64 / 8.0).floor() as u64;
        if t > horizon {
            break;
        }
        if t > *times.last().expect("seeded with 0") {
            times.push(t);
        }
        k += 1;
    }
    if *times.last().expect("seeded with 0") < horizon {
        times.push(horizon);
    }
    times
}

fn coordinate_label(v: ExtNat) -> String {
    match v {
        ExtNat::Finite(k) => k.to_string(),
        ExtNat::Infinity => "inf".to_string(),
    }
}

fn cmd_iterate(cli: &Cli, point_file: &PathBuf, n: u64) -> Result<String, Failure> {
    let point = io::point_from_str(&read_file(point_file)?).map_err(Failure::input)?;
    let started = Instant::now();
    let times = log_spaced(n);
    let mut rows = Vec::with_capacity(times.len());
    for &t in &times {
        let state = evolve(&point, t, cli.tol);
        let coords: Vec<String> = (1..=8).map(|i| coordinate_label(state.coordinate(i))).collect();
        let d = metric_d(&state, &point, cli.tol);
        rows.push((t, format_decimal(state.x0().get()), coords, format_decimal(d)));
    }
    log::debug!("iterate: {} rows over horizon {n} in {:?}", rows.len(), started.elapsed());

    match format_for(cli, true) {
        Format::Csv => {
            let mut out = String::from("n,x0,x1,x2,x3,x4,x5,x6,x7,x8,d_to_initial\n");
            for (t, x0, coords, d) in rows {
                writeln!(out, "{t},{x0},{},{d}", coords.join(",")).expect("writing to a string");
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .into_iter()
                .map(|(t, x0, coords, d)| {
                    json!({"n": t, "x0": x0, "coordinates": coords, "d_to_initial": d})
                })
                .collect();
            Ok(pretty(&json!({"horizon": n, "rows": rows})))
        }
    }
}

fn cmd_witness(
    cli: &Cli,
    point_file: &PathBuf,
    delta: f64,
    free_index: usize,
) -> Result<String, Failure> {
    require_json(cli, "witness")?;
    let point = io::point_from_str(&read_file(point_file)?).map_err(Failure::input)?;
    let u = NeighborhoodSpec::new(delta, free_index).map_err(Failure::input)?;
    let (y, params) = ly_witness(&point, &u).map_err(Failure::input)?;
    if params.m > MAX_WITNESS_INDEX {
        return Err(Failure::Input(format!(
            "the requested neighborhood forces construction index M = {} \
             (> {MAX_WITNESS_INDEX}); certifying such a pair needs around exp(2^{}) steps, \
             beyond the default configuration",
            params.m,
            params.m - 1
        )));
    }
    let distance = metric_d(&point, &y, cli.tol);
    let contained = in_neighborhood(&y, &point, &u);
    Ok(pretty(&witness_value(&point, &y, &params, distance, contained)))
}

fn cmd_certify(cli: &Cli, pair_file: &PathBuf) -> Result<String, Failure> {
    require_json(cli, "certify")?;
    let (x, y) = io::pair_from_str(&read_file(pair_file)?).map_err(Failure::input)?;
    let started = Instant::now();
    let mixed = x.infinity_start().is_some() != y.infinity_start().is_some();
    if mixed {
        match certify_scrambled(&x, &y, cli.eps, cli.budget) {
            Ok(cert) => {
                log::debug!("certify: complete evidence in {:?}", started.elapsed());
                Ok(pretty(&certificate_value(&cert, "scrambled-evidence")))
            }
            Err(CertifyError::BudgetExhausted { partial }) => Err(Failure::BudgetExhausted {
                message: format!(
                    "budget {} exhausted with {} proximal and {} separation times",
                    cli.budget,
                    partial.proximal.len(),
                    partial.separation.len()
                ),
                partial: pretty(&certificate_value(&partial, "budget-exhausted")),
            }),
            Err(e) => Err(Failure::input(e)),
        }
    } else {
        match predict_limit(&x, &y) {
            Ok(prediction) => Ok(pretty(&prediction_value(&prediction))),
            Err(CertifyError::InfinityStartMismatch { left, right }) => {
                // Same shape class but no convergent distance and no
                // certifiable dominant term: report rather than reject.
                Ok(pretty(&json!({
                    "verdict": "unclassified",
                    "reason": format!(
                        "both points are ∞-tailed but from different indices ({left} and \
                         {right}); the distance has no closed-form limit and the pair may \
                         be scrambled"
                    ),
                })))
            }
            Err(e) => Err(Failure::input(e)),
        }
    }
}

fn cmd_refute_set(cli: &Cli, set_file: &PathBuf) -> Result<String, Failure> {
    require_json(cli, "refute-set")?;
    let points = io::set_from_str(&read_file(set_file)?).map_err(Failure::input)?;
    let report = refute_scrambled_set(&points, cli.eps, cli.budget).map_err(Failure::input)?;
    Ok(pretty(&report_value(&report)))
}

fn cmd_lemma1(
    cli: &Cli,
    p: u32,
    m: u64,
    target: f64,
    epsilon: Option<f64>,
    n_max: Option<u64>,
) -> Result<String, Failure> {
    require_json(cli, "lemma1")?;
    let epsilon = epsilon.unwrap_or(cli.eps);
    let n_max = n_max.unwrap_or(cli.budget);
    let target = CircleValue::new(target);
    let req = HitRequest::new(p, m, target, epsilon, n_max).map_err(Failure::input)?;
    match find_mod1_hit(&req) {
        Ok(v) => {
            let value = req.value_at(v);
            Ok(pretty(&json!({
                "verdict": "hit",
                "step": v,
                "value": format_decimal(value.get()),
                "target": format_decimal(target.get()),
                "distance": format_decimal(circle_dist(value, target)),
                "epsilon": format_decimal(epsilon),
            })))
        }
        Err(HarmonicError::BudgetExhausted { n_max, best_step, best_dist }) => {
            Err(Failure::BudgetExhausted {
                message: format!("no hit within {n_max} steps; closest was {best_dist:.3e}"),
                partial: pretty(&json!({
                    "verdict": "budget-exhausted",
                    "n_max": n_max,
                    "best_step": best_step,
                    "best_distance": format_decimal(best_dist),
                })),
            })
        }
        Err(e) => Err(Failure::input(e)),
    }
}

/// One sweep sample: the generated center, the witness, and the
/// certification outcome, flattened into cells.
struct SweepRow {
    case: &'static str,
    m: usize,
    k: Option<u64>,
    delta: f64,
    outcome: Result<PairCertificate, String>,
}

fn sweep_sample(rng: &mut ChaCha8Rng, eps: f64, budget: u64) -> SweepRow {
    // Alternate center shapes the same way the acceptance inputs do: ∞
    // tails with small starts, or constant tails with shallow free indices,
    // keeping certification inside the default budget.
    let (x, u) = if rng.random_bool(0.5) {
        let x = random_case1_point(rng, 4, 50);
        let u = neighborhood_for(rng, &x, &[0.25, 0.05]);
        (x, u)
    } else {
        let x = random_const_point(rng, 4, 50);
        let delta = if rng.random_bool(0.5) { 0.25 } else { 0.5 };
        let free_index = rng.random_range(1..=2usize);
        (x, NeighborhoodSpec::new(delta, free_index).expect("palette radii are valid"))
    };
    match ly_witness(&x, &u) {
        Ok((y, params)) => SweepRow {
            case: params.kind.label(),
            m: params.m,
            k: params.k,
            delta: u.delta(),
            outcome: certify_scrambled(&x, &y, eps, budget).map_err(|e| match e {
                CertifyError::BudgetExhausted { .. } => "budget-exhausted".to_string(),
                other => other.to_string(),
            }),
        },
        Err(e) => {
            SweepRow { case: "none", m: 0, k: None, delta: u.delta(), outcome: Err(e.to_string()) }
        }
    }
}

fn cmd_sweep(cli: &Cli, samples: usize) -> Result<String, Failure> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    // Inputs are drawn sequentially so the sample sequence depends only on
    // the seed; the independent per-sample certifications then run in
    // parallel, and collection preserves sample order.
    let mut sample_rngs = Vec::with_capacity(samples);
    for _ in 0..samples {
        sample_rngs.push(ChaCha8Rng::seed_from_u64(rng.random()));
    }
    let rows: Vec<SweepRow> = sample_rngs
        .into_par_iter()
        .map(|mut sample_rng| sweep_sample(&mut sample_rng, cli.eps, cli.budget))
        .collect();
    log::info!("sweep: {samples} samples in {:?}", started.elapsed());

    let cells = |row: &SweepRow| -> Vec<String> {
        let k_cell = row.k.map(|k| k.to_string()).unwrap_or_default();
        match &row.outcome {
            Ok(cert) => vec![
                row.case.to_string(),
                row.m.to_string(),
                k_cell,
                format_decimal(row.delta),
                cert.liminf_upper_bound().map(format_decimal).unwrap_or_default(),
                cert.limsup_lower_bound().map(format_decimal).unwrap_or_default(),
                cert.proximal.len().to_string(),
                cert.separation.len().to_string(),
                cert.proximal.first().map(|td| td.time.to_string()).unwrap_or_default(),
                cert.separation.first().map(|td| td.time.to_string()).unwrap_or_default(),
                "ok".to_string(),
            ],
            Err(status) => vec![
                row.case.to_string(),
                row.m.to_string(),
                k_cell,
                format_decimal(row.delta),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                status.clone(),
            ],
        }
    };

    match format_for(cli, true) {
        Format::Csv => {
            let mut out = String::from(
                "sample,case,m,k,delta,liminf_upper_bound,limsup_lower_bound,proximal_count,\
                 separation_count,first_proximal_time,first_separation_time,status\n",
            );
            for (idx, row) in rows.iter().enumerate() {
                writeln!(out, "{idx},{}", cells(row).join(",")).expect("writing to a string");
            }
            Ok(out)
        }
        Format::Json => {
            let names = [
                "case",
                "m",
                "k",
                "delta",
                "liminf_upper_bound",
                "limsup_lower_bound",
                "proximal_count",
                "separation_count",
                "first_proximal_time",
                "first_separation_time",
                "status",
            ];
            let rows: Vec<serde_json::Value> = rows
                .iter()
                .enumerate()
                .map(|(idx, row)| {
                    let mut doc = serde_json::Map::new();
                    doc.insert("sample".to_string(), json!(idx));
                    for (name, cell) in names.iter().zip(cells(row)) {
                        doc.insert((*name).to_string(), json!(cell));
                    }
                    serde_json::Value::Object(doc)
                })
                .collect();
            Ok(pretty(&json!({"samples": rows.len(), "rows": rows})))
        }
    }
}
