//! Command-line front end: every subsystem behind one binary with
//! machine-readable outputs.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 node-budget abort.
//! Errors are emitted as a JSON object on stderr. Every JSON output carries
//! `schema_version` and an echo of the fully resolved configuration.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use zippered::counting::{
    count_grid, CountOptions, CountReport, EnumQuery, OrbitMode, SectorQuery, DEFAULT_BUDGET,
};
use zippered::induction::{random_simplex_point, zorich_step_detailed, IETPoint};
use zippered::measure::{lemma2_bracket, mc_cylinder, mc_expansion, McConfig};
use zippered::perm::{Op, Permutation, RauzyClass};
use zippered::rect::{first_return, interior_margin, on_transversal, u_map, DeltaCoords, Violation};
use zippered::symbolic::{cylinder_leb, Word};
use zippered::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "zippered", version, about = "Rauzy-Veech-Zorich renormalization toolkit")]
struct Cli {
    /// Worker threads (the THREADS environment variable overrides this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Key=value configuration file, lowest precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Zero wallclock fields for byte-stable output comparison.
    #[arg(long, global = true)]
    zero_timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rauzy classes and diagrams.
    Rauzy {
        #[command(subcommand)]
        cmd: RauzyCmd,
    },
    /// Interval exchange induction trajectories.
    Iet {
        #[command(subcommand)]
        cmd: IetCmd,
    },
    /// Word inspection.
    Words {
        #[command(subcommand)]
        cmd: WordsCmd,
    },
    /// Periodic-orbit and word counting.
    Orbits {
        #[command(subcommand)]
        cmd: OrbitsCmd,
    },
    /// Zippered-rectangle identity checks.
    Zip {
        #[command(subcommand)]
        cmd: ZipCmd,
    },
    /// Monte-Carlo measure checks.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
}

#[derive(Subcommand)]
enum RauzyCmd {
    /// BFS closure of a permutation under both operations.
    Class {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum IetCmd {
    /// Accelerated induction trajectory, one JSON line per step.
    Orbit {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = NumMode::Float)]
        mode: NumMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NumMode {
    Float,
    Rational,
}

#[derive(Subcommand)]
enum WordsCmd {
    /// Letters, matrix, admissibility, canonical form, cylinder volume.
    Info {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OrbitsCmd {
    /// Grid counts of admissible words and orbits with slope fits.
    Count(CountArgs),
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    pi: String,
    #[arg(long = "Tmin")]
    t_min: f64,
    #[arg(long = "Tmax")]
    t_max: f64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Word tokens like "a1,b1", chained from --pi.
    #[arg(long)]
    prefix: Option<String>,
    #[arg(long, value_enum)]
    sector: Option<SectorChoice>,
    #[arg(long, value_enum, default_value_t = OrbitModeChoice::Canonical)]
    orbit_mode: OrbitModeChoice,
    /// Node budget for the whole grid (0 = default 10^9).
    #[arg(long, default_value_t = 0)]
    budget: u64,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print the JSON summary to stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SectorChoice {
    /// Loops based at pi whose first letter uses operation a.
    #[value(alias = "Wpi")]
    Wpi,
    /// Loops based at pi whose first letter uses operation b.
    #[value(alias = "Wpi-prime")]
    WpiPrime,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrbitModeChoice {
    Canonical,
    Any,
}

#[derive(Subcommand)]
enum ZipCmd {
    /// Constraint equivalence, area identity, volume and scaling checks.
    Check {
        #[arg(long)]
        pi: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Two-cylinder frequency ratio against the exact volume ratio.
    Cylinder {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        word2: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
    },
    /// Birkhoff bracket for sandwich words q tilde q.
    Bracket {
        #[arg(long)]
        pi: String,
        #[arg(long)]
        q: String,
        /// Repeatable middle words, chained from q's endpoint.
        #[arg(long = "tilde")]
        tildes: Vec<String>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        spread_limit: f64,
    },
    /// Leaf-measure expansion/contraction ratios under the flow.
    Expansion {
        #[arg(long)]
        pi: String,
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
    },
}

fn main() -> ExitCode {
    // usage errors exit 1 (code 2 is reserved for resource-cap aborts)
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let payload = json!({ "error": e.to_string(), "kind": "usage" });
            eprintln!("{payload}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            let kind = match &err {
                Error::BudgetExceeded { .. } => "budget",
                Error::Parse(_) | Error::InvalidInput(_) | Error::NotAPermutation(_) => "usage",
                _ => "validation",
            };
            let payload = json!({ "error": err.to_string(), "kind": kind });
            eprintln!("{payload}");
            if matches!(err, Error::BudgetExceeded { .. }) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[derive(Default)]
struct FileConfig {
    threads: Option<usize>,
    budget: Option<u64>,
    seed: Option<u64>,
}

fn load_config(path: Option<&PathBuf>) -> Result<FileConfig, Error> {
    let mut out = FileConfig::default();
    let Some(path) = path else { return Ok(out) };
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let value = value.trim();
        match key.trim() {
            "threads" => out.threads = Some(parse_num(value)?),
            "budget" => out.budget = Some(parse_num(value)?),
            "seed" => out.seed = Some(parse_num(value)?),
            other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, Error>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| Error::Parse(format!("bad number '{s}': {e}")))
}

/// Precedence: THREADS env var, then the flag, then the config file.
fn resolve_threads(flag: Option<usize>, file: &FileConfig) -> Result<usize, Error> {
    if let Ok(env) = std::env::var("THREADS") {
        return parse_num(&env);
    }
    Ok(flag.or(file.threads).unwrap_or(1).max(1))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidInput(format!("write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_word(pi: &str, tokens: &str) -> Result<Word, Error> {
    let base = Permutation::parse(pi)?;
    let toks = Word::parse_tokens(tokens)?;
    Word::from_tokens(&base, &toks)
}

/// Exact rational from `p/q`, an integer, or a decimal literal.
fn parse_rational(s: &str) -> Result<BigRational, Error> {
    use num_bigint::BigInt;
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
        let d: BigInt = den.trim().parse().map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
        if d == BigInt::from(0) {
            return Err(Error::Parse(format!("'{s}': zero denominator")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let n: BigInt = digits.parse().map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|e| Error::Parse(format!("'{s}': {e}")))?;
    Ok(BigRational::from_integer(n))
}

fn letters_json(word: &Word) -> serde_json::Value {
    json!(word
        .letters()
        .iter()
        .map(|l| json!({"c": l.op.to_string(), "n": l.n, "pi": l.pi.images_one_indexed()}))
        .collect::<Vec<_>>())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let file_cfg = load_config(cli.config.as_ref())?;
    let threads = resolve_threads(cli.threads, &file_cfg)?;
    let zero_timings = cli.zero_timings;

    match cli.command {
        Command::Rauzy { cmd } => match cmd {
            RauzyCmd::Class { pi, out } => {
                let class = RauzyClass::new(&Permutation::parse(&pi)?)?;
                let mut payload = class.to_json();
                payload["schema_version"] = json!(SCHEMA_VERSION);
                payload["config"] = json!({"pi": pi, "threads": threads});
                emit(out.as_ref(), &serde_json::to_string_pretty(&payload).unwrap())?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Iet { cmd } => match cmd {
            IetCmd::Orbit { pi, lambda, steps, mode, out } => {
                let perm = Permutation::parse(&pi)?;
                let parts: Vec<f64> = lambda
                    .split(',')
                    .map(|t| parse_num::<f64>(t.trim()))
                    .collect::<Result<_, _>>()?;
                let mut lines = Vec::with_capacity(steps + 1);
                lines.push(
                    json!({
                        "schema_version": SCHEMA_VERSION,
                        "config": {"pi": pi, "lambda": lambda, "steps": steps,
                                   "mode": if mode == NumMode::Float {"float"} else {"rational"},
                                   "threads": threads},
                    })
                    .to_string(),
                );
                match mode {
                    NumMode::Float => {
                        let mut p = IETPoint::new_normalized(parts, perm)?;
                        for _ in 0..steps {
                            // rational length ratios degenerate (tie or
                            // stall); report and stop rather than fail
                            let (next, letter, records) = match zorich_step_detailed(&p) {
                                Ok(v) => v,
                                Err(e) => {
                                    lines.push(json!({"status": e.to_string()}).to_string());
                                    break;
                                }
                            };
                            let shrink: f64 = records.iter().map(|r| r.shrink).product();
                            lines.push(
                                json!({
                                    "letter": {"c": letter.op.to_string(), "n": letter.n},
                                    "lambda": next.lambda(),
                                    "shrink": shrink,
                                })
                                .to_string(),
                            );
                            p = next;
                        }
                    }
                    NumMode::Rational => {
                        let rats: Vec<BigRational> = lambda
                            .split(',')
                            .map(|t| parse_rational(t.trim()))
                            .collect::<Result<_, _>>()?;
                        let mut p = IETPoint::new_normalized(rats, perm)?;
                        for _ in 0..steps {
                            // rational points are degenerate for the
                            // dynamics: ties end the trajectory cleanly
                            let (next, letter, records) = match zorich_step_detailed(&p) {
                                Ok(v) => v,
                                Err(e) => {
                                    lines.push(json!({"status": e.to_string()}).to_string());
                                    break;
                                }
                            };
                            let shrink = records
                                .iter()
                                .fold(BigRational::from_integer(1.into()), |acc, r| {
                                    acc * r.shrink.clone()
                                });
                            lines.push(
                                json!({
                                    "letter": {"c": letter.op.to_string(), "n": letter.n},
                                    "lambda": next
                                        .lambda()
                                        .iter()
                                        .map(|x| x.to_string())
                                        .collect::<Vec<_>>(),
                                    "shrink": shrink.to_string(),
                                })
                                .to_string(),
                            );
                            p = next;
                        }
                    }
                }
                emit(out.as_ref(), &lines.join("\n"))?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Words { cmd } => match cmd {
            WordsCmd::Info { pi, word, out } => {
                let w = parse_word(&pi, &word)?;
                let mat = w.matrix();
                let admissible = w.is_admissible();
                let mut payload = json!({
                    "schema_version": SCHEMA_VERSION,
                    "config": {"pi": pi, "word": word, "threads": threads},
                    "letters": letters_json(&w),
                    "target": w.last().target().images_one_indexed(),
                    "matrix": mat.to_json(),
                    "col_norm": mat.col_norm().to_string(),
                    "log_col_norm": mat.log_col_norm(),
                    "primitive": mat.is_primitive(),
                    "closes_up": w.closes_up(),
                    "admissible": admissible,
                    "cylinder_leb": cylinder_leb(&w).to_string(),
                });
                if admissible {
                    let canon = w.canonical_form()?;
                    let (point, log_rho) = zippered::periodic_point(&w)?;
                    payload["canonical_letters"] = letters_json(&canon);
                    payload["log_rho"] = json!(log_rho);
                    payload["periodic_lambda"] = json!(point.lambda());
                }
                emit(out.as_ref(), &serde_json::to_string_pretty(&payload).unwrap())?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Orbits { cmd } => match cmd {
            OrbitsCmd::Count(args) => run_count(args, threads, zero_timings, &file_cfg),
        },
        Command::Zip { cmd } => match cmd {
            ZipCmd::Check { pi, samples, seed, out } => {
                let report = zip_check(&pi, samples, seed, threads)?;
                emit(out.as_ref(), &serde_json::to_string_pretty(&report).unwrap())?;
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Measure { cmd } => run_measure(cmd, threads),
    }
}

fn run_count(
    args: CountArgs,
    threads: usize,
    zero_timings: bool,
    file_cfg: &FileConfig,
) -> Result<ExitCode, Error> {
    let base = Permutation::parse(&args.pi)?;
    let class = RauzyClass::new(&base)?;
    if !(args.step > 0.0) {
        return Err(Error::InvalidInput("step must be positive".into()));
    }
    let mut grid = Vec::new();
    let mut t = args.t_min;
    while t <= args.t_max + 1e-9 {
        grid.push(t);
        t += args.step;
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty T grid".into()));
    }
    let prefix = match &args.prefix {
        Some(tokens) => Some(parse_word(&args.pi, tokens)?),
        None => None,
    };
    let sector = args.sector.map(|choice| SectorQuery {
        base: base.clone(),
        first: match choice {
            SectorChoice::Wpi => Op::A,
            SectorChoice::WpiPrime => Op::B,
        },
    });
    let budget = if args.budget != 0 {
        args.budget
    } else {
        file_cfg.budget.unwrap_or(0)
    };
    let query = EnumQuery { class, t_bound: grid[0], prefix, sector };
    let opts = CountOptions {
        budget,
        threads,
        orbit_mode: match args.orbit_mode {
            OrbitModeChoice::Canonical => OrbitMode::CanonicalWithinBound,
            OrbitModeChoice::Any => OrbitMode::AnyRotationWithinBound,
        },
    };
    let mut report = count_grid(&query, &grid, &opts)?;
    if zero_timings {
        report.wallclock_seconds = 0.0;
        for row in &mut report.rows {
            row.seconds = 0.0;
        }
    }
    let csv = render_csv(&report);
    emit(args.out.as_ref(), csv.trim_end())?;
    if args.json || args.out.is_some() {
        let summary = json!({
            "schema_version": SCHEMA_VERSION,
            "config": {
                "pi": args.pi,
                "Tmin": args.t_min,
                "Tmax": args.t_max,
                "step": args.step,
                "prefix": args.prefix,
                "sector": args.sector.map(|s| match s {
                    SectorChoice::Wpi => "Wpi",
                    SectorChoice::WpiPrime => "Wpi-prime",
                }),
                "orbit_mode": match args.orbit_mode {
                    OrbitModeChoice::Canonical => "canonical",
                    OrbitModeChoice::Any => "any",
                },
                "budget": if budget == 0 { DEFAULT_BUDGET } else { budget },
                "threads": threads,
            },
            "report": report,
        });
        println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    }
    if report.aborted {
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn render_csv(report: &CountReport) -> String {
    let mut out = String::from("T,n_words,n_orbits,nodes,seconds\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{:.6}\n",
            trim_float(row.t),
            row.n_words,
            row.n_orbits,
            row.nodes,
            row.seconds
        ));
    }
    out
}

fn trim_float(x: f64) -> String {
    if (x - x.round()).abs() < 1e-12 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x}")
    }
}

fn zip_check(
    pi: &str,
    samples: u64,
    seed: u64,
    threads: usize,
) -> Result<serde_json::Value, Error> {
    use rand::SeedableRng;
    let perm = Permutation::parse(pi)?;
    let m = perm.len();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let mut cone_inside_ok = 0u64;
    let mut cone_outside_ok = 0u64;
    let mut cone_inside = 0u64;
    let mut cone_outside = 0u64;
    let mut max_area_rel_err = 0.0f64;
    let mut max_roundtrip_err = 0.0f64;
    let mut umap_checked = 0u64;
    let mut umap_area_max_err = 0.0f64;
    let mut lift_checked = 0u64;
    let mut lift_ok = 0u64;

    for _ in 0..samples {
        let delta: Vec<f64> =
            (0..m).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let lambda = random_simplex_point(m, &mut rng);
        let d = DeltaCoords::new(lambda.clone(), perm.clone(), delta)?;
        let margin = interior_margin(&d);
        if margin.abs() < 1e-7 {
            continue;
        }
        let zip_violations: Vec<Violation> = d
            .to_rectangle()
            .validate()
            .into_iter()
            .filter(|v| !matches!(v, Violation::ZipOne { .. }))
            .collect();
        if margin > 0.0 {
            cone_inside += 1;
            if zip_violations.is_empty() {
                cone_inside_ok += 1;
            }
            let rect = d.to_rectangle();
            let by_delta = d.area();
            let by_h = rect.area();
            max_area_rel_err =
                max_area_rel_err.max((by_delta - by_h).abs() / by_h.abs().max(1e-300));
            let back = rect.to_delta();
            for (x, y) in back.delta.iter().zip(&d.delta) {
                max_roundtrip_err = max_roundtrip_err.max((x - y).abs());
            }
            if let Ok((next, _)) = u_map(&d) {
                umap_checked += 1;
                umap_area_max_err = umap_area_max_err
                    .max((next.area() - by_delta).abs() / by_delta.abs().max(1e-300));
            }
            if on_transversal(&d).is_some() {
                lift_checked += 1;
                if let (Ok(fr), Ok(p)) = (first_return(&d), IETPoint::new(lambda, perm.clone())) {
                    if let Ok((q, letter)) = zippered::zorich_step(&p) {
                        let close = fr.point.pi == *q.pi()
                            && fr
                                .point
                                .lambda
                                .iter()
                                .zip(q.lambda())
                                .all(|(a, b)| (a - b).abs() < 1e-9)
                            && fr.letter == letter;
                        if close {
                            lift_ok += 1;
                        }
                    }
                }
            }
        } else {
            cone_outside += 1;
            if !zip_violations.is_empty() {
                cone_outside_ok += 1;
            }
        }
    }

    // volume and scaling ratios via the measure harness
    let mc = mc_expansion(
        &perm,
        0.1,
        &McConfig { seed, samples: samples.max(1_000), tolerance_sigmas: 3.0 },
    )?;

    let equiv_pass = cone_inside_ok == cone_inside && cone_outside_ok == cone_outside;
    let area_pass = max_area_rel_err <= 1e-12;
    let round_pass = max_roundtrip_err <= 1e-12;
    let lift_pass = lift_checked > 0 && lift_ok == lift_checked;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "config": {"pi": pi, "samples": samples, "seed": seed, "threads": threads},
        "constraint_equivalence": {
            "inside_cone": cone_inside,
            "inside_valid": cone_inside_ok,
            "outside_cone": cone_outside,
            "outside_flagged": cone_outside_ok,
            "pass": equiv_pass,
        },
        "area_identity": {"max_rel_err": max_area_rel_err, "pass": area_pass},
        "round_trip": {"max_err": max_roundtrip_err, "pass": round_pass},
        "u_map": {"checked": umap_checked, "area_max_rel_err": umap_area_max_err,
                   "pass": umap_area_max_err <= 1e-12},
        "first_return_lift": {"checked": lift_checked, "ok": lift_ok, "pass": lift_pass},
        "flow_scaling": {
            "f_plus": mc.f_plus,
            "f_minus": mc.f_minus,
            "volume_ratio": mc.volume_ratio,
            "volume_rel_err": mc.volume_rel_err,
            "pass": mc.pass,
        },
        "pass": equiv_pass && area_pass && round_pass && lift_pass && mc.pass,
    }))
}

fn run_measure(cmd: MeasureCmd, threads: usize) -> Result<ExitCode, Error> {
    match cmd {
        MeasureCmd::Cylinder { pi, word, word2, samples, seed, sigmas } => {
            let w1 = parse_word(&pi, &word)?;
            let w2 = parse_word(&pi, &word2)?;
            let cfg = McConfig { seed, samples, tolerance_sigmas: sigmas };
            let report = mc_cylinder(&w1, &w2, &cfg)?;
            let payload = json!({
                "schema_version": SCHEMA_VERSION,
                "config": {"pi": pi, "word": word, "word2": word2, "seed": seed,
                           "samples": samples, "sigmas": sigmas, "threads": threads},
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        MeasureCmd::Bracket { pi, q, tildes, samples, seed, spread_limit } => {
            let q_word = parse_word(&pi, &q)?;
            let tilde_words: Vec<Word> = tildes
                .iter()
                .map(|t| {
                    // middle words chain from q's endpoint
                    let base = q_word.last().target();
                    let toks = Word::parse_tokens(t)?;
                    Word::from_tokens(&base, &toks)
                })
                .collect::<Result<_, _>>()?;
            let cfg = McConfig { seed, samples, tolerance_sigmas: 3.0 };
            let report = lemma2_bracket(&q_word, &tilde_words, &cfg, spread_limit)?;
            let payload = json!({
                "schema_version": SCHEMA_VERSION,
                "config": {"pi": pi, "q": q, "tildes": tildes, "seed": seed,
                           "samples": samples, "spread_limit": spread_limit, "threads": threads},
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        MeasureCmd::Expansion { pi, t, samples, seed, sigmas } => {
            let perm = Permutation::parse(&pi)?;
            let cfg = McConfig { seed, samples, tolerance_sigmas: sigmas };
            let report = mc_expansion(&perm, t, &cfg)?;
            let payload = json!({
                "schema_version": SCHEMA_VERSION,
                "config": {"pi": pi, "t": t, "seed": seed, "samples": samples,
                           "sigmas": sigmas, "threads": threads},
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            Ok(ExitCode::SUCCESS)
        }
    }
}
