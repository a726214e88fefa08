use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rieszlab::experiments::{
    parse_config, parse_depths, run_analysis, run_scenarios, Analysis, BuiltinSeries, IntervalSpec,
    ReportRow, ScenarioConfig, BUILTIN_SUITE, CSV_HEADER,
};
use rieszlab::multiplier::{partial_sums, MultiplierClass, MultiplierSequence};
use rieszlab::oracle::{brute_mean, BRUTE_MEAN_LIMIT};
use rieszlab::summability::riesz_transform;
use rieszlab::{FiniteVector, LabError, NormKind, Result, RieszWeights, TruncationSchedule};

#[derive(Parser)]
#[command(
    name = "rieszlab",
    version,
    about = "Riesz summability and multiplier-space experiments"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Verdict tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Checkpoint depths, e.g. `1000,10000,100000`.
    #[arg(long, global = true)]
    depths: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct Target {
    #[arg(long, default_value = "grandi")]
    series: String,
    #[arg(long, default_value = "ones")]
    multiplier: String,
    #[arg(long, default_value = "cesaro")]
    weights: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file, or the built-in suite.
    Run {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        builtin: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Riesz means of a sequence, one line per n.
    Transform {
        #[arg(long, default_value = "cesaro")]
        weights: String,
        /// A multiplier spec, or `partial:<series>` for partial sums.
        #[arg(long)]
        seq: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Verdicts for all seven multiplier spaces.
    Classify(Target),
    /// Seeded c0 or linf multipliers against a series.
    Probe {
        #[arg(long, default_value = "grandi")]
        series: String,
        #[arg(long, default_value = "linf")]
        class: String,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value = "cesaro")]
        weights: String,
    },
    /// The summing operator at one multiplier, with norm and continuity checks.
    Summing(Target),
    /// Weak against strong Riesz convergence.
    Gap(Target),
    /// The Antosik test matrix over a block partition.
    Antosik {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "pairs:32")]
        intervals: String,
    },
    /// The inclusion chain M, M_f, M_C, M_R.
    Chain(Target),
    #[command(hide = true)]
    OracleCheck {
        #[arg(long, default_value = "cesaro")]
        weights: String,
        #[arg(long, default_value = "c0:0")]
        seq: String,
        #[arg(long, default_value_t = 1000)]
        depth: usize,
    },
}

fn schedule(g: &Global) -> Result<TruncationSchedule> {
    let base = TruncationSchedule::default();
    let depths = match &g.depths {
        Some(d) => parse_depths(d)?,
        None => base.depths().to_vec(),
    };
    let window = depths
        .first()
        .map_or(1, |&d| base.window().min(d.saturating_sub(1)).max(1));
    TruncationSchedule::new(depths, window, g.tol.unwrap_or(base.tol()))
}

fn scenario(g: &Global, t: &Target, analysis: Analysis) -> Result<ScenarioConfig> {
    let mut c = ScenarioConfig::new("cli", t.series.parse::<BuiltinSeries>()?);
    c.multiplier = t.multiplier.parse()?;
    c.weights = t.weights.parse()?;
    c.schedule = schedule(g)?;
    c.seed = g.seed;
    c.analyses = vec![analysis];
    Ok(c)
}

fn emit_rows(rows: &[ReportRow], format: Format) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(out, "{}", r.to_csv())?;
            }
        }
        Format::Jsonl => {
            for r in rows {
                writeln!(out, "{}", json(r))?;
            }
        }
    }
    Ok(())
}

fn json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn analyse(g: &Global, cfg: ScenarioConfig, a: Analysis) -> Result<()> {
    emit_rows(&run_analysis(&cfg, a)?, g.format)
}

fn sequence(spec: &str, dim: usize, n: usize) -> Result<Vec<FiniteVector>> {
    if let Some(series) = spec.strip_prefix("partial:") {
        let s = series.parse::<BuiltinSeries>()?.spec()?;
        return partial_sums(&s, &MultiplierSequence::Ones, n);
    }
    let x: MultiplierSequence = spec.parse()?;
    x.materialize(dim, NormKind::Inf, n)?
        .into_iter()
        .map(FiniteVector::new)
        .collect()
}

#[derive(Serialize)]
struct MeanLine<'a> {
    n: usize,
    mean: &'a [f64],
}

fn transform(g: &Global, weights: &str, seq: &str, depth: usize, dim: usize) -> Result<()> {
    let w: RieszWeights = weights.parse()?;
    let means = riesz_transform(&w, sequence(seq, dim, depth)?, depth)?;
    let mut out = std::io::stdout().lock();
    if g.format == Format::Csv {
        let d = means.first().map_or(0, FiniteVector::dim);
        let cols: Vec<String> = (1..=d).map(|i| format!("mean_{i}")).collect();
        writeln!(out, "n,{}", cols.join(","))?;
    }
    for (i, m) in means.iter().enumerate() {
        match g.format {
            Format::Csv => {
                let vals: Vec<String> = m.as_slice().iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(out, "{},{}", i + 1, vals.join(","))?;
            }
            Format::Jsonl => writeln!(
                out,
                "{}",
                json(&MeanLine {
                    n: i + 1,
                    mean: m.as_slice()
                })
            )?,
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleLine {
    weights: String,
    depth: usize,
    max_abs_diff: f64,
}

/// Compares the streaming transform with the brute-force mean at every n.
fn oracle_check(weights: &str, seq: &str, depth: usize) -> Result<()> {
    if depth > BRUTE_MEAN_LIMIT {
        return Err(LabError::GuardExceeded {
            n: depth,
            limit: BRUTE_MEAN_LIMIT,
        });
    }
    let w: RieszWeights = weights.parse()?;
    let xs = sequence(seq, 1, depth)?;
    let fast = riesz_transform(&w, xs.clone(), depth)?;
    let mut worst: f64 = 0.0;
    for (n, f) in fast.iter().enumerate() {
        let b = brute_mean(&w, xs.iter().cloned(), n + 1)?;
        worst = worst.max(f.distance(&b, NormKind::Inf)?);
    }
    println!(
        "{}",
        json(&OracleLine {
            weights: w.to_string(),
            depth,
            max_abs_diff: worst,
        })
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Run {
            config,
            builtin,
            out,
        } => {
            let text = match (config, builtin) {
                (Some(p), _) => std::fs::read_to_string(p)?,
                (None, true) => BUILTIN_SUITE.to_string(),
                (None, false) => {
                    return Err(LabError::Validation(
                        "give a config path or --builtin".into(),
                    ))
                }
            };
            let mut configs = parse_config(&text)?;
            for c in &mut configs {
                if g.depths.is_some() {
                    c.schedule = schedule(g)?;
                } else if let Some(t) = g.tol {
                    c.schedule = c.schedule.clone().with_tol(t)?;
                }
            }
            let summary = run_scenarios(&configs, &out)?;
            eprintln!(
                "{} scenarios, {} with errors, output in {}",
                summary.count,
                summary.failed,
                out.display()
            );
            return Ok(summary.ok());
        }
        Cmd::Transform {
            ref weights,
            ref seq,
            depth,
            dim,
        } => transform(g, weights, seq, depth, dim)?,
        Cmd::Classify(ref t) => analyse(
            g,
            scenario(g, t, Analysis::Membership)?,
            Analysis::Membership,
        )?,
        Cmd::Probe {
            ref series,
            ref class,
            trials,
            ref weights,
        } => {
            let t = Target {
                series: series.clone(),
                multiplier: "ones".into(),
                weights: weights.clone(),
            };
            let mut c = scenario(g, &t, Analysis::Probe)?;
            c.class = class.parse::<MultiplierClass>()?;
            if trials == 0 {
                return Err(LabError::Validation("trials must be >= 1".into()));
            }
            c.trials = trials;
            analyse(g, c, Analysis::Probe)?;
        }
        Cmd::Summing(ref t) => analyse(g, scenario(g, t, Analysis::Summing)?, Analysis::Summing)?,
        Cmd::Gap(ref t) => analyse(g, scenario(g, t, Analysis::Gap)?, Analysis::Gap)?,
        Cmd::Antosik {
            ref target,
            ref intervals,
        } => {
            let mut c = scenario(g, target, Analysis::Antosik)?;
            c.intervals = intervals.parse::<IntervalSpec>()?;
            analyse(g, c, Analysis::Antosik)?;
        }
        Cmd::Chain(ref t) => analyse(g, scenario(g, t, Analysis::Chain)?, Analysis::Chain)?,
        Cmd::OracleCheck {
            ref weights,
            ref seq,
            depth,
        } => oracle_check(weights, seq, depth)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
