use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use market_survival::config::{parse_config, resolve, ConfigError, ScenarioConfig};
use market_survival::report::{run_seed, write_trajectory_csv, BatchSummary, SeedResult};
use market_survival::scenarios::{catalog, find};
use rayon::prelude::*;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "market-survival", version, about = "Run and verify survival-strategy market scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario for every seed and write trajectories plus a summary.
    Run(RunArgs),
    /// Print the built-in scenarios.
    ListScenarios {
        /// Emit the catalog, including full scenario documents, as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check a scenario document without running it.
    Validate(Source),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario document (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Name of a built-in scenario.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory [default: the scenario's output_dir, else $MARKET_SURVIVAL_OUT, else ./out/<scenario>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seeds to run instead of the scenario's own: a list `1,2,5` or a range `0..100`.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<SeedList>,
    /// Worker threads (0 uses every core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Recording interval of the continuous engine.
    #[arg(long)]
    grid: Option<f64>,
    /// Only write the summary, not the per-seed trajectories.
    #[arg(long)]
    summary_only: bool,
}

#[derive(Clone)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("range start: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("range end: {e}"))?;
        if b <= a {
            return Err(format!("empty seed range {a}..{b}"));
        }
        return Ok(SeedList((a..b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("seed {t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(SeedList)
}

fn load(source: &Source) -> Result<ScenarioConfig, String> {
    let result = match (&source.config, &source.scenario) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text)
        }
        (None, Some(name)) => {
            let s = find(name).ok_or_else(|| format!("unknown scenario {name:?}; see list-scenarios"))?;
            resolve(&s.document())
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    result.map_err(|e| match e {
        ConfigError::Syntax { .. } => format!("invalid scenario: {e}"),
        ConfigError::Invalid(issues) => {
            let lines: Vec<String> = issues.iter().map(|i| format!("  {i}")).collect();
            format!("invalid scenario:\n{}", lines.join("\n"))
        }
    })
}

fn output_dir(args: &RunArgs, config: &ScenarioConfig) -> PathBuf {
    args.out
        .clone()
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os("MARKET_SURVIVAL_OUT").map(|d| PathBuf::from(d).join(&config.name)))
        .unwrap_or_else(|| Path::new("out").join(&config.name))
}

struct SeedArtifacts {
    seed: u64,
    csv: Option<Vec<u8>>,
    result: SeedResult,
}

fn run_one(config: &ScenarioConfig, seed: u64, with_csv: bool) -> SeedArtifacts {
    match run_seed(config, seed) {
        Ok(out) => {
            let csv = with_csv.then(|| {
                let mut buf = Vec::new();
                write_trajectory_csv(&out.trajectory, &mut buf).expect("writing to memory");
                buf
            });
            SeedArtifacts {
                seed,
                csv,
                result: SeedResult::Ok(out.summary),
            }
        }
        Err(e) => SeedArtifacts {
            seed,
            csv: None,
            result: SeedResult::Failed {
                seed,
                error: e.to_string(),
            },
        },
    }
}

fn run(args: RunArgs) -> Result<(), (u8, String)> {
    let mut config = load(&args.source).map_err(|e| (EXIT_CONFIG, e))?;
    if let Some(SeedList(seeds)) = &args.seeds {
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() || seeds.is_empty() {
            return Err((EXIT_CONFIG, "--seeds must be non-empty and distinct".into()));
        }
        config.seeds = seeds.clone();
    }
    if let Some(g) = args.grid {
        if !(g.is_finite() && g > 0.0) {
            return Err((EXIT_CONFIG, format!("--grid must be positive, got {g}")));
        }
        config.integrator.grid = Some(g);
    }
    let dir = output_dir(&args, &config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| (EXIT_RUNTIME, format!("thread pool: {e}")))?;
    let mut artifacts: Vec<SeedArtifacts> = pool.install(|| {
        config
            .seeds
            .par_iter()
            .map(|&seed| run_one(&config, seed, !args.summary_only))
            .collect()
    });
    artifacts.sort_by_key(|a| a.seed);

    let io_err = |e: io::Error| (EXIT_RUNTIME, format!("{}: {e}", dir.display()));
    fs::create_dir_all(&dir).map_err(io_err)?;
    for a in &artifacts {
        if let Some(csv) = &a.csv {
            fs::write(dir.join(format!("trajectory-seed-{}.csv", a.seed)), csv).map_err(io_err)?;
        }
    }
    let results: Vec<SeedResult> = artifacts.into_iter().map(|a| a.result).collect();
    let summary = BatchSummary::new(&config, results);
    let json = serde_json::to_string_pretty(&summary).map_err(|e| (EXIT_RUNTIME, e.to_string()))?;
    fs::write(dir.join("summary.json"), json + "\n").map_err(io_err)?;

    println!(
        "{}: {} seeds ({} failed) -> {}",
        config.name,
        summary.seeds,
        summary.failed,
        dir.display()
    );
    for inv in &summary.investors {
        let survival = inv.survival.map_or(String::new(), |v| {
            format!(
                ", survival proxy {}/{} [{:.2}, {:.2}]",
                v.passing, v.seeds, v.ci_low, v.ci_high
            )
        });
        println!(
            "  investor {}: mean terminal share {:.4}{survival}",
            inv.investor,
            inv.mean_terminal_relative
        );
    }
    for r in &summary.runs {
        if let SeedResult::Failed { seed, error } = r {
            eprintln!("  seed {seed} failed: {error}");
        }
    }
    Ok(())
}

fn list_scenarios(json: bool) -> Result<(), (u8, String)> {
    let mut out = io::stdout().lock();
    let res = if json {
        let entries: Vec<_> = catalog()
            .iter()
            .map(|s| {
                serde_json::json!({
                    "name": s.name,
                    "anchor": s.anchor,
                    "expected": s.expected,
                    "document": s.document(),
                })
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &entries)
            .map_err(io::Error::from)
            .and_then(|_| writeln!(out))
    } else {
        catalog().iter().try_for_each(|s| {
            writeln!(out, "{}\n  exercises: {}\n  expected:  {}", s.name, s.anchor, s.expected)
        })
    };
    res.map_err(|e| (EXIT_RUNTIME, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::ListScenarios { json } => list_scenarios(json),
        Command::Validate(source) => load(&source).map(|c| {
            println!(
                "ok: {} ({} investors, {} assets, {} seeds, horizon {})",
                c.name,
                c.market.num_investors,
                c.market.num_assets,
                c.seeds.len(),
                c.horizon
            );
        }).map_err(|e| (EXIT_CONFIG, e)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists_and_ranges() {
        assert_eq!(parse_seeds("3,1, 2").unwrap().0, vec![3, 1, 2]);
        assert_eq!(parse_seeds("5..8").unwrap().0, vec![5, 6, 7]);
        assert!(parse_seeds("8..8").is_err());
        assert!(parse_seeds("a,b").is_err());
    }
}
