//! `cinder` command-line front end.
//!
//! Subcommands: `score`, `buckets`, `match` and `simulate`. All output is
//! CSV on standard output unless `--out` is given.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cinder_core::simulator::DEFAULT_PAIRINGS;
use cinder_core::{
    build_bucket_scheme, non_outlier_range, parse_config, parse_lobby_file, parse_lobby_records,
    ruzicka_overlap, run_simulation, run_simulation_with_workers, sanction_score_lobbies,
    LobbyF64, MatchQueueF64, RatingConfigF64, SimParamsF64, Strategy,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cinder", version, about = "Two-stage lobby matchmaking and sanction score simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Threshold,
    Argmin,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Threshold => Strategy::Threshold,
            StrategyArg::Argmin => Strategy::Argmin,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Score every lobby in the first file against every lobby in the second.
    Score {
        lobbies_a: PathBuf,
        lobbies_b: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the bucket scheme for a config.
    Buckets {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one matching pass over a lobby file.
    Match {
        lobbies: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "threshold")]
        strategy: StrategyArg,
    },
    /// Histogram sanction scores of random lobby pairings.
    Simulate {
        /// Config file; the built-in default config when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PAIRINGS)]
        pairings: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generator mean; defaults to the middle of the rating range.
        #[arg(long, allow_negative_numbers = true)]
        gen_mu: Option<f64>,
        /// Generator standard deviation; defaults to a sixth of the rating range.
        #[arg(long)]
        gen_sigma: Option<f64>,
        /// Worker threads; rayon's default when omitted. Output does not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        /// Histogram CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_config(path: &Path) -> Result<RatingConfigF64> {
    parse_config(&read(path)?).with_context(|| format!("config {}", path.display()))
}

fn csv_out() -> csv::Writer<BufWriter<io::StdoutLock<'static>>> {
    csv::Writer::from_writer(BufWriter::new(io::stdout().lock()))
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn cmd_score(a_path: &Path, b_path: &Path, config_path: &Path) -> Result<()> {
    let config = load_config(config_path)?;
    let scheme = build_bucket_scheme(&config)?;
    let load = |path: &Path| -> Result<Vec<LobbyF64>> {
        let lobbies = parse_lobby_records::<f64>(&read(path)?)
            .with_context(|| format!("lobby file {}", path.display()))?;
        Ok(lobbies.into_iter().map(|l| l.clamped(&config)).collect())
    };
    let a_lobbies = load(a_path)?;
    let b_lobbies = load(b_path)?;

    let mut rows = Vec::new();
    for a in &a_lobbies {
        let ra = non_outlier_range(a, &config);
        for b in &b_lobbies {
            let rb = non_outlier_range(b, &config);
            let sr = ruzicka_overlap(&ra, &rb);
            let sanction = sanction_score_lobbies(a, b, &scheme)?;
            rows.push([
                a.id.clone(),
                b.id.clone(),
                num(sr),
                (sr >= config.theta_r).to_string(),
                sanction.to_string(),
                num(ra.lower),
                num(ra.upper),
                num(rb.lower),
                num(rb.upper),
            ]);
        }
    }

    let mut out = csv_out();
    out.write_record([
        "id_a", "id_b", "sr", "prefilter_pass", "sanction", "a_lower", "a_upper", "b_lower", "b_upper",
    ])?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_buckets(config_path: &Path) -> Result<()> {
    let config = load_config(config_path)?;
    let scheme = build_bucket_scheme(&config)?;
    let mut out = csv_out();
    out.write_record(["index", "lower", "upper", "width"])?;
    for (i, &width) in scheme.widths().iter().enumerate() {
        let (lower, upper) = scheme.bounds(i);
        out.write_record([i.to_string(), num(lower), num(upper), num(width)])?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_match(lobby_path: &Path, config_path: &Path, strategy: Strategy) -> Result<()> {
    let config = load_config(config_path)?;
    let lobbies = parse_lobby_file::<f64>(&read(lobby_path)?, &config)
        .with_context(|| format!("lobby file {}", lobby_path.display()))?;
    let mut queue = MatchQueueF64::new(config, strategy)?;
    for lobby in lobbies {
        queue
            .enqueue(lobby)
            .with_context(|| format!("lobby file {}", lobby_path.display()))?;
    }
    let matches = queue.match_pass();
    let counters = queue.counters();

    let mut out = csv_out();
    out.write_record(["lobby_a", "lobby_b", "ruzicka", "sanction"])?;
    for m in matches {
        out.write_record([m.lobby_a, m.lobby_b, num(m.ruzicka), m.sanction.to_string()])?;
    }
    out.flush()?;
    let mut raw = out.into_inner().map_err(|e| e.into_error())?;
    writeln!(raw, "# prefilter={} sanction={}", counters.prefilter, counters.sanction)?;
    raw.flush()?;
    Ok(())
}

struct SimulateArgs {
    config: Option<PathBuf>,
    pairings: u64,
    seed: u64,
    gen_mu: Option<f64>,
    gen_sigma: Option<f64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => RatingConfigF64::default(),
    };
    let mut params = SimParamsF64::with_default_generator(config, args.pairings, args.seed);
    if let Some(mu) = args.gen_mu {
        params.gen_mu = mu;
    }
    if let Some(sigma) = args.gen_sigma {
        params.gen_sigma = sigma;
    }
    let histogram = match args.workers {
        Some(0) => bail!("--workers must be at least 1"),
        Some(n) => run_simulation_with_workers(&params, n)?,
        None => run_simulation(&params)?,
    };
    let csv = histogram.to_csv();

    let mut stdout = io::stdout().lock();
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            for line in csv.lines().filter(|l| l.starts_with('#')) {
                writeln!(stdout, "{line}")?;
            }
        }
        None => stdout.write_all(csv.as_bytes())?,
    }
    stdout.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Score {
            lobbies_a,
            lobbies_b,
            config,
        } => cmd_score(&lobbies_a, &lobbies_b, &config),
        Command::Buckets { config } => cmd_buckets(&config),
        Command::Match {
            lobbies,
            config,
            strategy,
        } => cmd_match(&lobbies, &config, strategy.into()),
        Command::Simulate {
            config,
            pairings,
            seed,
            gen_mu,
            gen_sigma,
            workers,
            out,
        } => cmd_simulate(SimulateArgs {
            config,
            pairings,
            seed,
            gen_mu,
            gen_sigma,
            workers,
            out,
        }),
    }
}
