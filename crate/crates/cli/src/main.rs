use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use motiflets::distance::DEFAULT_MEMORY_BUDGET;
use motiflets::fixture::FixtureSpec;
use motiflets::io::ColumnSelector;
use motiflets::learn::ProfileMode;
use motiflets::run::{self, Command, DistancePolicy, RunConfig, SearchMode, MEMORY_BUDGET_ENV};
use motiflets::search::DEFAULT_SUBSET_CEILING;
use motiflets::Error;

/// k-Motiflet discovery for univariate time series.
#[derive(Debug, Parser)]
#[command(name = "motiflets", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Find the top k-Motiflet for a fixed k and window length.
    Discover {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Mode::Approx)]
        mode: Mode,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute the extent function up to k_max and report its elbows.
    LearnK {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = ProfileModeArg::Approx)]
        mode: ProfileModeArg,
        #[command(flatten)]
        elbows: ElbowArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pick the window length with the smallest AU_EF score.
    LearnLength {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        range: LengthArgs,
        #[arg(long)]
        k_max: usize,
        #[command(flatten)]
        elbows: ElbowArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a synthetic series with known motif sets.
    Fixture {
        #[command(flatten)]
        fixture: FixtureArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// File receiving the generated series, one value per line.
        #[arg(long)]
        series_out: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the full squared distance matrix as a binary dump.
    MatrixDump {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        dump_out: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Column name, or zero-based position.
    #[arg(long)]
    column: Option<ColumnSelector>,
}

#[derive(Debug, Args)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = PolicyArg::Auto)]
    policy: PolicyArg,
    /// Bytes available for a materialized distance matrix.
    #[arg(long, env = MEMORY_BUDGET_ENV, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: u64,
    /// Largest estimated subset count the exact search accepts.
    #[arg(long, default_value_t = DEFAULT_SUBSET_CEILING)]
    ceiling: u128,
    /// Reject constant windows instead of treating them as zero vectors.
    #[arg(long)]
    strict_flat: bool,
}

#[derive(Debug, Args)]
struct ElbowArgs {
    #[arg(long, default_value_t = 5.0)]
    alpha: f64,
    /// Slope offset as a multiple of the largest extent.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("range").required(true).args(["lengths", "l_min"])))]
struct LengthArgs {
    /// Comma-separated window lengths.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["l_min", "l_max", "l_step"])]
    lengths: Vec<usize>,
    #[arg(long, requires = "l_max")]
    l_min: Option<usize>,
    #[arg(long, requires = "l_min")]
    l_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    l_step: usize,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, value_enum)]
    kind: FixtureKind,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    motif_length: usize,
    #[arg(long, default_value_t = 8)]
    copies: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 50)]
    period: usize,
    #[arg(long, default_value_t = 6)]
    square_copies: usize,
    #[arg(long, default_value_t = 16)]
    spike_copies: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Result document path; printed to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Comma-delimited extent or AU_EF curve table.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    #[value(alias = "approximate")]
    Approx,
    Exact,
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileModeArg {
    #[value(alias = "approximate")]
    Approx,
    Exact,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Materialize,
    OnDemand,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixtureKind {
    PlantedMotif,
    TwoMotif,
    RandomWalk,
    Sine,
}

impl LengthArgs {
    fn lengths(&self) -> Result<Vec<usize>, Error> {
        match (self.l_min, self.l_max) {
            (Some(lo), Some(hi)) => {
                if self.l_step == 0 || lo > hi {
                    return Err(Error::Parameter(format!(
                        "invalid length range {lo}..={hi} step {}",
                        self.l_step
                    )));
                }
                Ok((lo..=hi).step_by(self.l_step).collect())
            }
            _ => Ok(self.lengths.clone()),
        }
    }
}

impl FixtureArgs {
    fn spec(&self) -> FixtureSpec {
        match self.kind {
            FixtureKind::PlantedMotif => FixtureSpec::PlantedMotif {
                n: self.n,
                motif_length: self.motif_length,
                copies: self.copies,
                noise: self.noise,
            },
            FixtureKind::TwoMotif => FixtureSpec::TwoMotif {
                period: self.period,
                square_copies: self.square_copies,
                spike_copies: self.spike_copies,
                noise: self.noise,
            },
            FixtureKind::RandomWalk => FixtureSpec::RandomWalk { n: self.n },
            FixtureKind::Sine => FixtureSpec::Sine {
                n: self.n,
                period: self.period,
                noise: self.noise,
            },
        }
    }
}

fn configure(config: &mut RunConfig, input: InputArgs, engine: EngineArgs, elbows: Option<ElbowArgs>) {
    config.input = Some(input.input);
    config.column = input.column;
    config.policy = match engine.policy {
        PolicyArg::Materialize => DistancePolicy::Materialize,
        PolicyArg::OnDemand => DistancePolicy::OnDemand,
        PolicyArg::Auto => DistancePolicy::Auto,
    };
    config.memory_budget = engine.memory_budget;
    config.subset_ceiling = engine.ceiling;
    config.strict_flat = engine.strict_flat;
    if let Some(elbows) = elbows {
        config.alpha = elbows.alpha;
        config.epsilon = elbows.epsilon;
    }
}

fn build(cli: Cli) -> Result<(RunConfig, OutputArgs), Error> {
    Ok(match cli.command {
        Cmd::Discover { input, l, k, mode, engine, output } => {
            let mode = match mode {
                Mode::Approx => SearchMode::Approximate,
                Mode::Exact => SearchMode::Exact,
                Mode::Oracle => SearchMode::Oracle,
            };
            let mut config = RunConfig::new(Command::Discover { window: l, k, mode });
            configure(&mut config, input, engine, None);
            (config, output)
        }
        Cmd::LearnK { input, l, k_max, mode, elbows, engine, output } => {
            let mode = match mode {
                ProfileModeArg::Approx => ProfileMode::Approximate,
                ProfileModeArg::Exact => ProfileMode::Exact,
            };
            let mut config = RunConfig::new(Command::LearnK { window: l, k_max, mode });
            configure(&mut config, input, engine, Some(elbows));
            (config, output)
        }
        Cmd::LearnLength { input, range, k_max, elbows, engine, output } => {
            let lengths = range.lengths()?;
            let mut config = RunConfig::new(Command::LearnLength { lengths, k_max });
            configure(&mut config, input, engine, Some(elbows));
            (config, output)
        }
        Cmd::Fixture { fixture, seed, series_out, output } => {
            let config = RunConfig::new(Command::Fixture {
                spec: fixture.spec(),
                seed,
                series_out,
            });
            (config, output)
        }
        Cmd::MatrixDump { input, l, dump_out, engine, output } => {
            let mut config = RunConfig::new(Command::MatrixDump { window: l, dump_out });
            configure(&mut config, input, engine, None);
            (config, output)
        }
    })
}

fn execute(cli: Cli) -> Result<(), Error> {
    let (config, output) = build(cli)?;
    let doc = run::run(&config)?;
    if let Some(path) = &output.curves {
        let table = doc
            .curve_table()
            .ok_or_else(|| Error::Parameter("this command produces no curves".into()))?;
        run::write_text(path, &table)?;
    }
    let text = doc.to_json();
    match &output.output {
        Some(path) => run::write_text(path, &text),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            }),
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
