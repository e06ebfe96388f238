//! One end-to-end invocation: load, search or learn, and collect everything
//! into a [`ResultDocument`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::distance::{compute_distance_source, write_matrix_dump, Policy, DEFAULT_MEMORY_BUDGET};
use crate::error::{Error, Result};
use crate::fixture::{generate_fixture, FixtureSpec, PlantedSet};
use crate::io::{load_series, write_series, ColumnSelector};
use crate::learn::{extent_function, select_length, ElbowConfig, Epsilon, LengthOptions, LengthScore, ProfileMode, ProfileOptions};
use crate::search::{self, Exactness, Motiflet, SearchOptions, SearchStats};
use crate::series::{FlatPolicy, SeriesView};

/// Environment variable overriding the materialization memory budget (bytes).
pub const MEMORY_BUDGET_ENV: &str = "MOTIFLETS_MEMORY_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    #[default]
    Approximate,
    Exact,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Discover {
        window: usize,
        k: usize,
        mode: SearchMode,
    },
    LearnK {
        window: usize,
        k_max: usize,
        mode: ProfileMode,
    },
    LearnLength {
        lengths: Vec<usize>,
        k_max: usize,
    },
    Fixture {
        spec: FixtureSpec,
        seed: u64,
        /// Where the generated series is written.
        series_out: PathBuf,
    },
    MatrixDump {
        window: usize,
        dump_out: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub column: Option<ColumnSelector>,
    pub alpha: f64,
    /// Relative elbow epsilon (multiple of the largest extent).
    pub epsilon: f64,
    pub policy: DistancePolicy,
    pub memory_budget: u64,
    pub subset_ceiling: u128,
    pub strict_flat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistancePolicy {
    Materialize,
    OnDemand,
    #[default]
    Auto,
}

impl From<DistancePolicy> for Policy {
    fn from(p: DistancePolicy) -> Self {
        match p {
            DistancePolicy::Materialize => Policy::Materialize,
            DistancePolicy::OnDemand => Policy::OnDemand,
            DistancePolicy::Auto => Policy::Auto,
        }
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let elbows = ElbowConfig::default();
        let epsilon = match elbows.epsilon {
            Epsilon::Relative(r) => r,
            Epsilon::Absolute(a) => a,
        };
        RunConfig {
            command,
            input: None,
            column: None,
            alpha: elbows.alpha,
            epsilon,
            policy: DistancePolicy::Auto,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            subset_ceiling: search::DEFAULT_SUBSET_CEILING,
            strict_flat: false,
        }
    }

    pub fn with_input(mut self, input: impl Into<PathBuf>) -> Self {
        self.input = Some(input.into());
        self
    }

    fn elbows(&self) -> ElbowConfig {
        ElbowConfig {
            alpha: self.alpha,
            epsilon: Epsilon::Relative(self.epsilon),
        }
    }

    fn search_options(&self) -> SearchOptions {
        SearchOptions {
            subset_ceiling: self.subset_ceiling,
            ..SearchOptions::default()
        }
    }

    fn flat_policy(&self) -> FlatPolicy {
        if self.strict_flat {
            FlatPolicy::Strict
        } else {
            FlatPolicy::ZeroVector
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifletRecord {
    pub k: usize,
    pub window: usize,
    pub offsets: Vec<usize>,
    pub extent: f64,
    pub exactness: Exactness,
}

impl From<&Motiflet> for MotifletRecord {
    fn from(m: &Motiflet) -> Self {
        MotifletRecord {
            k: m.k(),
            window: m.window,
            offsets: m.offsets.clone(),
            extent: m.extent,
            exactness: m.exactness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub window: usize,
    pub k_max: usize,
    pub extents: Vec<f64>,
    pub elbows: Vec<usize>,
    /// Cardinalities worth reporting: the last k before each elbow.
    pub recommended_k: Vec<usize>,
    pub truncated_at: Option<usize>,
    pub monotonicity_violations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRecord {
    pub best_window: usize,
    pub scores: Vec<LengthScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub path: Option<PathBuf>,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

/// Everything a run produced. Serialized with a fixed key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub series: Option<SeriesSummary>,
    pub motiflets: Vec<MotifletRecord>,
    pub profile: Option<ProfileRecord>,
    pub lengths: Option<LengthRecord>,
    pub stats: Option<SearchStats>,
    pub ground_truth: Option<Vec<PlantedSet>>,
    pub timings: Timings,
}

impl ResultDocument {
    fn empty(config: &RunConfig) -> Self {
        ResultDocument {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            series: None,
            motiflets: Vec::new(),
            profile: None,
            lengths: None,
            stats: None,
            ground_truth: None,
            timings: Timings { total_ms: 0.0 },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Comma-separated curve table for plotting: the extent function for
    /// `learn-k`, AU_EF per length for `learn-length`.
    pub fn curve_table(&self) -> Option<String> {
        if let Some(lengths) = &self.lengths {
            let mut out = String::from("window,au_ef,elbow_count\n");
            for s in &lengths.scores {
                out.push_str(&format!("{},{:?},{}\n", s.window, s.au_ef, s.elbow_count));
            }
            return Some(out);
        }
        self.profile.as_ref().map(|p| {
            let mut out = String::from("k,extent,elbow\n");
            for (i, e) in p.extents.iter().enumerate() {
                let k = i + 2;
                out.push_str(&format!("{k},{e:?},{}\n", u8::from(p.elbows.contains(&k))));
            }
            out
        })
    }
}

fn load_input(config: &RunConfig) -> Result<(Vec<f64>, PathBuf)> {
    let path = config
        .input
        .clone()
        .ok_or_else(|| Error::Parameter("an input file is required".into()))?;
    let values = load_series(&path, config.column.as_ref())?;
    Ok((values, path))
}

/// Executes `config`. Files named by the command itself (fixture series,
/// matrix dumps) are written here; the document is returned to the caller.
pub fn run(config: &RunConfig) -> Result<ResultDocument> {
    let started = Instant::now();
    let mut doc = ResultDocument::empty(config);
    match &config.command {
        Command::Discover { window, k, mode } => {
            let (values, path) = load_input(config)?;
            doc.series = Some(SeriesSummary { path: Some(path), length: values.len() });
            let view = SeriesView::with_policy(values, *window, config.flat_policy())?;
            let dist = compute_distance_source(&view, config.policy.into(), config.memory_budget)?;
            let opts = config.search_options();
            let motiflet = match mode {
                SearchMode::Approximate => {
                    let out = search::approximate(&dist, *k)?;
                    doc.stats = Some(out.state.stats);
                    out.motiflet
                }
                SearchMode::Exact => {
                    let out = search::exact(&dist, *k, &opts)?;
                    doc.stats = Some(out.state.stats);
                    out.motiflet
                }
                SearchMode::Oracle => search::oracle(&dist, *k, &opts)?,
            };
            doc.motiflets.push((&motiflet).into());
        }
        Command::LearnK { window, k_max, mode } => {
            let (values, path) = load_input(config)?;
            doc.series = Some(SeriesSummary { path: Some(path), length: values.len() });
            let view = SeriesView::with_policy(values, *window, config.flat_policy())?;
            let dist = compute_distance_source(&view, config.policy.into(), config.memory_budget)?;
            let options = ProfileOptions {
                mode: *mode,
                search: config.search_options(),
                elbows: config.elbows(),
            };
            let profile = extent_function(&dist, *k_max, &options)?;
            doc.motiflets = profile.motiflets.iter().map(MotifletRecord::from).collect();
            doc.profile = Some(ProfileRecord {
                window: profile.window,
                k_max: profile.k_max,
                extents: profile.extents.clone(),
                recommended_k: profile.elbows.clone(),
                elbows: profile.elbows,
                truncated_at: profile.truncated_at,
                monotonicity_violations: profile.monotonicity_violations,
            });
        }
        Command::LearnLength { lengths, k_max } => {
            let (values, path) = load_input(config)?;
            doc.series = Some(SeriesSummary { path: Some(path), length: values.len() });
            let options = LengthOptions {
                elbows: config.elbows(),
                policy: config.policy.into(),
                memory_budget: config.memory_budget,
            };
            let selection = select_length(&values, lengths, *k_max, &options)?;
            if let Some(best) = selection.profiles.iter().find(|p| p.window == selection.best) {
                doc.motiflets = best.motiflets.iter().map(MotifletRecord::from).collect();
            }
            doc.lengths = Some(LengthRecord {
                best_window: selection.best,
                scores: selection.scores,
            });
        }
        Command::Fixture { spec, seed, series_out } => {
            let fixture = generate_fixture(spec, *seed)?;
            write_series(series_out, &fixture.values)?;
            doc.series = Some(SeriesSummary {
                path: Some(series_out.clone()),
                length: fixture.values.len(),
            });
            doc.ground_truth = Some(fixture.truth);
        }
        Command::MatrixDump { window, dump_out } => {
            let (values, path) = load_input(config)?;
            doc.series = Some(SeriesSummary { path: Some(path), length: values.len() });
            let view = SeriesView::with_policy(values, *window, config.flat_policy())?;
            let dist = compute_distance_source(&view, config.policy.into(), config.memory_budget)?;
            let file = File::create(dump_out).map_err(|e| Error::io(dump_out, e))?;
            write_matrix_dump(&dist, BufWriter::new(file)).map_err(|e| Error::io(dump_out, e))?;
        }
    }
    doc.timings.total_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(doc)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
