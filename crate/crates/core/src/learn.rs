//! Learning the motif cardinality `k` from elbows of the extent function, and
//! the window length `l` by minimizing the normalized area under it.

use serde::{Deserialize, Serialize};

use crate::distance::{compute_distance_source, Distances, Policy, DEFAULT_MEMORY_BUDGET};
use crate::error::{Error, Result};
use crate::search::{self, greedy_packing, Motiflet, SearchOptions};
use crate::series::SeriesView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    #[default]
    Approximate,
    Exact,
}

/// Slope offset added to both slopes of the elbow ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Epsilon {
    /// Multiple of the largest extent in the profile.
    Relative(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElbowConfig {
    pub alpha: f64,
    pub epsilon: Epsilon,
}

impl Default for ElbowConfig {
    fn default() -> Self {
        ElbowConfig {
            alpha: 5.0,
            epsilon: Epsilon::Relative(1e-9),
        }
    }
}

impl ElbowConfig {
    fn epsilon_for(&self, extents: &[f64]) -> f64 {
        match self.epsilon {
            Epsilon::Absolute(e) => e,
            Epsilon::Relative(r) => {
                let top = extents.iter().copied().fold(0.0, f64::max);
                (r * top).max(f64::MIN_POSITIVE)
            }
        }
    }
}

/// Extent of the top k-Motiflet for every k from 2 up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtentProfile {
    pub window: usize,
    /// Largest k requested.
    pub k_max: usize,
    /// `extents[i]` is the extent for `k = i + 2`.
    pub extents: Vec<f64>,
    pub motiflets: Vec<Motiflet>,
    /// k values whose slope test fired; each is the last k of a flat stretch.
    pub elbows: Vec<usize>,
    /// Smallest requested k that is infeasible, if the profile was cut short.
    pub truncated_at: Option<usize>,
    /// k values whose extent is below that of k - 1.
    pub monotonicity_violations: Vec<usize>,
}

impl ExtentProfile {
    pub fn ks(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.extents.len() + 1
    }

    pub fn extent(&self, k: usize) -> Option<f64> {
        k.checked_sub(2).and_then(|i| self.extents.get(i)).copied()
    }

    pub fn motiflet(&self, k: usize) -> Option<&Motiflet> {
        k.checked_sub(2).and_then(|i| self.motiflets.get(i))
    }

    /// Re-runs the elbow test with a different configuration.
    pub fn annotate(&mut self, config: &ElbowConfig) {
        self.elbows = find_elbows(&self.extents, config);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileOptions {
    pub mode: ProfileMode,
    pub search: SearchOptions,
    pub elbows: ElbowConfig,
}

/// Extent function for `k = 2..=k_max`, computed from `k_max` downwards: the
/// best k-subset of the (k+1)-Motiflet seeds the search for k.
pub fn extent_function<D: Distances + ?Sized>(
    dist: &D,
    k_max: usize,
    options: &ProfileOptions,
) -> Result<ExtentProfile> {
    if k_max < 3 {
        return Err(Error::Parameter(format!("k_max must be at least 3, got {k_max}")));
    }
    let available = greedy_packing(dist).len();
    if available < 2 {
        return Err(Error::Feasibility { k: 2, available });
    }
    let k_top = k_max.min(available);
    let truncated_at = (k_top < k_max).then_some(k_top + 1);

    let mut found: Vec<Motiflet> = Vec::with_capacity(k_top - 1);
    for k in (2..=k_top).rev() {
        let seed = found.last().map(|larger| best_subset(dist, larger));
        let outcome = match options.mode {
            ProfileMode::Approximate => search::approximate_from(dist, k, seed.as_ref())?,
            ProfileMode::Exact => search::exact_from(dist, k, seed.as_ref(), &options.search)?,
        };
        found.push(outcome.motiflet);
    }
    found.reverse();

    let extents: Vec<f64> = found.iter().map(|m| m.extent).collect();
    let monotonicity_violations = (1..found.len())
        .filter(|&i| found[i].squared_extent < found[i - 1].squared_extent)
        .map(|i| i + 2)
        .collect();
    Ok(ExtentProfile {
        window: dist.window(),
        k_max,
        elbows: find_elbows(&extents, &options.elbows),
        extents,
        motiflets: found,
        truncated_at,
        monotonicity_violations,
    })
}

/// The tightest set left after dropping one member of `larger`.
fn best_subset<D: Distances + ?Sized>(dist: &D, larger: &Motiflet) -> Motiflet {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for skip in 0..larger.offsets.len() {
        let subset: Vec<usize> = larger
            .offsets
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &o)| o)
            .collect();
        let mut sq = 0.0f64;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                sq = sq.max(dist.sq_dist(i, j));
            }
        }
        let better = match &best {
            None => true,
            Some((b, offs)) => sq < *b || (sq == *b && subset < *offs),
        };
        if better {
            best = Some((sq, subset));
        }
    }
    let (sq, offsets) = best.expect("motiflets have at least two members");
    Motiflet {
        offsets,
        extent: sq.sqrt(),
        squared_extent: sq,
        window: larger.window,
        exactness: larger.exactness,
    }
}

/// Elbow test over `extents` (`extents[i]` belongs to `k = i + 2`).
///
/// The test at `k` compares the slope after `k` with the slope before it,
/// `(d[k+1] - d[k] + ε) / (d[k] - d[k-1] + ε) > α`, and reports `k`: the last
/// cardinality before the jump. The first and last k are never reported.
pub fn find_elbows(extents: &[f64], config: &ElbowConfig) -> Vec<usize> {
    let eps = config.epsilon_for(extents);
    (1..extents.len().saturating_sub(1))
        .filter(|&i| {
            let after = extents[i + 1] - extents[i] + eps;
            let before = extents[i] - extents[i - 1] + eps;
            after / before > config.alpha
        })
        .map(|i| i + 2)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthScore {
    pub window: usize,
    /// Normalized area under the extent function, in [0, 1].
    pub au_ef: f64,
    pub elbow_count: usize,
}

/// Min-max normalized area under the extent function, averaged over its
/// `k_max - 1` points and divided by the number of elbows (at least 1).
pub fn au_ef(profile: &ExtentProfile) -> LengthScore {
    let ext = &profile.extents;
    let lo = ext.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ext.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let area = if ext.is_empty() || hi <= lo {
        0.0
    } else {
        ext.iter().map(|d| (d - lo) / (hi - lo)).sum::<f64>() / ext.len() as f64
    };
    let elbow_count = profile.elbows.len();
    LengthScore {
        window: profile.window,
        au_ef: area / elbow_count.max(1) as f64,
        elbow_count,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSelection {
    pub best: usize,
    pub scores: Vec<LengthScore>,
    pub profiles: Vec<ExtentProfile>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthOptions {
    pub elbows: ElbowConfig,
    pub policy: Policy,
    pub memory_budget: u64,
}

impl Default for LengthOptions {
    fn default() -> Self {
        LengthOptions {
            elbows: ElbowConfig::default(),
            policy: Policy::Auto,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

/// Picks the window length with the smallest AU_EF (ties to the shorter
/// length), using approximate extent functions.
pub fn select_length(
    values: &[f64],
    lengths: &[usize],
    k_max: usize,
    options: &LengthOptions,
) -> Result<LengthSelection> {
    if lengths.is_empty() {
        return Err(Error::Parameter("no candidate lengths given".into()));
    }
    let profile_options = ProfileOptions {
        mode: ProfileMode::Approximate,
        search: SearchOptions::default(),
        elbows: options.elbows,
    };
    let mut scores = Vec::with_capacity(lengths.len());
    let mut profiles = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let view = SeriesView::new(values.to_vec(), l)?;
        let dist = compute_distance_source(&view, options.policy, options.memory_budget)?;
        let profile = extent_function(&dist, k_max, &profile_options)?;
        scores.push(au_ef(&profile));
        profiles.push(profile);
    }
    let best = scores
        .iter()
        .min_by(|a, b| a.au_ef.total_cmp(&b.au_ef).then(a.window.cmp(&b.window)))
        .map(|s| s.window)
        .expect("non-empty");
    Ok(LengthSelection { best, scores, profiles })
}
