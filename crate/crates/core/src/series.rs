//! Time-series container with per-window sliding statistics, the trivial-match
//! rule, and a direct (per-element) z-normalized distance used as reference.

use crate::error::{Error, Result};

/// Windows whose std falls below this fraction of the global value range are flat.
pub const FLAT_RELATIVE_FLOOR: f64 = 1e-8;

/// Running sums are rebuilt from scratch after this many sliding steps.
pub const REFRESH_INTERVAL: usize = 4096;

/// How windows with (near) zero variance are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlatPolicy {
    /// A flat window z-normalizes to the all-zeros vector.
    #[default]
    ZeroVector,
    /// Any distance touching a flat window is an error.
    Strict,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn window_range_check(n: usize, window: usize) -> Result<()> {
    if window < 2 {
        return Err(Error::Parameter(format!(
            "window length must be at least 2, got {window}"
        )));
    }
    if window > n {
        return Err(Error::Parameter(format!(
            "window length {window} exceeds series length {n}"
        )));
    }
    Ok(())
}

/// Mean and population standard deviation of every length-`window` window.
///
/// Single pass with compensated running sums for the mean and the sliding
/// sum of squared deviations; both are recomputed exactly every
/// [`REFRESH_INTERVAL`] windows.
pub fn sliding_stats(values: &[f64], window: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    window_range_check(values.len(), window)?;
    let count = values.len() - window + 1;
    let len = window as f64;
    let mut means = Vec::with_capacity(count);
    let mut stds = Vec::with_capacity(count);

    let mut sum = Compensated::default();
    let mut m2 = Compensated::default();
    let mut mean = 0.0;
    for i in 0..count {
        if i % REFRESH_INTERVAL == 0 {
            let w = &values[i..i + window];
            sum = Compensated::default();
            w.iter().for_each(|&x| sum.add(x));
            mean = sum.value() / len;
            m2 = Compensated::default();
            w.iter().for_each(|&x| m2.add((x - mean) * (x - mean)));
        } else {
            let out = values[i - 1];
            let inc = values[i + window - 1];
            sum.add(inc);
            sum.add(-out);
            let next = sum.value() / len;
            m2.add((inc - out) * ((inc - next) + (out - mean)));
            mean = next;
        }
        means.push(mean);
        stds.push((m2.value().max(0.0) / len).sqrt());
    }
    Ok((means, stds))
}

/// Trivial-match test: two windows overlap iff their offsets differ by at most
/// `floor(window / 2)`.
#[inline]
pub fn overlaps(i: usize, j: usize, window: usize) -> bool {
    i.abs_diff(j) <= window / 2
}

/// An immutable time series bound to a window length.
#[derive(Debug, Clone)]
pub struct SeriesView {
    values: Vec<f64>,
    window: usize,
    means: Vec<f64>,
    stds: Vec<f64>,
    flat_floor: f64,
    policy: FlatPolicy,
}

impl SeriesView {
    pub fn new(values: Vec<f64>, window: usize) -> Result<Self> {
        Self::with_policy(values, window, FlatPolicy::default())
    }

    pub fn with_policy(values: Vec<f64>, window: usize, policy: FlatPolicy) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "series value at index {pos} is not finite"
            )));
        }
        let (means, stds) = sliding_stats(&values, window)?;
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(SeriesView {
            flat_floor: FLAT_RELATIVE_FLOOR * (hi - lo),
            values,
            window,
            means,
            stds,
            policy,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Number of windows, `n - l + 1`.
    pub fn num_windows(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn policy(&self) -> FlatPolicy {
        self.policy
    }

    pub fn flat_floor(&self) -> f64 {
        self.flat_floor
    }

    pub fn is_flat(&self, offset: usize) -> bool {
        let s = self.stds[offset];
        s == 0.0 || s < self.flat_floor
    }

    pub fn subsequence(&self, offset: usize) -> &[f64] {
        &self.values[offset..offset + self.window]
    }

    pub fn overlaps(&self, i: usize, j: usize) -> bool {
        overlaps(i, j, self.window)
    }

    pub(crate) fn check_offset(&self, offset: usize) -> Result<()> {
        if offset >= self.num_windows() {
            return Err(Error::Parameter(format!(
                "offset {offset} out of range (windows: {})",
                self.num_windows()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_flat(&self, offset: usize) -> Result<()> {
        if self.policy == FlatPolicy::Strict && self.is_flat(offset) {
            return Err(Error::DegenerateWindow {
                offset,
                std: self.stds[offset],
            });
        }
        Ok(())
    }

    /// The z-normalized window, or all zeros for a flat window.
    pub fn znormalized(&self, offset: usize) -> Vec<f64> {
        let w = self.subsequence(offset);
        if self.is_flat(offset) {
            return vec![0.0; w.len()];
        }
        let (mu, sigma) = (self.means[offset], self.stds[offset]);
        w.iter().map(|&x| (x - mu) / sigma).collect()
    }
}

/// z-normalized Euclidean distance by explicit per-element normalization.
pub fn znorm_distance_naive(view: &SeriesView, i: usize, j: usize) -> Result<f64> {
    view.check_offset(i)?;
    view.check_offset(j)?;
    view.check_flat(i)?;
    view.check_flat(j)?;
    if i == j {
        return Ok(0.0);
    }
    // Fixed evaluation order keeps d(i, j) == d(j, i) bit for bit.
    let (a, b) = (i.min(j), i.max(j));
    let za = view.znormalized(a);
    let zb = view.znormalized(b);
    let mut acc = Compensated::default();
    for (x, y) in za.iter().zip(&zb) {
        acc.add((x - y) * (x - y));
    }
    Ok(acc.value().max(0.0).sqrt())
}
