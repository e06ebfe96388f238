//! Seeded synthetic series with known motif placements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixtureSpec {
    /// Gaussian random walk with unit steps.
    RandomWalk { n: usize },
    /// Sine of the given period plus white noise.
    Sine { n: usize, period: usize, noise: f64 },
    /// `copies` noisy copies of one random smooth template (amplitude 1) at
    /// random non-overlapping offsets over a random-walk background.
    PlantedMotif {
        n: usize,
        motif_length: usize,
        copies: usize,
        noise: f64,
    },
    /// Square-wave calibration pulses followed by spike-wave "heartbeats",
    /// each one period long and separated by short background gaps.
    TwoMotif {
        period: usize,
        square_copies: usize,
        spike_copies: usize,
        noise: f64,
    },
}

impl FixtureSpec {
    /// Planted copies with noise at 5% of the template amplitude.
    pub fn planted(n: usize, motif_length: usize, copies: usize) -> Self {
        FixtureSpec::PlantedMotif {
            n,
            motif_length,
            copies,
            noise: 0.05,
        }
    }

    /// 6 calibration pulses then 16 beats of the given period.
    pub fn two_motif(period: usize) -> Self {
        FixtureSpec::TwoMotif {
            period,
            square_copies: 6,
            spike_copies: 16,
            noise: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSet {
    pub name: String,
    pub length: usize,
    pub offsets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub seed: u64,
    pub values: Vec<f64>,
    /// Planted motif sets, empty for kinds without planted structure.
    pub truth: Vec<PlantedSet>,
}

pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    walk(&mut rng, n, 1.0)
}

fn walk(rng: &mut ChaCha8Rng, n: usize, step: f64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            acc += step * z;
            acc
        })
        .collect()
}

fn white(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
}

/// A smooth random shape rescaled to span [0, 1].
fn smooth_template(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let bumps: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            let centre = rng.random_range(0.1..0.9);
            let width = rng.random_range(0.05..0.15);
            let height = rng.random_range(0.5..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (centre, width, height)
        })
        .collect();
    let raw: Vec<f64> = (0..len)
        .map(|t| {
            let x = t as f64 / (len - 1) as f64;
            bumps
                .iter()
                .map(|&(c, w, h)| h * (-((x - c) / w).powi(2) / 2.0).exp())
                .sum()
        })
        .collect();
    rescale(raw)
}

fn rescale(raw: Vec<f64>) -> Vec<f64> {
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    raw.into_iter().map(|v| (v - lo) / span).collect()
}

fn square_pulse(len: usize) -> Vec<f64> {
    (0..len).map(|t| if 2 * t < len { 1.0 } else { 0.0 }).collect()
}

/// P wave, sharp QRS spike and T wave; `jitter` moves the spike and reshapes
/// the T wave so that beats are similar but not identical.
fn spike_wave(rng: &mut ChaCha8Rng, len: usize, jitter: f64) -> Vec<f64> {
    let gauss = |x: f64, c: f64, w: f64| (-((x - c) / w).powi(2) / 2.0).exp();
    let qrs = 0.4 + jitter * rng.random_range(-0.01..0.01);
    let t_height = 0.35 * (1.0 + jitter * rng.random_range(-0.15..0.15));
    let raw: Vec<f64> = (0..len)
        .map(|t| {
            let x = t as f64 / len as f64;
            0.15 * gauss(x, 0.15, 0.04) + gauss(x, qrs, 0.03) - 0.2 * gauss(x, qrs + 0.07, 0.025)
                + t_height * gauss(x, 0.7, 0.07)
        })
        .collect();
    rescale(raw)
}

/// Splits `slack` into `parts` random non-negative integers.
fn random_split(rng: &mut ChaCha8Rng, slack: usize, parts: usize) -> Vec<usize> {
    let weights: Vec<f64> = (0..parts).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let mut out: Vec<usize> = weights.iter().map(|w| (w / total * slack as f64).floor() as usize).collect();
    let used: usize = out.iter().sum();
    out[0] += slack - used;
    out
}

/// Generates the fixture for `spec`. Identical `(spec, seed)` gives
/// bit-identical output.
pub fn generate_fixture(spec: &FixtureSpec, seed: u64) -> Result<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (values, truth) = match *spec {
        FixtureSpec::RandomWalk { n } => {
            if n == 0 {
                return Err(Error::Parameter("random walk needs n > 0".into()));
            }
            (walk(&mut rng, n, 1.0), Vec::new())
        }
        FixtureSpec::Sine { n, period, noise } => {
            if period < 2 || n == 0 || !(noise >= 0.0) {
                return Err(Error::Parameter("sine needs n > 0, period >= 2, noise >= 0".into()));
            }
            let v = (0..n)
                .map(|t| (std::f64::consts::TAU * t as f64 / period as f64).sin() + white(&mut rng, noise))
                .collect();
            (v, Vec::new())
        }
        FixtureSpec::PlantedMotif {
            n,
            motif_length,
            copies,
            noise,
        } => planted(&mut rng, n, motif_length, copies, noise)?,
        FixtureSpec::TwoMotif {
            period,
            square_copies,
            spike_copies,
            noise,
        } => two_motif(&mut rng, period, square_copies, spike_copies, noise)?,
    };
    Ok(Fixture {
        spec: spec.clone(),
        seed,
        values,
        truth,
    })
}

fn planted(
    rng: &mut ChaCha8Rng,
    n: usize,
    len: usize,
    copies: usize,
    noise: f64,
) -> Result<(Vec<f64>, Vec<PlantedSet>)> {
    if len < 4 || copies == 0 || !(noise >= 0.0) {
        return Err(Error::Parameter(
            "planted motif needs length >= 4, copies >= 1, noise >= 0".into(),
        ));
    }
    let min_gap = len / 2;
    let needed = copies * len + (copies - 1) * min_gap;
    if needed > n {
        return Err(Error::Parameter(format!(
            "cannot place {copies} copies of length {len} in {n} points (need {needed})"
        )));
    }
    let template = smooth_template(rng, len);
    let gaps = random_split(rng, n - needed, copies + 1);

    let mut values = walk(rng, n, 0.05);
    let mut offsets = Vec::with_capacity(copies);
    let mut pos = gaps[0];
    for c in 0..copies {
        offsets.push(pos);
        let base = values[pos];
        for (t, &v) in template.iter().enumerate() {
            values[pos + t] = base + v;
        }
        pos += len + min_gap + gaps[c + 1];
    }
    for v in values.iter_mut() {
        *v += white(rng, noise);
    }
    let truth = vec![PlantedSet {
        name: "motif".into(),
        length: len,
        offsets,
    }];
    Ok((values, truth))
}

fn two_motif(
    rng: &mut ChaCha8Rng,
    period: usize,
    square_copies: usize,
    spike_copies: usize,
    noise: f64,
) -> Result<(Vec<f64>, Vec<PlantedSet>)> {
    if period < 8 || !(noise >= 0.0) {
        return Err(Error::Parameter("two-motif needs period >= 8 and noise >= 0".into()));
    }
    let square = square_pulse(period);
    let mut values = Vec::new();
    let mut square_at = Vec::new();
    let mut spike_at = Vec::new();
    let gap = |rng: &mut ChaCha8Rng, values: &mut Vec<f64>| {
        let g = rng.random_range(period / 2 + 1..=period);
        let start = values.last().copied().unwrap_or(0.0);
        let mut acc = start;
        for _ in 0..g {
            acc += 0.03 * rng.sample::<f64, _>(StandardNormal);
            values.push(acc);
        }
    };
    gap(rng, &mut values);
    for _ in 0..square_copies {
        square_at.push(values.len());
        let base = *values.last().unwrap();
        values.extend(square.iter().map(|v| base + v));
        gap(rng, &mut values);
    }
    for _ in 0..spike_copies {
        spike_at.push(values.len());
        let base = *values.last().unwrap();
        let beat = spike_wave(rng, period, 1.0);
        values.extend(beat.iter().map(|v| base + v));
        gap(rng, &mut values);
    }
    let square_end = spike_at.first().copied().unwrap_or(values.len());
    for (t, v) in values.iter_mut().enumerate() {
        // calibration pulses are cleaner than the beats
        let sigma = if t < square_end { noise / 2.0 } else { noise };
        *v += white(rng, sigma);
    }
    let truth = vec![
        PlantedSet {
            name: "square".into(),
            length: period,
            offsets: square_at,
        },
        PlantedSet {
            name: "spike".into(),
            length: period,
            offsets: spike_at,
        },
    ];
    Ok((values, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_is_deterministic() {
        let spec = FixtureSpec::planted(2000, 50, 5);
        let a = generate_fixture(&spec, 7).unwrap();
        let b = generate_fixture(&spec, 7).unwrap();
        let bits = |f: &Fixture| f.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.truth, b.truth);
        assert_ne!(bits(&a), bits(&generate_fixture(&spec, 8).unwrap()));
    }

    #[test]
    fn planted_offsets_are_spaced() {
        let f = generate_fixture(&FixtureSpec::planted(3000, 100, 8), 1).unwrap();
        assert_eq!(f.values.len(), 3000);
        let offs = &f.truth[0].offsets;
        assert_eq!(offs.len(), 8);
        assert!(offs.windows(2).all(|w| w[1] - w[0] >= 150));
        assert!(offs.last().unwrap() + 100 <= 3000);
    }

    #[test]
    fn planted_rejects_crowding() {
        assert!(generate_fixture(&FixtureSpec::planted(500, 100, 5), 1).is_err());
    }

    #[test]
    fn two_motif_layout() {
        let f = generate_fixture(&FixtureSpec::two_motif(40), 3).unwrap();
        assert_eq!(f.truth[0].offsets.len(), 6);
        assert_eq!(f.truth[1].offsets.len(), 16);
        assert!(f.truth[0].offsets.last() < f.truth[1].offsets.first());
        assert!(f.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn random_walk_length() {
        let f = generate_fixture(&FixtureSpec::RandomWalk { n: 1000 }, 0).unwrap();
        assert_eq!(f.values.len(), 1000);
        assert!(f.values.iter().all(|v| v.is_finite()));
    }
}
