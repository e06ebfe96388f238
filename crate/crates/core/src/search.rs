//! Top k-Motiflet search: the set of `k` mutually non-overlapping windows with
//! the smallest extent (largest pairwise distance).
//!
//! * [`approximate`] joins every window with its `k - 1` non-trivial nearest
//!   neighbors and keeps the tightest such set. Its extent is at most twice
//!   the optimum.
//! * [`exact`] starts from the approximate incumbent and enumerates subsets of
//!   each window's best-so-far range with branch and bound.
//! * [`oracle`] finds the optimum independently by searching for the smallest
//!   distance threshold whose neighborhood graph contains a k-clique.
//!
//! Squared distances are compared everywhere; extents are reported unsquared.
//! Ties between sets of equal extent go to the lexicographically smallest
//! sorted offset tuple in the exact search and the oracle.

use serde::{Deserialize, Serialize};

use crate::distance::{compute_distance_source, greedy_neighbors, Distances, Policy, RowBuffer, DEFAULT_MEMORY_BUDGET};
use crate::error::{Error, Result};
use crate::series::SeriesView;

/// Default refusal threshold for the exact search's subset count.
pub const DEFAULT_SUBSET_CEILING: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Approximate,
    Exact,
    Oracle,
}

/// A discovered motif set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Motiflet {
    /// Sorted start offsets.
    pub offsets: Vec<usize>,
    /// Largest pairwise z-normalized distance.
    pub extent: f64,
    pub squared_extent: f64,
    /// Window length; 0 for abstract matrices.
    pub window: usize,
    pub exactness: Exactness,
}

impl Motiflet {
    pub fn k(&self) -> usize {
        self.offsets.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub queries: u64,
    /// Candidate sets whose extent was evaluated.
    pub candidates: u64,
    /// Evaluations stopped early by the best-so-far bound.
    pub abandoned: u64,
    /// Complete k-subsets reached by the exact enumeration.
    pub subsets: u64,
    /// Partial subsets cut off by the best-so-far bound.
    pub pruned: u64,
    /// Unpruned subset count estimated before the exact enumeration.
    pub estimated_subsets: Option<u128>,
}

/// Incumbent and counters of a finished run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub best_extent: f64,
    pub best_offsets: Vec<usize>,
    pub stats: SearchStats,
    /// Extent after every incumbent change, in order.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub motiflet: Motiflet,
    pub state: SearchState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// The exact search refuses if its estimated subset count exceeds this.
    pub subset_ceiling: u128,
    /// The oracle refuses instances with more windows than this.
    pub oracle_max_windows: usize,
    pub oracle_max_k: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            subset_ceiling: DEFAULT_SUBSET_CEILING,
            oracle_max_windows: 512,
            oracle_max_k: 6,
        }
    }
}

/// Result of [`pairwise_extent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Within(f64),
    /// Some pair reached the bound.
    Abandoned,
}

/// Largest pairwise distance of `candidate`, abandoning as soon as one pair
/// reaches `bound` (z-normalized units).
pub fn pairwise_extent<D: Distances + ?Sized>(dist: &D, candidate: &[usize], bound: f64) -> Result<Extent> {
    check_candidate(dist, candidate)?;
    let bound_sq = if bound.is_infinite() { f64::INFINITY } else { bound * bound };
    Ok(match bounded_extent(dist, candidate, bound_sq, false) {
        Some(sq) => Extent::Within(sq.sqrt()),
        None => Extent::Abandoned,
    })
}

fn check_candidate<D: Distances + ?Sized>(dist: &D, candidate: &[usize]) -> Result<()> {
    let n = dist.num_windows();
    for (a, &i) in candidate.iter().enumerate() {
        if i >= n {
            return Err(Error::Contract(format!("offset {i} out of range ({n} windows)")));
        }
        for &j in &candidate[a + 1..] {
            if dist.overlaps(i, j) {
                return Err(Error::Contract(format!("offsets {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

/// Max squared pairwise distance, or `None` once a pair hits the bound
/// (`>= bound_sq`, or `> bound_sq` when `inclusive`).
fn bounded_extent<D: Distances + ?Sized>(dist: &D, members: &[usize], bound_sq: f64, inclusive: bool) -> Option<f64> {
    let mut worst = 0.0f64;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            let d = dist.sq_dist(i, j);
            if d > bound_sq || (!inclusive && d == bound_sq) {
                return None;
            }
            worst = worst.max(d);
        }
    }
    Some(worst)
}

/// Greedy left-to-right packing of mutually non-overlapping windows. Maximal
/// for interval-style overlap.
pub fn greedy_packing<D: Distances + ?Sized>(dist: &D) -> Vec<usize> {
    let mut packed: Vec<usize> = Vec::new();
    for i in 0..dist.num_windows() {
        if packed.iter().all(|&p| !dist.overlaps(p, i)) {
            packed.push(i);
        }
    }
    packed
}

fn check_feasible<D: Distances + ?Sized>(dist: &D, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Parameter(format!("k must be at least 2, got {k}")));
    }
    let packed = greedy_packing(dist);
    if packed.len() < k {
        return Err(Error::Feasibility {
            k,
            available: packed.len(),
        });
    }
    Ok(packed)
}

#[derive(Debug, Clone)]
struct Incumbent {
    sq: f64,
    offsets: Vec<usize>,
}

impl Incumbent {
    fn new(sq: f64, mut offsets: Vec<usize>) -> Self {
        offsets.sort_unstable();
        Incumbent { sq, offsets }
    }

    /// Strictly smaller extent, or equal extent with a smaller tuple.
    fn beaten_by(&self, sq: f64, sorted: &[usize]) -> bool {
        sq < self.sq || (sq == self.sq && sorted < self.offsets.as_slice())
    }
}

struct Tracker {
    best: Option<Incumbent>,
    stats: SearchStats,
    trace: Vec<f64>,
}

impl Tracker {
    fn new(seed: Option<Incumbent>) -> Self {
        let trace = seed.iter().map(|s| s.sq.sqrt()).collect();
        Tracker {
            best: seed,
            stats: SearchStats::default(),
            trace,
        }
    }

    fn bound(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.sq)
    }

    fn replace(&mut self, inc: Incumbent) {
        self.trace.push(inc.sq.sqrt());
        self.best = Some(inc);
    }

    fn finish(self, window: usize, exactness: Exactness) -> SearchOutcome {
        let best = self.best.expect("a feasible search always has an incumbent");
        let extent = best.sq.sqrt();
        SearchOutcome {
            motiflet: Motiflet {
                offsets: best.offsets.clone(),
                extent,
                squared_extent: best.sq,
                window,
                exactness,
            },
            state: SearchState {
                best_extent: extent,
                best_offsets: best.offsets,
                stats: self.stats,
                trace: self.trace,
            },
        }
    }
}

fn seed_incumbent<D: Distances + ?Sized>(dist: &D, k: usize, seed: Option<&Motiflet>) -> Result<Option<Incumbent>> {
    let Some(seed) = seed else { return Ok(None) };
    if seed.k() != k {
        return Err(Error::Parameter(format!(
            "seed has {} offsets, expected {k}",
            seed.k()
        )));
    }
    check_candidate(dist, &seed.offsets)?;
    let sq = bounded_extent(dist, &seed.offsets, f64::INFINITY, true).unwrap_or(f64::INFINITY);
    Ok(Some(Incumbent::new(sq, seed.offsets.clone())))
}

/// Approximate top k-Motiflet.
pub fn approximate<D: Distances + ?Sized>(dist: &D, k: usize) -> Result<SearchOutcome> {
    approximate_from(dist, k, None)
}

/// Approximate search starting from an incumbent (for example a k-subset of
/// a larger motiflet); the result is never worse than the seed.
pub fn approximate_from<D: Distances + ?Sized>(dist: &D, k: usize, seed: Option<&Motiflet>) -> Result<SearchOutcome> {
    let packed = check_feasible(dist, k)?;
    let mut run = Tracker::new(seed_incumbent(dist, k, seed)?);
    let mut buf = RowBuffer::default();
    let mut scratch = Vec::new();
    let mut members = Vec::with_capacity(k);

    for i in 0..dist.num_windows() {
        run.stats.queries += 1;
        let bound = run.bound();
        let row = dist.row(i, &mut buf);
        // Fewer than k offsets in range also means fewer than k - 1 neighbors,
        // so the range-size test folds into the neighbor search.
        let picked = greedy_neighbors(dist, row, i, k, bound, &mut scratch);
        if picked.len() + 1 < k {
            continue;
        }
        run.stats.candidates += 1;
        members.clear();
        members.push(i);
        members.extend(picked.iter().map(|p| p.0));
        match bounded_extent(dist, &members, bound, false) {
            Some(sq) if sq < bound => run.replace(Incumbent::new(sq, members.clone())),
            _ => run.stats.abandoned += 1,
        }
    }

    if run.best.is_none() {
        // No window's greedy neighborhood reached k; the packing still does.
        let offsets = packed[..k].to_vec();
        let sq = bounded_extent(dist, &offsets, f64::INFINITY, true).unwrap_or(f64::INFINITY);
        run.replace(Incumbent::new(sq, offsets));
    }
    Ok(run.finish(dist.window(), Exactness::Approximate))
}

/// Exact top k-Motiflet.
pub fn exact<D: Distances + ?Sized>(dist: &D, k: usize, options: &SearchOptions) -> Result<SearchOutcome> {
    exact_from(dist, k, None, options)
}

/// Exact search whose initial incumbent is the better of `seed` and the
/// approximate solution.
pub fn exact_from<D: Distances + ?Sized>(
    dist: &D,
    k: usize,
    seed: Option<&Motiflet>,
    options: &SearchOptions,
) -> Result<SearchOutcome> {
    let approx = approximate_from(dist, k, seed)?;
    let start = Incumbent::new(approx.motiflet.squared_extent, approx.motiflet.offsets.clone());

    let estimated = estimate_subsets(dist, k, start.sq, options.subset_ceiling);
    if estimated > options.subset_ceiling {
        return Err(Error::Resource {
            what: "exact subset enumeration",
            estimated,
            ceiling: options.subset_ceiling,
        });
    }

    let mut run = Tracker {
        best: Some(start),
        stats: approx.state.stats,
        trace: approx.state.trace,
    };
    run.stats.estimated_subsets = Some(estimated);

    let mut buf = RowBuffer::default();
    let mut ranked: Vec<(f64, usize)> = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    for i in 0..dist.num_windows() {
        run.stats.queries += 1;
        let bound = run.bound();
        let row = dist.row(i, &mut buf);
        // Each set is enumerated from its smallest offset only.
        ranked.clear();
        ranked.extend(
            row.iter()
                .enumerate()
                .skip(i + 1)
                .filter(|&(j, &d)| d <= bound && !dist.overlaps(i, j))
                .map(|(j, &d)| (d, j)),
        );
        if ranked.len() + 1 < k {
            continue;
        }
        ranked.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // The anchor is the member farthest from the query, so sets come out
        // in ascending order of their largest query distance.
        for anchor in (k - 2)..ranked.len() {
            let (dq, a) = ranked[anchor];
            if dq > run.bound() {
                break;
            }
            let bound = run.bound();
            let pool: Vec<usize> = ranked[..anchor]
                .iter()
                .map(|&(_, j)| j)
                .filter(|&j| !dist.overlaps(j, a) && dist.sq_dist(j, a) <= bound)
                .collect();
            if pool.len() + 2 < k {
                run.stats.pruned += 1;
                continue;
            }
            chosen.clear();
            chosen.extend([i, a]);
            extend_subset(dist, k, &mut chosen, &pool, dq, &mut run);
        }
    }
    Ok(run.finish(dist.window(), Exactness::Exact))
}

fn extend_subset<D: Distances + ?Sized>(
    dist: &D,
    k: usize,
    chosen: &mut Vec<usize>,
    pool: &[usize],
    extent: f64,
    run: &mut Tracker,
) {
    if chosen.len() == k {
        run.stats.subsets += 1;
        run.stats.candidates += 1;
        let best = run.best.as_ref().expect("seeded");
        if extent <= best.sq {
            let mut sorted = chosen.clone();
            sorted.sort_unstable();
            if best.beaten_by(extent, &sorted) {
                run.replace(Incumbent { sq: extent, offsets: sorted });
            }
        }
        return;
    }
    let need = k - chosen.len();
    for (idx, &x) in pool.iter().enumerate() {
        if pool.len() - idx < need {
            break;
        }
        let bound = run.bound();
        let ext = chosen
            .iter()
            .map(|&c| dist.sq_dist(c, x))
            .fold(extent, f64::max);
        if ext > bound {
            run.stats.pruned += 1;
            continue;
        }
        let next: Vec<usize> = if need > 1 {
            pool[idx + 1..]
                .iter()
                .copied()
                .filter(|&z| !dist.overlaps(z, x) && dist.sq_dist(z, x) <= bound)
                .collect()
        } else {
            Vec::new()
        };
        if next.len() + 1 < need {
            run.stats.pruned += 1;
            continue;
        }
        chosen.push(x);
        extend_subset(dist, k, chosen, &next, ext, run);
        chosen.pop();
    }
}

/// Number of pairwise non-overlapping `(k - 1)`-subsets of each window's
/// later in-range neighbors, summed over all windows. Stops counting once the
/// sum passes `ceiling`.
fn estimate_subsets<D: Distances + ?Sized>(dist: &D, k: usize, bound_sq: f64, ceiling: u128) -> u128 {
    let mut total: u128 = 0;
    let mut buf = RowBuffer::default();
    let mut range = Vec::new();
    for i in 0..dist.num_windows() {
        let row = dist.row(i, &mut buf);
        range.clear();
        range.extend(
            row.iter()
                .enumerate()
                .skip(i + 1)
                .filter(|&(j, &d)| d <= bound_sq && !dist.overlaps(i, j))
                .map(|(j, _)| j),
        );
        let count = match dist.exclusion_radius() {
            Some(radius) => count_spaced_subsets(&range, k - 1, radius),
            None => binomial(range.len() as u128, (k - 1) as u128),
        };
        total = total.saturating_add(count);
        if total > ceiling {
            break;
        }
    }
    total
}

/// Subsets of size `size` of the ascending `offsets` whose consecutive
/// members differ by more than `radius`.
pub(crate) fn count_spaced_subsets(offsets: &[usize], size: usize, radius: usize) -> u128 {
    if size == 0 {
        return 1;
    }
    let m = offsets.len();
    // ending[p]: subsets of the current size whose largest member is offsets[p]
    let mut ending = vec![1u128; m];
    for _ in 1..size {
        let mut next = vec![0u128; m];
        let mut prefix: u128 = 0;
        let mut q = 0;
        for p in 0..m {
            while q < p && offsets[p] - offsets[q] > radius {
                prefix = prefix.saturating_add(ending[q]);
                q += 1;
            }
            next[p] = prefix;
        }
        ending = next;
    }
    ending.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
}

fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for t in 0..r {
        acc = match acc.checked_mul(n - t) {
            Some(v) => v / (t + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Reference solver: binary search over the distinct pairwise distances for
/// the smallest threshold whose neighborhood graph holds a k-clique of
/// non-overlapping windows, then the lexicographically first such clique.
pub fn oracle<D: Distances + ?Sized>(dist: &D, k: usize, options: &SearchOptions) -> Result<Motiflet> {
    let n = dist.num_windows();
    if n > options.oracle_max_windows {
        return Err(Error::Resource {
            what: "oracle window count",
            estimated: n as u128,
            ceiling: options.oracle_max_windows as u128,
        });
    }
    if k > options.oracle_max_k {
        return Err(Error::Resource {
            what: "oracle cardinality",
            estimated: k as u128,
            ceiling: options.oracle_max_k as u128,
        });
    }
    check_feasible(dist, k)?;

    let mut levels: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !dist.overlaps(i, j) {
                levels.push(dist.sq_dist(i, j));
            }
        }
    }
    levels.sort_unstable_by(f64::total_cmp);
    levels.dedup();

    // The top level admits every non-overlapping pair, and a packing exists.
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if first_clique(dist, k, levels[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let threshold = levels[lo];
    let offsets = first_clique(dist, k, threshold)
        .ok_or_else(|| Error::Contract("oracle threshold lost its clique".into()))?;
    Ok(Motiflet {
        offsets,
        extent: threshold.sqrt(),
        squared_extent: threshold,
        window: dist.window(),
        exactness: Exactness::Oracle,
    })
}

fn first_clique<D: Distances + ?Sized>(dist: &D, k: usize, threshold: f64) -> Option<Vec<usize>> {
    let n = dist.num_windows();
    let linked = |a: usize, b: usize| !dist.overlaps(a, b) && dist.sq_dist(a, b) <= threshold;
    let mut clique = Vec::with_capacity(k);
    for a in 0..n {
        let later: Vec<usize> = (a + 1..n).filter(|&b| linked(a, b)).collect();
        clique.clear();
        clique.push(a);
        if grow_clique(&linked, k, &mut clique, &later) {
            return Some(clique);
        }
    }
    None
}

fn grow_clique(linked: &impl Fn(usize, usize) -> bool, k: usize, clique: &mut Vec<usize>, cands: &[usize]) -> bool {
    if clique.len() == k {
        return true;
    }
    for (idx, &v) in cands.iter().enumerate() {
        if clique.len() + cands.len() - idx < k {
            return false;
        }
        let rest: Vec<usize> = cands[idx + 1..].iter().copied().filter(|&w| linked(v, w)).collect();
        clique.push(v);
        if grow_clique(linked, k, clique, &rest) {
            return true;
        }
        clique.pop();
    }
    false
}

fn source_for(view: &SeriesView) -> Result<crate::distance::DistanceSource> {
    compute_distance_source(view, Policy::Auto, DEFAULT_MEMORY_BUDGET)
}

/// [`approximate`] on a series view.
pub fn approx_k_motiflet(view: &SeriesView, k: usize) -> Result<SearchOutcome> {
    approximate(&source_for(view)?, k)
}

/// [`exact`] on a series view.
pub fn exact_k_motiflet(view: &SeriesView, k: usize, options: &SearchOptions) -> Result<SearchOutcome> {
    exact(&source_for(view)?, k, options)
}

/// [`oracle`] on a series view.
pub fn oracle_k_motiflet(view: &SeriesView, k: usize, options: &SearchOptions) -> Result<Motiflet> {
    oracle(&source_for(view)?, k, options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::CustomMatrix;

    fn line(points: &[f64]) -> CustomMatrix {
        CustomMatrix::from_points(&points.iter().map(|&p| vec![p]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_point_extent_is_their_distance() {
        let m = line(&[0.0, 3.0, 7.5]);
        assert_eq!(pairwise_extent(&m, &[0, 2], f64::INFINITY).unwrap(), Extent::Within(7.5));
        assert_eq!(pairwise_extent(&m, &[0, 1, 2], f64::INFINITY).unwrap(), Extent::Within(7.5));
        assert_eq!(pairwise_extent(&m, &[0, 1, 2], 7.5 * 0.5).unwrap(), Extent::Abandoned);
        assert_eq!(pairwise_extent(&m, &[0, 1, 2], 7.5).unwrap(), Extent::Abandoned);
    }

    #[test]
    fn overlapping_candidate_is_a_contract_error() {
        let m = CustomMatrix::with_exclusion_radius(3, &[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0], 1).unwrap();
        assert!(matches!(pairwise_extent(&m, &[0, 1], f64::INFINITY), Err(Error::Contract(_))));
        assert!(pairwise_extent(&m, &[0, 2], f64::INFINITY).is_ok());
    }

    #[test]
    fn small_enumerable_pair() {
        let m = line(&[0.0, 10.0, 10.4, 3.0, 20.0]);
        for outcome in [approximate(&m, 2).unwrap().motiflet, exact(&m, 2, &SearchOptions::default()).unwrap().motiflet] {
            assert_eq!(outcome.offsets, vec![1, 2]);
            assert!((outcome.extent - 0.4).abs() < 1e-12);
        }
        let o = oracle(&m, 2, &SearchOptions::default()).unwrap();
        assert_eq!(o.offsets, vec![1, 2]);
    }

    #[test]
    fn infeasible_k_fails_fast() {
        let m = CustomMatrix::with_exclusion_radius(4, &[0.0; 16], 2).unwrap();
        assert!(matches!(approximate(&m, 3), Err(Error::Feasibility { k: 3, available: 2 })));
        assert!(matches!(exact(&m, 3, &SearchOptions::default()), Err(Error::Feasibility { .. })));
        assert!(matches!(oracle(&m, 3, &SearchOptions::default()), Err(Error::Feasibility { .. })));
        assert!(matches!(approximate(&m, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn ties_resolve_to_smallest_tuple() {
        // every pair at distance 1
        let n = 6;
        let d: Vec<f64> = (0..n * n).map(|x| if x / n == x % n { 0.0 } else { 1.0 }).collect();
        let m = CustomMatrix::without_overlaps(n, &d).unwrap();
        let opts = SearchOptions::default();
        assert_eq!(exact(&m, 3, &opts).unwrap().motiflet.offsets, vec![0, 1, 2]);
        assert_eq!(oracle(&m, 3, &opts).unwrap().offsets, vec![0, 1, 2]);
        assert_eq!(approximate(&m, 3).unwrap().motiflet.offsets, vec![0, 1, 2]);
    }

    #[test]
    fn spaced_subset_counts() {
        // brute force over all subsets
        let offsets = [0usize, 2, 3, 5, 9, 10, 14];
        for size in 0..5 {
            for radius in 0..4 {
                let mut brute = 0u128;
                for mask in 0u32..(1 << offsets.len()) {
                    if mask.count_ones() as usize != size {
                        continue;
                    }
                    let chosen: Vec<usize> = (0..offsets.len()).filter(|b| mask >> b & 1 == 1).map(|b| offsets[b]).collect();
                    if chosen.windows(2).all(|w| w[1] - w[0] > radius) {
                        brute += 1;
                    }
                }
                assert_eq!(count_spaced_subsets(&offsets, size, radius), brute, "size {size} radius {radius}");
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 7), 18_643_560);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(10_000, 40), u128::MAX);
    }

    #[test]
    fn ceiling_is_a_resource_error() {
        let n = 30;
        let d: Vec<f64> = (0..n * n).map(|x| if x / n == x % n { 0.0 } else { 1.0 }).collect();
        let m = CustomMatrix::without_overlaps(n, &d).unwrap();
        let opts = SearchOptions {
            subset_ceiling: 1000,
            ..SearchOptions::default()
        };
        match exact(&m, 5, &opts) {
            Err(Error::Resource { estimated, ceiling: 1000, .. }) => assert!(estimated > 1000),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn oracle_size_guard() {
        let m = line(&(0..20).map(f64::from).collect::<Vec<_>>());
        let opts = SearchOptions {
            oracle_max_windows: 10,
            ..SearchOptions::default()
        };
        assert!(matches!(oracle(&m, 2, &opts), Err(Error::Resource { .. })));
    }

    #[test]
    fn seed_never_gets_worse() {
        let m = line(&[0.0, 1.0, 5.0, 5.1, 5.2, 9.0]);
        let seed = Motiflet {
            offsets: vec![2, 3, 4],
            extent: 0.0,
            squared_extent: 0.0,
            window: 0,
            exactness: Exactness::Exact,
        };
        let out = approximate_from(&m, 3, Some(&seed)).unwrap();
        assert_eq!(out.motiflet.offsets, vec![2, 3, 4]);
        assert!((out.motiflet.extent - 0.2).abs() < 1e-9);
        assert!(approximate_from(&m, 2, Some(&seed)).is_err());
    }
}
