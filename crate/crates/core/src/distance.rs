//! All-pairs z-normalized distances between the windows of a series.
//!
//! Squared distances come from sliding cross dot products,
//!
//! ```text
//! d²(i, j) = 2l · (1 − (Q[i,j] − l·μi·μj) / (l·σi·σj))
//! Q[i+1, j+1] = Q[i, j] − t[i]·t[j] + t[i+l]·t[j+l]
//! ```
//!
//! so a full sweep costs O(n²) regardless of the window length. The series is
//! shifted by its global mean first, which leaves every z-normalized window
//! unchanged and keeps the dot products small.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::series::{FlatPolicy, SeriesView, REFRESH_INTERVAL};

/// Default ceiling for a materialized matrix: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

const DUMP_MAGIC: &[u8; 4] = b"MTLD";
const DUMP_VERSION: u32 = 1;

/// Read access to squared pairwise distances plus the overlap rule.
///
/// Implemented by [`DistanceSource`] for real series and by [`CustomMatrix`]
/// for caller-supplied point sets.
pub trait Distances {
    /// Number of candidate windows (or points).
    fn num_windows(&self) -> usize;

    /// Window length, or 0 for an abstract matrix.
    fn window(&self) -> usize;

    fn sq_dist(&self, i: usize, j: usize) -> f64;

    fn overlaps(&self, i: usize, j: usize) -> bool;

    /// `Some(h)` when `overlaps(i, j)` is exactly `|i - j| <= h`.
    fn exclusion_radius(&self) -> Option<usize> {
        None
    }

    /// Squared distances from `i` to every window. Sequential access
    /// (`i`, `i + 1`, ...) through the same buffer is the fast path.
    fn row<'a>(&'a self, i: usize, buf: &'a mut RowBuffer) -> &'a [f64];
}

/// Scratch space for [`Distances::row`]; keeps the last row's dot products so
/// the next row is an O(n) update.
#[derive(Debug, Default, Clone)]
pub struct RowBuffer {
    row: Vec<f64>,
    dots: Vec<f64>,
    last: Option<usize>,
    age: usize,
}

/// Whether to store the full matrix or compute rows when asked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    Materialize,
    OnDemand,
    /// Materialize when it fits the memory budget, otherwise on demand.
    #[default]
    Auto,
}

#[derive(Debug, Clone)]
struct Kernel {
    centered: Vec<f64>,
    means: Vec<f64>,
    stds: Vec<f64>,
    flat: Vec<bool>,
    window: usize,
}

impl Kernel {
    fn new(view: &SeriesView) -> Self {
        let values = view.values();
        let shift = values.iter().sum::<f64>() / values.len() as f64;
        let count = view.num_windows();
        Kernel {
            centered: values.iter().map(|v| v - shift).collect(),
            means: view.means().iter().map(|m| m - shift).collect(),
            stds: view.stds().to_vec(),
            flat: (0..count).map(|i| view.is_flat(i)).collect(),
            window: view.window(),
        }
    }

    fn count(&self) -> usize {
        self.means.len()
    }

    fn dot(&self, i: usize, j: usize) -> f64 {
        let l = self.window;
        self.centered[i..i + l]
            .iter()
            .zip(&self.centered[j..j + l])
            .map(|(a, b)| a * b)
            .sum()
    }

    #[inline]
    fn sq_from_dot(&self, i: usize, j: usize, q: f64) -> f64 {
        if i == j {
            return 0.0;
        }
        let l = self.window as f64;
        match (self.flat[i], self.flat[j]) {
            (true, true) => 0.0,
            (true, false) | (false, true) => l,
            (false, false) => {
                let cov = q - l * self.means[i] * self.means[j];
                let corr = cov / (l * self.stds[i] * self.stds[j]);
                (2.0 * l * (1.0 - corr)).clamp(0.0, 4.0 * l)
            }
        }
    }

    /// Dot products of window `i` against windows `from..`, updated from row
    /// `i - 1` when possible.
    fn advance(&self, i: usize, from: usize, buf: &mut RowBuffer) {
        let n = self.count();
        let t = &self.centered;
        let l = self.window;
        buf.dots.resize(n, 0.0);
        let sequential = i > 0 && buf.last == Some(i - 1) && buf.age < REFRESH_INTERVAL;
        if sequential {
            let (out, inc) = (t[i - 1], t[i + l - 1]);
            for j in (from.max(1)..n).rev() {
                buf.dots[j] = buf.dots[j - 1] - out * t[j - 1] + inc * t[j + l - 1];
            }
            if from == 0 {
                buf.dots[0] = self.dot(i, 0);
            }
            buf.age += 1;
        } else {
            for j in from..n {
                buf.dots[j] = self.dot(i, j);
            }
            buf.age = 0;
        }
        buf.last = Some(i);
    }
}

/// Pairwise squared z-normalized distances for one series and window length.
#[derive(Debug, Clone)]
pub struct DistanceSource {
    kernel: Kernel,
    matrix: Option<Vec<f64>>,
}

/// Builds the distance source for `view`.
///
/// Fails with [`Error::Capacity`] if `Policy::Materialize` is requested and
/// the matrix exceeds `memory_budget` bytes, and with
/// [`Error::DegenerateWindow`] if the view is strict and has a flat window.
pub fn compute_distance_source(
    view: &SeriesView,
    policy: Policy,
    memory_budget: u64,
) -> Result<DistanceSource> {
    if view.policy() == FlatPolicy::Strict {
        for i in 0..view.num_windows() {
            view.check_flat(i)?;
        }
    }
    let n = view.num_windows();
    let required = (n as u128) * (n as u128) * 8;
    let materialize = match policy {
        Policy::OnDemand => false,
        Policy::Auto => required <= memory_budget as u128,
        Policy::Materialize => {
            if required > memory_budget as u128 {
                return Err(Error::Capacity {
                    windows: n,
                    required,
                    budget: memory_budget as u128,
                });
            }
            true
        }
    };
    let kernel = Kernel::new(view);
    let matrix = materialize.then(|| build_matrix(&kernel));
    Ok(DistanceSource { kernel, matrix })
}

fn build_matrix(kernel: &Kernel) -> Vec<f64> {
    let n = kernel.count();
    let mut m = vec![0.0; n * n];
    let mut buf = RowBuffer::default();
    for i in 0..n {
        kernel.advance(i, i, &mut buf);
        for j in i + 1..n {
            let v = kernel.sq_from_dot(i, j, buf.dots[j]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

impl DistanceSource {
    pub fn is_materialized(&self) -> bool {
        self.matrix.is_some()
    }

    /// Row-major squared distances, when materialized.
    pub fn matrix(&self) -> Option<&[f64]> {
        self.matrix.as_deref()
    }
}

impl Distances for DistanceSource {
    fn num_windows(&self) -> usize {
        self.kernel.count()
    }

    fn window(&self) -> usize {
        self.kernel.window
    }

    fn sq_dist(&self, i: usize, j: usize) -> f64 {
        match &self.matrix {
            Some(m) => m[i * self.kernel.count() + j],
            None => {
                let (a, b) = (i.min(j), i.max(j));
                self.kernel.sq_from_dot(a, b, self.kernel.dot(a, b))
            }
        }
    }

    fn overlaps(&self, i: usize, j: usize) -> bool {
        crate::series::overlaps(i, j, self.kernel.window)
    }

    fn exclusion_radius(&self) -> Option<usize> {
        Some(self.kernel.window / 2)
    }

    fn row<'a>(&'a self, i: usize, buf: &'a mut RowBuffer) -> &'a [f64] {
        let n = self.kernel.count();
        if let Some(m) = &self.matrix {
            return &m[i * n..(i + 1) * n];
        }
        self.kernel.advance(i, 0, buf);
        buf.row.resize(n, 0.0);
        for j in 0..n {
            buf.row[j] = self.kernel.sq_from_dot(i, j, buf.dots[j]);
        }
        &buf.row
    }
}

type OverlapFn = Box<dyn Fn(usize, usize) -> bool + Send + Sync>;

/// A caller-supplied symmetric distance matrix with its own overlap predicate.
///
/// Lets the searches run on point sets that do not come from a series, such as
/// hand-built adversarial geometries and unit fixtures.
pub struct CustomMatrix {
    n: usize,
    sq: Vec<f64>,
    overlap: OverlapFn,
    radius: Option<usize>,
}

impl std::fmt::Debug for CustomMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomMatrix")
            .field("n", &self.n)
            .field("radius", &self.radius)
            .finish_non_exhaustive()
    }
}

impl CustomMatrix {
    /// `distances` is row-major `n x n`, unsquared; it must be symmetric with
    /// a zero diagonal.
    pub fn new<F>(n: usize, distances: &[f64], overlap: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> bool + Send + Sync + 'static,
    {
        Self::build(n, distances, Box::new(overlap), None)
    }

    /// Points never overlap each other.
    pub fn without_overlaps(n: usize, distances: &[f64]) -> Result<Self> {
        Self::build(n, distances, Box::new(|i, j| i == j), Some(0))
    }

    /// Overlap iff offsets differ by at most `radius`, as for series windows.
    pub fn with_exclusion_radius(n: usize, distances: &[f64], radius: usize) -> Result<Self> {
        Self::build(
            n,
            distances,
            Box::new(move |i: usize, j: usize| i.abs_diff(j) <= radius),
            Some(radius),
        )
    }

    /// Builds from coordinates under the Euclidean metric.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Self::without_overlaps(n, &d)
    }

    fn build(n: usize, distances: &[f64], overlap: OverlapFn, radius: Option<usize>) -> Result<Self> {
        if distances.len() != n * n {
            return Err(Error::Parameter(format!(
                "expected {} matrix entries, got {}",
                n * n,
                distances.len()
            )));
        }
        for i in 0..n {
            if distances[i * n + i] != 0.0 {
                return Err(Error::Parameter(format!("diagonal entry {i} is not zero")));
            }
            for j in i + 1..n {
                let (a, b) = (distances[i * n + j], distances[j * n + i]);
                if !a.is_finite() || a < 0.0 || a != b {
                    return Err(Error::Parameter(format!(
                        "entries ({i}, {j}) must be finite, non-negative and symmetric"
                    )));
                }
            }
        }
        Ok(CustomMatrix {
            n,
            sq: distances.iter().map(|d| d * d).collect(),
            overlap,
            radius,
        })
    }
}

impl Distances for CustomMatrix {
    fn num_windows(&self) -> usize {
        self.n
    }

    fn window(&self) -> usize {
        0
    }

    fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.sq[i * self.n + j]
    }

    fn overlaps(&self, i: usize, j: usize) -> bool {
        i == j || (self.overlap)(i, j)
    }

    fn exclusion_radius(&self) -> Option<usize> {
        self.radius
    }

    fn row<'a>(&'a self, i: usize, _buf: &'a mut RowBuffer) -> &'a [f64] {
        &self.sq[i * self.n..(i + 1) * self.n]
    }
}

/// Non-trivial nearest neighbors of one query window.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub query: usize,
    /// Ascending by distance; ties by smaller offset.
    pub neighbors: Vec<usize>,
    /// z-normalized distances matching `neighbors`.
    pub distances: Vec<f64>,
}

impl NeighborList {
    /// The query followed by its neighbors.
    pub fn members(&self) -> Vec<usize> {
        std::iter::once(self.query)
            .chain(self.neighbors.iter().copied())
            .collect()
    }
}

/// Greedy non-trivial kNN over one row of squared distances: offsets strictly
/// within `bound_sq` are admitted in ascending (distance, offset) order unless
/// they overlap the query or an admitted offset. Returns at most `k - 1`
/// neighbors as `(offset, squared distance)`.
pub(crate) fn greedy_neighbors<D: Distances + ?Sized>(
    dist: &D,
    row: &[f64],
    query: usize,
    k: usize,
    bound_sq: f64,
    scratch: &mut Vec<(f64, usize)>,
) -> Vec<(usize, f64)> {
    scratch.clear();
    scratch.extend(
        row.iter()
            .enumerate()
            .filter(|&(j, &d)| d < bound_sq && !dist.overlaps(query, j))
            .map(|(j, &d)| (d, j)),
    );
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    let mut picked: Vec<(usize, f64)> = Vec::with_capacity(k.saturating_sub(1));
    // Only a sorted prefix is needed; it grows until k - 1 offsets are admitted.
    let spread = 2 * k * (dist.exclusion_radius().unwrap_or(0) + 1);
    let mut want = spread.max(64);
    let mut done = 0;
    while done < scratch.len() && picked.len() + 1 < k {
        let end = want.min(scratch.len());
        let tail = &mut scratch[done..];
        if end < done + tail.len() {
            tail.select_nth_unstable_by(end - done, order);
        }
        scratch[done..end].sort_unstable_by(order);
        for &(d, j) in &scratch[done..end] {
            if picked.len() + 1 >= k {
                break;
            }
            if picked.iter().all(|&(p, _)| !dist.overlaps(p, j)) {
                picked.push((j, d));
            }
        }
        done = end;
        want *= 2;
    }
    picked
}

/// Up to `k - 1` non-trivial neighbors of `query` closer than `bound`
/// (z-normalized units; pass `f64::INFINITY` for no bound).
pub fn row_knn<D: Distances + ?Sized>(dist: &D, query: usize, k: usize, bound: f64) -> NeighborList {
    let mut buf = RowBuffer::default();
    let row = dist.row(query, &mut buf);
    let bound_sq = if bound.is_infinite() { f64::INFINITY } else { bound * bound };
    let picked = greedy_neighbors(dist, row, query, k, bound_sq, &mut Vec::new());
    NeighborList {
        query,
        neighbors: picked.iter().map(|p| p.0).collect(),
        distances: picked.iter().map(|p| p.1.sqrt()).collect(),
    }
}

/// Writes the squared-distance matrix: a 16-byte header (`MTLD`, version,
/// window count, window length; `u32` little endian) followed by row-major
/// little-endian `f64` values.
pub fn write_matrix_dump<D: Distances + ?Sized, W: Write>(dist: &D, mut out: W) -> std::io::Result<()> {
    let n = dist.num_windows();
    let to_u32 = |v: usize| {
        u32::try_from(v).map_err(|_| std::io::Error::new(std::io::ErrorKind::InvalidInput, "dimension exceeds u32"))
    };
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&DUMP_VERSION.to_le_bytes())?;
    out.write_all(&to_u32(n)?.to_le_bytes())?;
    out.write_all(&to_u32(dist.window())?.to_le_bytes())?;
    let mut buf = RowBuffer::default();
    let mut bytes = Vec::with_capacity(n * 8);
    for i in 0..n {
        bytes.clear();
        for v in dist.row(i, &mut buf) {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&bytes)?;
    }
    out.flush()
}

/// Contents of a matrix dump.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDump {
    pub window: usize,
    pub windows: usize,
    /// Row-major squared distances.
    pub values: Vec<f64>,
}

pub fn read_matrix_dump<R: Read>(mut input: R) -> std::io::Result<MatrixDump> {
    let invalid = |msg: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string());
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[0..4] != DUMP_MAGIC {
        return Err(invalid("bad magic"));
    }
    let word = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().unwrap());
    if word(4) != DUMP_VERSION {
        return Err(invalid("unsupported dump version"));
    }
    let windows = word(8) as usize;
    let window = word(12) as usize;
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != windows * windows * 8 {
        return Err(invalid("payload length does not match header"));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(MatrixDump { window, windows, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::znorm_distance_naive;

    fn walk(n: usize, seed: u64) -> Vec<f64> {
        crate::fixture::random_walk(n, seed)
    }

    #[test]
    fn constant_series_is_all_zero() {
        let view = SeriesView::new(vec![4.2; 50], 8).unwrap();
        let src = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
        assert!(src.matrix().unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_period_windows_coincide() {
        let p = 25;
        let v: Vec<f64> = (0..300)
            .map(|t| (std::f64::consts::TAU * t as f64 / p as f64).sin())
            .collect();
        let view = SeriesView::new(v, p).unwrap();
        let src = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
        for i in 0..view.num_windows() - p {
            assert!(src.sq_dist(i, i + p) < 1e-6, "d({i}, {}) = {}", i + p, src.sq_dist(i, i + p));
        }
    }

    #[test]
    fn materialized_is_symmetric_with_zero_diagonal() {
        let view = SeriesView::new(walk(400, 1), 17).unwrap();
        let src = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
        let n = view.num_windows();
        let l = view.window() as f64;
        for i in 0..n {
            assert_eq!(src.sq_dist(i, i), 0.0);
            for j in 0..n {
                assert_eq!(src.sq_dist(i, j), src.sq_dist(j, i));
                assert!((0.0..=4.0 * l).contains(&src.sq_dist(i, j)));
            }
        }
    }

    #[test]
    fn on_demand_rows_match_materialized() {
        let view = SeriesView::new(walk(600, 2), 30).unwrap();
        let full = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
        let lazy = compute_distance_source(&view, Policy::OnDemand, DEFAULT_MEMORY_BUDGET).unwrap();
        assert!(!lazy.is_materialized());
        let mut buf = RowBuffer::default();
        let mut other = RowBuffer::default();
        for i in 0..view.num_windows() {
            let a = lazy.row(i, &mut buf).to_vec();
            let b = full.row(i, &mut other);
            for j in 0..a.len() {
                assert!((a[j] - b[j]).abs() < 1e-8);
                assert!((lazy.sq_dist(i, j) - b[j]).abs() < 1e-8);
            }
        }
        // random access falls back to a from-scratch row
        let r = lazy.row(7, &mut buf).to_vec();
        assert!((r[200] - full.sq_dist(7, 200)).abs() < 1e-8);
    }

    #[test]
    fn streaming_matches_naive() {
        let view = SeriesView::new(walk(500, 3), 24).unwrap();
        let src = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
        let l = view.window() as f64;
        let n = view.num_windows();
        for i in (0..n).step_by(7) {
            for j in (0..n).step_by(5) {
                let naive = znorm_distance_naive(&view, i, j).unwrap().powi(2);
                assert!((naive - src.sq_dist(i, j)).abs() / (4.0 * l) < 1e-6);
            }
        }
    }

    #[test]
    fn capacity_error_on_tight_budget() {
        let view = SeriesView::new(walk(200, 4), 10).unwrap();
        let err = compute_distance_source(&view, Policy::Materialize, 1024).unwrap_err();
        assert!(matches!(err, Error::Capacity { windows: 191, .. }));
        let auto = compute_distance_source(&view, Policy::Auto, 1024).unwrap();
        assert!(!auto.is_materialized());
    }

    #[test]
    fn strict_policy_rejects_flat_series() {
        let view = SeriesView::with_policy(vec![1.0; 20], 4, FlatPolicy::Strict).unwrap();
        assert!(matches!(
            compute_distance_source(&view, Policy::Auto, DEFAULT_MEMORY_BUDGET),
            Err(Error::DegenerateWindow { .. })
        ));
    }

    #[test]
    fn knn_without_candidates_returns_query_alone() {
        let view = SeriesView::new(walk(40, 5), 20).unwrap();
        let src = compute_distance_source(&view, Policy::Auto, DEFAULT_MEMORY_BUDGET).unwrap();
        // every window overlaps offset 10 when l = 20 and n' = 21
        let list = row_knn(&src, 10, 3, f64::INFINITY);
        assert_eq!(list.members(), vec![10]);
        assert!(list.distances.is_empty());
    }

    #[test]
    fn knn_ties_prefer_smaller_offset() {
        // points 1 and 3 are equidistant from 0; 2 overlaps both
        let d = [
            0.0, 1.0, 5.0, 1.0, //
            1.0, 0.0, 5.0, 2.0, //
            5.0, 5.0, 0.0, 5.0, //
            1.0, 2.0, 5.0, 0.0,
        ];
        let m = CustomMatrix::new(4, &d, |i, j| i.abs_diff(j) == 1 && (i == 2 || j == 2)).unwrap();
        let list = row_knn(&m, 0, 2, f64::INFINITY);
        assert_eq!(list.neighbors, vec![1]);
        let list = row_knn(&m, 0, 3, f64::INFINITY);
        assert_eq!(list.neighbors, vec![1, 3]);
    }

    #[test]
    fn knn_bound_is_strict() {
        let d = [0.0, 1.0, 2.0, 1.0, 0.0, 1.5, 2.0, 1.5, 0.0];
        let m = CustomMatrix::without_overlaps(3, &d).unwrap();
        assert_eq!(row_knn(&m, 0, 3, 2.0).neighbors, vec![1]);
        assert_eq!(row_knn(&m, 0, 3, 2.0 + 1e-9).neighbors, vec![1, 2]);
    }

    #[test]
    fn custom_matrix_validation() {
        assert!(CustomMatrix::without_overlaps(2, &[0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(CustomMatrix::without_overlaps(2, &[1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(CustomMatrix::without_overlaps(2, &[0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn dump_header_layout() {
        let view = SeriesView::new(walk(60, 6), 12).unwrap();
        let src = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
        let mut bytes = Vec::new();
        write_matrix_dump(&src, &mut bytes).unwrap();
        assert_eq!(&bytes[0..4], b"MTLD");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 49);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 12);
        assert_eq!(bytes.len(), 16 + 49 * 49 * 8);
        let back = read_matrix_dump(&bytes[..]).unwrap();
        assert_eq!(back.values, src.matrix().unwrap());
        assert!(read_matrix_dump(&bytes[..20]).is_err());
    }
}
