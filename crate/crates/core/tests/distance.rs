use motiflets::distance::{read_matrix_dump, write_matrix_dump, DEFAULT_MEMORY_BUDGET};
use motiflets::fixture::random_walk;
use motiflets::{compute_distance_source, row_knn, znorm_distance_naive, Distances, Error, Policy, SeriesView};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn source(values: Vec<f64>, l: usize, policy: Policy) -> motiflets::DistanceSource {
    let view = SeriesView::new(values, l).unwrap();
    compute_distance_source(&view, policy, DEFAULT_MEMORY_BUDGET).unwrap()
}

#[test]
fn full_matrix_against_naive() {
    let values = random_walk(1000, 21);
    let view = SeriesView::new(values, 50).unwrap();
    let dist = compute_distance_source(&view, Policy::Materialize, DEFAULT_MEMORY_BUDGET).unwrap();
    let n = view.num_windows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let naive = znorm_distance_naive(&view, i, j).unwrap();
            worst = worst.max((dist.sq_dist(i, j) - naive * naive).abs());
        }
    }
    assert!(worst <= 1e-6, "max error {worst}");
}

#[test]
fn constant_series_is_all_zero() {
    let dist = source(vec![3.5; 120], 16, Policy::Materialize);
    assert!(dist.matrix().unwrap().iter().all(|&d| d == 0.0));
}

#[test]
fn sine_period_repeats() {
    let p = 37;
    let values: Vec<f64> = (0..600)
        .map(|t| (std::f64::consts::TAU * t as f64 / p as f64).sin())
        .collect();
    let dist = source(values, p, Policy::Materialize);
    for i in 0..dist.num_windows() - p {
        assert!(dist.sq_dist(i, i + p) <= 1e-6, "offset {i}");
    }
}

#[test]
fn on_demand_rows_match_materialized() {
    let values = random_walk(5000, 4);
    let full = source(values.clone(), 40, Policy::Materialize);
    let lazy = source(values, 40, Policy::OnDemand);
    assert!(full.is_materialized() && !lazy.is_materialized());
    let n = full.num_windows();
    let mut buf = Default::default();
    for i in (0..n).step_by(7).chain(n - 3..n) {
        let want = full.matrix().unwrap()[i * n..(i + 1) * n].to_vec();
        let got = lazy.row(i, &mut buf);
        for j in 0..n {
            assert!((got[j] - want[j]).abs() <= 1e-8, "({i}, {j})");
        }
    }
    assert!((lazy.sq_dist(10, 4000) - full.sq_dist(10, 4000)).abs() <= 1e-8);
}

#[test]
fn capacity_error_names_the_budget() {
    let view = SeriesView::new(random_walk(3000, 1), 10).unwrap();
    match compute_distance_source(&view, Policy::Materialize, 1 << 20) {
        Err(Error::Capacity { windows, budget, .. }) => {
            assert_eq!(windows, 2991);
            assert_eq!(budget, 1 << 20);
        }
        other => panic!("expected capacity error, got {other:?}"),
    }
    let auto = compute_distance_source(&view, Policy::Auto, 1 << 20).unwrap();
    assert!(!auto.is_materialized());
}

/// Five exact template copies at known offsets in low-amplitude noise.
fn planted_copies() -> (Vec<f64>, Vec<usize>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let l = 30;
    let template: Vec<f64> = (0..l).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut values: Vec<f64> = (0..1200).map(|_| rng.random_range(-0.5..0.5)).collect();
    let offsets = vec![40, 300, 520, 790, 1100];
    for &o in &offsets {
        values[o..o + l].copy_from_slice(&template);
    }
    (values, offsets, l)
}

#[test]
fn knn_finds_planted_copies() {
    let (values, offsets, l) = planted_copies();
    let dist = source(values, l, Policy::Materialize);
    let list = row_knn(&dist, offsets[0], 5, f64::INFINITY);
    let mut found = list.neighbors.clone();
    found.sort_unstable();
    assert_eq!(found, offsets[1..].to_vec());

    // exhaustive: the copies are exactly the four nearest non-overlapping windows
    let n = dist.num_windows();
    let mut ranked: Vec<(f64, usize)> = (0..n)
        .filter(|&j| !dist.overlaps(offsets[0], j))
        .map(|j| (dist.sq_dist(offsets[0], j), j))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut nearest: Vec<usize> = ranked[..4].iter().map(|r| r.1).collect();
    nearest.sort_unstable();
    assert_eq!(nearest, offsets[1..].to_vec());
    assert!(list.distances.iter().all(|&d| d < 1e-6));
}

#[test]
fn knn_with_empty_range() {
    let dist = source(random_walk(200, 2), 10, Policy::Materialize);
    let list = row_knn(&dist, 50, 4, 1e-9);
    assert!(list.neighbors.is_empty());
    assert_eq!(list.members(), vec![50]);
}

#[test]
fn matrix_dump_round_trip() {
    let dist = source(random_walk(90, 3), 12, Policy::Materialize);
    let mut bytes = Vec::new();
    write_matrix_dump(&dist, &mut bytes).unwrap();
    assert_eq!(&bytes[..4], b"MTLD");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 79);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 12);
    assert_eq!(bytes.len(), 16 + 79 * 79 * 8);
    let dump = read_matrix_dump(bytes.as_slice()).unwrap();
    assert_eq!(dump.windows, 79);
    assert_eq!(dump.window, 12);
    assert_eq!(dump.values.as_slice(), dist.matrix().unwrap());
}

fn walk_source() -> impl Strategy<Value = motiflets::DistanceSource> {
    (30usize..160, 2usize..20, any::<u64>()).prop_map(|(n, l, seed)| source(random_walk(n, seed), l, Policy::Materialize))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_is_symmetric_and_bounded(dist in walk_source()) {
        let n = dist.num_windows();
        let cap = 4.0 * dist.window() as f64;
        for i in 0..n {
            prop_assert_eq!(dist.sq_dist(i, i), 0.0);
            for j in 0..n {
                let d = dist.sq_dist(i, j);
                prop_assert_eq!(d.to_bits(), dist.sq_dist(j, i).to_bits());
                prop_assert!((0.0..=cap).contains(&d));
            }
        }
    }

    #[test]
    fn knn_is_sorted_and_non_overlapping(dist in walk_source(), q in any::<prop::sample::Index>(), k in 2usize..7, bound in 0.5f64..8.0) {
        let query = q.index(dist.num_windows());
        let list = row_knn(&dist, query, k, bound);
        prop_assert!(list.neighbors.len() < k);
        let members = list.members();
        for (a, &x) in members.iter().enumerate() {
            for &y in &members[a + 1..] {
                prop_assert!(!dist.overlaps(x, y));
            }
        }
        prop_assert!(list.distances.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(list.distances.iter().all(|&d| d < bound));
    }

    #[test]
    fn tighter_bound_gives_a_subset(dist in walk_source(), q in any::<prop::sample::Index>(), k in 2usize..7, b in 0.5f64..6.0, extra in 0.0f64..4.0) {
        let query = q.index(dist.num_windows());
        let tight = row_knn(&dist, query, k, b).neighbors;
        let loose = row_knn(&dist, query, k, b + extra).neighbors;
        prop_assert!(tight.iter().all(|x| loose.contains(x)));
    }
}
