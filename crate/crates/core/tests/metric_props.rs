use mpfp::filtration::ThresholdSet;
use mpfp::metric::{
    fingerprint_distance, slicewise_matching_distance, stability_check, wasserstein, wasserstein_matching, Partner,
    RowMetric, StabilityConfig, WassersteinOrder,
};
use mpfp::molgraph::FilterFunction;
use mpfp::mpfingerprint::{FingerprintSpec, MpFingerprint2D, RowSpec, Variant};
use mpfp::persistence::{Bar, PersistenceDiagram};
use mpfp::synthetic::random_molecule;
use mpfp::vectorize::Vectorization;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const K: u32 = 8;

fn diagram() -> impl Strategy<Value = PersistenceDiagram> {
    proptest::collection::vec((0u32..K, 1u32..=K, proptest::bool::weighted(0.15)), 0..5).prop_map(|pts| {
        PersistenceDiagram::new(
            1,
            K,
            pts.into_iter()
                .map(|(b, len, e)| if e { Bar::essential(b, K) } else { Bar::finite(b, (b + len).min(K).max(b + 1)) })
                .collect(),
        )
    })
}

fn pts(pd: &PersistenceDiagram) -> Vec<(f64, f64)> {
    pd.bars().iter().map(|b| (f64::from(b.birth), f64::from(b.death))).collect()
}

/// Minimum over every partial matching, by recursion.
fn brute(a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, p: Option<f64>) -> f64 {
    let diag = |q: (f64, f64)| (q.1 - q.0) / 2.0;
    let combine = |x: f64, y: f64| match p {
        Some(p) => x + y.powf(p),
        None => x.max(y),
    };
    let Some((&first, rest)) = a.split_first() else {
        return b.iter().zip(used.iter()).filter(|(_, &u)| !u).fold(0.0, |acc, (q, _)| combine(acc, diag(*q)));
    };
    let mut best = combine(brute(rest, b, used, p), diag(first));
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            let c = (first.0 - b[j].0).abs().max((first.1 - b[j].1).abs());
            best = best.min(combine(brute(rest, b, used, p), c));
            used[j] = false;
        }
    }
    best
}

fn brute_distance(x: &PersistenceDiagram, y: &PersistenceDiagram, order: WassersteinOrder) -> f64 {
    let (a, b) = (pts(x), pts(y));
    match order {
        WassersteinOrder::Finite(p) => brute(&a, &b, &mut vec![false; b.len()], Some(p)).powf(1.0 / p),
        WassersteinOrder::Infinity => brute(&a, &b, &mut vec![false; b.len()], None),
    }
}

const ORDERS: [WassersteinOrder; 3] =
    [WassersteinOrder::Finite(1.0), WassersteinOrder::Finite(2.0), WassersteinOrder::Infinity];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_enumerated_matchings(a in diagram(), b in diagram()) {
        for order in ORDERS {
            let w = wasserstein(&a, &b, order).unwrap();
            prop_assert!((w - brute_distance(&a, &b, order)).abs() < 1e-9, "{:?}", order);
        }
    }

    #[test]
    fn metric_axioms(a in diagram(), b in diagram(), c in diagram()) {
        for order in ORDERS {
            let ab = wasserstein(&a, &b, order).unwrap();
            prop_assert_eq!(ab, wasserstein(&b, &a, order).unwrap());
            prop_assert_eq!(wasserstein(&a, &a, order).unwrap(), 0.0);
            // an essential bar and a finite bar ending at the cap are the same point
            if pts(&a) != pts(&b) {
                prop_assert!(ab > 0.0);
            }
            let ac = wasserstein(&a, &c, order).unwrap();
            let cb = wasserstein(&c, &b, order).unwrap();
            prop_assert!(ab <= ac + cb + 1e-9);
        }
    }

    #[test]
    fn matching_covers_every_point(a in diagram(), b in diagram()) {
        let m = wasserstein_matching(&a, &b, WassersteinOrder::Finite(1.0)).unwrap();
        let mut seen_a = vec![0; a.len()];
        let mut seen_b = vec![0; b.len()];
        for (x, y) in &m.pairs {
            if let Partner::Point(i) = x { seen_a[*i] += 1; }
            if let Partner::Point(j) = y { seen_b[*j] += 1; }
        }
        prop_assert!(seen_a.iter().chain(&seen_b).all(|&c| c == 1));
    }

    #[test]
    fn moving_one_point_moves_bottleneck_by_at_most_that(a in diagram(), c in diagram(), which in any::<prop::sample::Index>()) {
        prop_assume!(!a.is_empty());
        let mut bars = a.bars().to_vec();
        let i = which.index(bars.len());
        // shift one finite point up by one step in death
        if bars[i].essential || bars[i].death >= K { return Ok(()); }
        bars[i].death += 1;
        let moved = PersistenceDiagram::new(1, K, bars);
        let before = wasserstein(&a, &c, WassersteinOrder::Infinity).unwrap();
        let after = wasserstein(&moved, &c, WassersteinOrder::Infinity).unwrap();
        prop_assert!((before - after).abs() <= 1.0);
    }

    #[test]
    fn slicewise_distance_dominates_each_slice(s in proptest::collection::vec((diagram(), diagram()), 1..4)) {
        let (a, b): (Vec<_>, Vec<_>) = s.into_iter().unzip();
        let total = slicewise_matching_distance(&a, &b, WassersteinOrder::Finite(1.0)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(wasserstein(x, y, WassersteinOrder::Finite(1.0)).unwrap() <= total + 1e-12);
        }
    }
}

fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> MpFingerprint2D {
    MpFingerprint2D {
        compound_id: "x".into(),
        rows,
        cols,
        data,
        row_thresholds: ThresholdSet::new((0..rows).map(|i| i as f64).collect()).unwrap(),
        spec: FingerprintSpec {
            filter: "atomic_mass".into(),
            second_filter: None,
            vectorization: Vectorization::BettiCurve,
            dim: 0,
            variant: Variant::VrSlice,
            k_cap: (cols - 1) as u32,
        },
    }
}

#[test]
fn fingerprint_distance_sums_row_norms() {
    let a = matrix(2, 3, vec![1.0, 2.0, 3.0, 0.0, 0.0, 0.0]);
    let b = matrix(2, 3, vec![1.0, 0.0, 4.0, 3.0, 4.0, 0.0]);
    assert_eq!(fingerprint_distance(&a, &b, RowMetric::L1).unwrap(), 3.0 + 7.0);
    assert_eq!(fingerprint_distance(&a, &b, RowMetric::L2).unwrap(), 5f64.sqrt() + 5.0);
    assert_eq!(fingerprint_distance(&a, &b, RowMetric::SupNorm).unwrap(), 2.0 + 4.0);
    assert_eq!(fingerprint_distance(&a, &a, RowMetric::L2).unwrap(), 0.0);
    let single = matrix(1, 3, vec![1.0, 2.0, 3.0]);
    let other = matrix(1, 3, vec![0.0, 2.0, 5.0]);
    assert_eq!(fingerprint_distance(&single, &other, RowMetric::L1).unwrap(), RowMetric::L1.distance(&single.data, &other.data));
    assert!(fingerprint_distance(&a, &single, RowMetric::L1).is_err());
    let mut respec = b.clone();
    respec.spec.dim = 1;
    assert!(fingerprint_distance(&a, &respec, RowMetric::L1).is_err());
}

#[test]
fn stability_check_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = random_molecule(&mut rng, "m", 12);
    let config = StabilityConfig {
        filter: FilterFunction::AtomicMass,
        thresholds: ThresholdSet::new(vec![12.5, 15.0, 40.0]).unwrap(),
        row: RowSpec { vectorization: Vectorization::Landscape { level: 1 }, dim: 0 },
        k_cap: 6,
        row_metric: RowMetric::SupNorm,
    };
    let same = stability_check(&g, &g, &config, 1.0, WassersteinOrder::Infinity).unwrap();
    assert_eq!((same.left, same.right, same.pass), (0.0, 0.0, true));

    let mut atoms = g.atoms().to_vec();
    for a in &mut atoms {
        a.atomic_mass = 13.0;
    }
    let h = g.with_atoms(atoms).unwrap();
    let moved = stability_check(&g, &h, &config, 1.0, WassersteinOrder::Infinity).unwrap();
    assert!(moved.left > 0.0 && moved.pass);
    let tiny = stability_check(&g, &h, &config, 1e-9, WassersteinOrder::Infinity).unwrap();
    assert!(!tiny.pass);
}
