use std::collections::BTreeSet;

use mpfp::filtration::ThresholdSet;
use mpfp::molgraph::Label;
use mpfp::mpfingerprint::{multimodal_stack, FingerprintSpec, Modality, MpFingerprint2D, Variant};
use mpfp::screening::{
    auc, cross_validate, embed, enrichment_factor, mine_triplets, rank_by_templates, train_linear_metric,
    triplet_loss_and_grad, triplet_margin_loss, CvConfig, Embedding, Projection, ScoreMode, TrainConfig,
    TripletCategory,
};
use mpfp::vectorize::Vectorization;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn emb(id: String, label: Label, values: Vec<f64>) -> Embedding {
    Embedding { id, label, values }
}

fn label_of(code: u8) -> Label {
    match code {
        0 => Label::Active("A".into()),
        1 => Label::Active("B".into()),
        2 => Label::Template("A".into()),
        3 => Label::Decoy,
        _ => Label::Unlabeled,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn mining_matches_brute_force(
        pts in proptest::collection::vec((proptest::collection::vec(-3.0f64..3.0, 2), 0u8..5), 0..=20),
        margin in 0.1f64..2.0,
    ) {
        let library: Vec<Embedding> =
            pts.iter().enumerate().map(|(i, (v, c))| emb(format!("c{i}"), label_of(*c), v.clone())).collect();
        let got = mine_triplets(&library, margin);

        let mut expected = Vec::new();
        for (a, ea) in library.iter().enumerate() {
            let Some(class) = ea.label.target() else { continue };
            for (p, ep) in library.iter().enumerate() {
                if p == a || ep.label.target() != Some(class) {
                    continue;
                }
                for (q, eq) in library.iter().enumerate() {
                    let negative = eq.label == Label::Decoy || eq.label.target().is_some_and(|t| t != class);
                    if !negative {
                        continue;
                    }
                    let (dp, dn) = (dist(&ea.values, &ep.values), dist(&ea.values, &eq.values));
                    let hard = dn < dp;
                    let semi = dp < dn && dn < dp + margin;
                    prop_assert!(!(hard && semi));
                    if hard {
                        expected.push((a, p, q, TripletCategory::Hard));
                    } else if semi {
                        expected.push((a, p, q, TripletCategory::SemiHard));
                    }
                }
            }
        }
        let got: Vec<_> = got.iter().map(|t| (t.anchor, t.positive, t.negative, t.category)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn ef_is_bounded(actives in proptest::collection::vec(any::<bool>(), 1..300), alpha in 1.0f64..100.0) {
        if let Ok(ef) = enrichment_factor(&actives, alpha) {
            prop_assert!(ef >= 0.0 && ef <= 100.0 / alpha + 1e-12);
        }
    }

    #[test]
    fn metrics_ignore_monotone_score_transforms(
        scored in proptest::collection::vec((0u32..50, any::<bool>()), 2..80),
    ) {
        let scores: Vec<f64> = scored.iter().map(|s| f64::from(s.0)).collect();
        let actives: Vec<bool> = scored.iter().map(|s| s.1).collect();
        let warped: Vec<f64> = scores.iter().map(|s| (s / 7.0).exp() * 3.0 - 2.0).collect();
        let (a, b) = (auc(&scores, &actives), auc(&warped, &actives));
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // the ranked order only depends on score order
        let order = |s: &[f64]| {
            let mut idx: Vec<usize> = (0..s.len()).collect();
            idx.sort_by(|&i, &j| s[i].total_cmp(&s[j]).then(i.cmp(&j)));
            idx.iter().map(|&i| actives[i]).collect::<Vec<bool>>()
        };
        for alpha in [5.0, 10.0, 50.0] {
            prop_assert_eq!(
                enrichment_factor(&order(&scores), alpha).ok(),
                enrichment_factor(&order(&warped), alpha).ok()
            );
        }
    }

    #[test]
    fn loss_is_nonnegative(
        v in proptest::collection::vec(-5.0f64..5.0, 9),
        margin in 0.0f64..3.0,
        p in 1.0f64..4.0,
    ) {
        let (a, pos, neg) = (&v[0..3], &v[3..6], &v[6..9]);
        let l = triplet_margin_loss(a, pos, neg, margin, p);
        prop_assert!(l >= 0.0);
        if p == 2.0 && dist(a, neg) >= dist(a, pos) + margin {
            prop_assert_eq!(l, 0.0);
        }
        prop_assert_eq!(triplet_margin_loss(a, a, neg, margin, p), (margin - lp(a, neg, p)).max(0.0));
    }

    #[test]
    fn ranking_survives_positive_scaling(
        pts in proptest::collection::vec(proptest::collection::vec(-4.0f64..4.0, 3), 3..25),
        c in 0.01f64..100.0,
    ) {
        let make = |scale: f64| -> Vec<Embedding> {
            pts.iter().enumerate().map(|(i, v)| emb(format!("c{i:02}"), Label::Unlabeled, v.iter().map(|x| x * scale).collect())).collect()
        };
        let (plain, scaled) = (make(1.0), make(c));
        let order = |lib: &[Embedding]| -> Vec<String> {
            rank_by_templates(&lib[..2], &lib[2..], ScoreMode::Min).unwrap().entries.into_iter().map(|e| e.id).collect()
        };
        let (x, y) = (order(&plain), order(&scaled));
        // exact distance ties may flip under rounding; compare as sets of equal-score runs otherwise
        if x != y {
            let s = rank_by_templates(&plain[..2], &plain[2..], ScoreMode::Min).unwrap();
            let mut scores: Vec<f64> = s.scores();
            scores.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
            prop_assert!(scores.len() < s.entries.len(), "{x:?} vs {y:?}");
        }
    }
}

fn lp(a: &[f64], b: &[f64], p: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (rows, cols, margin) = (3, 4, 1.0);
    let mut checked = 0;
    while checked < 100 {
        let w = Projection { rows, cols, data: (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let vecs: Vec<Vec<f64>> = (0..6).map(|_| (0..cols).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let triplets = vec![(&vecs[0][..], &vecs[1][..], &vecs[2][..]), (&vecs[3][..], &vecs[4][..], &vecs[5][..])];
        // stay away from the hinge and from zero norms
        let safe = triplets.iter().all(|(a, p, n)| {
            let du: Vec<f64> = a.iter().zip(*p).map(|(x, y)| x - y).collect();
            let dv: Vec<f64> = a.iter().zip(*n).map(|(x, y)| x - y).collect();
            let (nu, nv) = (norm(&w.apply(&du)), norm(&w.apply(&dv)));
            nu > 1e-2 && nv > 1e-2 && (margin + nu - nv).abs() > 1e-2
        });
        if !safe {
            continue;
        }
        let (_, grad) = triplet_loss_and_grad(&w, &triplets, margin, 2.0);
        let h = 1e-6;
        let numeric: Vec<f64> = (0..w.data.len())
            .map(|k| {
                let (mut up, mut down) = (w.clone(), w.clone());
                up.data[k] += h;
                down.data[k] -= h;
                let f = |m: &Projection| triplet_loss_and_grad(m, &triplets, margin, 2.0).0;
                (f(&up) - f(&down)) / (2.0 * h)
            })
            .collect();
        let diff: Vec<f64> = grad.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        let scale = norm(&numeric).max(1e-8);
        assert!(norm(&diff) / scale < 1e-5, "relative error {}", norm(&diff) / scale);
        checked += 1;
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn training_separates_a_separable_toy() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // classes split along x, swamped by noise along y
    let library: Vec<Embedding> = (0..30)
        .map(|i| {
            let class = if i % 2 == 0 { "A" } else { "B" };
            let x = if class == "A" { rng.gen_range(0.0..0.4) } else { rng.gen_range(0.6..1.0) };
            emb(format!("c{i:02}"), Label::Active(class.into()), vec![x, rng.gen_range(-3.0..3.0)])
        })
        .collect();
    let config = TrainConfig { epochs: 200, seed: 1, ..TrainConfig::default() };
    let out = train_linear_metric(&library, &config).unwrap();
    assert!(out.initial_triplets > 0);
    assert!(out.final_loss < 0.1 * out.initial_loss, "{} vs {}", out.final_loss, out.initial_loss);
    assert_eq!(train_linear_metric(&library, &config).unwrap(), out);

    let idle = train_linear_metric(&library, &TrainConfig { epochs: 0, ..config }).unwrap();
    assert_eq!(idle.projection, Projection::identity(2, 2));
}

fn matrix(id: &str, rows: usize, cols: usize, dim: usize) -> MpFingerprint2D {
    MpFingerprint2D {
        compound_id: id.into(),
        rows,
        cols,
        data: (0..rows * cols).map(|v| (v + 10 * dim) as f64).collect(),
        row_thresholds: ThresholdSet::new((0..rows).map(|i| i as f64).collect()).unwrap(),
        spec: FingerprintSpec {
            filter: "atomic_mass".into(),
            second_filter: None,
            vectorization: Vectorization::BettiCurve,
            dim: dim as u8,
            variant: Variant::VrSlice,
            k_cap: (cols - 1) as u32,
        },
    }
}

#[test]
fn embedding_layout() {
    let one = multimodal_stack(Label::Decoy, vec![(Modality::AtomicMass, matrix("x", 2, 3, 0))], (2, 3)).unwrap();
    let e = embed(&one);
    assert_eq!(e.values, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(e.label, Label::Decoy);

    let three = multimodal_stack(
        Label::Unlabeled,
        vec![
            (Modality::PartialCharge, matrix("x", 2, 3, 0)),
            (Modality::AtomicMass, matrix("x", 2, 3, 1)),
            (Modality::AtomicMass, matrix("x", 2, 3, 0)),
        ],
        (2, 3),
    )
    .unwrap();
    let e = embed(&three);
    assert_eq!(e.values.len(), 18);
    // mass dim 0, mass dim 1, charge dim 0
    assert_eq!(&e.values[..6], &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    assert_eq!(e.values[6], 10.0);
    assert_eq!(e.values[12], 0.0);
}

fn clustered_library(rng: &mut ChaCha8Rng) -> Vec<Embedding> {
    let mut lib = Vec::new();
    for t in ["A", "B"] {
        let centre = if t == "A" { 0.0 } else { 40.0 };
        for i in 0..3 {
            lib.push(emb(format!("{t}_t{i}"), Label::Template(t.into()), vec![centre + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]));
        }
        for i in 0..10 {
            lib.push(emb(format!("{t}_a{i:02}"), Label::Active(t.into()), vec![centre + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]));
        }
    }
    for i in 0..60 {
        lib.push(emb(format!("d{i:02}"), Label::Decoy, vec![20.0 + rng.gen_range(-2.0..2.0), 30.0 + rng.gen_range(-2.0..2.0)]));
    }
    lib
}

#[test]
fn cross_validation_is_deterministic_and_separates_clusters() {
    let lib = clustered_library(&mut ChaCha8Rng::seed_from_u64(3));
    let config = CvConfig { seed: 9, ..CvConfig::default() };
    let report = cross_validate(&lib, &config).unwrap();
    assert_eq!(report, cross_validate(&lib, &config).unwrap());
    assert_eq!(report.results.len(), 2 * 5);
    assert!(report.results.iter().all(|r| r.auc == 1.0 && r.actives == 2 && r.pool_size == 62));
    assert_eq!(report.auc.mean, 1.0);

    let trained = CvConfig { train: Some(TrainConfig { epochs: 5, ..TrainConfig::default() }), ..config };
    assert_eq!(cross_validate(&lib, &trained).unwrap(), cross_validate(&lib, &trained).unwrap());
}

#[test]
fn shuffled_labels_give_chance_auc() {
    let mut means = Vec::new();
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<Label> = (0..3)
            .map(|_| Label::Template("A".into()))
            .chain((0..15).map(|_| Label::Active("A".into())))
            .chain((0..80).map(|_| Label::Decoy))
            .collect();
        labels.shuffle(&mut rng);
        let lib: Vec<Embedding> = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| emb(format!("c{i:03}"), l, (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect();
        means.push(cross_validate(&lib, &CvConfig { seed, ..CvConfig::default() }).unwrap().auc.mean);
    }
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    assert!((0.4..=0.6).contains(&mean), "mean AUC {mean}");
}

#[test]
fn random_rankings_average_unit_enrichment() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut ranking: Vec<bool> = (0..500).map(|i| i < 50).collect();
    let trials = 1000;
    let mut total = 0.0;
    for _ in 0..trials {
        ranking.shuffle(&mut rng);
        total += enrichment_factor(&ranking, 10.0).unwrap();
    }
    let mean = total / trials as f64;
    assert!((mean - 1.0).abs() <= 0.2, "mean EF {mean}");
}

#[test]
fn perfect_rankings_hit_the_ceiling() {
    let ranking: Vec<bool> = (0..200).map(|i| i < 30).collect();
    for alpha in [1.0, 2.0, 5.0, 10.0] {
        assert_eq!(enrichment_factor(&ranking, alpha).unwrap(), 100.0 / alpha);
    }
    let scores: Vec<f64> = (0..200).map(f64::from).collect();
    assert_eq!(auc(&scores, &ranking).unwrap(), 1.0);
    let hits: BTreeSet<usize> = (0..4).collect();
    let ranking: Vec<bool> = (0..200).map(|i| hits.contains(&i)).collect();
    assert_eq!(enrichment_factor(&ranking, 5.0).unwrap(), 8.0);
}
