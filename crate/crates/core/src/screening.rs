//! Ligand-based screening on top of fingerprints.
//!
//! Compounds are ranked by their smallest Euclidean distance to a target's
//! templates and scored with enrichment factors and ROC AUC. A linear map
//! trained with the triplet margin loss can be applied to the embeddings
//! before ranking.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::Label;
use crate::mpfingerprint::MultiModalFingerprint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub id: String,
    pub label: Label,
    pub values: Vec<f64>,
}

/// Flattens a stack channel by channel, rows in order.
pub fn embed(fp: &MultiModalFingerprint) -> Embedding {
    Embedding { id: fp.compound_id.clone(), label: fp.label.clone(), values: fp.data.clone() }
}

/// Per-coordinate standardization with library statistics. Coordinates with
/// zero variance map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(library: &[Embedding]) -> Result<Self> {
        let dim = check_dims(library)?;
        let n = library.len() as f64;
        let mut mean = vec![0.0; dim];
        for e in library {
            for (m, v) in mean.iter_mut().zip(&e.values) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for e in library {
            for ((s, v), m) in var.iter_mut().zip(&e.values).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        Ok(Standardizer { mean, std })
    }

    pub fn apply(&self, e: &Embedding) -> Embedding {
        let values = e
            .values
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect();
        Embedding { id: e.id.clone(), label: e.label.clone(), values }
    }
}

fn check_dims(library: &[Embedding]) -> Result<usize> {
    let Some(first) = library.first() else {
        return Err(Error::InvalidArgument("empty embedding library".into()));
    };
    let dim = first.values.len();
    for e in library {
        if e.values.len() != dim {
            return Err(Error::ShapeMismatch(format!("embedding `{}` has length {}, expected {dim}", e.id, e.values.len())));
        }
        if e.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("embedding `{}` has non-finite entries", e.id)));
        }
    }
    Ok(dim)
}

/// Embeds a library, optionally standardized with its own statistics.
pub fn embed_library(fps: &[MultiModalFingerprint], normalize: bool) -> Result<Vec<Embedding>> {
    let raw: Vec<Embedding> = fps.iter().map(embed).collect();
    check_dims(&raw)?;
    if !normalize {
        return Ok(raw);
    }
    let z = Standardizer::fit(&raw)?;
    Ok(raw.iter().map(|e| z.apply(e)).collect())
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return v.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

fn lp_dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    lp_norm(&d, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScoreMode {
    /// Distance to the nearest template.
    #[default]
    Min,
    /// Mean distance over all templates.
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCompound {
    pub id: String,
    pub score: f64,
    pub label: Label,
}

/// Pool ordered by ascending score, ties broken by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub target: Option<String>,
    pub entries: Vec<RankedCompound>,
}

impl RankingResult {
    /// Active flags in rank order for `target`.
    pub fn activity(&self, target: &str) -> Vec<bool> {
        self.entries.iter().map(|e| matches!(&e.label, Label::Active(t) if t == target)).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.score).collect()
    }

    /// `id<TAB>score<TAB>label` lines with a header.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("id\tscore\tlabel\n");
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\n", e.id, e.score, e.label));
        }
        out
    }
}

pub fn rank_by_templates(templates: &[Embedding], pool: &[Embedding], mode: ScoreMode) -> Result<RankingResult> {
    if templates.is_empty() {
        return Err(Error::InvalidArgument("ranking needs at least one template".into()));
    }
    if pool.is_empty() {
        return Err(Error::InvalidArgument("ranking pool is empty".into()));
    }
    let dim = templates[0].values.len();
    if let Some(bad) = templates.iter().chain(pool).find(|e| e.values.len() != dim) {
        return Err(Error::ShapeMismatch(format!("embedding `{}` has length {}, expected {dim}", bad.id, bad.values.len())));
    }
    let mut entries: Vec<RankedCompound> = pool
        .iter()
        .map(|e| {
            let dists = templates.iter().map(|t| euclidean(&t.values, &e.values));
            let score = match mode {
                ScoreMode::Min => dists.fold(f64::INFINITY, f64::min),
                ScoreMode::Mean => dists.sum::<f64>() / templates.len() as f64,
            };
            RankedCompound { id: e.id.clone(), score, label: e.label.clone() }
        })
        .collect();
    entries.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| a.id.cmp(&b.id)));
    Ok(RankingResult { target: None, entries })
}

/// Targets named by any active or template label, sorted.
pub fn known_targets(library: &[Embedding]) -> Vec<String> {
    library
        .iter()
        .filter_map(|e| e.label.target().map(str::to_string))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Ranks the actives of `target`, decoys and unlabeled compounds against the
/// target's templates.
pub fn rank_target(library: &[Embedding], target: &str, mode: ScoreMode) -> Result<RankingResult> {
    let known = known_targets(library);
    if !known.iter().any(|t| t == target) {
        return Err(Error::InvalidArgument(format!("unknown target `{target}`; known targets: {}", known.join(", "))));
    }
    let templates: Vec<Embedding> =
        library.iter().filter(|e| matches!(&e.label, Label::Template(t) if t == target)).cloned().collect();
    if templates.is_empty() {
        return Err(Error::InvalidArgument(format!("target `{target}` has no templates")));
    }
    let pool: Vec<Embedding> = library
        .iter()
        .filter(|e| match &e.label {
            Label::Active(t) => t == target,
            Label::Decoy | Label::Unlabeled => true,
            Label::Template(_) => false,
        })
        .cloned()
        .collect();
    let mut ranking = rank_by_templates(&templates, &pool, mode)?;
    ranking.target = Some(target.to_string());
    Ok(ranking)
}

/// `EF_α = (A / N_α) / (α / 100)` with `N_α = ⌊N·α/100⌋`, `A` the actives among the top `N_α`.
pub fn enrichment_factor(actives_in_rank_order: &[bool], alpha_percent: f64) -> Result<f64> {
    if !(alpha_percent > 0.0 && alpha_percent <= 100.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha_percent}% must be in (0, 100]")));
    }
    let n = actives_in_rank_order.len();
    if !actives_in_rank_order.iter().any(|&a| a) {
        return Err(Error::Undefined("undefined EF: no actives in pool".into()));
    }
    let n_alpha = (n as f64 * alpha_percent / 100.0).floor() as usize;
    if n_alpha == 0 {
        return Err(Error::Undefined(format!("undefined EF: top {alpha_percent}% of {n} compounds is empty")));
    }
    let hits = actives_in_rank_order[..n_alpha].iter().filter(|&&a| a).count();
    Ok(hits as f64 * 100.0 / (n_alpha as f64 * alpha_percent))
}

/// Rank-sum AUC: probability that a random active scores lower (better)
/// than a random inactive, ties counting one half.
pub fn auc(scores: &[f64], actives: &[bool]) -> Result<f64> {
    if scores.len() != actives.len() {
        return Err(Error::ShapeMismatch(format!("{} scores for {} labels", scores.len(), actives.len())));
    }
    let n_pos = actives.iter().filter(|&&a| a).count();
    let n_neg = actives.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Undefined("undefined AUC: the pool needs both actives and inactives".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    // ascending ranks by descending score, so better (lower) scores rank higher
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += avg_rank * order[i..=j].iter().filter(|&&k| actives[k]).count() as f64;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// AUC of a ranking for `target`.
pub fn ranking_auc(ranking: &RankingResult, target: &str) -> Result<f64> {
    auc(&ranking.scores(), &ranking.activity(target))
}

/// `max(0, margin + ‖a − pos‖_p − ‖a − neg‖_p)`.
pub fn triplet_margin_loss(a: &[f64], pos: &[f64], neg: &[f64], margin: f64, norm_p: f64) -> f64 {
    (margin + lp_dist(a, pos, norm_p) - lp_dist(a, neg, norm_p)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TripletCategory {
    /// Negative closer than the positive.
    Hard,
    /// Negative farther than the positive but inside the margin.
    SemiHard,
}

/// Indices into the embedding list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub negative: usize,
    pub category: TripletCategory,
}

/// Class used for mining: the target of actives and templates. Decoys are
/// negatives for every class; unlabeled compounds are ignored.
fn mining_class(label: &Label) -> Option<Option<&str>> {
    match label {
        Label::Active(t) | Label::Template(t) => Some(Some(t)),
        Label::Decoy => Some(None),
        Label::Unlabeled => None,
    }
}

/// Classifies a triplet from its anchor distances.
pub fn categorize(d_pos: f64, d_neg: f64, margin: f64) -> Option<TripletCategory> {
    if d_neg < d_pos {
        Some(TripletCategory::Hard)
    } else if d_pos < d_neg && d_neg < d_pos + margin {
        Some(TripletCategory::SemiHard)
    } else {
        None
    }
}

fn distance_matrix(points: &[Vec<f64>], norm_p: f64) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = lp_dist(&points[i], &points[j], norm_p);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

fn mine_with(points: &[Vec<f64>], labels: &[Label], margin: f64, norm_p: f64) -> Vec<Triplet> {
    let n = points.len();
    let dist = distance_matrix(points, norm_p);
    let classes: Vec<_> = labels.iter().map(mining_class).collect();
    let mut out = Vec::new();
    for a in 0..n {
        let Some(Some(class)) = classes[a] else { continue };
        for p in 0..n {
            if p == a || classes[p] != Some(Some(class)) {
                continue;
            }
            let d_pos = dist[a * n + p];
            for (q, cq) in classes.iter().enumerate() {
                let is_negative = matches!(cq, Some(c) if *c != Some(class));
                if !is_negative {
                    continue;
                }
                if let Some(category) = categorize(d_pos, dist[a * n + q], margin) {
                    out.push(Triplet { anchor: a, positive: p, negative: q, category });
                }
            }
        }
    }
    out
}

/// All Hard and SemiHard triplets under Euclidean distance, ordered by
/// anchor, positive, negative.
pub fn mine_triplets(embeddings: &[Embedding], margin: f64) -> Vec<Triplet> {
    let points: Vec<Vec<f64>> = embeddings.iter().map(|e| e.values.clone()).collect();
    let labels: Vec<Label> = embeddings.iter().map(|e| e.label.clone()).collect();
    mine_with(&points, &labels, margin, 2.0)
}

/// Row-major `output_dim × input_dim` linear map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Projection {
    /// Ones on the leading diagonal, zeros elsewhere.
    pub fn identity(rows: usize, cols: usize) -> Self {
        let mut data = vec![0.0; rows * cols];
        for i in 0..rows.min(cols) {
            data[i * cols + i] = 1.0;
        }
        Projection { rows, cols, data }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.data.chunks_exact(self.cols).map(|row| row.iter().zip(x).map(|(w, v)| w * v).sum()).collect()
    }

    pub fn project(&self, e: &Embedding) -> Embedding {
        Embedding { id: e.id.clone(), label: e.label.clone(), values: self.apply(&e.values) }
    }
}

/// Gradient of `‖v‖_p` with respect to `v`; zero at `v = 0`.
fn norm_grad(v: &[f64], p: f64) -> Vec<f64> {
    let norm = lp_norm(v, p);
    if norm == 0.0 {
        return vec![0.0; v.len()];
    }
    if p == 2.0 {
        return v.iter().map(|x| x / norm).collect();
    }
    let scale = norm.powf(p - 1.0);
    v.iter().map(|x| x.signum() * x.abs().powf(p - 1.0) / scale).collect()
}

/// Mean triplet loss of `w` over `(a, pos, neg)` input vectors and its
/// gradient with respect to `w`. The hinge has subgradient zero at its kink.
pub fn triplet_loss_and_grad(
    w: &Projection,
    triplets: &[(&[f64], &[f64], &[f64])],
    margin: f64,
    norm_p: f64,
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; w.data.len()];
    if triplets.is_empty() {
        return (0.0, grad);
    }
    let mut loss = 0.0;
    for &(a, p, n) in triplets {
        let u: Vec<f64> = a.iter().zip(p).map(|(x, y)| x - y).collect();
        let v: Vec<f64> = a.iter().zip(n).map(|(x, y)| x - y).collect();
        let (wu, wv) = (w.apply(&u), w.apply(&v));
        let value = margin + lp_norm(&wu, norm_p) - lp_norm(&wv, norm_p);
        if value <= 0.0 {
            continue;
        }
        loss += value;
        let (gu, gv) = (norm_grad(&wu, norm_p), norm_grad(&wv, norm_p));
        for r in 0..w.rows {
            let row = &mut grad[r * w.cols..(r + 1) * w.cols];
            for c in 0..w.cols {
                row[c] += gu[r] * u[c] - gv[r] * v[c];
            }
        }
    }
    let k = triplets.len() as f64;
    grad.iter_mut().for_each(|g| *g /= k);
    (loss / k, grad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub margin: f64,
    pub norm_p: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Defaults to the input dimension when `None`.
    pub output_dim: Option<usize>,
    pub seed: u64,
    pub batch_size: usize,
    /// Triplets sampled per epoch after re-mining.
    pub max_triplets_per_epoch: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            margin: 1.0,
            norm_p: 2.0,
            learning_rate: 0.05,
            epochs: 50,
            output_dim: None,
            seed: 0,
            batch_size: 32,
            max_triplets_per_epoch: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub projection: Projection,
    /// Mean loss of the initial triplets under the starting map.
    pub initial_loss: f64,
    /// Mean loss of the same triplets under the returned map.
    pub final_loss: f64,
    pub initial_triplets: usize,
}

fn as_refs<'a>(points: &'a [Vec<f64>], triplets: &[Triplet]) -> Vec<(&'a [f64], &'a [f64], &'a [f64])> {
    triplets
        .iter()
        .map(|t| (points[t.anchor].as_slice(), points[t.positive].as_slice(), points[t.negative].as_slice()))
        .collect()
}

/// Fits `W` by minibatch gradient descent on the triplet loss, re-mining
/// triplets in the projected space every epoch. Returns the map with the
/// lowest loss on the initially mined triplets.
pub fn train_linear_metric(embeddings: &[Embedding], config: &TrainConfig) -> Result<TrainOutcome> {
    let input_dim = check_dims(embeddings)?;
    if !(config.margin >= 0.0) || !(config.norm_p >= 1.0) || config.batch_size == 0 {
        return Err(Error::InvalidArgument("training needs margin >= 0, norm p >= 1 and a positive batch size".into()));
    }
    let points: Vec<Vec<f64>> = embeddings.iter().map(|e| e.values.clone()).collect();
    let labels: Vec<Label> = embeddings.iter().map(|e| e.label.clone()).collect();
    let output_dim = config.output_dim.unwrap_or(input_dim);
    let mut w = Projection::identity(output_dim, input_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut reference = mine_with(&points.iter().map(|x| w.apply(x)).collect::<Vec<_>>(), &labels, config.margin, config.norm_p);
    if reference.is_empty() {
        return Err(Error::NothingToTrain);
    }
    if reference.len() > config.max_triplets_per_epoch {
        reference.shuffle(&mut rng);
        reference.truncate(config.max_triplets_per_epoch);
        reference.sort_unstable();
    }
    let reference_refs = as_refs(&points, &reference);
    let evaluate = |w: &Projection| triplet_loss_and_grad(w, &reference_refs, config.margin, config.norm_p).0;
    let initial_loss = evaluate(&w);
    let mut best = (initial_loss, w.clone());

    for _ in 0..config.epochs {
        let projected: Vec<Vec<f64>> = points.iter().map(|x| w.apply(x)).collect();
        let mut mined = mine_with(&projected, &labels, config.margin, config.norm_p);
        if mined.is_empty() {
            break;
        }
        mined.shuffle(&mut rng);
        mined.truncate(config.max_triplets_per_epoch);
        for batch in mined.chunks(config.batch_size) {
            let (_, grad) = triplet_loss_and_grad(&w, &as_refs(&points, batch), config.margin, config.norm_p);
            for (wi, gi) in w.data.iter_mut().zip(&grad) {
                *wi -= config.learning_rate * gi;
            }
        }
        let loss = evaluate(&w);
        if loss < best.0 {
            best = (loss, w.clone());
        }
    }
    Ok(TrainOutcome { projection: best.1, initial_loss, final_loss: best.0, initial_triplets: reference.len() })
}

pub const EF_ALPHAS: [f64; 4] = [1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub score_mode: ScoreMode,
    /// Standardize with library statistics before ranking.
    pub normalize: bool,
    pub train: Option<TrainConfig>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 5, seed: 0, score_mode: ScoreMode::Min, normalize: true, train: None }
    }
}

/// Metrics of one target in one fold. EF entries are `None` when undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub target: String,
    pub fold: usize,
    pub pool_size: usize,
    pub actives: usize,
    pub ef: BTreeMap<String, Option<f64>>,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation over folds.
    pub std: f64,
}

impl MeanStd {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(MeanStd { mean, std })
    }
}

/// Cross-validation results. Summaries average over targets within a fold,
/// then report mean and sample standard deviation across folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: usize,
    pub seed: u64,
    pub targets: Vec<String>,
    pub results: Vec<FoldResult>,
    pub ef: BTreeMap<String, Option<MeanStd>>,
    pub auc: MeanStd,
}

fn alpha_key(alpha: f64) -> String {
    format!("{alpha}")
}

/// Stratified k-fold evaluation. Each target's actives are split into folds;
/// the test pool of a fold is its held-out actives plus every decoy, ranked
/// against the target's templates and its training actives.
pub fn cross_validate(library: &[Embedding], config: &CvConfig) -> Result<EvalReport> {
    check_dims(library)?;
    if config.folds < 2 {
        return Err(Error::InvalidArgument("cross-validation needs at least 2 folds".into()));
    }
    let targets = known_targets(library);
    if targets.is_empty() {
        return Err(Error::InvalidArgument("library has no labeled targets".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut fold_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut folds = config.folds;
    let mut per_target: Vec<Vec<usize>> = Vec::new();
    for t in &targets {
        let actives: Vec<usize> =
            (0..library.len()).filter(|&i| matches!(&library[i].label, Label::Active(x) if x == t)).collect();
        if actives.len() < 2 {
            return Err(Error::InvalidArgument(format!("target `{t}` needs at least 2 actives for cross-validation")));
        }
        if actives.len() < folds {
            warn!("target `{t}` has {} actives; reducing to {} folds", actives.len(), actives.len());
            folds = actives.len();
        }
        per_target.push(actives);
    }
    for actives in &mut per_target {
        actives.shuffle(&mut rng);
        for (k, &i) in actives.iter().enumerate() {
            fold_of.insert(i, k % folds);
        }
    }
    let decoys: Vec<usize> = (0..library.len()).filter(|&i| library[i].label == Label::Decoy).collect();
    if decoys.is_empty() {
        return Err(Error::InvalidArgument("library has no decoys".into()));
    }

    // label-free statistics, so fitting on the whole library leaks nothing
    let base: Vec<Embedding> = if config.normalize {
        let z = Standardizer::fit(library)?;
        library.iter().map(|e| z.apply(e)).collect()
    } else {
        library.to_vec()
    };
    let mut results = Vec::new();
    for fold in 0..folds {
        let in_training = |i: usize| match &library[i].label {
            Label::Template(_) => true,
            Label::Active(_) => fold_of[&i] != fold,
            _ => false,
        };
        let training: Vec<usize> = (0..library.len()).filter(|&i| in_training(i)).collect();
        let mut view = base.clone();
        if let Some(train) = &config.train {
            let train_set: Vec<Embedding> = training.iter().map(|&i| view[i].clone()).collect();
            match train_linear_metric(&train_set, train) {
                Ok(outcome) => view = view.iter().map(|e| outcome.projection.project(e)).collect(),
                Err(Error::NothingToTrain) => warn!("fold {fold}: no triplets to train on; using the identity map"),
                Err(e) => return Err(e),
            }
        }
        for t in &targets {
            let templates: Vec<Embedding> = training
                .iter()
                .filter(|&&i| library[i].label.target() == Some(t.as_str()))
                .map(|&i| view[i].clone())
                .collect();
            let mut pool: Vec<Embedding> = decoys.iter().map(|&i| view[i].clone()).collect();
            pool.extend(
                (0..library.len())
                    .filter(|&i| matches!(&library[i].label, Label::Active(x) if x == t) && fold_of[&i] == fold)
                    .map(|i| view[i].clone()),
            );
            let ranking = rank_by_templates(&templates, &pool, config.score_mode)?;
            let activity = ranking.activity(t);
            let ef = EF_ALPHAS
                .iter()
                .map(|&a| (alpha_key(a), enrichment_factor(&activity, a).ok()))
                .collect();
            results.push(FoldResult {
                target: t.clone(),
                fold,
                pool_size: pool.len(),
                actives: activity.iter().filter(|&&a| a).count(),
                ef,
                auc: auc(&ranking.scores(), &activity)?,
            });
        }
    }

    let fold_means = |f: &dyn Fn(&FoldResult) -> Option<f64>| -> Vec<f64> {
        (0..folds)
            .filter_map(|k| {
                let vals: Vec<f64> = results.iter().filter(|r| r.fold == k).filter_map(f).collect();
                (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
            })
            .collect()
    };
    let ef = EF_ALPHAS
        .iter()
        .map(|&a| {
            let key = alpha_key(a);
            (key.clone(), MeanStd::of(&fold_means(&|r: &FoldResult| r.ef[&key])))
        })
        .collect();
    let auc = MeanStd::of(&fold_means(&|r: &FoldResult| Some(r.auc))).expect("every fold has an AUC");
    Ok(EvalReport { folds, seed: config.seed, targets, results, ef, auc })
}
