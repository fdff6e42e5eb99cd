use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::Hasher;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use mpfp::filtration::ThresholdSet;
use mpfp::metric::{stability_check, RowMetric, StabilityConfig};
use mpfp::molgraph::{FilterFunction, Label, MolecularGraph};
use mpfp::mpfingerprint::{decode_multimodal, encode_multimodal, multimodal_csv, MultiModalFingerprint, RowSpec};
use mpfp::pipeline::{LibraryPlan, PipelineConfig};
use mpfp::screening::{
    cross_validate, embed_library, enrichment_factor, ranking_auc, rank_target, CvConfig, EvalReport, ScoreMode,
    TrainConfig, EF_ALPHAS,
};
use mpfp::synthetic::{perturb_masses, random_library};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{input, BenchArgs, EvaluateArgs, ExtractArgs, PipelineArgs, RankArgs, ScoreArg, StabilityArgs};

const MANIFEST: &str = "manifest.json";
const FINGERPRINT_DIR: &str = "fingerprints";

impl PipelineArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            modalities: self.modalities.clone(),
            vectorization: self.vectorization,
            dims: self.dims.clone(),
            thresholds: self.thresholds,
            k_cap: self.kcap,
        }
    }
}

impl From<ScoreArg> for ScoreMode {
    fn from(s: ScoreArg) -> Self {
        match s {
            ScoreArg::Min => ScoreMode::Min,
            ScoreArg::Mean => ScoreMode::Mean,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    inputs: Vec<String>,
    plan: LibraryPlan,
    compounds: Vec<CompoundEntry>,
    failures: Vec<FailureEntry>,
}

#[derive(Serialize, Deserialize)]
struct CompoundEntry {
    index: usize,
    id: String,
    label: Label,
    source: String,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct FailureEntry {
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    error: String,
}

fn worker_pool(workers: u32) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers as usize).build()?)
}

/// Extracts in parallel; results come back in input order.
fn extract_all(plan: &LibraryPlan, graphs: &[&MolecularGraph], workers: u32) -> Result<Vec<mpfp::Result<MultiModalFingerprint>>> {
    let pool = worker_pool(workers)?;
    Ok(pool.install(|| graphs.par_iter().map(|g| plan.extract(g)).collect()))
}

pub fn extract(args: &ExtractArgs) -> Result<ExitCode> {
    let records = input::load(&args.library.input, args.library.format)?;
    let mut failures = Vec::new();
    let mut parsed = Vec::new();
    for r in records {
        match r.graph {
            Ok(g) => parsed.push((r.source, g)),
            Err(e) => {
                warn!("{}: {e}", r.source);
                failures.push(FailureEntry { source: r.source, id: None, error: e.to_string() });
            }
        }
    }
    if parsed.is_empty() {
        bail!("no compound could be parsed");
    }
    let graphs: Vec<&MolecularGraph> = parsed.iter().map(|(_, g)| g).collect();
    let plan = LibraryPlan::fit(&graphs, args.pipeline.config())?;
    info!(
        "K cap {}, {} channels of {}x{}, {} workers",
        plan.k_cap,
        plan.channels(),
        plan.shape.0,
        plan.shape.1,
        args.workers.workers
    );

    let start = Instant::now();
    let results = extract_all(&plan, &graphs, args.workers.workers)?;
    info!("extracted {} compounds in {:.2?}", graphs.len(), start.elapsed());

    let fp_dir = args.out.join(FINGERPRINT_DIR);
    fs::create_dir_all(&fp_dir).with_context(|| format!("creating {}", fp_dir.display()))?;
    for entry in fs::read_dir(&fp_dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "mpfp") {
            fs::remove_file(&path)?;
        }
    }
    let mut compounds = Vec::new();
    let mut fingerprints = Vec::new();
    for ((source, g), result) in parsed.iter().zip(results) {
        match result {
            Ok(fp) => {
                let file = format!("{FINGERPRINT_DIR}/{:06}.mpfp", compounds.len());
                fs::write(args.out.join(&file), encode_multimodal(&fp))?;
                compounds.push(CompoundEntry {
                    index: compounds.len(),
                    id: g.id().to_string(),
                    label: g.label().clone(),
                    source: source.clone(),
                    file,
                });
                fingerprints.push(fp);
            }
            Err(e) => {
                warn!("{source} ({}): {e}", g.id());
                failures.push(FailureEntry { source: source.clone(), id: Some(g.id().to_string()), error: e.to_string() });
            }
        }
    }
    let manifest = Manifest {
        format_version: 1,
        inputs: args.library.input.iter().map(|p| p.display().to_string()).collect(),
        plan,
        compounds,
        failures,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(args.out.join(MANIFEST), json)?;
    fs::write(args.out.join("fingerprints.csv"), multimodal_csv(&fingerprints))?;
    info!("{} fingerprints, {} failures", manifest.compounds.len(), manifest.failures.len());
    if args.strict && !manifest.failures.is_empty() {
        eprintln!("error: {} compound(s) failed", manifest.failures.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_fingerprints(dir: &Path) -> Result<Vec<MultiModalFingerprint>> {
    let path = dir.join(MANIFEST);
    let manifest: Manifest = serde_json::from_slice(&fs::read(&path).with_context(|| format!("reading {}", path.display()))?)
        .with_context(|| format!("parsing {}", path.display()))?;
    manifest
        .compounds
        .iter()
        .map(|c| {
            let bytes = fs::read(dir.join(&c.file)).with_context(|| format!("reading {}", c.file))?;
            decode_multimodal(&bytes).with_context(|| format!("decoding {}", c.file))
        })
        .collect()
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

pub fn rank(args: &RankArgs) -> Result<ExitCode> {
    let fps = load_fingerprints(&args.fingerprints)?;
    if fps.is_empty() {
        bail!("no fingerprints in {}", args.fingerprints.display());
    }
    let embeddings = embed_library(&fps, !args.raw)?;
    let ranking = rank_target(&embeddings, &args.target, args.score.into())?;
    write_or_print(args.out.as_deref(), &ranking.to_tsv())?;

    let activity = ranking.activity(&args.target);
    let mut summary = format!(
        "target {}: pool {}, actives {}\n",
        args.target,
        activity.len(),
        activity.iter().filter(|&&a| a).count()
    );
    for alpha in EF_ALPHAS {
        match enrichment_factor(&activity, alpha) {
            Ok(ef) => summary.push_str(&format!("EF{alpha}%\t{ef:.4}\n")),
            Err(e) => summary.push_str(&format!("EF{alpha}%\t{e}\n")),
        }
    }
    let auc = ranking_auc(&ranking, &args.target)?;
    summary.push_str(&format!("AUC\t{auc:.4}\n"));
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

fn summarize(report: &EvalReport) -> String {
    let mut s = format!("{} folds, targets {}\n", report.folds, report.targets.join(", "));
    for alpha in EF_ALPHAS {
        match &report.ef[&format!("{alpha}")] {
            Some(m) => s.push_str(&format!("EF{alpha}%\t{:.2} ± {:.2}\n", m.mean, m.std)),
            None => s.push_str(&format!("EF{alpha}%\tundefined\n")),
        }
    }
    s.push_str(&format!("AUC\t{:.4} ± {:.4}\n", report.auc.mean, report.auc.std));
    s
}

pub fn evaluate(args: &EvaluateArgs) -> Result<ExitCode> {
    let fps = load_fingerprints(&args.fingerprints)?;
    let embeddings = embed_library(&fps, false)?;
    let config = CvConfig {
        folds: args.folds,
        seed: args.seed,
        score_mode: args.score.into(),
        normalize: !args.raw,
        train: args.train.then(|| TrainConfig {
            margin: args.margin,
            learning_rate: args.learning_rate,
            epochs: args.epochs,
            output_dim: args.output_dim,
            seed: args.seed,
            ..TrainConfig::default()
        }),
    };
    let report = cross_validate(&embeddings, &config)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_or_print(args.out.as_deref(), &json)?;
    if args.out.is_some() {
        print!("{}", summarize(&report));
    } else {
        eprint!("{}", summarize(&report));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn stability(args: &StabilityArgs) -> Result<ExitCode> {
    let graphs: Vec<MolecularGraph> = if args.input.is_empty() {
        random_library(args.seed, args.molecules.max(1), 2, 20)
    } else {
        let mut graphs = Vec::new();
        for r in input::load(&args.input, args.format)? {
            match r.graph {
                Ok(g) => graphs.push(g),
                Err(e) => warn!("{}: {e}", r.source),
            }
        }
        graphs
    };
    if graphs.is_empty() {
        bail!("no molecules to test");
    }
    if !(args.epsilon >= 0.0) {
        bail!("epsilon must be non-negative");
    }
    let refs: Vec<&MolecularGraph> = graphs.iter().collect();
    let plan = LibraryPlan::fit(
        &refs,
        PipelineConfig {
            modalities: vec![mpfp::mpfingerprint::Modality::AtomicMass],
            vectorization: args.vectorization,
            dims: args.dims.clone(),
            thresholds: args.thresholds,
            k_cap: args.kcap,
        },
    )?;
    let thresholds: ThresholdSet = plan.mass_thresholds.clone();
    let row_metric = args.row_metric.map_or_else(|| RowMetric::native_for(&args.vectorization), Into::into);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut passed = 0;
    let mut total = 0;
    println!("trial\tcompound\tdim\tleft\tright\tratio\tpass");
    for trial in 0..args.trials {
        let g = &graphs[trial % graphs.len()];
        let perturbed = perturb_masses(&mut rng, g, args.epsilon);
        for &dim in &plan.config.dims {
            let config = StabilityConfig {
                filter: FilterFunction::AtomicMass,
                thresholds: thresholds.clone(),
                row: RowSpec { vectorization: args.vectorization, dim },
                k_cap: plan.k_cap,
                row_metric,
            };
            let report = stability_check(g, &perturbed, &config, args.constant, args.p)?;
            total += 1;
            passed += usize::from(report.pass);
            println!(
                "{trial}\t{}\t{dim}\t{}\t{}\t{}\t{}",
                g.id(),
                report.left,
                report.right,
                report.ratio,
                report.pass
            );
        }
    }
    println!("# pass rate {passed}/{total} ({:.1}%)", 100.0 * passed as f64 / total.max(1) as f64);
    Ok(ExitCode::SUCCESS)
}

pub fn bench(args: &BenchArgs) -> Result<ExitCode> {
    if args.max_atoms == 0 {
        bail!("--max-atoms must be at least 1");
    }
    let graphs = random_library(args.seed, args.molecules, 1, args.max_atoms);
    let refs: Vec<&MolecularGraph> = graphs.iter().collect();
    let start = Instant::now();
    let plan = LibraryPlan::fit(&refs, args.pipeline.config())?;
    let results = extract_all(&plan, &refs, args.workers.workers)?;
    let mut hasher = DefaultHasher::new();
    let mut failures = 0;
    for r in &results {
        match r {
            Ok(fp) => hasher.write(&encode_multimodal(fp)),
            Err(_) => failures += 1,
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    println!(
        "{}",
        serde_json::json!({
            "molecules": args.molecules,
            "workers": args.workers.workers,
            "failures": failures,
            "seconds": seconds,
            "digest": format!("{:016x}", hasher.finish()),
        })
    );
    Ok(ExitCode::SUCCESS)
}
