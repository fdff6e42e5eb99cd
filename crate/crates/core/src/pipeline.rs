//! Library-level extraction settings.
//!
//! Thresholds and the grid cap are fitted once on a whole library so every
//! compound gets fingerprints of the same shape.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{compute_thresholds, ThresholdSet, ThresholdStrategy};
use crate::molgraph::{bond_type_values, hop_distances, vertex_filter_values, FilterFunction, MolecularGraph};
use crate::mpfingerprint::{
    mp_fingerprint_2d, mp_weight_first, multimodal_stack, Modality, MpFingerprint2D, MultiModalFingerprint, RowSpec,
};
use crate::vectorize::Vectorization;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub modalities: Vec<Modality>,
    pub vectorization: Vectorization,
    pub dims: Vec<u8>,
    pub thresholds: ThresholdStrategy,
    /// Fitted from the library's largest hop distance when `None`.
    pub k_cap: Option<u32>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            modalities: Modality::ALL.to_vec(),
            vectorization: Vectorization::BettiCurve,
            dims: vec![0, 1],
            thresholds: ThresholdStrategy::Quantile(8),
            k_cap: None,
        }
    }
}

/// Everything needed to turn one molecule into a stacked fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryPlan {
    pub config: PipelineConfig,
    pub k_cap: u32,
    pub mass_thresholds: ThresholdSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_thresholds: Option<ThresholdSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bond_thresholds: Option<ThresholdSet>,
    /// Common `(rows, cols)` of every stacked channel.
    pub shape: (usize, usize),
}

impl LibraryPlan {
    /// Fits thresholds on the pooled values of `graphs`. Compounds that lack
    /// an attribute are skipped when pooling.
    pub fn fit(graphs: &[&MolecularGraph], config: PipelineConfig) -> Result<Self> {
        if config.modalities.is_empty() {
            return Err(Error::InvalidArgument("no modalities selected".into()));
        }
        if config.dims.is_empty() || config.dims.iter().any(|&d| d > 1) {
            return Err(Error::InvalidArgument("homology dimensions must be a non-empty subset of {0, 1}".into()));
        }
        config.vectorization.validate()?;
        let k_cap = match config.k_cap {
            Some(0) => return Err(Error::InvalidArgument("K cap must be at least 1".into())),
            Some(k) => k,
            None => graphs.iter().map(|g| hop_distances(g).max_finite()).max().unwrap_or(0).max(1),
        };
        let pooled = |f: &FilterFunction| -> Vec<f64> {
            graphs.iter().filter_map(|g| vertex_filter_values(g, f).ok()).flatten().collect()
        };
        let fit = |values: Vec<f64>, what: &str, strategy: ThresholdStrategy| {
            if values.is_empty() {
                return Err(Error::InvalidArgument(format!("no {what} values in the library")));
            }
            compute_thresholds(&values, strategy)
        };
        let uses = |m: Modality| config.modalities.contains(&m);
        // bond channels filter their weight steps by mass, so mass thresholds are always fitted
        let mass_thresholds = fit(pooled(&FilterFunction::AtomicMass), "atomic mass", config.thresholds)?;
        let charge_thresholds = uses(Modality::PartialCharge)
            .then(|| fit(pooled(&FilterFunction::PartialCharge), "partial charge", config.thresholds))
            .transpose()?;
        let bond_thresholds = uses(Modality::BondType)
            .then(|| {
                let codes: Vec<f64> = graphs.iter().flat_map(|g| bond_type_values(g)).collect();
                if codes.is_empty() {
                    // bondless library: a single step holding every vertex
                    return ThresholdSet::new(vec![1.0]);
                }
                compute_thresholds(&codes, ThresholdStrategy::UniqueValues)
            })
            .transpose()?;

        let v = config.vectorization;
        let mut rows = 0;
        let mut cols = 0;
        for &m in &config.modalities {
            let (r, c) = match m {
                Modality::AtomicMass => (mass_thresholds.len(), v.output_len(k_cap)),
                Modality::PartialCharge => {
                    (charge_thresholds.as_ref().unwrap().len(), v.output_len(k_cap))
                }
                Modality::BondType => {
                    (bond_thresholds.as_ref().unwrap().len(), v.output_len(mass_thresholds.len() as u32 - 1))
                }
            };
            rows = rows.max(r);
            cols = cols.max(c);
        }
        let mut modalities = config.modalities.clone();
        modalities.sort();
        modalities.dedup();
        let mut dims = config.dims.clone();
        dims.sort();
        dims.dedup();
        Ok(LibraryPlan {
            config: PipelineConfig { modalities, dims, ..config },
            k_cap,
            mass_thresholds,
            charge_thresholds,
            bond_thresholds,
            shape: (rows, cols),
        })
    }

    /// Number of channels in every stack.
    pub fn channels(&self) -> usize {
        self.config.modalities.len() * self.config.dims.len()
    }

    /// One fingerprint per modality and dimension.
    pub fn fingerprints(&self, g: &MolecularGraph) -> Result<Vec<(Modality, MpFingerprint2D)>> {
        let mut out = Vec::new();
        for &m in &self.config.modalities {
            for &dim in &self.config.dims {
                let row = RowSpec { vectorization: self.config.vectorization, dim };
                let fp = match m {
                    Modality::AtomicMass => {
                        mp_fingerprint_2d(g, &FilterFunction::AtomicMass, &self.mass_thresholds, &row, self.k_cap)?
                    }
                    Modality::PartialCharge => mp_fingerprint_2d(
                        g,
                        &FilterFunction::PartialCharge,
                        self.charge_thresholds.as_ref().expect("fitted with the modality"),
                        &row,
                        self.k_cap,
                    )?,
                    Modality::BondType => mp_weight_first(
                        g,
                        &bond_type_values(g),
                        self.bond_thresholds.as_ref().expect("fitted with the modality"),
                        &FilterFunction::AtomicMass,
                        &self.mass_thresholds,
                        &row,
                    )?,
                };
                out.push((m, fp));
            }
        }
        Ok(out)
    }

    pub fn extract(&self, g: &MolecularGraph) -> Result<MultiModalFingerprint> {
        multimodal_stack(g.label().clone(), self.fingerprints(g)?, self.shape)
    }
}
