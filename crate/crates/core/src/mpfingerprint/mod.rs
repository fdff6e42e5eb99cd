//! Slice-wise multiparameter fingerprints.
//!
//! A vertex function cuts the molecule into nested vertex sets `V_1 ⊆ … ⊆ V_m`.
//! Each set gets its own one-parameter filtration (by default the power
//! filtration with hop distances of the whole molecule), whose diagram is
//! vectorized into one row. Stacking the rows gives an `m × r` matrix.

mod container;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{
    doubly_sublevel, lower_star_filtration, sublevel_hierarchy, vr_slice, weight_filtration, Direction, FilteredComplex,
    Subgraph, ThresholdSet,
};
use crate::molgraph::{hop_distances, vertex_filter_values, FilterFunction, Label, MolecularGraph};
use crate::persistence::{diagram_in_dim, PersistenceDiagram};
use crate::vectorize::Vectorization;

pub use container::{decode_2d, decode_multimodal, encode_2d, encode_multimodal, multimodal_csv, to_csv_2d};

/// Which construction produced the rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Power-filtration slices of sublevel sets.
    VrSlice,
    /// Sublevel filtration by a second vertex function on each sublevel set.
    SublevelBoth,
    /// Edge-weight steps first, then a vertex-function filtration on each step.
    WeightFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintSpec {
    pub filter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_filter: Option<String>,
    pub vectorization: Vectorization,
    pub dim: u8,
    pub variant: Variant,
    /// Grid cap of the row diagrams.
    pub k_cap: u32,
}

/// Diagram vectorization settings shared by all rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpec {
    pub vectorization: Vectorization,
    pub dim: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpFingerprint2D {
    pub compound_id: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub row_thresholds: ThresholdSet,
    pub spec: FingerprintSpec,
}

impl MpFingerprint2D {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpFingerprint3D {
    pub compound_id: String,
    pub shape: (usize, usize, usize),
    pub data: Vec<f64>,
    pub f_thresholds: ThresholdSet,
    pub g_thresholds: ThresholdSet,
    pub spec: FingerprintSpec,
}

impl MpFingerprint3D {
    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let (_, n, r) = self.shape;
        let start = (i * n + j) * r;
        &self.data[start..start + r]
    }

    /// View as an `m × (n·r)` matrix, floor by floor.
    pub fn flatten_rows(&self) -> MpFingerprint2D {
        let (m, n, r) = self.shape;
        MpFingerprint2D {
            compound_id: self.compound_id.clone(),
            rows: m,
            cols: n * r,
            data: self.data.clone(),
            row_thresholds: self.f_thresholds.clone(),
            spec: self.spec.clone(),
        }
    }
}

fn check_dim(dim: u8) -> Result<()> {
    if dim > 1 {
        return Err(Error::InvalidArgument(format!("homology dimension {dim} is not supported (0 or 1)")));
    }
    Ok(())
}

fn vectorize_rows(diagrams: &[PersistenceDiagram], row: &RowSpec, k_cap: u32) -> Vec<f64> {
    let mut data = Vec::with_capacity(diagrams.len() * row.vectorization.output_len(k_cap));
    for pd in diagrams {
        data.extend(row.vectorization.apply(pd).values);
    }
    data
}

/// Diagrams of the power-filtration slices, one per sublevel set.
pub fn vr_slice_diagrams(
    g: &MolecularGraph,
    filter: &FilterFunction,
    thresholds: &ThresholdSet,
    dim: u8,
    k_cap: u32,
) -> Result<Vec<PersistenceDiagram>> {
    check_dim(dim)?;
    let values = vertex_filter_values(g, filter)?;
    let dist = hop_distances(g);
    sublevel_hierarchy(&values, thresholds, Direction::Sublevel)
        .levels
        .iter()
        .map(|level| diagram_in_dim(&vr_slice(&level.vertices, &dist, k_cap), dim))
        .collect()
}

pub fn mp_fingerprint_2d(
    g: &MolecularGraph,
    filter: &FilterFunction,
    thresholds: &ThresholdSet,
    row: &RowSpec,
    k_cap: u32,
) -> Result<MpFingerprint2D> {
    row.vectorization.validate()?;
    let diagrams = vr_slice_diagrams(g, filter, thresholds, row.dim, k_cap)?;
    Ok(MpFingerprint2D {
        compound_id: g.id().to_string(),
        rows: thresholds.len(),
        cols: row.vectorization.output_len(k_cap),
        data: vectorize_rows(&diagrams, row, k_cap),
        row_thresholds: thresholds.clone(),
        spec: FingerprintSpec {
            filter: filter.name(),
            second_filter: None,
            vectorization: row.vectorization,
            dim: row.dim,
            variant: Variant::VrSlice,
            k_cap,
        },
    })
}

/// Power-filtration slices over the `m × n` grid of doubly sublevel sets.
pub fn mp_fingerprint_3d(
    g: &MolecularGraph,
    f: &FilterFunction,
    g2: &FilterFunction,
    f_thresholds: &ThresholdSet,
    g_thresholds: &ThresholdSet,
    row: &RowSpec,
    k_cap: u32,
) -> Result<MpFingerprint3D> {
    row.vectorization.validate()?;
    check_dim(row.dim)?;
    let fv = vertex_filter_values(g, f)?;
    let gv = vertex_filter_values(g, g2)?;
    let dist = hop_distances(g);
    let r = row.vectorization.output_len(k_cap);
    let (m, n) = (f_thresholds.len(), g_thresholds.len());
    let mut data = Vec::with_capacity(m * n * r);
    for &alpha in f_thresholds.values() {
        for &beta in g_thresholds.values() {
            let vset = doubly_sublevel(&fv, &gv, alpha, beta);
            let pd = diagram_in_dim(&vr_slice(&vset, &dist, k_cap), row.dim)?;
            data.extend(row.vectorization.apply(&pd).values);
        }
    }
    Ok(MpFingerprint3D {
        compound_id: g.id().to_string(),
        shape: (m, n, r),
        data,
        f_thresholds: f_thresholds.clone(),
        g_thresholds: g_thresholds.clone(),
        spec: FingerprintSpec {
            filter: f.name(),
            second_filter: Some(g2.name()),
            vectorization: row.vectorization,
            dim: row.dim,
            variant: Variant::VrSlice,
            k_cap,
        },
    })
}

/// Sublevel step of each vertex under `thresholds` (`None` above the last one).
fn vertex_levels(values: &[f64], thresholds: &ThresholdSet) -> Vec<Option<u32>> {
    values.iter().map(|&x| thresholds.level_of(x).map(|j| j as u32)).collect()
}

/// Row filtrations of the sublevel-in-both-directions construction: for each
/// `alpha_i`, the lower-star filtration by the `beta` steps of `g2` on the
/// subgraph induced by `f <= alpha_i`. The grid cap is `n - 1`.
pub fn sublevel_both_filtrations(
    g: &MolecularGraph,
    f: &FilterFunction,
    g2: &FilterFunction,
    f_thresholds: &ThresholdSet,
    g_thresholds: &ThresholdSet,
) -> Result<Vec<FilteredComplex>> {
    let fv = vertex_filter_values(g, f)?;
    let levels = vertex_levels(&vertex_filter_values(g, g2)?, g_thresholds);
    let k_cap = (g_thresholds.len() - 1) as u32;
    Ok(sublevel_hierarchy(&fv, f_thresholds, Direction::Sublevel)
        .levels
        .iter()
        .map(|level| lower_star_filtration(&Subgraph::induced(g, &level.vertices), &levels, k_cap))
        .collect())
}

pub fn mp_sublevel_both(
    g: &MolecularGraph,
    f: &FilterFunction,
    g2: &FilterFunction,
    f_thresholds: &ThresholdSet,
    g_thresholds: &ThresholdSet,
    row: &RowSpec,
) -> Result<MpFingerprint2D> {
    row.vectorization.validate()?;
    check_dim(row.dim)?;
    let k_cap = (g_thresholds.len() - 1) as u32;
    let diagrams = sublevel_both_filtrations(g, f, g2, f_thresholds, g_thresholds)?
        .iter()
        .map(|fc| diagram_in_dim(fc, row.dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(MpFingerprint2D {
        compound_id: g.id().to_string(),
        rows: f_thresholds.len(),
        cols: row.vectorization.output_len(k_cap),
        data: vectorize_rows(&diagrams, row, k_cap),
        row_thresholds: f_thresholds.clone(),
        spec: FingerprintSpec {
            filter: f.name(),
            second_filter: Some(g2.name()),
            vectorization: row.vectorization,
            dim: row.dim,
            variant: Variant::SublevelBoth,
            k_cap,
        },
    })
}

/// Edge-weight steps `G_1 ⊆ … ⊆ G_m`, then the lower-star filtration of `g2`
/// on each step. `edge_values` are in bond order.
pub fn mp_weight_first(
    g: &MolecularGraph,
    edge_values: &[f64],
    w_thresholds: &ThresholdSet,
    g2: &FilterFunction,
    g2_thresholds: &ThresholdSet,
    row: &RowSpec,
) -> Result<MpFingerprint2D> {
    row.vectorization.validate()?;
    check_dim(row.dim)?;
    let levels = vertex_levels(&vertex_filter_values(g, g2)?, g2_thresholds);
    let k_cap = (g2_thresholds.len() - 1) as u32;
    let diagrams = weight_filtration(g, edge_values, w_thresholds)?
        .iter()
        .map(|step| diagram_in_dim(&lower_star_filtration(step, &levels, k_cap), row.dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(MpFingerprint2D {
        compound_id: g.id().to_string(),
        rows: w_thresholds.len(),
        cols: row.vectorization.output_len(k_cap),
        data: vectorize_rows(&diagrams, row, k_cap),
        row_thresholds: w_thresholds.clone(),
        spec: FingerprintSpec {
            filter: "edge_weight".into(),
            second_filter: Some(g2.name()),
            vectorization: row.vectorization,
            dim: row.dim,
            variant: Variant::WeightFirst,
            k_cap,
        },
    })
}

/// Integer `m × n` matrix of Betti numbers over the sublevel-both grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiGrid {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<usize>,
}

impl BettiGrid {
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.data[i * self.cols + j]
    }
}

/// Bigraded Betti numbers: the Betti number of the clique complex of every
/// doubly induced subgraph. Each row is read off one lower-star diagram.
pub fn bigraded_betti(
    g: &MolecularGraph,
    f: &FilterFunction,
    g2: &FilterFunction,
    f_thresholds: &ThresholdSet,
    g_thresholds: &ThresholdSet,
    dim: u8,
) -> Result<BettiGrid> {
    check_dim(dim)?;
    let n = g_thresholds.len();
    let mut data = Vec::with_capacity(f_thresholds.len() * n);
    for fc in sublevel_both_filtrations(g, f, g2, f_thresholds, g_thresholds)? {
        let pd = diagram_in_dim(&fc, dim)?;
        data.extend((0..n as u32).map(|t| pd.rank_at(t)));
    }
    Ok(BettiGrid { rows: f_thresholds.len(), cols: n, data })
}

/// Property a channel of the multimodal stack was filtered by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    AtomicMass,
    PartialCharge,
    BondType,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::AtomicMass, Modality::PartialCharge, Modality::BondType];

    pub fn name(self) -> &'static str {
        match self {
            Modality::AtomicMass => "mass",
            Modality::PartialCharge => "charge",
            Modality::BondType => "bond",
        }
    }
}

impl std::str::FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mass" => Ok(Modality::AtomicMass),
            "charge" => Ok(Modality::PartialCharge),
            "bond" => Ok(Modality::BondType),
            other => Err(Error::InvalidArgument(format!("unknown modality `{other}` (mass, charge, bond)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInfo {
    pub modality: Modality,
    pub spec: FingerprintSpec,
    /// Shape before resampling.
    pub source_rows: usize,
    pub source_cols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiModalFingerprint {
    pub compound_id: String,
    pub label: Label,
    pub rows: usize,
    pub cols: usize,
    pub channels: Vec<ChannelInfo>,
    /// Channel-major, then row-major.
    pub data: Vec<f64>,
}

impl MultiModalFingerprint {
    pub fn channel(&self, c: usize) -> &[f64] {
        let size = self.rows * self.cols;
        &self.data[c * size..(c + 1) * size]
    }
}

/// Nearest-neighbour resampling of a row-major matrix.
pub fn resample_nearest(data: &[f64], rows: usize, cols: usize, new_rows: usize, new_cols: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(new_rows * new_cols);
    for r in 0..new_rows {
        let sr = (r * rows / new_rows).min(rows - 1);
        for c in 0..new_cols {
            let sc = (c * cols / new_cols).min(cols - 1);
            out.push(data[sr * cols + sc]);
        }
    }
    out
}

/// Stacks per-modality fingerprints of one compound, resampled to `shape`.
/// Channels are ordered by modality (mass, charge, bond) and then homology dimension.
pub fn multimodal_stack(
    label: Label,
    fingerprints: Vec<(Modality, MpFingerprint2D)>,
    shape: (usize, usize),
) -> Result<MultiModalFingerprint> {
    let Some(first) = fingerprints.first() else {
        return Err(Error::InvalidArgument("no fingerprints to stack".into()));
    };
    if shape.0 == 0 || shape.1 == 0 {
        return Err(Error::InvalidArgument("stack shape must be non-empty".into()));
    }
    let compound_id = first.1.compound_id.clone();
    let mut seen = BTreeSet::new();
    for (modality, fp) in &fingerprints {
        if fp.compound_id != compound_id {
            return Err(Error::InvalidArgument(format!(
                "cannot stack fingerprints of different compounds (`{compound_id}` and `{}`)",
                fp.compound_id
            )));
        }
        if !seen.insert((*modality, fp.spec.dim)) {
            return Err(Error::InvalidArgument(format!(
                "duplicate modality {} in dimension {}",
                modality.name(),
                fp.spec.dim
            )));
        }
        if fp.rows == 0 || fp.cols == 0 {
            return Err(Error::ShapeMismatch(format!("{} fingerprint is empty", modality.name())));
        }
    }
    let mut sorted = fingerprints;
    sorted.sort_by_key(|(m, fp)| (*m, fp.spec.dim));
    let (rows, cols) = shape;
    let mut data = Vec::with_capacity(sorted.len() * rows * cols);
    let mut channels = Vec::with_capacity(sorted.len());
    for (modality, fp) in sorted {
        data.extend(resample_nearest(&fp.data, fp.rows, fp.cols, rows, cols));
        channels.push(ChannelInfo { modality, spec: fp.spec, source_rows: fp.rows, source_cols: fp.cols });
    }
    Ok(MultiModalFingerprint { compound_id, label, rows, cols, channels, data })
}
