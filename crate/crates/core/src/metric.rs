//! Diagram and fingerprint distances, and the empirical stability check.
//!
//! Diagram points are `(birth, death)` with essential bars read as `(birth, K)`.
//! The ground distance is the ∞-norm, so a point `(b, d)` lies `(d - b) / 2`
//! from the diagonal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::{bottleneck_assignment, min_cost_assignment};
use crate::error::{Error, Result};
use crate::filtration::ThresholdSet;
use crate::molgraph::{FilterFunction, MolecularGraph};
use crate::mpfingerprint::{mp_fingerprint_2d, vr_slice_diagrams, MpFingerprint2D, RowSpec};
use crate::persistence::PersistenceDiagram;
use crate::vectorize::Vectorization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WassersteinOrder {
    Finite(f64),
    Infinity,
}

impl WassersteinOrder {
    fn validate(self) -> Result<()> {
        match self {
            WassersteinOrder::Finite(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidArgument(format!("Wasserstein order {p} must be a finite real >= 1 or inf")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for WassersteinOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WassersteinOrder::Finite(p) => write!(f, "{p}"),
            WassersteinOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for WassersteinOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let order = match s.trim() {
            "inf" | "infinity" => WassersteinOrder::Infinity,
            other => WassersteinOrder::Finite(
                other.parse().map_err(|_| Error::InvalidArgument(format!("bad Wasserstein order `{other}`")))?,
            ),
        };
        order.validate()?;
        Ok(order)
    }
}

/// One side of a matched pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partner {
    Point(usize),
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramMatching {
    /// `(side a, side b)`; every off-diagonal point of both diagrams appears once.
    pub pairs: Vec<(Partner, Partner)>,
    /// `Σ cost^p` for finite `p`, the largest pair cost for `p = ∞`.
    pub cost: f64,
    pub order: WassersteinOrder,
}

impl DiagramMatching {
    pub fn distance(&self) -> f64 {
        match self.order {
            WassersteinOrder::Finite(p) => self.cost.powf(1.0 / p),
            WassersteinOrder::Infinity => self.cost,
        }
    }
}

fn points(pd: &PersistenceDiagram) -> Vec<(f64, f64)> {
    pd.bars().iter().map(|b| (f64::from(b.birth), f64::from(b.death))).collect()
}

fn sup_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Optimal matching between two diagrams of the same homology dimension.
pub fn wasserstein_matching(
    pd_a: &PersistenceDiagram,
    pd_b: &PersistenceDiagram,
    order: WassersteinOrder,
) -> Result<DiagramMatching> {
    order.validate()?;
    if pd_a.dim != pd_b.dim {
        return Err(Error::DimensionMismatch(pd_a.dim, pd_b.dim));
    }
    let (a, b) = (points(pd_a), points(pd_b));
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    // rows: a points then diagonal slots; columns: b points then diagonal slots
    let raise = |x: f64| match order {
        WassersteinOrder::Finite(p) => x.powf(p),
        WassersteinOrder::Infinity => x,
    };
    let mut cost = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            cost[r * n + c] = match (r < na, c < nb) {
                (true, true) => raise(sup_dist(a[r], b[c])),
                (true, false) => raise(to_diagonal(a[r])),
                (false, true) => raise(to_diagonal(b[c])),
                (false, false) => 0.0,
            };
        }
    }
    let (total, assignment) = match order {
        WassersteinOrder::Finite(_) => {
            let assignment = min_cost_assignment(&cost, n);
            let total = assignment.iter().enumerate().map(|(r, &c)| cost[r * n + c]).sum();
            (total, assignment)
        }
        WassersteinOrder::Infinity => bottleneck_assignment(&cost, n),
    };
    let pairs = assignment
        .iter()
        .enumerate()
        .filter_map(|(r, &c)| match (r < na, c < nb) {
            (true, true) => Some((Partner::Point(r), Partner::Point(c))),
            (true, false) => Some((Partner::Point(r), Partner::Diagonal)),
            (false, true) => Some((Partner::Diagonal, Partner::Point(c))),
            (false, false) => None,
        })
        .collect();
    Ok(DiagramMatching { pairs, cost: total, order })
}

pub fn wasserstein(pd_a: &PersistenceDiagram, pd_b: &PersistenceDiagram, order: WassersteinOrder) -> Result<f64> {
    if pd_a.dim == pd_b.dim && pd_a.bars() == pd_b.bars() {
        return Ok(0.0);
    }
    Ok(wasserstein_matching(pd_a, pd_b, order)?.distance())
}

/// Sum of slice-by-slice Wasserstein distances.
pub fn slicewise_matching_distance(
    slices_a: &[PersistenceDiagram],
    slices_b: &[PersistenceDiagram],
    order: WassersteinOrder,
) -> Result<f64> {
    if slices_a.len() != slices_b.len() {
        return Err(Error::ShapeMismatch(format!("{} slices against {}", slices_a.len(), slices_b.len())));
    }
    slices_a.iter().zip(slices_b).map(|(a, b)| wasserstein(a, b, order)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowMetric {
    L1,
    L2,
    SupNorm,
}

impl RowMetric {
    /// Norm under which the vectorization has a known stability constant.
    pub fn native_for(v: &Vectorization) -> RowMetric {
        match v {
            Vectorization::Landscape { .. } | Vectorization::Silhouette { .. } => RowMetric::SupNorm,
            Vectorization::PersistenceImage { .. } => RowMetric::L2,
            Vectorization::BettiCurve | Vectorization::EntropyCurve => RowMetric::L1,
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            RowMetric::L1 => diffs.sum(),
            RowMetric::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            RowMetric::SupNorm => diffs.fold(0.0, f64::max),
        }
    }
}

/// `Σ_i d(row_i(a), row_i(b))`.
pub fn fingerprint_distance(a: &MpFingerprint2D, b: &MpFingerprint2D, row_metric: RowMetric) -> Result<f64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::ShapeMismatch(format!("{}x{} against {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    if a.spec != b.spec {
        return Err(Error::ShapeMismatch("fingerprints were built with different specs".into()));
    }
    Ok((0..a.rows).map(|i| row_metric.distance(a.row(i), b.row(i))).sum())
}

/// Shared settings for both graphs of a stability check.
#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub filter: FilterFunction,
    pub thresholds: ThresholdSet,
    pub row: RowSpec,
    pub k_cap: u32,
    pub row_metric: RowMetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Fingerprint distance.
    pub left: f64,
    /// Slice-wise matching distance.
    pub right: f64,
    /// `left / right`, `0` when both vanish and infinite when only `right` does.
    pub ratio: f64,
    pub constant: f64,
    pub pass: bool,
}

/// Evaluates both sides of `dist(M(G+), M(G-)) <= C · Σ_i W_p(PD(V_i+), PD(V_i-))`.
pub fn stability_check(
    g_plus: &MolecularGraph,
    g_minus: &MolecularGraph,
    config: &StabilityConfig,
    constant: f64,
    order: WassersteinOrder,
) -> Result<StabilityReport> {
    if !(constant > 0.0) {
        return Err(Error::InvalidArgument(format!("stability constant {constant} must be positive")));
    }
    let fp = |g| mp_fingerprint_2d(g, &config.filter, &config.thresholds, &config.row, config.k_cap);
    let left = fingerprint_distance(&fp(g_plus)?, &fp(g_minus)?, config.row_metric)?;
    let slices = |g| vr_slice_diagrams(g, &config.filter, &config.thresholds, config.row.dim, config.k_cap);
    let right = slicewise_matching_distance(&slices(g_plus)?, &slices(g_minus)?, order)?;
    let ratio = if left == 0.0 { 0.0 } else { left / right };
    Ok(StabilityReport { left, right, ratio, constant, pass: left <= constant * right })
}
