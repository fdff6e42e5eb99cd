//! Single-parameter vectorizations of a persistence diagram.
//!
//! Curves live on the integer grid `0..=K` (`K + 1` entries). Landscapes and
//! silhouettes use the half-step grid `0, 0.5, …, K` (`2K + 1` entries).
//! Essential bars are evaluated with death `K`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::persistence::{Bar, PersistenceDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageWeight {
    /// `(d - b) / K`
    NormalizedLifespan,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Vectorization {
    BettiCurve,
    Landscape { level: usize },
    Silhouette { power: f64 },
    EntropyCurve,
    PersistenceImage { rows: usize, cols: usize, sigma: f64, weight: ImageWeight },
}

impl Vectorization {
    pub const DEFAULT_IMAGE: Vectorization =
        Vectorization::PersistenceImage { rows: 8, cols: 8, sigma: 0.5, weight: ImageWeight::NormalizedLifespan };

    pub fn validate(&self) -> Result<()> {
        match *self {
            Vectorization::Landscape { level: 0 } => Err(Error::InvalidArgument("landscape level starts at 1".into())),
            Vectorization::Silhouette { power } if !(power >= 0.0 && power.is_finite()) => {
                Err(Error::InvalidArgument(format!("silhouette power {power} must be >= 0")))
            }
            Vectorization::PersistenceImage { rows, cols, sigma, .. } if rows == 0 || cols == 0 || !(sigma > 0.0) => {
                Err(Error::InvalidArgument("persistence image needs rows, cols >= 1 and sigma > 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Output length for a given cap.
    pub fn output_len(&self, k_cap: u32) -> usize {
        let k = k_cap as usize;
        match self {
            Vectorization::BettiCurve | Vectorization::EntropyCurve => k + 1,
            Vectorization::Landscape { .. } | Vectorization::Silhouette { .. } => 2 * (k + 1) - 1,
            Vectorization::PersistenceImage { rows, cols, .. } => rows * cols,
        }
    }

    pub fn apply(&self, pd: &PersistenceDiagram) -> SpVector {
        let values = match *self {
            Vectorization::BettiCurve => betti_curve(pd),
            Vectorization::Landscape { level } => landscape(pd, level),
            Vectorization::Silhouette { power } => silhouette(pd, power),
            Vectorization::EntropyCurve => entropy_curve(pd),
            Vectorization::PersistenceImage { rows, cols, sigma, weight } => {
                persistence_image(pd, rows, cols, sigma, weight)
            }
        };
        SpVector { values, kind: *self }
    }
}

impl fmt::Display for Vectorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vectorization::BettiCurve => f.write_str("betti"),
            Vectorization::Landscape { level } => write!(f, "landscape:{level}"),
            Vectorization::Silhouette { power } => write!(f, "silhouette:{power}"),
            Vectorization::EntropyCurve => f.write_str("entropy"),
            Vectorization::PersistenceImage { rows, cols, sigma, .. } => write!(f, "image:{rows}x{cols}:{sigma}"),
        }
    }
}

impl FromStr for Vectorization {
    type Err = Error;

    /// `betti`, `landscape[:level]`, `silhouette[:power]`, `entropy`,
    /// `image[:ROWSxCOLS[:sigma]]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognized vectorization `{s}`"));
        let mut parts = s.split(':');
        let v = match parts.next().unwrap_or_default() {
            "betti" => Vectorization::BettiCurve,
            "entropy" => Vectorization::EntropyCurve,
            "landscape" => Vectorization::Landscape {
                level: parts.next().map(|p| p.parse().map_err(|_| bad())).transpose()?.unwrap_or(1),
            },
            "silhouette" => Vectorization::Silhouette {
                power: parts.next().map(|p| p.parse().map_err(|_| bad())).transpose()?.unwrap_or(1.0),
            },
            "image" => {
                let Vectorization::PersistenceImage { mut rows, mut cols, mut sigma, weight } = Self::DEFAULT_IMAGE
                else {
                    unreachable!()
                };
                if let Some(res) = parts.next() {
                    let (r, c) = res.split_once('x').ok_or_else(bad)?;
                    rows = r.parse().map_err(|_| bad())?;
                    cols = c.parse().map_err(|_| bad())?;
                }
                if let Some(sg) = parts.next() {
                    sigma = sg.parse().map_err(|_| bad())?;
                }
                Vectorization::PersistenceImage { rows, cols, sigma, weight }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        v.validate()?;
        Ok(v)
    }
}

/// Vectorized diagram with the settings that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpVector {
    pub values: Vec<f64>,
    pub kind: Vectorization,
}

fn death(bar: &Bar) -> f64 {
    f64::from(bar.death)
}

pub fn betti_curve(pd: &PersistenceDiagram) -> Vec<f64> {
    (0..=pd.k_cap).map(|t| pd.rank_at(t) as f64).collect()
}

fn half_grid(k_cap: u32) -> impl Iterator<Item = f64> {
    (0..=2 * k_cap).map(|s| f64::from(s) / 2.0)
}

fn tent(bar: &Bar, t: f64) -> f64 {
    let b = f64::from(bar.birth);
    (t - b).min(death(bar) - t).max(0.0)
}

/// `level`-th largest tent value at each half-step grid point.
pub fn landscape(pd: &PersistenceDiagram, level: usize) -> Vec<f64> {
    let mut tents = Vec::with_capacity(pd.len());
    half_grid(pd.k_cap)
        .map(|t| {
            if level == 0 || level > pd.len() {
                return 0.0;
            }
            tents.clear();
            tents.extend(pd.bars().iter().map(|b| tent(b, t)));
            tents.sort_unstable_by(|a, b| b.total_cmp(a));
            tents[level - 1]
        })
        .collect()
}

/// Tents averaged with weights `(d - b)^power`.
pub fn silhouette(pd: &PersistenceDiagram, power: f64) -> Vec<f64> {
    let weights: Vec<f64> = pd.bars().iter().map(|b| f64::from(b.lifespan()).powf(power)).collect();
    let total: f64 = weights.iter().sum();
    half_grid(pd.k_cap)
        .map(|t| {
            if total <= 0.0 {
                return 0.0;
            }
            pd.bars().iter().zip(&weights).map(|(b, w)| w * tent(b, t)).sum::<f64>() / total
        })
        .collect()
}

/// Life entropy of the bars alive at each integer threshold:
/// `-sum w_i ln w_i` with `w_i = (d_i - b_i) / L` and `L` the total lifespan.
pub fn entropy_curve(pd: &PersistenceDiagram) -> Vec<f64> {
    let total: f64 = pd.bars().iter().map(|b| f64::from(b.lifespan())).sum();
    (0..=pd.k_cap)
        .map(|t| {
            if total <= 0.0 {
                return 0.0;
            }
            let h: f64 = pd
                .bars()
                .iter()
                .filter(|b| b.alive_at(t))
                .map(|b| f64::from(b.lifespan()) / total)
                .filter(|&w| w > 0.0)
                .map(|w| -w * w.ln())
                .sum();
            h + 0.0
        })
        .collect()
}

/// Persistence image on `[0, K]²` (on `[0, 1]²` when `K = 0`).
pub fn persistence_image(pd: &PersistenceDiagram, rows: usize, cols: usize, sigma: f64, weight: ImageWeight) -> Vec<f64> {
    let hi = f64::from(pd.k_cap.max(1));
    persistence_image_on(pd, rows, cols, sigma, weight, (0.0, hi))
}

fn gaussian_mass(lo: f64, hi: f64, center: f64, sigma: f64) -> f64 {
    let s = sigma * std::f64::consts::SQRT_2;
    0.5 * (erf((hi - center) / s) - erf((lo - center) / s))
}

/// Persistence image over an explicit square domain `extent × extent`.
///
/// Each bar contributes a Gaussian centred at `(birth, death)`; a pixel holds
/// its exact integral (product of two one-dimensional Gaussian masses).
/// Layout is row-major: row `r` spans the death axis, column `c` the birth axis.
pub fn persistence_image_on(
    pd: &PersistenceDiagram,
    rows: usize,
    cols: usize,
    sigma: f64,
    weight: ImageWeight,
    extent: (f64, f64),
) -> Vec<f64> {
    let (lo, hi) = extent;
    let (dx, dy) = ((hi - lo) / cols as f64, (hi - lo) / rows as f64);
    let k = f64::from(pd.k_cap.max(1));
    let mut image = vec![0.0; rows * cols];
    for bar in pd.bars() {
        let w = match weight {
            ImageWeight::NormalizedLifespan => f64::from(bar.lifespan()) / k,
            ImageWeight::Constant => 1.0,
        };
        if w == 0.0 {
            continue;
        }
        let (b, d) = (f64::from(bar.birth), death(bar));
        let xs: Vec<f64> = (0..cols)
            .map(|c| gaussian_mass(lo + c as f64 * dx, lo + (c + 1) as f64 * dx, b, sigma))
            .collect();
        for r in 0..rows {
            let my = gaussian_mass(lo + r as f64 * dy, lo + (r + 1) as f64 * dy, d, sigma);
            for (c, mx) in xs.iter().enumerate() {
                image[r * cols + c] += w * mx * my;
            }
        }
    }
    image
}
