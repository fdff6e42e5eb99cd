//! Vertex hierarchies, clique complexes, power-filtration slices and the
//! sublevel/weight bifiltrations.

use std::collections::HashSet;
use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molgraph::{DistanceMatrix, MolecularGraph};

/// Simplex of dimension at most 3 with sorted vertex ids.
///
/// The derived ordering compares dimension first, then vertices
/// lexicographically. Unused slots are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    dim: u8,
    verts: [u32; 4],
}

impl Simplex {
    pub fn vertex(v: usize) -> Self {
        Simplex { dim: 0, verts: [v as u32, 0, 0, 0] }
    }

    pub fn edge(u: usize, v: usize) -> Self {
        Self::from_vertices(&[u, v])
    }

    pub fn triangle(a: usize, b: usize, c: usize) -> Self {
        Self::from_vertices(&[a, b, c])
    }

    /// Panics on an empty slice, more than four vertices, or repeated vertices.
    pub fn from_vertices(vs: &[usize]) -> Self {
        assert!((1..=4).contains(&vs.len()), "simplex needs 1..=4 vertices");
        let mut verts = [0u32; 4];
        for (slot, &v) in verts.iter_mut().zip(vs) {
            *slot = u32::try_from(v).expect("vertex id fits in u32");
        }
        verts[..vs.len()].sort_unstable();
        assert!(verts[..vs.len()].windows(2).all(|w| w[0] < w[1]), "repeated vertex in simplex");
        Simplex { dim: (vs.len() - 1) as u8, verts }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts[..=self.dim as usize]
    }

    pub fn vertex_ids(&self) -> Vec<usize> {
        self.vertices().iter().map(|&v| v as usize).collect()
    }

    /// Codimension-one faces; empty for vertices.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let d = self.dim as usize;
        (0..=d).filter(move |_| d > 0).map(move |skip| {
            let mut verts = [0u32; 4];
            let mut k = 0;
            for (i, &v) in self.vertices().iter().enumerate() {
                if i != skip {
                    verts[k] = v;
                    k += 1;
                }
            }
            Simplex { dim: self.dim - 1, verts }
        })
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vertices()).finish()
    }
}

/// Strictly increasing threshold values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet(Vec<f64>);

impl ThresholdSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("threshold set is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("thresholds must be finite".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!("thresholds not strictly increasing: {values:?}")));
        }
        Ok(ThresholdSet(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 0-based index of the first threshold `>= x`, i.e. the sublevel step at
    /// which a vertex with value `x` enters. `None` beyond the last threshold.
    pub fn level_of(&self, x: f64) -> Option<usize> {
        let j = self.0.partition_point(|&a| a < x);
        (j < self.0.len()).then_some(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdStrategy {
    /// `m` evenly spaced steps ending at the maximum.
    UniformRange(usize),
    /// Nearest-rank quantiles at levels `i/m`; duplicates collapse.
    Quantile(usize),
    /// Every distinct value.
    UniqueValues,
}

impl std::str::FromStr for ThresholdStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let count = |m: &str| -> Result<usize> {
            m.trim()
                .parse()
                .ok()
                .filter(|&m: &usize| m >= 1)
                .ok_or_else(|| Error::InvalidArgument(format!("bad threshold count in `{s}`")))
        };
        match s.split_once(':') {
            None if s == "unique" => Ok(ThresholdStrategy::UniqueValues),
            Some(("quantile", m)) => Ok(ThresholdStrategy::Quantile(count(m)?)),
            Some(("uniform", m)) => Ok(ThresholdStrategy::UniformRange(count(m)?)),
            _ => Err(Error::InvalidArgument(format!(
                "threshold strategy `{s}` (expected unique, quantile:M or uniform:M)"
            ))),
        }
    }
}

impl fmt::Display for ThresholdStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdStrategy::UniformRange(m) => write!(f, "uniform:{m}"),
            ThresholdStrategy::Quantile(m) => write!(f, "quantile:{m}"),
            ThresholdStrategy::UniqueValues => f.write_str("unique"),
        }
    }
}

pub fn compute_thresholds(values: &[f64], strategy: ThresholdStrategy) -> Result<ThresholdSet> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot build thresholds from no values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("filter values must be finite".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let mut out = match strategy {
        ThresholdStrategy::UniqueValues => sorted.clone(),
        ThresholdStrategy::UniformRange(0) | ThresholdStrategy::Quantile(0) => {
            return Err(Error::InvalidArgument("threshold count must be at least 1".into()));
        }
        ThresholdStrategy::UniformRange(m) => {
            if min == max {
                vec![max]
            } else {
                let mut t: Vec<f64> = (1..=m).map(|i| min + (max - min) * i as f64 / m as f64).collect();
                t[m - 1] = max;
                t
            }
        }
        ThresholdStrategy::Quantile(m) => {
            let n = sorted.len();
            (1..=m).map(|i| sorted[(i * n).div_ceil(m) - 1]).collect()
        }
    };
    out.dedup();
    if let ThresholdStrategy::Quantile(m) = strategy {
        if out.len() < m {
            warn!("quantile thresholds: {m} requested, {} distinct after collapsing duplicates", out.len());
        }
    }
    ThresholdSet::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Sublevel,
    Superlevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyLevel {
    pub threshold: f64,
    pub vertices: Vec<usize>,
}

/// Nested vertex sets `V_1 ⊆ … ⊆ V_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexHierarchy {
    pub direction: Direction,
    pub levels: Vec<HierarchyLevel>,
}

pub fn sublevel_hierarchy(values: &[f64], thresholds: &ThresholdSet, direction: Direction) -> VertexHierarchy {
    let select = |pred: &dyn Fn(f64) -> bool| -> Vec<usize> {
        values.iter().enumerate().filter(|(_, &x)| pred(x)).map(|(i, _)| i).collect()
    };
    let levels = match direction {
        Direction::Sublevel => thresholds
            .values()
            .iter()
            .map(|&a| HierarchyLevel { threshold: a, vertices: select(&|x| x <= a) })
            .collect(),
        Direction::Superlevel => thresholds
            .values()
            .iter()
            .rev()
            .map(|&a| HierarchyLevel { threshold: a, vertices: select(&|x| x >= a) })
            .collect(),
    };
    VertexHierarchy { direction, levels }
}

/// Subgraph of a molecular graph, in the original vertex ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn whole(g: &MolecularGraph) -> Self {
        let mut edges: Vec<_> = g.bonds().iter().map(|b| b.endpoints()).collect();
        edges.sort_unstable();
        Subgraph { vertices: (0..g.num_atoms()).collect(), edges }
    }

    /// Subgraph induced by `vset`: every bond with both endpoints in the set.
    pub fn induced(g: &MolecularGraph, vset: &[usize]) -> Self {
        let mut member = vec![false; g.num_atoms()];
        for &v in vset {
            member[v] = true;
        }
        let mut vertices = vset.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        let mut edges: Vec<_> = g
            .bonds()
            .iter()
            .map(|b| b.endpoints())
            .filter(|&(a, b)| member[a] && member[b])
            .collect();
        edges.sort_unstable();
        Subgraph { vertices, edges }
    }
}

/// Simplices sorted by dimension then vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    simplices: Vec<Simplex>,
}

impl SimplicialComplex {
    pub fn from_simplices(mut simplices: Vec<Simplex>) -> Self {
        simplices.sort_unstable();
        simplices.dedup();
        SimplicialComplex { simplices }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.binary_search(s).is_ok()
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.iter().all(|s| other.contains(s))
    }

    pub fn is_closed(&self) -> bool {
        self.simplices.iter().all(|s| s.faces().all(|f| self.contains(&f)))
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// Clique complex of a subgraph up to `max_dim` (2 or 3).
pub fn clique_complex(sub: &Subgraph, max_dim: usize) -> SimplicialComplex {
    let max_dim = max_dim.min(3);
    let edge_set: HashSet<(usize, usize)> = sub.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let adjacent = |a: usize, b: usize| edge_set.contains(&(a.min(b), a.max(b)));
    let mut out: Vec<Simplex> = sub.vertices.iter().map(|&v| Simplex::vertex(v)).collect();
    if max_dim >= 1 {
        out.extend(edge_set.iter().map(|&(a, b)| Simplex::edge(a, b)));
    }
    if max_dim >= 2 {
        let mut nbrs: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for &(a, b) in &edge_set {
            nbrs.entry(a).or_default().push(b);
            nbrs.entry(b).or_default().push(a);
        }
        for list in nbrs.values_mut() {
            list.sort_unstable();
        }
        let mut triangles = Vec::new();
        for &(a, b) in &edge_set {
            for &c in nbrs.get(&b).into_iter().flatten() {
                if c > b && adjacent(a, c) {
                    triangles.push([a, b, c]);
                }
            }
        }
        if max_dim >= 3 {
            for &[a, b, c] in &triangles {
                for &d in nbrs.get(&c).into_iter().flatten() {
                    if d > c && adjacent(a, d) && adjacent(b, d) {
                        out.push(Simplex::from_vertices(&[a, b, c, d]));
                    }
                }
            }
        }
        out.extend(triangles.iter().map(|&[a, b, c]| Simplex::triangle(a, b, c)));
    }
    SimplicialComplex::from_simplices(out)
}

/// Simplices with integer filtration values in `0..=k_cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    entries: Vec<(Simplex, u32)>,
    k_cap: u32,
}

impl FilteredComplex {
    /// Unchecked; monotonicity is verified when persistence is computed.
    pub fn new(entries: Vec<(Simplex, u32)>, k_cap: u32) -> Self {
        FilteredComplex { entries, k_cap }
    }

    pub fn entries(&self) -> &[(Simplex, u32)] {
        &self.entries
    }

    pub fn k_cap(&self) -> u32 {
        self.k_cap
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.entries.iter().map(|(s, _)| s.dim()).max()
    }

    pub fn value_of(&self, s: &Simplex) -> Option<u32> {
        self.entries.iter().find(|(t, _)| t == s).map(|&(_, v)| v)
    }

    /// Subcomplex present at filtration value `t`.
    pub fn at(&self, t: u32) -> SimplicialComplex {
        SimplicialComplex::from_simplices(self.entries.iter().filter(|(_, v)| *v <= t).map(|(s, _)| *s).collect())
    }

    /// Checks that every face exists with a value no larger than its coface,
    /// that values do not exceed `k_cap` and that no simplex repeats.
    pub fn check(&self) -> Result<()> {
        let mut values = std::collections::HashMap::with_capacity(self.entries.len());
        for &(s, v) in &self.entries {
            if v > self.k_cap {
                return Err(Error::NotMonotone {
                    simplex: s.vertex_ids(),
                    reason: format!("value {v} exceeds k_cap {}", self.k_cap),
                });
            }
            if values.insert(s, v).is_some() {
                return Err(Error::NotMonotone { simplex: s.vertex_ids(), reason: "listed twice".into() });
            }
        }
        for &(s, v) in &self.entries {
            for face in s.faces() {
                match values.get(&face) {
                    None => {
                        return Err(Error::NotMonotone {
                            simplex: s.vertex_ids(),
                            reason: format!("face {face:?} is missing"),
                        })
                    }
                    Some(&fv) if fv > v => {
                        return Err(Error::NotMonotone {
                            simplex: s.vertex_ids(),
                            reason: format!("face {face:?} enters at {fv} after the simplex at {v}"),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Power-filtration slice on `vset`, using hop distances of the full graph.
///
/// Vertices enter at 0, an edge at its hop distance when that is at most
/// `k_cap`, and a triangle at the largest of its three edge values.
/// Unreachable pairs never get an edge.
pub fn vr_slice(vset: &[usize], dist: &DistanceMatrix, k_cap: u32) -> FilteredComplex {
    let mut vs = vset.to_vec();
    vs.sort_unstable();
    vs.dedup();
    let n = vs.len();
    let mut entries: Vec<(Simplex, u32)> = vs.iter().map(|&v| (Simplex::vertex(v), 0)).collect();
    let mut local = vec![None; n * n];
    for a in 0..n {
        for b in a + 1..n {
            if let Some(d) = dist.get(vs[a], vs[b]).filter(|&d| d <= k_cap) {
                local[a * n + b] = Some(d);
                entries.push((Simplex::edge(vs[a], vs[b]), d));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let Some(dab) = local[a * n + b] else { continue };
            for c in b + 1..n {
                if let (Some(dac), Some(dbc)) = (local[a * n + c], local[b * n + c]) {
                    entries.push((Simplex::triangle(vs[a], vs[b], vs[c]), dab.max(dac).max(dbc)));
                }
            }
        }
    }
    FilteredComplex::new(entries, k_cap)
}

/// Lower-star filtration on the clique complex of `sub` (up to triangles):
/// each simplex enters at the largest level of its vertices. Vertices whose
/// level is `None` are left out together with their cofaces.
pub fn lower_star_filtration(sub: &Subgraph, levels: &[Option<u32>], k_cap: u32) -> FilteredComplex {
    let kept: Vec<usize> = sub.vertices.iter().copied().filter(|&v| levels[v].is_some()).collect();
    let restricted = Subgraph {
        edges: sub
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| levels[a].is_some() && levels[b].is_some())
            .collect(),
        vertices: kept,
    };
    let complex = clique_complex(&restricted, 2);
    let entries = complex
        .simplices()
        .iter()
        .map(|s| {
            let value = s.vertices().iter().map(|&v| levels[v as usize].unwrap_or(0)).max().unwrap_or(0);
            (*s, value)
        })
        .collect();
    FilteredComplex::new(entries, k_cap)
}

/// `m × n` grid of clique complexes of doubly induced subgraphs.
#[derive(Debug, Clone, PartialEq)]
pub struct BifiltrationGrid {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<SimplicialComplex>,
}

impl BifiltrationGrid {
    pub fn get(&self, i: usize, j: usize) -> &SimplicialComplex {
        &self.cells[i * self.cols + j]
    }
}

/// Vertices with `f(v) <= alpha` and `g(v) <= beta`.
pub fn doubly_sublevel(f_values: &[f64], g_values: &[f64], alpha: f64, beta: f64) -> Vec<usize> {
    (0..f_values.len()).filter(|&v| f_values[v] <= alpha && g_values[v] <= beta).collect()
}

pub fn sublevel_bifiltration(
    g: &MolecularGraph,
    f_values: &[f64],
    g_values: &[f64],
    f_thresholds: &ThresholdSet,
    g_thresholds: &ThresholdSet,
) -> Result<BifiltrationGrid> {
    let n_atoms = g.num_atoms();
    if f_values.len() != n_atoms || g_values.len() != n_atoms {
        return Err(Error::ShapeMismatch(format!(
            "filter values have lengths {} and {} for {n_atoms} atoms",
            f_values.len(),
            g_values.len()
        )));
    }
    let mut cells = Vec::with_capacity(f_thresholds.len() * g_thresholds.len());
    for &alpha in f_thresholds.values() {
        for &beta in g_thresholds.values() {
            let vset = doubly_sublevel(f_values, g_values, alpha, beta);
            cells.push(clique_complex(&Subgraph::induced(g, &vset), 2));
        }
    }
    Ok(BifiltrationGrid { rows: f_thresholds.len(), cols: g_thresholds.len(), cells })
}

/// Edge sublevel sequence `G_1 ⊆ … ⊆ G_m`; every step keeps all vertices.
pub fn weight_filtration(g: &MolecularGraph, edge_values: &[f64], thresholds: &ThresholdSet) -> Result<Vec<Subgraph>> {
    if edge_values.len() != g.bonds().len() {
        return Err(Error::ShapeMismatch(format!(
            "{} edge values for {} bonds",
            edge_values.len(),
            g.bonds().len()
        )));
    }
    Ok(thresholds
        .values()
        .iter()
        .map(|&a| {
            let mut edges: Vec<_> = g
                .bonds()
                .iter()
                .zip(edge_values)
                .filter(|(_, &w)| w <= a)
                .map(|(b, _)| b.endpoints())
                .collect();
            edges.sort_unstable();
            Subgraph { vertices: (0..g.num_atoms()).collect(), edges }
        })
        .collect())
}
