//! Persistence diagrams in dimensions 0 and 1.
//!
//! [`persistence_diagram`] reduces the boundary matrix over the two-element
//! field (triangles first, with clearing). [`pd0_union_find`] is the fast path
//! for dimension 0. [`betti_at`] is an independent rank computation used as a
//! test oracle and for bigraded Betti numbers of single cells.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::filtration::{FilteredComplex, Simplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bar {
    pub birth: u32,
    pub death: u32,
    /// Never dies; `death` is then the cap.
    pub essential: bool,
}

impl Bar {
    pub fn finite(birth: u32, death: u32) -> Self {
        Bar { birth, death, essential: false }
    }

    pub fn essential(birth: u32, k_cap: u32) -> Self {
        Bar { birth, death: k_cap, essential: true }
    }

    pub fn lifespan(&self) -> u32 {
        self.death - self.birth
    }

    /// Alive at integer threshold `t`: `[b, d)` for finite bars, `[b, cap]` for essential ones.
    pub fn alive_at(&self, t: u32) -> bool {
        self.birth <= t && (t < self.death || (self.essential && t <= self.death))
    }
}

/// Multiset of bars, kept sorted so equal multisets compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistenceDiagram {
    pub dim: u8,
    pub k_cap: u32,
    bars: Vec<Bar>,
    /// Number of zero-length pairs that were dropped.
    pub discarded: usize,
}

impl PersistenceDiagram {
    pub fn new(dim: u8, k_cap: u32, mut bars: Vec<Bar>) -> Self {
        bars.sort_unstable();
        PersistenceDiagram { dim, k_cap, bars, discarded: 0 }
    }

    pub fn empty(dim: u8, k_cap: u32) -> Self {
        Self::new(dim, k_cap, Vec::new())
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Number of bars alive at `t`.
    pub fn rank_at(&self, t: u32) -> usize {
        self.bars.iter().filter(|b| b.alive_at(t)).count()
    }
}

/// Filtration order: value, then dimension, then vertices.
fn ordered(fc: &FilteredComplex) -> Vec<(Simplex, u32)> {
    let mut entries = fc.entries().to_vec();
    entries.sort_unstable_by_key(|&(s, v)| (v, s));
    entries
}

/// Sorted symmetric difference of two sorted index lists.
fn add_column(target: &mut Vec<u32>, other: &[u32], scratch: &mut Vec<u32>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

/// Column reduction; returns the pivot row of each column (`None` for zero columns).
/// Columns listed in `skip` are treated as already zero.
fn reduce(columns: &mut [Vec<u32>], n_rows: usize, skip: &[bool]) -> Vec<Option<u32>> {
    let mut owner: Vec<Option<u32>> = vec![None; n_rows];
    let mut pivots = vec![None; columns.len()];
    let mut scratch = Vec::new();
    for j in 0..columns.len() {
        if skip.get(j).copied().unwrap_or(false) {
            continue;
        }
        while let Some(&low) = columns[j].last() {
            match owner[low as usize] {
                Some(k) => {
                    let (left, right) = columns.split_at_mut(j);
                    add_column(&mut right[0], &left[k as usize], &mut scratch);
                }
                None => {
                    owner[low as usize] = Some(j as u32);
                    pivots[j] = Some(low);
                    break;
                }
            }
        }
    }
    pivots
}

/// Diagrams in dimensions 0 and 1 by boundary-matrix reduction.
///
/// Zero-length pairs are dropped; unpaired creators become essential bars
/// with death at `k_cap`.
pub fn persistence_diagram(fc: &FilteredComplex) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    fc.check()?;
    if let Some(d) = fc.max_dim().filter(|&d| d > 2) {
        return Err(Error::InvalidArgument(format!("simplices of dimension {d} are not supported")));
    }
    let k_cap = fc.k_cap();
    let order = ordered(fc);
    let mut by_dim: [Vec<(Simplex, u32)>; 3] = Default::default();
    for &(s, v) in &order {
        by_dim[s.dim()].push((s, v));
    }
    let [verts, edges, tris] = by_dim;
    let vert_index: HashMap<u32, u32> =
        verts.iter().enumerate().map(|(i, (s, _))| (s.vertices()[0], i as u32)).collect();
    let edge_index: HashMap<Simplex, u32> = edges.iter().enumerate().map(|(i, (s, _))| (*s, i as u32)).collect();

    // dimension 2 columns first, so their pivots clear positive edge columns
    let mut tri_cols: Vec<Vec<u32>> = tris
        .iter()
        .map(|(s, _)| {
            let mut col: Vec<u32> = s.faces().map(|f| edge_index[&f]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let tri_pivots = reduce(&mut tri_cols, edges.len(), &[]);
    let mut edge_killed = vec![false; edges.len()];
    let mut pd1 = Vec::new();
    let mut discarded1 = 0;
    for (j, pivot) in tri_pivots.iter().enumerate() {
        if let Some(e) = pivot {
            edge_killed[*e as usize] = true;
            let (birth, death) = (edges[*e as usize].1, tris[j].1);
            if birth < death {
                pd1.push(Bar::finite(birth, death));
            } else {
                discarded1 += 1;
            }
        }
    }

    let mut edge_cols: Vec<Vec<u32>> = edges
        .iter()
        .map(|(s, _)| {
            let mut col: Vec<u32> = s.vertices().iter().map(|v| vert_index[v]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    let edge_pivots = reduce(&mut edge_cols, verts.len(), &edge_killed);
    let mut vert_killed = vec![false; verts.len()];
    let mut pd0 = Vec::new();
    let mut discarded0 = 0;
    for (j, pivot) in edge_pivots.iter().enumerate() {
        match pivot {
            Some(v) => {
                vert_killed[*v as usize] = true;
                let (birth, death) = (verts[*v as usize].1, edges[j].1);
                if birth < death {
                    pd0.push(Bar::finite(birth, death));
                } else {
                    discarded0 += 1;
                }
            }
            None if !edge_killed[j] => pd1.push(Bar::essential(edges[j].1, k_cap)),
            None => {}
        }
    }
    for (i, killed) in vert_killed.iter().enumerate() {
        if !killed {
            pd0.push(Bar::essential(verts[i].1, k_cap));
        }
    }
    let mut d0 = PersistenceDiagram::new(0, k_cap, pd0);
    d0.discarded = discarded0;
    let mut d1 = PersistenceDiagram::new(1, k_cap, pd1);
    d1.discarded = discarded1;
    Ok((d0, d1))
}

struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    /// Oldest vertex of each root's component.
    elder: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect(), size: vec![1; n], elder: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize, elder: usize) {
        let (big, small) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.elder[big] = elder;
    }
}

/// Dimension-0 diagram by union-find with the elder rule: at a merge the
/// younger component dies; between equally old components the one whose
/// oldest vertex has the larger index dies.
pub fn pd0_union_find(fc: &FilteredComplex) -> PersistenceDiagram {
    let k_cap = fc.k_cap();
    let mut verts: Vec<(u32, u32)> = Vec::new();
    let mut edges: Vec<(u32, Simplex)> = Vec::new();
    for &(s, v) in fc.entries() {
        match s.dim() {
            0 => verts.push((s.vertices()[0], v)),
            1 => edges.push((v, s)),
            _ => {}
        }
    }
    verts.sort_unstable();
    let local: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &(id, _))| (id, i)).collect();
    let birth: Vec<u32> = verts.iter().map(|&(_, v)| v).collect();
    edges.sort_unstable();

    let mut ds = DisjointSet::new(verts.len());
    let mut bars = Vec::new();
    let mut discarded = 0;
    for (value, e) in edges {
        let (a, b) = (local[&e.vertices()[0]], local[&e.vertices()[1]]);
        let (ra, rb) = (ds.find(a), ds.find(b));
        if ra == rb {
            continue;
        }
        let (ea, eb) = (ds.elder[ra], ds.elder[rb]);
        let (survivor, dying) = if (birth[ea], ea) <= (birth[eb], eb) { (ea, eb) } else { (eb, ea) };
        if birth[dying] < value {
            bars.push(Bar::finite(birth[dying], value));
        } else {
            discarded += 1;
        }
        ds.union(ra, rb, survivor);
    }
    for v in 0..verts.len() {
        if ds.find(v) == v {
            bars.push(Bar::essential(birth[ds.elder[v]], k_cap));
        }
    }
    let mut pd = PersistenceDiagram::new(0, k_cap, bars);
    pd.discarded = discarded;
    pd
}

/// Diagram in a single dimension, taking the union-find path for dimension 0.
pub fn diagram_in_dim(fc: &FilteredComplex, dim: u8) -> Result<PersistenceDiagram> {
    match dim {
        0 => {
            fc.check()?;
            Ok(pd0_union_find(fc))
        }
        1 => Ok(persistence_diagram(fc)?.1),
        d => Err(Error::InvalidArgument(format!("homology dimension {d} is not supported"))),
    }
}

/// Rank over the two-element field of a dense 0/1 matrix given as bit rows.
fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width * 64 {
        let (word, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][word] & bit != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[word] & bit != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Rank of the boundary map from `k`-simplices to `(k-1)`-simplices.
fn boundary_rank(faces: &[Simplex], cofaces: &[Simplex]) -> usize {
    if faces.is_empty() || cofaces.is_empty() {
        return 0;
    }
    let index: HashMap<Simplex, usize> = faces.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let words = faces.len().div_ceil(64);
    let rows = cofaces
        .iter()
        .map(|c| {
            let mut row = vec![0u64; words];
            for f in c.faces() {
                if let Some(&i) = index.get(&f) {
                    row[i / 64] |= 1 << (i % 64);
                }
            }
            row
        })
        .collect();
    gf2_rank(rows)
}

/// Betti numbers of an unfiltered complex, computed from boundary ranks:
/// `beta_k = n_k - rank d_k - rank d_{k+1}`.
pub fn betti_numbers(simplices: &[Simplex], max_k: usize) -> Vec<usize> {
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); max_k + 2];
    for s in simplices {
        if s.dim() <= max_k + 1 {
            by_dim[s.dim()].push(*s);
        }
    }
    let ranks: Vec<usize> = (0..=max_k + 1)
        .map(|k| if k == 0 { 0 } else { boundary_rank(&by_dim[k - 1], &by_dim[k]) })
        .collect();
    (0..=max_k).map(|k| by_dim[k].len() - ranks[k] - ranks[k + 1]).collect()
}

/// Betti number in dimension `k` of the subcomplex with values `<= t`.
pub fn betti_at(fc: &FilteredComplex, t: u32, k: usize) -> usize {
    let present: Vec<Simplex> = fc.entries().iter().filter(|(_, v)| *v <= t).map(|(s, _)| *s).collect();
    betti_numbers(&present, k)[k]
}
