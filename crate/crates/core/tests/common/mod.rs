#![allow(dead_code)]

use mpfp::molgraph::{Atom, Bond, BondType, Label, MolecularGraph};
use proptest::prelude::*;
use rand::Rng;

/// Small labelled graph used by the property tests.
#[derive(Debug, Clone)]
pub struct Toy {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl Toy {
    pub fn graph(&self) -> MolecularGraph {
        let atoms = (0..self.n)
            .map(|i| {
                let mut a = Atom::from_element("C").unwrap().with_charge(self.g[i]);
                a.atomic_mass = self.f[i];
                a
            })
            .collect();
        let bonds = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| Bond::new(a, b, [BondType::Single, BondType::Double, BondType::Aromatic][k % 3]).unwrap())
            .collect();
        MolecularGraph::new("toy", atoms, bonds, Label::Unlabeled).unwrap()
    }
}

/// Graphs on `1..=max_n` vertices, values drawn from a small grid so ties occur.
pub fn toy(max_n: usize) -> impl Strategy<Value = Toy> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(1u8..=6, n),
            proptest::collection::vec(0u8..=4, n),
        )
            .prop_map(|(n, mask, f, g)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for a in 0..n {
                    for b in a + 1..n {
                        if mask[k] {
                            edges.push((a, b));
                        }
                        k += 1;
                    }
                }
                Toy { n, edges, f: f.into_iter().map(|v| f64::from(v) * 2.0).collect(), g: g.into_iter().map(f64::from).collect() }
            })
    })
}

pub fn random_toy(rng: &mut impl Rng, max_n: usize, density: f64) -> Toy {
    let n = rng.gen_range(1..=max_n);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    Toy {
        n,
        edges,
        f: (0..n).map(|_| f64::from(rng.gen_range(1u8..=6)) * 2.0).collect(),
        g: (0..n).map(|_| f64::from(rng.gen_range(0u8..=4))).collect(),
    }
}

/// All-pairs hop distances by Floyd-Warshall; `None` when unreachable.
pub fn floyd(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b) in edges {
        d[a][b] = Some(1);
        d[b][a] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| x + y < c) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

/// Cliques of size 1..=3 among `verts` under `adjacent`, by enumeration.
pub fn cliques(verts: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = verts.iter().map(|&v| vec![v]).collect();
    for (i, &a) in verts.iter().enumerate() {
        for (j, &b) in verts.iter().enumerate().skip(i + 1) {
            if adjacent(a, b) {
                out.push(vec![a, b]);
                for &c in &verts[j + 1..] {
                    if adjacent(a, c) && adjacent(b, c) {
                        out.push(vec![a, b, c]);
                    }
                }
            }
        }
    }
    out
}

/// Rank over GF(2) by Gaussian elimination on boolean rows.
fn rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] {
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    r
}

fn boundary_rank(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> usize {
    if lower.is_empty() || upper.is_empty() {
        return 0;
    }
    let rows = upper
        .iter()
        .map(|s| lower.iter().map(|f| f.iter().all(|v| s.contains(v))).collect())
        .collect();
    rank(rows)
}

/// Betti numbers `[β0, β1]` of a complex given as vertex lists.
pub fn betti(simplices: &[Vec<usize>]) -> [usize; 2] {
    let by = |k: usize| -> Vec<Vec<usize>> { simplices.iter().filter(|s| s.len() == k + 1).cloned().collect() };
    let (v, e, t) = (by(0), by(1), by(2));
    let r1 = boundary_rank(&v, &e);
    let r2 = boundary_rank(&e, &t);
    [v.len() - r1, e.len() - r1 - r2]
}

/// Betti numbers of the clique complex of the subgraph induced on `verts`.
pub fn induced_betti(toy: &Toy, verts: &[usize]) -> [usize; 2] {
    let adj = |a: usize, b: usize| toy.edges.contains(&(a.min(b), a.max(b)));
    betti(&cliques(verts, adj))
}
