//! Seeded generators of random molecules and small screening libraries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::molgraph::{Atom, Bond, BondType, Label, MolecularGraph};

const ELEMENTS: [(&str, f64, f64); 5] = [("C", 0.62, 0.0), ("N", 0.14, -0.3), ("O", 0.16, -0.4), ("S", 0.04, -0.1), ("Cl", 0.04, -0.1)];

fn pick_element(rng: &mut impl Rng) -> (&'static str, f64) {
    let mut x: f64 = rng.gen();
    for (e, w, q) in ELEMENTS {
        if x < w {
            return (e, q);
        }
        x -= w;
    }
    ("C", 0.0)
}

fn pick_bond(rng: &mut impl Rng) -> BondType {
    match rng.gen_range(0..20) {
        0..=13 => BondType::Single,
        14..=16 => BondType::Double,
        17 => BondType::Triple,
        _ => BondType::Aromatic,
    }
}

fn atom(rng: &mut impl Rng) -> Atom {
    let (e, q) = pick_element(rng);
    Atom::from_element(e).expect("generator elements are in the table").with_charge(q + rng.gen_range(-0.1..0.1))
}

/// Connected molecule with `n_atoms` atoms: a random tree plus a few ring closures.
pub fn random_molecule(rng: &mut impl Rng, id: &str, n_atoms: usize) -> MolecularGraph {
    let atoms: Vec<Atom> = (0..n_atoms).map(|_| atom(rng)).collect();
    let mut edges: Vec<(usize, usize)> = (1..n_atoms).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..rng.gen_range(0..=n_atoms / 6) {
        let (a, b) = (rng.gen_range(0..n_atoms), rng.gen_range(0..n_atoms));
        let e = (a.min(b), a.max(b));
        if a != b && !edges.contains(&e) {
            edges.push(e);
        }
    }
    let bonds = edges.into_iter().map(|(a, b)| Bond::new(a, b, pick_bond(rng)).unwrap()).collect();
    MolecularGraph::new(id, atoms, bonds, Label::Unlabeled).expect("generated graphs are valid")
}

/// `count` molecules with `min_atoms..=max_atoms` atoms, ids `mol_000000`, ….
pub fn random_library(seed: u64, count: usize, min_atoms: usize, max_atoms: usize) -> Vec<MolecularGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(min_atoms..=max_atoms);
            random_molecule(&mut rng, &format!("mol_{i:06}"), n)
        })
        .collect()
}

/// A copy of `scaffold` with jittered charges and, half of the time, one extra
/// carbon attached to a random atom.
pub fn decorate(rng: &mut impl Rng, scaffold: &MolecularGraph, id: &str, label: Label) -> MolecularGraph {
    let mut atoms: Vec<Atom> = scaffold
        .atoms()
        .iter()
        .map(|a| {
            let mut a = a.clone();
            a.partial_charge = a.partial_charge.map(|q| q + rng.gen_range(-0.02..0.02));
            a
        })
        .collect();
    let mut bonds = scaffold.bonds().to_vec();
    if rng.gen_bool(0.5) {
        let anchor = rng.gen_range(0..atoms.len());
        atoms.push(Atom::from_element("C").unwrap().with_charge(rng.gen_range(-0.1..0.1)));
        bonds.push(Bond::new(anchor, atoms.len() - 1, BondType::Single).unwrap());
    }
    MolecularGraph::new(id, atoms, bonds, label).expect("decorated scaffolds are valid")
}

/// Shape of a generated screening library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LibraryShape {
    pub targets: usize,
    pub templates_per_target: usize,
    pub actives_per_target: usize,
    pub decoys: usize,
}

impl Default for LibraryShape {
    fn default() -> Self {
        LibraryShape { targets: 3, templates_per_target: 3, actives_per_target: 20, decoys: 500 }
    }
}

/// Targets `T1, T2, …` each get a random scaffold; templates and actives are
/// decorated copies of it. Decoys are unrelated random molecules. The result
/// is shuffled.
pub fn screening_library(seed: u64, shape: LibraryShape) -> Vec<MolecularGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in 1..=shape.targets {
        let n = rng.gen_range(12..=20);
        let scaffold = random_molecule(&mut rng, "scaffold", n);
        let target = format!("T{t}");
        for k in 0..shape.templates_per_target {
            out.push(decorate(&mut rng, &scaffold, &format!("{target}_template_{k:02}"), Label::Template(target.clone())));
        }
        for k in 0..shape.actives_per_target {
            out.push(decorate(&mut rng, &scaffold, &format!("{target}_active_{k:03}"), Label::Active(target.clone())));
        }
    }
    for k in 0..shape.decoys {
        let n = rng.gen_range(8..=30);
        out.push(random_molecule(&mut rng, &format!("decoy_{k:04}"), n).with_label(Label::Decoy));
    }
    out.shuffle(&mut rng);
    out
}

/// Adds independent uniform noise in `[-epsilon, epsilon]` to every atomic mass.
pub fn perturb_masses(rng: &mut impl Rng, g: &MolecularGraph, epsilon: f64) -> MolecularGraph {
    let atoms = g
        .atoms()
        .iter()
        .map(|a| {
            let mut a = a.clone();
            if epsilon > 0.0 {
                a.atomic_mass += rng.gen_range(-epsilon..=epsilon);
            }
            a
        })
        .collect();
    g.with_atoms(atoms).expect("perturbed masses stay positive")
}
