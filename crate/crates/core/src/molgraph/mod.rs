//! Molecular graph data model, file ingestion and hop distances.

pub mod elements;
mod json;
mod sdf;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use json::{parse_graph_json, parse_graph_json_library, to_graph_json, GraphRecord};
pub use sdf::{parse_sdf, parse_sdf_records, split_sdf_records};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub index: usize,
    pub element: String,
    pub atomic_mass: f64,
    pub partial_charge: Option<f64>,
    pub extra: BTreeMap<String, f64>,
}

impl Atom {
    /// Atom with its mass taken from the built-in element table.
    pub fn from_element(element: &str) -> Result<Self> {
        let mass = elements::atomic_mass(element)
            .ok_or_else(|| Error::UnknownElement(element.to_string()))?;
        Ok(Atom {
            index: 0,
            element: element.to_string(),
            atomic_mass: mass,
            partial_charge: None,
            extra: BTreeMap::new(),
        })
    }

    pub fn with_charge(mut self, charge: f64) -> Self {
        self.partial_charge = Some(charge);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum BondType {
    Single = 1,
    Double = 2,
    Triple = 3,
    Aromatic = 4,
}

impl BondType {
    pub fn code(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for BondType {
    type Error = String;

    fn try_from(code: u8) -> std::result::Result<Self, String> {
        match code {
            1 => Ok(BondType::Single),
            2 => Ok(BondType::Double),
            3 => Ok(BondType::Triple),
            4 => Ok(BondType::Aromatic),
            other => Err(format!("unsupported bond type code {other}")),
        }
    }
}

impl From<BondType> for u8 {
    fn from(b: BondType) -> u8 {
        b.code()
    }
}

/// Undirected bond; endpoints are stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    a: usize,
    b: usize,
    pub bond_type: BondType,
}

impl Bond {
    pub fn new(i: usize, j: usize, bond_type: BondType) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop on atom {i}")));
        }
        Ok(Bond { a: i.min(j), b: i.max(j), bond_type })
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Active(String),
    Decoy,
    Template(String),
    Unlabeled,
}

impl Label {
    /// Target the compound is associated with, for actives and templates.
    pub fn target(&self) -> Option<&str> {
        match self {
            Label::Active(t) | Label::Template(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Active(t) => write!(f, "active:{t}"),
            Label::Template(t) => write!(f, "template:{t}"),
            Label::Decoy => f.write_str("decoy"),
            Label::Unlabeled => f.write_str("unlabeled"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("unrecognized label `{s}`"));
        match s.split_once(':') {
            Some((kind, target)) if !target.trim().is_empty() => {
                match kind.trim().to_ascii_lowercase().as_str() {
                    "active" => Ok(Label::Active(target.trim().to_string())),
                    "template" => Ok(Label::Template(target.trim().to_string())),
                    _ => Err(bad()),
                }
            }
            Some(_) => Err(bad()),
            None => match s.to_ascii_lowercase().as_str() {
                "decoy" => Ok(Label::Decoy),
                "unlabeled" | "" => Ok(Label::Unlabeled),
                _ => Err(bad()),
            },
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A simple undirected molecular graph. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularGraph {
    id: String,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    label: Label,
    adjacency: Vec<Vec<usize>>,
}

impl MolecularGraph {
    /// Validates and builds a graph. Atom indices are reassigned to their
    /// position in `atoms`.
    pub fn new(id: impl Into<String>, mut atoms: Vec<Atom>, bonds: Vec<Bond>, label: Label) -> Result<Self> {
        for (i, atom) in atoms.iter_mut().enumerate() {
            atom.index = i;
            if !(atom.atomic_mass.is_finite() && atom.atomic_mass > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "atom {i} ({}) has non-positive mass {}",
                    atom.element, atom.atomic_mass
                )));
            }
        }
        let n = atoms.len();
        let mut seen = HashSet::with_capacity(bonds.len());
        let mut adjacency = vec![Vec::new(); n];
        for bond in &bonds {
            let (a, b) = bond.endpoints();
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on atom {a}")));
            }
            if b >= n {
                return Err(Error::InvalidGraph(format!("bond ({a}, {b}) references a missing atom")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidGraph(format!("duplicate bond ({a}, {b})")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(MolecularGraph { id: id.into(), atoms, bonds, label, adjacency })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    /// Same topology with replaced atom records (e.g. perturbed masses).
    pub fn with_atoms(&self, atoms: Vec<Atom>) -> Result<Self> {
        if atoms.len() != self.atoms.len() {
            return Err(Error::InvalidGraph(format!(
                "expected {} atoms, got {}",
                self.atoms.len(),
                atoms.len()
            )));
        }
        MolecularGraph::new(self.id.clone(), atoms, self.bonds.clone(), self.label.clone())
    }

    /// Relabels atoms so that old atom `i` becomes atom `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.atoms.len();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if perm.len() != n || check.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::InvalidArgument("not a permutation of the atom indices".into()));
        }
        let mut atoms = self.atoms.clone();
        for (old, atom) in self.atoms.iter().enumerate() {
            atoms[perm[old]] = atom.clone();
        }
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond::new(perm[b.a], perm[b.b], b.bond_type))
            .collect::<Result<Vec<_>>>()?;
        MolecularGraph::new(self.id.clone(), atoms, bonds, self.label.clone())
    }
}

/// Shortest hop counts between all atom pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<u32>,
    max_finite: u32,
}

impl DistanceMatrix {
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `None` when the atoms lie in different connected components.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.entries[i * self.n + j];
        (d != Self::UNREACHABLE).then_some(d)
    }

    /// Largest finite entry (the graph diameter for connected graphs).
    pub fn max_finite(&self) -> u32 {
        self.max_finite
    }
}

pub fn hop_distances(g: &MolecularGraph) -> DistanceMatrix {
    let n = g.num_atoms();
    let mut entries = vec![DistanceMatrix::UNREACHABLE; n * n];
    let mut max_finite = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut entries[s * n..(s + 1) * n];
        row[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &v in g.neighbors(u) {
                if row[v] == DistanceMatrix::UNREACHABLE {
                    row[v] = du + 1;
                    max_finite = max_finite.max(du + 1);
                    queue.push_back(v);
                }
            }
        }
    }
    DistanceMatrix { n, entries, max_finite }
}

/// Vertex attribute used as a filtering function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterFunction {
    AtomicMass,
    PartialCharge,
    Extra(String),
}

impl FilterFunction {
    pub fn name(&self) -> String {
        match self {
            FilterFunction::AtomicMass => "atomic_mass".into(),
            FilterFunction::PartialCharge => "partial_charge".into(),
            FilterFunction::Extra(k) => format!("extra:{k}"),
        }
    }
}

pub fn vertex_filter_values(g: &MolecularGraph, function: &FilterFunction) -> Result<Vec<f64>> {
    g.atoms()
        .iter()
        .map(|atom| {
            let value = match function {
                FilterFunction::AtomicMass => Some(atom.atomic_mass),
                FilterFunction::PartialCharge => atom.partial_charge,
                FilterFunction::Extra(key) => atom.extra.get(key).copied(),
            };
            value.ok_or_else(|| Error::MissingAttribute {
                atom: atom.index,
                attribute: function.name(),
            })
        })
        .collect()
}

/// Bond type codes in bond order, as edge weights for the weight filtration.
pub fn bond_type_values(g: &MolecularGraph) -> Vec<f64> {
    g.bonds().iter().map(|b| f64::from(b.bond_type.code())).collect()
}
