//! JSON graph records.
//!
//! ```json
//! {
//!   "id": "ethanol",
//!   "label": "active:T1",
//!   "atoms": [
//!     {"element": "C"},
//!     {"element": "C", "charge": -0.05},
//!     {"element": "O", "mass": 15.995, "extra": {"logp": 0.2}}
//!   ],
//!   "bonds": [[0, 1, 1], [1, 2, 1]]
//! }
//! ```
//!
//! `label` is optional (default `unlabeled`). `mass` overrides the element
//! table. Bonds are `[i, j, type]` with 0-based atom indices and type codes
//! 1=single, 2=double, 3=triple, 4=aromatic. A library file is either one
//! record or an array of records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{elements, Atom, Bond, BondType, Label, MolecularGraph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphRecord {
    pub id: String,
    #[serde(default = "unlabeled")]
    pub label: Label,
    pub atoms: Vec<AtomRecord>,
    #[serde(default)]
    pub bonds: Vec<(usize, usize, u8)>,
}

fn unlabeled() -> Label {
    Label::Unlabeled
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomRecord {
    pub element: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl GraphRecord {
    pub fn into_graph(self) -> Result<MolecularGraph> {
        let atoms = self
            .atoms
            .into_iter()
            .enumerate()
            .map(|(index, a)| {
                let atomic_mass = match a.mass {
                    Some(m) => m,
                    None => elements::atomic_mass(&a.element)
                        .ok_or_else(|| Error::UnknownElement(a.element.clone()))?,
                };
                Ok(Atom { index, element: a.element, atomic_mass, partial_charge: a.charge, extra: a.extra })
            })
            .collect::<Result<Vec<_>>>()?;
        let bonds = self
            .bonds
            .into_iter()
            .map(|(i, j, t)| {
                let bond_type = BondType::try_from(t).map_err(Error::InvalidGraph)?;
                Bond::new(i, j, bond_type)
            })
            .collect::<Result<Vec<_>>>()?;
        MolecularGraph::new(self.id, atoms, bonds, self.label)
    }

    /// Record form of a graph. Masses are always written explicitly.
    pub fn from_graph(g: &MolecularGraph) -> Self {
        GraphRecord {
            id: g.id().to_string(),
            label: g.label().clone(),
            atoms: g
                .atoms()
                .iter()
                .map(|a| AtomRecord {
                    element: a.element.clone(),
                    mass: Some(a.atomic_mass),
                    charge: a.partial_charge,
                    extra: a.extra.clone(),
                })
                .collect(),
            bonds: g
                .bonds()
                .iter()
                .map(|b| {
                    let (i, j) = b.endpoints();
                    (i, j, b.bond_type.code())
                })
                .collect(),
        }
    }
}

pub fn parse_graph_json(input: &[u8]) -> Result<MolecularGraph> {
    let record: GraphRecord = serde_json::from_slice(input)?;
    record.into_graph()
}

/// Parses either a single record or an array of records, one result per record.
pub fn parse_graph_json_library(input: &[u8]) -> Result<Vec<Result<MolecularGraph>>> {
    let value: serde_json::Value = serde_json::from_slice(input)?;
    let records = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    Ok(records
        .into_iter()
        .map(|v| serde_json::from_value::<GraphRecord>(v).map_err(Error::from).and_then(GraphRecord::into_graph))
        .collect())
}

pub fn to_graph_json(g: &MolecularGraph) -> String {
    serde_json::to_string(&GraphRecord::from_graph(g)).expect("graph records always serialize")
}
