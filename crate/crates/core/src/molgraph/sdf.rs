//! MDL V2000 MOL/SDF reader (topology subset).
//!
//! Column layout, 0-based byte offsets:
//!
//! ```text
//! counts:  aaabbblllfffcccsssxxxrrrpppiiimmmvvvvvv   aaa=[0,3) bbb=[3,6)
//! atom:    xxxxx.xxxxyyyyy.yyyyzzzzz.zzzz aaa...     x=[0,10) y=[10,20) z=[20,30) sym=[31,34)
//! bond:    111222tttsssxxxrrrccc                     1=[0,3) 2=[3,6) t=[6,9)
//! ```
//!
//! Data items after `M  END` of the form `> <NAME>` followed by one real per
//! atom line are attached to the atoms. `PARTIAL_CHARGES` fills the partial
//! charge, `ATOMIC_MASSES` overrides table masses and `LABEL` holds a
//! compound label such as `active:T1`.

use std::collections::BTreeMap;

use super::{elements, Atom, Bond, BondType, Label, MolecularGraph};
use crate::error::{Error, Result};

const CHARGES_ITEM: &str = "PARTIAL_CHARGES";
const MASSES_ITEM: &str = "ATOMIC_MASSES";
const LABEL_ITEM: &str = "LABEL";

/// Parses every record, failing on the first malformed one.
pub fn parse_sdf(input: &[u8]) -> Result<Vec<MolecularGraph>> {
    parse_sdf_records(input).into_iter().collect()
}

/// Parses every record independently so one bad record does not hide the rest.
pub fn parse_sdf_records(input: &[u8]) -> Vec<Result<MolecularGraph>> {
    let text = String::from_utf8_lossy(input);
    split_sdf_records(&text)
        .into_iter()
        .enumerate()
        .map(|(i, lines)| parse_record(i, &lines))
        .collect()
}

/// Splits a stream on `$$$$` lines. Trailing whitespace-only content is not a record.
pub fn split_sdf_records(text: &str) -> Vec<Vec<&str>> {
    let mut records = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        if line.starts_with("$$$$") {
            records.push(std::mem::take(&mut current));
        } else {
            current.push(line);
        }
    }
    if current.iter().any(|l| !l.trim().is_empty()) {
        records.push(current);
    }
    records
}

fn field(line: &str, start: usize, end: usize) -> Option<&str> {
    if !line.is_ascii() || line.len() < start {
        return None;
    }
    Some(&line[start..end.min(line.len())])
}

fn parse_record(record: usize, lines: &[&str]) -> Result<MolecularGraph> {
    let err = |message: String| Error::Parse { record, message };
    if lines.len() < 4 {
        return Err(err("record shorter than the 4-line header".into()));
    }
    let title = lines[0].trim();
    let id = if title.is_empty() { format!("record{record}") } else { title.to_string() };

    let counts = lines[3];
    if counts.contains("V3000") {
        return Err(err("V3000 records are not supported".into()));
    }
    let count_at = |start: usize, what: &str| -> Result<usize> {
        field(counts, start, start + 3)
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| err(format!("malformed counts line (bad {what} count): `{counts}`")))
    };
    let n_atoms = count_at(0, "atom")?;
    let n_bonds = count_at(3, "bond")?;
    if lines.len() < 4 + n_atoms + n_bonds {
        return Err(err(format!(
            "counts line declares {n_atoms} atoms and {n_bonds} bonds but the record is too short"
        )));
    }

    let mut symbols = Vec::with_capacity(n_atoms);
    for (k, line) in lines[4..4 + n_atoms].iter().enumerate() {
        for (start, axis) in [(0, 'x'), (10, 'y'), (20, 'z')] {
            field(line, start, start + 10)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| err(format!("atom line {}: bad {axis} coordinate", k + 1)))?;
        }
        let symbol = field(line, 31, 34)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| err(format!("atom line {}: missing element symbol", k + 1)))?;
        symbols.push(symbol.to_string());
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for (k, line) in lines[4 + n_atoms..4 + n_atoms + n_bonds].iter().enumerate() {
        let num = |start: usize| field(line, start, start + 3).and_then(|s| s.trim().parse::<usize>().ok());
        let (Some(i), Some(j), Some(t)) = (num(0), num(3), num(6)) else {
            return Err(err(format!("bond line {}: malformed `{line}`", k + 1)));
        };
        if i == 0 || j == 0 || i > n_atoms || j > n_atoms {
            return Err(err(format!(
                "bond line {}: atom index out of range ({i}, {j}) for {n_atoms} atoms",
                k + 1
            )));
        }
        let bond_type = u8::try_from(t)
            .ok()
            .and_then(|t| BondType::try_from(t).ok())
            .ok_or_else(|| err(format!("bond line {}: unsupported bond type {t}", k + 1)))?;
        bonds.push(Bond::new(i - 1, j - 1, bond_type).map_err(|e| err(e.to_string()))?);
    }

    let items = data_items(&lines[4 + n_atoms + n_bonds..]);
    let per_atom = |name: &str| -> Result<Option<Vec<f64>>> {
        let Some(values) = items.get(name) else { return Ok(None) };
        let parsed: Option<Vec<f64>> = values.iter().map(|v| v.trim().parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == n_atoms => Ok(Some(v)),
            _ => Err(err(format!("data item `{name}` must hold one real per atom ({n_atoms})"))),
        }
    };
    let charges = per_atom(CHARGES_ITEM)?;
    let masses = per_atom(MASSES_ITEM)?;
    let label = match items.get(LABEL_ITEM) {
        Some(v) => v.join(" ").parse().map_err(|e: Error| err(e.to_string()))?,
        None => Label::Unlabeled,
    };

    let mut extras: Vec<(&String, Vec<f64>)> = Vec::new();
    for (name, values) in &items {
        if [CHARGES_ITEM, MASSES_ITEM, LABEL_ITEM].contains(&name.as_str()) || values.len() != n_atoms {
            continue;
        }
        let parsed: Option<Vec<f64>> = values.iter().map(|v| v.trim().parse().ok()).collect();
        if let Some(parsed) = parsed {
            extras.push((name, parsed));
        }
    }

    let mut atoms = Vec::with_capacity(n_atoms);
    for (i, symbol) in symbols.into_iter().enumerate() {
        let atomic_mass = match &masses {
            Some(m) => m[i],
            None => elements::atomic_mass(&symbol).ok_or_else(|| err(Error::UnknownElement(symbol.clone()).to_string()))?,
        };
        let extra: BTreeMap<String, f64> = extras.iter().map(|(k, v)| ((*k).clone(), v[i])).collect();
        atoms.push(Atom {
            index: i,
            element: symbol,
            atomic_mass,
            partial_charge: charges.as_ref().map(|c| c[i]),
            extra,
        });
    }
    MolecularGraph::new(id, atoms, bonds, label).map_err(|e| err(e.to_string()))
}

/// Collects `> <NAME>` data items after `M  END`.
fn data_items(lines: &[&str]) -> BTreeMap<String, Vec<String>> {
    let mut items = BTreeMap::new();
    let mut past_end = false;
    let mut current: Option<(String, Vec<String>)> = None;
    for line in lines {
        if !past_end {
            past_end = line.starts_with("M  END");
            continue;
        }
        if let Some((name, values)) = current.as_mut() {
            if line.trim().is_empty() {
                items.insert(std::mem::take(name), std::mem::take(values));
                current = None;
            } else {
                values.push(line.to_string());
            }
            continue;
        }
        if line.starts_with('>') {
            if let (Some(open), Some(close)) = (line.find('<'), line.rfind('>')) {
                if close > open {
                    current = Some((line[open + 1..close].to_string(), Vec::new()));
                }
            }
        }
    }
    if let Some((name, values)) = current {
        items.insert(name, values);
    }
    items
}
