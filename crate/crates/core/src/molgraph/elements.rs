//! Element symbol to atomic mass lookup, backed by `data/elements.tsv`.

use std::collections::HashMap;
use std::sync::OnceLock;

const TABLE_SOURCE: &str = include_str!("../../data/elements.tsv");

#[derive(Debug, Clone, PartialEq)]
pub struct ElementEntry {
    pub atomic_number: u32,
    pub symbol: &'static str,
    pub mass: f64,
}

fn table() -> &'static (Vec<ElementEntry>, HashMap<&'static str, usize>) {
    static TABLE: OnceLock<(Vec<ElementEntry>, HashMap<&'static str, usize>)> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut entries = Vec::new();
        for line in TABLE_SOURCE.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(z), Some(symbol), Some(mass)) = (cols.next(), cols.next(), cols.next()) else {
                panic!("malformed element table line: {line}");
            };
            entries.push(ElementEntry {
                atomic_number: z.parse().expect("element table: atomic number"),
                symbol,
                mass: mass.parse().expect("element table: mass"),
            });
        }
        let index = entries.iter().enumerate().map(|(i, e)| (e.symbol, i)).collect();
        (entries, index)
    })
}

/// Version tag of the embedded table (first comment line).
pub fn table_version() -> &'static str {
    TABLE_SOURCE
        .lines()
        .next()
        .and_then(|l| l.split("version").nth(1))
        .map(str::trim)
        .unwrap_or("unknown")
}

pub fn entries() -> &'static [ElementEntry] {
    &table().0
}

/// Standard atomic mass for an element symbol. Case-sensitive (`Cl`, not `CL`).
pub fn atomic_mass(symbol: &str) -> Option<f64> {
    let (entries, index) = table();
    index.get(symbol).map(|&i| entries[i].mass)
}

pub fn atomic_number(symbol: &str) -> Option<u32> {
    let (entries, index) = table();
    index.get(symbol).map(|&i| entries[i].atomic_number)
}

pub fn symbol_for(atomic_number: u32) -> Option<&'static str> {
    entries()
        .iter()
        .find(|e| e.atomic_number == atomic_number)
        .map(|e| e.symbol)
}
