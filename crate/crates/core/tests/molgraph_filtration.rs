mod common;

use common::{cliques, floyd, toy};
use mpfp::filtration::{
    clique_complex, compute_thresholds, sublevel_hierarchy, vr_slice, Direction, Simplex, Subgraph, ThresholdSet,
    ThresholdStrategy,
};
use mpfp::molgraph::{elements, hop_distances, parse_graph_json, to_graph_json, Atom, Label, MolecularGraph};
use proptest::prelude::*;

#[test]
fn mass_table_matches_reference_values() {
    // standard atomic weights, abridged
    let reference = [
        ("H", 1.008),
        ("C", 12.011),
        ("N", 14.007),
        ("O", 15.999),
        ("F", 18.998),
        ("P", 30.974),
        ("S", 32.06),
        ("Cl", 35.45),
        ("Br", 79.904),
        ("I", 126.90),
    ];
    for (symbol, mass) in reference {
        let got = elements::atomic_mass(symbol).unwrap();
        assert!((got - mass).abs() < 5e-3, "{symbol}: {got} vs {mass}");
    }
    assert!(elements::atomic_mass("Xx").is_none());
}

#[test]
fn complete_graph_counts() {
    for n in 1..=7usize {
        let atoms = (0..n).map(|_| Atom::from_element("C").unwrap()).collect();
        let mut bonds = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                bonds.push(mpfp::molgraph::Bond::new(a, b, mpfp::molgraph::BondType::Single).unwrap());
            }
        }
        let g = MolecularGraph::new("k", atoms, bonds, Label::Unlabeled).unwrap();
        let c = clique_complex(&Subgraph::whole(&g), 2);
        assert_eq!(c.count(0), n);
        assert_eq!(c.count(1), n * (n - 1) / 2);
        assert_eq!(c.count(2), n * (n - 1) * n.saturating_sub(2) / 6);
    }
}

proptest! {
    #[test]
    fn hop_distances_agree_with_floyd(t in toy(12)) {
        let g = t.graph();
        let d = hop_distances(&g);
        let oracle = floyd(t.n, &t.edges);
        for i in 0..t.n {
            prop_assert_eq!(d.get(i, i), Some(0));
            for j in 0..t.n {
                prop_assert_eq!(d.get(i, j), oracle[i][j]);
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                for k in 0..t.n {
                    if let (Some(a), Some(b), Some(c)) = (d.get(i, k), d.get(k, j), d.get(i, j)) {
                        prop_assert!(c <= a + b);
                    }
                }
            }
        }
    }

    #[test]
    fn json_round_trip(t in toy(10)) {
        let g = t.graph();
        let back = parse_graph_json(to_graph_json(&g).as_bytes()).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn clique_complex_matches_enumeration(t in toy(8)) {
        let g = t.graph();
        let verts: Vec<usize> = (0..t.n).collect();
        let complex = clique_complex(&Subgraph::whole(&g), 2);
        let mut expected: Vec<Simplex> =
            cliques(&verts, |a, b| g.has_edge(a, b)).iter().map(|c| Simplex::from_vertices(c)).collect();
        expected.sort();
        prop_assert_eq!(complex.simplices(), expected.as_slice());
        prop_assert!(complex.is_closed());
    }

    #[test]
    fn sublevel_sets_are_nested(t in toy(10), m in 1usize..6) {
        let thresholds = compute_thresholds(&t.f, ThresholdStrategy::UniformRange(m)).unwrap();
        for direction in [Direction::Sublevel, Direction::Superlevel] {
            let h = sublevel_hierarchy(&t.f, &thresholds, direction);
            for w in h.levels.windows(2) {
                prop_assert!(w[0].vertices.iter().all(|v| w[1].vertices.contains(v)));
            }
        }
        let last = &sublevel_hierarchy(&t.f, &thresholds, Direction::Sublevel).levels;
        prop_assert_eq!(last.last().unwrap().vertices.len(), t.n);
    }

    #[test]
    fn vr_slices_are_monotone_and_nested(t in toy(9), k_cap in 1u32..5) {
        let g = t.graph();
        let d = hop_distances(&g);
        let all: Vec<usize> = (0..t.n).collect();
        let fc = vr_slice(&all, &d, k_cap);
        prop_assert!(fc.check().is_ok());
        for step in 0..k_cap {
            prop_assert!(fc.at(step).is_subcomplex_of(&fc.at(step + 1)));
        }
        // sub-slices embed in the full slice with the same values
        let half: Vec<usize> = (0..t.n).step_by(2).collect();
        let sub = vr_slice(&half, &d, k_cap);
        for &(s, v) in sub.entries() {
            prop_assert_eq!(fc.value_of(&s), Some(v));
        }
    }

    #[test]
    fn thresholds_are_strictly_increasing(values in proptest::collection::vec(-50.0f64..50.0, 1..40), m in 1usize..12) {
        for strategy in [ThresholdStrategy::UniformRange(m), ThresholdStrategy::Quantile(m), ThresholdStrategy::UniqueValues] {
            let t = compute_thresholds(&values, strategy).unwrap();
            prop_assert!(ThresholdSet::new(t.values().to_vec()).is_ok());
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert!(*t.values().last().unwrap() >= max);
        }
    }
}
