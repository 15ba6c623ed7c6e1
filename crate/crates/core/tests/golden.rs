use std::collections::BTreeSet;
use std::path::Path;

use nilforge::dyadic::DyadicTorus;
use nilforge::rho::{psi_table, PAIRS, PARTITIONS};
use nilforge::table::FuncTable;

fn read(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../golden").join(name)).unwrap()
}

fn pair_name(p: u8) -> String {
    let (a, b) = PAIRS[p as usize];
    format!("{a}{b}")
}

#[test]
fn partition_list_matches_golden_file() {
    let ours: Vec<String> = PARTITIONS
        .iter()
        .map(|&[p, q, r]| format!("{}|{}|{}", pair_name(p), pair_name(q), pair_name(r)))
        .collect();
    let golden: Vec<String> = read("rho_partitions.txt").lines().map(String::from).collect();
    assert_eq!(ours, golden);
}

#[test]
fn golden_partitions_are_all_matchings_with_a_marked_pair() {
    // Perfect matchings of {1..6}, each with one of its three pairs marked.
    let mut expected = BTreeSet::new();
    for b in 2..=6u8 {
        let rest: Vec<u8> = (2..=6).filter(|&x| x != b).collect();
        for c in 1..4 {
            let others: Vec<u8> = rest[1..].iter().copied().filter(|&x| x != rest[c]).collect();
            let pairs = [(1, b), (rest[0], rest[c]), (others[0], others[1])];
            for marked in 0..3 {
                let mut h1: Vec<String> = (0..3).filter(|&i| i != marked).map(|i| format!("{}{}", pairs[i].0, pairs[i].1)).collect();
                h1.sort();
                expected.insert(format!("{}|{}|{}{}", h1[0], h1[1], pairs[marked].0, pairs[marked].1));
            }
        }
    }
    let golden: BTreeSet<String> = read("rho_partitions.txt").lines().map(String::from).collect();
    assert_eq!(expected.len(), 45);
    assert_eq!(golden, expected);
}

#[test]
fn psi_table_matches_golden_file_and_formula() {
    let golden = FuncTable::from_csv(&read("psi_table.csv")).unwrap();
    assert_eq!(golden, psi_table());
    for x in 0..4u32 {
        for h in 0..4u32 {
            let (x1, x2, h1, h2) = (x & 1, x >> 1, h & 1, h >> 1);
            let quarter = (x1 * h2 + 2 * x1 * h1 * x2) as i128;
            assert_eq!(golden.get(x | h << 2), DyadicTorus::new(quarter, 2).unwrap());
        }
    }
    assert_eq!(psi_table().to_csv(), read("psi_table.csv"));
}
