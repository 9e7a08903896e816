//! Min-cut tables: m(A) and the number of minimal cuts k(A) for every
//! terminal subset.
//!
//! The running example has a degenerate cut: both {c,o} and {c} separate
//! {c} at weight 1, so k({c}) = 2.

use stabcut::hypergraph::example_h1;

fn main() {
    let h = example_h1();
    let table = h.mincut_table().unwrap();
    println!("terminals: {:?}", h.terminal_names());
    println!("{:<12} {:>4} {:>4}", "A", "m(A)", "k(A)");
    for a in 0..(1u64 << table.terminal_count()) {
        println!("{:<12} {:>4} {:>4}", table.subset_label(a), table.min_cut(a), table.count(a));
    }

    // Every min-cut function is symmetric and submodular.
    let f: Vec<f64> = table.m.iter().map(|&x| x as f64).collect();
    let violations = stabcut::hypergraph::check_symmetric_submodular(&f, 0.0).unwrap();
    println!("\nsymmetry/submodularity violations: {}", violations.len());
}
