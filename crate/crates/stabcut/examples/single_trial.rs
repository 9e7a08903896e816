//! One random-projection trial, spelled out: project every bulk vertex of
//! the network state onto a uniformly random stabilizer state and compare
//! the terminal entropies of the survivor against the min-cut table.

use stabcut::gfp::PrimeModulus;
use stabcut::hypergraph::example_h1;
use stabcut::network::{build_omega, run_trial};

fn main() {
    let h = example_h1();
    let table = h.mincut_table().unwrap();
    let p = PrimeModulus::new(2).unwrap();
    let r = 6;
    let (layout, omega) = build_omega(&h, p, r).unwrap();
    println!("p=2, r={r}: D = 2^{r}, {} qudits, bulk log-dim {}", layout.total_qudits, layout.bulk_log_dim());

    let result = run_trial(&layout, &omega, 42, 0).unwrap();
    if !result.nonzero {
        println!("trial annihilated the state (Ψ = 0) — rare, retry another seed");
        return;
    }
    // tr[Ψ] = p^{-f}; f counts the random measurement outcomes along the way.
    println!("nonzero, free_count = {} (tr[Ψ] = 2^-{})", result.free_count, result.free_count);
    println!("{:<12} {:>10} {:>8}", "A", "S_A/(r ln p)", "m(A)");
    let e = result.entropies.unwrap();
    for a in 0..(1u64 << table.terminal_count()) {
        println!(
            "{:<12} {:>10.3} {:>8}",
            table.subset_label(a),
            e[a as usize] as f64 / r as f64,
            table.min_cut(a)
        );
    }
}
