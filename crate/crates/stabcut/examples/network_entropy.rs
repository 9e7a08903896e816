//! The GHZ network state Ω reproduces the cut function exactly:
//! S(Ω_S) = r · c(S) · log p for every vertex subset S, any prime p and
//! bond exponent r.

use stabcut::gfp::PrimeModulus;
use stabcut::hypergraph::example_h1;
use stabcut::network::{build_omega, omega_entropy};

fn main() {
    let h = example_h1();
    for q in [2u64, 3, 5] {
        let p = PrimeModulus::new(q).unwrap();
        for r in [1u32, 2] {
            let (layout, omega) = build_omega(&h, p, r).unwrap();
            let mut ok = true;
            for s in 0..(1u64 << h.vertex_count()) {
                let entropy = omega_entropy(&layout, &omega, s).unwrap();
                ok &= entropy == r as u64 * h.cut_value(s).unwrap();
            }
            println!(
                "p={q} r={r}: {} qudits, S(Ω_S) = r·c(S) on all {} subsets: {}",
                layout.total_qudits,
                1u64 << h.vertex_count(),
                if ok { "yes" } else { "NO" }
            );
        }
    }
}
