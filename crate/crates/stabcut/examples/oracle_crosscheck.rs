//! Cross-check the stabilizer engine against a brute-force dense
//! state-vector replay of the same trials (same seeds, same sampled
//! targets). Compares the zero/nonzero outcome, tr[Ψ], and the Rényi-α
//! entropies for α ∈ {0, 1, 2}.

use stabcut::experiments::benchmarks;
use stabcut::gfp::PrimeModulus;
use stabcut::network::{build_omega, run_trial_recorded};
use stabcut::oracle::replay_trial_dense;

fn main() {
    let p = PrimeModulus::new(2).unwrap();
    let tol = 1e-9;
    for (name, h) in benchmarks() {
        let (layout, omega) = build_omega(&h, p, 1).unwrap();
        let t = h.terminals().len();
        let mut checked = 0u64;
        for i in 0..50 {
            let (result, record) = run_trial_recorded(&layout, &omega, 11, i).unwrap();
            let dense = replay_trial_dense(&layout, &omega, &record).unwrap();
            assert_eq!(result.nonzero, dense.nonzero);
            if !result.nonzero {
                continue;
            }
            let tr = 2f64.powi(-(result.free_count as i32));
            assert!((tr - dense.norm_squared).abs() < tol);
            let e = result.entropies.as_ref().unwrap();
            let de = dense.entropies.as_ref().unwrap();
            for a in 0..(1usize << t) {
                for &dv in &de[a] {
                    assert!((e[a] as f64 - dv).abs() < tol);
                }
            }
            checked += 1;
        }
        println!("{name}: 50 shared-seed trials agree ({checked} nonzero), tolerance {tol:.0e}");
    }
}
