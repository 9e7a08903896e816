use stabcut::hypergraph::WeightedHypergraph;

/// Independent per-subset brute force: m(A) and k(A) by minimizing c(S)
/// over the free choices of the non-terminal vertices only.
pub fn brute_mincut(h: &WeightedHypergraph, a_mask: u64) -> (u64, u64) {
    let n = h.vertex_count();
    let free: Vec<usize> = (0..n).filter(|&v| !h.is_terminal(v)).collect();
    let base: u64 = h
        .terminals()
        .iter()
        .enumerate()
        .filter(|&(t, _)| a_mask & (1 << t) != 0)
        .fold(0, |m, (_, &v)| m | (1 << v));
    let mut best = u64::MAX;
    let mut count = 0;
    for choice in 0..(1u64 << free.len()) {
        let mut s = base;
        for (i, &v) in free.iter().enumerate() {
            if choice & (1 << i) != 0 {
                s |= 1 << v;
            }
        }
        let c = h.cut_value(s).unwrap();
        if c < best {
            best = c;
            count = 1;
        } else if c == best {
            count += 1;
        }
    }
    (best, count)
}
