//! Linear algebra over the prime field GF(p) and sampling of random
//! symplectic / Lagrangian structures.
//!
//! Vectors of length `2m` use the `(x|z)` split convention: entries
//! `0..m` are the x-part and `m..2m` the z-part. The symplectic form is
//! `⟨u,v⟩ = u_x·v_z − u_z·v_x (mod p)`.

use rand::Rng;

use crate::error::{Error, Result};

/// A prime modulus for all GF(p) arithmetic. Primality is checked at
/// construction; anything small enough for `u64` arithmetic works, the
/// interesting cases being 2, 3, 5, 7.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct PrimeModulus {
    p: u64,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || !is_prime(p) {
            return Err(Error::Input(format!("{p} is not a prime")));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.p;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    /// A uniformly random residue.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix with entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Input("ragged rows in matrix".into()));
        }
        let nrows = rows.len();
        Ok(Self { rows: nrows, cols, data: rows.into_iter().flatten().collect() })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    /// Rank over GF(p); the input is not modified.
    pub fn rank(&self, p: PrimeModulus) -> usize {
        let mut m = self.clone();
        m.row_reduce(p)
    }

    /// Reduced row echelon form over GF(p). Returns the rank.
    pub fn row_reduce(&mut self, p: PrimeModulus) -> usize {
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(pivot_row, r);
            let inv = p.inv(self.get(pivot_row, col));
            for j in 0..self.cols {
                let v = p.mul(self.get(pivot_row, j), inv);
                self.set(pivot_row, j, v);
            }
            for r2 in 0..self.rows {
                if r2 != pivot_row && self.get(r2, col) != 0 {
                    let factor = self.get(r2, col);
                    for j in 0..self.cols {
                        let v = p.sub(self.get(r2, j), p.mul(factor, self.get(pivot_row, j)));
                        self.set(r2, j, v);
                    }
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let t = self.get(a, j);
            self.set(a, j, self.get(b, j));
            self.set(b, j, t);
        }
    }

    /// Solve `self · x = rhs` over GF(p). Returns one solution if any exists.
    pub fn solve(&self, rhs: &[u64], p: PrimeModulus) -> Result<Option<Vec<u64>>> {
        if rhs.len() != self.rows {
            return Err(Error::Input("rhs length does not match row count".into()));
        }
        // Augmented elimination.
        let mut aug = FpMatrix::zeros(self.rows, self.cols + 1);
        for (i, &r) in rhs.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, r % p.value());
        }
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == aug.rows {
                break;
            }
            let Some(r) = (pivot_row..aug.rows).find(|&r| aug.get(r, col) != 0) else {
                continue;
            };
            aug.swap_rows(pivot_row, r);
            let inv = p.inv(aug.get(pivot_row, col));
            for j in 0..=self.cols {
                let v = p.mul(aug.get(pivot_row, j), inv);
                aug.set(pivot_row, j, v);
            }
            for r2 in 0..aug.rows {
                if r2 != pivot_row && aug.get(r2, col) != 0 {
                    let factor = aug.get(r2, col);
                    for j in 0..=self.cols {
                        let v = p.sub(aug.get(r2, j), p.mul(factor, aug.get(pivot_row, j)));
                        aug.set(r2, j, v);
                    }
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // Inconsistent system: a zero row with nonzero rhs.
        for r in pivot_row..aug.rows {
            if aug.get(r, self.cols) != 0 {
                return Ok(None);
            }
        }
        let mut x = vec![0; self.cols];
        for &(r, c) in &pivots {
            x[c] = aug.get(r, self.cols);
        }
        Ok(Some(x))
    }
}

/// Symplectic product `⟨u,v⟩ = u_x·v_z − u_z·v_x (mod p)` with the (x|z)
/// split convention. Two generalized Pauli operators commute up to phase
/// iff this vanishes.
pub fn symplectic_product(u: &[u64], v: &[u64], p: PrimeModulus) -> Result<u64> {
    if u.len() != v.len() || !u.len().is_multiple_of(2) {
        return Err(Error::Input(format!(
            "symplectic product needs equal even lengths, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(symplectic_product_unchecked(u, v, p))
}

#[inline]
pub(crate) fn symplectic_product_unchecked(u: &[u64], v: &[u64], p: PrimeModulus) -> u64 {
    let m = u.len() / 2;
    let mut acc = 0u64;
    for i in 0..m {
        acc = p.add(acc, p.mul(u[i], v[m + i]));
        acc = p.sub(acc, p.mul(u[m + i], v[i]));
    }
    acc
}

/// Symplectic transvection `x ↦ x + c⟨x,h⟩h`.
#[derive(Clone, Debug)]
struct Transvection {
    c: u64,
    h: Vec<u64>,
}

impl Transvection {
    fn apply(&self, v: &[u64], p: PrimeModulus) -> Vec<u64> {
        let s = p.mul(self.c, symplectic_product_unchecked(v, &self.h, p));
        v.iter().zip(&self.h).map(|(&a, &b)| p.add(a, p.mul(s, b))).collect()
    }
}

fn unit_vector(len: usize, idx: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    v[idx] = 1;
    v
}

fn add_vec(a: &[u64], b: &[u64], p: PrimeModulus) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| p.add(x, y)).collect()
}

fn sub_vec(a: &[u64], b: &[u64], p: PrimeModulus) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| p.sub(x, y)).collect()
}

/// A single transvection mapping `u` to `v`, valid when `⟨u,v⟩ ≠ 0`.
fn direct_transvection(u: &[u64], v: &[u64], p: PrimeModulus) -> Transvection {
    let s = symplectic_product_unchecked(u, v, p);
    debug_assert!(s != 0);
    Transvection { c: p.inv(s), h: sub_vec(v, u, p) }
}

/// Transvections (at most two) whose composition maps `u` to `v`.
/// Both vectors must be nonzero.
fn transvections_mapping(u: &[u64], v: &[u64], p: PrimeModulus) -> Vec<Transvection> {
    if u == v {
        return vec![];
    }
    if symplectic_product_unchecked(u, v, p) != 0 {
        return vec![direct_transvection(u, v, p)];
    }
    // ⟨u,v⟩ = 0: go through an intermediate z with ⟨u,z⟩ ≠ 0 ≠ ⟨z,v⟩.
    let m = u.len() / 2;
    let site_pair = |w: &[u64], i: usize| (w[i], w[m + i]);
    let mut z = vec![0; u.len()];
    let common = (0..m).find(|&i| site_pair(u, i) != (0, 0) && site_pair(v, i) != (0, 0));
    if let Some(i) = common {
        // One site where both are nonzero: pick (a,b) off both kernel lines.
        'outer: for a in 0..p.value() {
            for b in 0..p.value() {
                let su = p.sub(p.mul(u[i], b), p.mul(u[m + i], a));
                let sv = p.sub(p.mul(v[i], b), p.mul(v[m + i], a));
                if su != 0 && sv != 0 {
                    z[i] = a;
                    z[m + i] = b;
                    break 'outer;
                }
            }
        }
    } else {
        // Disjoint supports: fix each product on its own site.
        let i = (0..m).find(|&i| site_pair(u, i) != (0, 0)).expect("u nonzero");
        let j = (0..m).find(|&j| site_pair(v, j) != (0, 0)).expect("v nonzero");
        'site_i: for a in 0..p.value() {
            for b in 0..p.value() {
                if p.sub(p.mul(u[i], b), p.mul(u[m + i], a)) != 0 {
                    z[i] = a;
                    z[m + i] = b;
                    break 'site_i;
                }
            }
        }
        'site_j: for a in 0..p.value() {
            for b in 0..p.value() {
                if p.sub(p.mul(v[j], b), p.mul(v[m + j], a)) != 0 {
                    z[j] = a;
                    z[m + j] = b;
                    break 'site_j;
                }
            }
        }
    }
    debug_assert!(symplectic_product_unchecked(u, &z, p) != 0);
    debug_assert!(symplectic_product_unchecked(&z, v, p) != 0);
    vec![direct_transvection(u, &z, p), direct_transvection(&z, v, p)]
}

/// Images `(v_i, w_i)` of the standard hyperbolic basis `(e_i, f_i)` under
/// a uniformly random element of Sp(2m, p), sampled by composing symplectic
/// transvections: at each level the image of `e_1` is a uniform nonzero
/// vector and the image of `f_1` is uniform over its symplectic partners,
/// then the construction recurses on the complement.
pub fn random_symplectic_basis<R: Rng + ?Sized>(
    m: usize,
    p: PrimeModulus,
    rng: &mut R,
) -> Vec<(Vec<u64>, Vec<u64>)> {
    if m == 0 {
        return vec![];
    }
    let dim = 2 * m;
    let inner = random_symplectic_basis(m - 1, p, rng);
    // Embed the inner images into sites 1..m (site 0 is the fresh pair).
    let embed = |w: &[u64]| -> Vec<u64> {
        let mut out = vec![0; dim];
        let im = m - 1;
        for i in 0..im {
            out[1 + i] = w[i];
            out[m + 1 + i] = w[im + i];
        }
        out
    };

    // Uniform nonzero v = image of e_1.
    let v: Vec<u64> = loop {
        let cand: Vec<u64> = (0..dim).map(|_| p.sample(rng)).collect();
        if cand.iter().any(|&x| x != 0) {
            break cand;
        }
    };
    let e0 = unit_vector(dim, 0);
    let f0 = unit_vector(dim, m);
    let t1 = transvections_mapping(&e0, &v, p);

    // Image of f_1 is T1(f_1 + c·e_1 + u) with c, u uniform; u lives on
    // sites 1..m. The inner map M2 fixes e_1 and sends f_1 to that vector.
    let c = p.sample(rng);
    let mut u = vec![0; dim];
    for i in 1..m {
        u[i] = p.sample(rng);
        u[m + i] = p.sample(rng);
    }
    let mut step: Vec<Transvection> = Vec::new();
    if c != 0 {
        let mut h = u.clone();
        h[0] = c;
        step.push(Transvection { c: p.neg(p.inv(c)), h });
    } else if u.iter().any(|&x| x != 0) {
        // f_1 → f_1 + u via the intermediate z = f_1 + u + e_1; both
        // transvection directions are symplectically orthogonal to e_1.
        let fu = add_vec(&f0, &u, p);
        let z = add_vec(&fu, &e0, p);
        step.push(direct_transvection(&f0, &z, p));
        step.push(direct_transvection(&z, &fu, p));
    }
    step.extend(t1);

    let apply_step = |w: &[u64]| -> Vec<u64> {
        let mut out = w.to_vec();
        for t in &step {
            out = t.apply(&out, p);
        }
        out
    };

    let mut pairs = Vec::with_capacity(m);
    pairs.push((apply_step(&e0), apply_step(&f0)));
    for (x, z) in &inner {
        pairs.push((apply_step(&embed(x)), apply_step(&embed(z))));
    }
    pairs
}

/// Basis of a uniformly random Lagrangian (maximal isotropic) subspace of
/// GF(p)^{2m}, as an m × 2m matrix of pairwise symplectically orthogonal
/// rows of rank m. This is the image of the standard all-Z Lagrangian
/// under a uniformly random symplectic matrix.
pub fn random_lagrangian<R: Rng + ?Sized>(m: usize, p: PrimeModulus, rng: &mut R) -> FpMatrix {
    let basis = random_symplectic_basis(m, p, rng);
    FpMatrix::from_rows(basis.into_iter().map(|(_, w)| w).collect()).expect("rectangular")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeModulus::new(4).is_err());
        assert!(PrimeModulus::new(1).is_err());
        assert!(PrimeModulus::new(0).is_err());
        for q in [2, 3, 5, 7, 11] {
            assert!(PrimeModulus::new(q).is_ok());
        }
    }

    #[test]
    fn rank_identity_and_zero() {
        let id = FpMatrix::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
        ])
        .unwrap();
        assert_eq!(id.rank(p(2)), 3);
        assert_eq!(FpMatrix::zeros(3, 4).rank(p(5)), 0);
    }

    #[test]
    fn rank_dependent_rows_mod_3() {
        // row 2 = 2 · row 1 (mod 3)
        let m = FpMatrix::from_rows(vec![vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(m.rank(p(3)), 1);
    }

    #[test]
    fn rank_invariant_under_shuffle_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &q in &[2u64, 3, 5] {
            let pm = p(q);
            for _ in 0..50 {
                let rows: Vec<Vec<u64>> =
                    (0..4).map(|_| (0..6).map(|_| pm.sample(&mut rng)).collect()).collect();
                let m = FpMatrix::from_rows(rows.clone()).unwrap();
                let r = m.rank(pm);
                let mut shuffled = rows.clone();
                shuffled.reverse();
                for row in shuffled.iter_mut() {
                    let s = 1 + pm.sample(&mut rng) % (q - 1).max(1);
                    for x in row.iter_mut() {
                        *x = pm.mul(*x, s);
                    }
                }
                assert_eq!(FpMatrix::from_rows(shuffled).unwrap().rank(pm), r);
            }
        }
    }

    #[test]
    fn symplectic_product_basics() {
        // X and Z on the same site anticommute.
        assert_eq!(symplectic_product(&[1, 0, 0, 0], &[0, 0, 1, 0], p(2)).unwrap(), 1);
        // Self-orthogonality.
        assert_eq!(symplectic_product(&[1, 2, 1, 0], &[1, 2, 1, 0], p(3)).unwrap(), 0);
        // Disjoint support commutes.
        assert_eq!(symplectic_product(&[1, 0, 0, 0], &[0, 0, 0, 1], p(3)).unwrap(), 0);
        assert!(symplectic_product(&[1, 0], &[1, 0, 0, 0], p(2)).is_err());
        assert!(symplectic_product(&[1, 0, 0], &[0, 1, 0], p(2)).is_err());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = FpMatrix::from_rows(vec![vec![1, 1], vec![0, 1], vec![1, 0]]).unwrap();
        let x = m.solve(&[0, 1, 2], p(3)).unwrap().unwrap();
        assert_eq!(x, vec![2, 1]);
        let m2 = FpMatrix::from_rows(vec![vec![1, 1], vec![2, 2]]).unwrap();
        assert!(m2.solve(&[1, 1], p(3)).unwrap().is_none());
    }

    #[test]
    fn symplectic_basis_is_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &q in &[2u64, 3, 5] {
            let pm = p(q);
            for m in 1..=4 {
                for _ in 0..40 {
                    let basis = random_symplectic_basis(m, pm, &mut rng);
                    for i in 0..m {
                        for j in 0..m {
                            let (vi, wi) = (&basis[i].0, &basis[i].1);
                            let (vj, wj) = (&basis[j].0, &basis[j].1);
                            assert_eq!(symplectic_product_unchecked(vi, vj, pm), 0);
                            assert_eq!(symplectic_product_unchecked(wi, wj, pm), 0);
                            let expect = u64::from(i == j);
                            assert_eq!(symplectic_product_unchecked(vi, wj, pm), expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lagrangian_isotropic_full_rank() {
        // Property over many seeds: isotropy and rank m, for m ≤ 4 and p ∈ {2,3,5}.
        for &q in &[2u64, 3, 5] {
            let pm = p(q);
            for m in 1..=4 {
                for seed in 0..(1000 / (m as u64 * q)).max(40) {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let l = random_lagrangian(m, pm, &mut rng);
                    assert_eq!(l.rank(pm), m);
                    for i in 0..m {
                        for j in 0..m {
                            assert_eq!(
                                symplectic_product_unchecked(l.row(i), l.row(j), pm),
                                0
                            );
                        }
                    }
                }
            }
        }
    }

    fn lagrangian_key(mut l: FpMatrix, pm: PrimeModulus) -> Vec<u64> {
        l.row_reduce(pm);
        (0..l.nrows()).flat_map(|i| l.row(i).to_vec()).collect()
    }

    #[test]
    fn lagrangian_uniform_m1_p2() {
        // p+1 = 3 Lagrangians for m=1: ⟨Z⟩, ⟨X⟩, ⟨XZ⟩.
        let pm = p(2);
        let mut counts = std::collections::HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 30_000;
        for _ in 0..n {
            *counts.entry(lagrangian_key(random_lagrangian(1, pm, &mut rng), pm)).or_insert(0u64) +=
                1;
        }
        assert_eq!(counts.len(), 3);
        chi_square_uniform(&counts, n);
    }

    #[test]
    fn lagrangian_uniform_m2_p2() {
        // ∏_{i=1..2}(2^i + 1) = 15 Lagrangians.
        let pm = p(2);
        let mut counts = std::collections::HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 100_000;
        for _ in 0..n {
            *counts.entry(lagrangian_key(random_lagrangian(2, pm, &mut rng), pm)).or_insert(0u64) +=
                1;
        }
        assert_eq!(counts.len(), 15);
        chi_square_uniform(&counts, n);
    }

    #[test]
    fn lagrangian_uniform_m1_p3() {
        // p+1 = 4 Lagrangians for m=1, p=3.
        let pm = p(3);
        let mut counts = std::collections::HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let n = 40_000;
        for _ in 0..n {
            *counts.entry(lagrangian_key(random_lagrangian(1, pm, &mut rng), pm)).or_insert(0u64) +=
                1;
        }
        assert_eq!(counts.len(), 4);
        chi_square_uniform(&counts, n);
    }

    fn chi_square_uniform(counts: &std::collections::HashMap<Vec<u64>, u64>, n: u64) {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let k = counts.len() as f64;
        let expected = n as f64 / k;
        let stat: f64 =
            counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let crit = ChiSquared::new(k - 1.0).unwrap().inverse_cdf(0.999);
        assert!(stat < crit, "chi-square {stat} exceeds critical value {crit}");
        // Per-cell 3σ check on top of the aggregate statistic.
        let sigma = (n as f64 * (1.0 / k) * (1.0 - 1.0 / k)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() <= 3.5 * sigma);
        }
    }
}
