//! Qudit stabilizer states over GF(p) as phased tableaux: construction,
//! tensor products, rank-based entropies, and projection onto stabilizer
//! states with postselection.
//!
//! A generator is stored as `(s, x, z)` meaning the operator
//! `τ^s X^x Z^z`, with `τ = i` for p = 2 and `τ = ω^{(p+1)/2}` for odd p
//! (so `τ² = ω` in both cases). Phase exponents live mod 4 for p = 2 and
//! mod p for odd p. The multiplication rule is
//! `(s₁,x₁,z₁)·(s₂,x₂,z₂) = (s₁+s₂+2 z₁·x₂, x₁+x₂, z₁+z₂)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfp::{self, FpMatrix, PrimeModulus};

/// Phase exponent modulus: 4 for p = 2 (i-powers), p for odd p (ω-powers
/// through τ, which generates the p-th roots of unity).
pub fn phase_modulus(p: PrimeModulus) -> u64 {
    if p.value() == 2 {
        4
    } else {
        p.value()
    }
}

/// One phased Pauli generator: `τ^phase · X^x Z^z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliRow {
    pub phase: u64,
    pub x: Vec<u64>,
    pub z: Vec<u64>,
}

impl PauliRow {
    pub fn identity(n: usize) -> Self {
        Self { phase: 0, x: vec![0; n], z: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Symplectic (x|z) vector of length 2n.
    pub fn symplectic(&self) -> Vec<u64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.z);
        v
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &Self, p: PrimeModulus) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let pm = phase_modulus(p);
        let d: u64 = self.z.iter().zip(&other.x).map(|(&a, &b)| a * b % p.value()).sum::<u64>()
            % p.value();
        let phase = (self.phase + other.phase + 2 * d) % pm;
        let x = self.x.iter().zip(&other.x).map(|(&a, &b)| p.add(a, b)).collect();
        let z = self.z.iter().zip(&other.z).map(|(&a, &b)| p.add(a, b)).collect();
        Self { phase, x, z }
    }

    /// Group power `self^k` for 0 ≤ k < p, via the closed form
    /// `g^k = (k·s + k(k−1)·(z·x), k·x, k·z)`.
    pub fn pow(&self, k: u64, p: PrimeModulus) -> Self {
        let pm = phase_modulus(p);
        let d: u64 =
            self.z.iter().zip(&self.x).map(|(&a, &b)| a * b % p.value()).sum::<u64>() % p.value();
        let phase = (k * self.phase + k * (k.max(1) - 1) % pm * d) % pm;
        let x = self.x.iter().map(|&a| p.mul(a, k)).collect();
        let z = self.z.iter().map(|&a| p.mul(a, k)).collect();
        Self { phase, x, z }
    }

    /// Whether the phase is consistent with a valid (order-p, Hermitian for
    /// p = 2) stabilizer group element.
    pub fn phase_consistent(&self, p: PrimeModulus) -> bool {
        if p.value() != 2 {
            return self.phase < p.value();
        }
        let d: u64 = self.z.iter().zip(&self.x).map(|(&a, &b)| a * b).sum();
        self.phase % 2 == d % 2
    }

    pub fn symplectic_product(&self, other: &Self, p: PrimeModulus) -> u64 {
        gfp::symplectic_product_unchecked(&self.symplectic(), &other.symplectic(), p)
    }
}

/// A pure stabilizer state on `n` qudits of prime dimension `p`,
/// represented by n independent, pairwise commuting phased generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    p: PrimeModulus,
    rows: Vec<PauliRow>,
}

/// Outcome of projecting qudits onto a target stabilizer state and
/// tracing them out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectionOutcome {
    /// Postselected state on the remaining qudits, and the number of
    /// measurements with uniformly random outcome; `tr[Ψ] = p^{−f}`.
    State { state: StabilizerTableau, free_count: u64 },
    /// Some deterministic outcome was phase-inconsistent; `tr[Ψ] = 0`.
    Zero,
}

impl ProjectionOutcome {
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }
}

impl StabilizerTableau {
    /// Build from explicit generators; validates commutation, rank, and
    /// phase consistency.
    pub fn new(n: usize, p: PrimeModulus, rows: Vec<PauliRow>) -> Result<Self> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invariant(format!("need {n} generators on {n} qudits")));
        }
        let t = Self { n, p, rows };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let pm = phase_modulus(self.p);
        for (i, a) in self.rows.iter().enumerate() {
            if a.phase >= pm {
                return Err(Error::Invariant("phase exponent out of range".into()));
            }
            if !a.phase_consistent(self.p) {
                return Err(Error::Invariant(format!("generator {i} is not Hermitian-consistent")));
            }
            for b in &self.rows[i + 1..] {
                if a.symplectic_product(b, self.p) != 0 {
                    return Err(Error::Invariant("generators do not commute".into()));
                }
            }
        }
        if self.generator_matrix().rank(self.p) != self.n {
            return Err(Error::Invariant("generator matrix is rank-deficient".into()));
        }
        Ok(())
    }

    pub fn qudits(&self) -> usize {
        self.n
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn rows(&self) -> &[PauliRow] {
        &self.rows
    }

    /// n × 2n check matrix in (x|z) column convention.
    pub fn generator_matrix(&self) -> FpMatrix {
        FpMatrix::from_rows(self.rows.iter().map(PauliRow::symplectic).collect())
            .expect("rectangular")
    }

    /// GHZ state `(1/√p) Σ_i |i⟩^{⊗k}`: generators `X^{⊗k}` and
    /// `Z_j Z_{j+1}^{−1}` for j = 1..k−1, all phases trivial.
    pub fn ghz(parties: usize, p: PrimeModulus) -> Self {
        assert!(parties >= 1);
        let mut rows = Vec::with_capacity(parties);
        rows.push(PauliRow { phase: 0, x: vec![1; parties], z: vec![0; parties] });
        for j in 0..parties - 1 {
            let mut z = vec![0; parties];
            z[j] = 1;
            z[j + 1] = p.value() - 1;
            rows.push(PauliRow { phase: 0, x: vec![0; parties], z });
        }
        Self { n: parties, p, rows }
    }

    /// The empty tableau (n = 0), the identity of [`Self::tensor`].
    pub fn empty(p: PrimeModulus) -> Self {
        Self { n: 0, p, rows: vec![] }
    }

    /// Block-direct-sum tensor product.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::Input("tensor of tableaux over different primes".into()));
        }
        let n = self.n + other.n;
        let mut rows = Vec::with_capacity(n);
        for r in &self.rows {
            let mut x = r.x.clone();
            x.resize(n, 0);
            let mut z = r.z.clone();
            z.resize(n, 0);
            rows.push(PauliRow { phase: r.phase, x, z });
        }
        for r in &other.rows {
            let mut x = vec![0; self.n];
            x.extend_from_slice(&r.x);
            let mut z = vec![0; self.n];
            z.extend_from_slice(&r.z);
            rows.push(PauliRow { phase: r.phase, x, z });
        }
        Ok(Self { n, p: self.p, rows })
    }

    /// Rényi entropy of the reduced state on `sites`, as an exact integer
    /// in units of log p. Stabilizer reduced states have flat spectrum, so
    /// all orders α coincide:
    /// `S(ρ_A)/log p = |A| − n + rank(generators restricted to sites ∉ A)`.
    pub fn reduced_entropy(&self, sites: &[usize]) -> Result<u64> {
        let mut in_a = vec![false; self.n];
        for &s in sites {
            if s >= self.n {
                return Err(Error::Input(format!("site {s} out of range for n = {}", self.n)));
            }
            in_a[s] = true;
        }
        let a = in_a.iter().filter(|&&b| b).count();
        let outside: Vec<usize> = (0..self.n).filter(|&i| !in_a[i]).collect();
        let restricted = FpMatrix::from_rows(
            self.rows
                .iter()
                .map(|r| {
                    let mut v: Vec<u64> = outside.iter().map(|&i| r.x[i]).collect();
                    v.extend(outside.iter().map(|&i| r.z[i]));
                    v
                })
                .collect(),
        )
        .expect("rectangular");
        let rank = restricted.rank(self.p);
        Ok((a + rank - self.n) as u64)
    }

    /// Measure one phased generator `g` (given on the full register) and
    /// postselect the outcome encoded by g's phase. Returns `false` if the
    /// postselected branch has probability zero; on a random outcome the
    /// free counter is incremented.
    fn measure_postselect(&mut self, g: &PauliRow, free_count: &mut u64) -> bool {
        let p = self.p;
        let products: Vec<u64> = self.rows.iter().map(|r| r.symplectic_product(g, p)).collect();
        if let Some(pivot) = products.iter().position(|&d| d != 0) {
            // Random outcome, postselected branch kept with probability 1/p.
            let d_pivot = products[pivot];
            let inv = p.inv(d_pivot);
            for j in 0..self.rows.len() {
                if j != pivot && products[j] != 0 {
                    let alpha = p.mul(p.neg(products[j]), inv);
                    let factor = self.rows[pivot].pow(alpha, p);
                    self.rows[j] = self.rows[j].mul(&factor, p);
                }
            }
            self.rows[pivot] = g.clone();
            *free_count += 1;
            true
        } else {
            // g commutes with the full group, so its symplectic vector lies
            // in the (Lagrangian) row span: the outcome is deterministic.
            let matrix_t = FpMatrix::from_rows({
                // columns = generator symplectic vectors
                let rows: Vec<Vec<u64>> = (0..2 * self.n)
                    .map(|c| self.rows.iter().map(|r| r.symplectic()[c]).collect())
                    .collect();
                rows
            })
            .expect("rectangular");
            let coeffs = matrix_t
                .solve(&g.symplectic(), p)
                .expect("dimensions agree")
                .expect("commuting operator lies in the stabilizer span");
            let mut prod = PauliRow::identity(self.n);
            for (c, row) in coeffs.iter().zip(&self.rows) {
                if *c != 0 {
                    prod = prod.mul(&row.pow(*c, p), p);
                }
            }
            prod.phase == g.phase
        }
    }

    /// Project the qudits in `sites` onto the stabilizer state `target`
    /// (postselecting every generator of its stabilizer group) and trace
    /// them out. Postselection is deterministic: the only randomness in a
    /// trial enters through the upstream choice of target states.
    pub fn project_onto_stabilizer(
        &self,
        sites: &[usize],
        target: &StabilizerTableau,
    ) -> Result<ProjectionOutcome> {
        if target.p != self.p {
            return Err(Error::Input("projection target over a different prime".into()));
        }
        if sites.len() != target.n {
            return Err(Error::Input(format!(
                "target has {} qudits but {} sites were given",
                target.n,
                sites.len()
            )));
        }
        let mut seen = vec![false; self.n];
        for &s in sites {
            if s >= self.n || seen[s] {
                return Err(Error::Input(format!("bad site index {s}")));
            }
            seen[s] = true;
        }
        let mut state = self.clone();
        let mut free_count = 0;
        for g in &target.rows {
            let mut x = vec![0; self.n];
            let mut z = vec![0; self.n];
            for (k, &s) in sites.iter().enumerate() {
                x[s] = g.x[k];
                z[s] = g.z[k];
            }
            let embedded = PauliRow { phase: g.phase, x, z };
            if !state.measure_postselect(&embedded, &mut free_count) {
                return Ok(ProjectionOutcome::Zero);
            }
        }
        Ok(ProjectionOutcome::State { state: state.trace_out_product_sites(sites), free_count })
    }

    /// Trace out qudits that are in a product state with the rest: keep the
    /// group elements supported entirely outside `sites`. Used after
    /// projection, when the state factorizes by construction.
    fn trace_out_product_sites(&self, sites: &[usize]) -> StabilizerTableau {
        let p = self.p;
        let mut in_sites = vec![false; self.n];
        for &s in sites {
            in_sites[s] = true;
        }
        let site_cols: Vec<(usize, bool)> = sites
            .iter()
            .flat_map(|&s| [(s, false), (s, true)])
            .collect();
        let entry = |r: &PauliRow, col: &(usize, bool)| if col.1 { r.z[col.0] } else { r.x[col.0] };
        let mut rows = self.rows.clone();
        let mut pivot_row = 0;
        for col in &site_cols {
            let Some(r) = (pivot_row..rows.len()).find(|&r| entry(&rows[r], col) != 0) else {
                continue;
            };
            rows.swap(pivot_row, r);
            let scale = p.inv(entry(&rows[pivot_row], col));
            rows[pivot_row] = rows[pivot_row].pow(scale, p);
            for j in 0..rows.len() {
                if j != pivot_row && entry(&rows[j], col) != 0 {
                    let alpha = p.mul(p.neg(entry(&rows[j], col)), p.inv(entry(&rows[pivot_row], col)));
                    let factor = rows[pivot_row].pow(alpha, p);
                    rows[j] = rows[j].mul(&factor, p);
                }
            }
            pivot_row += 1;
        }
        debug_assert_eq!(pivot_row, sites.len(), "state does not factorize over the sites");
        let remaining: Vec<usize> = (0..self.n).filter(|&i| !in_sites[i]).collect();
        let kept = rows[pivot_row..]
            .iter()
            .map(|r| PauliRow {
                phase: r.phase,
                x: remaining.iter().map(|&i| r.x[i]).collect(),
                z: remaining.iter().map(|&i| r.z[i]).collect(),
            })
            .collect();
        StabilizerTableau { n: remaining.len(), p, rows: kept }
    }

    /// Uniformly random pure stabilizer state: a random Lagrangian with
    /// independent uniform phases on its generators.
    pub fn random<R: Rng + ?Sized>(m: usize, p: PrimeModulus, rng: &mut R) -> Self {
        assert!(m >= 1);
        let lagrangian = gfp::random_lagrangian(m, p, rng);
        let rows = (0..m)
            .map(|i| {
                let row = lagrangian.row(i);
                let x: Vec<u64> = row[..m].to_vec();
                let z: Vec<u64> = row[m..].to_vec();
                let phase = if p.value() == 2 {
                    let d: u64 = x.iter().zip(&z).map(|(&a, &b)| a * b).sum();
                    (d % 2) + 2 * rng.gen_range(0..2)
                } else {
                    rng.gen_range(0..p.value())
                };
                PauliRow { phase, x, z }
            })
            .collect();
        Self { n: m, p, rows }
    }

    /// Canonical key identifying the state: phased reduced row echelon
    /// form of the tableau. Two tableaux describe the same state iff their
    /// keys agree.
    pub fn canonical_key(&self) -> Vec<u64> {
        let p = self.p;
        let mut rows = self.rows.clone();
        let n = self.n;
        let entry = |r: &PauliRow, col: usize| if col < n { r.x[col] } else { r.z[col - n] };
        let mut pivot_row = 0;
        for col in 0..2 * n {
            let Some(r) = (pivot_row..rows.len()).find(|&r| entry(&rows[r], col) != 0) else {
                continue;
            };
            rows.swap(pivot_row, r);
            let scale = p.inv(entry(&rows[pivot_row], col));
            rows[pivot_row] = rows[pivot_row].pow(scale, p);
            for j in 0..rows.len() {
                if j != pivot_row && entry(&rows[j], col) != 0 {
                    let alpha = p.mul(p.neg(entry(&rows[j], col)), 1);
                    let factor = rows[pivot_row].pow(alpha, p);
                    rows[j] = rows[j].mul(&factor, p);
                }
            }
            pivot_row += 1;
        }
        rows.iter()
            .flat_map(|r| {
                let mut v = vec![r.phase];
                v.extend(&r.x);
                v.extend(&r.z);
                v
            })
            .collect()
    }
}
