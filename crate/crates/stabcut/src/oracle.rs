//! Dense state-vector oracle for cross-validating the stabilizer engine on
//! tiny instances. Everything here is brute force by design.
//!
//! Basis indices encode qudit values with site 0 as the most significant
//! base-p digit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gfp::PrimeModulus;
use crate::stabilizer::{PauliRow, StabilizerTableau};

/// Dimension bound `p^n ≤ 2^20` for dense conversion.
pub const DENSE_DIM_BOUND: u64 = 1 << 20;

/// An (possibly unnormalized) complex amplitude vector on `n` qudits of
/// dimension `p`.
#[derive(Clone, Debug)]
pub struct DenseState {
    pub n: usize,
    pub p: PrimeModulus,
    pub amps: Vec<Complex64>,
}

fn tau(p: PrimeModulus) -> Complex64 {
    if p.value() == 2 {
        Complex64::new(0.0, 1.0)
    } else {
        // ω^{(p+1)/2}, a primitive p-th root of unity with τ² = ω.
        let angle = std::f64::consts::PI * (p.value() + 1) as f64 / p.value() as f64;
        Complex64::from_polar(1.0, angle)
    }
}

fn omega(p: PrimeModulus) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p.value() as f64)
}

impl DenseState {
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Digits of a basis index, site 0 first.
    pub fn digits(&self, mut idx: usize) -> Vec<u64> {
        let p = self.p.value() as usize;
        let mut d = vec![0u64; self.n];
        for s in (0..self.n).rev() {
            d[s] = (idx % p) as u64;
            idx /= p;
        }
        d
    }

    fn index(p: u64, digits: &[u64]) -> usize {
        digits.iter().fold(0usize, |acc, &d| acc * p as usize + d as usize)
    }

    /// Apply the phased Pauli `τ^s X^x Z^z`: `(gψ)[j] = τ^s ω^{z·(j−x)} ψ[j−x]`.
    pub fn apply_pauli(&self, row: &PauliRow) -> DenseState {
        let p = self.p.value();
        let t = tau(self.p);
        let w = omega(self.p);
        let phase = t.powu(row.phase as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, slot) in out.iter_mut().enumerate() {
            let dj = self.digits(j);
            let src: Vec<u64> = dj.iter().zip(&row.x).map(|(&d, &x)| (d + p - x) % p).collect();
            let zdot: u64 = src.iter().zip(&row.z).map(|(&d, &z)| d * z % p).sum::<u64>() % p;
            *slot = phase * w.powu(zdot as u32) * self.amps[Self::index(p, &src)];
        }
        DenseState { n: self.n, p: self.p, amps: out }
    }
}

/// The unique unit vector (up to global phase) stabilized by all generators
/// of the tableau with their phases, found by projecting basis vectors onto
/// the simultaneous eigenspace.
pub fn tableau_to_vector(t: &StabilizerTableau) -> Result<DenseState> {
    let p = t.prime().value();
    let dim = p.checked_pow(t.qudits() as u32).filter(|&d| d <= DENSE_DIM_BOUND).ok_or_else(
        || Error::Capacity(format!("p^n exceeds dense bound {DENSE_DIM_BOUND}")),
    )? as usize;
    t.validate()?;
    for start in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[start] = Complex64::new(1.0, 0.0);
        let mut state = DenseState { n: t.qudits(), p: t.prime(), amps };
        for row in t.rows() {
            // (1/p) Σ_k g^k ψ
            let mut acc = state.clone();
            let mut powered = state.clone();
            for _ in 1..p {
                powered = powered.apply_pauli(row);
                for (a, b) in acc.amps.iter_mut().zip(&powered.amps) {
                    *a += b;
                }
            }
            for a in acc.amps.iter_mut() {
                *a /= p as f64;
            }
            state = acc;
        }
        let nrm = state.norm_squared().sqrt();
        if nrm > 1e-6 {
            for a in state.amps.iter_mut() {
                *a /= nrm;
            }
            return Ok(state);
        }
    }
    Err(Error::Invariant("tableau has no stabilized vector".into()))
}

/// Contract `⟨target|` against the given sites, returning the unnormalized
/// vector on the remaining sites.
pub fn dense_project(state: &DenseState, sites: &[usize], target: &DenseState) -> Result<DenseState> {
    if target.p != state.p || sites.len() != target.n {
        return Err(Error::Input("dense projection dimension mismatch".into()));
    }
    let p = state.p.value();
    let mut in_sites = vec![false; state.n];
    for &s in sites {
        if s >= state.n || in_sites[s] {
            return Err(Error::Input(format!("bad site index {s}")));
        }
        in_sites[s] = true;
    }
    let rest: Vec<usize> = (0..state.n).filter(|&i| !in_sites[i]).collect();
    let rest_dim = (p as usize).pow(rest.len() as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); rest_dim];
    for j in 0..state.amps.len() {
        let dj = state.digits(j);
        let site_digits: Vec<u64> = sites.iter().map(|&s| dj[s]).collect();
        let rest_digits: Vec<u64> = rest.iter().map(|&s| dj[s]).collect();
        let ti = DenseState::index(p, &site_digits);
        let ri = DenseState::index(p, &rest_digits);
        out[ri] += target.amps[ti].conj() * state.amps[j];
    }
    Ok(DenseState { n: rest.len(), p: state.p, amps: out })
}

/// Rényi-α entropy (α ∈ {0, 1, 2}) of the reduced state on `sites`, in
/// units of log p. The state is normalized first; eigenvalues below 1e-10
/// do not count towards the rank.
pub fn dense_entropy(state: &DenseState, sites: &[usize], alpha: u32) -> Result<f64> {
    if alpha > 2 {
        return Err(Error::Input(format!("unsupported entropy order {alpha}")));
    }
    let nrm2 = state.norm_squared();
    if nrm2 < 1e-24 {
        return Err(Error::UndefinedEntropy("zero vector".into()));
    }
    let p = state.p.value();
    let mut in_a = vec![false; state.n];
    for &s in sites {
        if s >= state.n {
            return Err(Error::Input(format!("site {s} out of range")));
        }
        in_a[s] = true;
    }
    let a_sites: Vec<usize> = (0..state.n).filter(|&i| in_a[i]).collect();
    let b_sites: Vec<usize> = (0..state.n).filter(|&i| !in_a[i]).collect();
    let da = (p as usize).pow(a_sites.len() as u32);
    let db = (p as usize).pow(b_sites.len() as u32);
    let scale = nrm2.sqrt();
    let mut m = DMatrix::<Complex64>::zeros(da, db);
    for j in 0..state.amps.len() {
        let dj = state.digits(j);
        let ia = DenseState::index(p, &a_sites.iter().map(|&s| dj[s]).collect::<Vec<_>>());
        let ib = DenseState::index(p, &b_sites.iter().map(|&s| dj[s]).collect::<Vec<_>>());
        m[(ia, ib)] = state.amps[j] / scale;
    }
    // Work with the smaller Gram matrix; its nonzero spectrum matches ρ_A.
    let gram = if da <= db { &m * m.adjoint() } else { m.adjoint() * &m };
    let eigen = gram.symmetric_eigen();
    let lambdas: Vec<f64> = eigen.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let log_p = (p as f64).ln();
    let s = match alpha {
        0 => (lambdas.iter().filter(|&&l| l > 1e-10).count() as f64).ln(),
        1 => -lambdas.iter().filter(|&&l| l > 1e-18).map(|&l| l * l.ln()).sum::<f64>(),
        _ => -lambdas.iter().map(|&l| l * l).sum::<f64>().ln(),
    };
    Ok(s / log_p)
}

/// Outcome of replaying a recorded trial in the dense engine.
#[derive(Clone, Debug)]
pub struct DenseReplay {
    pub nonzero: bool,
    /// Squared norm of the final unnormalized vector; equals tr[Ψ].
    pub norm_squared: f64,
    /// `[S_0, S_1, S_2]` per terminal-subset mask, in units of log p;
    /// present only when nonzero.
    pub entropies: Option<Vec<[f64; 3]>>,
}

/// Replay the recorded projection sequence of a trial brute-force: convert
/// Ω and every sampled target to dense vectors, contract them in order,
/// then take Rényi entropies of the survivor. The record comes from
/// [`crate::network::run_trial_recorded`].
pub fn replay_trial_dense(
    layout: &crate::network::NetworkLayout,
    omega: &StabilizerTableau,
    record: &[(usize, Vec<usize>, StabilizerTableau)],
) -> Result<DenseReplay> {
    let mut state = tableau_to_vector(omega)?;
    let mut alive: Vec<usize> = (0..layout.total_qudits).collect();
    for (_, group, target) in record {
        let positions: Vec<usize> = group
            .iter()
            .map(|id| alive.binary_search(id).expect("projected qudit still alive"))
            .collect();
        state = dense_project(&state, &positions, &tableau_to_vector(target)?)?;
        alive.retain(|id| !group.contains(id));
    }
    let norm_squared = state.norm_squared();
    if norm_squared < 1e-18 {
        return Ok(DenseReplay { nonzero: false, norm_squared, entropies: None });
    }
    let t = layout.hypergraph.terminals().len();
    let mut entropies = Vec::with_capacity(1 << t);
    for a in 0..(1u64 << t) {
        let positions: Vec<usize> = layout
            .subset_qudits(layout.terminal_vertex_mask(a))
            .into_iter()
            .map(|id| alive.binary_search(&id).expect("terminal qudit alive"))
            .collect();
        let mut s = [0.0; 3];
        for (alpha, slot) in s.iter_mut().enumerate() {
            *slot = dense_entropy(&state, &positions, alpha as u32)?;
        }
        entropies.push(s);
    }
    Ok(DenseReplay { nonzero: true, norm_squared, entropies: Some(entropies) })
}
