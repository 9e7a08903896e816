//! The GHZ network state Ω of a hypergraph, and single random-projection
//! trials producing terminal entropy vectors.
//!
//! Each hyperedge `e` contributes `w(e)·r` copies of a `|e|`-partite GHZ
//! state of local dimension p, one qudit per incident vertex and copy.
//! This realizes effective bond dimension `D = p^r` with multiplicity
//! `w(e)` while staying inside the prime-qudit stabilizer formalism.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gfp::PrimeModulus;
use crate::hypergraph::{WeightedHypergraph, MAX_TERMINALS};
use crate::stabilizer::{ProjectionOutcome, StabilizerTableau};

/// Default bound on the total qudit count of Ω.
pub const DEFAULT_QUDIT_BOUND: usize = 4096;

/// Qudit placement for the network state of a hypergraph.
#[derive(Clone, Debug)]
pub struct NetworkLayout {
    pub hypergraph: WeightedHypergraph,
    pub p: PrimeModulus,
    pub bond_exponent: u32,
    /// Qudit indices owned by each vertex (indexed like the vertex order).
    pub vertex_groups: Vec<Vec<usize>>,
    pub total_qudits: usize,
}

impl NetworkLayout {
    /// `log_p D_b = r · Σ_{x∉T} Σ_{e∋x} w(e)`, the log of the product of
    /// the projected local dimensions.
    pub fn bulk_log_dim(&self) -> u64 {
        self.hypergraph
            .vertex_names()
            .iter()
            .enumerate()
            .filter(|&(v, _)| !self.hypergraph.is_terminal(v))
            .map(|(v, _)| self.vertex_groups[v].len() as u64)
            .sum()
    }

    /// Qudit indices of the union of the groups of a vertex subset.
    pub fn subset_qudits(&self, vertex_mask: u64) -> Vec<usize> {
        let mut qudits: Vec<usize> = self
            .vertex_groups
            .iter()
            .enumerate()
            .filter(|&(v, _)| vertex_mask & (1 << v) != 0)
            .flat_map(|(_, g)| g.iter().copied())
            .collect();
        qudits.sort_unstable();
        qudits
    }

    /// Vertex mask of a terminal-subset mask.
    pub fn terminal_vertex_mask(&self, a: u64) -> u64 {
        self.hypergraph
            .terminals()
            .iter()
            .enumerate()
            .filter(|&(t, _)| a & (1 << t) != 0)
            .fold(0, |m, (_, &v)| m | (1 << v))
    }
}

/// Build the GHZ network state: Ω = ⊗_{e,j∈[w(e)·r]} GHZ(|e|, p), with the
/// site map recorded in the layout.
pub fn build_omega(
    h: &WeightedHypergraph,
    p: PrimeModulus,
    r: u32,
) -> Result<(NetworkLayout, StabilizerTableau)> {
    build_omega_bounded(h, p, r, DEFAULT_QUDIT_BOUND)
}

pub fn build_omega_bounded(
    h: &WeightedHypergraph,
    p: PrimeModulus,
    r: u32,
    qudit_bound: usize,
) -> Result<(NetworkLayout, StabilizerTableau)> {
    if r == 0 {
        return Err(Error::Input("bond exponent must be ≥ 1".into()));
    }
    if !h.is_pruned() {
        return Err(Error::Input("hypergraph must be pruned before building Ω".into()));
    }
    if h.terminals().len() > MAX_TERMINALS {
        return Err(Error::Capacity(format!(
            "{} terminals exceed {MAX_TERMINALS}",
            h.terminals().len()
        )));
    }
    let total: usize = h
        .edges()
        .iter()
        .map(|e| e.weight as usize * r as usize * e.vertices.len())
        .sum();
    if total > qudit_bound {
        return Err(Error::Capacity(format!("{total} qudits exceed the bound {qudit_bound}")));
    }
    let mut vertex_groups = vec![Vec::new(); h.vertex_count()];
    let mut omega = StabilizerTableau::empty(p);
    let mut next = 0usize;
    for e in h.edges() {
        let ghz = StabilizerTableau::ghz(e.vertices.len(), p);
        for _copy in 0..e.weight * r as u64 {
            omega = omega.tensor(&ghz)?;
            for &v in &e.vertices {
                vertex_groups[v].push(next);
                next += 1;
            }
        }
    }
    let layout = NetworkLayout {
        hypergraph: h.clone(),
        p,
        bond_exponent: r,
        vertex_groups,
        total_qudits: total,
    };
    Ok((layout, omega))
}

/// Entropy of Ω on a vertex subset, in units of log p. Equals `r·c(S)`
/// exactly.
pub fn omega_entropy(layout: &NetworkLayout, omega: &StabilizerTableau, vertex_mask: u64) -> Result<u64> {
    omega.reduced_entropy(&layout.subset_qudits(vertex_mask))
}

/// Result of one random-projection trial.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TrialResult {
    pub trial_index: u64,
    pub master_seed: u64,
    pub nonzero: bool,
    /// `tr[Ψ] = p^{−free_count}` when nonzero.
    pub free_count: u64,
    /// Entropy of Ψ_A in units of log p, indexed by terminal-subset mask;
    /// present only for nonzero trials.
    pub entropies: Option<Vec<u64>>,
}

/// Deterministic per-trial RNG: stream `trial_index` of a ChaCha generator
/// keyed by the master seed, so trials are reproducible under any
/// parallel schedule.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Run one trial: sample a uniformly random stabilizer state for every
/// non-terminal vertex (in input vertex order), project its qudit group,
/// and if no projection annihilates the state compute the entropy vector
/// over all terminal subsets.
pub fn run_trial(
    layout: &NetworkLayout,
    omega: &StabilizerTableau,
    master_seed: u64,
    trial_index: u64,
) -> Result<TrialResult> {
    run_trial_inner(layout, omega, master_seed, trial_index, None)
}

/// Per-projection trace of a trial: (vertex, original qudit ids of its
/// group, sampled target state).
pub type TrialRecord = Vec<(usize, Vec<usize>, StabilizerTableau)>;

/// Like [`run_trial`] but records the sampled target states (with the
/// original qudit ids of their groups) for replay in another engine.
pub fn run_trial_recorded(
    layout: &NetworkLayout,
    omega: &StabilizerTableau,
    master_seed: u64,
    trial_index: u64,
) -> Result<(TrialResult, TrialRecord)> {
    let mut record = Vec::new();
    let result = run_trial_inner(layout, omega, master_seed, trial_index, Some(&mut record))?;
    Ok((result, record))
}

fn run_trial_inner(
    layout: &NetworkLayout,
    omega: &StabilizerTableau,
    master_seed: u64,
    trial_index: u64,
    mut record: Option<&mut TrialRecord>,
) -> Result<TrialResult> {
    let mut rng = trial_rng(master_seed, trial_index);
    let mut state = omega.clone();
    // Original qudit ids still present, in order.
    let mut alive: Vec<usize> = (0..layout.total_qudits).collect();
    let mut free_count = 0u64;
    let mut annihilated = false;
    for v in 0..layout.hypergraph.vertex_count() {
        if layout.hypergraph.is_terminal(v) || layout.vertex_groups[v].is_empty() {
            continue;
        }
        let group = &layout.vertex_groups[v];
        let target = StabilizerTableau::random(group.len(), layout.p, &mut rng);
        if let Some(rec) = record.as_deref_mut() {
            rec.push((v, group.clone(), target.clone()));
        }
        let positions: Vec<usize> = group
            .iter()
            .map(|id| alive.binary_search(id).expect("projected qudit still alive"))
            .collect();
        match state.project_onto_stabilizer(&positions, &target)? {
            ProjectionOutcome::Zero => {
                annihilated = true;
                break;
            }
            ProjectionOutcome::State { state: next, free_count: f } => {
                state = next;
                free_count += f;
                alive.retain(|id| !group.contains(id));
            }
        }
    }
    if annihilated {
        return Ok(TrialResult {
            trial_index,
            master_seed,
            nonzero: false,
            free_count: 0,
            entropies: None,
        });
    }
    let t = layout.hypergraph.terminals().len();
    let mut entropies = Vec::with_capacity(1 << t);
    for a in 0..(1u64 << t) {
        let vmask = layout.terminal_vertex_mask(a);
        let positions: Vec<usize> = layout
            .subset_qudits(vmask)
            .into_iter()
            .map(|id| alive.binary_search(&id).expect("terminal qudit alive"))
            .collect();
        entropies.push(state.reduced_entropy(&positions)?);
    }
    Ok(TrialResult {
        trial_index,
        master_seed,
        nonzero: true,
        free_count,
        entropies: Some(entropies),
    })
}
