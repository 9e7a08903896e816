//! Monte Carlo harness: exact moment formulas, empirical moment estimates,
//! concentration trends, and machine-readable reports.
//!
//! ZERO trials contribute zeros to the unconditional moment estimates but
//! are excluded from the conditional entropy statistics. All aggregation
//! folds per-trial values in trial-index order, so reports are
//! byte-identical for any parallelism degree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfp::PrimeModulus;
use crate::hypergraph::{check_symmetric_submodular, MinCutTable, WeightedHypergraph};
use crate::network::{build_omega, run_trial, TrialResult};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub p: PrimeModulus,
    /// Bond exponents, ascending; `D = p^r`.
    pub r_list: Vec<u32>,
    pub trials: u64,
    pub master_seed: u64,
    /// Tolerance for the per-trial success criterion
    /// `max_A |S(Ψ_A)/(r log p) − m(A)| ≤ δ`.
    pub delta: f64,
    /// Worker threads; 0 means one per available core. Not echoed into
    /// reports: output is schedule-independent by construction.
    #[serde(skip)]
    pub jobs: usize,
    /// Whether reports carry the raw per-trial records.
    pub keep_trials: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Input("trial count must be ≥ 1".into()));
        }
        if self.delta <= 0.0 || self.delta.is_nan() {
            return Err(Error::Input("delta must be > 0".into()));
        }
        if self.r_list.is_empty() || self.r_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("bond exponent list must be nonempty and ascending".into()));
        }
        if self.r_list[0] == 0 {
            return Err(Error::Input("bond exponents must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Run `trials` independent trials at bond exponent `r`, in trial-index
/// order. Parallel execution over a dedicated pool; the output is
/// independent of the schedule.
pub fn run_trials(
    h: &WeightedHypergraph,
    p: PrimeModulus,
    r: u32,
    trials: u64,
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<TrialResult>> {
    let (layout, omega) = build_omega(h, p, r)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| run_trial(&layout, &omega, master_seed, i))
            .collect::<Result<Vec<_>>>()
    })
}

/// Exact `E[tr[Ψ_A²]] = ∏_{x∉T} (D_x(D_x+1))^{−1} · Σ_{S:S∩T=A} D^{−c(S)}`
/// with `D = p^r`, as an exact rational.
pub fn exact_second_moment(
    h: &WeightedHypergraph,
    p: PrimeModulus,
    r: u32,
    a_mask: u64,
) -> Result<BigRational> {
    let n = h.vertex_count();
    if n > crate::hypergraph::DEFAULT_ENUM_BOUND {
        return Err(Error::Capacity(format!("{n} vertices exceed the enumeration bound")));
    }
    let d = BigInt::from(p.value()).pow(r);
    // Prefactor over the non-terminal vertices.
    let mut prefactor = BigRational::one();
    for v in 0..n {
        if h.is_terminal(v) {
            continue;
        }
        let incident: u64 =
            h.edges().iter().filter(|e| e.mask & (1 << v) != 0).map(|e| e.weight).sum();
        let dx = BigInt::from(p.value()).pow(r * incident as u32);
        prefactor *= BigRational::new(BigInt::one(), &dx * (&dx + BigInt::one()));
    }
    let mut sum = BigRational::zero();
    for s in 0..(1u64 << n) {
        if h.terminal_trace(s) != a_mask {
            continue;
        }
        let c = h.cut_value(s)?;
        sum += BigRational::new(BigInt::one(), d.pow(c as u32));
    }
    Ok(prefactor * sum)
}

/// Mean and standard error of a sample, folded in index order.
fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn z_score(mean: f64, exact: f64, se: f64) -> f64 {
    if se == 0.0 {
        if mean == exact {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (mean - exact) / se
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FirstMomentRow {
    pub r: u32,
    /// Empirical mean of `D_b · tr[Ψ]`; the exact expectation is 1.
    pub mean_db_tr: f64,
    pub se: f64,
    pub z: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecondMomentRow {
    pub r: u32,
    pub subset: String,
    pub subset_mask: u64,
    pub min_cut: u64,
    pub k: u64,
    /// Empirical mean of `tr[Ψ_A²] = tr[Ψ]² p^{−S(Ψ_A)}`.
    pub mean_tr2: f64,
    pub se: f64,
    pub exact: f64,
    pub exact_rational: String,
    pub z: f64,
    /// `mean · D_b² · D^{m(A)}`, which tends to `k_A` as r grows.
    pub normalized_ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub first: Vec<FirstMomentRow>,
    pub second: Vec<SecondMomentRow>,
    pub rank_bound_violations: u64,
}

/// Empirical moments against the exact expectations, for every bond
/// exponent in the config and every terminal subset.
pub fn estimate_moments(h: &WeightedHypergraph, config: &ExperimentConfig) -> Result<MomentReport> {
    config.validate()?;
    let table = h.mincut_table()?;
    let t = table.terminal_count();
    let p = config.p.value() as f64;
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut violations = 0;
    for &r in &config.r_list {
        let results = run_trials(h, config.p, r, config.trials, config.master_seed, config.jobs)?;
        let (layout, _) = build_omega(h, config.p, r)?;
        let db = p.powi(layout.bulk_log_dim() as i32);
        let tr_values: Vec<f64> = results
            .iter()
            .map(|res| if res.nonzero { db * p.powi(-(res.free_count as i32)) } else { 0.0 })
            .collect();
        let (mean, se) = mean_se(&tr_values);
        first.push(FirstMomentRow { r, mean_db_tr: mean, se, z: z_score(mean, 1.0, se) });
        violations += count_rank_violations(&results, &table, r);
        for a in 0..(1u64 << t) {
            let tr2: Vec<f64> = results
                .iter()
                .map(|res| match (&res.entropies, res.nonzero) {
                    (Some(e), true) => {
                        let tr = p.powi(-(res.free_count as i32));
                        tr * tr * p.powi(-(e[a as usize] as i32))
                    }
                    _ => 0.0,
                })
                .collect();
            let (mean2, se2) = mean_se(&tr2);
            let exact = exact_second_moment(h, config.p, r, a)?;
            let exact_f = exact.to_f64().unwrap_or(f64::NAN);
            second.push(SecondMomentRow {
                r,
                subset: table.subset_label(a),
                subset_mask: a,
                min_cut: table.min_cut(a),
                k: table.count(a),
                mean_tr2: mean2,
                se: se2,
                exact: exact_f,
                exact_rational: exact.to_string(),
                z: z_score(mean2, exact_f, se2),
                normalized_ratio: mean2 * db * db * p.powi((r as u64 * table.min_cut(a)) as i32),
            });
        }
    }
    Ok(MomentReport { first, second, rank_bound_violations: violations })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub r: u32,
    pub trials: u64,
    pub nonzero: u64,
    pub p_nonzero: f64,
    pub se_nonzero: f64,
    /// Fraction of trials with Ψ ≠ 0 and
    /// `max_A |S(Ψ_A)/(r log p) − m(A)| ≤ δ`.
    pub success_fraction: f64,
    pub se_success: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapRow {
    pub r: u32,
    pub subset: String,
    pub subset_mask: u64,
    pub min_cut: u64,
    pub k: u64,
    /// Conditional mean of `r·m(A) − S(Ψ_A)` over nonzero trials, in units
    /// of log p. Bounded by `log_p(k_A)` up to O(D^{−1/4}).
    pub mean_gap: f64,
    pub se: f64,
    pub log_p_k: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialSet {
    pub r: u32,
    pub results: Vec<TrialResult>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
    pub gaps: Vec<GapRow>,
    pub rank_bound_violations: u64,
    /// Raw per-trial records, when the config keeps them.
    pub trial_sets: Vec<TrialSet>,
}

fn count_rank_violations(results: &[TrialResult], table: &MinCutTable, r: u32) -> u64 {
    let t = table.terminal_count();
    results
        .iter()
        .filter_map(|res| res.entropies.as_ref())
        .map(|e| {
            (0..(1u64 << t))
                .filter(|&a| e[a as usize] > r as u64 * table.min_cut(a))
                .count() as u64
        })
        .sum()
}

/// Empirical nonzero probability, conditional entropy gaps, and the
/// success fraction at tolerance δ, for every bond exponent in the config.
pub fn concentration_experiment(
    h: &WeightedHypergraph,
    config: &ExperimentConfig,
) -> Result<ConcentrationReport> {
    config.validate()?;
    let table = h.mincut_table()?;
    let t = table.terminal_count();
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    let mut trial_sets = Vec::new();
    let mut violations = 0;
    for &r in &config.r_list {
        let results = run_trials(h, config.p, r, config.trials, config.master_seed, config.jobs)?;
        violations += count_rank_violations(&results, &table, r);
        let n = results.len() as f64;
        let nonzero = results.iter().filter(|res| res.nonzero).count() as u64;
        let p_nonzero = nonzero as f64 / n;
        let successes = results
            .iter()
            .filter(|res| match &res.entropies {
                Some(e) => (0..(1u64 << t)).all(|a| {
                    let scaled = e[a as usize] as f64 / r as f64;
                    (scaled - table.min_cut(a) as f64).abs() <= config.delta
                }),
                None => false,
            })
            .count() as u64;
        let success_fraction = successes as f64 / n;
        rows.push(ConcentrationRow {
            r,
            trials: results.len() as u64,
            nonzero,
            p_nonzero,
            se_nonzero: (p_nonzero * (1.0 - p_nonzero) / n).sqrt(),
            success_fraction,
            se_success: (success_fraction * (1.0 - success_fraction) / n).sqrt(),
        });
        for a in 0..(1u64 << t) {
            let gap_values: Vec<f64> = results
                .iter()
                .filter_map(|res| res.entropies.as_ref())
                .map(|e| (r as u64 * table.min_cut(a)) as f64 - e[a as usize] as f64)
                .collect();
            let (mean_gap, se) = mean_se(&gap_values);
            gaps.push(GapRow {
                r,
                subset: table.subset_label(a),
                subset_mask: a,
                min_cut: table.min_cut(a),
                k: table.count(a),
                mean_gap,
                se,
                log_p_k: (table.count(a) as f64).ln() / (config.p.value() as f64).ln(),
            });
        }
        if config.keep_trials {
            trial_sets.push(TrialSet { r, results });
        }
    }
    Ok(ConcentrationReport { rows, gaps, rank_bound_violations: violations, trial_sets })
}

/// Check every nonzero trial's entropy vector for symmetry and
/// submodularity (with exact zero tolerance). Returns the number of
/// violating vectors; must be 0 for physical data.
pub fn verify_entropy_vectors(results: &[TrialResult]) -> Result<u64> {
    let mut violating = 0;
    for res in results {
        if let Some(e) = &res.entropies {
            let f: Vec<f64> = e.iter().map(|&x| x as f64).collect();
            if !check_symmetric_submodular(&f, 0.0)?.is_empty() {
                violating += 1;
            }
        }
    }
    Ok(violating)
}

/// Everything the `simulate` command writes: config echo, min-cut table,
/// moment and concentration results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: ExperimentConfig,
    pub hypergraph: serde_json::Value,
    pub mincut: MinCutTable,
    pub moments: MomentReport,
    pub concentration: ConcentrationReport,
}

pub fn simulate(h: &WeightedHypergraph, config: &ExperimentConfig) -> Result<SimulationReport> {
    Ok(SimulationReport {
        config: config.clone(),
        hypergraph: serde_json::from_str(&h.to_json()).expect("hypergraph json"),
        mincut: h.mincut_table()?,
        moments: estimate_moments(h, config)?,
        concentration: concentration_experiment(h, config)?,
    })
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Flat `A,m,kA,mean,exact,se,z` rows for the second moments.
    pub fn moments_csv(&self) -> String {
        let mut out = String::from("r,A,m,kA,mean,exact,se,z\n");
        for row in &self.moments.second {
            out.push_str(&format!(
                "{},\"{}\",{},{},{:e},{:e},{:e},{}\n",
                row.r, row.subset, row.min_cut, row.k, row.mean_tr2, row.exact, row.se, row.z
            ));
        }
        out
    }

    /// Flat `r,p_nonzero,success_fraction,se` rows.
    pub fn concentration_csv(&self) -> String {
        let mut out = String::from("r,p_nonzero,success_fraction,se\n");
        for row in &self.concentration.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.r, row.p_nonzero, row.success_fraction, row.se_success
            ));
        }
        out
    }
}

/// The fixed benchmark set used across tests and reproduction runs.
///
/// * `h1` — the running example: one 3-edge and one 2-edge sharing a bulk
///   vertex; the subset {c} has a degenerate min-cut (k = 2).
/// * `ghz3w2` — a single weight-2 triangle edge with all vertices
///   terminal: no bulk, every trial exact with zero variance.
/// * `parallel` — two disjoint 2-paths between the terminals a and b:
///   m({a}) = 2 with k = 4 minimal cuts.
pub fn benchmarks() -> Vec<(String, WeightedHypergraph)> {
    let h1 = crate::hypergraph::example_h1();
    let ghz3w2 = WeightedHypergraph::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![(vec!["a".into(), "b".into(), "c".into()], 2)],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .expect("valid");
    let parallel = WeightedHypergraph::new(
        vec!["a".into(), "b".into(), "o1".into(), "o2".into()],
        vec![
            (vec!["a".into(), "o1".into()], 1),
            (vec!["o1".into(), "b".into()], 1),
            (vec!["a".into(), "o2".into()], 1),
            (vec!["o2".into(), "b".into()], 1),
        ],
        vec!["a".into(), "b".into()],
    )
    .expect("valid");
    vec![("h1".into(), h1), ("ghz3w2".into(), ghz3w2), ("parallel".into(), parallel)]
}

pub use crate::hypergraph::subset_label as label_subset;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::example_h1;

    fn p2() -> PrimeModulus {
        PrimeModulus::new(2).unwrap()
    }

    fn config(r_list: Vec<u32>, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            p: p2(),
            r_list,
            trials,
            master_seed: 17,
            delta: 0.3,
            jobs: 1,
            keep_trials: false,
        }
    }

    #[test]
    fn exact_second_moment_h1() {
        let h1 = example_h1();
        // A = {c} (mask 4): (1/20)·(1/2 + 1/2) = 1/20.
        let v = exact_second_moment(&h1, p2(), 1, 4).unwrap();
        assert_eq!(v, BigRational::new(BigInt::from(1), BigInt::from(20)));
        // A = ∅: (1/20)·(1 + 1/4) = 1/16.
        let v0 = exact_second_moment(&h1, p2(), 1, 0).unwrap();
        assert_eq!(v0, BigRational::new(BigInt::from(1), BigInt::from(16)));
    }

    #[test]
    fn exact_second_moment_no_bulk() {
        // No non-terminal vertices: the prefactor is the empty product and
        // the sum has the single term D^{−c(A)}.
        let h = WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![(vec!["a".into(), "b".into()], 1)],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let v = exact_second_moment(&h, p2(), 3, 1).unwrap();
        assert_eq!(v, BigRational::new(BigInt::from(1), BigInt::from(8)));
        let v0 = exact_second_moment(&h, p2(), 3, 0).unwrap();
        assert_eq!(v0, BigRational::one());
    }

    #[test]
    fn moments_match_on_h1() {
        let h1 = example_h1();
        let report = estimate_moments(&h1, &config(vec![1], 20_000)).unwrap();
        assert_eq!(report.rank_bound_violations, 0);
        let f = &report.first[0];
        assert!(f.z.abs() <= 5.0, "first moment z = {}", f.z);
        for row in &report.second {
            assert!(row.z.abs() <= 5.0, "second moment z = {} for {}", row.z, row.subset);
        }
    }

    #[test]
    fn no_bulk_graph_has_zero_variance() {
        let h = WeightedHypergraph::new(
            vec!["a".into(), "b".into()],
            vec![(vec!["a".into(), "b".into()], 1)],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let report = estimate_moments(&h, &config(vec![1], 50)).unwrap();
        let f = &report.first[0];
        assert_eq!(f.mean_db_tr, 1.0);
        assert_eq!(f.se, 0.0);
        assert_eq!(f.z, 0.0);
        for row in &report.second {
            assert_eq!(row.se, 0.0);
            assert_eq!(row.mean_tr2, row.exact);
        }
    }

    #[test]
    fn concentration_trend_on_h1() {
        let h1 = example_h1();
        let report = concentration_experiment(&h1, &config(vec![2, 6], 400)).unwrap();
        assert_eq!(report.rank_bound_violations, 0);
        assert!(report.rows[0].success_fraction <= report.rows[1].success_fraction + 0.1);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.success_fraction));
        }
        for gap in &report.gaps {
            assert!(gap.mean_gap >= 0.0);
        }
    }

    #[test]
    fn entropy_vectors_pass_checks() {
        let h1 = example_h1();
        let results = run_trials(&h1, p2(), 2, 300, 3, 1).unwrap();
        assert_eq!(verify_entropy_vectors(&results).unwrap(), 0);
        // Negative control: an injected violation is detected.
        let mut bad = results[0].clone();
        if let Some(e) = bad.entropies.as_mut() {
            e[1] += 7;
        }
        assert_eq!(verify_entropy_vectors(&[bad]).unwrap(), 1);
    }

    #[test]
    fn reports_are_schedule_independent() {
        let h1 = example_h1();
        let mut cfg = config(vec![1, 2], 200);
        cfg.keep_trials = true;
        let a = simulate(&h1, &cfg).unwrap().to_json();
        cfg.jobs = 4;
        let b = simulate(&h1, &cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let h1 = example_h1();
        let mut cfg = config(vec![1], 0);
        assert!(estimate_moments(&h1, &cfg).is_err());
        cfg.trials = 10;
        cfg.delta = 0.0;
        assert!(concentration_experiment(&h1, &cfg).is_err());
        cfg.delta = 0.3;
        cfg.r_list = vec![2, 1];
        assert!(concentration_experiment(&h1, &cfg).is_err());
    }
}
