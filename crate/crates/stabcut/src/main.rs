//! Command-line entry point. All logic lives in the library; this binary
//! parses flags, dispatches, and maps errors to exit codes:
//! 0 success, 1 verification failure, 2 input error, 3 capacity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stabcut::error::Error;
use stabcut::experiments::{
    estimate_moments, simulate, verify_entropy_vectors, ExperimentConfig, SimulationReport,
};
use stabcut::gfp::PrimeModulus;
use stabcut::hypergraph::{check_symmetric_submodular, WeightedHypergraph};
use stabcut::network::{build_omega, run_trial_recorded};
use stabcut::oracle::{replay_trial_dense, DENSE_DIM_BOUND};

#[derive(Parser)]
#[command(name = "stabcut", version, about = "Hypergraph min-cuts from stabilizer entropies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SimFlags {
    /// Qudit dimension (prime).
    #[arg(short, long, default_value_t = 2)]
    prime: u64,
    /// Bond exponent r (repeatable); effective bond dimension is p^r.
    #[arg(short = 'r', long = "bond-exponent", default_values_t = vec![1u32])]
    bond_exponent: Vec<u32>,
    /// Trials per bond exponent.
    #[arg(short = 'n', long, default_value_t = 1000)]
    trials: u64,
    /// Master seed; trial i uses stream i of this seed.
    #[arg(short, long, default_value_t = 0)]
    seed: u64,
    /// Per-trial success tolerance on |S(Ψ_A)/(r log p) − m(A)|.
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    /// Output report path (JSON).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write <prefix>_moments.csv and <prefix>_concentration.csv.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads (0 = all cores). Reports do not depend on this.
    #[arg(short, long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the min-cut table m(A), k(A) of a hypergraph file.
    Mincut { input: PathBuf },
    /// Print the cut value c(S) of one vertex subset.
    Cut {
        input: PathBuf,
        /// Comma-separated vertex ids forming S.
        #[arg(short = 'S', long, default_value = "")]
        subset: String,
    },
    /// Run the moment and concentration experiments and write a report.
    Simulate {
        input: PathBuf,
        #[command(flatten)]
        flags: SimFlags,
    },
    /// Run only the moment experiment.
    Moments {
        input: PathBuf,
        #[command(flatten)]
        flags: SimFlags,
    },
    /// Replay shared-seed trials in the stabilizer and dense engines and
    /// compare them.
    OracleCheck {
        input: PathBuf,
        #[command(flatten)]
        flags: SimFlags,
        /// Test hook: corrupt one entropy value to exercise the failure path.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Re-check a written report: min-cut symmetry/submodularity, entropy
    /// vectors of recorded trials, and the rank bound.
    Verify { report: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Capacity(_) => ExitCode::from(3),
                Error::Input(_) | Error::Parse(_) | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_hypergraph(path: &PathBuf) -> Result<WeightedHypergraph, Error> {
    WeightedHypergraph::from_json(&std::fs::read_to_string(path)?)
}

fn config_from(flags: &SimFlags, keep_trials: bool) -> Result<ExperimentConfig, Error> {
    let mut r_list = flags.bond_exponent.clone();
    r_list.sort_unstable();
    r_list.dedup();
    let config = ExperimentConfig {
        p: PrimeModulus::new(flags.prime)?,
        r_list,
        trials: flags.trials,
        master_seed: flags.seed,
        delta: flags.delta,
        jobs: flags.jobs,
        keep_trials,
    };
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Mincut { input } => {
            let h = load_hypergraph(&input)?.prune_floating_components();
            let table = h.mincut_table()?;
            let t = table.terminal_count();
            let mut masks: Vec<u64> = (0..(1u64 << t)).collect();
            masks.sort_by_key(|&a| (a.count_ones(), table.subset_label(a)));
            for a in masks {
                println!("{}  {}  {}", table.subset_label(a), table.min_cut(a), table.count(a));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cut { input, subset } => {
            let h = load_hypergraph(&input)?;
            let names: Vec<&str> =
                subset.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let mask = h.subset_mask(&names)?;
            println!("{}", h.cut_value(mask)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { input, flags } => {
            let h = load_hypergraph(&input)?.prune_floating_components();
            let config = config_from(&flags, true)?;
            let report = simulate(&h, &config)?;
            for row in &report.concentration.rows {
                println!(
                    "r={:<3} p_nonzero={:.4} success_fraction={:.4} (±{:.4})",
                    row.r, row.p_nonzero, row.success_fraction, row.se_success
                );
            }
            write_report(&report, &flags)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Moments { input, flags } => {
            let h = load_hypergraph(&input)?.prune_floating_components();
            let config = config_from(&flags, false)?;
            let report = estimate_moments(&h, &config)?;
            for row in &report.first {
                println!("r={:<3} mean(D_b·trΨ)={:.6} se={:.2e} z={:+.2}", row.r, row.mean_db_tr, row.se, row.z);
            }
            for row in &report.second {
                println!(
                    "r={:<3} A={:<12} mean(trΨ_A²)={:.6e} exact={} z={:+.2}",
                    row.r, row.subset, row.mean_tr2, row.exact_rational, row.z
                );
            }
            if let Some(out) = &flags.out {
                let mut s = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                s.push('\n');
                std::fs::write(out, s)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { input, flags, corrupt } => {
            oracle_check(&input, &flags, corrupt)
        }
        Command::Verify { report } => verify_report(&report),
    }
}

fn write_report(report: &SimulationReport, flags: &SimFlags) -> Result<(), Error> {
    if let Some(out) = &flags.out {
        std::fs::write(out, report.to_json())?;
    }
    if let Some(prefix) = &flags.csv {
        let base = prefix.to_string_lossy();
        std::fs::write(format!("{base}_moments.csv"), report.moments_csv())?;
        std::fs::write(format!("{base}_concentration.csv"), report.concentration_csv())?;
    }
    Ok(())
}

fn oracle_check(input: &PathBuf, flags: &SimFlags, corrupt: bool) -> Result<ExitCode, Error> {
    let h = load_hypergraph(input)?.prune_floating_components();
    let config = config_from(flags, false)?;
    let p = config.p;
    let tol = 1e-9;
    for &r in &config.r_list {
        let (layout, omega) = build_omega(&h, p, r)?;
        let dim = (p.value() as f64).powi(layout.total_qudits as i32);
        if dim > DENSE_DIM_BOUND as f64 {
            return Err(Error::Capacity(format!(
                "dense replay needs p^n ≤ {DENSE_DIM_BOUND}, got p^{}",
                layout.total_qudits
            )));
        }
        let t = h.terminals().len();
        for i in 0..config.trials {
            let (mut result, record) =
                run_trial_recorded(&layout, &omega, config.master_seed, i)?;
            if corrupt && i == config.trials / 2 {
                if let Some(e) = result.entropies.as_mut() {
                    e[1] += 1;
                }
            }
            let dense = replay_trial_dense(&layout, &omega, &record)?;
            let fail = |what: &str| {
                eprintln!("disagreement at r={r} seed=({}, {i}): {what}", config.master_seed);
                Ok::<ExitCode, Error>(ExitCode::from(1))
            };
            if result.nonzero != dense.nonzero {
                return fail("nonzero flag");
            }
            if !result.nonzero {
                continue;
            }
            let tr = (p.value() as f64).powi(-(result.free_count as i32));
            if (tr - dense.norm_squared).abs() > tol {
                return fail("tr[Ψ]");
            }
            let e = result.entropies.as_ref().expect("nonzero trial has entropies");
            let de = dense.entropies.as_ref().expect("dense nonzero");
            for a in 0..(1usize << t) {
                for (alpha, &dv) in de[a].iter().enumerate() {
                    if (e[a] as f64 - dv).abs() > tol {
                        return fail(&format!("entropy of subset mask {a} at order {alpha}"));
                    }
                }
            }
        }
        println!("r={r}: {} shared-seed trials agree within {tol:.0e}", config.trials);
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_report(path: &PathBuf) -> Result<ExitCode, Error> {
    let report = SimulationReport::from_json(&std::fs::read_to_string(path)?)?;
    let mut failures = 0u64;
    let f: Vec<f64> = report.mincut.m.iter().map(|&x| x as f64).collect();
    let v = check_symmetric_submodular(&f, 0.0)?;
    if !v.is_empty() {
        eprintln!("min-cut table violates symmetry/submodularity ({} pairs)", v.len());
        failures += 1;
    }
    // Recompute the table from the hypergraph echo.
    let h = WeightedHypergraph::from_json(&report.hypergraph.to_string())?;
    if h.mincut_table()? != report.mincut {
        eprintln!("min-cut table does not match the hypergraph");
        failures += 1;
    }
    let mut checked = 0u64;
    for set in &report.concentration.trial_sets {
        let bad = verify_entropy_vectors(&set.results)?;
        if bad > 0 {
            eprintln!("r={}: {bad} entropy vectors violate symmetry/submodularity", set.r);
            failures += bad;
        }
        for res in &set.results {
            if let Some(e) = &res.entropies {
                checked += 1;
                for (a, &ea) in e.iter().enumerate() {
                    if ea > set.r as u64 * report.mincut.m[a] {
                        eprintln!(
                            "r={} trial {}: rank bound violated on subset mask {a}",
                            set.r, res.trial_index
                        );
                        failures += 1;
                    }
                }
            }
        }
    }
    if report.concentration.rank_bound_violations > 0 {
        eprintln!(
            "report recorded {} rank-bound violations",
            report.concentration.rank_bound_violations
        );
        failures += report.concentration.rank_bound_violations;
    }
    if failures == 0 {
        println!("ok: min-cut table and {checked} trial entropy vectors pass all checks");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
