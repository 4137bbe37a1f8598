use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hexqec_core::circuit::{build_memory_circuit, Basis, Circuit};
use hexqec_core::decoder::CircuitDecoder;
use hexqec_core::dem::extract_dem;
use hexqec_core::harness::{
    estimate_thresholds, parse_grid, read_points_csv, run_sweep, write_points_csv, write_thresholds_csv,
    SweepConfig, SweepReport, BOOTSTRAP_RESAMPLES,
};
use hexqec_core::noise::{apply_noise, BiasedNoise, Eta, IdleMode};
use hexqec_core::sim::{sample, SampleBatch};
use hexqec_core::stats::logical_error_rates;
use hexqec_core::{build_layout, Family, Structure};

#[derive(Parser)]
#[command(name = "hexqec", version, about = "Flag-qubit memory experiments on lattice and heavy-hex connectivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Desk,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Print the qubit layout of a code as JSON.
    Layout {
        #[arg(long)]
        code: Family,
        #[arg(long)]
        structure: Structure,
        #[arg(long)]
        d: usize,
        /// Number qubits with the 65-qubit Ithaca device indices (heavy-hex, d = 3).
        #[arg(long)]
        ithaca_map: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a memory experiment to the text circuit format.
    Circuit {
        #[arg(long)]
        code: Family,
        #[arg(long)]
        structure: Structure,
        #[arg(long)]
        d: usize,
        /// Logical operator to protect: l1 or l2.
        #[arg(long, default_value = "l1")]
        basis: Basis,
        /// Syndrome rounds; defaults to d.
        #[arg(long)]
        rounds: Option<usize>,
        /// Attach biased noise of this total strength.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value = "0.5")]
        eta: Eta,
        #[arg(long, default_value = "per-cycle")]
        idle: IdleMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the detector error model of a noisy circuit.
    Dem {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample detector and observable flips from a noisy circuit.
    Sample {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "HEXQEC_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode sampled shots and report the logical error rate.
    Decode {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        samples: PathBuf,
        /// Write one prediction row per shot.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a Monte Carlo sweep and write points.csv and sweep.json to a directory.
    Sweep {
        /// Starting point for unspecified options.
        #[arg(long, value_enum, default_value = "desk")]
        preset: Preset,
        #[arg(long, value_delimiter = ',')]
        code: Vec<Family>,
        #[arg(long, value_delimiter = ',')]
        structure: Vec<Structure>,
        #[arg(long, value_delimiter = ',')]
        eta: Vec<Eta>,
        #[arg(long, value_delimiter = ',')]
        d: Vec<usize>,
        /// start:stop:step or a comma-separated list.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, env = "HEXQEC_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        idle: Option<IdleMode>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate thresholds from a sweep directory (or points CSV).
    Threshold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = BOOTSTRAP_RESAMPLES)]
        bootstrap: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Circuit::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn set_workers(workers: Option<usize>) -> Result<()> {
    if let Some(w) = workers {
        if w == 0 {
            bail!("worker count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Layout { code, structure, d, ithaca_map, out } => {
            let layout = build_layout(code, structure, d)?;
            let doc = layout.to_document(ithaca_map)?;
            emit(out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))
        }
        Command::Circuit { code, structure, d, basis, rounds, p, eta, idle, out } => {
            let layout = build_layout(code, structure, d)?;
            let mut c = build_memory_circuit(&layout, rounds.unwrap_or(d), basis)?;
            if let Some(p) = p {
                c = apply_noise(&c, &BiasedNoise::new(p, eta)?.with_idle(idle));
            }
            emit(out.as_deref(), &c.to_text())
        }
        Command::Dem { circuit, out } => {
            let c = read_circuit(&circuit)?;
            emit(out.as_deref(), &extract_dem(&c)?.to_string())
        }
        Command::Sample { circuit, shots, seed, workers, out } => {
            set_workers(workers)?;
            let c = read_circuit(&circuit)?;
            emit(out.as_deref(), &sample(&c, shots, seed)?.to_text())
        }
        Command::Decode { circuit, samples, out } => {
            let c = read_circuit(&circuit)?;
            let text = fs::read_to_string(&samples).with_context(|| format!("reading {}", samples.display()))?;
            let batch = SampleBatch::from_text(&text).with_context(|| format!("parsing {}", samples.display()))?;
            if batch.detectors.cols() != c.detectors.len() || batch.observables.cols() != c.observables.len() {
                bail!(
                    "samples have {} detectors and {} observables; circuit has {} and {}",
                    batch.detectors.cols(),
                    batch.observables.cols(),
                    c.detectors.len(),
                    c.observables.len()
                );
            }
            let decoder = CircuitDecoder::from_circuit(&c)?;
            let predictions: Vec<u64> = (0..batch.shots)
                .map(|r| decoder.decode(&batch.detectors.row_ones(r)))
                .collect::<hexqec_core::Result<_>>()?;
            if let Some(path) = out {
                let no = c.observables.len();
                let mut s = format!("{} {}\n", batch.shots, no);
                for &pred in &predictions {
                    s.extend((0..no).map(|k| if pred >> k & 1 == 1 { '1' } else { '0' }));
                    s.push('\n');
                }
                fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
            }
            for (k, r) in logical_error_rates(&batch, &predictions)?.iter().enumerate() {
                println!(
                    "observable {k}: {} failures in {} shots, rate {:.6e} (95% CI {:.6e} to {:.6e})",
                    r.failures, r.shots, r.rate, r.ci_low, r.ci_high
                );
            }
            Ok(())
        }
        Command::Sweep { preset, code, structure, eta, d, p, shots, seed, workers, idle, out } => {
            let structures = if structure.is_empty() { vec![Structure::HeavyHex] } else { structure };
            let mut config = match preset {
                Preset::Desk => SweepConfig::desk(structures[0], vec![Eta::DEPOLARIZING]),
                Preset::Full => SweepConfig::full(structures[0]),
            };
            config.structures = structures;
            if !code.is_empty() {
                config.families = code;
            }
            if !eta.is_empty() {
                config.etas = eta;
            }
            if !d.is_empty() {
                config.ds = d;
            }
            if let Some(p) = p {
                config.ps = parse_grid(&p)?;
            }
            if let Some(s) = shots {
                config.shots = s;
            }
            if let Some(i) = idle {
                config.idle = i;
            }
            config.seed = seed;
            config.workers = workers;
            config.validate()?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let total = config.points().len();
            let done = std::sync::atomic::AtomicUsize::new(0);
            let points = run_sweep(&config, |r| {
                let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                eprintln!(
                    "[{k}/{total}] {} {} eta={} d={} p={} e_total={:.4e}",
                    r.family, r.structure, r.eta, r.d, r.p, r.e_total
                );
            })?;
            write_points_csv(&out.join("points.csv"), &points)?;
            let thresholds = if config.ds.len() >= 2 && config.ps.len() >= 3 {
                estimate_thresholds(&points, BOOTSTRAP_RESAMPLES, seed)?
            } else {
                Vec::new()
            };
            SweepReport::new(Some(config), seed, points, thresholds).write(&out.join("sweep.json"))?;
            Ok(())
        }
        Command::Threshold { input, out, bootstrap, seed } => {
            let csv = if input.is_dir() { input.join("points.csv") } else { input };
            let points = read_points_csv(&csv).with_context(|| format!("reading {}", csv.display()))?;
            if points.is_empty() {
                bail!("{} has no rate points", csv.display());
            }
            let estimates = estimate_thresholds(&points, bootstrap, seed)?;
            write_thresholds_csv(&out, &estimates)?;
            for e in &estimates {
                match e.p_th {
                    Some(p) => eprintln!(
                        "{} {} eta={}: p_th = {:.4}% [{}]",
                        e.family,
                        e.structure,
                        e.eta,
                        100.0 * p,
                        match (e.ci_low, e.ci_high) {
                            (Some(lo), Some(hi)) => format!("{:.4}%, {:.4}%", 100.0 * lo, 100.0 * hi),
                            _ => "no interval".to_string(),
                        }
                    ),
                    None => eprintln!("{} {} eta={}: {:?}: {}", e.family, e.structure, e.eta, e.status, e.diagnostic),
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
