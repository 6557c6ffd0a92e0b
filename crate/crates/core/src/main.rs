use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use povmforge::bench::{emit_report, run_experiment, BenchFile};
use povmforge::estimator::{estimate, estimate_json, BMatrix, OmegaTable};
use povmforge::noise::{real_effects_dilation, real_effects_pm, NoiseConfig, NoiseModel};
use povmforge::povm::{default_dilation_angles, PmFamily, Povm, PovmFile, PovmFamily};
use povmforge::qcore::{ground_state, PauliObservable, StateFile};
use povmforge::sampler::{sample_shots, sample_shots_noisy};
use povmforge::tomography::{
    max_effect_error, run_native_qdt, run_qdt, DilationPipelineSource, PmPipelineSource, ShotMode, TomographyReport,
    TomographyTarget,
};
use povmforge::{Error, Result};

#[derive(Parser)]
#[command(name = "povmforge", version, about = "Simulated IC-POVM measurements, detector tomography and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect POVM spec files.
    Povm {
        #[command(subcommand)]
        action: PovmAction,
    },
    /// Sample a POVM on a state and estimate an observable.
    Estimate {
        /// State file (JSON), or `ground` for the observable's ground state.
        #[arg(long, env = "POVMFORGE_STATE")]
        state: String,
        /// Hamiltonian file: one `<coefficient> <Pauli word>` per line.
        #[arg(long, env = "POVMFORGE_OBSERVABLE")]
        observable: PathBuf,
        #[arg(long, env = "POVMFORGE_POVM")]
        povm: PathBuf,
        #[arg(long, env = "POVMFORGE_SHOTS")]
        shots: u64,
        #[arg(long, env = "POVMFORGE_SEED", default_value_t = 0)]
        seed: u64,
        /// Noise config file, or `none`.
        #[arg(long, env = "POVMFORGE_NOISE", default_value = "none")]
        noise: String,
        /// Also write the shot record here.
        #[arg(long, env = "POVMFORGE_RECORD")]
        record: Option<PathBuf>,
    },
    /// Detector tomography of a simulated noisy detector.
    Qdt {
        /// Noise config file, or `none`.
        #[arg(long, env = "POVMFORGE_NOISE")]
        noise: String,
        /// Shots per input state; 0 uses exact probabilities.
        #[arg(long, env = "POVMFORGE_SHOTS")]
        shots: u64,
        #[arg(long, env = "POVMFORGE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "POVMFORGE_QUBITS", default_value_t = 1)]
        qubits: usize,
        #[arg(long, value_enum, env = "POVMFORGE_TARGET", default_value = "native")]
        target: QdtTarget,
        /// Write the report here instead of stdout.
        #[arg(long, env = "POVMFORGE_OUT")]
        out: Option<PathBuf>,
    },
    /// Run convergence experiments and write CSV curves plus a summary.
    Bench {
        #[arg(long, env = "POVMFORGE_CONFIG")]
        config: PathBuf,
        #[arg(long, env = "POVMFORGE_OUT", default_value = "bench-report")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PovmAction {
    /// Check that a spec builds a valid, informationally complete POVM.
    Validate {
        #[arg(env = "POVMFORGE_SPEC")]
        spec: PathBuf,
    },
    /// Print the effects of a spec as a matrix report.
    Effects {
        #[arg(env = "POVMFORGE_SPEC")]
        spec: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QdtTarget {
    /// The bare computational-basis readout.
    Native,
    /// The full PM-simulable pipeline at the default POVM.
    Pm,
    /// The full dilation pipeline at the default angles.
    Dilation,
}

fn load_noise(arg: &str) -> Result<Option<NoiseModel>> {
    if arg == "none" {
        return Ok(None);
    }
    Ok(Some(NoiseConfig::from_file(arg)?.to_model()?))
}

fn povm_validate(spec: &Path) -> Result<()> {
    let povms = match PovmFile::from_file(spec)? {
        PovmFile::Shared(p) => vec![p],
        PovmFile::PerQubit(ps) => ps,
    };
    for (q, p) in povms.iter().enumerate() {
        let e = p.effects();
        let s = e.smallest_singular_value();
        if !e.is_informationally_complete() {
            return Err(Error::NotInformationallyComplete(s));
        }
        println!(
            "qubit {q}: K={} M={} valid, informationally complete (smallest singular value {s:.6})",
            p.num_bases(),
            p.num_outcomes()
        );
    }
    Ok(())
}

fn povm_effects(spec: &Path) -> Result<()> {
    let povms = match PovmFile::from_file(spec)? {
        PovmFile::Shared(p) => vec![p],
        PovmFile::PerQubit(ps) => ps,
    };
    let mut report = TomographyReport::default();
    for (q, p) in povms.iter().enumerate() {
        report.push(TomographyTarget::from_povm(format!("qubit{q}"), &p.effects(), None, 0));
    }
    println!("{}", report.to_json());
    Ok(())
}

fn run_estimate(
    state: &str,
    observable: &Path,
    povm: &Path,
    shots: u64,
    seed: u64,
    noise: &str,
    record: Option<&Path>,
) -> Result<()> {
    let obs = PauliObservable::from_file(observable)?;
    let rho = if state == "ground" {
        ground_state(&obs)?.1
    } else {
        let text = std::fs::read_to_string(state)?;
        serde_json::from_str::<StateFile>(&text)?.into_state()?
    };
    let n = rho.num_qubits();
    let specs = match PovmFile::from_file(povm)? {
        PovmFile::Shared(p) => vec![p; n],
        PovmFile::PerQubit(ps) => ps,
    };
    let noise = load_noise(noise)?;
    let rec = match &noise {
        None => sample_shots(&rho, &specs, shots, seed)?,
        Some(nm) => sample_shots_noisy(&rho, &specs, nm, shots, seed)?,
    };
    // noisy data is still interpreted with the ideal effects: the raw estimate
    let effects: Vec<Povm> = specs.iter().map(|s| s.effects()).collect();
    let table = OmegaTable::new(obs, BMatrix::from_povms(&effects)?)?;
    let result = estimate(&rec.outcomes, &table)?;
    if let Some(path) = record {
        rec.write(path)?;
    }
    println!("{}", estimate_json(&result));
    Ok(())
}

fn run_qdt_command(
    noise: &str,
    shots: u64,
    seed: u64,
    qubits: usize,
    target: QdtTarget,
    out: Option<&Path>,
) -> Result<()> {
    let noise = load_noise(noise)?.unwrap_or_else(NoiseModel::ideal);
    let mode = match shots {
        0 => ShotMode::Exact,
        s => ShotMode::Shots(s),
    };
    let mut report = TomographyReport::default();
    for q in 0..qubits {
        let qseed = povmforge::sampler::derive_seed(seed, 0x51d7, q as u64);
        let (name, effects, truth) = match target {
            QdtTarget::Native => {
                let e = run_native_qdt(&noise, 1, q, mode, qseed)?;
                let pair = noise.readout(q)?;
                (format!("native{q}"), e, Povm::new(pair.to_vec())?)
            }
            QdtTarget::Pm => {
                let family = PmFamily::default();
                let spec = family.povm_from_params(&PovmFamily::Pm(family).initial_params())?;
                let truth = real_effects_pm(&spec, &noise, q)?;
                let src = PmPipelineSource {
                    spec,
                    noise: Some(noise.clone()),
                    qubit: q,
                };
                (format!("pm{q}"), run_qdt(&src, mode, qseed)?, truth)
            }
            QdtTarget::Dilation => {
                let angles = default_dilation_angles().to_vec();
                let truth = real_effects_dilation(&angles, &noise, q)?;
                let src = DilationPipelineSource {
                    angles,
                    noise: noise.clone(),
                    qubit: q,
                };
                (format!("dilation{q}"), run_qdt(&src, mode, qseed)?, truth)
            }
        };
        eprintln!("{name}: max effect error vs ground truth {:.3e}", max_effect_error(&effects, &truth));
        report.push(TomographyTarget::from_povm(name, &effects, mode.shots(), qseed));
    }
    match out {
        Some(p) => report.write(p)?,
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

fn run_bench(config: &Path, out: &Path) -> Result<()> {
    let experiments = BenchFile::from_file(config)?;
    let mut curves = vec![];
    for e in &experiments {
        eprintln!("running {} ({} repetitions)", e.label(), e.repetitions);
        curves.push(run_experiment(e)?);
    }
    for p in emit_report(&curves, out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Povm {
            action: PovmAction::Validate { spec },
        } => povm_validate(spec),
        Command::Povm {
            action: PovmAction::Effects { spec },
        } => povm_effects(spec),
        Command::Estimate {
            state,
            observable,
            povm,
            shots,
            seed,
            noise,
            record,
        } => run_estimate(state, observable, povm, *shots, *seed, noise, record.as_deref()),
        Command::Qdt {
            noise,
            shots,
            seed,
            qubits,
            target,
            out,
        } => run_qdt_command(noise, *shots, *seed, *qubits, *target, out.as_deref()),
        Command::Bench { config, out } => run_bench(config, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
