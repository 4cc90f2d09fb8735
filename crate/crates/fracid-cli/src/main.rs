//! Command-line front end: simulation, corruption, differintegration,
//! coefficient identification, full identification and canned experiments.
//!
//! Every subcommand echoes its effective configuration (defaults resolved,
//! seed included) to stderr before computing, keeps stdout machine-readable,
//! and accepts `--seed` for reproducibility; a missing seed is drawn fresh
//! and printed. Exit codes: 0 success, 1 usage or configuration error,
//! 2 numerical failure (singular system, divergence, window violations).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use fracid::csvio::{read_signal_csv, write_history_csv, write_signal, write_signal_csv};
use fracid::experiment::load_config_file;
use fracid::{
    corrupt, differintegrate, identify_coefficients, identify_full, run_experiment,
    simulate_step_response, DifferintegralRequest, Error, ExperimentKind, ExperimentSpec,
    FractionalModel, IdentificationProblem, LinearIdentConfig, NoiseSpec, PsoConfig, Result,
};

#[derive(Parser)]
#[command(
    name = "fracid",
    version,
    about = "Identification of fractional-order systems 1/(a1 s^alpha + a2 s^beta + a3) \
             from sampled step-response data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Ground-truth model parameters shared by the synthetic-data subcommands.
#[derive(Args)]
struct ModelArgs {
    /// Leading coefficient a1 (nonzero)
    #[arg(long, default_value_t = 0.8)]
    a1: f64,
    /// Middle coefficient a2 (may be zero)
    #[arg(long, default_value_t = 0.5)]
    a2: f64,
    /// Dc coefficient a3 (nonzero)
    #[arg(long, default_value_t = 1.0)]
    a3: f64,
    /// Higher fractional order (alpha > beta)
    #[arg(long, default_value_t = 2.23)]
    alpha: f64,
    /// Lower fractional order (beta > 0)
    #[arg(long, default_value_t = 0.88)]
    beta: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<FractionalModel> {
        FractionalModel::new(self.a1, self.a2, self.a3, self.alpha, self.beta)
    }
}

#[derive(Args)]
struct SwarmArgs {
    #[arg(long, default_value_t = 10)]
    swarm_size: usize,
    #[arg(long, default_value_t = 40)]
    iterations: usize,
    /// Cognitive learning rate
    #[arg(long, default_value_t = 1.4)]
    c1: f64,
    /// Social learning rate
    #[arg(long, default_value_t = 1.4)]
    c2: f64,
    #[arg(long, default_value_t = 0.9)]
    inertia_start: f64,
    #[arg(long, default_value_t = 0.4)]
    inertia_end: f64,
    /// Initial velocities are drawn uniformly from +/- this value
    #[arg(long, default_value_t = 0.2)]
    velocity_init: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the unit-step response of a model and emit time,value CSV
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Record length in seconds
        #[arg(long, default_value_t = 10.0)]
        dur: f64,
        /// Sample period in seconds
        #[arg(long, default_value_t = 0.001)]
        period: f64,
        /// Output CSV path; omitted means stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Unused here; accepted so every subcommand is seedable
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Add seeded uniform noise in [-amplitude, amplitude] to a CSV signal
    Corrupt {
        #[arg(long)]
        amplitude: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Input time,value CSV
        input: PathBuf,
        /// Output CSV path
        output: PathBuf,
    },
    /// Evaluate one differintegral of a CSV signal and print the value
    Diffint {
        /// Derivation order (negative integrates)
        #[arg(long, allow_hyphen_values = true)]
        order: f64,
        /// Memory length in seconds
        #[arg(long)]
        memory: f64,
        /// Evaluation instant in seconds
        #[arg(long)]
        time: f64,
        #[arg(long)]
        seed: Option<u64>,
        input: PathBuf,
    },
    /// Solve the three-equation system for (a1, a2, a3) at known orders
    IdentifyCoeffs {
        /// Higher fractional order of the measured system
        #[arg(long)]
        alpha: f64,
        /// Lower fractional order of the measured system
        #[arg(long)]
        beta: f64,
        /// Evaluation instant; defaults to the record end
        #[arg(long)]
        time: Option<f64>,
        /// Memory length; defaults to the record span
        #[arg(long)]
        memory: Option<f64>,
        /// Integration shift; defaults to the smallest integer above alpha
        #[arg(long)]
        shift_order: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        input: PathBuf,
    },
    /// Complete identification: swarm over (alpha, beta), coefficients per candidate
    IdentifyFull {
        /// Measured time,value CSV; omitted generates a clean synthetic record
        input: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        swarm: SwarmArgs,
        #[arg(long, default_value_t = 2.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 2.4)]
        alpha_max: f64,
        #[arg(long, default_value_t = 0.7)]
        beta_min: f64,
        #[arg(long, default_value_t = 1.1)]
        beta_max: f64,
        /// Fitness sampling period; also the synthetic record period
        #[arg(long, default_value_t = 0.05)]
        fitness_period: f64,
        /// Synthetic record length in seconds
        #[arg(long, default_value_t = 10.0)]
        dur: f64,
        /// Differintegral evaluation instant; defaults to the record end
        #[arg(long)]
        time: Option<f64>,
        /// Memory length; defaults to the record span
        #[arg(long)]
        memory: Option<f64>,
        /// Where to write the per-iteration convergence CSV
        #[arg(long)]
        out_convergence: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-run a canned experiment and write its CSV artifacts
    Reproduce {
        /// One of: section-4a, section-4b, table-1, table-2, figures, custom
        name: Option<String>,
        /// Flat key = value configuration file; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of repeated runs or noise draws
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Noise half-width override
        #[arg(long)]
        amplitude: Option<f64>,
        /// Artifact directory; defaults to the config file's out-dir, then "."
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| rand::rng().random())
}

fn print_config(subcommand: &str, entries: &[(&str, String)]) {
    let body: Vec<String> = entries.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("config: subcommand={subcommand} {}", body.join(" "));
}

fn opt_path(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            model,
            dur,
            period,
            out,
            seed,
        } => {
            let seed = resolve_seed(seed);
            print_config(
                "simulate",
                &[
                    ("a1", model.a1.to_string()),
                    ("a2", model.a2.to_string()),
                    ("a3", model.a3.to_string()),
                    ("alpha", model.alpha.to_string()),
                    ("beta", model.beta.to_string()),
                    ("dur", dur.to_string()),
                    ("period", period.to_string()),
                    ("out", opt_path(&out)),
                    ("seed", seed.to_string()),
                ],
            );
            let signal = simulate_step_response(&model.model()?, dur, period)?;
            match out {
                Some(path) => write_signal_csv(&path, &signal)?,
                None => write_signal(&mut std::io::stdout().lock(), &signal)?,
            }
            Ok(())
        }
        Command::Corrupt {
            amplitude,
            seed,
            input,
            output,
        } => {
            let seed = resolve_seed(seed);
            print_config(
                "corrupt",
                &[
                    ("amplitude", amplitude.to_string()),
                    ("input", input.display().to_string()),
                    ("output", output.display().to_string()),
                    ("seed", seed.to_string()),
                ],
            );
            let signal = read_signal_csv(&input)?;
            let noisy = corrupt(&signal, &NoiseSpec::new(amplitude, seed)?)?;
            write_signal_csv(&output, &noisy)
        }
        Command::Diffint {
            order,
            memory,
            time,
            seed,
            input,
        } => {
            let seed = resolve_seed(seed);
            print_config(
                "diffint",
                &[
                    ("order", order.to_string()),
                    ("memory", memory.to_string()),
                    ("time", time.to_string()),
                    ("input", input.display().to_string()),
                    ("seed", seed.to_string()),
                ],
            );
            let signal = read_signal_csv(&input)?;
            let value = differintegrate(
                &signal,
                &DifferintegralRequest {
                    order,
                    eval_time: time,
                    memory_length: memory,
                },
            )?;
            println!("{value}");
            Ok(())
        }
        Command::IdentifyCoeffs {
            alpha,
            beta,
            time,
            memory,
            shift_order,
            seed,
            input,
        } => {
            let seed = resolve_seed(seed);
            let signal = read_signal_csv(&input)?;
            let time = time.unwrap_or_else(|| signal.end_time());
            let memory = memory.unwrap_or_else(|| signal.duration());
            print_config(
                "identify-coeffs",
                &[
                    ("alpha", alpha.to_string()),
                    ("beta", beta.to_string()),
                    ("time", time.to_string()),
                    ("memory", memory.to_string()),
                    (
                        "shift-order",
                        shift_order.map_or_else(|| "auto".into(), |n| n.to_string()),
                    ),
                    ("input", input.display().to_string()),
                    ("seed", seed.to_string()),
                ],
            );
            let cfg = LinearIdentConfig {
                eval_time: time,
                memory_length: memory,
                sample_period: signal.sample_period(),
                shift_order,
            };
            let (a1, a2, a3) = identify_coefficients(&signal, alpha, beta, &cfg)?;
            println!("a1 = {a1}");
            println!("a2 = {a2}");
            println!("a3 = {a3}");
            Ok(())
        }
        Command::IdentifyFull {
            input,
            model,
            swarm,
            alpha_min,
            alpha_max,
            beta_min,
            beta_max,
            fitness_period,
            dur,
            time,
            memory,
            out_convergence,
            seed,
        } => {
            let seed = resolve_seed(seed);
            let (measured, ground_truth) = match &input {
                Some(path) => (read_signal_csv(path)?, None),
                None => {
                    let truth = model.model()?;
                    (
                        simulate_step_response(&truth, dur, fitness_period)?,
                        Some(truth),
                    )
                }
            };
            let time = time.unwrap_or_else(|| measured.end_time());
            let memory = memory.unwrap_or_else(|| measured.duration());
            print_config(
                "identify-full",
                &[
                    ("input", opt_path(&input)),
                    ("alpha-min", alpha_min.to_string()),
                    ("alpha-max", alpha_max.to_string()),
                    ("beta-min", beta_min.to_string()),
                    ("beta-max", beta_max.to_string()),
                    ("fitness-period", fitness_period.to_string()),
                    ("dur", dur.to_string()),
                    ("time", time.to_string()),
                    ("memory", memory.to_string()),
                    ("swarm-size", swarm.swarm_size.to_string()),
                    ("iterations", swarm.iterations.to_string()),
                    ("c1", swarm.c1.to_string()),
                    ("c2", swarm.c2.to_string()),
                    ("inertia-start", swarm.inertia_start.to_string()),
                    ("inertia-end", swarm.inertia_end.to_string()),
                    ("velocity-init", swarm.velocity_init.to_string()),
                    ("out-convergence", opt_path(&out_convergence)),
                    ("seed", seed.to_string()),
                ],
            );
            let problem = IdentificationProblem {
                linear_cfg: LinearIdentConfig::new(time, memory, measured.sample_period()),
                measured_output: measured,
                alpha_range: (alpha_min, alpha_max),
                beta_range: (beta_min, beta_max),
                fitness_sample_period: fitness_period,
                fitness_horizon: dur.min(time),
                ground_truth,
            };
            let pso_cfg = PsoConfig {
                dims: 2,
                swarm_size: swarm.swarm_size,
                iterations: swarm.iterations,
                c1: swarm.c1,
                c2: swarm.c2,
                inertia_start: swarm.inertia_start,
                inertia_end: swarm.inertia_end,
                position_bounds: vec![(alpha_min, alpha_max), (beta_min, beta_max)],
                velocity_init_bounds: vec![
                    (-swarm.velocity_init, swarm.velocity_init),
                    (-swarm.velocity_init, swarm.velocity_init),
                ],
                seed,
            };
            let result = identify_full(&problem, &pso_cfg)?;
            let m = &result.model;
            println!("alpha = {}", m.alpha());
            println!("beta = {}", m.beta());
            println!("a1 = {}", m.a1());
            println!("a2 = {}", m.a2());
            println!("a3 = {}", m.a3());
            println!("fitness = {:e}", result.fitness);
            println!("model: {m}");
            if let Some(errs) = result.per_parameter_error_pct {
                println!(
                    "errors_pct: alpha={:.4} beta={:.4} a1={:.4} a2={:.4} a3={:.4}",
                    errs[0], errs[1], errs[2], errs[3], errs[4]
                );
            }
            if let Some(path) = out_convergence {
                write_history_csv(&path, &result.convergence_history)?;
            }
            Ok(())
        }
        Command::Reproduce {
            name,
            config,
            seeds,
            seed,
            amplitude,
            out_dir,
        } => {
            let pairs = match &config {
                Some(path) => load_config_file(path)?,
                None => Vec::new(),
            };
            let kind_name = name.clone().or_else(|| {
                pairs
                    .iter()
                    .rev()
                    .find(|(k, _)| k == "name" || k == "kind")
                    .map(|(_, v)| v.clone())
            });
            let Some(kind_name) = kind_name else {
                return Err(Error::Config(
                    "no experiment named: pass a name argument or a config file \
                     containing `name = ...`"
                        .into(),
                ));
            };
            let mut spec = ExperimentSpec::new(ExperimentKind::parse(&kind_name)?);
            let config_sets_seed = pairs.iter().any(|(k, _)| k == "seed");
            for (key, value) in &pairs {
                spec.apply(key, value)?;
            }
            spec.kind = ExperimentKind::parse(&kind_name)?;
            if let Some(runs) = seeds {
                spec.runs = runs;
            }
            match seed {
                Some(seed) => spec.seed = seed,
                None if !config_sets_seed => spec.seed = resolve_seed(None),
                None => {}
            }
            if let Some(amplitude) = amplitude {
                spec.amplitude = amplitude;
            }
            if let Some(out_dir) = out_dir {
                spec.out_dir = out_dir;
            }
            print_config(
                "reproduce",
                &[
                    ("name", spec.kind.name().to_string()),
                    ("config", opt_path(&config)),
                    (
                        "model",
                        format!(
                            "1/({} s^{} + {} s^{} + {})",
                            spec.a1, spec.alpha, spec.a2, spec.beta, spec.a3
                        ),
                    ),
                    ("duration", spec.duration.to_string()),
                    ("period", spec.period.to_string()),
                    ("fitness-period", spec.fitness_period.to_string()),
                    ("amplitude", spec.amplitude.to_string()),
                    ("runs", spec.runs.to_string()),
                    ("seed", spec.seed.to_string()),
                    ("out-dir", spec.out_dir.display().to_string()),
                ],
            );
            let report = run_experiment(&spec)?;
            for line in &report.summary {
                println!("{line}");
            }
            for path in &report.artifacts {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::InvalidModel(_)
        | Error::InvalidSignal(_)
        | Error::Csv(_)
        | Error::Io(_) => 1,
        Error::TimeOutOfRange { .. }
        | Error::WindowOutOfRange { .. }
        | Error::Diverged { .. }
        | Error::IntegerAlpha(_)
        | Error::SingularSystem { .. }
        | Error::NoSolution => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
