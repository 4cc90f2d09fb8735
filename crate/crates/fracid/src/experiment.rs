//! Canned end-to-end experiments.
//!
//! Each experiment binds data generation, corruption, identification and
//! CSV emission into one reproducible run. The canned names are the ones
//! exposed by the CLI `reproduce` subcommand:
//!
//! * `section-4a` - noiseless coefficient identification at known orders.
//! * `section-4b` - the same with uniform measurement corruption.
//! * `table-1` - differintegrals of bounded noise across a grid of orders,
//!   one row per draw: integration attenuates, differentiation amplifies.
//! * `table-2` - repeated full identification across swarm seeds.
//! * `figures` - plot-ready response, corruption and convergence traces.
//! * `custom` - one full identification with user-chosen model, noise and
//!   swarm settings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::csvio::{write_history_csv, write_signal_csv, write_table_csv};
use crate::differint::{differintegrate, DifferintegralRequest};
use crate::error::{Error, Result};
use crate::ident::{build_equations, solve_coefficients, LinearIdentConfig};
use crate::noise::{corrupt, generate_noise, NoiseSpec};
use crate::pipeline::{identify_full, IdentificationProblem};
use crate::pso::PsoConfig;
use crate::signal::SampledSignal;
use crate::sim::{simulate_step_response, FractionalModel};

/// The canned experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    CleanCoefficients,
    NoisyCoefficients,
    AttenuationTable,
    RepeatedIdentification,
    ResponseFigures,
    Custom,
}

impl ExperimentKind {
    /// The name used on the command line and in artifact file names.
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::CleanCoefficients => "section-4a",
            ExperimentKind::NoisyCoefficients => "section-4b",
            ExperimentKind::AttenuationTable => "table-1",
            ExperimentKind::RepeatedIdentification => "table-2",
            ExperimentKind::ResponseFigures => "figures",
            ExperimentKind::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let name = name.strip_prefix("paper-").unwrap_or(name);
        match name {
            "section-4a" => Ok(ExperimentKind::CleanCoefficients),
            "section-4b" => Ok(ExperimentKind::NoisyCoefficients),
            "table-1" => Ok(ExperimentKind::AttenuationTable),
            "table-2" => Ok(ExperimentKind::RepeatedIdentification),
            "figures" => Ok(ExperimentKind::ResponseFigures),
            "custom" => Ok(ExperimentKind::Custom),
            other => Err(Error::Config(format!(
                "unknown experiment {other:?}; expected one of section-4a, section-4b, \
                 table-1, table-2, figures, custom"
            ))),
        }
    }
}

/// Full description of one experiment run. Start from [`ExperimentSpec::new`]
/// and override fields directly or through [`ExperimentSpec::apply`].
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Ground-truth model generating the synthetic data.
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Record length in seconds; also the evaluation instant and memory
    /// length of the coefficient solve.
    pub duration: f64,
    /// Dense sample period for coefficient-solve experiments and signal
    /// artifacts.
    pub period: f64,
    /// Sample period of identification records and fitness comparisons.
    pub fitness_period: f64,
    /// Noise half-width; zero means clean data.
    pub amplitude: f64,
    /// Base seed; run i uses seed + i.
    pub seed: u64,
    /// Number of repeated runs (swarm seeds or noise draws).
    pub runs: usize,
    pub swarm_size: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    /// Initial velocities are drawn from +/- this value per dimension.
    pub velocity_init: f64,
    pub alpha_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    /// Defaults for `kind`: the reference model (0.8, 0.5, 1.0, 2.23, 0.88),
    /// 10 s records, dense period 1 ms, identification rate 20 Hz, the
    /// standard swarm settings, and per-kind noise amplitude.
    pub fn new(kind: ExperimentKind) -> Self {
        let amplitude = match kind {
            ExperimentKind::NoisyCoefficients | ExperimentKind::ResponseFigures => 0.05,
            ExperimentKind::AttenuationTable => 0.01,
            _ => 0.0,
        };
        Self {
            kind,
            a1: 0.8,
            a2: 0.5,
            a3: 1.0,
            alpha: 2.23,
            beta: 0.88,
            duration: 10.0,
            period: 0.001,
            fitness_period: 0.05,
            amplitude,
            seed: 1,
            runs: match kind {
                ExperimentKind::NoisyCoefficients => 1,
                _ => 10,
            },
            swarm_size: 10,
            iterations: 40,
            c1: 1.4,
            c2: 1.4,
            inertia_start: 0.9,
            inertia_end: 0.4,
            velocity_init: 0.2,
            alpha_range: (2.0, 2.4),
            beta_range: (0.7, 1.1),
            out_dir: PathBuf::from("."),
        }
    }

    /// Applies one `key = value` override; keys mirror the CLI flag names.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num(key: &str, value: &str) -> Result<f64> {
            value.trim().parse().map_err(|e| {
                Error::Config(format!(
                    "field {key}: cannot parse {value:?} as a number: {e}"
                ))
            })
        }
        fn int(key: &str, value: &str) -> Result<u64> {
            value.trim().parse().map_err(|e| {
                Error::Config(format!(
                    "field {key}: cannot parse {value:?} as an integer: {e}"
                ))
            })
        }
        match key {
            "name" | "kind" => self.kind = ExperimentKind::parse(value.trim())?,
            "a1" => self.a1 = num(key, value)?,
            "a2" => self.a2 = num(key, value)?,
            "a3" => self.a3 = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "duration" | "dur" => self.duration = num(key, value)?,
            "period" => self.period = num(key, value)?,
            "fitness-period" => self.fitness_period = num(key, value)?,
            "amplitude" => self.amplitude = num(key, value)?,
            "seed" => self.seed = int(key, value)?,
            "runs" | "seeds" | "draws" => self.runs = int(key, value)? as usize,
            "swarm-size" => self.swarm_size = int(key, value)? as usize,
            "iterations" => self.iterations = int(key, value)? as usize,
            "c1" => self.c1 = num(key, value)?,
            "c2" => self.c2 = num(key, value)?,
            "inertia-start" => self.inertia_start = num(key, value)?,
            "inertia-end" => self.inertia_end = num(key, value)?,
            "velocity-init" => self.velocity_init = num(key, value)?,
            "alpha-min" => self.alpha_range.0 = num(key, value)?,
            "alpha-max" => self.alpha_range.1 = num(key, value)?,
            "beta-min" => self.beta_range.0 = num(key, value)?,
            "beta-max" => self.beta_range.1 = num(key, value)?,
            "out-dir" => self.out_dir = PathBuf::from(value.trim()),
            other => {
                return Err(Error::Config(format!(
                    "unknown configuration key {other:?}"
                )))
            }
        }
        Ok(())
    }

    fn model(&self) -> Result<FractionalModel> {
        FractionalModel::new(self.a1, self.a2, self.a3, self.alpha, self.beta)
    }

    fn pso_config(&self, seed: u64) -> PsoConfig {
        PsoConfig {
            dims: 2,
            swarm_size: self.swarm_size,
            iterations: self.iterations,
            c1: self.c1,
            c2: self.c2,
            inertia_start: self.inertia_start,
            inertia_end: self.inertia_end,
            position_bounds: vec![self.alpha_range, self.beta_range],
            velocity_init_bounds: vec![
                (-self.velocity_init, self.velocity_init),
                (-self.velocity_init, self.velocity_init),
            ],
            seed,
        }
    }

    fn runs_or(&self, default: usize) -> usize {
        if self.runs == 0 {
            default
        } else {
            self.runs
        }
    }
}

/// Parses a flat `key = value` configuration file (`#` starts a comment).
pub fn load_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "config line {}: expected key = value, got {raw:?}",
                lineno + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// What an experiment produced: artifacts on disk, human-readable summary
/// lines, and named numeric results for programmatic checks.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub artifacts: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
}

impl ExperimentReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            artifacts: Vec::new(),
            summary: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }
}

/// Runs one experiment and writes its artifacts under `spec.out_dir`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    std::fs::create_dir_all(&spec.out_dir)?;
    match spec.kind {
        ExperimentKind::CleanCoefficients => run_coefficients(spec, false),
        ExperimentKind::NoisyCoefficients => run_coefficients(spec, true),
        ExperimentKind::AttenuationTable => run_attenuation_table(spec),
        ExperimentKind::RepeatedIdentification => run_repeated_identification(spec),
        ExperimentKind::ResponseFigures => run_figures(spec),
        ExperimentKind::Custom => run_custom(spec),
    }
}

fn artifact(report: &mut ExperimentReport, spec: &ExperimentSpec, stem: &str) -> PathBuf {
    let path = spec.out_dir.join(format!("{}_{stem}.csv", report.name));
    report.artifacts.push(path.clone());
    path
}

/// Sum of squared deviations between a model's dense step response and a
/// reference record on the same grid.
fn response_sse(model: &FractionalModel, reference: &SampledSignal) -> Result<f64> {
    let response = simulate_step_response(model, reference.duration(), reference.sample_period())?;
    Ok(response
        .samples()
        .iter()
        .zip(reference.samples())
        .map(|(p, c)| (p - c) * (p - c))
        .sum())
}

fn run_coefficients(spec: &ExperimentSpec, noisy: bool) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.kind.name());
    let model = spec.model()?;
    let clean = simulate_step_response(&model, spec.duration, spec.period)?;
    let record = if noisy {
        let noise_spec = NoiseSpec::new(spec.amplitude, spec.seed)?;
        corrupt(&clean, &noise_spec)?
    } else {
        clean.clone()
    };

    let stem = if noisy {
        "corrupted_response"
    } else {
        "response"
    };
    write_signal_csv(&artifact(&mut report, spec, stem), &record)?;

    let cfg = LinearIdentConfig::new(spec.duration, spec.duration, spec.period);
    let system = build_equations(&record, spec.alpha, spec.beta, &cfg)?;
    let rows: Vec<Vec<f64>> = (0..3)
        .map(|r| {
            vec![
                system.matrix[r][0],
                system.matrix[r][1],
                system.matrix[r][2],
                system.rhs[r],
            ]
        })
        .collect();
    write_table_csv(
        &artifact(&mut report, spec, "equations"),
        &["m1", "m2", "m3", "rhs"],
        &rows,
    )?;

    let (a1, a2, a3) = solve_coefficients(&system)?;
    let identified = FractionalModel::new(a1, a2, a3, spec.alpha, spec.beta)?;
    let sse = response_sse(&identified, &clean)?;

    report.summary.push(format!(
        "solved coefficients at orders ({}, {}): a1 = {a1:.6}, a2 = {a2:.6}, a3 = {a3:.6}",
        spec.alpha, spec.beta
    ));
    for (name, est, truth) in [
        ("a1", a1, spec.a1),
        ("a2", a2, spec.a2),
        ("a3", a3, spec.a3),
    ] {
        let pct = (est - truth).abs() / truth.abs() * 100.0;
        report.metrics.insert(name.to_string(), est);
        report.metrics.insert(format!("{name}_error_pct"), pct);
        report
            .summary
            .push(format!("{name}: {est:.6} vs {truth} ({pct:.4}% error)"));
    }
    report.metrics.insert("sse".into(), sse);
    report.summary.push(format!(
        "sum of squared deviations of the identified model vs the clean record: {sse:.4e}"
    ));
    Ok(report)
}

const ATTENUATION_ORDERS: [f64; 10] = [1.5, 1.2, 0.9, 0.6, 0.3, -0.3, -0.6, -0.9, -1.2, -1.5];

fn run_attenuation_table(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.kind.name());
    let draws = spec.runs_or(10);
    let length = ((spec.duration / spec.period) * (1.0 + 1e-9) + 1e-9).floor() as usize + 1;

    let mut header: Vec<String> = vec!["draw".into()];
    header.extend(ATTENUATION_ORDERS.iter().map(|o| format!("order_{o}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let mut rows = Vec::with_capacity(draws);
    let mut per_order: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); ATTENUATION_ORDERS.len()];
    for draw in 0..draws {
        let noise_spec = NoiseSpec::new(spec.amplitude, spec.seed + draw as u64)?;
        let e = generate_noise(length, spec.period, &noise_spec)?;
        let mut row = vec![(draw + 1) as f64];
        for (i, &order) in ATTENUATION_ORDERS.iter().enumerate() {
            let value = differintegrate(
                &e,
                &DifferintegralRequest {
                    order,
                    eval_time: spec.duration,
                    memory_length: spec.duration,
                },
            )?;
            per_order[i].push(value.abs());
            row.push(value);
        }
        rows.push(row);
    }
    write_table_csv(&artifact(&mut report, spec, "values"), &header_refs, &rows)?;

    for (i, &order) in ATTENUATION_ORDERS.iter().enumerate() {
        per_order[i].sort_by(f64::total_cmp);
        let median = per_order[i][per_order[i].len() / 2];
        report.metrics.insert(format!("median_abs_{order}"), median);
        report
            .summary
            .push(format!("order {order}: median |D^a e| = {median:.4e}"));
    }
    Ok(report)
}

fn identification_problem(
    spec: &ExperimentSpec,
) -> Result<(IdentificationProblem, FractionalModel)> {
    let model = spec.model()?;
    let clean = simulate_step_response(&model, spec.duration, spec.fitness_period)?;
    let measured = if spec.amplitude > 0.0 {
        corrupt(&clean, &NoiseSpec::new(spec.amplitude, spec.seed)?)?
    } else {
        clean
    };
    let problem = IdentificationProblem {
        measured_output: measured,
        alpha_range: spec.alpha_range,
        beta_range: spec.beta_range,
        linear_cfg: LinearIdentConfig::new(spec.duration, spec.duration, spec.fitness_period),
        fitness_sample_period: spec.fitness_period,
        fitness_horizon: spec.duration,
        ground_truth: Some(model),
    };
    Ok((problem, model))
}

fn run_repeated_identification(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.kind.name());
    let runs = spec.runs_or(10);
    let (problem, _) = identification_problem(spec)?;

    let mut rows = Vec::with_capacity(runs);
    let mut worst_fitness = 0.0_f64;
    for run in 0..runs {
        let result = identify_full(&problem, &spec.pso_config(spec.seed + run as u64))?;
        let m = result.model;
        rows.push(vec![
            m.alpha(),
            m.beta(),
            m.a1(),
            m.a2(),
            m.a3(),
            result.fitness,
        ]);
        worst_fitness = worst_fitness.max(result.fitness);
        report.summary.push(format!(
            "run {:2}: alpha = {:.4}, beta = {:.4}, a = ({:.4}, {:.4}, {:.4}), F = {:.4e}",
            run + 1,
            m.alpha(),
            m.beta(),
            m.a1(),
            m.a2(),
            m.a3(),
            result.fitness
        ));
    }
    write_table_csv(
        &artifact(&mut report, spec, "runs"),
        &["alpha", "beta", "a1", "a2", "a3", "fitness"],
        &rows,
    )?;
    report.metrics.insert("runs".into(), runs as f64);
    report.metrics.insert("worst_fitness".into(), worst_fitness);
    for (i, name) in ["alpha", "beta", "a1", "a2", "a3"].iter().enumerate() {
        let lo = rows.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max);
        report.metrics.insert(format!("{name}_min"), lo);
        report.metrics.insert(format!("{name}_max"), hi);
    }
    Ok(report)
}

fn run_custom(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.kind.name());
    let (problem, _) = identification_problem(spec)?;
    write_signal_csv(
        &artifact(&mut report, spec, "measured"),
        &problem.measured_output,
    )?;
    let result = identify_full(&problem, &spec.pso_config(spec.seed))?;
    write_history_csv(
        &artifact(&mut report, spec, "convergence"),
        &result.convergence_history,
    )?;
    summarize_identification(&mut report, &result.model, result.fitness);
    if let Some(errs) = result.per_parameter_error_pct {
        for (name, err) in ["alpha", "beta", "a1", "a2", "a3"].iter().zip(errs) {
            report.metrics.insert(format!("{name}_error_pct"), err);
        }
        report.summary.push(format!(
            "errors vs ground truth (%): alpha {:.4}, beta {:.4}, a1 {:.4}, a2 {:.4}, a3 {:.4}",
            errs[0], errs[1], errs[2], errs[3], errs[4]
        ));
    }
    Ok(report)
}

fn summarize_identification(report: &mut ExperimentReport, model: &FractionalModel, fitness: f64) {
    report.summary.push(format!("identified model: {model}"));
    report.summary.push(format!("final fitness: {fitness:.4e}"));
    report.metrics.insert("alpha".into(), model.alpha());
    report.metrics.insert("beta".into(), model.beta());
    report.metrics.insert("a1".into(), model.a1());
    report.metrics.insert("a2".into(), model.a2());
    report.metrics.insert("a3".into(), model.a3());
    report.metrics.insert("fitness".into(), fitness);
}

fn run_figures(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.kind.name());
    let model = spec.model()?;

    let clean = simulate_step_response(&model, spec.duration, spec.period)?;
    write_signal_csv(&artifact(&mut report, spec, "step_response"), &clean)?;

    let noise_spec = NoiseSpec::new(spec.amplitude, spec.seed)?;
    let e = generate_noise(clean.len(), spec.period, &noise_spec)?;
    write_signal_csv(&artifact(&mut report, spec, "error_component"), &e)?;
    let corrupted = corrupt(&clean, &noise_spec)?;
    write_signal_csv(
        &artifact(&mut report, spec, "corrupted_response"),
        &corrupted,
    )?;

    let mut ident_spec = spec.clone();
    ident_spec.amplitude = 0.0;
    let (problem, _) = identification_problem(&ident_spec)?;
    let result = identify_full(&problem, &spec.pso_config(spec.seed))?;
    write_history_csv(
        &artifact(&mut report, spec, "convergence"),
        &result.convergence_history,
    )?;
    let identified = simulate_step_response(&result.model, spec.duration, spec.period)?;
    write_signal_csv(
        &artifact(&mut report, spec, "identified_response"),
        &identified,
    )?;
    summarize_identification(&mut report, &result.model, result.fitness);
    Ok(report)
}
