//! Full identification: swarm search over the fractional orders with
//! coefficients re-derived per candidate.
//!
//! The key reduction: for a candidate pair `(alpha, beta)` the coefficients
//! `(a1, a2, a3)` are not free — they follow deterministically from the
//! measured record through the three-equation solve. The search space is
//! therefore two-dimensional, and the fitness of a candidate is
//!
//! ```text
//! F(alpha, beta) = sum_i [ c(t_i) - p(t_i) ]^2
//! ```
//!
//! where `c` is the measured output at the fitness instants and `p` the
//! unit-step response of the trial model, simulated at the fitness rate.
//! Candidates whose linear solve is singular, whose trial model is invalid
//! or whose simulation diverges get `F = +inf` and are repelled by the
//! swarm.

use crate::error::{Error, Result};
use crate::ident::{identify_coefficients, LinearIdentConfig};
use crate::pso::{run as run_swarm, PsoConfig, SwarmResult};
use crate::signal::SampledSignal;
use crate::sim::{simulate_step_response, FractionalModel};

/// A measured record plus everything needed to evaluate candidates on it.
#[derive(Debug, Clone)]
pub struct IdentificationProblem {
    /// The sampled (possibly corrupted) step response, starting at t = 0.
    pub measured_output: SampledSignal,
    /// Search range for alpha.
    pub alpha_range: (f64, f64),
    /// Search range for beta.
    pub beta_range: (f64, f64),
    /// Where the coefficient solve evaluates its differintegrals.
    pub linear_cfg: LinearIdentConfig,
    /// Sample period of the fitness comparison; must be an integer multiple
    /// of the measurement period (the record is decimated, never
    /// interpolated).
    pub fitness_sample_period: f64,
    /// Time span of the fitness comparison, from t = 0.
    pub fitness_horizon: f64,
    /// When given, identification results report per-parameter errors
    /// against this model.
    pub ground_truth: Option<FractionalModel>,
}

impl IdentificationProblem {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("alpha", self.alpha_range), ("beta", self.beta_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!(
                    "{name} range ({lo}, {hi}) is not well-ordered"
                )));
            }
        }
        if self.measured_output.start_time() != 0.0 {
            return Err(Error::Config(format!(
                "measured output must start at t = 0, got {}",
                self.measured_output.start_time()
            )));
        }
        self.fitness_stride()?;
        let n_fit = self.fitness_len();
        let needed = (n_fit - 1) * self.fitness_stride()?;
        if needed > self.measured_output.len() - 1 {
            return Err(Error::Config(format!(
                "fitness horizon {} s needs {} measured samples but the record has {}",
                self.fitness_horizon,
                needed + 1,
                self.measured_output.len()
            )));
        }
        Ok(())
    }

    /// Measured samples per fitness sample.
    fn fitness_stride(&self) -> Result<usize> {
        let t_meas = self.measured_output.sample_period();
        if !(self.fitness_sample_period.is_finite() && self.fitness_sample_period > 0.0) {
            return Err(Error::Config(format!(
                "fitness sample period must be positive, got {}",
                self.fitness_sample_period
            )));
        }
        let ratio = self.fitness_sample_period / t_meas;
        let stride = ratio.round();
        if stride < 1.0 || (ratio - stride).abs() > 1e-6 * ratio {
            return Err(Error::Config(format!(
                "fitness sample period {} is not an integer multiple of the \
                 measurement period {t_meas}",
                self.fitness_sample_period
            )));
        }
        Ok(stride as usize)
    }

    /// Number of fitness instants (0, Tf, ..., horizon).
    fn fitness_len(&self) -> usize {
        let steps = (self.fitness_horizon / self.fitness_sample_period * (1.0 + 1e-9) + 1e-9)
            .floor() as usize;
        steps + 1
    }
}

/// Result of a full identification.
#[derive(Debug, Clone)]
pub struct IdentificationResult {
    /// The identified five-parameter model, re-derived at the best orders.
    pub model: FractionalModel,
    /// Final sum of squared deviations at the fitness instants.
    pub fitness: f64,
    /// Percentage errors in the order (alpha, beta, a1, a2, a3) when ground
    /// truth was supplied. A zero true value falls back to absolute error
    /// times 100.
    pub per_parameter_error_pct: Option<[f64; 5]>,
    /// Global best fitness after each swarm iteration.
    pub convergence_history: Vec<f64>,
}

/// Sum of squared deviations between the measured record and the trial
/// model derived at `(alpha, beta)`.
///
/// Returns `+inf` for candidates that cannot be evaluated: `alpha <= beta`,
/// a singular coefficient solve, an invalid derived model, or a divergent
/// trial simulation.
pub fn fitness_of_candidate(problem: &IdentificationProblem, alpha: f64, beta: f64) -> f64 {
    if problem.validate().is_err() {
        return f64::INFINITY;
    }
    // NaN orders fail this comparison and are repelled too.
    let ordered = matches!(alpha.partial_cmp(&beta), Some(std::cmp::Ordering::Greater));
    if !ordered {
        return f64::INFINITY;
    }
    let Ok((a1, a2, a3)) =
        identify_coefficients(&problem.measured_output, alpha, beta, &problem.linear_cfg)
    else {
        return f64::INFINITY;
    };
    let Ok(model) = FractionalModel::new(a1, a2, a3, alpha, beta) else {
        return f64::INFINITY;
    };
    let Ok(trial) = simulate_step_response(
        &model,
        problem.fitness_horizon,
        problem.fitness_sample_period,
    ) else {
        return f64::INFINITY;
    };
    let stride = problem.fitness_stride().expect("validated above");
    let n = problem.fitness_len().min(trial.len());
    let measured = problem.measured_output.samples();
    let p = trial.samples();
    let mut f = 0.0;
    for i in 0..n {
        let d = measured[i * stride] - p[i];
        f += d * d;
    }
    f
}

/// Runs the swarm over `(alpha, beta)` and re-derives the coefficients at
/// the best position found.
///
/// The swarm's search box is taken from the problem's alpha/beta ranges;
/// `pso_cfg` contributes the swarm size, schedule, learning rates, initial
/// velocity ranges and seed. Errors with [`Error::NoSolution`] when no
/// candidate ever evaluated to a finite fitness.
pub fn identify_full(
    problem: &IdentificationProblem,
    pso_cfg: &PsoConfig,
) -> Result<IdentificationResult> {
    problem.validate()?;
    let cfg = PsoConfig {
        dims: 2,
        position_bounds: vec![problem.alpha_range, problem.beta_range],
        ..pso_cfg.clone()
    };
    cfg.validate()?;
    let SwarmResult {
        gbest_position,
        gbest_fitness,
        history,
    } = run_swarm(cfg, |x: &[f64]| fitness_of_candidate(problem, x[0], x[1]))?;
    if !gbest_fitness.is_finite() {
        return Err(Error::NoSolution);
    }
    let (alpha, beta) = (gbest_position[0], gbest_position[1]);
    let (a1, a2, a3) =
        identify_coefficients(&problem.measured_output, alpha, beta, &problem.linear_cfg)?;
    let model = FractionalModel::new(a1, a2, a3, alpha, beta)?;
    let per_parameter_error_pct = problem
        .ground_truth
        .as_ref()
        .map(|truth| parameter_errors_pct(&model, truth));
    Ok(IdentificationResult {
        model,
        fitness: gbest_fitness,
        per_parameter_error_pct,
        convergence_history: history,
    })
}

/// Percentage errors in the order (alpha, beta, a1, a2, a3).
pub fn parameter_errors_pct(estimate: &FractionalModel, truth: &FractionalModel) -> [f64; 5] {
    let est = estimate.as_array();
    let tru = truth.as_array();
    let mut out = [0.0; 5];
    for i in 0..5 {
        let denom = if tru[i] == 0.0 { 1.0 } else { tru[i].abs() };
        out[i] = (est[i] - tru[i]).abs() / denom * 100.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pso;

    /// The reference identification setup: clean 20 Hz record over 10 s
    /// from the known model, solve and fitness on the same grid.
    pub(crate) fn reference_problem() -> IdentificationProblem {
        let truth = FractionalModel::new(0.8, 0.5, 1.0, 2.23, 0.88).unwrap();
        let measured = simulate_step_response(&truth, 10.0, 0.05).unwrap();
        IdentificationProblem {
            measured_output: measured,
            alpha_range: (2.0, 2.4),
            beta_range: (0.7, 1.1),
            linear_cfg: LinearIdentConfig::new(10.0, 10.0, 0.05),
            fitness_sample_period: 0.05,
            fitness_horizon: 10.0,
            ground_truth: Some(truth),
        }
    }

    pub(crate) fn reference_pso(seed: u64) -> PsoConfig {
        PsoConfig {
            dims: 2,
            swarm_size: 10,
            iterations: 40,
            c1: 1.4,
            c2: 1.4,
            inertia_start: 0.9,
            inertia_end: 0.4,
            position_bounds: vec![(2.0, 2.4), (0.7, 1.1)],
            velocity_init_bounds: vec![(-0.2, 0.2), (-0.2, 0.2)],
            seed,
        }
    }

    #[test]
    fn fitness_at_the_true_orders_is_tiny() {
        let problem = reference_problem();
        let f = fitness_of_candidate(&problem, 2.23, 0.88);
        assert!(f < 1e-2, "F = {f:.3e}");
        // On a self-consistent record the true orders reproduce it to
        // floating-point noise.
        assert!(f < 1e-12, "F = {f:.3e}");
    }

    #[test]
    fn fitness_near_the_reported_optimum_is_small_but_nonzero() {
        let problem = reference_problem();
        let f = fitness_of_candidate(&problem, 2.2301, 0.8808);
        assert!(f.is_finite() && f > 0.0);
        assert!(f < 1e-4, "F = {f:.3e}");
    }

    #[test]
    fn fitness_is_deterministic() {
        let problem = reference_problem();
        let a = fitness_of_candidate(&problem, 2.21, 0.91);
        let b = fitness_of_candidate(&problem, 2.21, 0.91);
        assert_eq!(a, b);
    }

    #[test]
    fn self_consistency_on_own_response() {
        // Replace the measurement with a trial model's own simulated
        // response; at that model's orders the fitness vanishes.
        let trial = FractionalModel::new(1.2, 0.3, 2.0, 1.9, 0.6).unwrap();
        let measured = simulate_step_response(&trial, 10.0, 0.05).unwrap();
        let problem = IdentificationProblem {
            measured_output: measured,
            alpha_range: (1.5, 2.2),
            beta_range: (0.4, 0.9),
            linear_cfg: LinearIdentConfig::new(10.0, 10.0, 0.05),
            fitness_sample_period: 0.05,
            fitness_horizon: 10.0,
            ground_truth: None,
        };
        let f = fitness_of_candidate(&problem, 1.9, 0.6);
        assert!(f <= 1e-10, "F = {f:.3e}");
    }

    #[test]
    fn ordering_violations_are_infinite() {
        let problem = reference_problem();
        assert!(fitness_of_candidate(&problem, 0.88, 2.23).is_infinite());
        assert!(fitness_of_candidate(&problem, 1.0, 1.0).is_infinite());
    }

    #[test]
    fn true_orders_beat_every_displaced_candidate() {
        let problem = reference_problem();
        let f0 = fitness_of_candidate(&problem, 2.23, 0.88);
        for da in [-0.15, -0.05, 0.05, 0.15] {
            for db in [-0.15, -0.05, 0.05, 0.15] {
                let alpha = 2.23 + da;
                let beta = 0.88 + db;
                let f = fitness_of_candidate(&problem, alpha, beta);
                assert!(
                    f0 <= f,
                    "displaced ({alpha}, {beta}): F = {f:.3e} < F0 = {f0:.3e}"
                );
            }
        }
    }

    #[test]
    fn fitness_reads_exactly_the_decimated_instants() {
        // With a denser measurement grid the fitness must equal the sum of
        // squares over every stride-th sample against the trial response,
        // with no interpolation in between.
        let truth = FractionalModel::new(0.8, 0.5, 1.0, 2.23, 0.88).unwrap();
        let measured = simulate_step_response(&truth, 10.0, 0.01).unwrap();
        let problem = IdentificationProblem {
            measured_output: measured.clone(),
            alpha_range: (2.0, 2.4),
            beta_range: (0.7, 1.1),
            linear_cfg: LinearIdentConfig::new(10.0, 10.0, 0.01),
            fitness_sample_period: 0.05,
            fitness_horizon: 10.0,
            ground_truth: None,
        };
        let (alpha, beta) = (2.21, 0.91);
        let (a1, a2, a3) =
            identify_coefficients(&measured, alpha, beta, &problem.linear_cfg).unwrap();
        let model = FractionalModel::new(a1, a2, a3, alpha, beta).unwrap();
        let trial = simulate_step_response(&model, 10.0, 0.05).unwrap();
        let expected: f64 = measured
            .samples()
            .iter()
            .step_by(5)
            .zip(trial.samples())
            .map(|(c, p)| (c - p) * (c - p))
            .sum();
        assert_eq!(fitness_of_candidate(&problem, alpha, beta), expected);
    }

    #[test]
    fn full_identification_recovers_the_model() {
        let problem = reference_problem();
        let result = identify_full(&problem, &reference_pso(1)).unwrap();
        let m = &result.model;
        assert!((m.alpha() - 2.23).abs() <= 0.005, "alpha = {}", m.alpha());
        assert!((m.beta() - 0.88).abs() <= 0.01, "beta = {}", m.beta());
        assert!((m.a1() - 0.8).abs() / 0.8 <= 0.005, "a1 = {}", m.a1());
        assert!((m.a2() - 0.5).abs() / 0.5 <= 0.005, "a2 = {}", m.a2());
        assert!((m.a3() - 1.0).abs() <= 0.005, "a3 = {}", m.a3());
        assert!(result.fitness <= 1e-4, "F = {:.3e}", result.fitness);
        let errs = result.per_parameter_error_pct.unwrap();
        assert!(errs.iter().all(|&e| e < 1.0), "errors = {errs:?}");
        assert_eq!(result.convergence_history.len(), 40);
        assert!(result.convergence_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn missing_ground_truth_omits_error_report() {
        let mut problem = reference_problem();
        problem.ground_truth = None;
        let result = identify_full(&problem, &reference_pso(2)).unwrap();
        assert!(result.per_parameter_error_pct.is_none());
        assert!(result.fitness.is_finite());
    }

    #[test]
    fn hopeless_problem_reports_no_solution() {
        // A search box of integer alphas with beta above alpha: every
        // candidate fails the ordering guard.
        let mut problem = reference_problem();
        problem.alpha_range = (0.1, 0.2);
        problem.beta_range = (0.7, 1.1);
        let err = identify_full(&problem, &reference_pso(3)).unwrap_err();
        assert!(matches!(err, Error::NoSolution), "{err}");
    }

    #[test]
    fn swarm_example_converges_on_the_identification_fitness() {
        // Nine of ten seeded runs reach a best fitness below 1e-4.
        let problem = reference_problem();
        let mut hits = 0;
        for seed in 1..=10 {
            let result = pso::run(reference_pso(seed), |x: &[f64]| {
                fitness_of_candidate(&problem, x[0], x[1])
            })
            .unwrap();
            if result.gbest_fitness < 1e-4 {
                hits += 1;
            }
        }
        assert!(hits >= 9, "only {hits}/10 runs converged");
    }

    #[test]
    fn validation_catches_bad_ranges_and_rates() {
        let mut problem = reference_problem();
        problem.alpha_range = (2.4, 2.0);
        assert!(problem.validate().is_err());

        let mut problem = reference_problem();
        problem.fitness_sample_period = 0.07;
        assert!(problem.validate().is_err());

        let mut problem = reference_problem();
        problem.fitness_horizon = 20.0;
        assert!(problem.validate().is_err());
    }
}
