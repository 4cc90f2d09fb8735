//! Coefficient identification at known fractional orders.
//!
//! For the model `u = a1 * D^alpha c + a2 * D^beta c + a3 * c` with known
//! `(alpha, beta)`, multiplying through by `s^-n` (with `n - 1 < alpha < n`)
//! and repeating for two more integrations yields three relations whose
//! derivation orders are all negative:
//!
//! ```text
//! D^(-n-r) u = a1 * D^(alpha-n-r) c + a2 * D^(beta-n-r) c + a3 * D^(-n-r) c
//! ```
//!
//! for r = 0, 1, 2. Evaluating every differintegral numerically at one
//! instant turns this into a 3x3 linear system for `(a1, a2, a3)`. Running
//! the solve on integrals only matters for noisy records: integration of
//! bounded zero-mean noise nearly cancels, while differentiation would
//! amplify it.
//!
//! The right-hand side is computed by the same numerical scheme on the
//! unit-step input rather than from the closed forms `t^(n+r) / (n+r)!`, so
//! the discretization bias cancels between the two sides.

use crate::differint::{differintegrate, DifferintegralRequest};
use crate::error::{Error, Result};
use crate::signal::SampledSignal;

/// Condition-estimate cap above which the 3x3 solve is refused.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// The assembled 3x3 system: `matrix * (a1, a2, a3)^T = rhs`.
///
/// Row r holds the differintegrals of the measured output at orders
/// `(alpha-n-r, beta-n-r, -n-r)`; `rhs[r]` holds `D^(-n-r)` of the unit-step
/// input.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSystem {
    pub matrix: [[f64; 3]; 3],
    pub rhs: [f64; 3],
}

/// Where and how the differintegrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearIdentConfig {
    /// Evaluation instant t.
    pub eval_time: f64,
    /// Memory length L of the short-memory sums.
    pub memory_length: f64,
    /// Expected sample period of the measured record.
    pub sample_period: f64,
    /// Shift order n; `None` resolves to the smallest integer above alpha.
    pub shift_order: Option<u32>,
}

impl LinearIdentConfig {
    pub fn new(eval_time: f64, memory_length: f64, sample_period: f64) -> Self {
        Self {
            eval_time,
            memory_length,
            sample_period,
            shift_order: None,
        }
    }

    fn resolve_shift_order(&self, alpha: f64) -> Result<u32> {
        match self.shift_order {
            None => choose_shift_order(alpha),
            Some(n) => {
                if (n as f64) > alpha {
                    Ok(n)
                } else {
                    Err(Error::Config(format!(
                        "shift order {n} must exceed alpha = {alpha} so that all \
                         derivation orders are negative"
                    )))
                }
            }
        }
    }
}

/// Smallest integer n with n > alpha, so that `n - 1 < alpha < n`.
///
/// Integer alpha sits on the boundary between two shifts and is rejected.
pub fn choose_shift_order(alpha: f64) -> Result<u32> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Config(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    if alpha.fract() == 0.0 {
        return Err(Error::IntegerAlpha(alpha));
    }
    Ok(alpha.ceil() as u32)
}

/// Builds the 3x3 system from a measured (possibly corrupted) step response.
pub fn build_equations(
    output: &SampledSignal,
    alpha: f64,
    beta: f64,
    cfg: &LinearIdentConfig,
) -> Result<EquationSystem> {
    if !(beta > 0.0 && alpha > beta) {
        return Err(Error::Config(format!(
            "orders must satisfy alpha > beta > 0, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let period = output.sample_period();
    if (cfg.sample_period - period).abs() > period * 1e-9 {
        return Err(Error::Config(format!(
            "configured sample period {} does not match the record's {}",
            cfg.sample_period, period
        )));
    }
    let n = cfg.resolve_shift_order(alpha)? as f64;

    // Unit-step input on the same grid, integrated by the same numerics.
    let step = SampledSignal::new(vec![1.0; output.len()], period, output.start_time())?;

    let mut matrix = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for r in 0..3 {
        let shift = n + r as f64;
        for (col, order) in [alpha - shift, beta - shift, -shift]
            .into_iter()
            .enumerate()
        {
            debug_assert!(order < 0.0);
            matrix[r][col] = differintegrate(
                output,
                &DifferintegralRequest {
                    order,
                    eval_time: cfg.eval_time,
                    memory_length: cfg.memory_length,
                },
            )?;
        }
        rhs[r] = differintegrate(
            &step,
            &DifferintegralRequest {
                order: -shift,
                eval_time: cfg.eval_time,
                memory_length: cfg.memory_length,
            },
        )?;
    }
    Ok(EquationSystem { matrix, rhs })
}

/// Solves the 3x3 system by elimination with partial pivoting.
pub fn solve_coefficients(system: &EquationSystem) -> Result<(f64, f64, f64)> {
    solve_coefficients_with_cap(system, DEFAULT_CONDITION_CAP)
}

/// Same as [`solve_coefficients`] with an explicit condition-estimate cap.
///
/// The estimate is the 1-norm condition number computed from the explicit
/// inverse; systems above the cap (near-degenerate orders, constant
/// output) are refused instead of returning garbage.
pub fn solve_coefficients_with_cap(system: &EquationSystem, cap: f64) -> Result<(f64, f64, f64)> {
    let a = &system.matrix;

    let norm_a = one_norm(a);
    let inv = invert3(a).ok_or(Error::SingularSystem {
        estimate: f64::INFINITY,
        cap,
    })?;
    let estimate = norm_a * one_norm(&inv);
    if !estimate.is_finite() || estimate > cap {
        return Err(Error::SingularSystem { estimate, cap });
    }

    let x = eliminate(*a, system.rhs).ok_or(Error::SingularSystem {
        estimate: f64::INFINITY,
        cap,
    })?;
    Ok((x[0], x[1], x[2]))
}

/// Builds and solves the system in one call.
pub fn identify_coefficients(
    output: &SampledSignal,
    alpha: f64,
    beta: f64,
    cfg: &LinearIdentConfig,
) -> Result<(f64, f64, f64)> {
    let system = build_equations(output, alpha, beta, cfg)?;
    solve_coefficients(&system)
}

fn one_norm(m: &[[f64; 3]; 3]) -> f64 {
    (0..3)
        .map(|c| (0..3).map(|r| m[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Gaussian elimination with partial pivoting for a single rhs.
fn eliminate(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot_row = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot_row][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..3 {
            let factor = a[row][col] / a[col][col];
            let pivot = a[col];
            for (entry, p) in a[row].iter_mut().zip(pivot).skip(col) {
                *entry -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Explicit inverse via the adjugate; `None` when the determinant vanishes.
fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let adj = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ],
        [
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ],
        [
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ];
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            inv[r][c] = adj[r][c] / det;
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{corrupt, NoiseSpec};
    use crate::sim::{simulate_step_response, FractionalModel};
    use proptest::prelude::*;

    /// Matrix and rhs of the worked noiseless example, as displayed.
    pub(crate) const REFERENCE_MATRIX: [[f64; 3]; 3] = [
        [6.1777, 51.3011, 136.1477],
        [32.2818, 152.6826, 314.8183],
        [108.0207, 342.4005, 576.6986],
    ];
    pub(crate) const REFERENCE_RHS: [f64; 3] = [166.7167, 416.9167, 834.1670];

    fn dense_cfg() -> LinearIdentConfig {
        LinearIdentConfig::new(10.0, 10.0, 0.001)
    }

    #[test]
    fn shift_order_is_the_ceiling() {
        assert_eq!(choose_shift_order(2.23).unwrap(), 3);
        assert_eq!(choose_shift_order(0.5).unwrap(), 1);
        assert!(matches!(
            choose_shift_order(3.0),
            Err(Error::IntegerAlpha(_))
        ));
        assert!(choose_shift_order(-1.2).is_err());
    }

    #[test]
    fn explicit_shift_order_must_exceed_alpha() {
        let mut cfg = dense_cfg();
        cfg.shift_order = Some(2);
        let output = SampledSignal::from_origin(vec![0.5; 10_001], 0.001).unwrap();
        assert!(matches!(
            build_equations(&output, 2.23, 0.88, &cfg),
            Err(Error::Config(_))
        ));
        cfg.shift_order = Some(4);
        assert!(build_equations(&output, 2.23, 0.88, &cfg).is_ok());
    }

    #[test]
    fn identity_system_solves_trivially() {
        let system = EquationSystem {
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            rhs: [1.0, 2.0, 3.0],
        };
        let (a1, a2, a3) = solve_coefficients(&system).unwrap();
        assert_eq!((a1, a2, a3), (1.0, 2.0, 3.0));
    }

    #[test]
    fn reference_system_reproduces_the_reported_coefficients() {
        let system = EquationSystem {
            matrix: REFERENCE_MATRIX,
            rhs: REFERENCE_RHS,
        };
        let (a1, a2, a3) = solve_coefficients(&system).unwrap();
        assert!((a1 - 0.8001).abs() <= 0.001, "a1 = {a1}");
        assert!((a2 - 0.4996).abs() <= 0.001, "a2 = {a2}");
        assert!((a3 - 1.0000).abs() <= 0.001, "a3 = {a3}");
    }

    #[test]
    fn corrupted_reference_system_reproduces_the_reported_coefficients() {
        let system = EquationSystem {
            matrix: [
                [6.1798, 51.3179, 136.1948],
                [32.2919, 152.7357, 314.9314],
                [108.0577, 342.5242, 576.9207],
            ],
            rhs: REFERENCE_RHS,
        };
        let (a1, a2, a3) = solve_coefficients(&system).unwrap();
        assert!((a1 - 0.7992).abs() <= 0.002, "a1 = {a1}");
        assert!((a2 - 0.4996).abs() <= 0.002, "a2 = {a2}");
        assert!((a3 - 0.9996).abs() <= 0.002, "a3 = {a3}");
    }

    #[test]
    fn singular_system_is_refused() {
        let system = EquationSystem {
            matrix: [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [1.0, 1.0, 1.0]],
            rhs: [1.0, 2.0, 3.0],
        };
        assert!(matches!(
            solve_coefficients(&system),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn nearly_parallel_columns_trip_the_condition_cap() {
        // Two almost identical columns, as produced by near-degenerate
        // order pairs, must be refused rather than solved into garbage.
        let system = EquationSystem {
            matrix: [
                [1.0, 1.0 + 1e-12, 3.0],
                [2.0, 2.0, 5.0],
                [4.0, 4.0, 6.0],
            ],
            rhs: [1.0, 2.0, 3.0],
        };
        let err = solve_coefficients(&system).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }), "{err}");
        // A generous cap accepts the same system.
        assert!(solve_coefficients_with_cap(&system, 1e18).is_ok());
    }

    #[test]
    fn zero_output_zeroes_the_matrix_but_not_the_rhs() {
        let output = SampledSignal::from_origin(vec![0.0; 10_001], 0.001).unwrap();
        let system = build_equations(&output, 2.23, 0.88, &dense_cfg()).unwrap();
        for row in system.matrix {
            for entry in row {
                assert_eq!(entry, 0.0);
            }
        }
        for entry in system.rhs {
            assert!(entry > 0.0);
        }
    }

    #[test]
    fn mismatched_sample_period_is_rejected() {
        let output = SampledSignal::from_origin(vec![0.0; 101], 0.01).unwrap();
        assert!(matches!(
            build_equations(&output, 2.23, 0.88, &dense_cfg()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn noiseless_roundtrip_recovers_the_coefficients() {
        let model = FractionalModel::new(0.8, 0.5, 1.0, 2.23, 0.88).unwrap();
        let c = simulate_step_response(&model, 10.0, 0.001).unwrap();
        let (a1, a2, a3) = identify_coefficients(&c, 2.23, 0.88, &dense_cfg()).unwrap();
        assert!((a1 - 0.8).abs() / 0.8 < 0.005, "a1 = {a1}");
        assert!((a2 - 0.5).abs() / 0.5 < 0.005, "a2 = {a2}");
        assert!((a3 - 1.0).abs() < 0.005, "a3 = {a3}");
    }

    #[test]
    fn vanishing_middle_coefficient_is_recovered() {
        let model = FractionalModel::new(2.0, 0.0, 3.0, 1.5, 0.7).unwrap();
        let c = simulate_step_response(&model, 10.0, 0.001).unwrap();
        let (a1, a2, a3) = identify_coefficients(&c, 1.5, 0.7, &dense_cfg()).unwrap();
        assert!((a1 - 2.0).abs() / 2.0 < 0.01, "a1 = {a1}");
        assert!(a2.abs() <= 0.02, "a2 = {a2}");
        assert!((a3 - 3.0).abs() / 3.0 < 0.01, "a3 = {a3}");
    }

    #[test]
    fn corruption_barely_moves_the_matrix_entries() {
        // The solve runs on fractional integrals, so +/-0.05 noise shifts
        // every matrix entry by less than 0.1% relative.
        let model = FractionalModel::new(0.8, 0.5, 1.0, 2.23, 0.88).unwrap();
        let clean = simulate_step_response(&model, 10.0, 0.001).unwrap();
        let base = build_equations(&clean, 2.23, 0.88, &dense_cfg()).unwrap();
        for seed in 1..=5_u64 {
            let noisy = corrupt(&clean, &NoiseSpec::new(0.05, seed).unwrap()).unwrap();
            let sys = build_equations(&noisy, 2.23, 0.88, &dense_cfg()).unwrap();
            for r in 0..3 {
                for (got, want) in sys.matrix[r].iter().zip(base.matrix[r]) {
                    let rel = (got - want).abs() / want;
                    assert!(rel < 1e-3, "seed {seed}: {got} vs {want} (rel {rel:.3e})");
                }
                assert_eq!(sys.rhs[r], base.rhs[r]);
            }
        }
    }

    #[test]
    fn noisy_identification_stays_within_two_percent() {
        let model = FractionalModel::new(0.8, 0.5, 1.0, 2.23, 0.88).unwrap();
        let clean = simulate_step_response(&model, 10.0, 0.001).unwrap();
        for seed in 1..=5_u64 {
            let noisy = corrupt(&clean, &NoiseSpec::new(0.05, seed).unwrap()).unwrap();
            let (a1, a2, a3) = identify_coefficients(&noisy, 2.23, 0.88, &dense_cfg()).unwrap();
            for (est, truth) in [(a1, 0.8), (a2, 0.5), (a3, 1.0)] {
                let rel = (est - truth).abs() / truth;
                assert!(rel < 0.02, "seed {seed}: {est} vs {truth} (rel {rel:.3e})");
            }
        }
    }

    proptest! {
        // Scaling the measured output by s scales the matrix by s, leaves the
        // rhs fixed, and divides the solved coefficients by s.
        #[test]
        fn output_scaling_equivaries(scale in 0.25_f64..4.0) {
            let model = FractionalModel::new(0.8, 0.5, 1.0, 2.23, 0.88).unwrap();
            let c = simulate_step_response(&model, 2.0, 0.01).unwrap();
            let scaled = SampledSignal::from_origin(
                c.samples().iter().map(|v| v * scale).collect(),
                0.01,
            ).unwrap();
            let cfg = LinearIdentConfig::new(2.0, 2.0, 0.01);
            let base = build_equations(&c, 2.23, 0.88, &cfg).unwrap();
            let big = build_equations(&scaled, 2.23, 0.88, &cfg).unwrap();
            for r in 0..3 {
                prop_assert_eq!(big.rhs[r], base.rhs[r]);
                for col in 0..3 {
                    let expect = base.matrix[r][col] * scale;
                    prop_assert!((big.matrix[r][col] - expect).abs() <= 1e-9 * expect.abs().max(1.0));
                }
            }
            let (a1, a2, a3) = solve_coefficients(&base).unwrap();
            let (b1, b2, b3) = solve_coefficients(&big).unwrap();
            for (b, a) in [(b1, a1), (b2, a2), (b3, a3)] {
                prop_assert!((b * scale - a).abs() <= 1e-6 * a.abs().max(1.0));
            }
        }

        // Random well-conditioned systems solve to small residuals.
        #[test]
        fn elimination_residuals_are_small(seed in 0_u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut matrix = [[0.0; 3]; 3];
            for (r, row) in matrix.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate() {
                    *entry = rng.random_range(-1.0..1.0) + if r == c { 3.0 } else { 0.0 };
                }
            }
            let rhs = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let system = EquationSystem { matrix, rhs };
            let (x1, x2, x3) = solve_coefficients(&system).unwrap();
            for r in 0..3 {
                let lhs = matrix[r][0] * x1 + matrix[r][1] * x2 + matrix[r][2] * x3;
                prop_assert!((lhs - rhs[r]).abs() < 1e-10);
            }
        }
    }
}
