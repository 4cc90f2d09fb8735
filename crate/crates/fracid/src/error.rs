//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building signals, differintegrating,
/// simulating, solving or searching.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A signal violates its structural invariants (empty, non-finite
    /// samples, non-positive period, ...).
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// A configuration value is out of range or inconsistent with the data.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A transfer-function model violates its invariants.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A requested time does not snap to any sample instant: it lies beyond
    /// the sampled record by more than half a period.
    #[error("time {time} does not hit a sample instant of the record spanning [{start}, {end}]")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },

    /// The memory window reaches back before the first sample.
    #[error(
        "memory window [{window_start}, {eval_time}] starts before the signal \
         begins at {signal_start}"
    )]
    WindowOutOfRange {
        window_start: f64,
        eval_time: f64,
        signal_start: f64,
    },

    /// Forward simulation exceeded the divergence guard.
    #[error("simulation diverged at t = {time}: |{value:.3e}| exceeds limit {limit:.3e}")]
    Diverged { time: f64, value: f64, limit: f64 },

    /// The shift order n with n - 1 < alpha < n does not exist for integer alpha.
    #[error("shift order is undefined for integer alpha = {0}")]
    IntegerAlpha(f64),

    /// The 3x3 system cannot be solved reliably.
    #[error(
        "equation system is singular or ill-conditioned: condition estimate \
         {estimate:.3e} exceeds cap {cap:.3e}"
    )]
    SingularSystem { estimate: f64, cap: f64 },

    /// Every fitness evaluation came back non-finite.
    #[error("no candidate evaluated to a finite fitness")]
    NoSolution,

    /// CSV parsing failed.
    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
