//! Numerical models behind scale-time equivalence.
//!
//! - [`subspace`]: gradient flow restricted to a random `p`-dimensional
//!   subspace of a `P`-dimensional model, the reference flow it tracks at
//!   time `p·t`, and the deviation bound between them.
//! - [`double_descent`]: closed-form error dynamics of linear student-teacher
//!   regression under gradient flow, split into signal and noise terms, and
//!   the unified error law obtained by evaluating them at time `p·t`.
//! - [`predictor`]: cross-scale / cross-time performance prediction,
//!   time-to-threshold extraction, tradeoff curves and log-log slopes.

pub mod double_descent;
pub mod linalg;
pub mod predictor;
pub mod rng;
pub mod subspace;

pub use double_descent::{
    ErrorCurve, PriorSpec, ScanAxis, ScanSettings, SignalNoiseCoeffs, StudentTeacherInstance, XMode,
};
pub use predictor::{MeasuredCurve, MinTime, SlopeFit, TradeoffCurve};
pub use subspace::{EmbeddingMatrix, FlowTrajectory, LossSpec, SubspaceSpec, ThetaInit};
