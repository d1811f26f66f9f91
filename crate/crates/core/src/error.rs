use num_complex::Complex64;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),

    #[error("log-magnitude {0} exceeds the representable range for a plain complex value")]
    Overflow(f64),

    #[error("series order {requested} outside the supported range 2..={max}")]
    SeriesOrder { requested: usize, max: usize },

    #[error("no cutoff below the cap {cap} meets the tail tolerance (|zeta| = {zeta_abs})")]
    CutoffExhausted { cap: f64, zeta_abs: f64 },

    #[error("step size underflow at x = {x} (reached from {start})")]
    StepUnderflow { x: f64, start: f64 },

    #[error("step budget exhausted at x = {x} after {steps} accepted steps")]
    StepBudgetExhausted { x: f64, steps: usize },

    #[error("coefficient function returned a non-finite value at x = {x}")]
    NonFiniteCoefficient { x: f64 },

    #[error("states evaluated at different abscissae: {a} vs {b}")]
    MismatchedAbscissae { a: f64, b: f64 },

    #[error("dense output queried at x = {x} outside the covered interval [{lo}, {hi}]")]
    OutsideDenseRange { x: f64, lo: f64, hi: f64 },

    #[error(
        "contour sample {index} unreliable (log|W| = {log_w_frame:.3} in the matching frame); \
         perturb the contour"
    )]
    UnreliableContour { index: usize, log_w_frame: f64 },

    #[error("phase-tracking refinement exceeded the per-edge sample cap {cap}")]
    EdgeCapExceeded { cap: usize },

    #[error("winding sum {sum:.6} is not close to an integer multiple of 2pi")]
    NonIntegerWinding { sum: f64 },

    #[error("zero refinement did not converge within {iters} iterations (last step {last_step:e})")]
    RefineDiverged { iters: usize, last_step: f64 },

    #[error("certification failed at {zeta}: winding {winding} on the certifying circle")]
    CertificationFailed { zeta: Complex64, winding: i64 },

    #[error(
        "frame-relative residual log|W| = {residual_log:.3} at {zeta} exceeds the \
         certification bound {bound:.3}"
    )]
    ResidualTooLarge { zeta: Complex64, residual_log: f64, bound: f64 },

    #[error("subdivision budget exhausted (depth {depth}) over cell [{re_lo},{re_hi}]x[{im_lo},{im_hi}]")]
    SubdivisionBudget { depth: usize, re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64 },

    #[error("zero located on the real axis at {zeta} — contradicts the real-axis lower bound")]
    RealAxisZero { zeta: Complex64 },

    #[error("Wronskian constancy defect {defect:e} at zeta = {zeta} exceeds match_tol {tol:e}")]
    UnreliableEvaluation { zeta: Complex64, defect: f64, tol: f64 },

    #[error("proportionality defect {defect:e} at the claimed zero exceeds match_tol {tol:e}")]
    NotProportional { defect: f64, tol: f64 },

    #[error("bounded-solution decay check failed: |f({x})| = {value:e} relative to sup-norm")]
    DecayFailure { x: f64, value: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] (requested {tol:e}, achieved {achieved:e})")]
    QuadratureNonConvergence { lo: f64, hi: f64, tol: f64, achieved: f64 },

    #[error("eigenvalue iteration failed: {0}")]
    EigenFailure(String),

    #[error("discretization cutoff {xd} too small: V(+-Xd) = {v_edge:.3} < 10 * lambda = {lambda:.3}")]
    InsufficientCutoff { xd: f64, v_edge: f64, lambda: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("evaluation point invalid: {0}")]
    InvalidEvalPoint(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cache I/O: {0}")]
    CacheIo(String),

    #[error("artifact I/O: {0}")]
    ArtifactIo(String),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
