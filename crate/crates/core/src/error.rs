use thiserror::Error;

/// Errors raised by evaluators, the lifting engine and the constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite point")]
    NonFinite,
    #[error("branch cut: {0} lies on (-inf, 0]")]
    BranchCut(String),
    #[error("outside disk: |z| = {0} >= 1")]
    OutsideDisk(f64),
    #[error("outside ball: norm = {0} >= 1")]
    OutsideBall(f64),
    #[error("outside strip: |Re w| = {0} >= pi/4")]
    OutsideStrip(f64),
    #[error("overflow: Re w = {0} > 700")]
    Overflow(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("near-critical point: |Df^-1| = {0:e}")]
    NearCritical(f64),
    #[error("lift escaped domain at u = {0}")]
    LiftEscaped(f64),
    #[error("step too coarse at u = {0}")]
    StepTooCoarse(f64),
    #[error("no local preimage (residual {0:e})")]
    NoLocalPreimage(f64),
    #[error("start point does not lie over the path origin (defect {0:e})")]
    BadStart(f64),
    #[error("simply connected cover: deck group is trivial")]
    SimplyConnected,
    #[error("no closed form factorization for {0}")]
    NoClosedForm(String),
    #[error("mixed normalizations in product chain")]
    MixedNormalization,
    #[error("loop too close to excluded point (distance {0:e})")]
    LoopTooClose(f64),
    #[error("refine loop: argument increment {0} too large")]
    RefineLoop(f64),
    #[error("loop is not closed (gap {0:e})")]
    NotClosed(f64),
    #[error("unidentified deck element (nearest residual {0:e})")]
    UnidentifiedDeck(f64),
    #[error("origin outside annulus")]
    OriginOutside,
    #[error("not normalized: f'(0) = {re} + {im}i")]
    NotNormalized { re: f64, im: f64 },
    #[error("schedule not admissible: {0}")]
    ScheduleNotAdmissible(String),
    #[error("no approximants")]
    NoApproximants,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
