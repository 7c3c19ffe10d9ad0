use thiserror::Error;

pub type Result<T, E = LipError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LipError {
    #[error("point id {id} out of range for a space with {n} points")]
    PointOutOfRange { id: usize, n: usize },

    #[error("empty subset where a nonempty one is required")]
    EmptySubset,

    #[error("invalid metric space: {0}")]
    InvalidSpace(String),

    #[error("field is undefined at point {point}")]
    Undefined { point: usize },

    #[error("transport {transport} applied outside its domain at point {point} (value {value})")]
    TransportDomain {
        transport: &'static str,
        point: usize,
        value: f64,
    },

    #[error("coordinate projection unavailable: {0}")]
    NoCoordinates(String),

    #[error("values are not {k}-Lipschitz on the subset: pair ({p}, {q}) has |Δf| = {diff} > K·d = {bound}")]
    NotLipschitz {
        k: f64,
        p: usize,
        q: usize,
        diff: f64,
        bound: f64,
    },

    #[error("pointwise constants incompatible at pair ({p}, {q}): |Δφ| = {diff} > min(L_p, L_q)·d = {bound}")]
    IncompatibleWitness {
        p: usize,
        q: usize,
        diff: f64,
        bound: f64,
    },

    #[error("degenerate interval {0}")]
    DegenerateInterval(String),

    #[error("value {value} at point {point} lies outside the interval {interval}")]
    OutOfInterval {
        point: usize,
        value: f64,
        interval: String,
    },

    #[error("cover property fails at point {point}: no witness is positive there")]
    NotACover { point: usize },

    #[error("local witness fails: {0}")]
    WitnessFailure(String),

    #[error("values {value} at point {point} are not a selection: need {lower} < value < {upper}")]
    NotASelection {
        point: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("envelopes not strictly ordered at point {point}: g = {lower}, h = {upper}")]
    EnvelopeOrder {
        point: usize,
        lower: f64,
        upper: f64,
    },

    #[error("dyadic grid too coarse at point {point} even at depth {depth}")]
    GridTooCoarse { point: usize, depth: u32 },

    #[error("infinite Lipschitz constant: {0}")]
    InfiniteConstant(String),

    #[error("empty feasible interval at point {point}: [{lo}, {hi}]")]
    Infeasible { point: usize, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error in {file}: {message}")]
    Parse { file: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LipError {
    fn from(err: std::io::Error) -> Self {
        LipError::Io(err.to_string())
    }
}
