use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid peakon state: {0}")]
    InvalidState(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("peakons {0} and {1} coincide; a collision chart is required")]
    CollisionRequired(usize, usize),

    #[error("unsupported interaction at t = {time}: {detail}")]
    UnsupportedInteraction { time: f64, detail: String },

    #[error("collision chart is singular at w = pi")]
    SingularChart,

    #[error("time window [{from}, {to}] contains a collision event at t = {event}")]
    EventInWindow { from: f64, to: f64, event: f64 },

    #[error("time {0} lies outside the trajectory range")]
    OutOfRange(f64),

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("invalid transport plan: {0}")]
    InvalidPlan(String),

    #[error("unknown datum label `{0}`")]
    UnknownDatum(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
