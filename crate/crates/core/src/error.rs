use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no admissible orbit: l^2 = {l_sq} exceeds max f = {f_max}")]
    NoOrbit { l_sq: f64, f_max: f64 },

    #[error("circular orbit: R- and R+ coincide at r = {radius}")]
    CircularOrbit { radius: f64 },

    #[error("negative radicand {value} at r = {at}")]
    NegativeRadicand { at: f64, value: f64 },

    #[error("{0} diverges")]
    Divergent(&'static str),

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    QuadratureNotConverged { estimate: f64, error: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("integrator step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("potential is not in class V (first violated property: {0})")]
    NotInClassV(&'static str),

    #[error("initial data does not match the requested case: {0}")]
    CaseMismatch(&'static str),

    #[error("trajectory is not a collision orbit: {0}")]
    NotCollision(&'static str),

    #[error("flow is undefined at the collision instant t = {0}")]
    AtCollisionInstant(f64),

    #[error("time {t} outside the available span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },

    #[error("path is not collinear (deviation {0})")]
    NotCollinear(f64),

    #[error("no section crossing in [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("orbit left the ball of radius {r_bar} at t = {t}")]
    ExitedBall { t: f64, r_bar: f64 },
}
