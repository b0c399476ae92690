//! Error type shared by every module.
//!
//! Message texts are part of the public interface: callers and the CLI match on
//! them, and the integration suites assert them verbatim.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the laboratory.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A circle-factor block of an ambient vector is too close to the origin to
    /// admit a nearest-point retraction.
    #[error("ambiguous projection")]
    AmbiguousProjection,

    /// Two consecutive loop samples subtend an angle of at least π on some
    /// circle factor; the winding number of such a loop is not well defined.
    #[error("under-resolved loop")]
    UnderResolvedLoop,

    /// The accumulated angle of a closed loop is too far from an integer
    /// multiple of 2π to round confidently.
    #[error("ambiguous winding")]
    AmbiguousWinding,

    /// A requested trace circle leaves the discrete domain (or comes closer to
    /// its complement than the interpolation stencil allows).
    #[error("trace outside domain")]
    TraceOutsideDomain,

    /// The descent encountered a non-finite energy.
    #[error("divergence")]
    Divergence,

    /// An annulus lower bound was requested with inner radius 0 at p = 2, where
    /// the bound is a divergent logarithm.
    #[error("divergent bound")]
    DivergentBound,

    /// The H-term is only defined for nonzero charges.
    #[error("trivial charge has no H-term")]
    TrivialCharge,

    /// A singularity configuration is unusable: empty, carrying a zero charge,
    /// overlapping excision disks, or disks leaving the domain.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A constrained minimization drifted out of the homotopy sector it was
    /// asked to stay in.
    #[error("left homotopy sector")]
    LeftHomotopySector,

    /// Ball growth needed a circle trace that the grid cannot resolve.
    #[error("insufficient resolution at radius {radius}")]
    InsufficientResolution { radius: f64 },

    /// Detected singularities sit closer to the domain boundary than the
    /// requested growth allows.
    #[error("singularities too close to the boundary: {0}")]
    TooCloseToBoundary(String),

    /// A precondition on options or inputs failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Configuration file problems (missing, unparsable, failed validation).
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem problems while writing outputs.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
