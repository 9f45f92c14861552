use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid framework: {0}")]
    InvalidFramework(String),

    #[error("vertex {vertex} is off the surface (|h| = {residual:e})")]
    OffSurface { vertex: usize, residual: f64 },

    #[error("vertex {vertex} sits at the cone apex")]
    ConeApex { vertex: usize },

    #[error("isostatic characterization unknown for the ellipsoid")]
    CharacterizationUnknown,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("framework is not in standard position: {0}")]
    NotStandardPosition(String),

    #[error("not a mechanism: pinned flex space has dimension {nullity}, expected 1")]
    NotAMechanism { nullity: usize },

    #[error("edge ({0}, {1}) is not in the graph")]
    UnknownEdge(usize, usize),

    #[error("corrector diverged at step {step}")]
    CorrectorDiverged { step: usize },

    #[error("path reached the cone apex (vertex {vertex}) at step {step}")]
    ApexCrossing { step: usize, vertex: usize },
}

impl RigidityError {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            RigidityError::CorrectorDiverged { .. }
                | RigidityError::ApexCrossing { .. }
                | RigidityError::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, RigidityError>;
