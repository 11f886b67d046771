use nalgebra::Vector3;
use thiserror::Error;

use crate::geometry::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("layout violates {} rule(s): {}", .0.len(), join_violations(.0))]
    Layout(Vec<Violation>),

    #[error("unknown ion species `{name}`; known species: {}", .known.join(", "))]
    Catalog { name: String, known: Vec<&'static str> },

    #[error("point outside field domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("unknown electrode id `{0}`")]
    Lookup(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("rf nil search failed: {0}")]
    Search(String),

    #[error("rf nil search is ambiguous: found minima at {}", fmt_points(.0))]
    Ambiguous(Vec<Vector3<f64>>),

    #[error(
        "effective potential is not confining: curvature {eigenvalue:e} J/m^2 along ({:.6}, {:.6}, {:.6})",
        .direction.x, .direction.y, .direction.z
    )]
    Unstable { direction: Vector3<f64>, eigenvalue: f64 },

    #[error("no turning point of the pseudopotential inside the search region")]
    UnboundedRegion,

    #[error(
        "compensation electrodes cannot produce a field along ({:.6}, {:.6}, {:.6})",
        .null_direction.x, .null_direction.y, .null_direction.z
    )]
    RankDeficient { null_direction: Vector3<f64> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate circuit: G^2 + w^2 C^2 = 0")]
    DegenerateCircuit,

    #[error("spectral analysis failed: {0}")]
    Analysis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Input problems (bad config, bad ranges, malformed files) as opposed to
    /// physics or convergence failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::Layout(_)
                | Error::Catalog { .. }
                | Error::Configuration(_)
                | Error::Lookup(_)
                | Error::InsufficientData(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn fmt_points(points: &[Vector3<f64>]) -> String {
    points
        .iter()
        .map(|p| format!("({:e}, {:e}, {:e})", p.x, p.y, p.z))
        .collect::<Vec<_>>()
        .join(", ")
}
