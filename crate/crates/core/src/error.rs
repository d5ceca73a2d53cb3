use thiserror::Error;

/// Errors surfaced by lattice construction, file formats and the flow driver.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid lattice grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small for stencil: size {size} along axis {axis} needs at least {needed} points")]
    GridTooSmall { axis: usize, size: usize, needed: usize },

    #[error("tensor is not antisymmetric at index pair ({0}, {1})")]
    NotAntisymmetric(usize, usize),

    #[error("Gram-Schmidt produced {0} basis two-forms instead of 7 (broken pi_7?)")]
    BasisCount(usize),

    #[error("invalid flow configuration: {0}")]
    InvalidFlowConfig(String),

    #[error("sup|T| = {sup_torsion:.6e} exceeded the blow-up threshold {threshold:.6e} at t = {t:.6e}")]
    Blowup { t: f64, sup_torsion: f64, threshold: f64 },

    #[error("heat kernel mass deviates from 1 by {0:.3e} (> 1e-6); increase periodization images")]
    KernelMass(f64),

    #[error("insufficient flow history: {0}")]
    InsufficientHistory(String),

    #[error("fiber chart log unavailable: {0}")]
    ChartLog(String),

    #[error("snapshot io: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
