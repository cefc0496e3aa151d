use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty coordinate file")]
    EmptyFile,
    #[error("line {line}: malformed coordinate line {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("too few points: got {got}, need at least {min}")]
    TooFewPoints { got: usize, min: usize },
    #[error("degenerate chord (x extent {extent:e})")]
    DegenerateChord { extent: f64 },
    #[error("surface x-coordinates are not monotone near x = {x}")]
    NonMonotonicSurface { x: f64 },
    #[error("upper and lower surfaces cross at station {station}")]
    CrossedSurfaces { station: usize },

    #[error("angle of attack {alpha} deg outside [-{limit}, {limit}]")]
    AlphaOutOfRange { alpha: f64, limit: f64 },
    #[error("polygon vertex ({x}, {y}) leaves the raster window")]
    PolygonOutsideWindow { x: f64, y: f64 },
    #[error("mach {mach} outside (0, {max}]")]
    MachOutOfRange { mach: f64, max: f64 },
    #[error("mach {0} is not subsonic")]
    MachTooHigh(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("stale cache: {0}")]
    StaleCache(String),

    #[error("dataset is empty")]
    EmptyDataset,
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("polar file has no {0} header")]
    MissingHeader(&'static str),
    #[error("polar line {line}: malformed row {content:?}")]
    MalformedRow { line: usize, content: String },

    #[error("unsupported format version {found:?} (expected {expected})")]
    FormatVersionMismatch { found: String, expected: u32 },
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("invalid data entry: {0}")]
    InvalidEntry(String),

    #[error("no parseable airfoil in {0}")]
    EmptyCorpus(PathBuf),
    #[error("model architecture {model} does not match {expected}")]
    ArchMismatch { model: String, expected: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
