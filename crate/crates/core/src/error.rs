use std::path::PathBuf;

use thiserror::Error;

use crate::metrics::Class;

#[derive(Debug, Error)]
pub enum Error {
    #[error("volume has no slices")]
    NoSlices,
    #[error("degenerate dimensions {width}x{height}")]
    DegenerateDimensions { width: usize, height: usize },
    #[error("slice {index} has {len} pixels, expected {expected}")]
    SliceSizeMismatch {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("pixel value {value} in slice {slice} exceeds {bits}-bit range")]
    IntensityOutOfRange { slice: usize, value: u16, bits: u8 },
    #[error("unsupported bit depth {0}; expected 8 or 16")]
    UnsupportedBitDepth(u8),

    #[error("lung profile has {got} entries but the phantom has {expected} slices")]
    ProfileLengthMismatch { expected: usize, got: usize },
    #[error("invalid phantom spec: {0}")]
    InvalidPhantom(String),

    #[error("filter radius {radius} too large for {width}x{height} slices")]
    RadiusTooLarge {
        radius: usize,
        width: usize,
        height: usize,
    },
    #[error("histogram is degenerate: volume holds a single intensity")]
    DegenerateHistogram,
    #[error("threshold {0} outside the intensity range")]
    ThresholdOutOfRange(u32),
    #[error("minimum component fraction {0} not in [0, 1)")]
    InvalidFraction(f64),
    #[error("bounding box is empty")]
    EmptyBoundingBox,
    #[error("bounding box rows {row_min}..={row_max}, cols {col_min}..={col_max} outside {width}x{height}")]
    BoxOutOfRange {
        row_min: usize,
        row_max: usize,
        col_min: usize,
        col_max: usize,
        width: usize,
        height: usize,
    },
    #[error("mask set does not match volume geometry")]
    MaskMismatch,

    #[error("no area measurements")]
    EmptyProfile,
    #[error("area measurement {0} is negative or not finite")]
    InvalidArea(f64),
    #[error("probability {0} not in (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("sample count must be at least 1")]
    ZeroCount,

    #[error("cell (source {source_id}, {class}) is empty")]
    EmptyCell { source_id: u32, class: Class },
    #[error("cell (source {source_id}, {class}) has {size} vectors, need at least {needed}")]
    CellTooSmall {
        source_id: u32,
        class: Class,
        size: usize,
        needed: usize,
    },
    #[error("class {class} pooled over all sources has {size} vectors, need at least 2")]
    ClassTooSmall { class: Class, size: usize },
    #[error("class spread is zero; ratio undefined")]
    DegenerateSpread,
    #[error("source {source_id}: class spread is zero; ratio undefined")]
    DegenerateSourceSpread { source_id: u32 },
    #[error("class {class} present in {found} sources, need at least 2")]
    TooFewSources { class: Class, found: usize },
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("embedding set is empty")]
    EmptyEmbeddings,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no observations")]
    EmptyInput,
    #[error("AUC undefined: truth contains a single class")]
    UndefinedAuc,
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{path}: unsupported pixel format {format}; expected 8- or 16-bit grayscale")]
    UnsupportedPixelFormat { path: PathBuf, format: String },
    #[error("{0}: directory holds no slice images")]
    EmptyDirectory(PathBuf),
    #[error("{path}: slice name {name:?} is not a zero-padded integer of width {width}")]
    BadSliceName {
        path: PathBuf,
        name: String,
        width: usize,
    },
    #[error("{path}: slices have mixed dimensions ({first_w}x{first_h} vs {w}x{h})")]
    MixedDimensions {
        path: PathBuf,
        first_w: usize,
        first_h: usize,
        w: usize,
        h: usize,
    },
    #[error("{path}: slices have mixed bit depth")]
    MixedBitDepth { path: PathBuf },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown label {token:?}")]
    UnknownLabel { line: u64, token: String },
    #[error("line {line}, column {column:?}: {token:?} is not a finite number")]
    NonNumeric {
        line: u64,
        column: String,
        token: String,
    },
    #[error("line {line}: malformed header: {reason}")]
    BadHeader { line: u64, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("field {0} is not finite")]
    NonFiniteField(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
