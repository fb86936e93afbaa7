use thiserror::Error;

/// Errors produced by grid construction, measurement, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("grid of {resolution}^{dimension} cells exceeds the cell cap {cap}")]
    SizeCapExceeded {
        dimension: u32,
        resolution: u32,
        cap: u64,
    },

    #[error("label {label} at cell {cell} is outside 1..={colors}")]
    OutOfRangeLabel { cell: u64, label: u8, colors: u8 },

    #[error("expected {expected} labels, got {got}")]
    LabelCountMismatch { expected: u64, got: u64 },

    #[error("truth table length {len} is not a power of two >= 2")]
    BadLength { len: usize },

    #[error("truth table value {value} at index {index} is not 0 or 1")]
    BadTruthValue { index: usize, value: u8 },

    #[error("parts overlap at cell {cell}")]
    OverlappingParts { cell: u64 },

    #[error("parts do not cover the grid: cell {missing_cell} is uncovered")]
    NotACover { missing_cell: u64 },

    #[error("coordinate set must be nonempty")]
    EmptyCoordSet,

    #[error("coordinate set must be a proper subset of the axes")]
    FullCoordSet,

    #[error("axis {axis} is out of range for dimension {n}")]
    AxisOutOfRange { axis: u32, n: u32 },

    #[error("color {color} is outside 1..={colors}")]
    BadColor { color: u8, colors: u8 },

    #[error("cell coordinates {coords:?} are invalid for the grid")]
    BadCell { coords: Vec<u32> },

    #[error("projection dimension {d} is outside 1..={n}")]
    BadDimension { d: u32, n: u32 },

    #[error("coalition size {k} is outside 1..={max}")]
    BadCoalitionSize { k: u32, max: u32 },

    #[error("operation requires grid resolution 2, got {resolution}")]
    NotBooleanGrid { resolution: u32 },

    #[error("operation requires exactly 2 colors, got {colors}")]
    NotTwoColors { colors: u8 },

    #[error("grid resolutions differ: {left} vs {right}")]
    GridMismatch { left: u32, right: u32 },

    #[error("construction needs {needed} colors, cap is {cap}")]
    TooManyColors { needed: u64, cap: u64 },

    #[error("{value} is not divisible by {divisor}")]
    DivisibilityError { value: u32, divisor: u32 },

    #[error("coordinate {coord} appears {count} times in the multiset, expected {expected}")]
    NotUniformCover {
        coord: u32,
        count: u32,
        expected: u32,
    },

    #[error("projection scan needs {bits} bitmap bits, cap is {cap}")]
    ScanTooLarge { bits: u128, cap: u128 },

    #[error("corrupt partition file: {0}")]
    CorruptFile(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
