use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("label {0} is absent from the label map")]
    LabelAbsent(u8),
    #[error("need at least two distinct coordinates, got {0}")]
    TooFewPoints(usize),
    #[error("mask is empty")]
    EmptyMask,
    #[error("raster dimensions {0}x{1} do not match {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("value count {count} does not match {width}x{height}")]
    BadValueCount { width: usize, height: usize, count: usize },
    #[error("seed set is empty")]
    NoSeeds,
    #[error("seed at pixel {0} is neither inside nor adjacent to the active domain")]
    SeedOutsideDomain(usize),
    #[error("pixel {0} is seeded with two different labels")]
    ConflictingSeed(usize),
    #[error("interiors of labels {0} and {1} overlap at pixel {2}")]
    OverlappingInteriors(u8, u8, usize),
    #[error("part `{0}` is missing from the mask")]
    MissingPart(String),
    #[error("part `{0}` is not 8-connected")]
    DisconnectedPart(String),
    #[error("invalid part schema: {0}")]
    InvalidSchema(String),
    #[error("projected cloud of label {0} does not intersect the frame")]
    OffFrame(u8),
    #[error("projection of label {0} yields no foreground seeds")]
    NoForegroundSeeds(u8),
    #[error("skeleton lacks the {0} arm")]
    MissingArm(&'static str),
    #[error("record series has no evaluable frame")]
    EmptySeries,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
