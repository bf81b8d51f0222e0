use thiserror::Error;

use crate::raster::Point;

/// What went wrong while decoding a Netpbm stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Magic number is a valid Netpbm type we do not read (P3, P6, P7).
    UnsupportedMagic(String),
    /// The first two bytes are not a Netpbm magic number at all.
    BadMagic,
    /// A header field is missing, non-numeric or out of range.
    MalformedHeader(&'static str),
    /// The payload ended before every pixel was read.
    Truncated,
    /// A payload sample is not a legal value for the declared format.
    BadSample,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("netpbm parse error at byte {offset}: {kind:?}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LociError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A black run whose vertical attachments do not describe a thin
    /// 4-connected curve. The input needs the Lego-curve pass first.
    #[error("malformed curve at row {row}, columns {start}..={end}: {up} attachment(s) above, {down} below")]
    MalformedCurve {
        row: usize,
        start: usize,
        end: usize,
        up: usize,
        down: usize,
    },

    #[error("degenerate picture: {0}")]
    Degenerate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{} black pixel(s) do not have exactly two black 4-neighbours, first at {:?}", offenders.len(), offenders.first())]
    HypothesisViolated { offenders: Vec<Point> },
}

pub type Result<T> = std::result::Result<T, LociError>;
