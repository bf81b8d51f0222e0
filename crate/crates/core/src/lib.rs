//! Exact interior/exterior partition of connected digital pictures.
//!
//! A picture is a set of black pixels on a finite canvas. [`scanfill`]
//! fills pictures that are already thin closed curves with a single
//! scanline pass; [`cotra`] first wraps an arbitrary connected picture in a
//! thin closed curve (a Lego curve) and fills that. The result is a
//! [`LocatingMatrix`] that tags every pixel as exterior, picture, interior
//! or L-pixel.

pub mod cotra;
pub mod error;
pub mod flood;
pub mod oracle;
pub mod raster;
pub mod scanfill;
pub mod sweep;
pub mod topology;

pub use cotra::{
    cotra_fill, prune_spikes, repair_trapped_lpixels, trace_lego_curve, CotraOutput, LegoCurve,
};
pub use error::{LociError, ParseError, ParseErrorKind, Result};
pub use oracle::{gen_test_picture, jordan_check, oracle_interior, PictureKind, RegionPartition};
pub use raster::{
    ensure_frame, load_binary_image, save_locating_matrix, BinaryImage, Canvas, Cell,
    LocatingMatrix, MatrixFormat, Point, DEFAULT_THRESHOLD,
};
pub use scanfill::{fua_fill, fua_fill_counted};
pub use topology::DiscreteCurve;

/// How row- and batch-level work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}
