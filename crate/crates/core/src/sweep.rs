//! Scaling sweeps over generated pictures.

use std::time::Instant;

use crate::cotra::cotra_fill_with;
use crate::error::Result;
use crate::oracle::{gen_test_picture, PictureKind};
use crate::raster::Cell;
use crate::scanfill::fua_fill_counted;
use crate::Execution;

/// Averages over the repetitions of one sweep size.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub kind: PictureKind,
    pub rows: usize,
    pub cols: usize,
    /// `None` when the scanline fill rejects the picture.
    pub fua_mean_seconds: Option<f64>,
    pub fua_steps: Option<u64>,
    pub cotra_mean_seconds: f64,
    pub cotra_steps: u64,
    pub interior_count: usize,
}

impl SweepRow {
    pub fn pixels(&self) -> usize {
        self.rows * self.cols
    }

    pub const CSV_HEADER: &'static str =
        "kind,rows,cols,pixels,fua_mean_seconds,fua_steps,cotra_mean_seconds,cotra_steps,interior_count";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{:.9},{},{}",
            self.kind.name(),
            self.rows,
            self.cols,
            self.pixels(),
            opt(self.fua_mean_seconds.map(|s| format!("{s:.9}"))),
            opt(self.fua_steps.map(|s| s.to_string())),
            self.cotra_mean_seconds,
            self.cotra_steps,
            self.interior_count
        )
    }
}

/// Runs both fills on a square picture of each size. The picture at every
/// size comes from the same seed; `reps` timed runs are averaged. Sizes are
/// processed concurrently under [`Execution::Parallel`], while each fill
/// runs sequentially so timings are not skewed by nested parallelism.
pub fn scaling_sweep(
    sizes: &[usize],
    kind: PictureKind,
    reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let reps = reps.max(1);
    let one = |&n: &usize| -> Result<SweepRow> {
        let img = gen_test_picture(seed, n, n, kind)?;
        let mut fua_time = 0.0;
        let mut fua_steps = None;
        for _ in 0..reps {
            let t = Instant::now();
            let r = fua_fill_counted(&img, Execution::Sequential);
            fua_time += t.elapsed().as_secs_f64();
            fua_steps = r.ok().map(|(_, s)| s);
        }
        let mut cotra_time = 0.0;
        let mut last = None;
        for _ in 0..reps {
            let t = Instant::now();
            let out = cotra_fill_with(&img, Execution::Sequential)?;
            cotra_time += t.elapsed().as_secs_f64();
            last = Some(out);
        }
        let out = last.expect("at least one repetition");
        Ok(SweepRow {
            kind,
            rows: n,
            cols: n,
            fua_mean_seconds: fua_steps.map(|_| fua_time / reps as f64),
            fua_steps,
            cotra_mean_seconds: cotra_time / reps as f64,
            cotra_steps: out.steps,
            interior_count: out.matrix.count(Cell::Interior),
        })
    };
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            sizes.par_iter().map(one).collect()
        }
        _ => sizes.iter().map(one).collect(),
    }
}
