//! Span-based 4-connected flood from the canvas frame.
//!
//! This is the production exterior finder used by the Lego-curve tracer.
//! The oracle module keeps its own pixel-worklist flood so the two can be
//! checked against each other.

use crate::raster::Canvas;

/// Marks every open cell 4-connected to the frame through open cells.
/// `blocked` is row-major over `canvas`. Returns the mask and the number
/// of cell visits.
pub fn frame_flood(canvas: Canvas, blocked: &[bool]) -> (Vec<bool>, u64) {
    let (rows, cols) = (canvas.rows(), canvas.cols());
    let mut seen = vec![false; canvas.len()];
    let mut steps = 0u64;
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for x in 0..cols {
        stack.push((0, x));
        stack.push((rows - 1, x));
    }
    for y in 0..rows {
        stack.push((y, 0));
        stack.push((y, cols - 1));
    }
    let open = |seen: &[bool], i: usize| !seen[i] && !blocked[i];

    while let Some((y, x)) = stack.pop() {
        steps += 1;
        let base = y * cols;
        if !open(&seen, base + x) {
            continue;
        }
        let mut lo = x;
        while lo > 0 && open(&seen, base + lo - 1) {
            lo -= 1;
        }
        let mut hi = x;
        while hi + 1 < cols && open(&seen, base + hi + 1) {
            hi += 1;
        }
        seen[base + lo..=base + hi].fill(true);
        steps += (hi - lo + 1) as u64;
        for ny in [y.wrapping_sub(1), y + 1] {
            if ny >= rows {
                continue;
            }
            let nbase = ny * cols;
            let mut in_run = false;
            for nx in lo..=hi {
                steps += 1;
                let o = open(&seen, nbase + nx);
                if o && !in_run {
                    stack.push((ny, nx));
                }
                in_run = o;
            }
        }
    }
    (seen, steps)
}
