//! The scanline filling pass.
//!
//! Each row is scanned left to right. White pixels bordering the picture
//! are marked as entries (`I`), exits (`O`) or both (`X`); the black runs
//! between marks are classified as curve crossings or local extrema, and a
//! parity bit toggled by crossings decides which white spans are interior.
//! Rows are independent, so they are filled in parallel when the
//! `parallel` feature is on.

use crate::error::{LociError, Result};
use crate::raster::{BinaryImage, Canvas, Cell, LocatingMatrix, Point};
use crate::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkKind {
    /// White pixel whose right neighbour is black.
    I,
    /// White pixel whose left neighbour is black.
    O,
    /// Both at once.
    X,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowMarks {
    pub row: usize,
    /// `(column, kind)` with strictly increasing columns.
    pub marks: Vec<(usize, MarkKind)>,
}

impl RowMarks {
    pub fn entries(&self) -> usize {
        self.marks
            .iter()
            .filter(|(_, k)| matches!(k, MarkKind::I | MarkKind::X))
            .count()
    }

    pub fn exits(&self) -> usize {
        self.marks
            .iter()
            .filter(|(_, k)| matches!(k, MarkKind::O | MarkKind::X))
            .count()
    }

    /// Black runs delimited by the marks, as inclusive column ranges.
    pub fn runs(&self) -> Vec<Run> {
        let mut runs = Vec::new();
        let mut entry: Option<usize> = None;
        for &(col, kind) in &self.marks {
            if matches!(kind, MarkKind::O | MarkKind::X) {
                if let Some(start) = entry.take() {
                    runs.push(Run {
                        row: self.row,
                        start: start + 1,
                        end: col - 1,
                    });
                }
            }
            if matches!(kind, MarkKind::I | MarkKind::X) {
                entry = Some(col);
            }
        }
        runs
    }
}

/// Entry/exit marks of row `y`.
pub fn find_io_pixels(img: &BinaryImage, y: usize) -> RowMarks {
    let row = img.row(y);
    let cols = row.len();
    let mut marks = Vec::new();
    for x in 0..cols {
        if row[x] {
            continue;
        }
        let right = x + 1 < cols && row[x + 1];
        let left = x > 0 && row[x - 1];
        let kind = match (right, left) {
            (true, true) => MarkKind::X,
            (true, false) => MarkKind::I,
            (false, true) => MarkKind::O,
            (false, false) => continue,
        };
        marks.push((x + 1, kind));
    }
    RowMarks { row: y, marks }
}

/// A maximal horizontal run of black pixels, columns inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Run {
    pub row: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunKind {
    /// The curve passes through the row here: inside/outside flips.
    Crossing,
    /// A local top or bottom of the curve: inside/outside is unchanged.
    Extremum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunClass {
    pub run: Run,
    pub kind: RunKind,
}

/// Classifies a run by its vertical links: black pixels directly above or
/// below one of its cells. A thin 4-connected curve leaves each run through
/// exactly two links; one up and one down is a crossing, two on the same
/// side an extremum.
pub fn classify_run(img: &BinaryImage, run: Run) -> Result<RunClass> {
    let (kind, _) = classify_counted(img, run)?;
    Ok(RunClass { run, kind })
}

fn classify_counted(img: &BinaryImage, run: Run) -> Result<(RunKind, u64)> {
    let y = run.row as isize;
    let mut up = 0;
    let mut down = 0;
    for x in run.start..=run.end {
        up += img.black_at(y - 1, x as isize) as usize;
        down += img.black_at(y + 1, x as isize) as usize;
    }
    let steps = 2 * (run.end - run.start + 1) as u64;
    match (up, down) {
        (1, 1) => Ok((RunKind::Crossing, steps)),
        (2, 0) | (0, 2) => Ok((RunKind::Extremum, steps)),
        _ => Err(LociError::MalformedCurve {
            row: run.row,
            start: run.start,
            end: run.end,
            up,
            down,
        }),
    }
}

fn check_fillable(img: &BinaryImage) -> Result<()> {
    if !img.border_is_white() {
        return Err(LociError::Precondition(
            "image must carry a white frame; call ensure_frame first".into(),
        ));
    }
    if img.black_count() == 0 {
        return Err(LociError::Precondition("picture has no black pixel".into()));
    }
    Ok(())
}

/// Fills a framed picture whose black set is a thin, 4-connected,
/// spike-free curve (or union of such curves).
pub fn fua_fill(img: &BinaryImage) -> Result<LocatingMatrix> {
    fua_fill_counted(img, Execution::default()).map(|(m, _)| m)
}

pub fn fua_fill_sequential(img: &BinaryImage) -> Result<LocatingMatrix> {
    fua_fill_counted(img, Execution::Sequential).map(|(m, _)| m)
}

/// Like [`fua_fill`] but also returns the number of elementary steps
/// (pixel reads) taken, which is bounded by a constant times `N * M`.
pub fn fua_fill_counted(img: &BinaryImage, exec: Execution) -> Result<(LocatingMatrix, u64)> {
    check_fillable(img)?;
    let canvas = img.canvas();
    let cols = canvas.cols();
    let rows = canvas.rows();
    let mut cells = vec![Cell::Exterior; canvas.len()];

    let fill_row = |y: usize, out: &mut [Cell]| -> Result<u64> {
        if y == 1 || y == rows {
            return Ok(0);
        }
        let row = img.row(y);
        let marks = find_io_pixels(img, y);
        let mut steps = cols as u64;
        let mut inside = false;
        let mut x = 1;
        for run in marks.runs() {
            if inside {
                for c in &mut out[x - 1..run.start - 1] {
                    *c = Cell::Interior;
                }
            }
            for c in &mut out[run.start - 1..run.end] {
                *c = Cell::Picture;
            }
            let (kind, s) = classify_counted(img, run)?;
            steps += s;
            if kind == RunKind::Crossing {
                inside = !inside;
            }
            x = run.end + 1;
        }
        if inside {
            // An odd crossing count: an open arc, not a closed curve.
            return Err(LociError::Degenerate(format!(
                "row {y} crosses the picture an odd number of times; it is not a closed curve"
            )));
        }
        debug_assert!(row[x - 1..].iter().all(|b| !b));
        Ok(steps)
    };

    let results: Vec<Result<u64>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            cells
                .par_chunks_mut(cols)
                .enumerate()
                .map(|(i, out)| fill_row(i + 1, out))
                .collect()
        }
        _ => cells
            .chunks_mut(cols)
            .enumerate()
            .map(|(i, out)| fill_row(i + 1, out))
            .collect(),
    };
    let mut steps = 0;
    for r in results {
        steps += r?;
    }
    Ok((LocatingMatrix::from_cells(canvas, cells), steps))
}

/// Parity fill driven by a closed 4-connected pixel walk instead of pixel
/// colours.
///
/// Row `y` gets one mark per vertical step of the walk between rows `y` and
/// `y + 1`; a pixel is inside when an odd number of marks lie strictly to
/// its left. Retraced stretches contribute marks in pairs and cancel, so
/// overlapping walks are handled. Pixels of the walk itself are reported
/// as not inside. Returns the inside mask and the step count.
pub fn fill_from_curve(canvas: Canvas, walk: &[Point], exec: Execution) -> (Vec<bool>, u64) {
    let rows = canvas.rows();
    let cols = canvas.cols();
    let n = walk.len();
    let mut marks: Vec<Vec<usize>> = vec![Vec::new(); rows + 1];
    if n > 1 {
        for i in 0..n {
            let (a, b) = (walk[i], walk[(i + 1) % n]);
            if a.x == b.x && a.y != b.y {
                marks[a.y.min(b.y)].push(a.x);
            }
        }
    }
    let mut on_curve = vec![false; canvas.len()];
    for &p in walk {
        on_curve[canvas.index(p)] = true;
    }
    let mut inside = vec![false; canvas.len()];

    let fill_row = |y: usize, out: &mut [bool], row_marks: &mut Vec<usize>| -> u64 {
        row_marks.sort_unstable();
        let base = (y - 1) * cols;
        let mut next = 0;
        let mut parity = false;
        for x in 1..=cols {
            while next < row_marks.len() && row_marks[next] < x {
                parity = !parity;
                next += 1;
            }
            out[x - 1] = parity && !on_curve[base + x - 1];
        }
        (cols + row_marks.len()) as u64
    };

    let steps: u64 = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            inside
                .par_chunks_mut(cols)
                .zip(marks[1..].par_iter_mut())
                .enumerate()
                .map(|(i, (out, m))| fill_row(i + 1, out, m))
                .sum()
        }
        _ => inside
            .chunks_mut(cols)
            .zip(marks[1..].iter_mut())
            .enumerate()
            .map(|(i, (out, m))| fill_row(i + 1, out, m))
            .sum(),
    };
    (inside, steps + n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_image(row: &str) -> BinaryImage {
        BinaryImage::from_ascii(row).unwrap()
    }

    #[test]
    fn io_marks_examples() {
        let m = find_io_pixels(&row_image(".##..#."), 1);
        assert_eq!(
            m.marks,
            vec![
                (1, MarkKind::I),
                (4, MarkKind::O),
                (5, MarkKind::I),
                (7, MarkKind::O)
            ]
        );
        let m = find_io_pixels(&row_image(".#.#."), 1);
        assert_eq!(
            m.marks,
            vec![(1, MarkKind::I), (3, MarkKind::X), (5, MarkKind::O)]
        );
        assert!(find_io_pixels(&row_image("....."), 1).marks.is_empty());
    }

    #[test]
    fn runs_from_marks() {
        let m = find_io_pixels(&row_image(".#.###.#."), 1);
        assert_eq!(
            m.runs(),
            vec![
                Run {
                    row: 1,
                    start: 2,
                    end: 2
                },
                Run {
                    row: 1,
                    start: 4,
                    end: 6
                },
                Run {
                    row: 1,
                    start: 8,
                    end: 8
                },
            ]
        );
    }

    #[test]
    fn run_classes() {
        let img = BinaryImage::from_ascii(
            ".......
             .#####.
             .#...#.
             .#####.
             .......",
        )
        .unwrap();
        let top = Run {
            row: 2,
            start: 2,
            end: 6,
        };
        assert_eq!(classify_run(&img, top).unwrap().kind, RunKind::Extremum);
        let bottom = Run {
            row: 4,
            start: 2,
            end: 6,
        };
        assert_eq!(classify_run(&img, bottom).unwrap().kind, RunKind::Extremum);
        let wall = Run {
            row: 3,
            start: 2,
            end: 2,
        };
        assert_eq!(classify_run(&img, wall).unwrap().kind, RunKind::Crossing);

        let blob = BinaryImage::from_ascii(".....\n.###.\n.###.\n.###.\n.....").unwrap();
        let mid = Run {
            row: 3,
            start: 2,
            end: 4,
        };
        assert!(matches!(
            classify_run(&blob, mid),
            Err(LociError::MalformedCurve {
                row: 3,
                up: 3,
                down: 3,
                ..
            })
        ));
    }

    #[test]
    fn w_shaped_curve() {
        // The middle bump's bottom is a local minimum seen from row 5.
        let img = BinaryImage::from_ascii(
            "...........
             .#########.
             .#.......#.
             .#..###..#.
             .#..#.#..#.
             .####.#####
             ...........",
        );
        // Not framed: a black pixel touches the right border.
        assert!(img.is_ok());
        let img = BinaryImage::from_ascii(
            "...........
             .#########.
             .#.......#.
             .#..###..#.
             .#..#.#..#.
             .####.####.
             ...........",
        )
        .unwrap();
        let m = fua_fill(&img).unwrap();
        let row4: Vec<Cell> = (1..=11).map(|x| m.get(Point::new(4, x))).collect();
        use Cell::*;
        assert_eq!(
            row4,
            vec![
                Exterior, Picture, Interior, Interior, Picture, Picture, Picture, Interior,
                Interior, Picture, Exterior
            ]
        );
        let bump = Run {
            row: 4,
            start: 5,
            end: 7,
        };
        assert_eq!(classify_run(&img, bump).unwrap().kind, RunKind::Extremum);
        assert_eq!(m.get(Point::new(5, 6)), Exterior);
        assert_eq!(m.get(Point::new(5, 3)), Interior);
    }

    #[test]
    fn ring_center_is_interior() {
        let img = BinaryImage::from_ascii(".....\n.###.\n.#.#.\n.###.\n.....").unwrap();
        let m = fua_fill(&img).unwrap();
        assert_eq!(m.points_of(Cell::Interior), vec![Point::new(3, 3)]);
        assert_eq!(m.count(Cell::Picture), 8);
    }

    #[test]
    fn nested_curves_fill_by_even_odd_parity() {
        let img = BinaryImage::from_ascii(
            ".........
             .#######.
             .#.....#.
             .#.###.#.
             .#.#.#.#.
             .#.###.#.
             .#.....#.
             .#######.
             .........",
        )
        .unwrap();
        let m = fua_fill(&img).unwrap();
        assert_eq!(m.count(Cell::Interior), 16);
        assert_eq!(m.get(Point::new(5, 5)), Cell::Exterior);
    }

    #[test]
    fn degenerate_pictures_have_no_interior() {
        let single = BinaryImage::from_ascii("...\n.#.\n...").unwrap();
        assert!(matches!(
            fua_fill(&single),
            Err(LociError::MalformedCurve { .. })
        ));
        let seg = BinaryImage::from_ascii("......\n.####.\n......").unwrap();
        assert!(fua_fill(&seg).is_err());
        let upright = BinaryImage::from_ascii("...\n.#.\n.#.\n.#.\n...").unwrap();
        assert!(fua_fill(&upright).is_err());
    }

    #[test]
    fn rejects_unframed_and_empty() {
        let img = BinaryImage::from_ascii("#..\n...").unwrap();
        assert!(matches!(fua_fill(&img), Err(LociError::Precondition(_))));
        let img = BinaryImage::from_ascii("...\n...\n...").unwrap();
        assert!(matches!(fua_fill(&img), Err(LociError::Precondition(_))));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let img = BinaryImage::from_ascii(
            "........
             .######.
             .#....#.
             .#.##.#.
             .#.##.#.
             .#....#.
             .######.
             ........",
        )
        .unwrap();
        // The inner 2x2 block is a closed curve of its own.
        let a = fua_fill_counted(&img, Execution::Sequential).unwrap();
        let b = fua_fill_counted(&img, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn curve_fill_of_ring() {
        let canvas = Canvas::new(5, 5).unwrap();
        let walk: Vec<Point> = [
            (2, 2),
            (2, 3),
            (2, 4),
            (3, 4),
            (4, 4),
            (4, 3),
            (4, 2),
            (3, 2),
        ]
        .iter()
        .map(|&p| p.into())
        .collect();
        let (mask, _) = fill_from_curve(canvas, &walk, Execution::Sequential);
        let inside: Vec<Point> = (0..25)
            .filter(|&i| mask[i])
            .map(|i| canvas.point(i))
            .collect();
        assert_eq!(inside, vec![Point::new(3, 3)]);
    }

    #[test]
    fn curve_fill_cancels_retraced_whisker() {
        let canvas = Canvas::new(7, 5).unwrap();
        let walk: Vec<Point> = [
            (4, 2),
            (3, 2),
            (2, 2),
            (3, 2),
            (4, 2),
            (4, 3),
            (4, 4),
            (5, 4),
            (6, 4),
            (6, 3),
            (6, 2),
            (5, 2),
        ]
        .iter()
        .map(|&p| p.into())
        .collect();
        let (mask, _) = fill_from_curve(canvas, &walk, Execution::Parallel);
        let inside: Vec<Point> = (0..35)
            .filter(|&i| mask[i])
            .map(|i| canvas.point(i))
            .collect();
        assert_eq!(inside, vec![Point::new(5, 3)]);
    }
}
