//! Ground truth for the fills: a worklist flood for the exterior, a
//! union-find labelling for component counts, the discrete Jordan check,
//! and seeded test-picture generators.
//!
//! Everything here trades speed for obviousness and shares no code with
//! the scanline or tracing passes it checks.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LociError, Result};
use crate::raster::{BinaryImage, Canvas, Point};

/// Exterior, interior and picture of a framed image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    pub exterior: BTreeSet<Point>,
    pub interior: BTreeSet<Point>,
    pub picture: BTreeSet<Point>,
}

impl RegionPartition {
    pub fn of(img: &BinaryImage) -> Self {
        let exterior = flood_exterior(img);
        let picture: BTreeSet<Point> = img.black_pixels().collect();
        let interior = img
            .canvas()
            .points()
            .filter(|p| !picture.contains(p) && !exterior.contains(p))
            .collect();
        RegionPartition {
            exterior,
            interior,
            picture,
        }
    }
}

const STEPS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// White pixels reachable from the frame through 4-adjacent white pixels.
pub fn flood_exterior(img: &BinaryImage) -> BTreeSet<Point> {
    let canvas = img.canvas();
    let mut seen = vec![false; canvas.len()];
    let mut work = VecDeque::new();
    for p in canvas
        .points()
        .filter(|&p| canvas.is_frame(p) && !img.get(p))
    {
        seen[canvas.index(p)] = true;
        work.push_back(p);
    }
    while let Some(p) = work.pop_front() {
        for (dy, dx) in STEPS {
            if let Some(q) = canvas.offset(p, dy, dx) {
                let i = canvas.index(q);
                if !seen[i] && !img.get(q) {
                    seen[i] = true;
                    work.push_back(q);
                }
            }
        }
    }
    (0..canvas.len())
        .filter(|&i| seen[i])
        .map(|i| canvas.point(i))
        .collect()
}

pub fn oracle_interior(img: &BinaryImage) -> BTreeSet<Point> {
    RegionPartition::of(img).interior
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// 4-connected components of `cells`, each sorted, ordered by first pixel.
pub fn four_components(canvas: Canvas, cells: &BTreeSet<Point>) -> Vec<Vec<Point>> {
    let mut member = vec![false; canvas.len()];
    for &p in cells {
        member[canvas.index(p)] = true;
    }
    let mut sets = DisjointSets::new(canvas.len());
    for &p in cells {
        for (dy, dx) in [(0, 1), (1, 0)] {
            if let Some(q) = canvas.offset(p, dy, dx) {
                if member[canvas.index(q)] {
                    sets.union(canvas.index(p), canvas.index(q));
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Point>> = Default::default();
    for &p in cells {
        let root = sets.find(canvas.index(p));
        groups.entry(root).or_default().push(p);
    }
    groups.into_values().collect()
}

pub fn is_four_connected_set(canvas: Canvas, cells: &BTreeSet<Point>) -> bool {
    four_components(canvas, cells).len() <= 1
}

/// Discrete Jordan check for pictures in which every black pixel has
/// exactly two black 4-neighbours.
///
/// True iff the white pixels form exactly two 4-connected components, one
/// holding the whole frame (the exterior) and one not.
pub fn jordan_check(img: &BinaryImage) -> Result<bool> {
    let canvas = img.canvas();
    let offenders: Vec<Point> = img
        .black_pixels()
        .filter(|p| {
            STEPS
                .iter()
                .filter(|&&(dy, dx)| canvas.offset(*p, dy, dx).is_some_and(|q| img.get(q)))
                .count()
                != 2
        })
        .collect();
    if !offenders.is_empty() {
        return Err(LociError::HypothesisViolated { offenders });
    }
    let white: BTreeSet<Point> = canvas.points().filter(|&p| !img.get(p)).collect();
    let comps = four_components(canvas, &white);
    if comps.len() != 2 {
        return Ok(false);
    }
    let exterior = flood_exterior(img);
    let frame_comp = comps.iter().find(|c| c.iter().any(|&p| canvas.is_frame(p)));
    Ok(match frame_comp {
        Some(c) => {
            c.len() == exterior.len()
                && c.iter().all(|p| exterior.contains(p))
                && canvas
                    .points()
                    .filter(|&p| canvas.is_frame(p))
                    .all(|p| !img.get(p))
        }
        None => false,
    })
}

/// The L-pixels plugging diagonal gaps: exterior pixels with two black
/// 4-neighbours that touch only diagonally, the fourth pixel of their
/// 2x2 block being white.
pub fn l_pixels(img: &BinaryImage) -> BTreeSet<Point> {
    let canvas = img.canvas();
    let exterior = flood_exterior(img);
    let black = |p: Option<Point>| p.is_some_and(|p| img.get(p));
    exterior
        .iter()
        .copied()
        .filter(|&e| {
            [(-1, 1), (1, 1), (1, -1), (-1, -1)]
                .iter()
                .any(|&(dy, dx)| {
                    let u = canvas.offset(e, dy, 0);
                    let v = canvas.offset(e, 0, dx);
                    let far = canvas.offset(e, dy, dx);
                    black(u) && black(v) && !black(far)
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PictureKind {
    /// Outline of a simple rectilinear polygon; every black pixel has two
    /// black 4-neighbours.
    RectilinearSimple,
    /// Random 8-connected growth from one pixel.
    RandomConnected,
    /// Single pixel, bare segment or diagonal chain, chosen by the seed.
    Degenerate,
}

impl PictureKind {
    pub const ALL: [PictureKind; 3] = [
        PictureKind::RectilinearSimple,
        PictureKind::RandomConnected,
        PictureKind::Degenerate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PictureKind::RectilinearSimple => "rectilinear",
            PictureKind::RandomConnected => "random",
            PictureKind::Degenerate => "degenerate",
        }
    }
}

impl std::str::FromStr for PictureKind {
    type Err = LociError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "rectilinear" | "rectilinear_simple" => Ok(PictureKind::RectilinearSimple),
            "random" | "random_connected" => Ok(PictureKind::RandomConnected),
            "degenerate" => Ok(PictureKind::Degenerate),
            other => Err(LociError::InvalidArgument(format!(
                "unknown picture kind {other:?} (expected rectilinear, random or degenerate)"
            ))),
        }
    }
}

/// Deterministic test picture on a `rows x cols` canvas with a white frame.
pub fn gen_test_picture(
    seed: u64,
    rows: usize,
    cols: usize,
    kind: PictureKind,
) -> Result<BinaryImage> {
    if rows < 8 || cols < 8 {
        return Err(LociError::InvalidArgument(format!(
            "test pictures need at least 8x8 pixels, got {rows}x{cols}"
        )));
    }
    let canvas = Canvas::new(rows, cols)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let black = match kind {
        PictureKind::RectilinearSimple => rectilinear(&mut rng, rows, cols),
        PictureKind::RandomConnected => random_connected(seed, &mut rng, rows, cols),
        PictureKind::Degenerate => degenerate(seed, &mut rng, rows, cols),
    };
    BinaryImage::from_points(canvas, black)
}

fn rectilinear(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Point> {
    let s: usize = rng.gen_range(2..=3);
    // Lattice lines at 0-based pixel 1 + s*i stay clear of the frame.
    let cr = (rows - 3) / s;
    let cc = (cols - 3) / s;
    let mut cell = vec![vec![false; cc]; cr];
    let target = rng.gen_range(1..=(cr * cc).div_ceil(2).max(1));
    let start = (rng.gen_range(0..cr), rng.gen_range(0..cc));
    cell[start.0][start.1] = true;
    let mut members = vec![start];
    let mut attempts = 0;
    while members.len() < target && attempts < 40 * target {
        attempts += 1;
        let &(r, c) = members.choose(rng).unwrap();
        let (dr, dc) = [(-1i32, 0i32), (1, 0), (0, -1), (0, 1)][rng.gen_range(0..4)];
        let (nr, nc) = (r as i32 + dr, c as i32 + dc);
        if nr < 0 || nc < 0 || nr >= cr as i32 || nc >= cc as i32 {
            continue;
        }
        let (nr, nc) = (nr as usize, nc as usize);
        if cell[nr][nc] {
            continue;
        }
        cell[nr][nc] = true;
        if has_pinch(&cell, nr, nc) || !complement_connected(&cell) {
            cell[nr][nc] = false;
            continue;
        }
        members.push((nr, nc));
    }

    let inside = |r: isize, c: isize| {
        r >= 0 && c >= 0 && (r as usize) < cr && (c as usize) < cc && cell[r as usize][c as usize]
    };
    let mut black = BTreeSet::new();
    let px = |i: usize| 1 + s * i;
    for r in 0..=cr {
        for c in 0..cc {
            // Horizontal lattice edge between cell rows r-1 and r.
            if inside(r as isize - 1, c as isize) != inside(r as isize, c as isize) {
                for k in 0..=s {
                    black.insert(Point::new(px(r) + 1, px(c) + k + 1));
                }
            }
        }
    }
    for r in 0..cr {
        for c in 0..=cc {
            if inside(r as isize, c as isize - 1) != inside(r as isize, c as isize) {
                for k in 0..=s {
                    black.insert(Point::new(px(r) + k + 1, px(c) + 1));
                }
            }
        }
    }
    black.into_iter().collect()
}

/// A 2x2 block of cells around (r, c) holding exactly one diagonal pair.
fn has_pinch(cell: &[Vec<bool>], r: usize, c: usize) -> bool {
    let get = |r: isize, c: isize| {
        r >= 0
            && c >= 0
            && (r as usize) < cell.len()
            && (c as usize) < cell[0].len()
            && cell[r as usize][c as usize]
    };
    let (r, c) = (r as isize, c as isize);
    [(-1, -1), (-1, 0), (0, -1), (0, 0)]
        .iter()
        .any(|&(dr, dc)| {
            let (r0, c0) = (r + dr, c + dc);
            let (a, b, x, y) = (
                get(r0, c0),
                get(r0, c0 + 1),
                get(r0 + 1, c0),
                get(r0 + 1, c0 + 1),
            );
            (a && y && !b && !x) || (b && x && !a && !y)
        })
}

/// Whether the cells outside the polyomino, padded by a ring of outside
/// cells, are 4-connected.
fn complement_connected(cell: &[Vec<bool>]) -> bool {
    let (h, w) = (cell.len() + 2, cell[0].len() + 2);
    let free =
        |r: usize, c: usize| r == 0 || c == 0 || r == h - 1 || c == w - 1 || !cell[r - 1][c - 1];
    let total = (0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .filter(|&(r, c)| free(r, c))
        .count();
    let mut seen = vec![vec![false; w]; h];
    let mut work = vec![(0, 0)];
    seen[0][0] = true;
    let mut count = 0;
    while let Some((r, c)) = work.pop() {
        count += 1;
        let mut push = |r: usize, c: usize| {
            if !seen[r][c] && free(r, c) {
                seen[r][c] = true;
                work.push((r, c));
            }
        };
        if r > 0 {
            push(r - 1, c);
        }
        if r + 1 < h {
            push(r + 1, c);
        }
        if c > 0 {
            push(r, c - 1);
        }
        if c + 1 < w {
            push(r, c + 1);
        }
    }
    count == total
}

fn random_connected(seed: u64, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Point> {
    // Density depends on the seed only, so the black share of the canvas is
    // the same at every size.
    let fraction = 0.05 + 0.40 * ChaCha8Rng::seed_from_u64(seed ^ 0x5eed).gen::<f64>();
    let area = (rows - 2) * (cols - 2);
    let target = ((area as f64 * fraction) as usize).max(2);
    let four_only = rng.gen_bool(0.25);
    let canvas = Canvas::new(rows, cols).expect("checked dimensions");
    let mut black = vec![false; canvas.len()];
    let start = Point::new(rng.gen_range(2..rows), rng.gen_range(2..cols));
    black[canvas.index(start)] = true;
    let mut members = vec![start];
    let offsets: &[(isize, isize)] = if four_only {
        &[(-1, 0), (1, 0), (0, -1), (0, 1)]
    } else {
        &[
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ]
    };
    let mut attempts = 0;
    while members.len() < target && attempts < 50 * target {
        attempts += 1;
        let p = members[rng.gen_range(0..members.len())];
        let (dy, dx) = offsets[rng.gen_range(0..offsets.len())];
        let Some(q) = canvas.offset(p, dy, dx) else {
            continue;
        };
        if canvas.is_frame(q) || black[canvas.index(q)] {
            continue;
        }
        black[canvas.index(q)] = true;
        members.push(q);
    }
    members.sort();
    members
}

fn degenerate(seed: u64, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Point> {
    let y = rng.gen_range(2..rows);
    let x = rng.gen_range(2..cols);
    match seed % 3 {
        0 => vec![Point::new(y, x)],
        1 => {
            if rng.gen_bool(0.5) {
                let len = rng.gen_range(2..=cols - 2);
                let x0 = rng.gen_range(2..=cols - len);
                (x0..x0 + len).map(|x| Point::new(y, x)).collect()
            } else {
                let len = rng.gen_range(2..=rows - 2);
                let y0 = rng.gen_range(2..=rows - len);
                (y0..y0 + len).map(|y| Point::new(y, x)).collect()
            }
        }
        _ => {
            let len = rng.gen_range(2..=(rows.min(cols) - 2));
            let y0 = rng.gen_range(2..=rows - len);
            let x0 = rng.gen_range(2..=cols - len);
            let down = rng.gen_bool(0.5);
            (0..len)
                .map(|k| {
                    let x = if down { x0 + k } else { x0 + len - 1 - k };
                    Point::new(y0 + k, x)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::is_connected_picture;

    fn pts(v: &[(usize, usize)]) -> BTreeSet<Point> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn flood_examples() {
        let blank = BinaryImage::new(Canvas::new(4, 5).unwrap());
        assert_eq!(flood_exterior(&blank).len(), 20);
        let ring = BinaryImage::from_ascii(".....\n.###.\n.#.#.\n.###.\n.....").unwrap();
        assert_eq!(flood_exterior(&ring).len(), 16);
        assert_eq!(oracle_interior(&ring), pts(&[(3, 3)]));
        let single = BinaryImage::from_ascii("...\n.#.\n...").unwrap();
        assert!(oracle_interior(&single).is_empty());
    }

    #[test]
    fn nested_rings() {
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
        let interior = oracle_interior(&img);
        assert_eq!(interior.len(), 16 + 1);
        assert!(interior.contains(&Point::new(5, 5)));
        assert!(interior.contains(&Point::new(3, 3)));
        assert_eq!(four_components(img.canvas(), &interior).len(), 2);
    }

    #[test]
    fn jordan_examples() {
        let ring = BinaryImage::from_ascii(".....\n.###.\n.#.#.\n.###.\n.....").unwrap();
        assert!(jordan_check(&ring).unwrap());
        let mut rect = BinaryImage::new(Canvas::new(12, 12).unwrap());
        for k in 2..=11 {
            rect.set(Point::new(2, k), true);
            rect.set(Point::new(11, k), true);
            rect.set(Point::new(k, 2), true);
            rect.set(Point::new(k, 11), true);
        }
        rect.set(Point::new(11, 11), true);
        let framed = crate::raster::ensure_frame(&rect);
        assert!(jordan_check(&framed).unwrap());

        // Two diagonal strokes meeting in a corner: the picture reads as
        // either an open or a closed curve.
        let ambiguous = BinaryImage::from_ascii(
            "......
             .#....
             ..#...
             ...##.
             ......",
        )
        .unwrap();
        match jordan_check(&ambiguous) {
            Err(LociError::HypothesisViolated { offenders }) => assert!(!offenders.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn l_pixel_oracle() {
        let pair =
            BinaryImage::from_ascii("......\n......\n..#...\n...#..\n......\n......").unwrap();
        assert_eq!(l_pixels(&pair), pts(&[(3, 4), (4, 3)]));
        let corner = BinaryImage::from_ascii(".....\n.##..\n.#...\n.....").unwrap();
        assert!(l_pixels(&corner).is_empty());
    }

    #[test]
    fn generator_postconditions() {
        let img = gen_test_picture(1, 16, 16, PictureKind::RectilinearSimple).unwrap();
        assert!(jordan_check(&img).unwrap());
        let img = gen_test_picture(2, 16, 16, PictureKind::RandomConnected).unwrap();
        assert!(is_connected_picture(&img).unwrap());
        assert!(img.border_is_white());
        for kind in PictureKind::ALL {
            assert_eq!(
                gen_test_picture(7, 20, 30, kind).unwrap(),
                gen_test_picture(7, 20, 30, kind).unwrap()
            );
        }
        assert!(gen_test_picture(1, 7, 16, PictureKind::RandomConnected).is_err());
    }

    #[test]
    fn degenerate_cycle() {
        let single = gen_test_picture(3, 10, 10, PictureKind::Degenerate).unwrap();
        assert_eq!(single.black_count(), 1);
        for seed in 0..30 {
            let img = gen_test_picture(seed, 10, 12, PictureKind::Degenerate).unwrap();
            assert!(is_connected_picture(&img).unwrap());
            assert!(img.border_is_white());
            assert!(oracle_interior(&img).is_empty());
        }
    }
}
