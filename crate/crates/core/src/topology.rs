//! Discrete topology predicates: adjacency, connectedness, thickness,
//! thinness, self-intersections and spikes.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{LociError, Result};
use crate::raster::{BinaryImage, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdjacencyKind {
    /// Unit step along one axis.
    Four,
    /// Unit step along both axes.
    Diagonal,
    None,
}

pub const FOUR_OFFSETS: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];
pub const EIGHT_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
];

#[inline]
fn deltas(p: Point, q: Point) -> (usize, usize) {
    (p.y.abs_diff(q.y), p.x.abs_diff(q.x))
}

#[inline]
pub fn is_four_adjacent(p: Point, q: Point) -> bool {
    let (dy, dx) = deltas(p, q);
    dy + dx == 1
}

#[inline]
pub fn is_eight_adjacent(p: Point, q: Point) -> bool {
    let (dy, dx) = deltas(p, q);
    dy.max(dx) == 1
}

pub fn adjacency_kind(p: Point, q: Point) -> Result<AdjacencyKind> {
    if p == q {
        return Err(LociError::InvalidArgument(format!(
            "adjacency of {p} with itself"
        )));
    }
    Ok(match deltas(p, q) {
        (0, 1) | (1, 0) => AdjacencyKind::Four,
        (1, 1) => AdjacencyKind::Diagonal,
        _ => AdjacencyKind::None,
    })
}

/// An ordered list of pixels with 8-adjacent consecutive entries.
///
/// Closed curves are stored without repeating the first point at the end;
/// the last point must be adjacent to the first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteCurve {
    points: Vec<Point>,
    closed: bool,
}

impl DiscreteCurve {
    pub fn new(mut points: Vec<Point>, closed: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(LociError::InvalidArgument("empty curve".into()));
        }
        if closed && points.len() > 1 && points.first() == points.last() {
            points.pop();
        }
        for w in points.windows(2) {
            if !is_eight_adjacent(w[0], w[1]) {
                return Err(LociError::InvalidArgument(format!(
                    "curve step {} -> {} is not 8-connected",
                    w[0], w[1]
                )));
            }
        }
        if closed && points.len() > 1 {
            let (a, b) = (points[points.len() - 1], points[0]);
            if !is_eight_adjacent(a, b) {
                return Err(LociError::InvalidArgument(format!(
                    "closing step {a} -> {b} is not 8-connected"
                )));
            }
        }
        Ok(DiscreteCurve { points, closed })
    }

    pub fn open(points: Vec<Point>) -> Result<Self> {
        Self::new(points, false)
    }

    pub fn closed(points: Vec<Point>) -> Result<Self> {
        Self::new(points, true)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Consecutive steps, including the closing one for closed curves.
    pub fn steps(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = if self.closed && n > 1 {
            n
        } else {
            n.saturating_sub(1)
        };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.points.len());
        self.points.iter().all(|p| seen.insert(*p))
    }

    /// Every step is a unit horizontal or vertical move.
    pub fn is_four_connected(&self) -> bool {
        self.steps().all(|(a, b)| is_four_adjacent(a, b))
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        DiscreteCurve {
            points,
            closed: self.closed,
        }
    }
}

/// Whether the black set is 8-connected.
pub fn is_connected_picture(img: &BinaryImage) -> Result<bool> {
    let canvas = img.canvas();
    let Some(start) = img.black_pixels().next() else {
        return Err(LociError::InvalidArgument(
            "picture has no black pixel".into(),
        ));
    };
    let total = img.black_count();
    let mut seen = vec![false; canvas.len()];
    let mut queue = VecDeque::from([start]);
    seen[canvas.index(start)] = true;
    let mut reached = 1usize;
    while let Some(p) = queue.pop_front() {
        for (dy, dx) in EIGHT_OFFSETS {
            if let Some(q) = canvas.offset(p, dy, dx) {
                let i = canvas.index(q);
                if img.get(q) && !seen[i] {
                    seen[i] = true;
                    reached += 1;
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(reached == total)
}

/// Side of the largest all-black square that contains `p`.
pub fn thickness_at(img: &BinaryImage, p: Point) -> Result<usize> {
    let canvas = img.canvas();
    if !canvas.contains(p) || !img.get(p) {
        return Err(LociError::InvalidArgument(format!(
            "{p} is not a black pixel"
        )));
    }
    Ok(thickness_table(img).at(p))
}

/// Largest all-black square with its bottom-right corner at each pixel.
struct SquareTable {
    rows: usize,
    cols: usize,
    side: Vec<usize>,
    max_side: usize,
}

fn thickness_table(img: &BinaryImage) -> SquareTable {
    let (rows, cols) = (img.rows(), img.cols());
    let bits = img.bits();
    let mut side = vec![0usize; rows * cols];
    for y in 0..rows {
        for x in 0..cols {
            let i = y * cols + x;
            if !bits[i] {
                continue;
            }
            side[i] = if y == 0 || x == 0 {
                1
            } else {
                1 + side[i - 1].min(side[i - cols]).min(side[i - cols - 1])
            };
        }
    }
    let max_side = side.iter().copied().max().unwrap_or(0);
    SquareTable {
        rows,
        cols,
        side,
        max_side,
    }
}

impl SquareTable {
    fn at(&self, p: Point) -> usize {
        let (py, px) = (p.y - 1, p.x - 1);
        let max_side = self.max_side;
        let mut best = 1;
        // A square of side k with bottom-right (y, x) covers p iff
        // y - k < py <= y and x - k < px <= x.
        for y in py..self.rows.min(py + max_side) {
            for x in px..self.cols.min(px + max_side) {
                let need = (y - py).max(x - px) + 1;
                let s = self.side[y * self.cols + x];
                if s >= need && s > best {
                    best = s;
                }
            }
        }
        best
    }
}

/// Local thinness of an injective curve drawn over `img`.
///
/// Thickness is measured in the picture formed by the black pixels of `img`
/// together with the curve's own pixels. A cover by intervals of at least
/// four indices, each thin everywhere, exists exactly when the curve has at
/// least four points and none of them sits in a 2x2 black block.
pub fn is_locally_thin(curve: &DiscreteCurve, img: &BinaryImage) -> Result<bool> {
    if !curve.is_injective() {
        return Err(LociError::InvalidArgument(
            "local thinness needs an injective curve".into(),
        ));
    }
    let canvas = img.canvas();
    if let Some(p) = curve.points().iter().find(|p| !canvas.contains(**p)) {
        return Err(LociError::InvalidArgument(format!("{p} outside canvas")));
    }
    if curve.len() < 4 {
        return Ok(false);
    }
    let mut union = img.clone();
    for &p in curve.points() {
        union.set(p, true);
    }
    let table = thickness_table(&union);
    Ok(curve.points().iter().all(|&p| table.at(p) == 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelfIntersection {
    Simple,
    SelfCrossing,
    Overlapping,
}

/// Classifies the self-intersection pattern of a curve.
///
/// A self-crossing is a pair of index-disjoint consecutive steps whose
/// pixels are different sets but all fit in one 2x2 block. An overlapping
/// is any revisited pixel. Crossings win when both occur.
pub fn classify_self_intersection(curve: &DiscreteCurve) -> SelfIntersection {
    if has_self_crossing(curve) {
        SelfIntersection::SelfCrossing
    } else if !curve.is_injective() {
        SelfIntersection::Overlapping
    } else {
        SelfIntersection::Simple
    }
}

fn has_self_crossing(curve: &DiscreteCurve) -> bool {
    let pts = curve.points();
    let n = pts.len();
    let mut pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if curve.is_closed() && n >= 3 {
        pairs.push((n - 1, 0));
    }
    // Bucket every step by the 2x2 blocks (keyed by top-left) that hold it.
    let mut blocks: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let (a, b) = (pts[i], pts[j]);
        let ys = if a.y == b.y {
            vec![a.y - 1, a.y]
        } else {
            vec![a.y.min(b.y)]
        };
        let xs = if a.x == b.x {
            vec![a.x - 1, a.x]
        } else {
            vec![a.x.min(b.x)]
        };
        for &ty in &ys {
            for &tx in &xs {
                blocks.entry((ty, tx)).or_default().push(k);
            }
        }
    }
    for members in blocks.values() {
        for (s, &ka) in members.iter().enumerate() {
            for &kb in &members[s + 1..] {
                let (i1, j1) = pairs[ka];
                let (i2, j2) = pairs[kb];
                if i1 == i2 || i1 == j2 || j1 == i2 || j1 == j2 {
                    continue;
                }
                let set_a = sorted_pair(pts[i1], pts[j1]);
                let set_b = sorted_pair(pts[i2], pts[j2]);
                if set_a != set_b {
                    return true;
                }
            }
        }
    }
    false
}

fn sorted_pair(a: Point, b: Point) -> (Point, Point) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpikeKind {
    Vertical,
    Horizontal,
}

/// Indices of spike apexes, in increasing order.
///
/// An index is a vertical spike when the two points on each side share its
/// column and its row is a one-sided extremum over that window; horizontal
/// spikes swap the axes. Closed curves wrap; on open curves the window must
/// fit inside the list.
pub fn detect_spikes(curve: &DiscreteCurve) -> Vec<usize> {
    detect_spikes_with_kind(curve)
        .into_iter()
        .map(|(i, _)| i)
        .collect()
}

pub fn detect_spikes_with_kind(curve: &DiscreteCurve) -> Vec<(usize, SpikeKind)> {
    let pts = curve.points();
    let n = pts.len();
    if n < 5 {
        return Vec::new();
    }
    let closed = curve.is_closed();
    let mut out = Vec::new();
    for i in 0..n {
        let window: Option<[Point; 4]> = if closed {
            Some([
                pts[(i + n - 2) % n],
                pts[(i + n - 1) % n],
                pts[(i + 1) % n],
                pts[(i + 2) % n],
            ])
        } else if i >= 2 && i + 2 < n {
            Some([pts[i - 2], pts[i - 1], pts[i + 1], pts[i + 2]])
        } else {
            None
        };
        let Some(w) = window else { continue };
        if let Some(kind) = spike_at(pts[i], &w) {
            out.push((i, kind));
        }
    }
    out
}

pub(crate) fn spike_at(apex: Point, window: &[Point; 4]) -> Option<SpikeKind> {
    let one_sided =
        |vals: [usize; 4], v: usize| vals.iter().all(|&u| u >= v) || vals.iter().all(|&u| u <= v);
    if window.iter().all(|q| q.x == apex.x) && one_sided(window.map(|q| q.y), apex.y) {
        return Some(SpikeKind::Vertical);
    }
    if window.iter().all(|q| q.y == apex.y) && one_sided(window.map(|q| q.x), apex.x) {
        return Some(SpikeKind::Horizontal);
    }
    None
}
