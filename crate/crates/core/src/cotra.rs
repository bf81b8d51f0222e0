//! Lego-curve tracing, repair, pruning and the corrected fill.
//!
//! A Lego curve wraps a connected picture in a closed 4-connected pixel
//! walk that runs along the boundary between the picture (with its holes)
//! and the exterior. Diagonal gaps in the picture are plugged with
//! exterior pixels, the L-pixels. Tracing is a crack follower: the cursor
//! is a boundary pixel together with the side on which the exterior lies,
//! and the orientation counter turns clockwise around convex corners and
//! back counter-clockwise around concave ones.

use std::collections::BTreeSet;

use crate::error::{LociError, Result};
use crate::flood::frame_flood;
use crate::raster::{BinaryImage, Canvas, Cell, LocatingMatrix, Point};
use crate::scanfill::fill_from_curve;
use crate::topology::{detect_spikes, is_connected_picture, DiscreteCurve, FOUR_OFFSETS};
use crate::Execution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegoCurve {
    /// Closed walk, first point not repeated at the end.
    pub points: Vec<Point>,
    /// Curve pixels that are white in the source picture.
    pub lpixels: BTreeSet<Point>,
}

impl LegoCurve {
    fn from_points(img: &BinaryImage, points: Vec<Point>) -> Self {
        let lpixels = points.iter().copied().filter(|&p| !img.get(p)).collect();
        LegoCurve { points, lpixels }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pixel_set(&self) -> BTreeSet<Point> {
        self.points.iter().copied().collect()
    }

    pub fn to_discrete(&self) -> Result<DiscreteCurve> {
        DiscreteCurve::closed(self.points.clone())
    }

    /// Every consecutive pair, including last to first, is 4-adjacent.
    pub fn is_four_connected(&self) -> bool {
        let n = self.points.len();
        n >= 2
            && (0..n).all(|i| {
                let (a, b) = (self.points[i], self.points[(i + 1) % n]);
                a.y.abs_diff(b.y) + a.x.abs_diff(b.x) == 1
            })
    }

    pub fn is_spike_free(&self) -> bool {
        self.to_discrete()
            .map(|c| detect_spikes(&c).is_empty())
            .unwrap_or(false)
    }
}

/// Cursor of the boundary follower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceState {
    /// Side of `pixel` facing the exterior: 0 up, 1 right, 2 down, 3 left.
    pub orientation: u8,
    pub pixel: Point,
    /// Number of points emitted so far.
    pub cursor: usize,
    pub start_pixel: Point,
}

impl TraceState {
    fn key(&self) -> (Point, u8) {
        (self.pixel, self.orientation)
    }
}

fn step(canvas: Canvas, p: Point, dir: u8) -> Option<Point> {
    let (dy, dx) = FOUR_OFFSETS[dir as usize];
    canvas.offset(p, dy, dx)
}

fn check_traceable(img: &BinaryImage) -> Result<()> {
    if !img.border_is_white() {
        return Err(LociError::Precondition(
            "image must carry a white frame; call ensure_frame first".into(),
        ));
    }
    if !is_connected_picture(img)? {
        return Err(LociError::Precondition("picture is not 8-connected".into()));
    }
    if img.black_count() == 1 {
        return Err(LociError::Degenerate(
            "picture consists of a single pixel".into(),
        ));
    }
    Ok(())
}

/// White pixels 4-connected to the frame.
pub fn exterior_mask(img: &BinaryImage) -> (Vec<bool>, u64) {
    frame_flood(img.canvas(), img.bits())
}

/// Traces the Lego curve of a framed, 8-connected picture with at least
/// two pixels. The result is 4-connected and closed but may still carry
/// spikes and plugs that seal exterior pockets.
pub fn trace_lego_curve(img: &BinaryImage) -> Result<LegoCurve> {
    check_traceable(img)?;
    let (ext, _) = exterior_mask(img);
    trace_counted(img, &ext).map(|(c, _)| c)
}

fn trace_counted(img: &BinaryImage, ext: &[bool]) -> Result<(LegoCurve, u64)> {
    let canvas = img.canvas();
    let start = img
        .black_pixels()
        .next()
        .ok_or_else(|| LociError::Precondition("picture has no black pixel".into()))?;
    // The frame is white, so every neighbour of a picture pixel exists.
    let in_ext = |p: Option<Point>| p.is_none_or(|p| ext[canvas.index(p)]);

    let mut points = vec![start];
    let mut state = TraceState {
        orientation: 0,
        pixel: start,
        cursor: 1,
        start_pixel: start,
    };
    let origin = state.key();
    let limit = 4 * canvas.len() as u64 + 4;
    let mut steps = 0u64;
    loop {
        steps += 1;
        if steps > limit {
            return Err(LociError::Precondition(
                "boundary trace did not close".into(),
            ));
        }
        let p = state.pixel;
        let d = state.orientation;
        let f = (d + 1) % 4;
        let a = step(canvas, p, f);
        let e = step(canvas, p, d);
        let c = a.and_then(|a| step(canvas, a, d));
        if !in_ext(c) {
            let c = c.unwrap();
            let a = a.unwrap();
            // Concave corner or diagonal gap: go round through `a` when it is
            // black, otherwise plug the gap with the exterior pixel `e`.
            points.push(if img.get(a) { a } else { e.unwrap() });
            points.push(c);
            state.pixel = c;
            state.orientation = (f + 2) % 4;
        } else if !in_ext(a) {
            points.push(a.unwrap());
            state.pixel = a.unwrap();
        } else {
            state.orientation = f;
        }
        state.cursor = points.len();
        if state.key() == origin {
            break;
        }
    }
    if points.len() > 1 && points.last() == points.first() {
        points.pop();
    }
    if points.len() == 1 {
        return Err(LociError::Degenerate(
            "picture consists of a single pixel".into(),
        ));
    }
    Ok((LegoCurve::from_points(img, points), steps))
}

/// Exterior pixels that the flood from the frame cannot reach once the
/// curve pixels are blocked as well as the picture, minus the curve itself.
fn trapped_mask(img: &BinaryImage, ext: &[bool], points: &[Point]) -> (Vec<bool>, u64) {
    let canvas = img.canvas();
    let mut blocked = img.bits().to_vec();
    for &p in points {
        blocked[canvas.index(p)] = true;
    }
    let (reach, steps) = frame_flood(canvas, &blocked);
    let trapped = (0..canvas.len())
        .map(|i| ext[i] && !reach[i] && !blocked[i])
        .collect();
    (trapped, steps)
}

/// Repairs L-pixel plugs that seal off exterior pockets.
///
/// A plug `e` between curve points `u` and `v` is first moved to the
/// opposite corner `u + v - e` of the same 2x2 block when that corner is
/// black, or is an exterior pixel outside every sealed pocket. Pockets that
/// stay sealed and consist of L-pixels only are then threaded by the
/// curve. A pocket holding a pixel that is not an L-pixel cannot be
/// released by any curve through picture and L-pixels, and remains.
pub fn repair_trapped_lpixels(img: &BinaryImage, curve: LegoCurve) -> LegoCurve {
    let (ext, _) = exterior_mask(img);
    repair_counted(img, &ext, curve).0
}

fn repair_counted(img: &BinaryImage, ext: &[bool], curve: LegoCurve) -> (LegoCurve, u64) {
    let (points, mut steps) = reroute_plugs(img, ext, curve.points);
    let (trapped, s) = trapped_mask(img, ext, &points);
    steps += s;
    if !trapped.iter().any(|&t| t) {
        return (LegoCurve::from_points(img, points), steps);
    }

    // Pockets made only of L-pixels can be threaded instead: trace again
    // with them painted black and keep the result if the new curve runs
    // through every pocket pixel.
    let canvas = img.canvas();
    let mut best = points;
    let mut painted = img.clone();
    let mut painted_ext = ext.to_vec();
    let mut any = false;
    for pocket in pockets(canvas, &trapped) {
        if pocket.iter().all(|&p| is_lpixel(img, p)) {
            for &p in &pocket {
                painted.set(p, true);
                painted_ext[canvas.index(p)] = false;
            }
            any = true;
        }
    }
    if any {
        if let Ok((retraced, s)) = trace_counted(&painted, &painted_ext) {
            steps += s;
            let (pts, s) = reroute_plugs(&painted, &painted_ext, retraced.points);
            steps += s;
            let on: BTreeSet<Point> = pts.iter().copied().collect();
            let threaded = (0..canvas.len())
                .filter(|&i| ext[i] && !painted_ext[i])
                .all(|i| on.contains(&canvas.point(i)));
            let (bad, s) = encloses_exterior(canvas, ext, &pts);
            steps += s;
            if threaded && !bad {
                best = pts;
            }
        }
    }
    (LegoCurve::from_points(img, best), steps)
}

fn encloses_exterior(canvas: Canvas, ext: &[bool], points: &[Point]) -> (bool, u64) {
    let (inside, steps) = fill_from_curve(canvas, points, Execution::Sequential);
    let on: BTreeSet<Point> = points.iter().copied().collect();
    let bad = (0..canvas.len()).any(|i| inside[i] && ext[i] && !on.contains(&canvas.point(i)));
    (bad, steps)
}

/// An exterior pixel with two black 4-neighbours that are diagonal to
/// each other.
pub fn is_lpixel(img: &BinaryImage, p: Point) -> bool {
    let black = |dy: isize, dx: isize| img.black_at(p.y as isize + dy, p.x as isize + dx);
    (black(-1, 0) || black(1, 0)) && (black(0, -1) || black(0, 1))
}

fn pockets(canvas: Canvas, trapped: &[bool]) -> Vec<Vec<Point>> {
    let mut seen = vec![false; canvas.len()];
    let mut out = Vec::new();
    for start in 0..canvas.len() {
        if !trapped[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![canvas.point(start)];
        let mut pocket = Vec::new();
        while let Some(p) = stack.pop() {
            pocket.push(p);
            for &(dy, dx) in &FOUR_OFFSETS {
                if let Some(q) = canvas.offset(p, dy, dx) {
                    let i = canvas.index(q);
                    if trapped[i] && !seen[i] {
                        seen[i] = true;
                        stack.push(q);
                    }
                }
            }
        }
        out.push(pocket);
    }
    out
}

fn reroute_plugs(img: &BinaryImage, ext: &[bool], mut points: Vec<Point>) -> (Vec<Point>, u64) {
    let canvas = img.canvas();
    let n = points.len();
    let sealed = |points: &[Point]| {
        let (trapped, s) = trapped_mask(img, ext, points);
        let count = trapped.iter().filter(|&&t| t).count();
        (trapped, count, s)
    };
    let (mut trapped, mut count, mut steps) = sealed(&points);
    // Every accepted move strictly lowers the sealed count.
    while count > 0 {
        let alternative = |i: usize| -> Option<Point> {
            let e = points[i];
            let (u, v) = (points[(i + n - 1) % n], points[(i + 1) % n]);
            if u.y == v.y || u.x == v.x {
                return None;
            }
            // u and v are diagonal; e is one free corner of their block.
            let a = Point::new(u.y + v.y - e.y, u.x + v.x - e.x);
            let ai = canvas.index(a);
            (img.get(a) || (ext[ai] && !trapped[ai])).then_some(a)
        };
        let plugs: BTreeSet<Point> = points
            .iter()
            .copied()
            .filter(|&e| {
                !img.get(e)
                    && FOUR_OFFSETS.iter().any(|&(dy, dx)| {
                        canvas
                            .offset(e, dy, dx)
                            .is_some_and(|q| trapped[canvas.index(q)])
                    })
            })
            .collect();
        let mut best: Option<(usize, Vec<Point>, Vec<bool>)> = None;
        for e in plugs {
            // A plug visited more than once only frees the pocket when every
            // visit moves.
            let moves: Option<Vec<(usize, Point)>> = (0..n)
                .filter(|&j| points[j] == e)
                .map(|j| alternative(j).map(|a| (j, a)))
                .collect();
            let Some(moves) = moves else { continue };
            let mut cand = points.clone();
            for (j, a) in moves {
                cand[j] = a;
            }
            let (t, c, s) = sealed(&cand);
            steps += s;
            if c >= best.as_ref().map_or(count, |b| b.0) {
                continue;
            }
            // A move that leaves exterior pixels enclosed by the curve trades
            // a sealed pocket for a wrong interior.
            let (bad, s) = encloses_exterior(canvas, ext, &cand);
            steps += s;
            if !bad {
                best = Some((c, cand, t));
                break;
            }
        }
        let Some((c, cand, t)) = best else { break };
        points = cand;
        trapped = t;
        count = c;
    }
    (points, steps)
}

/// Removes spikes by collapsing each out-and-back excursion to its base
/// until none is left.
pub fn prune_spikes(img: &BinaryImage, curve: LegoCurve) -> Result<LegoCurve> {
    let mut points = curve.points;
    loop {
        let spikes = detect_spikes(&DiscreteCurve::closed(points.clone())?);
        let Some(&apex) = spikes.first() else { break };
        let n = points.len();
        let at = |k: isize| points[(apex as isize + k).rem_euclid(n as isize) as usize];
        let mut r = 0;
        while 2 * (r + 1) < n && at(-(r as isize + 1)) == at(r as isize + 1) {
            r += 1;
        }
        if 2 * r + 2 >= n {
            return Err(LociError::Degenerate(
                "picture is a bare spike; nothing is left after pruning".into(),
            ));
        }
        // Drop apex-r+1 ..= apex+r, keeping the base at apex-r.
        let keep: Vec<Point> = (r as isize + 1..=n as isize - r as isize).map(at).collect();
        points = keep;
    }
    let distinct: BTreeSet<Point> = points.iter().copied().collect();
    if distinct.len() < 4 {
        return Err(LociError::Degenerate(
            "curve encloses no area after pruning".into(),
        ));
    }
    Ok(LegoCurve::from_points(img, points))
}

/// Whether the pixels reached from the frame around the picture and the
/// curve, together with the L-pixels, are exactly the picture's exterior.
///
/// Picture pixels stay blocked: pruned whiskers are picture pixels that no
/// longer lie on the curve.
pub fn exterior_identity_holds(img: &BinaryImage, curve: &LegoCurve) -> bool {
    let canvas = img.canvas();
    let (ext, _) = exterior_mask(img);
    let mut blocked = img.bits().to_vec();
    for &p in &curve.points {
        blocked[canvas.index(p)] = true;
    }
    let (reach, _) = frame_flood(canvas, &blocked);
    (0..canvas.len()).all(|i| {
        let p = canvas.point(i);
        ext[i] == (reach[i] || curve.lpixels.contains(&p))
    })
}

/// Exterior pixels cut off from the frame by the curve, grouped into
/// 4-connected pockets.
pub fn sealed_pockets(img: &BinaryImage, curve: &LegoCurve) -> Vec<Vec<Point>> {
    let (ext, _) = exterior_mask(img);
    let (trapped, _) = trapped_mask(img, &ext, &curve.points);
    pockets(img.canvas(), &trapped)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotraOutput {
    pub matrix: LocatingMatrix,
    /// `None` when the picture was degenerate.
    pub curve: Option<LegoCurve>,
    pub warnings: Vec<String>,
    /// Elementary steps over flood, trace, repair and fill.
    pub steps: u64,
}

/// Traces, repairs and prunes the Lego curve, then fills it.
///
/// Degenerate pictures (a single pixel, bare segments) give a matrix with
/// no interior and a warning instead of an error.
pub fn cotra_fill(img: &BinaryImage) -> Result<CotraOutput> {
    cotra_fill_with(img, Execution::default())
}

pub fn cotra_fill_with(img: &BinaryImage, exec: Execution) -> Result<CotraOutput> {
    let canvas = img.canvas();
    let picture_only = || {
        let cells = img
            .bits()
            .iter()
            .map(|&b| if b { Cell::Picture } else { Cell::Exterior })
            .collect();
        LocatingMatrix::from_cells(canvas, cells)
    };
    match check_traceable(img) {
        Ok(()) => {}
        Err(LociError::Degenerate(msg)) => {
            return Ok(CotraOutput {
                matrix: picture_only(),
                curve: None,
                warnings: vec![msg],
                steps: canvas.len() as u64,
            })
        }
        Err(e) => return Err(e),
    }
    let (ext, mut steps) = exterior_mask(img);
    let curve = trace_counted(img, &ext).and_then(|(curve, s)| {
        steps += s;
        let (curve, s) = repair_counted(img, &ext, curve);
        steps += s;
        prune_spikes(img, curve)
    });
    let curve = match curve {
        Ok(c) => c,
        Err(LociError::Degenerate(msg)) => {
            return Ok(CotraOutput {
                matrix: picture_only(),
                curve: None,
                warnings: vec![msg],
                steps,
            })
        }
        Err(e) => return Err(e),
    };

    let mut warnings = Vec::new();
    let (trapped, _) = trapped_mask(img, &ext, &curve.points);
    let sealed = trapped.iter().filter(|&&t| t).count();
    if sealed > 0 {
        warnings.push(format!(
            "{sealed} exterior pixel(s) sealed off by L-pixels at a double pinch"
        ));
    }

    let (inside, s) = fill_from_curve(canvas, &curve.points, exec);
    steps += s;
    let cells = (0..canvas.len())
        .map(|i| {
            let p = canvas.point(i);
            if img.bits()[i] {
                Cell::Picture
            } else if curve.lpixels.contains(&p) {
                Cell::LPixel
            } else if inside[i] {
                Cell::Interior
            } else {
                Cell::Exterior
            }
        })
        .collect();
    Ok(CotraOutput {
        matrix: LocatingMatrix::from_cells(canvas, cells),
        curve: Some(curve),
        warnings,
        steps,
    })
}
