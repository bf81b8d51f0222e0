//! Canvas, bitmaps and locating matrices, plus Netpbm input and the
//! matrix encoders.
//!
//! Public coordinates are 1-based `(y, x)` with `y` growing downward.
//! Storage is row-major and 0-based.

use std::fmt;

use crate::error::{LociError, ParseError, ParseErrorKind, Result};

/// Grey values strictly below this count as picture when reading graymaps.
pub const DEFAULT_THRESHOLD: u8 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Canvas {
    rows: usize,
    cols: usize,
}

impl Canvas {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LociError::InvalidArgument(format!(
                "canvas must be at least 1x1, got {rows}x{cols}"
            )));
        }
        Ok(Canvas { rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: Point) -> bool {
        p.y >= 1 && p.x >= 1 && p.y <= self.rows && p.x <= self.cols
    }

    /// True for pixels on the one-pixel ring around the canvas.
    pub fn is_frame(&self, p: Point) -> bool {
        p.y == 1 || p.x == 1 || p.y == self.rows || p.x == self.cols
    }

    #[inline]
    pub fn index(&self, p: Point) -> usize {
        debug_assert!(self.contains(p), "{p:?} outside {self:?}");
        (p.y - 1) * self.cols + (p.x - 1)
    }

    #[inline]
    pub fn point(&self, index: usize) -> Point {
        Point::new(index / self.cols + 1, index % self.cols + 1)
    }

    /// `p + (dy, dx)` if it stays on the canvas.
    #[inline]
    pub fn offset(&self, p: Point, dy: isize, dx: isize) -> Option<Point> {
        let y = p.y as isize + dy;
        let x = p.x as isize + dx;
        if y < 1 || x < 1 || y > self.rows as isize || x > self.cols as isize {
            None
        } else {
            Some(Point::new(y as usize, x as usize))
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// A pixel position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub y: usize,
    pub x: usize,
}

impl Point {
    pub const fn new(y: usize, x: usize) -> Self {
        Point { y, x }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.y, self.x)
    }
}

impl From<(usize, usize)> for Point {
    fn from((y, x): (usize, usize)) -> Self {
        Point::new(y, x)
    }
}

/// Black/white bitmap on a canvas. Black pixels form the digital picture.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    canvas: Canvas,
    pixels: Vec<bool>,
    framed: bool,
}

impl BinaryImage {
    /// All-white image.
    pub fn new(canvas: Canvas) -> Self {
        BinaryImage {
            canvas,
            pixels: vec![false; canvas.len()],
            framed: false,
        }
    }

    pub fn from_fn(canvas: Canvas, mut f: impl FnMut(Point) -> bool) -> Self {
        let pixels = canvas.points().map(&mut f).collect();
        BinaryImage {
            canvas,
            pixels,
            framed: false,
        }
    }

    pub fn from_points(canvas: Canvas, black: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut img = BinaryImage::new(canvas);
        for p in black {
            if !canvas.contains(p) {
                return Err(LociError::InvalidArgument(format!("{p} outside canvas")));
            }
            img.set(p, true);
        }
        Ok(img)
    }

    /// Parses a picture drawn with `#` (black) and `.` (white), one row per
    /// line. Blank lines and surrounding whitespace are ignored.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let lines: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let rows = lines.len();
        let cols = lines.first().map_or(0, |l| l.chars().count());
        let canvas = Canvas::new(rows, cols)?;
        let mut pixels = Vec::with_capacity(canvas.len());
        for (i, line) in lines.iter().enumerate() {
            if line.chars().count() != cols {
                return Err(LociError::InvalidArgument(format!(
                    "ragged ascii picture: row {} has {} columns, expected {cols}",
                    i + 1,
                    line.chars().count()
                )));
            }
            for c in line.chars() {
                pixels.push(match c {
                    '#' | '1' | 'X' => true,
                    '.' | '0' | '_' => false,
                    other => {
                        return Err(LociError::InvalidArgument(format!(
                            "unexpected character {other:?} in ascii picture"
                        )))
                    }
                });
            }
        }
        Ok(BinaryImage {
            canvas,
            pixels,
            framed: false,
        })
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn rows(&self) -> usize {
        self.canvas.rows
    }

    pub fn cols(&self) -> usize {
        self.canvas.cols
    }

    /// Whether the image went through [`ensure_frame`].
    pub fn is_framed(&self) -> bool {
        self.framed
    }

    #[inline]
    pub fn get(&self, p: Point) -> bool {
        self.pixels[self.canvas.index(p)]
    }

    /// Colour at signed coordinates; anything off the canvas is white.
    #[inline]
    pub fn black_at(&self, y: isize, x: isize) -> bool {
        if y < 1 || x < 1 || y > self.canvas.rows as isize || x > self.canvas.cols as isize {
            return false;
        }
        self.pixels[(y as usize - 1) * self.canvas.cols + (x as usize - 1)]
    }

    pub fn set(&mut self, p: Point, black: bool) {
        let i = self.canvas.index(p);
        self.pixels[i] = black;
        if black && self.canvas.is_frame(p) {
            self.framed = false;
        }
    }

    /// Row-major bit slice.
    pub fn bits(&self) -> &[bool] {
        &self.pixels
    }

    /// Pixels of row `y` (1-based) as a slice.
    pub fn row(&self, y: usize) -> &[bool] {
        let start = (y - 1) * self.canvas.cols;
        &self.pixels[start..start + self.canvas.cols]
    }

    pub fn black_pixels(&self) -> impl Iterator<Item = Point> + '_ {
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| self.canvas.point(i))
    }

    pub fn black_count(&self) -> usize {
        self.pixels.iter().filter(|&&b| b).count()
    }

    pub fn border_is_white(&self) -> bool {
        self.canvas
            .points()
            .filter(|&p| self.canvas.is_frame(p))
            .all(|p| !self.get(p))
    }

    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity(self.canvas.len() + self.canvas.rows);
        for y in 1..=self.canvas.rows {
            for &b in self.row(y) {
                s.push(if b { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "BinaryImage {}x{} framed={}",
            self.canvas.rows, self.canvas.cols, self.framed
        )?;
        f.write_str(&self.to_ascii())
    }
}

/// Returns `img` with a guaranteed white one-pixel frame.
///
/// Pictures touching the border are padded by one pixel on each side, so
/// their coordinates shift by `(+1, +1)`. Images whose border is already
/// white are returned unchanged apart from the `framed` flag.
pub fn ensure_frame(img: &BinaryImage) -> BinaryImage {
    if img.border_is_white() {
        let mut out = img.clone();
        out.framed = true;
        return out;
    }
    let canvas = Canvas {
        rows: img.rows() + 2,
        cols: img.cols() + 2,
    };
    let mut out = BinaryImage::new(canvas);
    for p in img.black_pixels() {
        out.set(Point::new(p.y + 1, p.x + 1), true);
    }
    out.framed = true;
    out
}

/// Classification of one pixel in the output of a fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(u8)]
pub enum Cell {
    #[default]
    Exterior = 0,
    Picture = 1,
    Interior = 2,
    LPixel = 3,
}

impl Cell {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn token(self) -> &'static str {
        match self {
            Cell::Exterior => "EXTERIOR",
            Cell::Picture => "PICTURE",
            Cell::Interior => "INTERIOR",
            Cell::LPixel => "LPIXEL",
        }
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            Cell::Exterior => [255, 255, 255],
            Cell::Picture => [0, 0, 0],
            Cell::Interior => [255, 255, 0],
            Cell::LPixel => [255, 0, 255],
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Per-pixel classification answering point-location queries in O(1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocatingMatrix {
    canvas: Canvas,
    cells: Vec<Cell>,
}

impl LocatingMatrix {
    pub fn new(canvas: Canvas) -> Self {
        LocatingMatrix {
            canvas,
            cells: vec![Cell::Exterior; canvas.len()],
        }
    }

    pub(crate) fn from_cells(canvas: Canvas, cells: Vec<Cell>) -> Self {
        assert_eq!(cells.len(), canvas.len());
        LocatingMatrix { canvas, cells }
    }

    pub fn canvas(&self) -> Canvas {
        self.canvas
    }

    pub fn get(&self, p: Point) -> Cell {
        self.cells[self.canvas.index(p)]
    }

    /// Bounds-checked lookup for user-supplied coordinates.
    pub fn locate(&self, p: Point) -> Option<Cell> {
        self.canvas.contains(p).then(|| self.get(p))
    }

    pub fn set(&mut self, p: Point, cell: Cell) {
        let i = self.canvas.index(p);
        self.cells[i] = cell;
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn count(&self, cell: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == cell).count()
    }

    pub fn points_of(&self, cell: Cell) -> Vec<Point> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cell)
            .map(|(i, _)| self.canvas.point(i))
            .collect()
    }

    /// Boolean mask of the interior cells, row-major.
    pub fn interior_mask(&self) -> Vec<bool> {
        self.cells.iter().map(|&c| c == Cell::Interior).collect()
    }
}

impl fmt::Debug for LocatingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "LocatingMatrix {}x{}",
            self.canvas.rows, self.canvas.cols
        )?;
        for row in self.cells.chunks(self.canvas.cols) {
            for c in row {
                f.write_str(match c {
                    Cell::Exterior => ".",
                    Cell::Picture => "#",
                    Cell::Interior => "o",
                    Cell::LPixel => "L",
                })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixFormat {
    Pgm,
    Ppm,
    Csv,
}

impl MatrixFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MatrixFormat::Pgm => "pgm",
            MatrixFormat::Ppm => "ppm",
            MatrixFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for MatrixFormat {
    type Err = LociError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pgm" => Ok(MatrixFormat::Pgm),
            "ppm" => Ok(MatrixFormat::Ppm),
            "csv" => Ok(MatrixFormat::Csv),
            other => Err(LociError::InvalidArgument(format!(
                "unknown matrix format {other:?}"
            ))),
        }
    }
}

/// Encodes a locating matrix.
///
/// * `Pgm`: plain P2, maxval 3, cell codes verbatim, one text line per row.
/// * `Ppm`: raw P6; exterior white, picture black, interior yellow,
///   L-pixels magenta.
/// * `Csv`: one line per row, comma-separated codes.
pub fn save_locating_matrix(m: &LocatingMatrix, format: MatrixFormat) -> Vec<u8> {
    let (rows, cols) = (m.canvas.rows, m.canvas.cols);
    match format {
        MatrixFormat::Pgm => {
            let mut out = format!("P2\n{cols} {rows}\n3\n").into_bytes();
            for row in m.cells.chunks(cols) {
                push_codes(&mut out, row, b' ');
            }
            out
        }
        MatrixFormat::Ppm => {
            let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
            out.reserve(m.cells.len() * 3);
            for c in &m.cells {
                out.extend_from_slice(&c.rgb());
            }
            out
        }
        MatrixFormat::Csv => {
            let mut out = Vec::with_capacity(m.cells.len() * 2);
            for row in m.cells.chunks(cols) {
                push_codes(&mut out, row, b',');
            }
            out
        }
    }
}

fn push_codes(out: &mut Vec<u8>, row: &[Cell], sep: u8) {
    for (i, c) in row.iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        out.push(b'0' + c.code());
    }
    out.push(b'\n');
}

/// Plain PBM (P1) encoding of a bitmap, used for dumping test pictures.
pub fn encode_pbm(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P1\n{} {}\n", img.cols(), img.rows()).into_bytes();
    for y in 1..=img.rows() {
        for (i, &b) in img.row(y).iter().enumerate() {
            if i > 0 {
                out.push(b' ');
            }
            out.push(if b { b'1' } else { b'0' });
        }
        out.push(b'\n');
    }
    out
}

/// Decodes a P1/P2/P4/P5 Netpbm stream into an (unframed) bitmap.
///
/// Bitmaps map bit 1 to black. Graymaps map a sample to black when its
/// value, rescaled to 0..=255, is below `threshold`.
pub fn load_binary_image(bytes: &[u8], threshold: u8) -> Result<BinaryImage> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.magic()?;
    let cols = r.header_uint("width")?;
    let rows = r.header_uint("height")?;
    if cols == 0 || rows == 0 {
        return Err(r.err_at(r.pos, ParseErrorKind::MalformedHeader("zero dimension")));
    }
    let canvas = Canvas::new(rows, cols)?;
    let n = canvas.len();
    let pixels = match magic {
        b'1' => {
            let mut px = Vec::with_capacity(n);
            while px.len() < n {
                r.skip_space_and_comments();
                match r.peek() {
                    None => return Err(r.err_at(bytes.len(), ParseErrorKind::Truncated)),
                    Some(b'0') => px.push(false),
                    Some(b'1') => px.push(true),
                    Some(_) => return Err(r.err_at(r.pos, ParseErrorKind::BadSample)),
                }
                r.pos += 1;
            }
            px
        }
        b'4' => {
            r.single_whitespace()?;
            let stride = cols.div_ceil(8);
            let payload = r.take(stride * rows)?;
            let mut px = Vec::with_capacity(n);
            for row in payload.chunks(stride) {
                for x in 0..cols {
                    px.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
                }
            }
            px
        }
        b'2' | b'5' => {
            let maxval = r.header_uint("maxval")?;
            if maxval == 0 || maxval > 65535 {
                return Err(r.err_at(r.pos, ParseErrorKind::MalformedHeader("maxval")));
            }
            let is_black = |v: usize| (v as u64) * 255 < (threshold as u64) * (maxval as u64);
            let mut px = Vec::with_capacity(n);
            if magic == b'2' {
                for _ in 0..n {
                    r.skip_space_and_comments();
                    let at = r.pos;
                    let v = r.uint().ok_or_else(|| {
                        if r.pos >= bytes.len() {
                            r.err_at(bytes.len(), ParseErrorKind::Truncated)
                        } else {
                            r.err_at(at, ParseErrorKind::BadSample)
                        }
                    })?;
                    if v > maxval {
                        return Err(r.err_at(at, ParseErrorKind::BadSample));
                    }
                    px.push(is_black(v));
                }
            } else {
                r.single_whitespace()?;
                let wide = maxval > 255;
                let start = r.pos;
                let payload = r.take(if wide { 2 * n } else { n })?;
                for i in 0..n {
                    let v = if wide {
                        u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as usize
                    } else {
                        payload[i] as usize
                    };
                    if v > maxval {
                        let off = start + if wide { 2 * i } else { i };
                        return Err(r.err_at(off, ParseErrorKind::BadSample));
                    }
                    px.push(is_black(v));
                }
            }
            px
        }
        _ => unreachable!("magic() only accepts readable types"),
    };
    Ok(BinaryImage {
        canvas,
        pixels,
        framed: false,
    })
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn err_at(&self, offset: usize, kind: ParseErrorKind) -> LociError {
        ParseError { offset, kind }.into()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn magic(&mut self) -> Result<u8> {
        match self.bytes {
            [b'P', d @ (b'1' | b'2' | b'4' | b'5'), ..] => {
                self.pos = 2;
                Ok(*d)
            }
            [b'P', d @ (b'3' | b'6' | b'7'), ..] => Err(self.err_at(
                0,
                ParseErrorKind::UnsupportedMagic(format!("P{}", *d as char)),
            )),
            _ => Err(self.err_at(0, ParseErrorKind::BadMagic)),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(b) = self.peek() {
            if b == b'#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn uint(&mut self) -> Option<usize> {
        let start = self.pos;
        let mut v: usize = 0;
        while let Some(b) = self.peek().filter(u8::is_ascii_digit) {
            v = v.checked_mul(10)?.checked_add((b - b'0') as usize)?;
            self.pos += 1;
        }
        (self.pos > start).then_some(v)
    }

    fn header_uint(&mut self, field: &'static str) -> Result<usize> {
        self.skip_space_and_comments();
        let at = self.pos;
        if at >= self.bytes.len() {
            return Err(self.err_at(at, ParseErrorKind::Truncated));
        }
        match self.uint() {
            Some(v)
                if self
                    .peek()
                    .is_none_or(|b| b.is_ascii_whitespace() || b == b'#') =>
            {
                Ok(v)
            }
            _ => Err(self.err_at(at, ParseErrorKind::MalformedHeader(field))),
        }
    }

    /// Binary formats separate the header from the raster by exactly one
    /// whitespace byte.
    fn single_whitespace(&mut self) -> Result<()> {
        match self.peek() {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            None => Err(self.err_at(self.pos, ParseErrorKind::Truncated)),
            Some(_) => Err(self.err_at(
                self.pos,
                ParseErrorKind::MalformedHeader("missing separator before raster"),
            )),
        }
    }

    fn take(&mut self, len: usize) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(self.err_at(self.bytes.len(), ParseErrorKind::Truncated));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }
}
