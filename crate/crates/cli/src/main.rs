use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use loci_core::cotra::cotra_fill;
use loci_core::raster::{
    encode_pbm, ensure_frame, load_binary_image, save_locating_matrix, BinaryImage, Canvas, Cell,
    LocatingMatrix, MatrixFormat, Point, DEFAULT_THRESHOLD,
};
use loci_core::scanfill::fua_fill;
use loci_core::sweep::{scaling_sweep, SweepRow};
use loci_core::{gen_test_picture, Execution, LociError, PictureKind};

const PROMPT: &str = "Try CoTRA? Yes = 1; No = any key";

#[derive(Parser)]
#[command(
    name = "loci",
    version,
    about = "Interior/exterior partition of digital pictures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fill a picture and write its locating matrices.
    Fill(FillArgs),
    /// Print the class of one pixel.
    Locate(LocateArgs),
    /// Time both fills over square generated pictures; CSV on stdout.
    Bench(BenchArgs),
    /// Write a generated test picture as plain PBM.
    Gen(GenArgs),
}

#[derive(Args)]
struct FillArgs {
    input: PathBuf,
    /// Also run the Lego-curve fill.
    #[arg(long)]
    cotra: bool,
    /// Ask before running the Lego-curve fill.
    #[arg(long)]
    interactive: bool,
    /// Graymap samples below this value are black.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
    /// Output prefix; defaults to the input path without its extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "pgm")]
    format: Vec<MatrixFormat>,
}

#[derive(Args)]
struct LocateArgs {
    input: PathBuf,
    /// Row, 1-based, in the framed canvas.
    y: usize,
    /// Column, 1-based, in the framed canvas.
    x: usize,
    #[arg(long)]
    cotra: bool,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
}

#[derive(Args)]
struct BenchArgs {
    /// Side lengths, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    sizes: Vec<usize>,
    #[arg(long, default_value = "random")]
    kind: PictureKind,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    kind: PictureKind,
    rows: usize,
    cols: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Destination file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors that map to exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

struct RunReport {
    input_path: PathBuf,
    fua_seconds: f64,
    cotra_seconds: Option<f64>,
    canvas: Canvas,
    interior_count: usize,
    warnings: Vec<String>,
}

impl RunReport {
    fn print(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "input: {}", self.input_path.display())?;
        writeln!(
            out,
            "canvas: {} x {}",
            self.canvas.rows(),
            self.canvas.cols()
        )?;
        writeln!(out, "fua_seconds: {:.6}", self.fua_seconds)?;
        if let Some(s) = self.cotra_seconds {
            writeln!(out, "cotra_seconds: {s:.6}")?;
        }
        writeln!(out, "interior: {}", self.interior_count)?;
        writeln!(out, "warnings: {}", self.warnings.len())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Fill(a) => run_fill(a),
        Command::Locate(a) => run_locate(a),
        Command::Bench(a) => run_bench(a),
        Command::Gen(a) => run_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<Usage>().is_some()
                || matches!(e.downcast_ref::<LociError>(), Some(LociError::Parse(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn load(path: &Path, threshold: u8) -> anyhow::Result<BinaryImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ensure_frame(&load_binary_image(&bytes, threshold)?))
}

/// Scanline fill; pictures it cannot fill come back as picture-only
/// matrices plus a warning.
fn fua_or_warn(img: &BinaryImage, warnings: &mut Vec<String>) -> LocatingMatrix {
    match fua_fill(img) {
        Ok(m) => m,
        Err(e) => {
            warnings.push(format!("fua: {e}"));
            picture_only(img)
        }
    }
}

fn picture_only(img: &BinaryImage) -> LocatingMatrix {
    let mut m = LocatingMatrix::new(img.canvas());
    for p in img.black_pixels() {
        m.set(p, Cell::Picture);
    }
    m
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn ask_cotra() -> anyhow::Result<bool> {
    let mut stdout = io::stdout();
    writeln!(stdout, "{PROMPT}")?;
    stdout.flush()?;
    let mut line = String::new();
    io::stdin().lock().read_line(&mut line)?;
    Ok(line.trim() == "1")
}

fn run_fill(a: FillArgs) -> anyhow::Result<()> {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let img = ensure_frame(&load_binary_image(&bytes, a.threshold)?);
    let mut warnings = Vec::new();

    let t = Instant::now();
    let fua = fua_or_warn(&img, &mut warnings);
    let fua_seconds = t.elapsed().as_secs_f64();

    let want_cotra = a.cotra || (a.interactive && ask_cotra()?);
    let mut cotra = None;
    let mut cotra_seconds = None;
    if want_cotra {
        let t = Instant::now();
        let out = cotra_fill(&img)?;
        cotra_seconds = Some(t.elapsed().as_secs_f64());
        warnings.extend(out.warnings.iter().map(|w| format!("cotra: {w}")));
        cotra = Some(out.matrix);
    }

    let prefix = a.out.unwrap_or_else(|| a.input.with_extension(""));
    let mut formats = a.format;
    formats.dedup();
    let mut emitted = vec![("fua", &fua)];
    if let Some(m) = &cotra {
        emitted.push(("cotra", m));
    }
    for (tag, m) in &emitted {
        for &f in &formats {
            let mut name = prefix.clone().into_os_string();
            name.push(format!(".{tag}.{}", f.extension()));
            write_atomic(Path::new(&name), &save_locating_matrix(m, f))?;
        }
    }

    let shown = cotra.as_ref().unwrap_or(&fua);
    let report = RunReport {
        input_path: a.input,
        fua_seconds,
        cotra_seconds,
        canvas: img.canvas(),
        interior_count: shown.count(Cell::Interior),
        warnings,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    report.print(&mut io::stdout().lock())?;
    Ok(())
}

fn run_locate(a: LocateArgs) -> anyhow::Result<()> {
    let img = load(&a.input, a.threshold)?;
    let p = Point::new(a.y, a.x);
    if !img.canvas().contains(p) {
        return Err(Usage(format!(
            "({}, {}) is outside the {} x {} framed canvas",
            a.y,
            a.x,
            img.rows(),
            img.cols()
        ))
        .into());
    }
    let m = if a.cotra {
        let out = cotra_fill(&img)?;
        for w in &out.warnings {
            eprintln!("warning: cotra: {w}");
        }
        out.matrix
    } else {
        let mut warnings = Vec::new();
        let m = fua_or_warn(&img, &mut warnings);
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        m
    };
    println!("{}", m.get(p));
    Ok(())
}

fn run_bench(a: BenchArgs) -> anyhow::Result<()> {
    if a.sizes.is_empty() || a.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Usage("--sizes must be non-empty and strictly increasing".into()).into());
    }
    if let Some(&n) = a.sizes.iter().find(|&&n| n < 8) {
        return Err(Usage(format!("size {n} is below the minimum of 8")).into());
    }
    let rows = scaling_sweep(&a.sizes, a.kind, a.reps, a.seed, Execution::default())?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", SweepRow::CSV_HEADER)?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

fn run_gen(a: GenArgs) -> anyhow::Result<()> {
    if a.rows < 8 || a.cols < 8 {
        bail!(Usage("rows and cols must be at least 8".into()));
    }
    let img = gen_test_picture(a.seed, a.rows, a.cols, a.kind)?;
    let bytes = encode_pbm(&img);
    match a.out {
        Some(path) => write_atomic(&path, &bytes),
        None => Ok(io::stdout().lock().write_all(&bytes)?),
    }
}
