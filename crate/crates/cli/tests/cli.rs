use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use loci_core::oracle::oracle_interior;
use loci_core::raster::{encode_pbm, BinaryImage, Point};

const RING: &str = ".....
                    .###.
                    .#.#.
                    .###.
                    .....";

const PINCH: &str = "........
                     ..#.#...
                     ..#.#...
                     ..##.#..
                     ..#..#..
                     ..####..
                     ........";

fn loci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loci"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(dir: &Path, name: &str, art: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, encode_pbm(&BinaryImage::from_ascii(art).unwrap())).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_cells(path: &Path) -> Vec<Vec<u8>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn interior_of(cells: &[Vec<u8>]) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    for (y, row) in cells.iter().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            if c == 2 {
                out.insert(Point::new(y + 1, x + 1));
            }
        }
    }
    out
}

#[test]
fn ring_csv_has_one_interior_cell() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "ring.pbm", RING);
    let prefix = dir.path().join("out");
    let o = loci(&["fill", s(&input), "--format", "csv", "--out", s(&prefix)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cells = csv_cells(&dir.path().join("out.fua.csv"));
    assert_eq!(interior_of(&cells), BTreeSet::from([Point::new(3, 3)]));
    assert!(!dir.path().join("out.cotra.csv").exists());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("interior: 1"), "{stdout}");
}

#[test]
fn pinch_cotra_matches_oracle_where_scanline_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "pinch.pbm", PINCH);
    let prefix = dir.path().join("p");
    let o = loci(&[
        "fill",
        s(&input),
        "--cotra",
        "--format",
        "csv",
        "--out",
        s(&prefix),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fua = interior_of(&csv_cells(&dir.path().join("p.fua.csv")));
    let cotra = interior_of(&csv_cells(&dir.path().join("p.cotra.csv")));
    let oracle = oracle_interior(&BinaryImage::from_ascii(PINCH).unwrap());
    assert_eq!(cotra, oracle);
    let disputed: BTreeSet<_> = fua.symmetric_difference(&oracle).copied().collect();
    let differ: BTreeSet<_> = fua.symmetric_difference(&cotra).copied().collect();
    assert_eq!(differ, disputed);
}

#[test]
fn interactive_prompt_and_both_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "ring.pbm", RING);
    let prefix = dir.path().join("i");
    let mut child = Command::new(env!("CARGO_BIN_EXE_loci"))
        .args([
            "fill",
            s(&input),
            "--interactive",
            "--format",
            "pgm,ppm",
            "--out",
            s(&prefix),
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"1\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(
        stdout.lines().next(),
        Some("Try CoTRA? Yes = 1; No = any key")
    );
    for name in ["i.fua.pgm", "i.fua.ppm", "i.cotra.pgm", "i.cotra.ppm"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn interactive_other_key_skips_cotra() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "ring.pbm", RING);
    let prefix = dir.path().join("n");
    let mut child = Command::new(env!("CARGO_BIN_EXE_loci"))
        .args(["fill", s(&input), "--interactive", "--out", s(&prefix)])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"q\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("n.fua.pgm").exists());
    assert!(!dir.path().join("n.cotra.pgm").exists());
}

#[test]
fn locate_ring_cells() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "ring.pbm", RING);
    for (y, x, cotra, want) in [
        ("3", "3", false, "INTERIOR"),
        ("3", "3", true, "INTERIOR"),
        ("1", "1", false, "EXTERIOR"),
        ("2", "2", false, "PICTURE"),
        ("4", "3", true, "PICTURE"),
    ] {
        let mut args = vec!["locate", s(&input), y, x];
        if cotra {
            args.push("--cotra");
        }
        let o = loci(&args);
        assert!(o.status.success());
        assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), want);
    }
}

#[test]
fn locate_out_of_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "ring.pbm", RING);
    assert_eq!(
        loci(&["locate", s(&input), "6", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        loci(&["locate", s(&input), "0", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pbm");
    fs::write(&bad, "P1\n3 3\n0 1\n").unwrap();
    let o = loci(&["fill", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("bad.fua.pgm").exists());
    fs::write(&bad, "P6\n1 1\n255\n\0\0\0").unwrap();
    assert_eq!(loci(&["fill", s(&bad)]).status.code(), Some(2));
    assert_eq!(loci(&["fill"]).status.code(), Some(2));
    assert_eq!(
        loci(&["fill", s(&bad), "--threshold", "300"]).status.code(),
        Some(2)
    );
    assert_eq!(
        loci(&["fill", s(&bad), "--format", "png"]).status.code(),
        Some(2)
    );
}

#[test]
fn degenerate_input_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "dot.pbm", ".....\n.....\n..#..\n.....\n.....");
    let o = loci(&["fill", s(&input), "--cotra", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stderr).unwrap().contains("warning:"));
    let cells = csv_cells(&dir.path().join("dot.cotra.csv"));
    assert!(interior_of(&cells).is_empty());
}

#[test]
fn unframed_input_is_framed() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "edge.pbm", "###\n#.#\n###");
    let o = loci(&["locate", s(&input), "3", "3"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "INTERIOR");
    assert_eq!(
        loci(&["locate", s(&input), "5", "5"]).status.code(),
        Some(0)
    );
}

#[test]
fn graymap_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.pgm");
    let mut body = String::from("P2\n5 5\n255\n");
    for y in 0..5 {
        for x in 0..5 {
            let ring = (1..=3).contains(&y) && (1..=3).contains(&x) && !(y == 2 && x == 2);
            body.push_str(if ring { "100 " } else { "200 " });
        }
        body.push('\n');
    }
    fs::write(&input, body).unwrap();
    let dark = loci(&["locate", s(&input), "3", "3", "--threshold", "150"]);
    assert_eq!(String::from_utf8(dark.stdout).unwrap().trim(), "INTERIOR");
    let light = loci(&["locate", s(&input), "3", "3", "--threshold", "50"]);
    assert_eq!(String::from_utf8(light.stdout).unwrap().trim(), "EXTERIOR");
}

#[test]
fn bench_emits_csv() {
    let o = loci(&[
        "bench",
        "--sizes",
        "16,32",
        "--kind",
        "degenerate",
        "--reps",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("kind,rows,cols,pixels"));
    for l in &lines[1..] {
        assert!(l.starts_with("degenerate,"));
        assert!(l.ends_with(",0"), "{l}");
    }
    assert_eq!(loci(&["bench", "--sizes", "32,32"]).status.code(), Some(2));
}

#[test]
fn gen_round_trips_through_fill() {
    let dir = tempfile::tempdir().unwrap();
    let pic = dir.path().join("r.pbm");
    let o = loci(&[
        "gen",
        "rectilinear",
        "20",
        "24",
        "--seed",
        "7",
        "--out",
        s(&pic),
    ]);
    assert!(o.status.success());
    let o = loci(&["fill", s(&pic), "--cotra", "--format", "csv"]);
    assert!(o.status.success());
    let fua = csv_cells(&dir.path().join("r.fua.csv"));
    let cotra = csv_cells(&dir.path().join("r.cotra.csv"));
    assert_eq!(interior_of(&fua), interior_of(&cotra));
    assert_eq!(fua.len(), 20);
    assert_eq!(fua[0].len(), 24);
}
