//! Plain-text field dumps and CSV writers.
//!
//! A dump starts with the header line `nx ny dx dy x0 y0 time`, followed by
//! one `i j rho rho_u rho_v e` row per interior cell, `i` running fastest.

use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{DiagnosticsRecord, ScatterPoint, CSV_HEADER, SCATTER_CSV_HEADER};
use crate::error::{Error, Result};
use crate::grid::{Boundary, ConservedState, Field, GridSpec};

pub fn write_dump(w: &mut impl Write, f: &Field, time: f64) -> Result<()> {
    let s = f.spec();
    writeln!(
        w,
        "{} {} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
        s.nx, s.ny, s.dx, s.dy, s.x0, s.y0, time
    )?;
    for (i, j, q) in f.interior() {
        writeln!(
            w,
            "{i} {j} {:.17e} {:.17e} {:.17e} {:.17e}",
            q.rho, q.rho_u, q.rho_v, q.e
        )?;
    }
    Ok(())
}

pub fn save_dump(path: &Path, f: &Field, time: f64) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_dump(&mut w, f, time)?;
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("dump line {line}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("malformed {what}")))
}

/// Reads a dump back into a field with the given boundary kinds (dumps do
/// not record them); returns the field and its time stamp.
pub fn read_dump(r: impl BufRead, bc_x: Boundary, bc_y: Boundary) -> Result<(Field, f64)> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty dump"))??;
    let mut t = header.split_whitespace();
    let nx: usize = parse_num(t.next(), 1, "nx")?;
    let ny: usize = parse_num(t.next(), 1, "ny")?;
    let dx: f64 = parse_num(t.next(), 1, "dx")?;
    let dy: f64 = parse_num(t.next(), 1, "dy")?;
    let x0: f64 = parse_num(t.next(), 1, "x0")?;
    let y0: f64 = parse_num(t.next(), 1, "y0")?;
    let time: f64 = parse_num(t.next(), 1, "time")?;
    let mut f = Field::new(GridSpec::new(nx, ny, dx, dy, x0, y0, bc_x, bc_y)?);
    let mut seen = vec![false; nx * ny];
    for (k, line) in lines.enumerate() {
        let ln = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut t = line.split_whitespace();
        let i: usize = parse_num(t.next(), ln, "i")?;
        let j: usize = parse_num(t.next(), ln, "j")?;
        if i >= nx || j >= ny {
            return Err(parse_err(ln, format!("cell ({i}, {j}) outside {nx}x{ny}")));
        }
        let q = ConservedState::new(
            parse_num(t.next(), ln, "rho")?,
            parse_num(t.next(), ln, "rho_u")?,
            parse_num(t.next(), ln, "rho_v")?,
            parse_num(t.next(), ln, "e")?,
        );
        seen[j * nx + i] = true;
        f.set(i as isize, j as isize, q);
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidArgument(format!(
            "dump lacks cell ({}, {})",
            k % nx,
            k / nx
        )));
    }
    f.fill_ghosts();
    Ok((f, time))
}

pub fn load_dump(path: &Path, bc_x: Boundary, bc_y: Boundary) -> Result<(Field, f64)> {
    read_dump(std::io::BufReader::new(fs::File::open(path)?), bc_x, bc_y)
}

pub fn write_diagnostics_csv(w: &mut impl Write, records: &[DiagnosticsRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_scatter_csv(w: &mut impl Write, pts: &[ScatterPoint]) -> Result<()> {
    writeln!(w, "{SCATTER_CSV_HEADER}")?;
    for p in pts {
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e}",
            p.r, p.rho, p.vrad, p.p
        )?;
    }
    Ok(())
}

/// Writes run outputs into a directory: `dump_NNNN.txt` files and an
/// incrementally appended `diagnostics.csv`.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    diagnostics: BufWriter<fs::File>,
    dumps: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut diagnostics = BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?);
        writeln!(diagnostics, "{CSV_HEADER}")?;
        Ok(Self {
            dir: dir.to_path_buf(),
            diagnostics,
            dumps: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Paths of the dumps written so far.
    pub fn dumps(&self) -> &[PathBuf] {
        &self.dumps
    }
}

impl crate::driver::RunObserver for OutputDir {
    fn diagnostics(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.diagnostics, "{}", rec.csv_row())?;
        self.diagnostics.flush()?;
        Ok(())
    }

    fn dump(&mut self, field: &Field, time: f64, index: usize) -> Result<()> {
        let path = self.dir.join(format!("dump_{index:04}.txt"));
        save_dump(&path, field, time)?;
        self.dumps.push(path);
        Ok(())
    }
}
