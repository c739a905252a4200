//! Columnar text format.
//!
//! ```text
//! # bilinop-grid N=8 L=12.0
//! 0,1,0
//! 1,0.5,-0.25
//! ...
//! ```
//!
//! Sampled functions list every sample index `n`; spectral files use the
//! `# bilinop-spec` header and list signed lattice indices `m`, possibly only
//! the stored subset.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledFunction, SpectralCoefficients};
use crate::C64;

const GRID_TAG: &str = "# bilinop-grid";
const SPEC_TAG: &str = "# bilinop-spec";

fn header(tag: &str, grid: &GridSpec) -> String {
    format!("{tag} N={} L={:?}\n", grid.n(), grid.scale())
}

fn write_rows<W: Write>(
    mut out: W,
    head: &str,
    rows: impl Iterator<Item = (i64, C64)>,
) -> Result<()> {
    out.write_all(head.as_bytes())?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for (i, c) in rows {
        w.write_record([i.to_string(), c.re.to_string(), c.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sampled<W: Write>(out: W, f: &SampledFunction) -> Result<()> {
    let rows = f.values().iter().enumerate().map(|(n, v)| (n as i64, *v));
    write_rows(out, &header(GRID_TAG, f.grid()), rows)
}

pub fn write_spectral<W: Write>(out: W, c: &SpectralCoefficients) -> Result<()> {
    write_rows(out, &header(SPEC_TAG, c.grid()), c.entries().into_iter())
}

fn parse_header(line: &str, tag: &str) -> Result<GridSpec> {
    let rest = line
        .trim_end()
        .strip_prefix(tag)
        .ok_or_else(|| Error::Format(format!("expected header `{tag}`, found `{}`", line.trim_end())))?;
    let mut n = None;
    let mut l = None;
    for field in rest.split_whitespace() {
        match field.split_once('=') {
            Some(("N", v)) => n = v.parse::<usize>().ok(),
            Some(("L", v)) => l = v.parse::<f64>().ok(),
            _ => return Err(Error::Format(format!("unexpected header field `{field}`"))),
        }
    }
    match (n, l) {
        (Some(n), Some(l)) => GridSpec::new(n, l),
        _ => Err(Error::Format("header must carry N=<int> and L=<float>".into())),
    }
}

fn read_rows<R: Read>(input: R, tag: &str) -> Result<(GridSpec, Vec<(i64, C64)>)> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    let grid = parse_header(&first, tag)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for record in rdr.deserialize::<(i64, f64, f64)>() {
        let (i, re, im) = record?;
        rows.push((i, C64::new(re, im)));
    }
    Ok((grid, rows))
}

pub fn read_sampled<R: Read>(input: R) -> Result<SampledFunction> {
    let (grid, rows) = read_rows(input, GRID_TAG)?;
    let mut values = vec![None; grid.n()];
    for (n, v) in rows {
        let slot = usize::try_from(n)
            .ok()
            .and_then(|n| values.get_mut(n))
            .ok_or_else(|| Error::Format(format!("sample index {n} outside 0..{}", grid.n())))?;
        *slot = Some(v);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(n, v)| v.ok_or_else(|| Error::Format(format!("missing sample {n}"))))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid, values)
}

pub fn read_spectral<R: Read>(input: R) -> Result<SpectralCoefficients> {
    let (grid, rows) = read_rows(input, SPEC_TAG)?;
    SpectralCoefficients::sparse(grid, rows)
}

pub fn save_sampled(path: impl AsRef<Path>, f: &SampledFunction) -> Result<()> {
    write_sampled(BufWriter::new(File::create(path)?), f)
}

pub fn load_sampled(path: impl AsRef<Path>) -> Result<SampledFunction> {
    read_sampled(File::open(path)?)
}

pub fn save_spectral(path: impl AsRef<Path>, c: &SpectralCoefficients) -> Result<()> {
    write_spectral(BufWriter::new(File::create(path)?), c)
}

pub fn load_spectral(path: impl AsRef<Path>) -> Result<SpectralCoefficients> {
    read_spectral(File::open(path)?)
}
