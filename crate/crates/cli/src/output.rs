//! Artifact writing confined to one output directory.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Component, Path, PathBuf};

use serde_json::Value;

/// Formats a float so that it parses back to the same value.
///
/// Plain notation in the usual range, scientific notation for tiny or huge
/// magnitudes to keep rows short.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// The only place artifacts are written to.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// File names written so far, in order.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Resolves a bare file name inside the directory; anything with a
    /// separator, `..` or a root is refused.
    pub fn path_for(&self, name: &str) -> io::Result<PathBuf> {
        let mut parts = Path::new(name).components();
        match (parts.next(), parts.next()) {
            (Some(Component::Normal(_)), None) => Ok(self.root.join(name)),
            _ => Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("refusing to write `{name}` outside the output directory"),
            )),
        }
    }

    fn create_file(&mut self, name: &str) -> io::Result<BufWriter<fs::File>> {
        let path = self.path_for(name)?;
        let file = fs::File::create(&path)?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(BufWriter::new(file))
    }

    /// Comma-separated, one header row, LF line endings.
    pub fn write_csv<'a>(
        &mut self,
        name: &str,
        header: &[String],
        rows: impl IntoIterator<Item = &'a [f64]>,
    ) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(self.create_file(name)?);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|x| format_f64(*x)))?;
        }
        w.flush()
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> io::Result<()> {
        let mut w = self.create_file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> io::Result<()> {
        let mut w = self.create_file(name)?;
        w.write_all(text.as_bytes())?;
        w.flush()
    }
}

/// A parsed numeric CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Reads a CSV with a header row and numeric cells.
pub fn read_csv(path: &Path) -> io::Result<Table> {
    let file = fs::File::open(path)?;
    parse_csv(file).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))
}

pub fn parse_csv(input: impl io::Read) -> Result<Table, String> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    if header.is_empty() {
        return Err("empty CSV".into());
    }
    let mut rows = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let row = record
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| format!("row {}: `{c}` is not a number", k + 2)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}
