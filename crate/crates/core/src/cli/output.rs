use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

/// Significant digits of every float written to a table.
pub const SIG_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Shortest `%g`-style rendering with nine significant digits.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_g).unwrap_or_default()
}

/// A header plus string rows.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// Output directory, created on first write.
pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Self {
        Self { dir, format, written: Vec::new() }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    fn path(&mut self, name: &str) -> std::io::Result<Option<PathBuf>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        fs::create_dir_all(dir)?;
        Ok(Some(dir.join(name)))
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        if let Some(p) = self.path(name)? {
            fs::write(&p, bytes)?;
            self.written.push(p);
        }
        Ok(())
    }

    /// Write `stem.csv` from the table or `stem.json` from the value.
    pub fn emit<T: Serialize>(&mut self, stem: &str, table: &Table, value: &T) -> std::io::Result<()> {
        match self.format {
            Format::Csv => {
                let bytes = table.to_csv()?;
                self.write_bytes(&format!("{stem}.csv"), &bytes)
            }
            Format::Json => {
                let mut bytes = serde_json::to_vec_pretty(value).map_err(std::io::Error::other)?;
                bytes.push(b'\n');
                self.write_bytes(&format!("{stem}.json"), &bytes)
            }
        }
    }

    /// Write raw text regardless of the format.
    pub fn emit_raw(&mut self, name: &str, text: &str) -> std::io::Result<()> {
        self.write_bytes(name, text.as_bytes())
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-0.0385208965), "-0.0385208965");
        assert_eq!(fmt_g(1.056672345678), "1.05667235");
        assert_eq!(fmt_g(123456789.0), "123456789");
        assert_eq!(fmt_g(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_g(1.5e-7), "1.5e-07");
        assert_eq!(fmt_g(0.00012345), "0.00012345");
        assert_eq!(fmt_g(f64::NAN), "nan");
        assert_eq!(fmt_g(9.999999999), "10");
    }

    #[test]
    fn csv_table() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
