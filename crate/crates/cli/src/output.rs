use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// write here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<(), CliError> {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn csv(&self, table: &Table) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(self.sink()?);
        w.write_record(&table.headers)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV when asked for and available, JSON otherwise.
    pub fn emit<T: Serialize>(&self, value: &T, table: Option<Table>) -> Result<(), CliError> {
        match (self.format, table) {
            (Format::Csv, Some(t)) => self.csv(&t),
            (Format::Csv, None) => Err(CliError::Input("this command has no CSV form".into())),
            (Format::Json, _) => self.json(value),
        }
    }
}

/// `v` with 17 significant digits; empty for NaN.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Columns of equal length; `None` columns are left out.
    pub fn from_columns(cols: Vec<(&str, Option<&[f64]>)>) -> Table {
        let present: Vec<(&str, &[f64])> = cols
            .into_iter()
            .filter_map(|(n, c)| c.map(|c| (n, c)))
            .collect();
        let n = present.first().map_or(0, |c| c.1.len());
        Table {
            headers: present.iter().map(|c| c.0.to_string()).collect(),
            rows: (0..n)
                .map(|i| present.iter().map(|c| fmt_f64(c.1[i])).collect())
                .collect(),
        }
    }
}
