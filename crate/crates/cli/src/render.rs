//! Output plumbing: a sink that writes to standard output or a file, and a
//! small delimited-text table with a JSON escape hatch.

use clap::ValueEnum;
use std::io::Write;
use streakbias::error::Error;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub enum Sink {
    Stdout(std::io::BufWriter<std::io::Stdout>),
    File(std::io::BufWriter<std::fs::File>),
}

impl Sink {
    pub fn open(output: &super::OutputArgs) -> Result<Self, Error> {
        match &output.out {
            None => Ok(Sink::Stdout(std::io::BufWriter::new(std::io::stdout()))),
            Some(path) => {
                let file = std::fs::File::create(path)
                    .map_err(|e| Error::Data(format!("cannot create {}: {e}", path.display())))?;
                Ok(Sink::File(std::io::BufWriter::new(file)))
            }
        }
    }

    fn writer(&mut self) -> &mut dyn Write {
        match self {
            Sink::Stdout(w) => w,
            Sink::File(w) => w,
        }
    }

    pub fn line(&mut self, text: &str) -> Result<(), Error> {
        writeln!(self.writer(), "{text}").map_err(|e| Error::Data(format!("write failed: {e}")))
    }

    pub fn json(&mut self, value: &serde_json::Value) -> Result<(), Error> {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| Error::Data(format!("serialization failed: {e}")))?;
        self.line(&text)
    }

    pub fn finish(mut self) -> Result<(), Error> {
        self.writer()
            .flush()
            .map_err(|e| Error::Data(format!("write failed: {e}")))
    }
}

/// A header plus rows of equal width, emitted as comma-delimited text or as
/// a JSON array via a row-to-value mapping.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields.to_vec());
    }

    pub fn emit(
        self,
        output: &super::OutputArgs,
        to_json: impl Fn(&[String]) -> serde_json::Value,
    ) -> Result<(), Error> {
        let mut sink = Sink::open(output)?;
        match output.format {
            Format::Text => {
                sink.line(&self.header.join(","))?;
                for row in &self.rows {
                    sink.line(&row.join(","))?;
                }
            }
            Format::Json => {
                let items: Vec<serde_json::Value> = self.rows.iter().map(|r| to_json(r)).collect();
                sink.json(&serde_json::Value::Array(items))?;
            }
        }
        sink.finish()
    }
}
