//! Minimal CSV writer: fixed header, comma separated, LF line endings.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};

pub struct Csv {
    out: Box<dyn Write>,
    columns: usize,
}

impl Csv {
    pub fn create(path: Option<&Path>, header: &[&str]) -> Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let mut csv = Self {
            out,
            columns: header.len(),
        };
        csv.row(header.iter().map(|s| s.to_string()))?;
        Ok(csv)
    }

    pub fn row<I>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator,
        I::Item: ToString,
    {
        let fields: Vec<String> = fields.into_iter().map(|f| f.to_string()).collect();
        debug_assert_eq!(fields.len(), self.columns);
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
