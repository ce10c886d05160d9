//! CSV output with fixed formatting so repeated runs are byte-identical.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use expwell::BigReal;

use crate::CliError;

/// Significant digits of arbitrary-precision columns.
pub const DIGITS: usize = 20;

pub const OK: &str = "ok";
pub const FLAGGED: &str = "precision_flagged";
pub const FAILED: &str = "failed";

pub fn status(flagged: bool) -> &'static str {
    if flagged {
        FLAGGED
    } else {
        OK
    }
}

pub fn big(v: &BigReal) -> String {
    v.to_decimal(DIGITS)
}

/// Round-trip-safe f64 rendering.
pub fn float(v: f64) -> String {
    format!("{v:e}")
}

pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    pub fn create(path: Option<&Path>, header: &[&str]) -> Result<Self, CliError> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        };
        let mut writer = csv::WriterBuilder::new()
            .delimiter(b',')
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink);
        writer.write_record(header)?;
        Ok(CsvOut { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush()?;
        Ok(())
    }
}
