//! CSV and JSON writers. Reals are written with 17 significant digits so
//! files round-trip exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chua_relay::State;
use serde::Serialize;

pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn region(x: &State) -> &'static str {
    match x.half_space().map(|q| q.value()) {
        Some(1) => "H+",
        Some(_) => "H-",
        None => "H0",
    }
}

/// A file, or stdout when no path is given.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_samples(out: &mut dyn Write, samples: &[(f64, State)], extra: Option<(&str, f64)>) -> io::Result<()> {
    match extra {
        Some((name, _)) => writeln!(out, "t,x1,x2,x3,region,{name}")?,
        None => writeln!(out, "t,x1,x2,x3,region")?,
    }
    for (t, x) in samples {
        write!(out, "{},{},{},{},{}", real(*t), real(x.x1), real(x.x2), real(x.x3), region(x))?;
        if let Some((_, scale)) = extra {
            write!(out, ",{}", real(x.x3 / scale))?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()
}

/// `run.csv` → `run.events.json`.
pub fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("events.json")
}
