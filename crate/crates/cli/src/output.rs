use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Where results go: stdout/stderr by default, or files in a directory.
pub struct Output {
    dir: Option<PathBuf>,
    written: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub l0: f64,
    pub convention: &'static str,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: Value,
    pub units: Units,
    pub version: &'static str,
    pub outputs: Vec<String>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Output { dir, written: Vec::new() })
    }

    fn path(&mut self, file: &str) -> Option<PathBuf> {
        let p = self.dir.as_ref()?.join(file);
        self.written.push(p.display().to_string());
        Some(p)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let sink: Box<dyn Write> = match self.path(&format!("{name}.csv")) {
            Some(p) => Box::new(std::fs::File::create(p)?),
            None => Box::new(std::io::stdout().lock()),
        };
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn json_to(&mut self, name: &str, value: &impl Serialize, stdout: bool) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        match self.path(&format!("{name}.json")) {
            Some(p) => std::fs::write(p, text)?,
            None if stdout => std::io::stdout().lock().write_all(text.as_bytes())?,
            None => std::io::stderr().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    /// Main result of a scalar-valued subcommand.
    pub fn json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        self.json_to(name, value, true)
    }

    /// Metadata next to a CSV result.
    pub fn sidecar(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        self.json_to(name, value, false)
    }

    pub fn finish(mut self, subcommand: &str, parameters: Value, units: Units) -> CliResult<()> {
        let manifest_path = self.dir.as_ref().map(|d| d.join("manifest.json").display().to_string());
        let mut outputs = self.written.clone();
        outputs.extend(manifest_path);
        let m = RunManifest {
            subcommand: subcommand.to_string(),
            parameters,
            units,
            version: env!("CARGO_PKG_VERSION"),
            outputs,
        };
        self.sidecar("manifest", &m)
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
