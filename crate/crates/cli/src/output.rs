//! CSV and JSON artifacts. Every CSV starts with one `#`-prefixed JSON line holding the
//! command, its options and the resolved configuration.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliResult;

pub struct Output {
    dir: PathBuf,
    header: Value,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, command: &str, args: Value, config: &RunConfig) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            header: json!({
                "tool": concat!("oulink ", env!("CARGO_PKG_VERSION")),
                "command": command,
                "args": args,
                "config": config,
            }),
            written: Vec::new(),
        })
    }

    /// Writes `rows` under `columns`; `extra` is merged into the header line.
    pub fn csv<I, R>(&mut self, name: &str, columns: &[&str], extra: Option<Value>, rows: I) -> CliResult<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        let mut header = self.header.clone();
        if let Some(Value::Object(map)) = extra {
            header.as_object_mut().expect("header is an object").extend(map);
        }
        writeln!(w, "# {header}")?;
        writeln!(w, "{}", columns.join(","))?;
        for row in rows {
            let mut first = true;
            for v in row.as_ref() {
                if !first {
                    w.write_all(b",")?;
                }
                write!(w, "{v}")?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        w.flush()?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// Writes `body` as pretty JSON next to the header fields.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        let mut doc = self.header.clone();
        doc.as_object_mut()
            .expect("header is an object")
            .insert("result".into(), serde_json::to_value(body).expect("result serializes"));
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON serializes");
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn finish(self) {
        for p in &self.written {
            println!("wrote {}", p.display());
        }
    }
}
