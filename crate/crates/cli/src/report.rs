use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Fail = 1,
    Input = 2,
    Obstructed = 3,
}

/// A plain-text report followed by a `---csv---` block. Everything that
/// feeds the computation (arguments, seed, file contents) goes through the
/// digest.
pub struct Report {
    command: String,
    hasher: Sha256,
    body: String,
    csv_header: Vec<String>,
    csv_rows: Vec<Vec<String>>,
    exit: Exit,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn new(args: &[String], seed: u64) -> Self {
        let mut hasher = Sha256::new();
        for a in args {
            hasher.update(a.as_bytes());
            hasher.update([0]);
        }
        hasher.update(format!("seed={seed}").as_bytes());
        Report {
            command: format!("smove {}", args.join(" ")),
            hasher,
            body: String::new(),
            csv_header: Vec::new(),
            csv_rows: Vec::new(),
            exit: Exit::Ok,
        }
    }

    /// Reads an input file and folds its contents into the digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default().as_bytes());
        self.hasher.update([0]);
        self.hasher.update(text.as_bytes());
        self.hasher.update([0]);
        Ok(text)
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    /// Appends multi-line text, adding a final newline if missing.
    pub fn block(&mut self, s: &str) {
        self.body.push_str(s);
        if !s.ends_with('\n') {
            self.body.push('\n');
        }
    }

    pub fn columns(&mut self, names: &[&str]) {
        self.csv_header = names.iter().map(|s| s.to_string()).collect();
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.csv_rows.push(fields.into_iter().map(|f| f.to_string()).collect());
    }

    /// Keeps the most severe exit code seen so far.
    pub fn exit_at_least(&mut self, e: Exit) {
        self.exit = self.exit.max(e);
    }

    pub fn exit(&self) -> Exit {
        self.exit
    }

    pub fn render(&self) -> String {
        let digest = hex::encode(self.hasher.clone().finalize());
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "inputs: sha256:{digest}");
        out.push_str(&self.body);
        let _ = writeln!(out, "exit: {}", self.exit as i32);
        out.push_str("---csv---\n");
        if !self.csv_header.is_empty() {
            let _ = writeln!(out, "{}", self.csv_header.join(","));
        }
        for r in &self.csv_rows {
            let _ = writeln!(out, "{}", r.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
        }
        out
    }
}
