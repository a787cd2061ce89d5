//! CSV/JSON emission with a single metadata header line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

/// 12 significant digits, fixed-point when the magnitude allows.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Metadata line (the only place a timestamp appears), header, rows.
    pub fn render(&self, command: &str, config: &Value) -> String {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut out = format!("# kakeya-lab {command} generated_at={ts} config={config}\n");
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// Writes the CSV to `out` (summary beside it) or to stdout (summary on
/// stderr).
pub fn emit_csv(out: Option<&Path>, command: &str, config: &Value, csv: &Csv, summary: &Value) -> std::io::Result<()> {
    let body = csv.render(command, config);
    let summary = serde_json::to_string_pretty(summary).expect("serializable");
    match out {
        Some(p) => {
            fs::write(p, body)?;
            fs::write(summary_path(p), summary + "\n")
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            eprintln!("{summary}");
            Ok(())
        }
    }
}

pub fn emit_json(out: Option<&Path>, value: &Value) -> std::io::Result<()> {
    let s = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match out {
        Some(p) => fs::write(p, s),
        None => std::io::stdout().write_all(s.as_bytes()),
    }
}
