//! Report sinks: JSON lines, CSV with `#` metadata, plain text.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde_json::{json, Value};

use crate::{Cli, CliResult, Format};

/// Standard output, or the `--out` file when one is given.
pub fn sink(cli: &Cli) -> CliResult<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Tool version, resolved config, tolerances and limits.
pub fn header(cli: &Cli) -> Value {
    json!({
        "record": "header",
        "tool": "fermient",
        "version": fermient::VERSION,
        "command": cli.command.name(),
        "config": cli,
        "tolerances": cli.tolerances(),
        "limits": cli.limits(),
    })
}

/// The header as `#` comment lines (without the leading `# `).
pub fn header_comments(cli: &Cli) -> Vec<String> {
    let h = header(cli);
    vec![
        format!("fermient {}", fermient::VERSION),
        format!("command {}", cli.command.name()),
        format!("config {}", h["config"]),
        format!("tolerances {}", h["tolerances"]),
        format!("limits {}", h["limits"]),
    ]
}

pub fn write_header(w: &mut dyn Write, cli: &Cli, format: Format) -> CliResult<()> {
    match format {
        Format::Json => writeln!(w, "{}", header(cli))?,
        Format::Csv | Format::Text => {
            for c in header_comments(cli) {
                writeln!(w, "# {c}")?;
            }
        }
    }
    Ok(())
}

/// 17 significant digits, `nan`/`inf` spelled out.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Int(usize),
    Real(f64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => real(*v),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(_) | Cell::Empty => Value::Null,
        }
    }
}

/// A table with one documented column per quantity.
pub struct Table {
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn write(&self, w: &mut dyn Write, format: Format) -> CliResult<()> {
        match format {
            Format::Csv | Format::Text => {
                for (name, doc) in &self.columns {
                    writeln!(w, "# column {name}: {doc}")?;
                }
                let sep = if format == Format::Csv { "," } else { " " };
                let names: Vec<&str> = self.columns.iter().map(|c| c.0).collect();
                writeln!(w, "{}", names.join(sep))?;
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match (format, c) {
                            (Format::Text, Cell::Empty) => "-".to_string(),
                            _ => c.csv(),
                        })
                        .collect();
                    writeln!(w, "{}", cells.join(sep))?;
                }
            }
            Format::Json => {
                for row in &self.rows {
                    let mut obj = serde_json::Map::new();
                    obj.insert("record".into(), json!("row"));
                    for ((name, _), cell) in self.columns.iter().zip(row) {
                        obj.insert((*name).into(), cell.json());
                    }
                    writeln!(w, "{}", Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}
