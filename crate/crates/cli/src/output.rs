use std::io::Write;

use crate::config::Format;
use crate::CliError;

/// One output cell. Echoed inputs print in shortest round-trip form so rows
/// re-parse to the emitting configuration; computed numbers honour `--digits`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Input(f64),
    Int(u64),
    Num(f64),
    /// Published precision: `decimals` places, in scientific form when `sci`.
    Published { value: f64, decimals: usize, sci: bool },
    Text(String),
    Bool(bool),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// `v` with `digits` significant digits, fixed-point for moderate magnitudes.
pub fn significant(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.*e}", digits - 1)
    }
}

/// `None` keeps published precision for `Published` cells.
fn render(cell: &Cell, digits: Option<usize>) -> (String, bool) {
    let d = digits.unwrap_or(crate::DEFAULT_DIGITS);
    match cell {
        Cell::Input(v) => (v.to_string(), true),
        Cell::Int(v) => (v.to_string(), true),
        Cell::Num(v) => (significant(*v, d), v.is_finite()),
        Cell::Published { value, decimals, sci } => match digits {
            Some(d) => (significant(*value, d), true),
            None if *sci => (format!("{value:.decimals$e}"), true),
            None => (format!("{value:.decimals$}"), true),
        },
        Cell::Text(s) => (s.clone(), false),
        Cell::Bool(b) => (b.to_string(), true),
        Cell::Empty => (String::new(), false),
    }
}

pub fn write_table(table: &Table, format: Format, digits: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| render(c, digits).0))?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for row in &table.rows {
                let fields: Vec<String> = table
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| {
                        let (s, numeric) = render(c, digits);
                        let value = match c {
                            Cell::Empty => "null".to_string(),
                            _ if numeric => s,
                            Cell::Num(_) => "null".to_string(),
                            _ => serde_json::to_string(&s).expect("strings serialise"),
                        };
                        format!("{}:{value}", serde_json::to_string(k).expect("strings serialise"))
                    })
                    .collect();
                writeln!(out, "{{{}}}", fields.join(","))?;
            }
        }
    }
    Ok(())
}
