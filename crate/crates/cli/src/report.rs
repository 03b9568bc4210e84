//! Named tables rendered as JSON or CSV with identical numeric content.
//!
//! Floats are printed with 17 significant digits so they round-trip;
//! non-finite values become the strings `inf`, `-inf` and `nan`.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(x) if x.is_finite() => format_float(*x),
            Cell::Num(x) => quote(&format_float(*x)),
            Cell::Text(s) => quote(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => "null".into(),
        }
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Table { name: name.to_string(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub tables: Vec<Table>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
        }
    }

    /// `{"table": [{"column": value, …}, …], …}` in table order.
    fn json(&self) -> String {
        let mut out = String::from("{\n");
        for (t, table) in self.tables.iter().enumerate() {
            let _ = write!(out, "  {}: [", quote(&table.name));
            for (r, row) in table.rows.iter().enumerate() {
                out.push_str(if r == 0 { "\n    {" } else { ",\n    {" });
                for (k, (col, cell)) in table.columns.iter().zip(row).enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{}: {}", quote(col), cell.json());
                }
                out.push('}');
            }
            out.push_str(if table.rows.is_empty() { "]" } else { "\n  ]" });
            out.push_str(if t + 1 < self.tables.len() { ",\n" } else { "\n" });
        }
        out.push_str("}\n");
        out
    }

    /// One block per table, each with a `table` column first; blocks are
    /// separated by a blank line.
    fn csv(&self) -> String {
        let blocks: Vec<String> = self
            .tables
            .iter()
            .map(|table| {
                let mut w = csv::Writer::from_writer(Vec::new());
                let header = std::iter::once("table").chain(table.columns.iter().copied());
                w.write_record(header).expect("in-memory write");
                for row in &table.rows {
                    let cells = std::iter::once(table.name.clone()).chain(row.iter().map(Cell::csv));
                    w.write_record(cells).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
            })
            .collect();
        blocks.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new("rank", &["node", "score", "note"]);
        t.push(vec![1usize.into(), 0.1.into(), "a,b".into()]);
        t.push(vec![2usize.into(), f64::INFINITY.into(), Cell::Null]);
        Report { tables: vec![t, Table::new("empty", &["x"])] }
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn json_is_valid() {
        let v: serde_json::Value = serde_json::from_str(&sample().render(Format::Json)).unwrap();
        assert_eq!(v["rank"][0]["score"].as_f64(), Some(0.1));
        assert_eq!(v["rank"][1]["score"], "inf");
        assert!(v["rank"][1]["note"].is_null());
        assert_eq!(v["empty"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn csv_blocks() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "table,node,score,note");
        assert_eq!(lines[1], "rank,1,1.0000000000000001e-1,\"a,b\"");
        assert_eq!(lines[2], "rank,2,inf,");
        assert_eq!(lines[3], "");
        assert_eq!(lines[4], "table,x");
    }
}
