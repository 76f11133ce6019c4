use std::io::{self, Write};

/// Whitespace-separated columns under a `#` header; missing values print as `NA`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CurveTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: &mut (impl Write + ?Sized), comments: &[String]) -> io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "# {}", self.columns.join(" "))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Some(x) => format!("{x:e}"),
                    None => "NA".to_string(),
                })
                .collect();
            writeln!(out, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}
