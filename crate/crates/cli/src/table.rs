//! Row-oriented output shared by the CSV and plain-text renderers.

use crate::CliError;

/// A header plus string cells, rendered as CSV or aligned text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).map_err(CliError::output)?;
        for row in &self.rows {
            w.write_record(row).map_err(CliError::output)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::output(e.to_string()))?;
        String::from_utf8(bytes).map_err(CliError::output)
    }

    /// Columns padded to their widest cell, numbers right-aligned.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|j| {
                self.rows
                    .iter()
                    .map(|r| r[j].chars().count())
                    .chain(std::iter::once(self.headers[j].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| {
                    if c.parse::<f64>().is_ok() {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

/// Full-precision number for CSV and JSON-adjacent output.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Short number for human tables.
pub fn short(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-3..1e6).contains(&a) {
        format!("{x:.6}")
    } else {
        format!("{x:.4e}")
    }
}

pub fn flag(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn maybe(b: Option<bool>) -> String {
    b.map(flag).unwrap_or_else(|| "n/a".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_cells_with_commas() {
        let mut t = Table::new(["dist", "v"]);
        t.push(vec!["gamma(k=2,lambda=1)".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "dist,v\n\"gamma(k=2,lambda=1)\",1\n");
    }

    #[test]
    fn text_aligns_columns() {
        let mut t = Table::new(["a", "value"]);
        t.push(vec!["xyz".into(), "1.5".into()]);
        let text = t.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a    value");
        assert_eq!(lines[2], "xyz    1.5");
    }
}
