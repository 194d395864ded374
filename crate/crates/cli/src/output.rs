use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Jsonl,
    Csv,
}

/// Rows of one command, kept both as text cells and as JSON records.
pub struct Report {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    records: Vec<String>,
    /// Lines after the table, e.g. a summary.
    footer: Vec<String>,
}

impl Report {
    pub fn new(headers: &[&'static str]) -> Self {
        Report {
            headers: headers.to_vec(),
            rows: Vec::new(),
            records: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push<T: Serialize>(&mut self, cells: Vec<String>, record: &T) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
        self.records.push(serde_json::to_string(record).expect("records serialize"));
    }

    /// A row with no JSON record of its own.
    pub fn push_cells(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    /// A JSON record with no table row of its own.
    pub fn push_record<T: Serialize>(&mut self, record: &T) {
        self.records.push(serde_json::to_string(record).expect("records serialize"));
    }

    pub fn footer(&mut self, line: String) {
        self.footer.push(line);
    }

    pub fn render(&self, format: Format, command: &str, timestamp: bool) -> String {
        let mut out = String::new();
        let now = || SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        match format {
            Format::Table => {
                if timestamp {
                    out.push_str(&format!("# edseq {} at unix time {}\n", command, now()));
                }
                out.push_str(&self.table());
                for line in &self.footer {
                    out.push_str(line);
                    out.push('\n');
                }
            }
            Format::Jsonl => {
                if timestamp {
                    let header = serde_json::json!({ "command": command, "generated_unix": now() });
                    out.push_str(&header.to_string());
                    out.push('\n');
                }
                for r in &self.records {
                    out.push_str(r);
                    out.push('\n');
                }
            }
            Format::Csv => {
                if timestamp {
                    out.push_str(&format!("# edseq {} at unix time {}\n", command, now()));
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
            }
        }
        out
    }

    fn table(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{}{}", c, " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let headers: Vec<String> = self.headers.iter().map(|h| h.to_string()).collect();
        let mut out = line(&headers);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(&["index", "term"]);
        r.push(vec!["1".into(), "(2)^2".into()], &serde_json::json!({"index": "1"}));
        r.push(vec!["10".into(), "(19)^2, x".into()], &serde_json::json!({"index": "10"}));
        r
    }

    #[test]
    fn table_columns_align() {
        let t = sample().render(Format::Table, "sequence", false);
        assert_eq!(t, "index  term\n1      (2)^2\n10     (19)^2, x\n");
    }

    #[test]
    fn csv_quotes_cells() {
        let t = sample().render(Format::Csv, "sequence", false);
        assert_eq!(t, "index,term\n1,(2)^2\n10,\"(19)^2, x\"\n");
    }

    #[test]
    fn timestamp_is_optional() {
        assert!(sample().render(Format::Jsonl, "sequence", true).starts_with("{\"command\""));
        assert_eq!(sample().render(Format::Jsonl, "sequence", false).lines().count(), 2);
    }
}
