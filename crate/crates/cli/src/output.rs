use crate::args::Format;
use affsurf::report::BoundReport;
use affsurf::util::sig6;
use serde::Serialize;
use serde_json::Value;

/// Everything a command emits: a text rendering, plot-ready CSV, full-precision JSON and
/// whether every checked bound held.
pub struct Outcome {
    pub text: String,
    pub csv: String,
    pub json: Value,
    pub pass: bool,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        let mut out = match format {
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("JSON value serializes"),
        };
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report serializes")
}

/// JSON number, or a string for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(sig6(x))
    }
}

pub fn vector(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| sig6(*x)).collect();
    format!("[{}]", parts.join(" "))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row<S: AsRef<str>>(cells: &[S]) -> String {
    let cells: Vec<String> = cells.iter().map(|c| csv_field(c.as_ref())).collect();
    cells.join(",") + "\n"
}

/// Ordered `key: value` pairs, rendered as aligned text or a one-row CSV table.
#[derive(Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(mut self, key: &str, value: impl Into<String>) -> Self {
        self.fields.push((key.to_string(), value.into()));
        self
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        self.text(key, sig6(value))
    }

    pub fn to_text(&self) -> String {
        let width = self.fields.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        self.fields
            .iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let keys: Vec<&str> = self.fields.iter().map(|(k, _)| k.as_str()).collect();
        let values: Vec<&str> = self.fields.iter().map(|(_, v)| v.as_str()).collect();
        csv_row(&keys) + &csv_row(&values)
    }
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_row(&self.headers);
        for row in &self.rows {
            out.push_str(&csv_row(row));
        }
        out
    }
}

pub fn bound_table(reports: &[BoundReport]) -> Table {
    let mut t = Table::new(&["quantity", "lower", "value", "upper", "pass", "basis"]);
    for r in reports {
        t.push(vec![
            r.quantity.clone(),
            sig6(r.lower),
            sig6(r.value),
            sig6(r.upper),
            pass_word(r.pass).into(),
            r.basis.clone(),
        ]);
    }
    t
}

pub fn pass_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
