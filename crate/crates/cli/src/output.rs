//! Flat records written as CSV with `#` metadata lines, or as JSON lines.

use std::io::{self, Write};

use serde_json::{Map, Value as Json};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Null,
}

/// Floats use 17 significant digits so that values round-trip exactly.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Num(v) => fmt_num(*v),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) if s.contains([',', '"', '\n', '\r']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Num(v) => Json::from(*v),
            Value::Int(v) => Json::from(*v),
            Value::Bool(v) => Json::from(*v),
            Value::Text(s) => Json::from(s.as_str()),
            Value::Null => Json::Null,
        }
    }
}

/// One output row. `schema` names the record kind and appears as a field in
/// JSON output and in the metadata block of CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub schema: &'static str,
    pub fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new(schema: &'static str) -> Self {
        Self {
            schema,
            fields: Vec::new(),
        }
    }

    pub fn num(mut self, key: &'static str, v: f64) -> Self {
        self.fields.push((key, Value::Num(v)));
        self
    }

    pub fn opt_num(mut self, key: &'static str, v: Option<f64>) -> Self {
        self.fields.push((key, v.map_or(Value::Null, Value::Num)));
        self
    }

    pub fn int(mut self, key: &'static str, v: usize) -> Self {
        self.fields.push((key, Value::Int(v as u64)));
        self
    }

    pub fn opt_int(mut self, key: &'static str, v: Option<usize>) -> Self {
        self.fields.push((key, v.map_or(Value::Null, |v| Value::Int(v as u64))));
        self
    }

    pub fn flag(mut self, key: &'static str, v: bool) -> Self {
        self.fields.push((key, Value::Bool(v)));
        self
    }

    pub fn opt_flag(mut self, key: &'static str, v: Option<bool>) -> Self {
        self.fields.push((key, v.map_or(Value::Null, Value::Bool)));
        self
    }

    pub fn text(mut self, key: &'static str, v: impl Into<String>) -> Self {
        self.fields.push((key, Value::Text(v.into())));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

/// Writes records of one schema. The CSV header follows the metadata lines
/// and is taken from the first record.
pub struct Sink<W: Write> {
    out: W,
    format: Format,
    meta: Vec<String>,
    started: bool,
}

impl<W: Write> Sink<W> {
    pub fn new(out: W, format: Format, meta: Vec<String>) -> Self {
        Self {
            out,
            format,
            meta,
            started: false,
        }
    }

    pub fn emit(&mut self, rec: &Record) -> io::Result<()> {
        match self.format {
            Format::Csv => {
                if !self.started {
                    for line in &self.meta {
                        writeln!(self.out, "# {line}")?;
                    }
                    writeln!(self.out, "# schema: {}", rec.schema)?;
                    let header: Vec<&str> = rec.fields.iter().map(|(k, _)| *k).collect();
                    writeln!(self.out, "{}", header.join(","))?;
                }
                let row: Vec<String> = rec.fields.iter().map(|(_, v)| v.csv()).collect();
                writeln!(self.out, "{}", row.join(","))?;
            }
            Format::JsonLines => {
                let mut map = Map::new();
                map.insert("schema".into(), Json::from(rec.schema));
                for (k, v) in &rec.fields {
                    map.insert((*k).into(), v.json());
                }
                writeln!(self.out, "{}", Json::Object(map))?;
            }
        }
        self.started = true;
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> Record {
        Record::new("eval")
            .num("x", 0.5)
            .text("method", "series")
            .opt_num("missing", None)
            .int("terms", 12)
    }

    #[test]
    fn csv_has_metadata_then_header() {
        let mut buf = Vec::new();
        let mut sink = Sink::new(&mut buf, Format::Csv, vec!["tool 0.1".into()]);
        sink.emit(&record()).unwrap();
        sink.emit(&record()).unwrap();
        sink.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# tool 0.1");
        assert_eq!(lines[1], "# schema: eval");
        assert_eq!(lines[2], "x,method,missing,terms");
        assert_eq!(lines[3], "5.0000000000000000e-1,series,,12");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_lines_keep_field_order() {
        let mut buf = Vec::new();
        let mut sink = Sink::new(&mut buf, Format::JsonLines, vec!["ignored".into()]);
        sink.emit(&record()).unwrap();
        sink.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.trim(),
            r#"{"schema":"eval","x":0.5,"method":"series","missing":null,"terms":12}"#
        );
    }

    #[test]
    fn csv_quotes_text_with_commas() {
        assert_eq!(Value::Text("a,b".into()).csv(), "\"a,b\"");
        assert_eq!(Value::Text("say \"hi\", ok".into()).csv(), "\"say \"\"hi\"\", ok\"");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [1.0 / 3.0, 0.1, 2.0f64.sqrt(), -1e-300, 6.02e23] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
