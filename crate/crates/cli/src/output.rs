use std::fs;
use std::io::{self, Write};
use std::path::Path;

use omedian_core::VERSION;
use serde_json::{json, Map, Value};

use crate::args::Format;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// What a command produced. `summary` gains `config` and `version` keys when
/// written; an instance document gets them under `meta` so it stays loadable.
pub struct Artifacts {
    pub summary: Value,
    pub summary_is_instance: bool,
    pub table: Option<Table>,
    pub instance: Option<Value>,
    /// Printed on stdout instead of the summary when set.
    pub print_instance: bool,
    /// False when a verification step failed.
    pub ok: bool,
}

impl Artifacts {
    pub fn summary(summary: Value) -> Self {
        Artifacts {
            summary,
            summary_is_instance: false,
            table: None,
            instance: None,
            print_instance: false,
            ok: true,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

fn stamp(doc: &mut Value, config: &Value, as_meta: bool) {
    let obj = doc.as_object_mut().expect("documents are JSON objects");
    if as_meta {
        let meta = obj
            .entry("meta")
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .expect("meta is an object");
        meta.insert("config".into(), config.clone());
        meta.insert("version".into(), json!(VERSION));
    } else {
        obj.insert("config".into(), config.clone());
        obj.insert("version".into(), json!(VERSION));
    }
}

fn render_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

fn render_csv(table: &Table, config: &Value) -> io::Result<String> {
    let mut out = format!("# omedian {VERSION}\n# config: {config}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    out.push_str(std::str::from_utf8(&bytes).expect("csv output is utf-8"));
    Ok(out)
}

pub fn emit(mut art: Artifacts, config: &Value, stem: &str, format: Format, out_dir: Option<&Path>) -> io::Result<()> {
    stamp(&mut art.summary, config, art.summary_is_instance);
    if let Some(inst) = art.instance.as_mut() {
        stamp(inst, config, true);
    }
    let summary = render_json(&art.summary);
    let table = art.table.as_ref().map(|t| render_csv(t, config)).transpose()?;
    let instance = art.instance.as_ref().map(render_json);

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{stem}.json")), &summary)?;
        if let Some(t) = &table {
            fs::write(dir.join(format!("{stem}.csv")), t)?;
        }
        if let Some(i) = &instance {
            fs::write(dir.join(format!("{stem}.instance.json")), i)?;
        }
    }

    let shown = match (format, &table, &instance) {
        (_, _, Some(i)) if art.print_instance => i,
        (Format::Csv, Some(t), _) => t,
        _ => &summary,
    };
    let mut stdout = io::stdout().lock();
    stdout.write_all(shown.as_bytes())?;
    stdout.flush()
}
