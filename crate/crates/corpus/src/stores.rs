//! Metadata stores written with stock SQLite and a reference plist writer.

use rusqlite::{Connection, DatabaseName, ToSql};

use crate::GenError;

pub type Param = Box<dyn ToSql>;

pub struct Table {
    pub create: String,
    pub insert: String,
    pub rows: Vec<Vec<Param>>,
}

impl Table {
    pub fn new(create: &str, insert: &str) -> Self {
        Table {
            create: create.to_string(),
            insert: insert.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, values: Vec<Param>) {
        self.rows.push(values);
    }
}

pub fn p<T: ToSql + 'static>(v: T) -> Param {
    Box::new(v)
}

/// Image of an SQLite database holding the given tables.
pub fn sqlite(tables: &[Table]) -> Result<Vec<u8>, GenError> {
    let conn = Connection::open_in_memory()?;
    for t in tables {
        conn.execute_batch(&t.create)?;
        let mut stmt = conn.prepare(&t.insert)?;
        for r in &t.rows {
            let params: Vec<&dyn ToSql> = r.iter().map(|b| b.as_ref()).collect();
            stmt.execute(params.as_slice())?;
        }
    }
    Ok(conn.serialize(DatabaseName::Main)?.to_vec())
}

pub fn android_metadata() -> Table {
    let mut t = Table::new(
        "CREATE TABLE android_metadata (locale TEXT)",
        "INSERT INTO android_metadata VALUES (?1)",
    );
    t.row(vec![p("en_US")]);
    t
}

pub fn plist_xml(v: &plist::Value) -> Result<Vec<u8>, GenError> {
    let mut out = Vec::new();
    v.to_writer_xml(&mut out)?;
    Ok(out)
}

pub fn plist_binary(v: &plist::Value) -> Result<Vec<u8>, GenError> {
    let mut out = Vec::new();
    v.to_writer_binary(&mut out)?;
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub enum Pref {
    Str(&'static str, String),
    Long(&'static str, i64),
    Int(String, i64),
    Bool(String, bool),
}

/// Android shared_prefs XML document.
pub fn shared_prefs(entries: &[Pref]) -> Vec<u8> {
    let mut s = String::from("<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n<map>\n");
    for e in entries {
        match e {
            Pref::Str(n, v) => s.push_str(&format!(
                "    <string name=\"{n}\">{}</string>\n",
                xml_escape(v)
            )),
            Pref::Long(n, v) => s.push_str(&format!("    <long name=\"{n}\" value=\"{v}\" />\n")),
            Pref::Int(n, v) => s.push_str(&format!(
                "    <int name=\"{}\" value=\"{v}\" />\n",
                xml_escape(n)
            )),
            Pref::Bool(n, v) => s.push_str(&format!(
                "    <boolean name=\"{}\" value=\"{v}\" />\n",
                xml_escape(n)
            )),
        }
    }
    s.push_str("</map>\n");
    s.into_bytes()
}
