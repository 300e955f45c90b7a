//! Randomized fixtures for differential testing of the SQLite and plist
//! readers. Databases are written by stock SQLite and dumped by it; plists
//! are written by the reference `plist` implementation.

use std::time::{Duration, SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rusqlite::types::{Value as SqlValue, ValueRef};
use rusqlite::{Connection, DatabaseName};

use crate::GenError;

/// A value as stock SQLite reports it.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Null,
    Integer(i64),
    Real(f64),
    Text(String),
    Blob(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DumpedTable {
    pub name: String,
    pub columns: Vec<String>,
    /// `(rowid, values)` in rowid order.
    pub rows: Vec<(i64, Vec<Cell>)>,
}

#[derive(Debug, Clone)]
pub struct SqliteFixture {
    pub page_size: usize,
    pub bytes: Vec<u8>,
    pub tables: Vec<DumpedTable>,
}

const PAGE_SIZES: [usize; 4] = [512, 1024, 2048, 4096];
const DECLARED: [&str; 7] = [
    "INTEGER",
    "REAL",
    "TEXT",
    "BLOB",
    "NUMERIC",
    "",
    "VARCHAR(40)",
];

fn random_text(rng: &mut ChaCha8Rng, max: usize) -> String {
    const POOL: &[char] = &[
        'a', 'Z', '0', ' ', '_', '/', '.', 'é', 'ß', 'Ж', '中', '😀', '\n', '\'', '"',
    ];
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *POOL.choose(rng).unwrap()).collect()
}

fn random_blob(rng: &mut ChaCha8Rng, max: usize) -> Vec<u8> {
    let n = rng.gen_range(0..=max);
    let mut v = vec![0u8; n];
    rng.fill(&mut v[..]);
    v
}

fn random_value(rng: &mut ChaCha8Rng, page_size: usize) -> SqlValue {
    match rng.gen_range(0..10) {
        0 | 1 => SqlValue::Null,
        2 => SqlValue::Integer(rng.gen_range(-2..300)),
        3 => SqlValue::Integer(rng.gen::<i64>() >> rng.gen_range(0..63)),
        4 => SqlValue::Real(rng.gen_range(-1e6..1e6)),
        5 => SqlValue::Real(f64::from_bits(
            rng.gen::<u64>() & !(0x7ff << 52) | (rng.gen_range(900u64..1100) << 52),
        )),
        6 => SqlValue::Text(random_text(rng, 40)),
        // Long enough to spill onto overflow pages.
        7 => SqlValue::Text(random_text(rng, page_size * 3)),
        8 => SqlValue::Blob(random_blob(rng, 64)),
        _ => SqlValue::Blob(random_blob(rng, page_size * 4)),
    }
}

fn cell(v: ValueRef) -> Cell {
    match v {
        ValueRef::Null => Cell::Null,
        ValueRef::Integer(i) => Cell::Integer(i),
        ValueRef::Real(r) => Cell::Real(r),
        ValueRef::Text(t) => Cell::Text(String::from_utf8_lossy(t).into_owned()),
        ValueRef::Blob(b) => Cell::Blob(b.to_vec()),
    }
}

fn dump(conn: &Connection, name: &str) -> Result<DumpedTable, GenError> {
    let mut stmt = conn.prepare(&format!("SELECT rowid, * FROM \"{name}\" ORDER BY rowid"))?;
    let columns: Vec<String> = stmt
        .column_names()
        .iter()
        .skip(1)
        .map(|c| c.to_string())
        .collect();
    let n = columns.len();
    let rows = stmt
        .query_map([], |r| {
            let rowid: i64 = r.get(0)?;
            let values = (1..=n)
                .map(|i| r.get_ref(i).map(cell))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((rowid, values))
        })?
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DumpedTable {
        name: name.to_string(),
        columns,
        rows,
    })
}

/// One randomized database: 1–4 tables of mixed affinities, up to a few
/// hundred rows, random deletions, page size between 512 and 4096.
pub fn sqlite_fixture(seed: u64) -> Result<SqliteFixture, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let page_size = *PAGE_SIZES.choose(&mut rng).unwrap();
    let conn = Connection::open_in_memory()?;
    conn.execute_batch(&format!("PRAGMA page_size = {page_size};"))?;
    let ntables = rng.gen_range(1..=4);
    let mut names = Vec::new();
    for t in 0..ntables {
        let name = format!("t{t}_{}", rng.gen_range(0..1000));
        let ncols = rng.gen_range(1..=6);
        let alias = rng.gen_bool(0.4);
        let mut cols = Vec::new();
        if alias {
            cols.push("id INTEGER PRIMARY KEY".to_string());
        }
        for c in 0..ncols {
            cols.push(
                format!("c{c} {}", DECLARED.choose(&mut rng).unwrap())
                    .trim()
                    .to_string(),
            );
        }
        conn.execute_batch(&format!("CREATE TABLE \"{name}\" ({})", cols.join(", ")))?;
        let placeholders = (1..=ncols)
            .map(|i| format!("?{i}"))
            .collect::<Vec<_>>()
            .join(", ");
        let insert = format!(
            "INSERT INTO \"{name}\" ({}) VALUES ({placeholders})",
            (0..ncols)
                .map(|c| format!("c{c}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        let nrows = rng.gen_range(0..=250);
        for _ in 0..nrows {
            let values: Vec<SqlValue> = (0..ncols)
                .map(|_| random_value(&mut rng, page_size))
                .collect();
            conn.execute(&insert, rusqlite::params_from_iter(values))?;
        }
        if nrows > 10 && rng.gen_bool(0.5) {
            conn.execute(
                &format!(
                    "DELETE FROM \"{name}\" WHERE rowid % {} = 0",
                    rng.gen_range(2..7)
                ),
                [],
            )?;
        }
        names.push(name);
    }
    if rng.gen_bool(0.3) {
        conn.execute_batch(&format!("CREATE INDEX idx0 ON \"{}\" (c0)", names[0]))?;
    }
    let tables = names
        .iter()
        .map(|n| dump(&conn, n))
        .collect::<Result<Vec<_>, _>>()?;
    let bytes = conn.serialize(DatabaseName::Main)?.to_vec();
    Ok(SqliteFixture {
        page_size,
        bytes,
        tables,
    })
}

/// Random plist tree. `uids` admits UID leaves, which only the binary
/// format can carry. Dates have whole-second precision, the XML limit.
pub fn plist_tree(seed: u64, uids: bool) -> plist::Value {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut root = plist::Dictionary::new();
    let n = rng.gen_range(0..8);
    for i in 0..n {
        root.insert(
            format!("k{i}_{}", random_text(&mut rng, 6)),
            plist_value(&mut rng, 3, uids),
        );
    }
    plist::Value::Dictionary(root)
}

fn plist_value(rng: &mut ChaCha8Rng, depth: u32, uids: bool) -> plist::Value {
    use plist::Value;
    let leaf_kinds = if uids { 7 } else { 6 };
    let kind = if depth == 0 {
        rng.gen_range(2..2 + leaf_kinds)
    } else {
        rng.gen_range(0..2 + leaf_kinds)
    };
    match kind {
        0 => Value::Array(
            (0..rng.gen_range(0..6))
                .map(|_| plist_value(rng, depth - 1, uids))
                .collect(),
        ),
        1 => {
            let mut d = plist::Dictionary::new();
            for i in 0..rng.gen_range(0..6) {
                d.insert(
                    format!("{}{i}", random_text(rng, 8)),
                    plist_value(rng, depth - 1, uids),
                );
            }
            Value::Dictionary(d)
        }
        2 => Value::String(random_text(rng, 30)),
        3 => Value::Integer((rng.gen::<i64>() >> rng.gen_range(0..63)).into()),
        4 => Value::Real(match rng.gen_range(0..3) {
            0 => rng.gen_range(-1e3..1e3),
            1 => rng.gen_range(-1e15f64..1e15).round(),
            _ => rng.gen::<f64>() * 10f64.powi(rng.gen_range(-30..30)),
        }),
        5 => Value::Boolean(rng.gen()),
        6 => {
            let secs: i64 = rng.gen_range(-2_000_000_000..4_000_000_000);
            let t = if secs >= 0 {
                UNIX_EPOCH + Duration::from_secs(secs as u64)
            } else {
                UNIX_EPOCH - Duration::from_secs(secs.unsigned_abs())
            };
            Value::Date(plist::Date::from(t))
        }
        7 => Value::Data(random_blob(rng, 80)),
        _ => {
            let bits = rng.gen_range(1..40);
            Value::Uid(plist::Uid::new(rng.gen_range(0..1u64 << bits)))
        }
    }
}

/// Seconds since 2001-01-01T00:00Z of a plist date.
pub fn apple_seconds(d: &plist::Date) -> f64 {
    let t: SystemTime = (*d).into();
    let unix = match t.duration_since(UNIX_EPOCH) {
        Ok(d) => d.as_secs_f64(),
        Err(e) => -e.duration().as_secs_f64(),
    };
    unix - 978_307_200.0
}

fn core_cell(v: &cloudsift::sqlite::Value) -> Cell {
    use cloudsift::sqlite::Value as V;
    match v {
        V::Null => Cell::Null,
        V::Integer(i) => Cell::Integer(*i),
        V::Real(r) => Cell::Real(*r),
        V::Text(t) => Cell::Text(t.clone()),
        V::Blob(b) => Cell::Blob(b.clone()),
    }
}

/// Reads the fixture with the crate's own reader and compares every table
/// with the stock dump. Returns the number of rows compared.
pub fn check_sqlite(f: &SqliteFixture) -> Result<usize, String> {
    let db = cloudsift::sqlite::Database::open(&f.bytes).map_err(|e| format!("open: {e}"))?;
    if db.page_size() != f.page_size {
        return Err(format!("page size {} != {}", db.page_size(), f.page_size));
    }
    let mut compared = 0;
    for t in &f.tables {
        let got = db
            .read_rows(&t.name)
            .map_err(|e| format!("{}: {e}", t.name))?;
        if !got.warnings.is_empty() {
            return Err(format!("{}: warnings {:?}", t.name, got.warnings));
        }
        if got.columns != t.columns {
            return Err(format!(
                "{}: columns {:?} != {:?}",
                t.name, got.columns, t.columns
            ));
        }
        let rows: Vec<(i64, Vec<Cell>)> = got
            .rows
            .iter()
            .map(|r| (r.rowid, r.values.iter().map(core_cell).collect()))
            .collect();
        if rows.len() != t.rows.len() {
            return Err(format!(
                "{}: {} rows != {}",
                t.name,
                rows.len(),
                t.rows.len()
            ));
        }
        for (a, b) in rows.iter().zip(&t.rows) {
            if a != b {
                return Err(format!(
                    "{}: row {} differs: {:?} != {:?}",
                    t.name, b.0, a, b
                ));
            }
        }
        compared += rows.len();
    }
    Ok(compared)
}

/// The reference tree expressed in the crate's plist model.
pub fn expected_plist(v: &plist::Value) -> cloudsift::plist::PlistValue {
    use cloudsift::plist::PlistValue as P;
    match v {
        plist::Value::Dictionary(d) => P::Dictionary(
            d.iter()
                .map(|(k, v)| (k.clone(), expected_plist(v)))
                .collect(),
        ),
        plist::Value::Array(a) => P::Array(a.iter().map(expected_plist).collect()),
        plist::Value::String(s) => P::String(s.clone()),
        plist::Value::Integer(i) => P::Integer(i.as_signed().expect("signed integer")),
        plist::Value::Real(r) => P::Real(*r),
        plist::Value::Boolean(b) => P::Boolean(*b),
        plist::Value::Date(d) => P::Date(apple_seconds(d)),
        plist::Value::Data(d) => P::Data(d.clone()),
        plist::Value::Uid(u) => P::Uid(u.get()),
        _ => unreachable!("fixture trees use only the standard types"),
    }
}

/// Serializes the tree both ways and parses each with the crate's reader.
pub fn check_plist(v: &plist::Value, xml: bool) -> Result<(), String> {
    let want = expected_plist(v);
    let mut bytes = Vec::new();
    if xml {
        v.to_writer_xml(&mut bytes).map_err(|e| e.to_string())?;
    } else {
        v.to_writer_binary(&mut bytes).map_err(|e| e.to_string())?;
    }
    let got = cloudsift::plist::parse_plist(&bytes).map_err(|e| e.to_string())?;
    if got != want {
        return Err(format!(
            "{} parse differs:\n got  {got:?}\n want {want:?}",
            if xml { "xml" } else { "binary" }
        ));
    }
    Ok(())
}

/// Embeds `file` at a random offset inside 1–3 MiB of non-matching filler,
/// carves the image and checks that exactly that extent comes back.
pub fn carve_trial(file: &[u8], seed: u64) -> Result<(), String> {
    use cloudsift::carver::{builtin_signatures, carve};
    use cloudsift::evidence::RawImage;
    use cloudsift::model::ObjectOrigin;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = rng.gen_range(1 << 20..3 << 20);
    let offset = rng.gen_range(0..total);
    let mut image = crate::scenario::filler(&mut rng, offset);
    image.extend_from_slice(file);
    let tail = total - offset;
    image.extend(crate::scenario::filler(&mut rng, tail));
    let len = image.len() as u64;
    let out = carve(&RawImage::from_bytes("trial", image), &builtin_signatures());
    for o in &out.objects {
        let ObjectOrigin::CarvedAtOffset(at) = o.origin else {
            return Err("carved object without an offset".into());
        };
        if at + o.length > len {
            return Err(format!("object at {at} runs past the image end"));
        }
    }
    match out.objects.as_slice() {
        [o] if o.origin == ObjectOrigin::CarvedAtOffset(offset as u64)
            && o.length == file.len() as u64
            && o.sha1 == cloudsift::hashing::sha1_hex(file) =>
        {
            Ok(())
        }
        [o] => Err(format!(
            "carved {:?}+{} ({}), embedded at {offset}+{}",
            o.origin,
            o.length,
            o.logical_name,
            file.len()
        )),
        objs => Err(format!("{} objects carved, expected 1", objs.len())),
    }
}
