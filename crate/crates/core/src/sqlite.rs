//! Read-only reader for SQLite 3 main database files.
//!
//! Covers the rollback-journal, UTF-8 subset: table b-trees, record
//! decoding, overflow chains and `CREATE TABLE` column extraction.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::model::Scalar;

const MAGIC: &[u8; 16] = b"SQLite format 3\0";
const HEADER_LEN: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum SqliteError {
    #[error("not an SQLite 3 database: {0}")]
    Format(String),
    #[error("database is in WAL journal mode, which is not supported")]
    WalUnsupported,
    #[error("database text encoding {0} (UTF-16) is not supported")]
    Utf16Unsupported(u32),
    #[error("page {page} is truncated or lies past the end of the file")]
    Truncated { page: u32 },
    #[error("corrupt b-tree at page {page}: {detail}")]
    Corrupt { page: u32, detail: String },
    #[error("no table named `{0}`")]
    NoSuchTable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Integer(i64),
    Real(f64),
    Text(String),
    Blob(Vec<u8>),
}

impl Value {
    pub fn to_scalar(&self) -> Scalar {
        match self {
            Value::Null => Scalar::Null,
            Value::Integer(i) => Scalar::Integer(*i),
            Value::Real(r) => Scalar::Real(*r),
            Value::Text(s) => Scalar::Text(s.clone()),
            Value::Blob(b) => Scalar::bytes(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableInfo {
    pub name: String,
    pub root_page: u32,
    pub columns: Vec<String>,
    /// Index of the `INTEGER PRIMARY KEY` column, whose value is the rowid.
    pub rowid_alias: Option<usize>,
    /// Columns with REAL affinity, where integral values are stored as
    /// integers on disk and must be read back as reals.
    pub real_affinity: Vec<bool>,
    pub sql: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub rowid: i64,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRows {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
}

impl TableRows {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))
    }

    pub fn get<'r>(&self, row: &'r Row, column: &str) -> Option<&'r Value> {
        self.column_index(column).and_then(|i| row.values.get(i))
    }
}

#[derive(Debug, Clone)]
pub struct Database<'a> {
    data: &'a [u8],
    page_size: usize,
    usable: usize,
    page_count: u32,
    tables: BTreeMap<String, TableInfo>,
    schema_warnings: Vec<String>,
}

impl<'a> Database<'a> {
    pub fn open(data: &'a [u8]) -> Result<Self, SqliteError> {
        if data.len() < HEADER_LEN {
            return Err(SqliteError::Format(format!(
                "{} bytes is shorter than the 100-byte header",
                data.len()
            )));
        }
        if &data[..16] != MAGIC {
            return Err(SqliteError::Format("bad header magic".into()));
        }
        let raw_size = u16::from_be_bytes([data[16], data[17]]) as usize;
        let page_size = if raw_size == 1 { 65536 } else { raw_size };
        if !(512..=65536).contains(&page_size) || !page_size.is_power_of_two() {
            return Err(SqliteError::Format(format!("invalid page size {raw_size}")));
        }
        if data[18] == 2 || data[19] == 2 {
            return Err(SqliteError::WalUnsupported);
        }
        let reserved = data[20] as usize;
        let usable = page_size - reserved;
        if usable < 480 {
            return Err(SqliteError::Format(format!(
                "usable page size {usable} below 480"
            )));
        }
        let encoding = be_u32(&data[56..60]);
        if encoding == 2 || encoding == 3 {
            return Err(SqliteError::Utf16Unsupported(encoding));
        }
        let page_count = (data.len() / page_size) as u32;
        let mut db = Database {
            data,
            page_size,
            usable,
            page_count,
            tables: BTreeMap::new(),
            schema_warnings: Vec::new(),
        };
        db.load_schema()?;
        Ok(db)
    }

    pub fn page_size(&self) -> usize {
        self.page_size
    }

    pub fn page_count(&self) -> u32 {
        self.page_count
    }

    pub fn schema_warnings(&self) -> &[String] {
        &self.schema_warnings
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableInfo> {
        self.tables.values()
    }

    /// Table lookup; SQLite identifiers are case-insensitive.
    pub fn table(&self, name: &str) -> Option<&TableInfo> {
        self.tables.get(name).or_else(|| {
            self.tables
                .values()
                .find(|t| t.name.eq_ignore_ascii_case(name))
        })
    }

    fn load_schema(&mut self) -> Result<(), SqliteError> {
        let mut warnings = Vec::new();
        let mut rows = Vec::new();
        self.walk_table(1, &mut rows, &mut warnings)?;
        for row in rows {
            let text = |i: usize| match row.values.get(i) {
                Some(Value::Text(s)) => Some(s.as_str()),
                _ => None,
            };
            if text(0) != Some("table") {
                continue;
            }
            let (Some(name), Some(sql)) = (text(1), text(4)) else {
                continue;
            };
            let root_page = match row.values.get(3) {
                Some(Value::Integer(p)) if *p > 0 && *p <= u32::MAX as i64 => *p as u32,
                _ => {
                    warnings.push(format!("table {name} has no usable root page"));
                    continue;
                }
            };
            match parse_create_table(sql) {
                Some(parsed) if parsed.without_rowid => {
                    warnings.push(format!("table {name} is WITHOUT ROWID; skipped"));
                }
                Some(parsed) => {
                    self.tables.insert(
                        name.to_string(),
                        TableInfo {
                            name: name.to_string(),
                            root_page,
                            columns: parsed.columns,
                            rowid_alias: parsed.rowid_alias,
                            real_affinity: parsed.real_affinity,
                            sql: sql.to_string(),
                        },
                    );
                }
                None => warnings.push(format!("could not parse schema for {name}")),
            }
        }
        self.schema_warnings = warnings;
        Ok(())
    }

    /// All rows of `table` in ascending rowid order.
    pub fn read_rows(&self, table: &str) -> Result<TableRows, SqliteError> {
        let info = self
            .table(table)
            .ok_or_else(|| SqliteError::NoSuchTable(table.to_string()))?;
        let mut warnings = Vec::new();
        let mut rows = Vec::new();
        self.walk_table(info.root_page, &mut rows, &mut warnings)?;
        let ncols = info.columns.len();
        for row in &mut rows {
            row.values.resize(ncols, Value::Null);
            for (v, real) in row.values.iter_mut().zip(&info.real_affinity) {
                if let (true, Value::Integer(i)) = (real, &v) {
                    *v = Value::Real(*i as f64);
                }
            }
            if let Some(i) = info.rowid_alias {
                row.values[i] = Value::Integer(row.rowid);
            }
        }
        Ok(TableRows {
            columns: info.columns.clone(),
            rows,
            warnings,
        })
    }

    fn page(&self, page: u32) -> Result<&'a [u8], SqliteError> {
        if page == 0 {
            return Err(SqliteError::Corrupt {
                page,
                detail: "page number zero".into(),
            });
        }
        let start = (page as usize - 1) * self.page_size;
        self.data
            .get(start..start + self.page_size)
            .ok_or(SqliteError::Truncated { page })
    }

    fn walk_table(
        &self,
        root: u32,
        out: &mut Vec<Row>,
        warnings: &mut Vec<String>,
    ) -> Result<(), SqliteError> {
        let mut visited = HashSet::new();
        let mut stack = vec![root];
        // Depth-first, pushing children right-to-left so rowids come out ascending.
        while let Some(pgno) = stack.pop() {
            if !visited.insert(pgno) {
                return Err(SqliteError::Corrupt {
                    page: pgno,
                    detail: "page referenced twice (cycle)".into(),
                });
            }
            let page = self.page(pgno)?;
            let hdr = if pgno == 1 { HEADER_LEN } else { 0 };
            let corrupt = |detail: &str| SqliteError::Corrupt {
                page: pgno,
                detail: detail.to_string(),
            };
            let kind = page[hdr];
            let ncells = u16::from_be_bytes([page[hdr + 3], page[hdr + 4]]) as usize;
            match kind {
                0x0D => {
                    let ptrs = hdr + 8;
                    if ptrs + ncells * 2 > self.usable {
                        return Err(corrupt("cell pointer array overruns page"));
                    }
                    for i in 0..ncells {
                        let off = be_u16(&page[ptrs + i * 2..]) as usize;
                        match self.leaf_cell(page, off) {
                            Ok(row) => out.push(row),
                            Err(detail) => warnings
                                .push(format!("page {pgno} cell {i}: {detail}; row skipped")),
                        }
                    }
                }
                0x05 => {
                    let ptrs = hdr + 12;
                    if ptrs + ncells * 2 > self.usable {
                        return Err(corrupt("cell pointer array overruns page"));
                    }
                    stack.push(be_u32(&page[hdr + 8..]));
                    for i in (0..ncells).rev() {
                        let off = be_u16(&page[ptrs + i * 2..]) as usize;
                        if off + 4 > self.usable {
                            return Err(corrupt("interior cell offset out of range"));
                        }
                        stack.push(be_u32(&page[off..]));
                    }
                }
                other => {
                    return Err(corrupt(&format!(
                        "unexpected page type 0x{other:02x} in table b-tree"
                    )))
                }
            }
        }
        Ok(())
    }

    fn leaf_cell(&self, page: &[u8], off: usize) -> Result<Row, String> {
        let limit = &page[..self.usable];
        let (payload_len, n1) = read_varint(limit.get(off..).ok_or("cell offset out of range")?)
            .ok_or("truncated payload length")?;
        let (rowid, n2) = read_varint(&limit[off + n1..]).ok_or("truncated rowid")?;
        let body = off + n1 + n2;
        let payload_len = usize::try_from(payload_len).map_err(|_| "payload length overflow")?;
        let local = self.local_payload(payload_len);
        let mut payload = Vec::with_capacity(payload_len);
        payload.extend_from_slice(
            limit
                .get(body..body + local)
                .ok_or("local payload overruns page")?,
        );
        if local < payload_len {
            let first = be_u32(
                limit
                    .get(body + local..body + local + 4)
                    .ok_or("overflow pointer overruns page")?,
            );
            self.read_overflow(first, payload_len, &mut payload)?;
        }
        let values = decode_record(&payload)?;
        Ok(Row {
            rowid: rowid as i64,
            values,
        })
    }

    /// Bytes of a table-leaf payload stored on the b-tree page itself.
    fn local_payload(&self, p: usize) -> usize {
        let u = self.usable;
        let x = u - 35;
        if p <= x {
            return p;
        }
        let m = ((u - 12) * 32 / 255) - 23;
        let k = m + ((p - m) % (u - 4));
        if k <= x {
            k
        } else {
            m
        }
    }

    fn read_overflow(&self, mut next: u32, total: usize, out: &mut Vec<u8>) -> Result<(), String> {
        let mut seen = HashSet::new();
        while out.len() < total {
            if next == 0 {
                return Err("overflow chain ends early".into());
            }
            if !seen.insert(next) {
                return Err(format!("overflow chain cycles at page {next}"));
            }
            let page = self.page(next).map_err(|e| e.to_string())?;
            let take = (self.usable - 4).min(total - out.len());
            out.extend_from_slice(&page[4..4 + take]);
            next = be_u32(page);
        }
        Ok(())
    }
}

fn be_u16(b: &[u8]) -> u16 {
    u16::from_be_bytes([b[0], b[1]])
}

fn be_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

/// SQLite varint: big-endian base-128, at most nine bytes, the ninth
/// contributing all eight bits.
pub fn read_varint(b: &[u8]) -> Option<(u64, usize)> {
    let mut v: u64 = 0;
    for i in 0..9 {
        let byte = *b.get(i)?;
        if i == 8 {
            return Some(((v << 8) | byte as u64, 9));
        }
        v = (v << 7) | (byte & 0x7f) as u64;
        if byte & 0x80 == 0 {
            return Some((v, i + 1));
        }
    }
    None
}

fn decode_record(payload: &[u8]) -> Result<Vec<Value>, String> {
    let (hdr_len, n) = read_varint(payload).ok_or("truncated record header")?;
    let hdr_len = hdr_len as usize;
    if hdr_len > payload.len() || hdr_len < n {
        return Err("record header length out of range".into());
    }
    let mut types = Vec::new();
    let mut pos = n;
    while pos < hdr_len {
        let (t, k) = read_varint(&payload[pos..hdr_len]).ok_or("truncated serial type")?;
        types.push(t);
        pos += k;
    }
    let mut body = hdr_len;
    let mut values = Vec::with_capacity(types.len());
    for t in types {
        let len = serial_len(t).ok_or_else(|| format!("reserved serial type {t}"))?;
        let bytes = payload
            .get(body..body + len)
            .ok_or("record body shorter than header declares")?;
        body += len;
        values.push(match t {
            0 => Value::Null,
            1..=6 => Value::Integer(be_signed(bytes)),
            7 => Value::Real(f64::from_bits(u64::from_be_bytes(
                bytes.try_into().unwrap(),
            ))),
            8 => Value::Integer(0),
            9 => Value::Integer(1),
            t if t % 2 == 0 => Value::Blob(bytes.to_vec()),
            _ => Value::Text(String::from_utf8_lossy(bytes).into_owned()),
        });
    }
    Ok(values)
}

fn serial_len(t: u64) -> Option<usize> {
    Some(match t {
        0 | 8 | 9 => 0,
        1 => 1,
        2 => 2,
        3 => 3,
        4 => 4,
        5 => 6,
        6 | 7 => 8,
        10 | 11 => return None,
        t => ((t - 12) / 2) as usize,
    })
}

fn be_signed(b: &[u8]) -> i64 {
    let mut v: i64 = if b[0] & 0x80 != 0 { -1 } else { 0 };
    for &x in b {
        v = (v << 8) | x as i64;
    }
    v
}

#[derive(Debug, PartialEq)]
struct ParsedTable {
    columns: Vec<String>,
    rowid_alias: Option<usize>,
    real_affinity: Vec<bool>,
    without_rowid: bool,
}

/// REAL affinity per the column-affinity rules: no INT, CHAR, CLOB, TEXT or
/// BLOB substring, and one of REAL, FLOA or DOUB.
fn is_real_affinity(ty: &str) -> bool {
    let has = |s: &str| ty.contains(s);
    !has("INT")
        && !has("CHAR")
        && !has("CLOB")
        && !has("TEXT")
        && !has("BLOB")
        && (has("REAL") || has("FLOA") || has("DOUB"))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
    Comma,
    Other,
}

fn tokenize_sql(sql: &str) -> Vec<Tok> {
    let chars: Vec<char> = sql.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '/' if chars.get(i + 1) == Some(&'*') => {
                i += 2;
                while i < chars.len() && !(chars[i] == '*' && chars.get(i + 1) == Some(&'/')) {
                    i += 1;
                }
                i += 2;
            }
            '(' => {
                toks.push(Tok::Open);
                i += 1;
            }
            ')' => {
                toks.push(Tok::Close);
                i += 1;
            }
            ',' => {
                toks.push(Tok::Comma);
                i += 1;
            }
            '"' | '\'' | '`' | '[' => {
                let close = if c == '[' { ']' } else { c };
                let mut s = String::new();
                i += 1;
                while i < chars.len() {
                    if chars[i] == close {
                        if close != ']' && chars.get(i + 1) == Some(&close) {
                            s.push(close);
                            i += 2;
                            continue;
                        }
                        break;
                    }
                    s.push(chars[i]);
                    i += 1;
                }
                i += 1;
                toks.push(Tok::Quoted(s));
            }
            c if c.is_alphanumeric() || c == '_' || c == '$' => {
                let mut s = String::new();
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$')
                {
                    s.push(chars[i]);
                    i += 1;
                }
                toks.push(Tok::Word(s));
            }
            _ => {
                toks.push(Tok::Other);
                i += 1;
            }
        }
    }
    toks
}

fn is_kw(t: &Tok, kw: &str) -> bool {
    matches!(t, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
}

fn ident(t: &Tok) -> Option<&str> {
    match t {
        Tok::Word(w) | Tok::Quoted(w) => Some(w),
        _ => None,
    }
}

fn parse_create_table(sql: &str) -> Option<ParsedTable> {
    let toks = tokenize_sql(sql);
    let open = toks.iter().position(|t| *t == Tok::Open)?;
    // Split the parenthesized body at top-level commas.
    let mut defs: Vec<Vec<Tok>> = vec![Vec::new()];
    let mut depth = 0;
    let mut end = None;
    for (i, t) in toks.iter().enumerate().skip(open + 1) {
        match t {
            Tok::Open => depth += 1,
            Tok::Close if depth == 0 => {
                end = Some(i);
                break;
            }
            Tok::Close => depth -= 1,
            Tok::Comma if depth == 0 => {
                defs.push(Vec::new());
                continue;
            }
            _ => {}
        }
        defs.last_mut().unwrap().push(t.clone());
    }
    let end = end?;
    let tail = &toks[end + 1..];
    let without_rowid = tail
        .windows(2)
        .any(|w| is_kw(&w[0], "WITHOUT") && is_kw(&w[1], "ROWID"));

    let mut columns = Vec::new();
    let mut types = Vec::new();
    let mut alias = None;
    let mut table_pk: Option<Vec<String>> = None;
    for def in defs.iter().filter(|d| !d.is_empty()) {
        let first = &def[0];
        if ["CONSTRAINT", "PRIMARY", "UNIQUE", "CHECK", "FOREIGN"]
            .iter()
            .any(|k| is_kw(first, k))
        {
            if let Some(p) = def.iter().position(|t| is_kw(t, "PRIMARY")) {
                if def.get(p + 1).is_some_and(|t| is_kw(t, "KEY")) {
                    let cols: Vec<String> = def[p + 2..]
                        .iter()
                        .skip_while(|t| **t != Tok::Open)
                        .skip(1)
                        .take_while(|t| **t != Tok::Close)
                        .filter_map(|t| ident(t).map(str::to_string))
                        .collect();
                    table_pk = Some(cols);
                }
            }
            continue;
        }
        let name = ident(first)?.to_string();
        // Declared type: words up to the first constraint keyword or paren.
        let ty: Vec<&str> = def[1..]
            .iter()
            .take_while(|t| {
                matches!(t, Tok::Word(_))
                    && ![
                        "CONSTRAINT",
                        "PRIMARY",
                        "NOT",
                        "NULL",
                        "UNIQUE",
                        "CHECK",
                        "DEFAULT",
                        "COLLATE",
                        "REFERENCES",
                        "GENERATED",
                        "AS",
                    ]
                    .iter()
                    .any(|k| is_kw(t, k))
            })
            .filter_map(ident)
            .collect();
        let ty = ty.join(" ").to_ascii_uppercase();
        let pk = def
            .windows(2)
            .position(|w| is_kw(&w[0], "PRIMARY") && is_kw(&w[1], "KEY"));
        if let Some(p) = pk {
            let desc = def.get(p + 2).is_some_and(|t| is_kw(t, "DESC"));
            if ty == "INTEGER" && !desc {
                alias = Some(columns.len());
            }
        }
        columns.push(name);
        types.push(ty);
    }
    if alias.is_none() {
        if let Some(pk) = table_pk {
            if pk.len() == 1 {
                if let Some(i) = columns.iter().position(|c| c.eq_ignore_ascii_case(&pk[0])) {
                    if types[i] == "INTEGER" {
                        alias = Some(i);
                    }
                }
            }
        }
    }
    if without_rowid {
        alias = None;
    }
    let real_affinity = types.iter().map(|t| is_real_affinity(t)).collect();
    Some(ParsedTable {
        columns,
        rowid_alias: alias,
        real_affinity,
        without_rowid,
    })
}
