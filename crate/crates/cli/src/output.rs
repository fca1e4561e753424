//! Deterministic table output: CSV ('.' decimal, '\n' endings, 17
//! significant digits) or JSON, with a reproducibility header carrying the
//! version, config hash and seed.

use std::io::Write;

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// extra scalar results reported in the header / meta block
    pub scalars: Vec<(String, f64)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            scalars: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.push((name.to_string(), value));
    }
}

/// FNV-1a 64-bit hash of the canonicalized invocation.
pub fn config_hash(parts: &[String]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for p in parts {
        for b in p.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0x1f;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn fmt(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        // keep integers readable but still exact
        format!("{v:.1}")
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_csv<W: Write>(
    mut out: W,
    table: &Table,
    hash: u64,
    seed: u64,
) -> std::io::Result<()> {
    write!(out, "# statmech v{}\n", env!("CARGO_PKG_VERSION"))?;
    write!(out, "# config-hash: {hash:016x}\n")?;
    write!(out, "# seed: {seed}\n")?;
    for (name, value) in &table.scalars {
        write!(out, "# {name}: {}\n", fmt(*value))?;
    }
    write!(out, "{}\n", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
        write!(out, "{}\n", cells.join(","))?;
    }
    Ok(())
}

pub fn write_json<W: Write>(
    mut out: W,
    table: &Table,
    hash: u64,
    seed: u64,
) -> std::io::Result<()> {
    let meta = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": format!("{hash:016x}"),
        "seed": seed,
        "scalars": table.scalars.iter().map(|(k, v)| (k.clone(), *v)).collect::<std::collections::BTreeMap<_,_>>(),
    });
    let doc = serde_json::json!({
        "meta": meta,
        "columns": table.columns,
        "rows": table.rows,
    });
    write!(out, "{}\n", serde_json::to_string_pretty(&doc)?)
}
