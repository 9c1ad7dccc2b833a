//! CSV and JSON rendering of sweep rows.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use crate::sweep::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 12 significant digits.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[Row]) -> Result<()> {
    writeln!(out, "series,x,method,y,clamped")?;
    for r in rows {
        let clamped = r.clamped.map(|c| c.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            r.series,
            number(r.x),
            r.method.name(),
            number(r.y),
            clamped
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a, P: Serialize> {
    parameters: &'a P,
    version: &'static str,
}

#[derive(Serialize)]
struct Document<'a, P: Serialize, R: Serialize> {
    metadata: Metadata<'a, P>,
    rows: &'a [R],
}

/// `{"metadata": {"parameters": …, "version": …}, "rows": […]}`.
/// Non-finite values become `null`.
pub fn write_json<W: Write, P: Serialize, R: Serialize>(
    out: W,
    parameters: &P,
    rows: &[R],
) -> Result<()> {
    let doc = Document {
        metadata: Metadata {
            parameters,
            version: env!("CARGO_PKG_VERSION"),
        },
        rows,
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}
