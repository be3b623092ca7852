//! CSV input and output.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use z3ro::{ChannelVector, Complex64, ComplexVec, Precoder};

#[derive(Deserialize)]
struct ChannelRow {
    index: usize,
    re: f64,
    im: f64,
}

pub fn parse_channel_csv(text: &str) -> Result<ChannelVector> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (i, row) in reader.deserialize::<ChannelRow>().enumerate() {
        let row = row.with_context(|| format!("row {}", i + 1))?;
        if row.index != i {
            bail!("row {} has index {} (expected {i})", i + 1, row.index);
        }
        values.push(Complex64::new(row.re, row.im));
    }
    Ok(ChannelVector::explicit(ComplexVec::new(values)?))
}

pub fn read_channel_csv(path: &Path) -> Result<ChannelVector> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_channel_csv(&text)
}

pub fn channel_csv(h: &ChannelVector) -> Result<String> {
    let rows = h.h.iter().enumerate().map(|(i, x)| vec![i.to_string(), x.re.to_string(), x.im.to_string()]);
    table(&["index", "re", "im"], rows)
}

pub fn precoder_csv(p: &Precoder) -> Result<String> {
    let rows = p.w.iter().enumerate().map(|(i, x)| {
        vec![
            i.to_string(),
            x.re.to_string(),
            x.im.to_string(),
            p.saturated_set.contains(&i).to_string(),
        ]
    });
    table(&["index", "re", "im", "is_saturated"], rows)
}

/// RFC-4180 table with a mandatory header row.
pub fn table<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
