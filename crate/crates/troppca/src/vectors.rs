//! CSV of ultrametric vectors: a header `m,d1_2,d1_3,…` naming the leaf
//! pairs in flat order, then one vector per row with `m` repeated in the
//! first column.

use std::io::{Read, Write};

use troppca_core::{LeafPairIndex, Ultrametric};

use crate::error::{AppError, AppResult};

pub fn header(m: usize) -> Vec<String> {
    std::iter::once("m".to_string())
        .chain(LeafPairIndex::new(m).pairs().map(|(i, j)| format!("d{}_{}", i + 1, j + 1)))
        .collect()
}

pub fn write_vectors<W: Write>(out: W, points: &[Ultrametric]) -> AppResult<()> {
    let Some(first) = points.first() else {
        return Err(AppError::Input("no vectors to write".into()));
    };
    let m = first.leaves();
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| AppError::Input(format!("CSV: {e}"));
    w.write_record(header(m)).map_err(csv_err)?;
    for u in points {
        let row = std::iter::once(m.to_string()).chain(u.coords().iter().map(|c| c.to_string()));
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| AppError::io("<csv>", e))
}

pub fn read_vectors<R: Read>(input: R) -> AppResult<Vec<Ultrametric>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let head = r.headers().map_err(|e| AppError::Input(format!("CSV header: {e}")))?.clone();
    let e = head.len().saturating_sub(1);
    let m = LeafPairIndex::from_dim(e).map_err(|_| AppError::Input(format!("CSV header has {e} pair columns, not a triangular number")))?.leaves();
    let expected = header(m);
    if head.iter().ne(expected.iter().map(String::as_str)) {
        return Err(AppError::Input(format!("CSV header must be {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| AppError::Input(format!("CSV line {line}: {e}")))?;
        let values: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| AppError::Input(format!("CSV line {line}: malformed number '{f}'"))))
            .collect::<AppResult<_>>()?;
        if values[0] != m as f64 {
            return Err(AppError::Input(format!("CSV line {line}: m = {} but the header has {m} leaves", values[0])));
        }
        let u = Ultrametric::from_coords(values[1..].to_vec())
            .map_err(|err| AppError::Input(format!("CSV line {line}: {err}")))?;
        out.push(u);
    }
    if out.is_empty() {
        return Err(AppError::Input("CSV holds no vectors".into()));
    }
    Ok(out)
}
