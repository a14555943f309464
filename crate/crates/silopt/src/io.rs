//! CSV ingestion and emission. CSV is the single interchange format;
//! floats are written with 17 significant digits so results replay exactly.

use crate::core::{Dataset, DissimilarityMatrix, Partition};
use crate::error::{Error, Result};
use std::path::Path;

/// Format a float with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Malformed {
        line,
        msg: format!("not a number: {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Malformed {
            line,
            msg: format!("non-finite value: {field:?}"),
        });
    }
    Ok(v)
}

/// Read a coordinate dataset: header line, then one row of numbers per
/// object.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut points = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row: Result<Vec<f64>> = record
            .iter()
            .map(|f| parse_f64(f, i + 2))
            .collect();
        points.push(row?);
    }
    Dataset::new(points, None)
}

/// Read a full square dissimilarity matrix with a leading id column.
pub fn read_dissimilarity(path: &Path) -> Result<DissimilarityMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let mut fields = record.iter();
        fields.next(); // id column
        let row: Result<Vec<f64>> = fields.map(|f| parse_f64(f, i + 2)).collect();
        rows.push(row?);
    }
    DissimilarityMatrix::from_rows(rows)
}

/// Read an `id,label` table into a canonical partition. Rows are sorted by
/// id before canonicalization.
pub fn read_labels(path: &Path) -> Result<Partition> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut rows: Vec<(u64, i64)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let id: u64 = record
            .get(0)
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Malformed {
                line: i + 2,
                msg: "bad id".into(),
            })?;
        let label: i64 = record
            .get(1)
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::Malformed {
                line: i + 2,
                msg: "bad label".into(),
            })?;
        rows.push((id, label));
    }
    rows.sort_by_key(|&(id, _)| id);
    let labels: Vec<i64> = rows.iter().map(|&(_, l)| l).collect();
    Partition::from_labels(&labels)
}

/// Write a partition as an `id,label` table with 1-based ids and labels.
pub fn write_partition(path: &Path, c: &Partition) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "label"])?;
    for (i, l) in c.labels_one_based().iter().enumerate() {
        w.write_record([(i + 1).to_string(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One per-replication result row of the simulation harness.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub method: String,
    pub k: usize,
    pub rep: usize,
    pub asw: f64,
    pub ari: f64,
    pub seconds: f64,
    pub converged: bool,
}

/// Write per-replication rows: `method,k,rep,asw,ari,seconds,converged`.
pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", "k", "rep", "asw", "ari", "seconds", "converged"])?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.k.to_string(),
            r.rep.to_string(),
            fmt_float(r.asw),
            fmt_float(r.ari),
            fmt_float(r.seconds),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write a dataset (header x1..xp) for external use.
pub fn write_dataset(path: &Path, x: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let header: Vec<String> = (1..=x.p()).map(|j| format!("x{j}")).collect();
    w.write_record(&header)?;
    for row in x.points() {
        let fields: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a dissimilarity matrix with a leading id column.
pub fn write_dissimilarity(path: &Path, d: &DissimilarityMatrix) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["id".to_string()];
    header.extend((1..=d.n()).map(|j| format!("o{j}")));
    w.write_record(&header)?;
    for i in 0..d.n() {
        let mut fields = vec![(i + 1).to_string()];
        fields.extend(d.row(i).iter().map(|&v| fmt_float(v)));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn partition_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("part.csv");
        let c = Partition::from_labels(&[2, 2, 1, 3]).unwrap();
        write_partition(&path, &c).unwrap();
        let back = read_labels(&path).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn dissimilarity_round_trip_and_validation() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "id,o1,o2\n1,0,1.5\n2,1.5,0\n").unwrap();
        let d = read_dissimilarity(&path).unwrap();
        assert_eq!(d.get(0, 1), 1.5);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "id,o1,o2\n1,0,1\n2,2,0\n").unwrap();
        let err = read_dissimilarity(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("asymmetric"), "{msg}");
        assert!(msg.contains("(0, 1)"), "{msg}");
    }

    #[test]
    fn dataset_shape() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let mut body = String::from("x1,x2\n");
        for i in 0..100 {
            body.push_str(&format!("{}.0,{}.5\n", i, i));
        }
        std::fs::write(&path, body).unwrap();
        let x = read_dataset(&path).unwrap();
        assert_eq!(x.n(), 100);
        assert_eq!(x.p(), 2);
    }

    #[test]
    fn nan_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "x1\nNaN\n").unwrap();
        assert!(read_dataset(&path).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -1.2345678901234567e-8] {
            let s = fmt_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
        }
    }
}
