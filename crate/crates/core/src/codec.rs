//! Serde adapters for `nalgebra` values and CSV helpers.
//!
//! Vectors serialize as flat JSON arrays, matrices as arrays of rows.
//! Infinite box bounds serialize as `null`.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{Matrix, Vector};

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        Ok(Vector::from_vec(raw))
    }
}

pub mod vectors {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| x.as_slice()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        let raw = Vec::<Vec<f64>>::deserialize(d)?;
        Ok(raw.into_iter().map(Vector::from_vec).collect())
    }
}

pub mod matrix {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        rows_of(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Lower bounds: `null` stands for -inf.
pub mod lower {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let raw = Vec::<Option<f64>>::deserialize(d)?;
        Ok(Vector::from_iterator(
            raw.len(),
            raw.into_iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)),
        ))
    }
}

/// Upper bounds: `null` stands for +inf.
pub mod upper {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Option<f64>> = v.iter().map(|x| x.is_finite().then_some(*x)).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let raw = Vec::<Option<f64>>::deserialize(d)?;
        Ok(Vector::from_iterator(
            raw.len(),
            raw.into_iter().map(|x| x.unwrap_or(f64::INFINITY)),
        ))
    }
}

pub fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Builds a matrix from rows; an empty row list gives a 0x0 matrix.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix, String> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(format!(
            "row {i} has {} entries, expected {ncols}",
            r.len()
        ));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err("matrix entries must be finite".into());
    }
    Ok(Matrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    // adding 0.0 maps -0.0 to 0.0
    format!("{:.16e}", x + 0.0)
}

/// Reads a headerless numeric CSV into rows.
pub fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|e| {
                    format!("{}:{}:{}: {e}", path.display(), line + 1, col + 1)
                })
            })
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Writes a matrix as headerless CSV with 17 significant digits.
pub fn write_matrix_csv(path: &Path, m: &Matrix) -> std::io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|x| fmt17(*x)).collect();
        writer.write_record(&row)?;
    }
    writer.flush()
}
