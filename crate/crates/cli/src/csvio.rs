//! Point files: one point per row, comma-separated coordinates.

use std::path::Path;

use wganlab_core::Matrix;

use crate::error::{CliError, Result};

/// Reads a point cloud. A first row that does not parse as numbers is taken
/// as a header; every later row must be numeric with the same arity.
pub fn read_points(path: &Path) -> Result<Matrix> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(format!("cannot open {}", path.display()), e))?;
    parse_points(file).map_err(|msg| CliError::Input(format!("{}: {msg}", path.display())))
}

pub fn parse_points<R: std::io::Read>(input: R) -> std::result::Result<Matrix, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("row {}: {e}", i + 1))?;
        let row_no = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(format!("row {row_no}: cannot parse {:?} as numbers", record.iter().collect::<Vec<_>>())),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("row {row_no}: non-finite coordinate"));
        }
        if let Some(first) = rows.first() {
            if first.len() != values.len() {
                return Err(format!("row {row_no}: expected {} columns, found {}", first.len(), values.len()));
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err("no points".into());
    }
    Matrix::from_rows(&rows).map_err(|e| e.to_string())
}

/// `x,y` header followed by one row per point.
pub fn points_to_csv(points: &Matrix) -> String {
    let mut out = String::from("x,y\n");
    for row in points.row_iter() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_optional() {
        let a = parse_points("x,y\n1,2\n3,4\n".as_bytes()).unwrap();
        let b = parse_points("1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shape(), (2, 2));
    }

    #[test]
    fn malformed_row_is_located() {
        let err = parse_points("x\n0\n1\nabc\n".as_bytes()).unwrap_err();
        assert!(err.starts_with("row 4"), "{err}");
        let err = parse_points("1,2\n3\n".as_bytes()).unwrap_err();
        assert!(err.starts_with("row 2"), "{err}");
        assert!(parse_points("".as_bytes()).is_err());
        assert!(parse_points("1,NaN\n".as_bytes()).is_err());
    }

    #[test]
    fn written_points_read_back_exactly() {
        let m = Matrix::from_rows(&[[0.1, -1e-300], [1.0 / 3.0, 2.5e10]]).unwrap();
        assert_eq!(parse_points(points_to_csv(&m).as_bytes()).unwrap(), m);
    }
}
