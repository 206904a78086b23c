//! Dataset ingestion from headered CSV files.

use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator::{Dataset, Provenance};
use crate::scalar::Real;

/// Parses a headered numeric CSV into a dataset, taking `target_column` (by
/// header name) as the target and every other column as a feature.
///
/// Non-numeric cells are reported with their 1-based data row and column
/// name.
pub fn load_csv<S: Real>(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset<S>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
        .clone();
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::invalid(format!("target column {target_column:?} not found")))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    if feature_names.len() < 2 {
        return Err(Error::invalid("need at least two feature columns"));
    }

    let mut rows: Vec<Vec<S>> = Vec::new();
    let mut targets: Vec<S> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse { line: row_idx + 1, msg: e.to_string() })?;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line: row_idx + 1,
                msg: format!("expected {} fields, got {}", headers.len(), record.len()),
            });
        }
        let mut features = Vec::with_capacity(feature_names.len());
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: row_idx + 1,
                msg: format!("column {:?}: expected a number, got {field:?}", &headers[col]),
            })?;
            if col == target_idx {
                targets.push(S::from_f64_lossy(value));
            } else {
                features.push(S::from_f64_lossy(value));
            }
        }
        rows.push(features);
    }
    if rows.is_empty() {
        return Err(Error::invalid("no data rows"));
    }

    let d = feature_names.len();
    let m = rows.len();
    let flat: Vec<S> = rows.into_iter().flatten().collect();
    let inputs = Array2::from_shape_vec((m, d), flat).expect("shape checked per record");
    Dataset::new(inputs, Array1::from_vec(targets), Provenance::File(path.display().to_string()))
}

/// Loads a CSV, shuffles rows with the seed, and splits into
/// `(train, test)` with `round(fraction * m)` training rows.
pub fn load_csv_split<S: Real>(
    path: impl AsRef<Path>,
    target_column: &str,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset<S>, Dataset<S>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid("train fraction must be in (0, 1)"));
    }
    let full = load_csv::<S>(path, target_column)?;
    let m = full.n_samples();
    let n_train = ((train_fraction * m as f64).round() as usize).clamp(1, m.saturating_sub(1));
    if m < 2 {
        return Err(Error::invalid("need at least two rows to split"));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let train = full.subset(&order[..n_train])?;
    let test = full.subset(&order[n_train..])?;
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file
    }

    fn ten_rows() -> String {
        let mut s = String::from("a,b,y\n");
        for i in 0..10 {
            s.push_str(&format!("{},{},{}\n", i, i * 2, i * 3));
        }
        s
    }

    #[test]
    fn loads_features_and_target() {
        let file = write_csv(&ten_rows());
        let data = load_csv::<f64>(file.path(), "y").unwrap();
        assert_eq!(data.n_samples(), 10);
        assert_eq!(data.input_dim(), 2);
        assert_eq!(data.targets()[3], 9.0);
        assert_eq!(data.inputs()[[3, 1]], 6.0);
        assert!(matches!(data.provenance(), Provenance::File(_)));
    }

    #[test]
    fn split_eight_two() {
        let file = write_csv(&ten_rows());
        let (train, test) = load_csv_split::<f64>(file.path(), "y", 0.8, 0).unwrap();
        assert_eq!(train.n_samples(), 8);
        assert_eq!(test.n_samples(), 2);
    }

    #[test]
    fn split_is_seed_deterministic() {
        let file = write_csv(&ten_rows());
        let (a_train, a_test) = load_csv_split::<f64>(file.path(), "y", 0.8, 5).unwrap();
        let (b_train, b_test) = load_csv_split::<f64>(file.path(), "y", 0.8, 5).unwrap();
        assert_eq!(a_train.inputs(), b_train.inputs());
        assert_eq!(a_test.targets(), b_test.targets());
        let (c_train, _) = load_csv_split::<f64>(file.path(), "y", 0.8, 6).unwrap();
        assert_ne!(a_train.inputs(), c_train.inputs());
    }

    #[test]
    fn names_bad_cell_location() {
        let mut contents = String::from("a,b,y\n");
        for i in 0..10 {
            if i == 6 {
                contents.push_str("1,oops,3\n"); // data row 7
            } else {
                contents.push_str("1,2,3\n");
            }
        }
        let file = write_csv(&contents);
        match load_csv::<f64>(file.path(), "y") {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 7);
                assert!(msg.contains("\"b\""), "{msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_target_column_and_file() {
        let file = write_csv(&ten_rows());
        assert!(load_csv::<f64>(file.path(), "z").is_err());
        assert!(load_csv::<f64>("/nonexistent/data.csv", "y").is_err());
    }

    #[test]
    fn rejects_bad_fraction() {
        let file = write_csv(&ten_rows());
        assert!(load_csv_split::<f64>(file.path(), "y", 0.0, 0).is_err());
        assert!(load_csv_split::<f64>(file.path(), "y", 1.0, 0).is_err());
    }
}
