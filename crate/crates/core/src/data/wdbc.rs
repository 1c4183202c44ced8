use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::{Dataset, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};

/// Feature columns of the Wisconsin Diagnostic Breast Cancer file, in file order.
pub const WDBC_FEATURES: [&str; 30] = [
    "radius_mean",
    "texture_mean",
    "perimeter_mean",
    "area_mean",
    "smoothness_mean",
    "compactness_mean",
    "concavity_mean",
    "concave_points_mean",
    "symmetry_mean",
    "fractal_dimension_mean",
    "radius_se",
    "texture_se",
    "perimeter_se",
    "area_se",
    "smoothness_se",
    "compactness_se",
    "concavity_se",
    "concave_points_se",
    "symmetry_se",
    "fractal_dimension_se",
    "radius_worst",
    "texture_worst",
    "perimeter_worst",
    "area_worst",
    "smoothness_worst",
    "compactness_worst",
    "concavity_worst",
    "concave_points_worst",
    "symmetry_worst",
    "fractal_dimension_worst",
];

const FIELDS: usize = 2 + WDBC_FEATURES.len();

/// Reads a headerless WDBC CSV: `id,diagnosis,f1,…,f30`, diagnosis `M` → +1,
/// `B` → −1. Row order is preserved.
pub fn load_wdbc(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_wdbc(&text, path)
}

/// Parses WDBC text. `origin` is only used in error messages.
pub fn parse_wdbc(text: &str, origin: impl AsRef<Path>) -> Result<Dataset> {
    let origin = origin.as_ref();
    let err = |row: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        row,
        message,
    };

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != FIELDS {
            return Err(err(
                row,
                format!("expected {FIELDS} fields, found {}", fields.len()),
            ));
        }
        let id = fields[0]
            .parse::<u64>()
            .map_err(|_| err(row, format!("invalid id {:?}", fields[0])))?;
        let label = match fields[1] {
            "M" => POSITIVE,
            "B" => NEGATIVE,
            other => return Err(err(row, format!("diagnosis {other:?} is not M or B"))),
        };
        for (col, field) in fields[2..].iter().enumerate() {
            let v = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    err(
                        row,
                        format!("feature {} is not a number: {field:?}", WDBC_FEATURES[col]),
                    )
                })?;
            values.push(v);
        }
        ids.push(id);
        labels.push(label);
    }

    let features = Array2::from_shape_vec((labels.len(), WDBC_FEATURES.len()), values)
        .expect("row width checked above");
    let names = WDBC_FEATURES.iter().map(|s| s.to_string()).collect();
    Dataset::with_metadata(features, labels, names, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIRST_ROW: &str = "842302,M,17.99,10.38,122.8,1001,0.1184,0.2776,0.3001,0.1471,0.2419,0.07871,1.095,0.9053,8.589,153.4,0.006399,0.04904,0.05373,0.01587,0.03003,0.006193,25.38,17.33,184.6,2019,0.1622,0.6656,0.7119,0.2654,0.4601,0.1189";

    #[test]
    fn parses_malignant_row() {
        let ds = parse_wdbc(FIRST_ROW, "inline").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.num_features(), 30);
        assert_eq!(ds.labels(), &[1]);
        assert_eq!(ds.source_ids(), &[842302]);
        assert_eq!(ds.features()[[0, 0]], 17.99);
    }

    #[test]
    fn benign_is_negative() {
        let row = FIRST_ROW.replacen(",M,", ",B,", 1);
        let ds = parse_wdbc(&row, "inline").unwrap();
        assert_eq!(ds.labels(), &[-1]);
    }

    #[test]
    fn wrong_field_count_names_the_row() {
        let short = FIRST_ROW.rsplit_once(',').unwrap().0;
        let text = format!("{FIRST_ROW}\n{short}\n");
        match parse_wdbc(&text, "inline") {
            Err(Error::Parse { row, message, .. }) => {
                assert_eq!(row, 2);
                assert!(message.contains("31"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_diagnosis_and_feature() {
        let row = FIRST_ROW.replacen(",M,", ",X,", 1);
        assert!(matches!(
            parse_wdbc(&row, "inline"),
            Err(Error::Parse { row: 1, .. })
        ));
        let row = FIRST_ROW.replacen("17.99", "abc", 1);
        let e = parse_wdbc(&row, "inline").unwrap_err().to_string();
        assert!(e.contains("row 1") && e.contains("radius_mean"), "{e}");
    }

    #[test]
    fn missing_file_is_io_error() {
        let e = load_wdbc("/nonexistent/wdbc.csv").unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
        assert!(e.to_string().contains("/nonexistent/wdbc.csv"));
    }
}
