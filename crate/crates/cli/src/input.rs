//! Reading numeric columns from CSV files.

use std::path::Path;

/// Reads the last column of a CSV file as numbers. Handles `date,price`
/// files and single-column samples; a first row that does not parse is
/// taken as a header. Lines starting with `#` are skipped.
pub fn read_values(path: &Path) -> Result<Vec<f64>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let Some(field) = record.iter().next_back().filter(|f| !f.is_empty()) else {
            continue;
        };
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => return Err(format!("{}: row {}: non-finite value {v}", path.display(), i + 1)),
            Err(_) if i == 0 => {}
            Err(_) => return Err(format!("{}: row {}: '{field}' is not a number", path.display(), i + 1)),
        }
    }
    if values.is_empty() {
        return Err(format!("{}: no numeric values", path.display()));
    }
    Ok(values)
}
