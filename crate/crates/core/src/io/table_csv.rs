use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::ca::ContingencyTable;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Reads a labelled contingency table.
///
/// The header row holds the column labels after an empty (or `id`) corner
/// cell; each following row is a row label and its counts. Empty rows and
/// columns are rejected unless `drop_empty` is set.
pub fn read_contingency_csv(path: impl AsRef<Path>, drop_empty: bool) -> Result<ContingencyTable> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_contingency_csv(file, path, drop_empty)
}

/// Parses from any reader; `path` only labels error messages.
pub fn parse_contingency_csv(input: impl Read, path: &Path, drop_empty: bool) -> Result<ContingencyTable> {
    let err = |line: usize, column: usize, message: String| Error::Parse { path: PathBuf::from(path), line, column, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r?,
        None => return Err(err(1, 1, "empty file".into())),
    };
    let corner = header.get(0).unwrap_or("").trim();
    if !(corner.is_empty() || corner.eq_ignore_ascii_case("id")) {
        return Err(err(1, 1, format!("corner cell must be empty or 'id', found '{corner}'")));
    }
    let col_labels: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    if col_labels.is_empty() {
        return Err(err(1, 2, "no column labels".into()));
    }
    if let Some(j) = first_duplicate(&col_labels) {
        return Err(err(1, j + 2, format!("duplicate column label '{}'", col_labels[j])));
    }

    let width = col_labels.len() + 1;
    let mut row_labels = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        if record.len() != width {
            return Err(err(line, record.len().min(width) + 1, format!("expected {width} fields, found {}", record.len())));
        }
        let label = record.get(0).unwrap_or("").trim().to_string();
        if label.is_empty() {
            return Err(err(line, 1, "empty row label".into()));
        }
        if row_labels.contains(&label) {
            return Err(err(line, 1, format!("duplicate row label '{label}'")));
        }
        for (j, cell) in record.iter().enumerate().skip(1) {
            let cell = cell.trim();
            let x: f64 = cell.parse().map_err(|_| err(line, j + 1, format!("'{cell}' is not a number")))?;
            if !x.is_finite() {
                return Err(err(line, j + 1, format!("'{cell}' is not finite")));
            }
            if x < 0.0 {
                return Err(err(line, j + 1, format!("negative count {cell}")));
            }
            values.push(x);
        }
        row_labels.push(label);
    }
    if row_labels.is_empty() {
        return Err(err(2, 1, "no data rows".into()));
    }
    let counts = DenseMatrix::new(row_labels.len(), col_labels.len(), values)?;
    if drop_empty {
        ContingencyTable::new_drop_empty(counts, row_labels, col_labels)
    } else {
        ContingencyTable::new(counts, row_labels, col_labels)
    }
}

fn first_duplicate(labels: &[String]) -> Option<usize> {
    let mut seen = std::collections::HashSet::new();
    labels.iter().position(|l| !seen.insert(l.as_str()))
}

/// Writes a table in the format read by [`read_contingency_csv`]. Counts use
/// the shortest representation that parses back to the same value.
pub fn write_contingency_csv(path: impl AsRef<Path>, t: &ContingencyTable) -> Result<()> {
    let file = File::create(path)?;
    format_contingency_csv(file, t)
}

pub fn format_contingency_csv(out: impl Write, t: &ContingencyTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(t.col_labels().iter().cloned());
    w.write_record(&header)?;
    for (i, label) in t.row_labels().iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(t.counts().row(i).iter().map(|x| x.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn parse(s: &str, drop: bool) -> Result<ContingencyTable> {
        parse_contingency_csv(s.as_bytes(), Path::new("t.csv"), drop)
    }

    fn position(e: Error) -> (usize, usize) {
        match e {
            Error::Parse { line, column, .. } => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn well_formed() {
        let t = parse(",a,b\nx,1,2\ny,3,4\n", false).unwrap();
        assert_eq!(t.total(), 10.0);
        assert_eq!(t.col_labels(), &["a".to_string(), "b".to_string()]);
        let t = parse("id,a,b\nx,1.5,2\ny,3,0\n", false).unwrap();
        assert_eq!(t.counts()[(0, 0)], 1.5);
    }

    #[test]
    fn error_positions() {
        assert_eq!(position(parse(",a,b\nx,1,2\ny,3\n", false).unwrap_err()), (3, 3));
        assert_eq!(position(parse(",a,b\nx,1,oops\n", false).unwrap_err()), (2, 3));
        assert_eq!(position(parse(",a,b\nx,1,-2\n", false).unwrap_err()), (2, 3));
        assert_eq!(position(parse(",a,a\nx,1,2\n", false).unwrap_err()), (1, 3));
        assert_eq!(position(parse(",a,b\nx,1,2\nx,1,2\n", false).unwrap_err()), (3, 1));
        assert_eq!(position(parse("foo,a\nx,1\n", false).unwrap_err()), (1, 1));
    }

    #[test]
    fn zero_column_is_named_unless_dropped() {
        let src = ",a,empty,c\nx,1,0,2\ny,3,0,4\n";
        let e = parse(src, false).unwrap_err();
        assert!(e.to_string().contains("empty"), "{e}");
        let t = parse(src, true).unwrap();
        assert_eq!(t.n_cols(), 2);
    }

    #[test]
    fn round_trip_is_exact_and_byte_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let (i, j) = (rng.gen_range(1..8), rng.gen_range(1..8));
            let m = DenseMatrix::from_fn(i, j, |_, _| rng.gen_range(0.001..1e6));
            let rows = (0..i).map(|k| format!("row {k}")).collect();
            let cols = (0..j).map(|k| format!("col,{k}")).collect();
            let t = ContingencyTable::new(m, rows, cols).unwrap();
            let mut first = Vec::new();
            format_contingency_csv(&mut first, &t).unwrap();
            let back = parse_contingency_csv(first.as_slice(), Path::new("x"), false).unwrap();
            assert_eq!(back, t);
            let mut second = Vec::new();
            format_contingency_csv(&mut second, &back).unwrap();
            assert_eq!(first, second);
            assert!(!first.contains(&b'\r'));
        }
    }
}
