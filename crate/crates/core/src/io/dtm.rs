use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use crate::ca::ContingencyTable;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Frequency filters of the document-term builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DtmOptions {
    /// Tokens are kept when their corpus count is strictly greater.
    pub min_count: u64,
    /// Keep at most this many of the most frequent tokens.
    pub max_vocab: Option<usize>,
}

impl Default for DtmOptions {
    fn default() -> Self {
        DtmOptions { min_count: 1, max_vocab: None }
    }
}

/// Documents x tokens table from `doc_id,token,count` triples.
///
/// Tokens are matched against the stoplist verbatim; no case folding or
/// stemming is applied. Columns are ordered by decreasing corpus count, rows
/// by first appearance. Documents left without tokens are dropped.
pub fn build_dtm(token_counts: impl AsRef<Path>, stoplist: Option<&Path>, opts: DtmOptions) -> Result<ContingencyTable> {
    let stop = match stoplist {
        Some(p) => read_stoplist(File::open(p)?)?,
        None => HashSet::new(),
    };
    let path = token_counts.as_ref();
    dtm_from_reader(File::open(path)?, path, &stop, opts)
}

pub fn read_stoplist(input: impl Read) -> Result<HashSet<String>> {
    let mut stop = HashSet::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() {
            stop.insert(t.to_string());
        }
    }
    Ok(stop)
}

pub fn dtm_from_reader(input: impl Read, path: &Path, stop: &HashSet<String>, opts: DtmOptions) -> Result<ContingencyTable> {
    if opts.min_count < 1 {
        return Err(Error::invalid("min_count must be at least 1"));
    }
    if opts.max_vocab == Some(0) {
        return Err(Error::invalid("max_vocab must be positive"));
    }
    let err = |line: usize, column: usize, message: String| Error::Parse { path: PathBuf::from(path), line, column, message };
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.clone();
    let expect = ["doc_id", "token", "count"];
    if header.len() != 3 || header.iter().zip(expect).any(|(h, e)| !h.trim().eq_ignore_ascii_case(e)) {
        return Err(err(1, 1, "header must be doc_id,token,count".into()));
    }

    let mut docs: Vec<String> = Vec::new();
    let mut doc_index: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, String), f64> = HashMap::new();
    let mut corpus: HashMap<String, f64> = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let doc = record[0].trim();
        let token = record[1].trim();
        if doc.is_empty() {
            return Err(err(line, 1, "empty doc_id".into()));
        }
        if token.is_empty() {
            return Err(err(line, 2, "empty token".into()));
        }
        let count: f64 = record[2].trim().parse().map_err(|_| err(line, 3, format!("'{}' is not a count", &record[2])))?;
        if !count.is_finite() || count < 0.0 {
            return Err(err(line, 3, format!("invalid count {count}")));
        }
        let d = *doc_index.entry(doc.to_string()).or_insert_with(|| {
            docs.push(doc.to_string());
            docs.len() - 1
        });
        if stop.contains(token) {
            continue;
        }
        *cells.entry((d, token.to_string())).or_default() += count;
        *corpus.entry(token.to_string()).or_default() += count;
    }

    let mut vocab: Vec<(String, f64)> = corpus.into_iter().filter(|(_, c)| *c > opts.min_count as f64).collect();
    vocab.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if let Some(m) = opts.max_vocab {
        vocab.truncate(m);
    }
    if vocab.is_empty() {
        return Err(Error::invalid("no tokens remain after stoplist and frequency filtering"));
    }
    let col_of: HashMap<&str, usize> = vocab.iter().enumerate().map(|(j, (t, _))| (t.as_str(), j)).collect();
    let mut counts = DenseMatrix::zeros(docs.len(), vocab.len());
    let mut data = counts.as_slice().to_vec();
    for ((d, token), c) in &cells {
        if let Some(&j) = col_of.get(token.as_str()) {
            data[d * vocab.len() + j] += c;
        }
    }
    counts = DenseMatrix::new(docs.len(), vocab.len(), data)?;
    let cols = vocab.into_iter().map(|(t, _)| t).collect();
    ContingencyTable::new_drop_empty(counts, docs, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORPUS: &str = "doc_id,token,count\n\
        d1,the,5\nd1,cat,2\nd1,sat,1\n\
        d2,the,4\nd2,dog,3\nd2,cat,1\n\
        d3,the,2\nd3,dog,1\nd3,mat,1\nd3,cat,1\n";

    fn build(stop: &[&str], opts: DtmOptions) -> Result<ContingencyTable> {
        let stop = stop.iter().map(|s| s.to_string()).collect();
        dtm_from_reader(CORPUS.as_bytes(), Path::new("c.csv"), &stop, opts)
    }

    #[test]
    fn singletons_fall_below_threshold() {
        let t = build(&[], DtmOptions { min_count: 2, max_vocab: None }).unwrap();
        assert_eq!(t.col_labels(), &["the", "cat", "dog"]);
        assert_eq!(t.row_labels(), &["d1", "d2", "d3"]);
        assert_eq!(t.counts().row(1), &[4.0, 1.0, 3.0]);
        assert_eq!(t.total(), 19.0);
    }

    #[test]
    fn stoplist_and_cap() {
        let t = build(&["the"], DtmOptions { min_count: 1, max_vocab: Some(2) }).unwrap();
        assert_eq!(t.col_labels(), &["cat", "dog"]);
        let stop = read_stoplist("the\n\n  cat \n".as_bytes()).unwrap();
        assert_eq!(stop.len(), 2);
    }

    #[test]
    fn everything_stoplisted_is_an_error() {
        let e = build(&["the", "cat", "sat", "dog", "mat"], DtmOptions::default()).unwrap_err();
        assert!(e.is_validation());
        assert!(build(&[], DtmOptions { min_count: 0, max_vocab: None }).is_err());
    }

    #[test]
    fn documents_without_kept_tokens_are_dropped() {
        let t = build(&["the", "cat", "dog"], DtmOptions { min_count: 1, max_vocab: None });
        // sat and mat occur once each: nothing survives
        assert!(t.is_err());
        let src = "doc_id,token,count\na,x,3\nb,y,1\nb,x,1\n";
        let t = dtm_from_reader(src.as_bytes(), Path::new("c"), &HashSet::new(), DtmOptions::default()).unwrap();
        assert_eq!(t.row_labels(), &["a", "b"]);
        assert_eq!(t.n_cols(), 1);
    }

    #[test]
    fn malformed_count() {
        let src = "doc_id,token,count\na,x,three\n";
        match dtm_from_reader(src.as_bytes(), Path::new("c"), &HashSet::new(), DtmOptions::default()) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }
}
