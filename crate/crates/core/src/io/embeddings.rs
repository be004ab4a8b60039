//! Embedding CSV: header `scan_id,source_id,label,f_0,...,f_{d-1}`, labels
//! `covid` / `non_covid`, `.` as decimal point.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{Class, EmbeddingSet};

const FIXED_COLUMNS: [&str; 3] = ["scan_id", "source_id", "label"];

pub fn load_embeddings(path: &Path) -> Result<EmbeddingSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embeddings(file)
}

pub fn read_embeddings<R: Read>(reader: R) -> Result<EmbeddingSet> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();

    let header = match records.next() {
        Some(r) => r?,
        None => {
            return Err(Error::BadHeader {
                line: 1,
                reason: "file is empty".into(),
            })
        }
    };
    let dim = check_header(&header)?;
    let width = FIXED_COLUMNS.len() + dim;

    let mut ids = Vec::new();
    let mut sources = Vec::new();
    let mut labels = Vec::new();
    let mut vectors = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        ids.push(record[0].to_string());
        let source = record[1].trim();
        sources.push(source.parse::<u32>().map_err(|_| Error::NonNumeric {
            line,
            column: "source_id".into(),
            token: source.to_string(),
        })?);
        let label = record[2].trim();
        labels.push(label.parse::<Class>().map_err(|_| Error::UnknownLabel {
            line,
            token: label.to_string(),
        })?);
        let vector = (0..dim)
            .map(|k| {
                let token = record[3 + k].trim();
                token
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::NonNumeric {
                        line,
                        column: format!("f_{k}"),
                        token: token.to_string(),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        vectors.push(vector);
    }
    EmbeddingSet::with_scan_ids(vectors, labels, sources, ids)
}

fn check_header(header: &csv::StringRecord) -> Result<usize> {
    let bad = |reason: String| Error::BadHeader { line: 1, reason };
    if header.len() <= FIXED_COLUMNS.len() {
        return Err(bad(format!(
            "expected scan_id,source_id,label,f_0,... but found {} columns",
            header.len()
        )));
    }
    for (i, name) in FIXED_COLUMNS.iter().enumerate() {
        if &header[i] != *name {
            return Err(bad(format!(
                "column {} must be {name:?}, found {:?}",
                i + 1,
                &header[i]
            )));
        }
    }
    for (k, name) in header.iter().skip(FIXED_COLUMNS.len()).enumerate() {
        if name != format!("f_{k}") {
            return Err(bad(format!(
                "feature column {k} must be \"f_{k}\", found {name:?}"
            )));
        }
    }
    Ok(header.len() - FIXED_COLUMNS.len())
}

/// Writes `set` in the same format; floats use the shortest text that
/// parses back to the identical value.
pub fn write_embeddings<W: Write>(set: &EmbeddingSet, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend((0..set.dim()).map(|k| format!("f_{k}")));
    csv.write_record(&header)?;
    for i in 0..set.len() {
        let mut row = vec![
            set.scan_ids()[i].clone(),
            set.sources()[i].to_string(),
            set.labels()[i].to_string(),
        ];
        row.extend(set.vectors()[i].iter().map(|v| format!("{v:?}")));
        csv.write_record(&row)?;
    }
    csv.flush().map_err(|e| Error::io("<embeddings>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "scan_id,source_id,label,f_0,f_1,f_2\n\
        a,0,covid,1.0,2.0,3.0\n\
        b,0,non_covid,-1,0.5,1e-3\n\
        c,1,covid,0,0,0\n\
        d,1,non_covid,4,5,6\n";

    #[test]
    fn parses_well_formed() {
        let set = read_embeddings(GOOD.as_bytes()).unwrap();
        assert_eq!((set.len(), set.dim()), (4, 3));
        assert_eq!(set.vectors()[1], vec![-1.0, 0.5, 1e-3]);
        assert_eq!(set.labels()[1], Class::NonCovid);
        assert_eq!(set.sources()[3], 1);
        assert_eq!(set.scan_ids()[2], "c");
    }

    #[test]
    fn ragged_row_reports_line() {
        let text = "scan_id,source_id,label,f_0,f_1\na,0,covid,1,2\nb,0,covid,1\n";
        match read_embeddings(text.as_bytes()) {
            Err(Error::RaggedRow {
                line,
                expected,
                found,
            }) => {
                assert_eq!((line, expected, found), (3, 5, 4))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_tokens_report_line() {
        let text = "scan_id,source_id,label,f_0\na,0,covid,1\nb,0,sick,1\n";
        assert!(matches!(
            read_embeddings(text.as_bytes()),
            Err(Error::UnknownLabel { line: 3, .. })
        ));
        let text = "scan_id,source_id,label,f_0\na,0,covid,x\n";
        assert!(matches!(
            read_embeddings(text.as_bytes()),
            Err(Error::NonNumeric { line: 2, .. })
        ));
        let text = "scan_id,source_id,label,f_0\na,0,covid,NaN\n";
        assert!(matches!(
            read_embeddings(text.as_bytes()),
            Err(Error::NonNumeric { .. })
        ));
        let text = "scan_id,source,label,f_0\n";
        assert!(matches!(
            read_embeddings(text.as_bytes()),
            Err(Error::BadHeader { .. })
        ));
        let text = "scan_id,source_id,label,f_1\n";
        assert!(matches!(
            read_embeddings(text.as_bytes()),
            Err(Error::BadHeader { .. })
        ));
    }

    #[test]
    fn write_then_read_is_exact() {
        let set = read_embeddings(GOOD.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_embeddings(&set, &mut buf).unwrap();
        assert_eq!(read_embeddings(buf.as_slice()).unwrap(), set);
    }
}
