//! Ingestion of FASTA, FASTQ and plain-text read files.
//!
//! FASTA bodies may be line-wrapped. FASTQ quality strings are discarded.
//! Plain-text read files hold one sequence per line; `#`-prefixed comment
//! lines and blank lines are ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::seq::{Alphabet, Sequence};

/// A named sequence as read from a file.
#[derive(Debug, Clone)]
pub struct Record {
    pub id: String,
    pub seq: Sequence,
}

/// Parse a FASTA (or FASTQ) file. All characters are validated against
/// `alphabet`; lowercase is folded to uppercase. Illegal characters are
/// reported with their record and 1-based position.
pub fn parse_fasta(path: impl AsRef<Path>, alphabet: Alphabet) -> Result<Vec<Record>> {
    let text = fs::read_to_string(path)?;
    parse_fasta_str(&text, alphabet)
}

/// Parse FASTA/FASTQ content from a string. See [`parse_fasta`].
pub fn parse_fasta_str(text: &str, alphabet: Alphabet) -> Result<Vec<Record>> {
    if text.trim_start().starts_with('@') {
        return parse_fastq_str(text, alphabet);
    }
    let mut records = Vec::new();
    let mut current: Option<(String, String)> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some((id, body)) = current.take() {
                records.push(make_record(id, &body, alphabet)?);
            }
            let id = header.trim().to_string();
            if id.is_empty() {
                return Err(Error::Fasta {
                    line: lineno + 1,
                    msg: "empty FASTA header".to_string(),
                });
            }
            current = Some((id, String::new()));
        } else {
            match current.as_mut() {
                Some((_, body)) => body.push_str(line),
                None => {
                    return Err(Error::Fasta {
                        line: lineno + 1,
                        msg: "sequence data before first header".to_string(),
                    })
                }
            }
        }
    }
    if let Some((id, body)) = current {
        records.push(make_record(id, &body, alphabet)?);
    }
    Ok(records)
}

// FASTQ: strict 4-line records; the quality line is discarded.
fn parse_fastq_str(text: &str, alphabet: Alphabet) -> Result<Vec<Record>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut records = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let header = lines[i].strip_prefix('@').ok_or(Error::Fasta {
            line: i + 1,
            msg: "expected '@' FASTQ header".to_string(),
        })?;
        if i + 3 >= lines.len() {
            return Err(Error::Fasta {
                line: i + 1,
                msg: "truncated FASTQ record".to_string(),
            });
        }
        let id = header.trim().to_string();
        records.push(make_record(id, lines[i + 1].trim_end(), alphabet)?);
        if !lines[i + 2].starts_with('+') {
            return Err(Error::Fasta {
                line: i + 3,
                msg: "expected '+' separator".to_string(),
            });
        }
        i += 4;
    }
    Ok(records)
}

/// Parse a plain-text reads file: one sequence per line, `#` comments and
/// blank lines ignored. Records are named `r1`, `r2`, ... in file order.
pub fn parse_reads(path: impl AsRef<Path>, alphabet: Alphabet) -> Result<Vec<Record>> {
    let text = fs::read_to_string(path)?;
    parse_reads_str(&text, alphabet)
}

/// See [`parse_reads`].
pub fn parse_reads_str(text: &str, alphabet: Alphabet) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let id = format!("r{}", records.len() + 1);
        records.push(make_record(id, line, alphabet)?);
    }
    Ok(records)
}

/// Load sequences from a path, dispatching on content: FASTA/FASTQ when the
/// file starts with `>` or `@`, plain-text reads otherwise.
pub fn load_sequences(path: impl AsRef<Path>, alphabet: Alphabet) -> Result<Vec<Record>> {
    let text = fs::read_to_string(path)?;
    let head = text.trim_start().chars().next();
    match head {
        Some('>') | Some('@') => parse_fasta_str(&text, alphabet),
        _ => parse_reads_str(&text, alphabet),
    }
}

/// Write records as FASTA, one line per sequence body.
pub fn write_fasta<W: Write>(mut w: W, records: &[Record]) -> Result<()> {
    for r in records {
        writeln!(w, ">{}", r.id)?;
        writeln!(w, "{}", r.seq)?;
    }
    Ok(())
}

fn make_record(id: String, body: &str, alphabet: Alphabet) -> Result<Record> {
    let seq = Sequence::parse_record(body, alphabet, &id)?;
    Ok(Record { id, seq })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_record() {
        let recs = parse_fasta_str(">g1\nACGT\n", Alphabet::dna_n()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].id, "g1");
        assert_eq!(recs[0].seq.to_string(), "ACGT");
    }

    #[test]
    fn multiple_records_and_wrapping() {
        let recs = parse_fasta_str(">a\nAC\n>b\nGGT\n", Alphabet::dna_n()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].seq.len(), 2);
        assert_eq!(recs[1].seq.len(), 3);

        let recs = parse_fasta_str(">w\nACG\nTAC\nGT\n", Alphabet::dna()).unwrap();
        assert_eq!(recs[0].seq.to_string(), "ACGTACGT");
    }

    #[test]
    fn illegal_character_reports_record_and_position() {
        let err = parse_fasta_str(">x\nACXT\n", Alphabet::dna_n()).unwrap_err();
        match err {
            Error::IllegalCharacter {
                record,
                position,
                ch,
            } => {
                assert_eq!(record, "x");
                assert_eq!(position, 3);
                assert_eq!(ch, 'X');
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_body_before_header() {
        assert!(parse_fasta_str("ACGT\n>x\nAC\n", Alphabet::dna()).is_err());
        assert!(parse_fasta_str(">\nACGT\n", Alphabet::dna()).is_err());
    }

    #[test]
    fn reads_file_with_comments() {
        let recs = parse_reads_str("# two reads\nACGT\n\nGGTT\n", Alphabet::dna_n()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "r1");
        assert_eq!(recs[1].id, "r2");
        assert_eq!(recs[1].seq.to_string(), "GGTT");
    }

    #[test]
    fn fastq_qualities_discarded() {
        let recs =
            parse_fasta_str("@q1\nACGT\n+\nIIII\n@q2\nGGGG\n+\nIIII\n", Alphabet::dna_n()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id, "q1");
        assert_eq!(recs[1].seq.to_string(), "GGGG");
    }

    #[test]
    fn fasta_roundtrip() {
        let recs = parse_fasta_str(">a\nACGT\n>b\nGG\n", Alphabet::dna()).unwrap();
        let mut out = Vec::new();
        write_fasta(&mut out, &recs).unwrap();
        let again = parse_fasta_str(std::str::from_utf8(&out).unwrap(), Alphabet::dna()).unwrap();
        assert_eq!(again.len(), 2);
        assert_eq!(again[1].seq.to_string(), "GG");
    }
}
