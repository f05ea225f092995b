//! FASTA/FASTQ ingestion, read sanitizing, and worker partitioning.
//!
//! Everything is loaded up front and held in memory for the build's whole
//! duration; the load phase is timed separately so the cost stays visible.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path} is empty")]
    Empty { path: PathBuf },
    #[error("{path} starts with {found:?}; expected '>' (FASTA) or '@' (FASTQ)")]
    UnknownFormat { path: PathBuf, found: char },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// One sanitized read: uppercase, strictly ACGT, at least 2 bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Read {
    pub id: String,
    pub sequence: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct ReadSet {
    pub reads: Vec<Read>,
}

impl ReadSet {
    pub fn num_reads(&self) -> usize {
        self.reads.len()
    }

    pub fn total_bases(&self) -> usize {
        self.reads.iter().map(|r| r.sequence.len()).sum()
    }

    /// Mean read length rounded half up; what normalization uses when the
    /// input came from a file instead of the simulator.
    pub fn mean_read_length(&self) -> usize {
        if self.reads.is_empty() {
            return 0;
        }
        (2 * self.total_bases() + self.num_reads()) / (2 * self.num_reads())
    }
}

/// Load a FASTA or FASTQ file (detected by its first byte), uppercase the
/// sequences, split records at non-ACGT characters, and drop fragments
/// shorter than 2 bases (a fragment of one base carries no k-mer).
pub fn load_reads(path: &Path) -> Result<ReadSet, IngestError> {
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let first = match bytes.first() {
        None => {
            return Err(IngestError::Empty {
                path: path.to_path_buf(),
            })
        }
        Some(&b) => b,
    };
    match first {
        b'>' => parse_fasta(path, &bytes),
        b'@' => parse_fastq(path, &bytes),
        other => Err(IngestError::UnknownFormat {
            path: path.to_path_buf(),
            found: other as char,
        }),
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Lines with their 1-based numbers, tolerating a final line without '\n'
/// and trailing '\r' from CRLF files.
fn numbered_lines(bytes: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    bytes
        .split(|&b| b == b'\n')
        .map(|line| line.strip_suffix(b"\r").unwrap_or(line))
        .enumerate()
        .map(|(i, line)| (i + 1, line))
}

fn parse_fasta(path: &Path, bytes: &[u8]) -> Result<ReadSet, IngestError> {
    let mut set = ReadSet::default();
    let mut id: Option<String> = None;
    let mut sequence = Vec::new();
    let flush = |id: &mut Option<String>, sequence: &mut Vec<u8>, set: &mut ReadSet| {
        if let Some(id) = id.take() {
            sanitize_into(&id, sequence, set);
        }
        sequence.clear();
    };
    for (line_no, line) in numbered_lines(bytes) {
        if line.is_empty() {
            continue;
        }
        if line[0] == b'>' {
            flush(&mut id, &mut sequence, &mut set);
            id = Some(record_id(&line[1..]));
        } else if id.is_some() {
            sequence.extend_from_slice(line);
        } else {
            return Err(parse_error(
                path,
                line_no,
                "sequence before the first '>' header",
            ));
        }
    }
    flush(&mut id, &mut sequence, &mut set);
    Ok(set)
}

fn parse_fastq(path: &Path, bytes: &[u8]) -> Result<ReadSet, IngestError> {
    let mut set = ReadSet::default();
    let mut lines = numbered_lines(bytes).filter(|(_, l)| !l.is_empty());
    while let Some((header_no, header)) = lines.next() {
        if header[0] != b'@' {
            return Err(parse_error(path, header_no, "record must start with '@'"));
        }
        let (seq_no, sequence) = lines
            .next()
            .ok_or_else(|| parse_error(path, header_no, "record truncated after header"))?;
        let (plus_no, plus) = lines
            .next()
            .ok_or_else(|| parse_error(path, seq_no, "record truncated after sequence"))?;
        if plus.first() != Some(&b'+') {
            return Err(parse_error(
                path,
                plus_no,
                "separator line must start with '+'",
            ));
        }
        let (qual_no, quality) = lines
            .next()
            .ok_or_else(|| parse_error(path, plus_no, "record truncated before quality"))?;
        if quality.len() != sequence.len() {
            return Err(parse_error(
                path,
                qual_no,
                format!(
                    "quality length {} does not match sequence length {}",
                    quality.len(),
                    sequence.len()
                ),
            ));
        }
        sanitize_into(&record_id(&header[1..]), sequence, &mut set);
    }
    Ok(set)
}

/// First whitespace-delimited word of the header.
fn record_id(header: &[u8]) -> String {
    let end = header
        .iter()
        .position(|b| b.is_ascii_whitespace())
        .unwrap_or(header.len());
    String::from_utf8_lossy(&header[..end]).into_owned()
}

/// Uppercase and split one raw record at non-ACGT runs. A clean record
/// keeps its id; fragments of a split record get "/1", "/2", ... suffixes.
/// Fragments shorter than 2 bases are dropped.
fn sanitize_into(id: &str, raw: &[u8], set: &mut ReadSet) {
    let upper: Vec<u8> = raw.iter().map(|b| b.to_ascii_uppercase()).collect();
    let clean = upper
        .iter()
        .all(|&b| matches!(b, b'A' | b'C' | b'G' | b'T'));
    if clean {
        if upper.len() >= 2 {
            set.reads.push(Read {
                id: id.to_string(),
                sequence: upper,
            });
        }
        return;
    }
    let mut fragment = 0;
    for piece in upper.split(|&b| !matches!(b, b'A' | b'C' | b'G' | b'T')) {
        if piece.len() < 2 {
            continue;
        }
        fragment += 1;
        set.reads.push(Read {
            id: format!("{id}/{fragment}"),
            sequence: piece.to_vec(),
        });
    }
}

/// Split the reads into `workers` contiguous slices balanced by base count:
/// each cut aims at ceil(remaining bases / remaining slices). Slices are
/// disjoint, cover everything, and may be empty when reads run out.
pub fn partition(reads: &[Read], workers: usize) -> Vec<&[Read]> {
    assert!(workers >= 1);
    let mut parts = Vec::with_capacity(workers);
    let mut rest = reads;
    let mut remaining_bases: usize = reads.iter().map(|r| r.sequence.len()).sum();
    for slot in (1..=workers).rev() {
        if slot == 1 {
            parts.push(rest);
            break;
        }
        let target = remaining_bases.div_ceil(slot);
        let mut taken = 0;
        let mut cut = 0;
        while cut < rest.len() && taken < target {
            taken += rest[cut].sequence.len();
            cut += 1;
        }
        let (head, tail) = rest.split_at(cut);
        parts.push(head);
        rest = tail;
        remaining_bases -= taken;
    }
    parts
}

/// Plain FASTA with sequences wrapped at 70 columns.
pub fn write_fasta<W: Write>(
    out: &mut W,
    records: impl Iterator<Item = (String, Vec<u8>)>,
) -> io::Result<()> {
    for (header, sequence) in records {
        writeln!(out, ">{header}")?;
        for chunk in sequence.chunks(70) {
            out.write_all(chunk)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
