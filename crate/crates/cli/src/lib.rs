//! IO, orchestration, and reporting around the core assembly library:
//! FASTA/FASTQ ingestion, the phase pipeline, and result rendering. The
//! binary in `main.rs` is a thin argument layer over these modules.

pub mod fastx;
pub mod pipeline;
pub mod report;
