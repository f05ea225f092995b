//! Rendering run results: a human table for the terminal, line-oriented
//! `key=value` text for machines, and best-effort peak memory.

use std::fmt::Write as _;
use std::fs;

use crate::pipeline::{BenchRow, RunReport};

/// Peak resident set size of this process in kB, read from the kernel's
/// process status (VmHWM). None where the platform doesn't expose it.
pub fn peak_rss_kb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find(|line| line.starts_with("VmHWM:"))
        .and_then(|line| line.split_whitespace().nth(1))
        .and_then(|value| value.parse().ok())
}

fn fmt_opt(value: Option<u64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn render_human(r: &RunReport) -> String {
    let mut out = String::new();
    let s = &r.stats;
    let _ = writeln!(out, "input      {}", r.source);
    let _ = writeln!(
        out,
        "config     k={} workers={} table_size={} min_contig={} normalize={}",
        r.k,
        r.workers,
        r.table_size,
        r.min_contig,
        match r.normalization_factor {
            Some(f) => format!("on (factor {f})"),
            None => "off".to_string(),
        }
    );
    let _ = writeln!(out, "reads      {} ({} bases)", r.reads, r.total_bases);
    let _ = writeln!(out, "graph      {} vertices", r.graph_nodes);
    let _ = writeln!(
        out,
        "contigs    {} kept (longest {}, total {})",
        s.contig_count, s.longest, s.total_length
    );
    let _ = writeln!(
        out,
        "stats      N50={} L50={} NG50={} LG50={}",
        s.n50,
        s.l50,
        fmt_opt(s.ng50),
        fmt_opt(s.lg50)
    );
    if let Some(fraction) = s.genome_fraction {
        let _ = writeln!(
            out,
            "reference  genome_fraction={:.4}% misassembled={}",
            fraction,
            fmt_opt(s.misassembled)
        );
    }
    let t = &r.times;
    let _ = writeln!(
        out,
        "times(ms)  load={} build={} normalize={} contigs={} total={}",
        t.load_ms, t.build_ms, t.normalize_ms, t.contigs_ms, t.total_ms
    );
    if let Some(kb) = r.peak_rss_kb {
        let _ = writeln!(out, "memory     peak_rss={kb} kB");
    }
    out
}

pub fn render_kv(r: &RunReport) -> String {
    let mut out = String::new();
    let s = &r.stats;
    let t = &r.times;
    let _ = writeln!(out, "source={}", r.source);
    let _ = writeln!(out, "k={}", r.k);
    let _ = writeln!(out, "workers={}", r.workers);
    let _ = writeln!(out, "table_size={}", r.table_size);
    let _ = writeln!(out, "min_contig={}", r.min_contig);
    let _ = writeln!(
        out,
        "normalize={}",
        u8::from(r.normalization_factor.is_some())
    );
    if let Some(f) = r.normalization_factor {
        let _ = writeln!(out, "normalization_factor={f}");
    }
    let _ = writeln!(out, "reads={}", r.reads);
    let _ = writeln!(out, "total_bases={}", r.total_bases);
    let _ = writeln!(out, "graph_nodes={}", r.graph_nodes);
    let _ = writeln!(out, "contigs={}", s.contig_count);
    let _ = writeln!(out, "longest={}", s.longest);
    let _ = writeln!(out, "total_length={}", s.total_length);
    let _ = writeln!(out, "n50={}", s.n50);
    let _ = writeln!(out, "l50={}", s.l50);
    if let Some(v) = s.ng50 {
        let _ = writeln!(out, "ng50={v}");
    }
    if let Some(v) = s.lg50 {
        let _ = writeln!(out, "lg50={v}");
    }
    if let Some(v) = s.genome_fraction {
        let _ = writeln!(out, "genome_fraction={v:.4}");
    }
    if let Some(v) = s.misassembled {
        let _ = writeln!(out, "misassembled={v}");
    }
    let _ = writeln!(out, "load_ms={}", t.load_ms);
    let _ = writeln!(out, "build_ms={}", t.build_ms);
    let _ = writeln!(out, "normalize_ms={}", t.normalize_ms);
    let _ = writeln!(out, "contigs_ms={}", t.contigs_ms);
    let _ = writeln!(out, "total_ms={}", t.total_ms);
    if let Some(kb) = r.peak_rss_kb {
        let _ = writeln!(out, "peak_rss_kb={kb}");
    }
    out
}

/// One line per sweep row, machine-readable.
pub fn render_bench(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let _ = writeln!(
            out,
            "workers={} build_ms={} total_ms={} snapshot_hash={:#018x}",
            row.workers, row.build_ms, row.total_ms, row.snapshot_hash
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::PhaseTimes;
    use lfasm_core::stats::AssemblyStats;

    fn sample() -> RunReport {
        RunReport {
            source: "simulate(genome_size=3000,...)".into(),
            k: 21,
            workers: 4,
            table_size: 3000,
            min_contig: 500,
            reads: 600,
            total_bases: 60_000,
            graph_nodes: 2980,
            normalization_factor: Some(16.0),
            stats: AssemblyStats {
                contig_count: 1,
                longest: 3000,
                total_length: 3000,
                n50: 3000,
                l50: 1,
                ng50: Some(3000),
                lg50: Some(1),
                genome_fraction: Some(100.0),
                misassembled: Some(0),
            },
            times: PhaseTimes {
                load_ms: 1,
                build_ms: 20,
                normalize_ms: 2,
                contigs_ms: 3,
                total_ms: 27,
            },
            peak_rss_kb: Some(10_240),
        }
    }

    #[test]
    fn kv_lines_are_single_assignments() {
        let kv = render_kv(&sample());
        for line in kv.lines() {
            // key is everything before the first '='; values may contain '='
            let (key, _) = line.split_once('=').expect("every line assigns");
            assert!(
                key.chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'),
                "bad kv key in: {line}"
            );
        }
        assert!(kv.contains("n50=3000\n"));
        assert!(kv.contains("genome_fraction=100.0000\n"));
        assert!(kv.contains("normalize=1\n"));
        assert!(kv.contains("peak_rss_kb=10240\n"));
    }

    #[test]
    fn kv_omits_absent_reference_metrics() {
        let mut r = sample();
        r.stats.genome_fraction = None;
        r.stats.misassembled = None;
        r.normalization_factor = None;
        let kv = render_kv(&r);
        assert!(!kv.contains("genome_fraction"));
        assert!(!kv.contains("misassembled"));
        assert!(kv.contains("normalize=0\n"));
    }

    #[test]
    fn human_report_mentions_the_headline_numbers() {
        let text = render_human(&sample());
        assert!(text.contains("N50=3000"));
        assert!(text.contains("genome_fraction=100.0000%"));
        assert!(text.contains("600 (60000 bases)"));
    }

    #[test]
    fn bench_rows_render_one_line_each() {
        let rows = vec![
            BenchRow {
                workers: 1,
                build_ms: 100,
                total_ms: 120,
                snapshot_hash: 0xabc,
            },
            BenchRow {
                workers: 8,
                build_ms: 25,
                total_ms: 45,
                snapshot_hash: 0xabc,
            },
        ];
        let text = render_bench(&rows);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("workers=1 build_ms=100"));
        assert!(text.contains("snapshot_hash=0x0000000000000abc"));
    }

    #[test]
    fn peak_rss_reads_the_kernel_counter() {
        // the test process certainly has a highwater mark on Linux
        if let Some(kb) = peak_rss_kb() {
            assert!(kb > 0);
        }
    }
}
