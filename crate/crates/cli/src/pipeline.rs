//! End-to-end orchestration: load or simulate reads, build the graph with a
//! worker team, normalize, extract contigs, compute stats. Each phase fans
//! out to the configured worker count and joins before the next starts; no
//! graph mutation ever crosses a phase boundary.

use std::fs;
use std::ops::Range;
use std::path::PathBuf;
use std::thread;
use std::time::Instant;

use anyhow::Context;

use lfasm_core::contig::{find_contigs, Contig};
use lfasm_core::graph::{Graph, Worker};
use lfasm_core::normalize::{duplicates_factor, normalize_range, Factor, NormalizationParams};
use lfasm_core::sim::{simulate_genome, simulate_reads, SimulationConfig};
use lfasm_core::stats::{compute_stats, AssemblyStats};

use crate::fastx::{load_reads, partition, Read, ReadSet};
use crate::report::peak_rss_kb;

#[derive(Clone, Debug)]
pub enum Source {
    File(PathBuf),
    Simulate(SimulationConfig),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub source: Source,
    /// Estimated genome size; sizes the table by default, feeds
    /// normalization and NG50/LG50.
    pub genome_size: usize,
    pub k: usize,
    pub workers: usize,
    pub table_size: usize,
    pub min_contig: u64,
    pub normalize: bool,
    /// Write the canonical graph snapshot here after the pipeline finishes
    /// mutating it (post-normalization state).
    pub dump_graph: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimes {
    pub load_ms: u128,
    pub build_ms: u128,
    pub normalize_ms: u128,
    pub contigs_ms: u128,
    pub total_ms: u128,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub source: String,
    pub k: usize,
    pub workers: usize,
    pub table_size: usize,
    pub min_contig: u64,
    pub reads: usize,
    pub total_bases: usize,
    pub graph_nodes: usize,
    /// The duplicates factor that was applied, if normalization ran.
    pub normalization_factor: Option<f64>,
    pub stats: AssemblyStats,
    pub times: PhaseTimes,
    pub peak_rss_kb: Option<u64>,
}

fn ms(since: Instant) -> u128 {
    since.elapsed().as_millis()
}

fn describe(source: &Source) -> String {
    match source {
        Source::File(path) => path.display().to_string(),
        Source::Simulate(sim) => format!(
            "simulate(genome_size={},coverage={},read_length={},error_rate={},seed={})",
            sim.genome_size, sim.coverage, sim.read_length, sim.error_rate, sim.seed
        ),
    }
}

fn load(source: &Source) -> anyhow::Result<(ReadSet, Option<Vec<u8>>)> {
    match source {
        Source::File(path) => {
            let set = load_reads(path).context("load phase failed")?;
            Ok((set, None))
        }
        Source::Simulate(sim) => {
            let genome = simulate_genome(sim.genome_size, sim.seed);
            let reads = simulate_reads(&genome, sim)
                .into_iter()
                .enumerate()
                .map(|(i, sequence)| Read {
                    id: format!("sim_{i}"),
                    sequence,
                })
                .collect();
            Ok((ReadSet { reads }, Some(genome)))
        }
    }
}

/// Even split of the bucket space; phases that walk the table (normalize,
/// extract) give one range to each worker.
fn bucket_ranges(table_size: usize, workers: usize) -> Vec<Range<usize>> {
    let chunk = table_size.div_ceil(workers);
    (0..workers)
        .map(|i| (i * chunk).min(table_size)..((i + 1) * chunk).min(table_size))
        .collect()
}

fn build_graph<'r>(graph: &Graph<'r>, reads: &'r [Read], workers: usize) {
    let parts = partition(reads, workers);
    thread::scope(|s| {
        for part in parts {
            s.spawn(|| {
                let mut w = Worker::new(graph);
                w.make_graph(part.iter().map(|r| r.sequence.as_slice()));
            });
        }
    });
}

/// The factor normalization would use, or None when it cannot apply (no
/// reads, or reads too short to carry a single k-mer).
fn planned_factor(cfg: &PipelineConfig, set: &ReadSet) -> Option<Factor> {
    let read_length = match &cfg.source {
        Source::Simulate(sim) => sim.read_length,
        Source::File(_) => set.mean_read_length(),
    };
    if set.num_reads() == 0 || read_length < cfg.k {
        return None;
    }
    Some(duplicates_factor(&NormalizationParams {
        num_reads: set.num_reads() as u64,
        read_length: read_length as u64,
        k: cfg.k as u64,
        genome_size: cfg.genome_size as u64,
    }))
}

fn normalize_graph(graph: &Graph<'_>, factor: Factor, workers: usize) {
    thread::scope(|s| {
        for range in bucket_ranges(graph.table_size(), workers) {
            s.spawn(move || normalize_range(graph, factor, range));
        }
    });
}

/// Contigs from every bucket, merged and put into canonical order:
/// descending length, then lexicographic sequence. Two distinct walks can
/// never spell the same sequence (a contig starts with its start label), so
/// the order is total and scheduler-independent.
fn extract_contigs(graph: &Graph<'_>, workers: usize) -> Vec<Contig> {
    let mut contigs: Vec<Contig> = thread::scope(|s| {
        let handles: Vec<_> = bucket_ranges(graph.table_size(), workers)
            .into_iter()
            .map(|range| {
                s.spawn(move || {
                    let mut found = Vec::new();
                    find_contigs(graph, range, &mut found);
                    found
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    });
    contigs.sort_unstable_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.sequence.cmp(&b.sequence))
    });
    contigs
}

pub fn run_assembly(cfg: &PipelineConfig) -> anyhow::Result<(RunReport, Vec<Contig>)> {
    let start = Instant::now();
    let (set, reference) = load(&cfg.source)?;
    let load_ms = ms(start);

    let phase = Instant::now();
    let graph = Graph::new(cfg.table_size, cfg.k);
    build_graph(&graph, &set.reads, cfg.workers);
    let build_ms = ms(phase);

    let phase = Instant::now();
    let factor = if cfg.normalize {
        planned_factor(cfg, &set)
    } else {
        None
    };
    if let Some(f) = factor {
        normalize_graph(&graph, f, cfg.workers);
    }
    let normalize_ms = ms(phase);

    let phase = Instant::now();
    let contigs = extract_contigs(&graph, cfg.workers);
    let contigs_ms = ms(phase);

    if let Some(path) = &cfg.dump_graph {
        fs::write(path, graph.snapshot_canonical())
            .with_context(|| format!("cannot write graph dump to {}", path.display()))?;
    }

    let stats = compute_stats(
        &contigs,
        cfg.min_contig,
        Some(cfg.genome_size as u64),
        reference.as_deref(),
    );

    let report = RunReport {
        source: describe(&cfg.source),
        k: cfg.k,
        workers: cfg.workers,
        table_size: cfg.table_size,
        min_contig: cfg.min_contig,
        reads: set.num_reads(),
        total_bases: set.total_bases(),
        graph_nodes: graph.node_count(),
        normalization_factor: factor.map(Factor::as_f64),
        stats,
        times: PhaseTimes {
            load_ms,
            build_ms,
            normalize_ms,
            contigs_ms,
            total_ms: ms(start),
        },
        peak_rss_kb: peak_rss_kb(),
    };
    Ok((report, contigs))
}

#[derive(Clone, Copy, Debug)]
pub struct BenchRow {
    pub workers: usize,
    /// Fan-out to join of the build phase only.
    pub build_ms: u128,
    /// Build plus graph allocation and the verification snapshot hash.
    pub total_ms: u128,
    pub snapshot_hash: u64,
}

/// Build-phase thread sweep over one dataset loaded a single time. Every
/// row hashes the finished graph; identical hashes across rows are the
/// cheap proof that the sweep changed nothing but the schedule.
pub fn run_benchmark(
    cfg: &PipelineConfig,
    worker_counts: &[usize],
) -> anyhow::Result<Vec<BenchRow>> {
    anyhow::ensure!(
        !worker_counts.is_empty(),
        "benchmark needs at least one worker count"
    );
    let (set, _) = load(&cfg.source)?;
    let mut rows = Vec::with_capacity(worker_counts.len());
    for &workers in worker_counts {
        anyhow::ensure!(workers >= 1, "worker counts must be at least 1");
        let start = Instant::now();
        let graph = Graph::new(cfg.table_size, cfg.k);
        let phase = Instant::now();
        build_graph(&graph, &set.reads, workers);
        let build_ms = ms(phase);
        let snapshot_hash = graph.snapshot_hash();
        rows.push(BenchRow {
            workers,
            build_ms,
            total_ms: ms(start),
            snapshot_hash,
        });
    }
    Ok(rows)
}
