use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::thread;

use anyhow::{bail, Context};
use clap::Parser;

use lfasm::fastx::write_fasta;
use lfasm::pipeline::{run_assembly, run_benchmark, PipelineConfig, Source};
use lfasm::report::{render_bench, render_human, render_kv};
use lfasm_core::sim::SimulationConfig;

/// Concurrent genome assembler built on a lock-free weighted de Bruijn graph.
#[derive(Parser, Debug)]
#[command(name = "lfasm", version, about)]
struct Args {
    /// Reads to assemble, FASTA or FASTQ (detected by the first byte)
    #[arg(long, value_name = "PATH", conflicts_with = "simulate")]
    input: Option<PathBuf>,

    /// Generate the input instead: a random genome plus reads from it
    #[arg(long)]
    simulate: bool,

    /// Estimated genome size in bases; sizes the hash table and feeds
    /// normalization and NG50 (required with --input; simulation default
    /// 50000)
    #[arg(long, value_name = "N")]
    genome_size: Option<usize>,

    /// k-mer length; graph vertices are (k-1)-mers
    #[arg(long, default_value_t = 51)]
    k: usize,

    /// Worker threads per phase [default: 4 x available cores]
    #[arg(long, value_name = "INT")]
    threads: Option<usize>,

    /// Hash table buckets [default: genome size]
    #[arg(long, value_name = "INT")]
    table_size: Option<usize>,

    /// Write assembled contigs here as FASTA
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Drop contigs shorter than this from the stats
    #[arg(long, default_value_t = 500, value_name = "INT")]
    min_contig: u64,

    /// Skip weight normalization (keep raw k-mer counts)
    #[arg(long)]
    no_normalize: bool,

    /// Seed for genome and read generation
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Fold coverage of simulated reads
    #[arg(long, default_value_t = 30.0, value_name = "F")]
    coverage: f64,

    /// Length of each simulated read
    #[arg(long, default_value_t = 200, value_name = "INT")]
    read_length: usize,

    /// Per-base substitution probability of simulated reads
    #[arg(long, default_value_t = 0.0, value_name = "F")]
    error_rate: f64,

    /// Run the build-phase thread sweep instead of a full assembly
    #[arg(long, value_name = "T1,T2,...", value_delimiter = ',')]
    bench: Option<Vec<usize>>,

    /// Also write the report as key=value lines to this file
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Write the canonical graph snapshot (post-normalization) to this file
    #[arg(long, value_name = "PATH")]
    dump_graph: Option<PathBuf>,
}

fn default_threads() -> usize {
    4 * thread::available_parallelism().map_or(1, |n| n.get())
}

fn config_from(args: &Args) -> anyhow::Result<PipelineConfig> {
    let source = if args.simulate {
        let genome_size = args.genome_size.unwrap_or(50_000);
        if genome_size == 0 {
            bail!("--genome-size must be at least 1");
        }
        if args.coverage.is_nan() || args.coverage <= 0.0 {
            bail!("--coverage must be positive");
        }
        if !(0.0..=1.0).contains(&args.error_rate) {
            bail!("--error-rate must lie in [0, 1]");
        }
        if args.read_length < 2 {
            bail!("--read-length must be at least 2");
        }
        if args.read_length > genome_size {
            bail!(
                "--read-length {} exceeds the genome size {}",
                args.read_length,
                genome_size
            );
        }
        Source::Simulate(SimulationConfig {
            genome_size,
            read_length: args.read_length,
            coverage: args.coverage,
            error_rate: args.error_rate,
            seed: args.seed,
        })
    } else if let Some(path) = &args.input {
        if args.genome_size.is_none() {
            bail!("--genome-size is required with --input (it sizes the table and normalization)");
        }
        Source::File(path.clone())
    } else {
        bail!("no input: pass --input PATH or --simulate");
    };

    let genome_size = match &source {
        Source::Simulate(sim) => sim.genome_size,
        Source::File(_) => args.genome_size.expect("checked above"),
    };
    if genome_size == 0 {
        bail!("--genome-size must be at least 1");
    }
    if args.k < 2 {
        bail!("--k must be at least 2");
    }
    let workers = args.threads.unwrap_or_else(default_threads);
    if workers == 0 {
        bail!("--threads must be at least 1");
    }
    let table_size = args.table_size.unwrap_or(genome_size);
    if table_size == 0 {
        bail!("--table-size must be at least 1");
    }

    Ok(PipelineConfig {
        source,
        genome_size,
        k: args.k,
        workers,
        table_size,
        min_contig: args.min_contig,
        normalize: !args.no_normalize,
        dump_graph: args.dump_graph.clone(),
    })
}

fn write_text(path: &PathBuf, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let cfg = config_from(&args)?;

    if let Some(counts) = &args.bench {
        let rows = run_benchmark(&cfg, counts)?;
        let text = render_bench(&rows);
        print!("{text}");
        if let Some(path) = &args.report {
            write_text(path, &text)?;
        }
        return Ok(());
    }

    let (report, contigs) = run_assembly(&cfg)?;

    if let Some(path) = &args.output {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        write_fasta(
            &mut out,
            contigs.iter().enumerate().map(|(i, c)| {
                let header = format!(
                    "contig_{} len={} start={}",
                    i + 1,
                    c.len(),
                    String::from_utf8_lossy(&c.start_label)
                );
                (header, c.sequence.clone())
            }),
        )
        .with_context(|| format!("cannot write {}", path.display()))?;
        out.flush()?;
    }

    print!("{}", render_human(&report));
    if let Some(path) = &args.report {
        write_text(path, &render_kv(&report))?;
    }
    Ok(())
}
