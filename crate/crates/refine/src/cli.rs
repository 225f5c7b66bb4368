//! `refine embed | eval | bench`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use refine_core::eval::{run_protocol, LogisticConfig, ProtocolConfig};
use refine_core::{
    make_filter, transition_matrix, FilterSpec, Graph, IsolatedPolicy, Kernel, ProximityConfig,
    RbqrParams,
};

use crate::edgelist::{load_edge_list, EdgeListOptions};
use crate::embfile::{read_embedding, write_embedding, Embedding, Format};
use crate::error::{Result, WithPath};
use crate::labels::load_labels;
use crate::pipeline::{embed_graph, EmbedConfig, Timings};
use crate::{bench, mtx, report};

#[derive(Debug, Parser)]
#[command(
    name = "refine",
    version,
    about = "Fast node embeddings for large sparse graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed the nodes of an edge-list graph.
    Embed(EmbedArgs),
    /// Score an embedding on multi-label node classification.
    Eval(EvalArgs),
    /// Time the factorization over block sizes and power counts.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterKind {
    Heat,
    Markov,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Isolated {
    SelfLoop,
    Drop,
}

#[derive(Clone, Debug, Args)]
pub struct ModelArgs {
    /// Edge list, `u v [w]` per line.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Embedding dimension.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    /// Block width of the range finder.
    #[arg(long, default_value_t = 16)]
    pub block: usize,
    /// Products with M per sketch.
    #[arg(long, default_value_t = 3)]
    pub power: usize,
    /// Negative sample ratio.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Keep non-positive log-ratios instead of dropping them.
    #[arg(long)]
    pub no_truncate: bool,
    #[arg(long, value_enum, default_value_t = FilterKind::Heat)]
    pub filter: FilterKind,
    /// Same as `--filter none`.
    #[arg(long)]
    pub no_filter: bool,
    /// Filter order.
    #[arg(long = "K", default_value_t = 2)]
    pub order: usize,
    /// Heat kernel time.
    #[arg(long, default_value_t = 0.5)]
    pub theta_t: f64,
    /// Scale the filter coefficients to sum to one.
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Projection passes against earlier blocks.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=2))]
    pub reorth_passes: u64,
    /// Orthonormalize between power steps.
    #[arg(long)]
    pub orthonormalize_powers: bool,
    /// Ignore a third edge-list column.
    #[arg(long)]
    pub unweighted: bool,
    #[arg(long, value_enum, default_value_t = Isolated::SelfLoop)]
    pub isolated: Isolated,
    /// Worker threads for sparse products.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
}

#[derive(Clone, Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write M in MatrixMarket format.
    #[arg(long)]
    pub dump_m: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct EvalArgs {
    /// Embedding file (text or binary).
    #[arg(long, short)]
    pub embedding: PathBuf,
    /// Label file, `node label1 [label2 ...]` per line.
    #[arg(long, short)]
    pub labels: PathBuf,
    /// CSV report with one record per (ratio, repeat).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,0.9")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inverse L2 regularization strength of the classifier.
    #[arg(long, default_value_t = 1.0)]
    pub reg: f64,
    /// Use embedding rows as they are instead of scaling them to unit length.
    #[arg(long)]
    pub no_normalize: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub blocks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    pub powers: Vec<usize>,
    /// CSV with raw stage times.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl ModelArgs {
    pub fn rbqr(&self) -> RbqrParams {
        RbqrParams {
            dim: self.dim,
            block: self.block,
            power: self.power,
            seed: self.seed,
            reorth_passes: self.reorth_passes as usize,
            orthonormalize_powers: self.orthonormalize_powers,
        }
    }

    pub fn proximity(&self) -> ProximityConfig {
        ProximityConfig {
            lambda: self.lambda,
            truncate_nonpositive: !self.no_truncate,
        }
    }

    pub fn filter_spec(&self) -> Result<Option<FilterSpec>> {
        let kernel = match (self.no_filter, self.filter) {
            (true, _) | (_, FilterKind::None) => return Ok(None),
            (_, FilterKind::Heat) => Kernel::Heat { t: self.theta_t },
            (_, FilterKind::Markov) => Kernel::Markov,
        };
        let spec = make_filter(kernel, self.order)?;
        Ok(Some(if self.renormalize {
            spec.renormalized()?
        } else {
            spec
        }))
    }

    pub fn config(&self) -> Result<EmbedConfig> {
        let cfg = EmbedConfig {
            rbqr: self.rbqr(),
            proximity: self.proximity(),
            filter: self.filter_spec()?,
        };
        cfg.proximity.validate()?;
        Ok(cfg)
    }

    fn load_graph(&self, timings: &mut Timings) -> Result<Graph> {
        let opts = EdgeListOptions {
            unweighted: self.unweighted,
            isolated: match self.isolated {
                Isolated::SelfLoop => IsolatedPolicy::SelfLoop,
                Isolated::Drop => IsolatedPolicy::Drop,
            },
        };
        let g = timings
            .time("read", || load_edge_list(open(&self.input)?, &opts))
            .with_path(&self.input)?;
        log::info!("graph: {} nodes, {} edges", g.n(), g.num_edges());
        Ok(g)
    }
}

fn open(path: &Path) -> io::Result<impl BufRead> {
    Ok(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_path(path)?))
}

/// Sizes the global rayon pool. Only the first call has an effect.
pub fn set_threads(threads: u64) {
    #[cfg(feature = "parallel")]
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads as usize)
            .build_global()
        {
            log::debug!("thread pool already configured: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if threads > 1 {
        log::warn!("built without the `parallel` feature, running single-threaded");
    }
}

pub fn cmd_embed(args: &EmbedArgs) -> Result<()> {
    set_threads(args.model.threads);
    let cfg = args.model.config()?;
    let mut io_timings = Timings::default();
    let g = args.model.load_graph(&mut io_timings)?;
    let run = embed_graph(&g, &cfg)?;
    let emb = Embedding {
        ids: (0..g.n()).map(|i| g.original_id(i)).collect(),
        matrix: run.embedding,
    };
    io_timings
        .time("write", || {
            write_embedding(create(&args.output)?, &emb, args.format)
        })
        .with_path(&args.output)?;
    if let Some(path) = &args.dump_m {
        io_timings
            .time("dump_m", || mtx::write_matrix_market(create(path)?, &run.m))
            .with_path(path)?;
    }
    for (name, d) in &io_timings.steps {
        log::info!("{name:<10} {:>10.3} ms", d.as_secs_f64() * 1e3);
    }
    log::info!(
        "compute {:.3} s, io {:.3} s",
        run.timings.total().as_secs_f64(),
        io_timings.total().as_secs_f64()
    );
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    set_threads(args.threads);
    let Embedding { ids, matrix } =
        read_embedding(open(&args.embedding).with_path(&args.embedding)?)
            .with_path(&args.embedding)?;
    let index: std::collections::HashMap<u64, usize> =
        ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let labels = load_labels(
        open(&args.labels).with_path(&args.labels)?,
        ids.len(),
        |id| index.get(&id).copied(),
    )
    .with_path(&args.labels)?;
    if labels.labeled_nodes().is_empty() {
        return Err(
            refine_core::Error::Domain("no labeled node matches the embedding".into()).into(),
        );
    }
    let cfg = ProtocolConfig {
        ratios: args.ratios.clone(),
        repeats: args.repeats,
        seed: args.seed,
        classifier: LogisticConfig {
            c: args.reg,
            ..LogisticConfig::default()
        },
        normalize_rows: !args.no_normalize,
    };
    let start = Instant::now();
    let rep = run_protocol(&matrix, &labels, &cfg)?;
    log::info!("evaluation took {:.3} s", start.elapsed().as_secs_f64());
    print!("{}", report::format_table(&rep));
    if let Some(path) = &args.output {
        report::write_csv(create(path)?, &rep).with_path(path)?;
    }
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    set_threads(args.model.threads);
    let cfg = args.model.config()?;
    let mut timings = Timings::default();
    let g = args.model.load_graph(&mut timings)?;
    let t = transition_matrix(&g)?;
    let cw = refine_core::context_weights(&t)?;
    let m = refine_core::build_m(&t, &cw, &cfg.proximity)?;
    let rows = bench::sweep(
        &m,
        &t,
        &cfg.rbqr,
        cfg.filter.as_ref(),
        &args.blocks,
        &args.powers,
    )?;
    print!("{}", bench::format_table(&rows));
    if let Some(path) = &args.output {
        bench::write_csv(create(path)?, &rows).with_path(path)?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Embed(a) => cmd_embed(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Entry point of the binary. The log level comes from `REFINE_LOG`.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("REFINE_LOG", "info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => {
            let _ = io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["refine", "embed", "-i", "g.txt", "-o", "e.txt"]).unwrap();
        let Command::Embed(a) = cli.command else {
            panic!()
        };
        assert_eq!(a.model.rbqr(), RbqrParams::default());
        let spec = a.model.filter_spec().unwrap().unwrap();
        assert_eq!(spec.order, 2);
        assert_eq!(spec.kernel, Kernel::Heat { t: 0.5 });
        assert_eq!(a.model.threads, 1);
        assert_eq!(a.format, Format::Text);
    }

    #[test]
    fn filter_switches() {
        let parse = |extra: &[&str]| {
            let mut argv = vec!["refine", "embed", "-i", "g", "-o", "e"];
            argv.extend_from_slice(extra);
            let Command::Embed(a) = Cli::try_parse_from(argv).unwrap().command else {
                panic!()
            };
            a.model.filter_spec().unwrap()
        };
        assert!(parse(&["--no-filter"]).is_none());
        assert!(parse(&["--filter", "none"]).is_none());
        assert_eq!(
            parse(&["--filter", "markov", "--K", "3"]).unwrap().theta,
            vec![0.25; 4]
        );
        let r = parse(&["--renormalize"]).unwrap();
        assert!((r.theta.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(
            Cli::try_parse_from(["refine", "embed", "-i", "g", "-o", "e", "--threads", "0"])
                .is_err()
        );
        assert!(Cli::try_parse_from([
            "refine",
            "embed",
            "-i",
            "g",
            "-o",
            "e",
            "--reorth-passes",
            "3"
        ])
        .is_err());
        assert!(Cli::try_parse_from([
            "refine", "eval", "-e", "x", "-l", "y", "--ratios", "0.1,abc"
        ])
        .is_err());
    }
}
