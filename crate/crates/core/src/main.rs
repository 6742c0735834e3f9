use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ndn_manet::experiment::{
    emit_csv, emit_trace, run_experiment_with, scripted, summarize, write_csv, PlacementFile, RunOptions, ScenarioConfig,
    Topology, Traffic,
};
use ndn_manet::Result;

#[derive(Parser)]
#[command(name = "ndn-manet", version, about = "Adaptive-rate NDN transport over ad-hoc and wired chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario over several seeds and write one CSV row per run.
    Run(RunArgs),
    /// Print the fully resolved configuration.
    ShowConfig(RunArgs),
    /// Replay a scripted micro-topology.
    Scripted {
        #[arg(value_enum)]
        which: Script,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Script {
    RetxMulticast,
    CacheRedundancy,
}

#[derive(Args)]
struct RunArgs {
    /// TOML scenario file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(Topology))]
    topology: Option<Topology>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    speed: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    /// Random offset of initial grid positions, metres.
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(Traffic))]
    traffic: Option<Traffic>,
    #[arg(long)]
    consumers: Option<usize>,
    #[arg(long)]
    producers: Option<usize>,
    #[arg(long)]
    cs: Option<usize>,
    #[arg(long, overrides_with = "no_cwl")]
    cwl: bool,
    #[arg(long)]
    no_cwl: bool,
    #[arg(long, overrides_with = "no_dil")]
    dil: bool,
    #[arg(long)]
    no_dil: bool,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    bottleneck: bool,
    #[arg(long)]
    p_byte_error: Option<f64>,
    #[arg(long)]
    p_frame_error: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    /// Per-run metrics CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-consumer time series (time, consumer, cwnd, rtt, event).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// TOML file with `consumers = [..]` and `producers = [..]` node lists.
    #[arg(long)]
    placement_file: Option<PathBuf>,
    /// Count invariant violations during the run.
    #[arg(long)]
    audit: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut c = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = self.$f.clone() {
                    c.$f = v;
                }
            )*};
        }
        set!(scenario, topology, nodes, speed, duration, jitter, traffic, cs, gamma, p_byte_error, p_frame_error, seed, runs);
        if self.consumers.is_some() {
            c.consumers = self.consumers;
        }
        if self.producers.is_some() {
            c.producers = self.producers;
        }
        if self.cwl {
            c.cwl = true;
        }
        if self.no_cwl {
            c.cwl = false;
        }
        if self.dil {
            c.dil = true;
        }
        if self.no_dil {
            c.dil = false;
        }
        if self.bottleneck {
            c.bottleneck = true;
        }
        if let Some(p) = &self.placement_file {
            let placement = PlacementFile::load(p)?;
            c.consumers.get_or_insert(placement.consumers.len());
            c.producers.get_or_insert(placement.producers.len());
            c.consumer_nodes = Some(placement.consumers);
            c.producer_nodes = Some(placement.producers);
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let opts = RunOptions {
        audit: args.audit,
        trace: args.trace.is_some(),
    };
    let outputs = run_experiment_with(&cfg, opts)?;
    let records: Vec<_> = outputs.iter().map(|o| o.record.clone()).collect();
    match &args.out {
        Some(p) => emit_csv(&records, p)?,
        None => write_csv(&records, std::io::stdout().lock()).map_err(|e| ndn_manet::Error::Config(e.to_string()))?,
    }
    if let Some(p) = &args.trace {
        emit_trace(&outputs, p)?;
    }
    for (name, ms) in summarize(&records)? {
        eprintln!("{name:>18}  mean {:>12.6}  std {:>12.6}", ms.mean, ms.std);
    }
    if args.audit {
        for o in &outputs {
            eprintln!("seed {}: {}", o.record.seed, o.violations);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::ShowConfig(args) => args.resolve().map(|c| print!("{}", c.to_toml())),
        Command::Scripted { which } => {
            match which {
                Script::RetxMulticast => {
                    for dil in [false, true] {
                        println!("{}", scripted::retx_multicast(dil));
                    }
                }
                Script::CacheRedundancy => {
                    for cs in [200, 0] {
                        println!("{}", scripted::cache_redundancy(cs));
                    }
                }
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
