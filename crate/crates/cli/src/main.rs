use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convnec::convcode::{analyze_fsm, AnalysisConfig, EncoderFsm};
use convnec::format::{parse_generator, parse_network, parse_patterns};
use convnec::nec::{self, construct, ConstructParams, Construction, ErrorPatternSet};
use convnec::network::{build_transfer, NetworkSpec};
use convnec::polymat::PolyMatrix;
use convnec::sim::{self, ExhaustiveConfig, ExhaustiveMode};
use convnec::{Error, Field};
use serde_json::json;

mod render;

#[derive(Parser)]
#[command(name = "convnec", version, about = "Convolutional network-error correction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print A, K, F and the per-sink transfer matrices of a network.
    Transfer {
        network: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Free distance, T_dfree and degree data of a generator matrix.
    Analyze {
        /// Generator file, or an inline matrix such as "[1+z^2, 1+z+z^2]".
        code: String,
        #[command(flatten)]
        common: Common,
        /// T_dfree search depth for generators that cannot be certified minimal.
        #[arg(long)]
        depth_cap: Option<usize>,
    },
    /// Run the code construction and print the per-sink decoding plan.
    Construct {
        network: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Inject edge errors and check that every sink decodes correctly.
    Simulate {
        network: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        common: Common,
        /// Minimum index difference between consecutive errors
        /// (default: T_dfree of the input code).
        #[arg(long)]
        spacing: Option<usize>,
        /// Number of random trials (ignored with --exhaustive).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Message length in blocks.
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Enumerate every error vector at every network use.
        #[arg(long)]
        exhaustive: bool,
        /// With --exhaustive: place two errors at every pair of uses at least
        /// `spacing` apart.
        #[arg(long, requires = "exhaustive", conflicts_with = "same_use")]
        paired: bool,
        /// With --exhaustive: add two errors from different patterns in the
        /// same use (negative control, outside the guarantee).
        #[arg(long, requires = "exhaustive")]
        same_use: bool,
        /// With --exhaustive: number of random messages.
        #[arg(long, default_value_t = 20)]
        messages: usize,
    },
    /// Evaluate the closed-form bounds.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        sinks: u64,
        /// Free distance for the T_dfree cap.
        #[arg(long)]
        dfree: Option<u64>,
        /// Block-code comparison: number of network uses combined.
        #[arg(long, requires_all = ["edges", "t"])]
        j: Option<u64>,
        #[arg(long, requires = "j")]
        edges: Option<u64>,
        #[arg(long, requires = "j")]
        t: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Field override, `p` or `p^m`.
    #[arg(long, value_parser = parse_field_arg)]
    field: Option<Field>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct CodeArgs {
    /// Error-pattern set: `single-edges`, `upto-<k>-edges` or `{1,2};{3}`.
    #[arg(long, default_value = "single-edges")]
    phi: String,
    /// Input generator: file or inline matrix.
    #[arg(long, conflicts_with = "search")]
    code: Option<String>,
    /// Search for a code instead of supplying one.
    #[arg(long)]
    search: bool,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn parse_field_arg(s: &str) -> Result<Field, String> {
    let (p, m) = match s.split_once('^') {
        Some((p, m)) => (p, m),
        None => (s, "1"),
    };
    let p: u32 = p.trim().parse().map_err(|_| format!("bad prime `{p}`"))?;
    let m: u32 = m.trim().parse().map_err(|_| format!("bad degree `{m}`"))?;
    Field::new(p, m).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_network(path: &Path, field: Option<&Field>) -> CliResult<NetworkSpec> {
    let text = read(path)?;
    parse_network(&text, field)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_code(arg: &str, field: Option<&Field>) -> CliResult<PolyMatrix> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        read(path)?
    } else {
        arg.to_string()
    };
    parse_generator(&text, field)
        .map(|g| g.generator)
        .map_err(|e| Failure::Usage(format!("{arg}: {e}")))
}

fn build(spec: &NetworkSpec, args: &CodeArgs) -> CliResult<(Construction, ErrorPatternSet)> {
    let phi = parse_patterns(&args.phi, spec.num_edges())
        .map_err(|e| Failure::Usage(format!("--phi: {e}")))?;
    let code = match (&args.code, args.search) {
        (Some(c), _) => Some(load_code(c, Some(&spec.field))?),
        (None, true) => None,
        (None, false) => {
            return Err(Failure::Usage("give --code <generator> or --search".into()))
        }
    };
    let params = ConstructParams {
        max_degree: args.max_degree,
        ..Default::default()
    };
    Ok((construct(spec, &phi, code.as_ref(), &params)?, phi))
}

fn emit(format: Format, table: impl FnOnce() -> String, value: serde_json::Value) {
    match format {
        Format::Table => print!("{}", table()),
        Format::Json => println!("{value}"),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Transfer { network, common } => {
            let spec = load_network(&network, common.field.as_ref())?;
            let t = build_transfer(&spec)?;
            emit(
                common.format,
                || render::transfer(&t),
                json!({
                    "field": t.field.to_string(),
                    "a": t.a,
                    "k": t.k,
                    "f": t.f,
                    "sinks": t.sinks.iter().map(|s| json!({
                        "sink": s.name,
                        "b_t": s.b,
                        "f_t": s.f_t,
                        "m_t": s.m_t,
                        "m_t_inv": s.m_t_inv,
                    })).collect::<Vec<_>>(),
                }),
            );
        }
        Command::Analyze {
            code,
            common,
            depth_cap,
        } => {
            let g = load_code(&code, common.field.as_ref())?;
            let config = AnalysisConfig {
                depth_cap,
                ..Default::default()
            };
            let fsm = EncoderFsm::build_with_cap(&g, config.state_cap)?;
            let k = g.rows() as u64;
            let n = g.cols() as u64;
            let singleton = nec::bound_singleton(n, k, fsm.delta() as u64).ok();
            if fsm.is_catastrophic() {
                emit(
                    common.format,
                    || render::catastrophic(&g),
                    json!({
                        "generator": g,
                        "field": g.field().to_string(),
                        "catastrophic": true,
                        "degree": fsm.delta(),
                        "row_degrees": fsm.row_degrees(),
                    }),
                );
            } else {
                let m = analyze_fsm(&fsm, &config)?;
                emit(
                    common.format,
                    || render::analysis(&g, &m, singleton),
                    json!({
                        "generator": g,
                        "field": g.field().to_string(),
                        "catastrophic": false,
                        "metrics": m,
                        "singleton_bound": singleton,
                    }),
                );
            }
        }
        Command::Construct {
            network,
            code,
            common,
        } => {
            let spec = load_network(&network, common.field.as_ref())?;
            let (c, _) = build(&spec, &code)?;
            emit(
                common.format,
                || render::construction(&c.report),
                serde_json::to_value(&c.report).expect("report serializes"),
            );
        }
        Command::Simulate {
            network,
            code,
            common,
            spacing,
            trials,
            length,
            seed,
            exhaustive,
            paired,
            same_use,
            messages,
        } => {
            let spec = load_network(&network, common.field.as_ref())?;
            let (c, phi) = build(&spec, &code)?;
            let spacing = spacing.unwrap_or(c.report.code_metrics.tdfree);
            if exhaustive {
                let mode = if paired {
                    ExhaustiveMode::Paired
                } else if same_use {
                    ExhaustiveMode::SameUse
                } else {
                    ExhaustiveMode::Single
                };
                let cfg = ExhaustiveConfig {
                    mode,
                    num_messages: messages,
                    message_len: length,
                    spacing,
                    seed,
                    cap: sim::DEFAULT_TRIAL_CAP,
                };
                let s = sim::run_exhaustive(&c, &phi, &cfg)?;
                emit(
                    common.format,
                    || render::exhaustive(&s),
                    serde_json::to_value(&s).expect("summary serializes"),
                );
            } else {
                let s = sim::run_random(&c, &phi, trials, length, spacing, seed)?;
                emit(
                    common.format,
                    || render::random(&s),
                    serde_json::to_value(&s).expect("summary serializes"),
                );
            }
        }
        Command::Bounds {
            n,
            k,
            delta,
            sinks,
            dfree,
            j,
            edges,
            t,
            common,
        } => {
            if k == 0 || k >= n {
                return Err(Failure::Usage(format!("need 0 < k < n, got k = {k}, n = {n}")));
            }
            let singleton = nec::bound_singleton(n, k, delta)?;
            let q_min = nec::bound_field_size(n, k, sinks)?;
            let tdfree = dfree.map(|d| nec::bound_tdfree(d, delta, n, k, false).general);
            let mds = nec::bound_tdfree(singleton, delta, n, k, true).mds;
            let bnecc = match (j, edges, t) {
                (Some(j), Some(e), Some(t)) => Some(nec::bnecc_field_bound(j, e, t, sinks)),
                _ => None,
            };
            let b = render::Bounds {
                singleton,
                q_min,
                tdfree,
                mds,
                bnecc: bnecc.as_ref().map(|b| b.to_string()),
            };
            emit(
                common.format,
                || render::bounds(&b),
                json!({
                    "singleton": b.singleton,
                    "field_size": b.q_min,
                    "tdfree_cap": b.tdfree,
                    "mds_tdfree_cap": b.mds,
                    "bnecc_field_bound": b.bnecc,
                }),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
