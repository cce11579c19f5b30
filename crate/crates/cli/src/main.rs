use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use prodpolar::channel_sim::{run_sweep, CodeSpec, SimAlgo, SimConfig};
use prodpolar::latency::{table1, table1_csv, ProductShape, REFERENCE_CODES};
use prodpolar::polar::DEFAULT_Z0;
use prodpolar::textio::{
    format_bits, format_frozen_set, parse_bits, parse_frozen_set, parse_grid, parse_llrs,
};
use prodpolar::{
    build_product_code, construct, CheckNode, Decoder, DecoderKind, LlrMatrix, LlrWord, PolarCode,
    PolarDecoder, ProductPolarCode, Schedule, TwoStepConfig, TwoStepDecoder,
};

#[derive(Parser)]
#[command(
    name = "prodpolar",
    version,
    about = "Product polar codes: construction, coding, simulation, latency"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a frozen set and write it one index per line.
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message given as a 0/1 string.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Message bits; read from stdin if omitted.
        #[arg(long)]
        msg: Option<String>,
    },
    /// Decode one received word of LLRs.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecodeArgs,
        /// File of whitespace-separated LLRs; stdin if omitted.
        #[arg(long)]
        llr_file: Option<PathBuf>,
    },
    /// Monte Carlo BER/FER sweep over BPSK/AWGN, CSV output.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecodeArgs,
        /// Eb/N0 grid in dB: `start:step:stop`, `a,b,c` or a single value.
        #[arg(long)]
        ebn0: String,
        #[arg(long, env = "PRODPOLAR_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_frames: u64,
        #[arg(long, default_value_t = 100)]
        max_errors: u64,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        /// Feed the transmitted codeword as saturated LLRs.
        #[arg(long)]
        noiseless: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the decoding time-step table as CSV.
    LatencyTable {
        /// Maximum step-1 iterations for the worst case.
        #[arg(long, default_value_t = 4)]
        t: u32,
        /// Extra `N:K` pair; may be repeated.
        #[arg(long = "code", value_name = "N:K")]
        codes: Vec<String>,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// Product code from two components.
    #[arg(long)]
    product: bool,
    /// log2 of the code length.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<usize>,
    /// log2 of the row component length.
    #[arg(long)]
    nr: Option<u32>,
    #[arg(long)]
    kr: Option<usize>,
    /// log2 of the column component length.
    #[arg(long)]
    nc: Option<u32>,
    #[arg(long)]
    kc: Option<usize>,
    /// Bhattacharyya design parameter.
    #[arg(long)]
    z0: Option<f64>,
    #[arg(long, conflicts_with_all = ["k", "product"])]
    frozen_file: Option<PathBuf>,
    #[arg(long, requires = "product", conflicts_with = "kr")]
    row_frozen_file: Option<PathBuf>,
    #[arg(long, requires = "product", conflicts_with = "kc")]
    col_frozen_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Sc,
    Scl,
    Psc,
    Pscl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Flagged,
    Channel,
}

#[derive(Args)]
struct DecodeArgs {
    /// Default: sc for plain codes, psc for product codes.
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    #[arg(long, default_value_t = 8)]
    list: usize,
    /// Maximum step-1 iterations of the two-step decoder.
    #[arg(long, default_value_t = 4)]
    t: u32,
    /// Exact check-node update instead of min-sum.
    #[arg(long)]
    exact_f: bool,
    /// What later two-step iterations re-decode.
    #[arg(long, value_enum, default_value_t = ScheduleArg::Flagged)]
    schedule: ScheduleArg,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<prodpolar::Error> for CliError {
    fn from(e: prodpolar::Error) -> Self {
        match e {
            prodpolar::Error::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn read_stdin() -> CliResult<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

fn write_out(path: Option<&Path>, data: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            fs::write(p, data).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(data.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn component(
    what: &str,
    n: Option<u32>,
    k: Option<usize>,
    file: Option<&PathBuf>,
    z0: f64,
) -> CliResult<PolarCode> {
    let Some(n) = n else {
        return usage(format!("--n{what} is required"));
    };
    match (k, file) {
        (Some(k), None) => Ok(construct(n, k, z0)?),
        (None, Some(f)) => Ok(PolarCode::from_frozen_set(
            n,
            &parse_frozen_set(&read_file(f)?)?,
        )?),
        _ => usage(format!(
            "give exactly one of --k{what} or a frozen-set file"
        )),
    }
}

impl CodeArgs {
    fn resolve(&self) -> CliResult<CodeSpec> {
        let z0 = self.z0.unwrap_or(DEFAULT_Z0);
        if self.product {
            if self.n.is_some() || self.k.is_some() {
                return usage("--n/--k cannot be combined with --product; use --nr/--kr/--nc/--kc");
            }
            let row = component("r", self.nr, self.kr, self.row_frozen_file.as_ref(), z0)?;
            let col = component("c", self.nc, self.kc, self.col_frozen_file.as_ref(), z0)?;
            Ok(CodeSpec::Product(build_product_code(col, row)?))
        } else {
            if [self.nr, self.nc].iter().any(Option::is_some)
                || self.kr.is_some()
                || self.kc.is_some()
            {
                return usage("--nr/--kr/--nc/--kc need --product");
            }
            Ok(CodeSpec::Flat(component(
                "",
                self.n,
                self.k,
                self.frozen_file.as_ref(),
                z0,
            )?))
        }
    }
}

impl DecodeArgs {
    fn algo(&self, product: bool) -> SimAlgo {
        let default = if product { AlgoArg::Psc } else { AlgoArg::Sc };
        match self.algo.unwrap_or(default) {
            AlgoArg::Sc => SimAlgo::Sc,
            AlgoArg::Scl => SimAlgo::Scl {
                list_size: self.list,
            },
            AlgoArg::Psc => SimAlgo::ProductSc { t: self.t },
            AlgoArg::Pscl => SimAlgo::ProductScl {
                list_size: self.list,
                t: self.t,
            },
        }
    }

    fn check(&self) -> CheckNode {
        if self.exact_f {
            CheckNode::Exact
        } else {
            CheckNode::MinSum
        }
    }

    fn schedule(&self) -> Schedule {
        match self.schedule {
            ScheduleArg::Flagged => Schedule::FlaggedReinforced,
            ScheduleArg::Channel => Schedule::ChannelEveryIteration,
        }
    }
}

fn cmd_construct(code: &CodeArgs, out: Option<&Path>) -> CliResult<()> {
    let spec = code.resolve()?;
    let flat = spec.flat_code();
    write_out(out, &format_frozen_set(flat.frozen_set()))?;
    eprintln!(
        "N = {}, K = {}, |F| = {}",
        flat.len(),
        flat.dimension(),
        flat.frozen_set().len()
    );
    Ok(())
}

fn cmd_encode(code: &CodeArgs, msg: Option<&str>) -> CliResult<()> {
    let spec = code.resolve()?;
    let text = match msg {
        Some(m) => m.to_string(),
        None => read_stdin()?,
    };
    let msg = parse_bits(&text)?;
    let x = match &spec {
        CodeSpec::Flat(c) => c.encode(&msg)?,
        CodeSpec::Product(p) => p.encode_message(&msg)?.row_vectorize(),
    };
    write_out(None, &format!("{}\n", format_bits(&x)))
}

fn cmd_decode(code: &CodeArgs, dec: &DecodeArgs, llr_file: Option<&Path>) -> CliResult<()> {
    let spec = code.resolve()?;
    let text = match llr_file {
        Some(p) => read_file(p)?,
        None => read_stdin()?,
    };
    let y = LlrWord::new(parse_llrs(&text)?)?;
    let flat = spec.flat_code();
    if y.len() != flat.len() {
        return usage(format!("expected {} LLRs, got {}", flat.len(), y.len()));
    }
    let (msg, x) = match (dec.algo(matches!(spec, CodeSpec::Product(_))), &spec) {
        (SimAlgo::Sc, _) | (SimAlgo::Scl { .. }, _) => {
            let kind = match dec.algo(false) {
                SimAlgo::Scl { list_size } => DecoderKind::Scl { list_size },
                _ => DecoderKind::Sc,
            };
            let r = Decoder::new(kind, flat.clone(), dec.check())?.decode(&y)?;
            eprintln!("steps = {}", r.steps);
            (flat.extract_message(&r.u_hat)?, r.x_hat)
        }
        (algo, CodeSpec::Product(p)) => {
            let component = match algo {
                SimAlgo::ProductScl { list_size, .. } => DecoderKind::Scl { list_size },
                _ => DecoderKind::Sc,
            };
            let out = two_step(p, dec, component)?.decode(&LlrMatrix::from_word(
                &y,
                p.rows(),
                p.cols(),
            )?)?;
            eprintln!(
                "converged = {}, iterations = {}, fallback = {}, steps = {}",
                out.converged, out.iterations, out.used_fallback, out.steps
            );
            let x = flat.encode(&out.msg_hat)?;
            (out.msg_hat, x)
        }
        (_, CodeSpec::Flat(_)) => return usage("psc/pscl need --product"),
    };
    write_out(
        None,
        &format!("{}\n{}\n", format_bits(&msg), format_bits(&x)),
    )
}

fn two_step(
    p: &ProductPolarCode,
    dec: &DecodeArgs,
    component: DecoderKind,
) -> CliResult<TwoStepDecoder> {
    let cfg = TwoStepConfig {
        t: dec.t,
        component,
        check: dec.check(),
        schedule: dec.schedule(),
    };
    Ok(TwoStepDecoder::new(p.clone(), cfg)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    code: &CodeArgs,
    dec: &DecodeArgs,
    ebn0: &str,
    seed: u64,
    max_frames: u64,
    max_errors: u64,
    workers: Option<usize>,
    noiseless: bool,
    out: Option<&Path>,
) -> CliResult<()> {
    let spec = code.resolve()?;
    let algo = dec.algo(matches!(spec, CodeSpec::Product(_)));
    let cfg = SimConfig {
        max_frames,
        max_frame_errors: max_errors,
        seed,
        noiseless,
        workers,
        check: dec.check(),
        schedule: dec.schedule(),
        ..SimConfig::new(spec, algo, parse_grid(ebn0)?)
    };
    cfg.validate()?;
    eprintln!(
        "simulating N = {}, K = {}, {} point(s), seed {seed}",
        cfg.code.len(),
        cfg.code.dimension(),
        cfg.ebn0_grid_db.len()
    );
    let stats = run_sweep(&cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_out(out, &stats.to_csv())
}

fn cmd_latency_table(t: u32, codes: &[String]) -> CliResult<()> {
    if t < 1 {
        return usage("--t must be at least 1");
    }
    let mut shapes: Vec<ProductShape> = REFERENCE_CODES
        .iter()
        .map(|&(n, k)| ProductShape::square(n, k))
        .collect::<Result<_, _>>()?;
    for c in codes {
        let Some((n, k)) = c.split_once(':') else {
            return usage(format!("--code expects N:K, got {c:?}"));
        };
        let (Ok(n), Ok(k)) = (n.trim().parse::<usize>(), k.trim().parse::<usize>()) else {
            return usage(format!("--code expects integers, got {c:?}"));
        };
        shapes.push(ProductShape::balanced(n, k)?);
    }
    write_out(None, &table1_csv(&table1(&shapes, t)))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Construct { code, out } => cmd_construct(&code, out.as_deref()),
        Command::Encode { code, msg } => cmd_encode(&code, msg.as_deref()),
        Command::Decode {
            code,
            dec,
            llr_file,
        } => cmd_decode(&code, &dec, llr_file.as_deref()),
        Command::Simulate {
            code,
            dec,
            ebn0,
            seed,
            max_frames,
            max_errors,
            workers,
            noiseless,
            out,
        } => cmd_simulate(
            &code,
            &dec,
            &ebn0,
            seed,
            max_frames,
            max_errors,
            workers,
            noiseless,
            out.as_deref(),
        ),
        Command::LatencyTable { t, codes } => cmd_latency_table(t, &codes),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
