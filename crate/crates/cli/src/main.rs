use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphpee::par::ExecMode;
use graphpee::sweep::{self, SweepConfig};
use graphpee::{codec, pgm, BitStream, Error, PredictorKind, PredictorParams};

/// Reversible data hiding in 8-bit grayscale PGM images.
#[derive(Parser, Debug)]
#[command(name = "graphpee", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hide a message in a cover image.
    Embed(EmbedArgs),
    /// Recover the message and the original cover from a stego image.
    Extract(ExtractArgs),
    /// Run a capacity versus PSNR sweep and write a CSV report.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 5.0)]
    rho: f64,
    /// Proximal gradient step size.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long = "sigma-l", default_value_t = 0.5)]
    sigma_l: f64,
    #[arg(long = "sigma-x", default_value_t = 0.5)]
    sigma_x: f64,
    /// Side of the square patch-search window, in pixels.
    #[arg(long, default_value_t = 31)]
    window: usize,
}

impl SolverArgs {
    fn params(&self) -> PredictorParams {
        PredictorParams {
            gamma: self.gamma,
            rho: self.rho,
            step_t: self.step,
            sigma_l: self.sigma_l,
            sigma_x: self.sigma_x,
            window: self.window,
            ..PredictorParams::default()
        }
    }
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Message file; its bytes are embedded most significant bit first.
    #[arg(long, conflicts_with = "msg_bits", required_unless_present = "msg_bits")]
    msg: Option<PathBuf>,
    /// Embed this many pseudo-random bits instead of a file.
    #[arg(long = "msg-bits")]
    msg_bits: Option<usize>,
    /// Seed for --msg-bits.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "quad")]
    predictor: PredictorKind,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Restored cover image.
    #[arg(long)]
    out: PathBuf,
    /// Recovered message, zero-padded to whole bytes.
    #[arg(long = "msg-out")]
    msg_out: PathBuf,
    #[arg(long, default_value = "quad")]
    predictor: PredictorKind,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// TOML sweep description.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run rows one after another.
    #[arg(long)]
    sequential: bool,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::CapacityUnreachable { .. }
        | Error::ImageTooSmall(_)
        | Error::ThresholdDeltaOverflow(_)
        | Error::SideInfoOverflow { .. } => 2,
        Error::MalformedStego(_) => 3,
        Error::Io(_) | Error::MalformedHeader(_) | Error::MaxvalUnsupported(_) | Error::Truncated { .. } => 4,
        _ => 1,
    }
}

fn embed(args: EmbedArgs) -> graphpee::Result<()> {
    let cover = pgm::load_pgm(&args.input)?;
    let message = match (&args.msg, args.msg_bits) {
        (Some(path), _) => BitStream::from_bytes(&fs::read(path)?),
        (None, Some(n)) => sweep::message_bits(args.seed, n),
        (None, None) => unreachable!("clap requires one message source"),
    };
    let (stego, report) = codec::embed(&cover, &message, args.predictor, &args.solver.params())?;
    pgm::save_pgm(&stego, &args.out)?;
    let taus: Vec<String> = report.taus().iter().map(|t| format!("{t:.2}")).collect();
    println!(
        "embedded {} bits with {}: psnr {:.4} dB, tau {}",
        report.message_bits,
        report.predictor,
        report.psnr,
        taus.join(" ")
    );
    Ok(())
}

fn extract(args: ExtractArgs) -> graphpee::Result<()> {
    let stego = pgm::load_pgm(&args.input)?;
    let (message, restored) = codec::extract(&stego, args.predictor, &args.solver.params())?;
    pgm::save_pgm(&restored, &args.out)?;
    fs::write(&args.msg_out, message.to_bytes())?;
    println!("extracted {} bits", message.len());
    Ok(())
}

fn run_sweep(args: SweepArgs) -> graphpee::Result<()> {
    let mut cfg = SweepConfig::load(&args.config)?;
    if args.out.is_some() {
        cfg.output = args.out;
    }
    if cfg.output.is_none() {
        return Err(Error::InvalidParameter("no CSV destination: pass --out or set `out` in the config".into()));
    }
    let mode = if args.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::default()
    };
    let rows = sweep::run_sweep(&cfg, mode)?;
    let failed = rows.iter().filter(|r| !r.ok()).count();
    println!("{} rows, {} failed", rows.len(), failed);
    Ok(())
}

fn main() -> ExitCode {
    // clap would exit with 2 on usage errors, which is reserved for capacity
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Embed(a) => embed(a),
        Command::Extract(a) => extract(a),
        Command::Sweep(a) => run_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
