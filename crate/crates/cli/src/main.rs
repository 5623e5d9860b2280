//! `nft` - nonlinear Fourier transforms for sampled periodic signals.

use nft_cli::{bench, output, signal_file};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nft_core::discretize::{
    build_monodromy, default_transform, CoordinateTransform, DiscretizeError, Scheme, Signal,
};
use nft_core::spectra::{
    defocusing_spectra_sampling, eigen_spectra, filter_spectrum, floquet_diagram, NftError, Rect,
    SpectrumFilter, SpectrumResult,
};
use nft_core::Complex64;
use nft_cli::output::SpectrumDoc;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exit codes: 0 success, 2 malformed input or parameters, 3 scheme
/// feasibility failure (the message names the offending sample), 4 method
/// restricted to the defocusing NSE.
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NOT_DEFOCUSING: u8 = 4;

#[derive(Parser)]
#[command(
    name = "nft",
    version,
    about = "Fast nonlinear Fourier transforms for sampled periodic NSE/AKNS signals",
    after_help = "Exit codes: 0 = success, 2 = malformed input/parameters, \
                  3 = scheme infeasible for the signal (message names the sample), \
                  4 = method requires the defocusing NSE.\n\
                  Set NFT_THREADS to cap the worker thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute main + auxiliary spectra with the O(D^2) eigenmethod.
    Eigen(EigenArgs),
    /// Compute real spectra of a defocusing signal with the O(D log^2 D)
    /// sampling method.
    Sample(SampleArgs),
    /// Emit Floquet-diagram data (z, delta, clipped) as TSV.
    Floquet(FloquetArgs),
    /// Run the runtime/accuracy benchmark against the analytic references.
    Bench(BenchArgs),
}

#[derive(Args)]
struct EigenArgs {
    /// Signal file (CSV with #META header, or .json).
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = SchemeArg::Al)]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = TransformArg::Default)]
    transform: TransformArg,
    /// Möbius coefficients a b c d (each "re" or "re,im"), used with
    /// --transform moebius.
    #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_hyphen_values = true)]
    moebius: Option<Vec<String>>,
    /// Keep only spectrum points inside the rectangle spanned by the two
    /// corners X and Y (each "re" or "re,im").
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_hyphen_values = true)]
    filter_box: Option<Vec<String>>,
    /// Merge spectrum points closer than this tolerance.
    #[arg(long)]
    dedup_tol: Option<f64>,
    /// Drop merged points of multiplicity >= 2 (degenerate spectrum).
    #[arg(long)]
    drop_doubles: bool,
    /// Output path for the spectrum JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    input: PathBuf,
    /// Spectral search interval A B.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true, required = true)]
    bounds: Vec<f64>,
    /// Oversampling factor G: the scan grid has G*D points.
    #[arg(long, default_value_t = 1)]
    grid_factor: usize,
    /// Number of bisection rounds L per bracket.
    #[arg(long, default_value_t = 30)]
    bisect: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FloquetArgs {
    input: PathBuf,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true, required = true)]
    bounds: Vec<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 1024)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Sample counts to benchmark.
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048")]
    ds: Vec<usize>,
    /// Base output path; writes `<out>.json` and `<out>.tsv` (stdout JSON when
    /// omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Euler,
    Cn,
    Al,
    /// Ablowitz-Ladik without the per-sample normalization.
    AlRaw,
}

impl SchemeArg {
    fn to_scheme(self) -> Scheme {
        match self {
            SchemeArg::Euler => Scheme::ForwardEuler,
            SchemeArg::Cn => Scheme::CrankNicolson,
            SchemeArg::Al => Scheme::AblowitzLadik { normalized: true },
            SchemeArg::AlRaw => Scheme::AblowitzLadik { normalized: false },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    /// The scheme's recommended circle-mapping transform.
    Default,
    /// No coordinate transform (Euler/Crank-Nicolson only).
    None,
    /// Möbius transform with coefficients from --moebius.
    Moebius,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Focusing,
    Defocusing,
    All,
}

/// Errors annotated with the process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(err: impl std::fmt::Display) -> Self {
        Self { code: EXIT_BAD_INPUT, message: err.to_string() }
    }
}

impl From<DiscretizeError> for CliError {
    fn from(err: DiscretizeError) -> Self {
        let code = match err {
            DiscretizeError::TooFewSamples(_)
            | DiscretizeError::NonPositivePeriod(_)
            | DiscretizeError::AknsLengthMismatch { .. }
            | DiscretizeError::DegenerateMoebius => EXIT_BAD_INPUT,
            _ => EXIT_INFEASIBLE,
        };
        Self { code, message: err.to_string() }
    }
}

impl From<NftError> for CliError {
    fn from(err: NftError) -> Self {
        match err {
            NftError::NotDefocusing => Self {
                code: EXIT_NOT_DEFOCUSING,
                message: format!("{err} (kappa = +1 input rejected)"),
            },
            NftError::Discretize(inner) => inner.into(),
            other => Self { code: EXIT_BAD_INPUT, message: other.to_string() },
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NFT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eigen(args) => cmd_eigen(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Floquet(args) => cmd_floquet(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

/// Accepts "re", "re,im", and "re+imi" / "re-imi" forms.
fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex64::new(
            re.trim().parse().with_context(|| format!("bad real part in {text:?}"))?,
            im.trim().parse().with_context(|| format!("bad imaginary part in {text:?}"))?,
        ));
    }
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // Split at the last +/- that is neither leading nor an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for pos in (1..bytes.len()).rev() {
            let ch = bytes[pos];
            if (ch == b'+' || ch == b'-') && !matches!(bytes[pos - 1], b'e' | b'E') {
                split = Some(pos);
                break;
            }
        }
        if let Some(pos) = split {
            let (re, im) = body.split_at(pos);
            let im = if im == "+" || im == "-" { format!("{im}1") } else { im.to_string() };
            return Ok(Complex64::new(
                re.parse().with_context(|| format!("bad real part in {text:?}"))?,
                im.parse().with_context(|| format!("bad imaginary part in {text:?}"))?,
            ));
        }
        let im: f64 = if body.is_empty() { 1.0 } else { body.parse().with_context(|| format!("bad imaginary part in {text:?}"))? };
        return Ok(Complex64::new(0.0, im));
    }
    Ok(Complex64::new(t.parse().with_context(|| format!("bad number {text:?}"))?, 0.0))
}

fn load_signal(path: &Path) -> Result<Signal, CliError> {
    let file = signal_file::read_signal_file(path).map_err(CliError::input)?;
    file.to_signal().map_err(CliError::input)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(anyhow!("cannot write {}: {e}", path.display()))),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn build_filter(args: &EigenArgs) -> Result<Option<SpectrumFilter>, CliError> {
    if args.filter_box.is_none() && args.dedup_tol.is_none() && !args.drop_doubles {
        return Ok(None);
    }
    let rect = match &args.filter_box {
        Some(corners) => {
            let x = parse_complex(&corners[0]).map_err(CliError::input)?;
            let y = parse_complex(&corners[1]).map_err(CliError::input)?;
            Some(Rect::new(x, y))
        }
        None => None,
    };
    Ok(Some(SpectrumFilter {
        rect,
        dedup_tol: args.dedup_tol.unwrap_or(0.0),
        drop_double_roots: args.drop_doubles,
    }))
}

/// The box/dedup filter applies to all four spectra, so degenerate points
/// removed from the main spectrum disappear from the auxiliary ones too.
fn apply_filter(result: &mut SpectrumResult, filter: &SpectrumFilter) {
    result.main = filter_spectrum(&result.main, filter);
    result.aux_ki = filter_spectrum(&result.aux_ki, filter);
    result.aux_ma_rho = filter_spectrum(&result.aux_ma_rho, filter);
    result.aux_ma_xi = filter_spectrum(&result.aux_ma_xi, filter);
}

fn cmd_eigen(args: EigenArgs) -> Result<(), CliError> {
    let signal = load_signal(&args.input)?;
    let scheme = args.scheme.to_scheme();
    let transform = match args.transform {
        TransformArg::Default => default_transform(scheme, signal.step()),
        TransformArg::None => CoordinateTransform::Identity,
        TransformArg::Moebius => {
            let coeffs = args
                .moebius
                .as_ref()
                .ok_or_else(|| CliError::input("--transform moebius requires --moebius A B C D"))?;
            let mut parsed = [Complex64::new(0.0, 0.0); 4];
            for (dst, src) in parsed.iter_mut().zip(coeffs) {
                *dst = parse_complex(src).map_err(CliError::input)?;
            }
            CoordinateTransform::moebius(parsed[0], parsed[1], parsed[2], parsed[3])?
        }
    };
    let rm = build_monodromy(&signal, scheme, transform)?;
    let mut result = eigen_spectra(&rm);
    if let Some(filter) = build_filter(&args)? {
        apply_filter(&mut result, &filter);
    }
    let doc = SpectrumDoc::from_result(&result);
    let json = serde_json::to_string_pretty(&doc).map_err(CliError::input)?;
    write_or_print(&args.out, &json)
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let signal = load_signal(&args.input)?;
    let result = defocusing_spectra_sampling(
        &signal,
        args.bounds[0],
        args.bounds[1],
        args.grid_factor,
        args.bisect,
    )?;
    let doc = SpectrumDoc::from_result(&result);
    let json = serde_json::to_string_pretty(&doc).map_err(CliError::input)?;
    write_or_print(&args.out, &json)
}

fn cmd_floquet(args: FloquetArgs) -> Result<(), CliError> {
    let signal = load_signal(&args.input)?;
    if args.points < 2 {
        return Err(CliError::input("--points must be at least 2"));
    }
    let rows = floquet_diagram(&signal, args.bounds[0], args.bounds[1], args.points)?;
    write_or_print(&args.out, &output::floquet_tsv(&rows))
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.ds.is_empty() || args.ds.iter().any(|&d| d < 2) {
        return Err(CliError::input("--ds needs sample counts >= 2"));
    }
    let suite = match args.suite {
        SuiteArg::Focusing => bench::Suite::Focusing,
        SuiteArg::Defocusing => bench::Suite::Defocusing,
        SuiteArg::All => bench::Suite::All,
    };
    let report = bench::run_bench(suite, &args.ds);
    let json = serde_json::to_string_pretty(&report).map_err(CliError::input)?;
    match &args.out {
        Some(base) => {
            let json_path = base.with_extension("json");
            let tsv_path = base.with_extension("tsv");
            std::fs::write(&json_path, &json)
                .map_err(|e| CliError::input(anyhow!("cannot write {}: {e}", json_path.display())))?;
            std::fs::write(&tsv_path, bench::report_tsv(&report))
                .map_err(|e| CliError::input(anyhow!("cannot write {}: {e}", tsv_path.display())))?;
            Ok(())
        }
        None => {
            println!("{json}");
            Ok(())
        }
    }
}
