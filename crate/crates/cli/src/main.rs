mod chart;
mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use realspectra::bpr::Caps;
use realspectra::grading::Window;
use realspectra::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "realspectra", version, about = "Exact RO(C2)-graded calculator for Real spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Height of the truncation BPR<n>.
    #[arg(long, global = true, default_value_t = 1)]
    n: u32,
    /// bpr, bprn, kr, tmf13, KRn, ERn, kRn, TMF13, Tmf13, or quotient:<m1,m2,...;tail>.
    #[arg(long, global = true, default_value = "bprn")]
    spectrum: String,
    /// Degree window `a:b,c:d` (triv in a..=b, sgn in c..=d); reversed bounds give an empty window.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Enumeration caps `n_vbar` or `n_vbar,l_min:l_max` for the coefficient ring of BPR.
    #[arg(long, global = true, allow_hyphen_values = true)]
    caps: Option<String>,
    /// Output format; charts default to ascii, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Spectral sequence data: a JSON path, `stated` (default) or `forced`.
    #[arg(long, global = true)]
    ssdata: Option<String>,
    /// Cross-check local cohomology against the Koszul complex.
    #[arg(long, global = true)]
    oracle: bool,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// BB, BBPrime or NB for the block commands.
    #[arg(long, global = true, default_value = "BB")]
    block: String,
    /// Range `a:b` of block diagonals for the block tables.
    #[arg(long, global = true, allow_hyphen_values = true)]
    diagonals: Option<String>,
    /// Directory for memoized coefficient tables.
    #[arg(long, global = true, env = "REALSPECTRA_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Coefficient groups over the window.
    Coeff,
    /// E_infinity classes of the homotopy fixed point spectral sequence.
    Hfpss,
    /// Diagonal decomposition of a block into standard modules.
    Blocks,
    /// Local cohomology table of a block.
    Lc,
    /// Gorenstein or quotient duality check.
    Verify,
    /// Chart of a spectrum or block.
    Chart,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Ascii,
}

pub struct RunConfig {
    pub n: u32,
    pub spectrum: String,
    /// `None` for an empty window.
    pub window: Option<Window>,
    pub caps: Option<Caps>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub ssdata: Option<String>,
    pub oracle: bool,
    pub block: String,
    pub diagonals: Option<(i64, i64)>,
    pub cache_dir: Option<PathBuf>,
}

pub enum Failure {
    Lib(Error),
    Config(String),
    /// Completed with a negative verdict; the report was written.
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn parse_range(s: &str) -> Option<(i64, i64)> {
    let s = s.trim();
    let idx = s.get(1..)?.find(':')? + 1;
    Some((s[..idx].trim().parse().ok()?, s[idx + 1..].trim().parse().ok()?))
}

fn parse_window(s: &str) -> Result<Option<Window>, Failure> {
    let (t, g) = s.split_once(',').ok_or_else(|| Failure::Lib(Error::InvalidWindow(s.into())))?;
    let (a, b) = parse_range(t).ok_or_else(|| Failure::Lib(Error::InvalidWindow(s.into())))?;
    let (c, d) = parse_range(g).ok_or_else(|| Failure::Lib(Error::InvalidWindow(s.into())))?;
    if a > b || c > d {
        return Ok(None);
    }
    Ok(Some(Window::new(a, b, c, d)?))
}

fn parse_caps(s: &str) -> Result<Caps, Failure> {
    let bad = || Failure::Config(format!("invalid caps `{s}`"));
    let (v, l) = match s.split_once(',') {
        Some((v, l)) => (v, Some(l)),
        None => (s, None),
    };
    let mut caps = Caps::with_n(v.trim().parse().map_err(|_| bad())?);
    if let Some(l) = l {
        let (lo, hi) = parse_range(l).ok_or_else(bad)?;
        if lo > hi {
            return Err(bad());
        }
        caps.l_min = lo;
        caps.l_max = hi;
    }
    if caps.n_vbar == 0 {
        return Err(bad());
    }
    Ok(caps)
}

impl Cli {
    fn config(&self) -> Result<RunConfig, Failure> {
        let window = match &self.window {
            Some(w) => parse_window(w)?,
            None => Some(Window::square(commands::default_radius(self.command, self.n))),
        };
        let format = self.format.unwrap_or(if self.command == Command::Chart { Format::Ascii } else { Format::Json });
        let diagonals = match &self.diagonals {
            Some(d) => Some(parse_range(d).ok_or_else(|| Failure::Config(format!("invalid diagonals `{d}`")))?),
            None => None,
        };
        if let Some(0) = self.jobs {
            return Err(Failure::Config("--jobs must be positive".into()));
        }
        Ok(RunConfig {
            n: self.n,
            spectrum: self.spectrum.clone(),
            window,
            caps: self.caps.as_deref().map(parse_caps).transpose()?,
            format,
            out: self.out.clone(),
            ssdata: self.ssdata.clone(),
            oracle: self.oracle,
            block: self.block.clone(),
            diagonals,
            cache_dir: self.cache_dir.clone(),
        })
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Mismatch => 1,
        Failure::Config(_) => 2,
        Failure::Lib(e) => match e {
            Error::StabilizationFailure(_) => 3,
            Error::Mismatch { .. } | Error::InternalInconsistency(_) | Error::UnclassifiedModule { .. } => 1,
            _ => 2,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<(), Failure> {
        let cfg = cli.config()?;
        if let Some(j) = cli.jobs {
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build_global()
                .map_err(|e| Failure::Config(e.to_string()))?;
        }
        commands::dispatch(cli.command, &cfg)
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Mismatch => {}
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
