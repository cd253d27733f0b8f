//! Command-line flags, the key=value config file and the resolved settings.
//!
//! Precedence: explicit flag, then config file, then the bundled profile of
//! the chosen degree.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use feigdim::ifs::ContractionMethod;
use feigdim::profile::{profile, DegreeProfile, SUPPORTED_DEGREES};

#[derive(Parser, Debug)]
#[command(name = "feigdim", version, about = "Rigorous Hausdorff dimension bounds for Feigenbaum attractors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the renormalization fixed point and write the function ball.
    Fixpoint(Flags),
    /// Certify g' < 0 and g'' < 0 on J and write the certificate.
    Verify(Flags),
    /// Per-generation dimension brackets from the IFS.
    Dimension(Flags),
    /// Rectangle coverings of the graphs as CSV.
    Figures(Flags),
}

impl Command {
    pub fn flags(&self) -> &Flags {
        match self {
            Command::Fixpoint(f) | Command::Verify(f) | Command::Dimension(f) | Command::Figures(f) => f,
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Critical-point degree d (2, 3 or 4).
    #[arg(long)]
    pub degree: Option<String>,
    /// Highest retained coefficient index of the ball center.
    #[arg(long)]
    pub truncation: Option<String>,
    /// Analyticity scale of the ball.
    #[arg(long)]
    pub rho: Option<String>,
    /// l1 radius of the ball.
    #[arg(long)]
    pub radius: Option<String>,
    /// Number of IFS generations.
    #[arg(long)]
    pub generations: Option<String>,
    /// Bisection depth cap for the sign certificates.
    #[arg(long = "max-depth")]
    pub max_depth: Option<String>,
    #[arg(long = "tol-newton")]
    pub tol_newton: Option<String>,
    #[arg(long = "tol-inverse")]
    pub tol_inverse: Option<String>,
    #[arg(long = "tol-partition")]
    pub tol_partition: Option<String>,
    /// Worker threads, or "auto".
    #[arg(long)]
    pub threads: Option<String>,
    /// Ball file to read (or write, for fixpoint).
    #[arg(long)]
    pub ball: Option<PathBuf>,
    /// Certificate file to read (or write, for verify).
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Contraction bounds: "factorwise" (default) or "endpoint".
    #[arg(long)]
    pub contraction: Option<String>,
    /// Pieces of I tracked per IFS node for factorwise bounds.
    #[arg(long)]
    pub pieces: Option<String>,
    /// Strips per panel for figures.
    #[arg(long)]
    pub grid: Option<String>,
    /// Also write the dimension series with figures, up to this generation.
    #[arg(long)]
    pub series: Option<String>,
    /// Record wall time in the results (makes them run-dependent).
    #[arg(long)]
    pub timing: bool,
}

const KEYS: [&str; 19] = [
    "degree",
    "truncation",
    "rho",
    "radius",
    "generations",
    "max-depth",
    "tol-newton",
    "tol-inverse",
    "tol-partition",
    "threads",
    "ball",
    "cert",
    "out",
    "contraction",
    "pieces",
    "grid",
    "series",
    "timing",
    "config",
];

/// A problem with the invocation; reported with the usage exit code.
#[derive(Debug)]
pub struct UsageError(pub String);

type Usage<T> = std::result::Result<T, UsageError>;

fn usage<T>(msg: impl Into<String>) -> Usage<T> {
    Err(UsageError(msg.into()))
}

/// Parse `key = value` lines; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config_file(text: &str, path: &Path) -> Usage<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("{}:{}: expected key = value", path.display(), i + 1));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) || key == "config" {
            return usage(format!("{}:{}: unknown key `{}`", path.display(), i + 1, k.trim()));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Count(usize),
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub profile: DegreeProfile,
    pub threads: Threads,
    pub ball: PathBuf,
    pub ball_explicit: bool,
    pub cert: PathBuf,
    pub cert_explicit: bool,
    pub out: PathBuf,
    pub contraction: ContractionMethod,
    pub grid: usize,
    pub series: Option<u32>,
    pub timing: bool,
}

impl RunConfig {
    pub fn degree(&self) -> u32 {
        self.profile.degree
    }

    pub fn results_path(&self) -> PathBuf {
        self.out.join(format!("dimension_d{}.csv", self.degree()))
    }

    pub fn figures_dir(&self) -> PathBuf {
        self.out.join(format!("figures_d{}", self.degree()))
    }
}

struct Source {
    file: BTreeMap<String, String>,
}

impl Source {
    fn raw(&self, key: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).cloned())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, flag: &Option<String>) -> Usage<Option<T>> {
        match self.raw(key, flag) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| UsageError(format!("--{key}: cannot parse `{v}`"))),
        }
    }

    fn path(&self, key: &str, flag: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| self.file.get(key).map(PathBuf::from))
    }
}

fn positive(key: &str, v: f64) -> Usage<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        usage(format!("--{key} must be positive, got {v}"))
    }
}

pub fn resolve(flags: &Flags) -> Usage<RunConfig> {
    let file = match &flags.config {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", p.display())))?;
            parse_config_file(&text, p)?
        }
        None => BTreeMap::new(),
    };
    let src = Source { file };

    let Some(degree) = src.parsed::<u32>("degree", &flags.degree)? else {
        return usage("--degree is required (2, 3 or 4)");
    };
    if !SUPPORTED_DEGREES.contains(&degree) {
        return usage(format!("--degree must be one of 2, 3, 4, got {degree}"));
    }
    let mut p = profile(degree).map_err(|e| UsageError(e.to_string()))?;
    if let Some(n) = src.parsed::<usize>("truncation", &flags.truncation)? {
        if n < 5 {
            return usage(format!("--truncation must be at least 5, got {n}"));
        }
        p.truncation = n;
    }
    if let Some(rho) = src.parsed::<f64>("rho", &flags.rho)? {
        if !(rho > 1.0 && rho.is_finite()) {
            return usage(format!("--rho must exceed 1, got {rho}"));
        }
        p.rho = rho;
    }
    if let Some(r) = src.parsed::<f64>("radius", &flags.radius)? {
        p.radius = positive("radius", r)?;
    }
    if let Some(g) = src.parsed::<u32>("generations", &flags.generations)? {
        if !(1..=feigdim::ifs::MAX_GENERATIONS).contains(&g) {
            return usage(format!(
                "--generations must lie in 1..={}, got {g}",
                feigdim::ifs::MAX_GENERATIONS
            ));
        }
        p.generations = g;
    }
    if let Some(d) = src.parsed::<u32>("max-depth", &flags.max_depth)? {
        p.max_depth = d;
    }
    if let Some(t) = src.parsed::<f64>("tol-newton", &flags.tol_newton)? {
        p.newton_tol = positive("tol-newton", t)?;
    }
    if let Some(t) = src.parsed::<f64>("tol-inverse", &flags.tol_inverse)? {
        p.inverse_tol = positive("tol-inverse", t)?;
    }
    if let Some(t) = src.parsed::<f64>("tol-partition", &flags.tol_partition)? {
        p.partition_tol = positive("tol-partition", t)?;
    }
    if let Some(k) = src.parsed::<u32>("pieces", &flags.pieces)? {
        if k == 0 {
            return usage("--pieces must be at least 1");
        }
        p.pieces = k;
    }
    let threads = match src.raw("threads", &flags.threads).as_deref() {
        None | Some("auto") | Some("0") => Threads::Auto,
        Some(v) => Threads::Count(
            v.parse()
                .map_err(|_| UsageError(format!("--threads: expected a count or `auto`, got `{v}`")))?,
        ),
    };
    let contraction = match src.raw("contraction", &flags.contraction) {
        None => ContractionMethod::Factorwise,
        Some(v) => ContractionMethod::parse(&v)
            .ok_or_else(|| UsageError(format!("--contraction: expected factorwise or endpoint, got `{v}`")))?,
    };
    let grid = src.parsed::<usize>("grid", &flags.grid)?.unwrap_or(64);
    if grid == 0 {
        return usage("--grid must be at least 1");
    }
    let series = src.parsed::<u32>("series", &flags.series)?;
    if let Some(s) = series {
        if !(1..=feigdim::ifs::MAX_GENERATIONS).contains(&s) {
            return usage(format!("--series must lie in 1..={}", feigdim::ifs::MAX_GENERATIONS));
        }
    }
    let timing = flags.timing
        || match src.file.get("timing").map(String::as_str) {
            None | Some("false") => false,
            Some("true") => true,
            Some(v) => return usage(format!("timing: expected true or false, got `{v}`")),
        };
    let out = src.path("out", &flags.out).unwrap_or_else(|| PathBuf::from("."));
    let ball = src.path("ball", &flags.ball);
    let cert = src.path("cert", &flags.cert);
    Ok(RunConfig {
        threads,
        ball_explicit: ball.is_some(),
        ball: ball.unwrap_or_else(|| out.join(format!("ball_d{degree}.txt"))),
        cert_explicit: cert.is_some(),
        cert: cert.unwrap_or_else(|| out.join(format!("cert_d{degree}.json"))),
        out,
        contraction,
        grid,
        series,
        timing,
        profile: p,
    })
}
