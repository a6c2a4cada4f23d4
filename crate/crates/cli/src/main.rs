//! `severi`: Severi degrees, node polynomials and the B-series from the
//! command line. Results go to stdout as JSON (or CSV for `table`);
//! progress and errors go to stderr.

mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use severi_core::chengine::{relative_severi, severi_degree, severi_table, CacheStore, ChError};
use severi_core::exactseries::{parse_rat, rat_to_string, SeriesError};
use severi_core::gyz::{default_degrees, extract_b_series, gyz_predict, GyzError};
use severi_core::modforms::FormCatalog;
use severi_core::nodepoly::{
    bell_polynomial, fit_node_polynomial, log_forms, plane_invariants, threshold, Invariants, NodePolyError,
};
use severi_core::tangency::{TangencyError, TangencySeq};

use output::{
    BellDoc, CacheDoc, CountDoc, Document, ErrorDoc, Format, InvariantsDoc, PredictDoc, TableDoc, ThresholdDoc,
};

const DEFAULT_CACHE: &str = "./severi.cache";
const CACHE_ENV: &str = "SEVERI_CACHE";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("format {0} is only supported by `table`")]
    UnsupportedFormat(&'static str),
    #[error(transparent)]
    Engine(#[from] ChError),
    #[error(transparent)]
    NodePoly(#[from] NodePolyError),
    #[error(transparent)]
    Gyz(#[from] GyzError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Tangency(#[from] TangencyError),
    #[error("{0}")]
    Internal(String),
}

fn engine_kind(e: &ChError) -> &'static str {
    match e {
        ChError::InvalidState(_) => "invalid_state",
        ChError::CacheCorruption { .. } => "cache_corruption",
        ChError::Io(_) => "io",
        ChError::VersionMismatch { .. } => "cache_version_mismatch",
        ChError::Parse { .. } => "cache_parse",
    }
}

fn nodepoly_kind(e: &NodePolyError) -> &'static str {
    match e {
        NodePolyError::Engine(e) => engine_kind(e),
        NodePolyError::DegreeCheckFailed { .. } => "degree_check_failed",
        NodePolyError::DegreeDeficient { .. } => "degree_deficient",
        NodePolyError::NotQuadratic { .. } => "not_quadratic",
        NodePolyError::InvalidInvariants { .. } => "invalid_invariants",
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::UnsupportedFormat(_) => "unsupported_format",
            CliError::Engine(e) => engine_kind(e),
            CliError::NodePoly(e) => nodepoly_kind(e),
            CliError::Gyz(e) => match e {
                GyzError::Engine(e) => engine_kind(e),
                GyzError::InvalidInvariants(e) => nodepoly_kind(e),
                GyzError::InconsistentSystem { .. } => "inconsistent_system",
                GyzError::NonIntegralPrediction { .. } => "non_integral_prediction",
                GyzError::Series(_) => "series",
                GyzError::DegreeTooSmall { .. }
                | GyzError::InvalidDegreeList(_)
                | GyzError::FormsTooShort { .. }
                | GyzError::SolutionTooShort { .. } => "invalid_argument",
            },
            CliError::Series(_) => "series",
            CliError::Tangency(_) => "invalid_state",
            CliError::Internal(_) => "internal",
        }
    }

    /// 2 when the mathematics disagrees with itself, 1 otherwise.
    fn exit_code(&self) -> u8 {
        match self.kind() {
            "cache_corruption"
            | "degree_check_failed"
            | "degree_deficient"
            | "not_quadratic"
            | "inconsistent_system"
            | "non_integral_prediction"
            | "internal" => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "severi", version, about = "Exact Severi degrees and node polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; csv is available for `table` only.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Cache file [default: $SEVERI_CACHE or ./severi.cache]
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    /// Neither read nor write the cache file.
    #[arg(long, global = true, conflicts_with = "cache")]
    no_cache: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Severi degree N^{d,δ}, or the relative degree N^{d,δ}(α,β).
    Count {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        delta: u32,
        /// Tangency sequence, e.g. "2,0,1".
        #[arg(long)]
        alpha: Option<TangencySeq>,
        #[arg(long)]
        beta: Option<TangencySeq>,
    },
    /// N^{d,δ} for 1 ≤ d ≤ dmax, 0 ≤ δ ≤ deltamax.
    Table {
        #[arg(long)]
        dmax: u32,
        #[arg(long)]
        deltamax: u32,
    },
    /// Node polynomial T_δ(d).
    Nodepoly {
        #[arg(long)]
        delta: u32,
    },
    /// Least degree from which T_δ agrees with the Severi degree.
    Threshold {
        #[arg(long)]
        delta: u32,
    },
    /// Quadratic log forms q_1 … q_deltamax.
    Logforms {
        #[arg(long)]
        deltamax: u32,
    },
    /// Complete exponential Bell polynomial P_δ(a_1, …, a_δ).
    Bell {
        #[arg(long)]
        delta: usize,
        /// Rational arguments a_1 … a_δ.
        #[arg(allow_hyphen_values = true, required = true)]
        args: Vec<String>,
    },
    /// Extract B_1, B_2 to order q^M from plane Severi degrees.
    Bseries(ExtractArgs),
    /// Predict n_0 … n_M for given invariants.
    Predict {
        #[command(flatten)]
        extract: ExtractArgs,
        /// Plane curves of degree d.
        #[arg(long, conflicts_with = "invariants", required_unless_present = "invariants")]
        d: Option<u32>,
        /// x,y,z,t = L², L·K, K², c₂(S).
        #[arg(long, value_parser = parse_invariants, allow_hyphen_values = true)]
        invariants: Option<Invariants>,
    },
    /// Dump u, B_3, B_4 and Δ to order q^M.
    Forms {
        #[arg(long)]
        order: usize,
    },
    /// Inspect or clear the cache file.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    order: usize,
    /// Comma-separated degrees [default: M+1,…,M+5]
    #[arg(long, value_delimiter = ',')]
    dlist: Option<Vec<u32>>,
}

#[derive(Debug, Subcommand)]
enum CacheAction {
    Stats,
    Clear,
}

fn parse_invariants(s: &str) -> Result<Invariants, String> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let [x, y, z, t] = v[..] else {
        return Err(format!("expected x,y,z,t, got {} values", v.len()));
    };
    let inv = Invariants { x, y, z, t };
    inv.validate().map_err(|e| e.to_string())?;
    Ok(inv)
}

fn cache_path(cli: &Cli) -> Option<PathBuf> {
    if cli.no_cache {
        return None;
    }
    cli.cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| Some(PathBuf::from(DEFAULT_CACHE)))
}

fn open_cache(path: Option<&PathBuf>) -> Result<CacheStore, CliError> {
    match path {
        Some(p) if p.exists() => Ok(CacheStore::load(p)?),
        _ => Ok(CacheStore::new()),
    }
}

fn progress(msg: std::fmt::Arguments) {
    eprintln!("severi: {msg}");
}

fn extraction_degrees(args: &ExtractArgs) -> Result<Vec<u32>, CliError> {
    if args.order == 0 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    Ok(args.dlist.clone().unwrap_or_else(|| default_degrees(args.order)))
}

fn run(cli: &Cli) -> Result<Document, CliError> {
    let path = cache_path(cli);
    if let Command::Cache { action } = &cli.command {
        let path = path.ok_or_else(|| CliError::Usage("cache commands need a cache path".into()))?;
        return cache_command(action, &path);
    }

    let cache = open_cache(path.as_ref())?;
    let before = cache.len();
    let doc = compute(&cli.command, &cache)?;
    if let Some(p) = path.filter(|_| cache.len() != before) {
        cache.save(&p)?;
    }
    Ok(doc)
}

fn compute(command: &Command, cache: &CacheStore) -> Result<Document, CliError> {
    match command {
        Command::Count { d, delta, alpha, beta } => {
            let value = if alpha.is_some() || beta.is_some() {
                let a = alpha.clone().unwrap_or_default();
                let b = beta.clone().unwrap_or_default();
                relative_severi(*d, *delta, a, b, cache)?
            } else {
                severi_degree(*d, *delta, cache)?
            };
            Document::json(&CountDoc {
                d: *d,
                delta: *delta,
                alpha: alpha.as_ref().map(ToString::to_string),
                beta: beta.as_ref().map(ToString::to_string),
                value,
            })
        }
        Command::Table { dmax, deltamax } => {
            progress(format_args!("computing N^{{d,δ}} for d ≤ {dmax}, δ ≤ {deltamax}"));
            let rows = severi_table(*dmax, *deltamax, cache)?;
            Ok(Document::Table(TableDoc::from_rows(*dmax, *deltamax, rows)))
        }
        Command::Nodepoly { delta } => Document::json(&fit_node_polynomial(*delta, cache)?),
        Command::Threshold { delta } => {
            let report = threshold(*delta, cache)?;
            Document::json(&ThresholdDoc {
                delta: report.delta,
                threshold: report.threshold,
            })
        }
        Command::Logforms { deltamax } => {
            progress(format_args!("fitting T_1 … T_{deltamax}"));
            Document::json(&log_forms(*deltamax, cache)?)
        }
        Command::Bell { delta, args } => {
            if args.len() < *delta {
                return Err(CliError::Usage(format!(
                    "P_{delta} needs {delta} arguments, got {}",
                    args.len()
                )));
            }
            let a = args.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
            Document::json(&BellDoc {
                delta: *delta,
                args: a.iter().map(rat_to_string).collect(),
                value: rat_to_string(&bell_polynomial(*delta, &a)),
            })
        }
        Command::Bseries(args) => {
            let degrees = extraction_degrees(args)?;
            progress(format_args!(
                "extracting B_1, B_2 to q^{} from d = {degrees:?}",
                args.order
            ));
            let forms = FormCatalog::new(args.order);
            Document::json(&extract_b_series(args.order, &degrees, cache, &forms)?)
        }
        Command::Predict { extract, d, invariants } => {
            let degrees = extraction_degrees(extract)?;
            let inv = match (d, invariants) {
                (_, Some(inv)) => *inv,
                (Some(d), None) => plane_invariants(*d),
                (None, None) => return Err(CliError::Usage("give --d or --invariants".into())),
            };
            progress(format_args!(
                "extracting B_1, B_2 to q^{} from d = {degrees:?}",
                extract.order
            ));
            let forms = FormCatalog::new(extract.order);
            let sol = extract_b_series(extract.order, &degrees, cache, &forms)?;
            let values = gyz_predict(&inv, &sol, &forms, extract.order)?;
            Document::json(&PredictDoc {
                invariants: InvariantsDoc {
                    x: inv.x,
                    y: inv.y,
                    z: inv.z,
                    t: inv.t,
                },
                order: extract.order,
                d_used: sol.d_used,
                values,
            })
        }
        Command::Forms { order } => Document::json(&FormCatalog::new(*order)),
        Command::Cache { .. } => unreachable!("handled before the cache is opened"),
    }
}

fn cache_command(action: &CacheAction, path: &PathBuf) -> Result<Document, CliError> {
    let cache = match action {
        CacheAction::Stats => open_cache(Some(path))?,
        CacheAction::Clear => {
            if path.exists() {
                std::fs::remove_file(path).map_err(ChError::from)?;
            }
            CacheStore::new()
        }
    };
    let bytes = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
    Document::json(&CacheDoc {
        path: path.display().to_string(),
        version: cache.version(),
        entries: cache.len(),
        bytes,
    })
}

fn report(err: &CliError) -> ExitCode {
    let code = err.exit_code();
    let doc = ErrorDoc {
        error: err.kind(),
        message: err.to_string(),
        exit_code: code,
    };
    eprintln!("{}", serde_json::to_string(&doc).unwrap_or_else(|_| err.to_string()));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return report(&CliError::Usage(first.to_owned()));
        }
    };
    let rendered = run(&cli).and_then(|doc| doc.render(cli.format));
    match rendered {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => report(&e),
    }
}
