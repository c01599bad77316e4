use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use serde_json::Value;
use toddsum::{Backend, FnSpec, HPolytope, Integrand, PolyhomSymbol};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Validate,
    Count,
    Sum,
    Expand,
    Estimate,
    Converge,
    Ehrhart,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Count => "count",
            Command::Sum => "sum",
            Command::Expand => "expand",
            Command::Estimate => "estimate",
            Command::Converge => "converge",
            Command::Ehrhart => "ehrhart",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Numeric,
}

/// Flags shared by every subcommand. Each one overrides the matching field of
/// `--config`.
#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// RunConfig JSON file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Polytope JSON file
    #[arg(long)]
    pub polytope: Option<String>,
    /// Function spec: a JSON file, inline JSON, or an expression such as "exp(-x1^2)"
    #[arg(long = "fn")]
    pub function: Option<String>,
    /// Symbol spec for `ehrhart`: a JSON file or inline JSON
    #[arg(long)]
    pub symbol: Option<String>,
    /// Dilations: "1..10", "5,10,20" or a mix such as "1..4,8,16"
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Truncation order M
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// JSON report path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV table path (`converge`)
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// SVG plot path (`converge`)
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Worker threads; defaults to TODDSUM_THREADS or the available parallelism
    #[arg(long)]
    pub threads: Option<usize>,
    /// Two fitting ranges for `ehrhart`, e.g. "20..40;41..80"
    #[arg(long)]
    pub ranges: Option<String>,
}

/// The on-disk RunConfig. Relative paths resolve against the file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub polytope: Option<Value>,
    #[serde(rename = "fn")]
    pub function: Option<Value>,
    pub symbol: Option<Value>,
    #[serde(rename = "N")]
    pub n: Option<Value>,
    pub order: Option<usize>,
    pub backend: Option<Backend>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub threads: Option<usize>,
    pub ranges: Option<Vec<Vec<u64>>>,
}

/// A source that is either a path or an inline document.
#[derive(Clone, Debug)]
enum Source {
    Path(PathBuf),
    Inline(Value),
    Text(String),
}

#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    polytope: Option<Source>,
    function: Option<Source>,
    symbol: Option<Source>,
    pub ns: Option<Vec<u64>>,
    pub order: Option<usize>,
    pub backend: Option<Backend>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub threads: Option<usize>,
    pub ranges: Option<[Vec<u64>; 2]>,
}

fn text_source(s: &str) -> Source {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        match serde_json::from_str(t) {
            Ok(v) => Source::Inline(v),
            Err(_) => Source::Text(s.to_string()),
        }
    } else if Path::new(s).is_file() {
        Source::Path(PathBuf::from(s))
    } else {
        Source::Text(s.to_string())
    }
}

fn value_source(v: Value, base: &Path) -> Source {
    match v {
        Value::String(s) => {
            let p = base.join(&s);
            if p.is_file() {
                Source::Path(p)
            } else {
                Source::Text(s)
            }
        }
        other => Source::Inline(other),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Parses "1..10", "5,10,20" or a comma-separated mix.
pub fn parse_n_list(s: &str) -> CliResult<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::config(format!("bad N list entry `{part}`"));
        match part.split_once("..") {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b = b.trim();
                let b: u64 = b.strip_prefix('=').unwrap_or(b).parse().map_err(|_| bad())?;
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

fn n_from_value(v: &Value) -> CliResult<Vec<u64>> {
    match v {
        Value::String(s) => parse_n_list(s),
        Value::Number(n) => n.as_u64().map(|n| vec![n]).ok_or_else(|| CliError::config("N must be a positive integer")),
        Value::Array(items) => items
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| CliError::config("N entries must be positive integers")))
            .collect(),
        _ => Err(CliError::config("N must be a list, a range string or an integer")),
    }
}

fn check_ns(ns: &[u64]) -> CliResult<()> {
    if ns.is_empty() {
        return Err(CliError::config("N list is empty"));
    }
    if ns[0] == 0 {
        return Err(CliError::config("N must be positive"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config("N must be strictly increasing"));
    }
    Ok(())
}

fn parse_ranges(s: &str) -> CliResult<[Vec<u64>; 2]> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 2 {
        return Err(CliError::config("--ranges needs two lists separated by `;`"));
    }
    Ok([parse_n_list(parts[0])?, parse_n_list(parts[1])?])
}

impl RunConfig {
    pub fn resolve(command: Option<Command>, flags: &Flags) -> CliResult<RunConfig> {
        let (file, base) = match &flags.config {
            Some(path) => {
                let text = read(path)?;
                let file: ConfigFile =
                    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let command = command
            .or(file.command)
            .ok_or_else(|| CliError::config("no command given on the command line or in the config"))?;
        let pick = |flag: &Option<String>, value: Option<Value>| -> Option<Source> {
            flag.as_deref().map(text_source).or_else(|| value.map(|v| value_source(v, &base)))
        };
        let ns = match (&flags.n, &file.n) {
            (Some(s), _) => Some(parse_n_list(s)?),
            (None, Some(v)) => Some(n_from_value(v)?),
            (None, None) => None,
        };
        if let Some(ns) = &ns {
            check_ns(ns)?;
        }
        let ranges = match (&flags.ranges, file.ranges) {
            (Some(s), _) => Some(parse_ranges(s)?),
            (None, Some(r)) => {
                let [a, b]: [Vec<u64>; 2] =
                    r.try_into().map_err(|_| CliError::config("ranges needs exactly two lists"))?;
                Some([a, b])
            }
            (None, None) => None,
        };
        if let Some(r) = &ranges {
            for range in r {
                check_ns(range)?;
            }
        }
        let relative = |p: Option<PathBuf>| p.map(|p| if p.is_absolute() { p } else { base.join(p) });
        Ok(RunConfig {
            command,
            polytope: pick(&flags.polytope, file.polytope),
            function: pick(&flags.function, file.function),
            symbol: pick(&flags.symbol, file.symbol),
            ns,
            order: flags.order.or(file.order),
            backend: flags
                .backend
                .map(|b| match b {
                    BackendArg::Exact => Backend::Exact,
                    BackendArg::Numeric => Backend::Numeric,
                })
                .or(file.backend),
            out: flags.out.clone().or(relative(file.out)),
            csv: flags.csv.clone().or(relative(file.csv)),
            plot: flags.plot.clone().or(relative(file.plot)),
            threads: flags.threads.or(file.threads),
            ranges,
        })
    }

    pub fn polytope(&self) -> CliResult<HPolytope> {
        let text = match &self.polytope {
            None => return Err(CliError::config("--polytope is required")),
            Some(Source::Path(p)) => read(p)?,
            Some(Source::Inline(v)) => v.to_string(),
            Some(Source::Text(s)) => return Err(CliError::config(format!("polytope file `{s}` not found"))),
        };
        Ok(HPolytope::from_json(&text)?)
    }

    pub fn integrand(&self, nvars: usize) -> CliResult<Integrand> {
        let spec = match &self.function {
            None => return Err(CliError::config("--fn is required")),
            Some(Source::Path(p)) => FnSpec::from_json(&read(p)?)?,
            Some(Source::Inline(v)) => FnSpec::from_json(&v.to_string())?,
            Some(Source::Text(s)) => FnSpec::Expr { src: s.clone(), support: None },
        };
        let f = spec.to_integrand(nvars)?;
        if self.backend == Some(Backend::Exact) && f.as_poly().is_none() {
            return Err(CliError::config("backend=exact requires a polynomial integrand"));
        }
        Ok(f)
    }

    pub fn symbol(&self, nvars: usize) -> CliResult<PolyhomSymbol> {
        let text = match &self.symbol {
            None => return Err(CliError::config("--symbol is required")),
            Some(Source::Path(p)) => read(p)?,
            Some(Source::Inline(v)) => v.to_string(),
            Some(Source::Text(s)) => {
                return Err(CliError::config(format!("symbol spec `{s}` is neither a file nor JSON")))
            }
        };
        Ok(PolyhomSymbol::from_json(&text, nvars)?)
    }

    pub fn require_ns(&self) -> CliResult<&[u64]> {
        self.ns.as_deref().ok_or_else(|| CliError::config("--N is required"))
    }

    /// Explicit count, then TODDSUM_THREADS, then rayon's default.
    pub fn thread_count(&self) -> CliResult<Option<usize>> {
        if let Some(t) = self.threads {
            return Ok(Some(t));
        }
        match std::env::var("TODDSUM_THREADS") {
            Ok(s) => s
                .trim()
                .parse::<usize>()
                .map(Some)
                .map_err(|_| CliError::config(format!("TODDSUM_THREADS=`{s}` is not a thread count"))),
            Err(_) => Ok(None),
        }
    }
}
