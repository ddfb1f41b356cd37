//! Flag and config-file parsing into a validated [`RunConfig`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command as ClapCommand};
use cuspsum_core::bounds::{ExponentPair, DEFAULT_KNOB};
use cuspsum_core::moments::DeltaRule;
use cuspsum_core::spacing::SpacingQuery;
use cuspsum_core::sums::{make_twist, RationalTwist, ShortSumSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Gen,
    Validate,
    Sum,
    Voronoi,
    Moment,
    Ladder,
    Census,
    Spacing,
    Bounds,
    CheckAll,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Gen,
        Command::Validate,
        Command::Sum,
        Command::Voronoi,
        Command::Moment,
        Command::Ladder,
        Command::Census,
        Command::Spacing,
        Command::Bounds,
        Command::CheckAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Validate => "validate",
            Command::Sum => "sum",
            Command::Voronoi => "voronoi",
            Command::Moment => "moment",
            Command::Ladder => "ladder",
            Command::Census => "census",
            Command::Spacing => "spacing",
            Command::Bounds => "bounds",
            Command::CheckAll => "check-all",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Command::Gen => "Generate and cache the normalized coefficient table",
            Command::Validate => "Audit a cached table",
            Command::Sum => "Twisted short sum: one value with --x, otherwise the whole step function",
            Command::Voronoi => "Truncated main-term error profile of the long sum",
            Command::Moment => "Exact continuous moment of the short sum",
            Command::Ladder => "Moments along an M ladder and their growth slope",
            Command::Census => "Well-spaced large values of the short sum",
            Command::Spacing => "Count near-coincident root sums",
            Command::Bounds => "Evaluate a bound calculator",
            Command::CheckAll => "Run the acceptance suite",
        }
    }

    fn params(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Command::Gen | Command::Validate => &[("n-max", "table length (default 100000)")],
            Command::Sum => &[M, DELTA, K, H, ("x", "evaluation point in [M, 2M]")],
            Command::Voronoi => &[
                ("x", "summation length"),
                K,
                H,
                ("N", "comma-separated truncations (default 16,64,256,1024,4096)"),
            ],
            Command::Moment => &[M, DELTA, K, H, A, PARTS],
            Command::Ladder => &[
                A,
                K,
                H,
                ("ladder", "M values: a,b,c or 2^a..2^b (default 2^12..2^17)"),
                ("delta-exp", "Delta = coef * M^exp (default 0.4)"),
                ("delta-coef", "default 1"),
            ],
            Command::Census => &[
                M,
                DELTA,
                K,
                H,
                ("V", "threshold; defaults to the --quantile of |S|"),
                ("quantile", "default 0.99"),
                ("knob", "delta knob of the bound (default 0.05)"),
            ],
            Command::Spacing => &[
                ("L", "range parameter"),
                ("delta", "spacing threshold"),
                ("omega", "root order (default 2)"),
                ("method", "pairsum or bruteforce (default pairsum)"),
                ("k", "corollary modulus (default 1)"),
                ("M", "corollary length (default 1e6)"),
                ("theta", "corollary knob (default 0.05)"),
            ],
            Command::Bounds => &[],
            Command::CheckAll => &[("seed", "RNG seed (default 7)")],
        }
    }
}

const M: (&str, &str) = ("M", "window start");
const DELTA: (&str, &str) = ("delta", "window length Delta");
const K: (&str, &str) = ("k", "twist modulus (default 1)");
const H: (&str, &str) = ("h", "twist numerator (default 0 when k = 1)");
const A: (&str, &str) = ("A", "moment order");
const PARTS: (&str, &str) = ("parts", "parallel partitions (default 1)");

const THEOREMS: [&str; 6] = ["thm1", "thm2", "thm3", "thm4", "thm5", "longsum"];

fn theorem_params(name: &str) -> &'static [&'static str] {
    match name {
        "thm1" => &["k", "M", "delta-len", "eps"],
        "thm2" => &["k", "M", "delta-len", "V", "p", "q", "delta"],
        "thm3" => &["alpha", "beta", "gamma", "V0", "A", "k", "M", "delta-len", "p", "q", "eps"],
        "thm4" => &["k", "M", "A", "eps"],
        "thm5" => &["M", "delta-len", "A", "eps"],
        "longsum" => &["alpha", "beta", "A", "k", "M", "p", "q", "eps"],
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Calculator name for `bounds`.
    pub theorem: Option<String>,
    pub params: BTreeMap<String, String>,
    pub coeff_cache_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
}

fn common_args(cmd: ClapCommand) -> ClapCommand {
    cmd.arg(Arg::new("config").long("config").value_name("FILE").help("TOML file of parameters; flags win"))
        .arg(Arg::new("cache").long("cache").value_name("FILE").help("coefficient cache file"))
        .arg(Arg::new("output").long("output").short('o').value_name("FILE"))
        .arg(
            Arg::new("format")
                .long("format")
                .value_parser(["csv", "json"])
                .help("output format"),
        )
}

fn with_params(mut cmd: ClapCommand, params: &[(&'static str, &'static str)]) -> ClapCommand {
    for &(name, help) in params {
        cmd = cmd.arg(Arg::new(name).long(name).value_name("VALUE").help(help).allow_hyphen_values(true));
    }
    cmd
}

pub fn cli() -> ClapCommand {
    let mut root = ClapCommand::new("cuspsum")
        .about("Short sums of cusp form coefficients: experiments and bound calculators")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for c in Command::ALL {
        let mut sub = common_args(ClapCommand::new(c.name()).about(c.about()));
        if c == Command::Bounds {
            sub = sub.subcommand_required(true);
            for t in THEOREMS {
                let params: Vec<(&'static str, &'static str)> = theorem_params(t).iter().map(|&p| (p, "")).collect();
                sub = sub.subcommand(with_params(common_args(ClapCommand::new(t)), &params));
            }
        } else {
            sub = with_params(sub, c.params());
        }
        root = root.subcommand(sub);
    }
    root
}

fn collect(m: &ArgMatches, names: &[&str], into: &mut BTreeMap<String, String>) {
    for n in names {
        if let Some(v) = m.get_one::<String>(n) {
            into.insert((*n).to_string(), v.clone());
        }
    }
}

fn file_params(path: &Path, allowed: &[&str]) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Resource(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (k, v) in table {
        let s = match v {
            toml::Value::String(s) => s,
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(b) => b.to_string(),
            toml::Value::Array(a) => a
                .iter()
                .map(|x| match x {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            _ => return Err(CliError::Usage(format!("config key `{k}`: unsupported value"))),
        };
        if !allowed.contains(&k.as_str()) {
            return Err(CliError::Usage(format!("config key `{k}` is not a parameter of this command")));
        }
        out.insert(k, s);
    }
    Ok(out)
}

/// Parses argv (program name first) into a validated config.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = cli().try_get_matches_from(argv).map_err(CliError::Clap)?;
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let command = Command::ALL.into_iter().find(|c| c.name() == name).expect("declared above");
    let (theorem, leaf) = if command == Command::Bounds {
        let (t, m) = sub.subcommand().expect("subcommand required");
        (Some(t.to_string()), m)
    } else {
        (None, sub)
    };
    let names: Vec<&str> = match &theorem {
        Some(t) => theorem_params(t).to_vec(),
        None => command.params().iter().map(|p| p.0).collect(),
    };
    let mut allowed = names.clone();
    allowed.extend(["cache", "output", "format"]);

    let mut params = match leaf.get_one::<String>("config") {
        Some(p) => file_params(Path::new(p), &allowed)?,
        None => BTreeMap::new(),
    };
    collect(leaf, &names, &mut params);
    for key in ["cache", "output", "format"] {
        if let Some(v) = leaf.get_one::<String>(key) {
            params.insert(key.into(), v.clone());
        }
    }
    let coeff_cache_path = params.remove("cache").map(PathBuf::from);
    let output_path = params.remove("output").map(PathBuf::from);
    let default_format = if command == Command::Bounds { Format::Json } else { Format::Csv };
    let output_format = match params.remove("format").as_deref() {
        None => default_format,
        Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => return Err(CliError::Usage(format!("format `{other}`: expected csv or json"))),
    };
    let config = RunConfig {
        command,
        theorem,
        params,
        coeff_cache_path,
        output_path,
        output_format,
    };
    config.job()?;
    Ok(config)
}

/// Parses a number; accepts `2^e` besides the usual float syntax.
pub fn parse_num(key: &str, s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let v = match s.split_once('^') {
        Some((b, e)) => match (b.trim().parse::<f64>(), e.trim().parse::<f64>()) {
            (Ok(b), Ok(e)) => Ok(b.powf(e)),
            _ => Err(()),
        },
        None => s.parse::<f64>().map_err(|_| ()),
    };
    match v {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Usage(format!("`{key}`: cannot parse `{s}` as a number"))),
    }
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_num(key, a)?, parse_num(key, b)?);
        if !(a > 0.0 && b >= a) {
            return Err(CliError::Usage(format!("`{key}`: empty range `{s}`")));
        }
        let mut out = vec![a];
        while out.last().unwrap() * 2.0 <= b * (1.0 + 1e-12) {
            out.push(out.last().unwrap() * 2.0);
        }
        return Ok(out);
    }
    s.split(',').map(|p| parse_num(key, p)).collect()
}

/// A config checked and converted to module types.
#[derive(Debug, Clone)]
pub enum Job {
    Gen { n_max: usize },
    Validate { n_max: Option<usize> },
    Sum { spec: ShortSumSpec, x: Option<f64> },
    Voronoi { x: f64, twist: RationalTwist, truncations: Vec<f64> },
    Moment { spec: ShortSumSpec, a: f64, parts: usize },
    Ladder { a: f64, twist: RationalTwist, ladder: Vec<f64>, rule: DeltaRule },
    Census { spec: ShortSumSpec, v: Option<f64>, quantile: f64, knob: f64 },
    Spacing { query: SpacingQuery, bruteforce: bool },
    Bounds { theorem: String, values: BTreeMap<String, f64>, pair: ExponentPair },
    CheckAll { seed: u64 },
}

impl RunConfig {
    fn get(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.params.get(key).map(|s| parse_num(key, s)).transpose()
    }

    fn require(&self, key: &str) -> Result<f64, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `--{key}`")))
    }

    fn or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn integer(&self, key: &str, v: f64) -> Result<u64, CliError> {
        if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(53) {
            Ok(v as u64)
        } else {
            Err(CliError::Usage(format!("`{key}`: expected a non-negative integer, got {v}")))
        }
    }

    fn twist(&self) -> Result<RationalTwist, CliError> {
        let k = self.or("k", 1.0)?;
        let k = self.integer("k", k)?;
        let h = self.or("h", if k == 1 { 0.0 } else { 1.0 })?;
        if h.fract() != 0.0 {
            return Err(CliError::Usage(format!("`h`: expected an integer, got {h}")));
        }
        Ok(make_twist(h as i64, k)?)
    }

    fn short_spec(&self) -> Result<ShortSumSpec, CliError> {
        Ok(ShortSumSpec::new(self.require("M")?, self.require("delta")?, self.twist()?)?)
    }

    fn pair(&self) -> Result<ExponentPair, CliError> {
        let d = ExponentPair::HALF;
        Ok(ExponentPair::new(self.or("p", d.p())?, self.or("q", d.q())?)?)
    }

    pub fn job(&self) -> Result<Job, CliError> {
        let job = match self.command {
            Command::Gen => {
                let n = self.or("n-max", cuspsum_core::coefficients::DEFAULT_N_MAX as f64)?;
                Job::Gen {
                    n_max: self.integer("n-max", n)? as usize,
                }
            }
            Command::Validate => Job::Validate {
                n_max: self.get("n-max")?.map(|n| self.integer("n-max", n)).transpose()?.map(|n| n as usize),
            },
            Command::Sum => Job::Sum {
                spec: self.short_spec()?,
                x: self.get("x")?,
            },
            Command::Voronoi => {
                let truncations = match self.params.get("N") {
                    Some(s) => parse_list("N", s)?,
                    None => vec![16.0, 64.0, 256.0, 1024.0, 4096.0],
                };
                let job = Job::Voronoi {
                    x: self.require("x")?,
                    twist: self.twist()?,
                    truncations,
                };
                if let Job::Voronoi { x, twist, .. } = &job {
                    cuspsum_core::voronoi::VoronoiSpec::new(*x, 1.0, *twist)?;
                }
                job
            }
            Command::Moment => {
                let spec = self.short_spec()?;
                let a = self.require("A")?;
                cuspsum_core::moments::MomentSpec::new(a, spec)?;
                let parts = self.or("parts", 1.0)?;
                let parts = self.integer("parts", parts)? as usize;
                if parts == 0 {
                    return Err(CliError::Usage("`parts`: must be at least 1".into()));
                }
                Job::Moment { spec, a, parts }
            }
            Command::Ladder => {
                let ladder = parse_list("ladder", self.params.get("ladder").map_or("2^12..2^17", |s| s.as_str()))?;
                let rule = DeltaRule {
                    coefficient: self.or("delta-coef", 1.0)?,
                    exponent: self.or("delta-exp", 0.4)?,
                };
                let a = self.require("A")?;
                if !(a >= 1.0) {
                    return Err(CliError::Usage(format!("`A`: must be >= 1, got {a}")));
                }
                let twist = self.twist()?;
                for &m in &ladder {
                    ShortSumSpec::new(m, rule.delta(m), twist)?;
                }
                Job::Ladder { a, twist, ladder, rule }
            }
            Command::Census => {
                let quantile = self.or("quantile", 0.99)?;
                if !(0.0..=1.0).contains(&quantile) {
                    return Err(CliError::Usage(format!("`quantile`: must lie in [0, 1], got {quantile}")));
                }
                Job::Census {
                    spec: self.short_spec()?,
                    v: self.get("V")?,
                    quantile,
                    knob: self.or("knob", DEFAULT_KNOB)?,
                }
            }
            Command::Spacing => {
                let q = SpacingQuery::new(self.require("L")?, self.require("delta")?, self.or("omega", 2.0)?)?
                    .with_corollary(self.or("k", 1.0)?, self.or("M", 1e6)?, self.or("theta", 0.05)?)?;
                let bruteforce = match self.params.get("method").map(|s| s.as_str()) {
                    None | Some("pairsum") => false,
                    Some("bruteforce") => true,
                    Some(other) => {
                        return Err(CliError::Usage(format!(
                            "`method`: expected pairsum or bruteforce, got `{other}`"
                        )))
                    }
                };
                Job::Spacing { query: q, bruteforce }
            }
            Command::Bounds => {
                let theorem = self.theorem.clone().expect("set for bounds");
                let mut values = BTreeMap::new();
                for &key in theorem_params(&theorem) {
                    if let Some(v) = self.get(key)? {
                        values.insert(key.to_string(), v);
                    }
                }
                Job::Bounds {
                    theorem,
                    values,
                    pair: self.pair()?,
                }
            }
            Command::CheckAll => {
                let seed = self.or("seed", 7.0)?;
                Job::CheckAll {
                    seed: self.integer("seed", seed)?,
                }
            }
        };
        Ok(job)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig, CliError> {
        parse_config(std::iter::once("cuspsum").chain(args.split_whitespace()))
    }

    #[test]
    fn moment_config() {
        let c = parse("moment --M 10000 --delta 100 --k 1 --h 1 --A 4").unwrap();
        assert_eq!(c.command, Command::Moment);
        assert_eq!(c.params["M"], "10000");
        assert_eq!(c.output_format, Format::Csv);
    }

    #[test]
    fn rejects_bad_window_and_twist() {
        let e = parse("moment --M 100 --delta 200 --A 4").unwrap_err();
        assert!(e.to_string().contains("Delta"), "{e}");
        let e = parse("sum --M 100 --delta 10 --k 4 --h 2").unwrap_err();
        assert!(e.to_string().contains("coprime"), "{e}");
        assert!(matches!(parse("moment --M 100 --A 4"), Err(CliError::Usage(_))));
        assert!(matches!(parse("frobnicate"), Err(CliError::Clap(_))));
    }

    #[test]
    fn numbers_and_lists() {
        assert_eq!(parse_num("x", "2^12").unwrap(), 4096.0);
        assert_eq!(parse_num("x", "1e-9").unwrap(), 1e-9);
        assert!(parse_num("x", "abc").is_err());
        assert_eq!(parse_list("l", "2^2..2^4").unwrap(), vec![4.0, 8.0, 16.0]);
        assert_eq!(parse_list("l", "1,3").unwrap(), vec![1.0, 3.0]);
    }

    #[test]
    fn bounds_defaults_to_json() {
        let c = parse("bounds thm1 --k 1 --M 10000 --delta-len 100 --eps 0").unwrap();
        assert_eq!(c.theorem.as_deref(), Some("thm1"));
        assert_eq!(c.output_format, Format::Json);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "M = 5000\ndelta = 40\nA = 2\n").unwrap();
        let c = parse(&format!("moment --config {} --A 4", path.display())).unwrap();
        assert_eq!(c.params["M"], "5000");
        assert_eq!(c.params["A"], "4");
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(parse(&format!("moment --config {}", path.display())).is_err());
    }
}
