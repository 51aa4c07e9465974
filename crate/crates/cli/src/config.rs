//! Run configuration: defaults, then a `key = value` file, then
//! `HEISCR_SEED`, then command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use heiscr_core::quotients::LatticeSpec;
use heiscr_core::subriemannian::BoxDomain;
use heiscr_core::{ConeParams, Model, MAX_N};
use serde::Serialize;

use crate::CliError;

pub const SEED_ENV: &str = "HEISCR_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file and then to defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// `key = value` file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// right | left | intermediate | deformed
    #[arg(long)]
    pub model: Option<String>,
    /// cone weights a_1,..,a_n (a single value is broadcast)
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// override every numeric tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// box half-width[,half-height]
    #[arg(long = "box", value_name = "W[,H]")]
    pub box_: Option<String>,
    #[arg(long = "lattice-k", conflicts_with = "lattice_l")]
    pub lattice_k: Option<u64>,
    /// l_1,..,l_n with l_i | l_{i+1}
    #[arg(long = "lattice-l")]
    pub lattice_l: Option<String>,
    #[arg(long = "L-schedule", value_name = "L1,L2,..")]
    pub l_schedule: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// lattice graph resolution (even, ≥ 8)
    #[arg(long)]
    pub resolution: Option<usize>,
    /// base point, flat coordinates x..,y..,z
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// target point, flat coordinates x..,y..,z
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub model: String,
    pub a: Vec<f64>,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
    pub box_half_width: f64,
    pub box_half_height: f64,
    pub lattice: LatticeSpec,
    pub l_schedule: Vec<f64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub resolution: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub a0: f64,
    pub b: Vec<f64>,
    pub t_max: f64,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| usage(format!("{}: '{}' is not a finite number", key, t)))
        })
        .collect()
}

fn parse_scalar<T: FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{}: cannot parse '{}'", key, s.trim())))
}

/// Reads `key = value` lines; `#` starts a comment. Keys are normalized to
/// lowercase with `-` replaced by `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {}", path.display(), e)))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", no + 1)))?;
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("config line {}: unknown key '{}'", no + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

const KNOWN_KEYS: &[&str] = &[
    "n", "model", "a", "seed", "samples", "tol", "box", "lattice_k", "lattice_l", "l_schedule",
    "out", "format", "resolution", "p", "q", "a0", "b", "t_max",
];

/// Per-command defaults that differ from the global ones.
#[derive(Clone, Debug)]
pub struct Defaults {
    pub samples: usize,
    pub lattice_k: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            samples: 20,
            lattice_k: 2,
        }
    }
}

impl CommonArgs {
    pub fn resolve(&self, defaults: &Defaults) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let env_seed = std::env::var(SEED_ENV).ok();
        resolve_with(self, &file, env_seed.as_deref(), defaults)
    }
}

/// Flag, else file entry, as a string.
fn pick(flag: Option<String>, file: &BTreeMap<String, String>, key: &str) -> Option<String> {
    flag.or_else(|| file.get(key).cloned())
}

pub fn resolve_with(
    args: &CommonArgs,
    file: &BTreeMap<String, String>,
    env_seed: Option<&str>,
    defaults: &Defaults,
) -> Result<RunConfig, CliError> {
    let a_raw = pick(args.a.clone(), file, "a");
    let a_list = a_raw.as_deref().map(|s| parse_list("a", s)).transpose()?;

    let n = match pick(args.n.map(|v| v.to_string()), file, "n") {
        Some(s) => parse_scalar::<usize>("n", &s)?,
        None => a_list.as_ref().map(|v| v.len().max(1)).unwrap_or(1),
    };
    if n == 0 || n > MAX_N {
        return Err(usage(format!("n must lie in 1..={}, got {}", MAX_N, n)));
    }

    let a = match a_list {
        None => vec![0.0; n],
        Some(v) if v.len() == 1 => vec![v[0]; n],
        Some(v) if v.len() == n => v,
        Some(v) => return Err(usage(format!("a has {} entries, expected 1 or n = {}", v.len(), n))),
    };
    ConeParams::new(a.clone()).map_err(|e| usage(format!("precondition a_i ≥ 0 violated: {}", e)))?;

    let model = pick(args.model.clone(), file, "model").unwrap_or_else(|| {
        if a.iter().any(|v| *v != 0.0) { "deformed" } else { "right" }.to_string()
    });
    let model = model.trim().to_ascii_lowercase();
    if model != "deformed" {
        Model::from_str(&model).map_err(|e| usage(e.to_string()))?;
    }

    let seed = match (args.seed, file.get("seed"), env_seed) {
        (Some(s), _, _) => s,
        (None, _, Some(e)) => parse_scalar::<u64>(SEED_ENV, e)?,
        (None, Some(f), None) => parse_scalar::<u64>("seed", f)?,
        (None, None, None) => 0,
    };

    let samples = match pick(args.samples.map(|v| v.to_string()), file, "samples") {
        Some(s) => parse_scalar::<usize>("samples", &s)?,
        None => defaults.samples,
    };
    if samples == 0 {
        return Err(usage("samples must be positive (empty sample set)"));
    }

    let tol = match pick(args.tol.map(|v| v.to_string()), file, "tol") {
        Some(s) => {
            let t = parse_scalar::<f64>("tol", &s)?;
            if !(t.is_finite() && t > 0.0) {
                return Err(usage(format!("tol must be positive, got {}", t)));
            }
            Some(t)
        }
        None => None,
    };

    let dom = BoxDomain::default();
    let (bw, bh) = match pick(args.box_.clone(), file, "box") {
        Some(s) => match parse_list("box", &s)?.as_slice() {
            [w] => (*w, *w),
            [w, h] => (*w, *h),
            _ => return Err(usage("box expects W or W,H")),
        },
        None => (dom.half_width, dom.half_height),
    };
    BoxDomain::new(bw, bh).map_err(|e| usage(e.to_string()))?;

    let (lattice_k, lattice_l) = if args.lattice_k.is_some() || args.lattice_l.is_some() {
        (args.lattice_k.map(|v| v.to_string()), args.lattice_l.clone())
    } else {
        (file.get("lattice_k").cloned(), file.get("lattice_l").cloned())
    };
    let lattice = match (lattice_k, lattice_l) {
        (Some(_), Some(_)) => return Err(usage("set only one of lattice-k and lattice-l")),
        (Some(k), None) => {
            LatticeSpec::uniform(n, parse_scalar::<u64>("lattice-k", &k)?).map_err(|e| usage(e.to_string()))?
        }
        (None, Some(l)) => {
            let ls: Vec<u64> = l
                .split(',')
                .map(|t| parse_scalar::<u64>("lattice-l", t))
                .collect::<Result<_, _>>()?;
            if ls.len() != n {
                return Err(usage(format!("lattice-l has {} entries, expected n = {}", ls.len(), n)));
            }
            LatticeSpec::graded(ls).map_err(|e| usage(e.to_string()))?
        }
        (None, None) => LatticeSpec::uniform(n, defaults.lattice_k).map_err(|e| usage(e.to_string()))?,
    };

    let l_schedule = match pick(args.l_schedule.clone(), file, "l_schedule") {
        Some(s) => parse_list("L-schedule", &s)?,
        None => vec![1.0, 10.0, 100.0, 1000.0],
    };
    if l_schedule.is_empty() || l_schedule.iter().any(|l| *l <= 0.0) || l_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("L-schedule must be positive and strictly increasing"));
    }

    let out = args.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    let format = match (args.format, file.get("format")) {
        (Some(f), _) => f,
        (None, Some(s)) => Format::from_str(s, true).map_err(|_| usage(format!("format: unknown '{}'", s)))?,
        (None, None) => Format::Json,
    };

    let resolution = match pick(args.resolution.map(|v| v.to_string()), file, "resolution") {
        Some(s) => parse_scalar::<usize>("resolution", &s)?,
        None => 32,
    };
    if resolution < 8 || resolution % 2 != 0 {
        return Err(usage(format!("resolution must be even and ≥ 8, got {}", resolution)));
    }

    let d = 2 * n + 1;
    let point = |key: &str, default: Vec<f64>| -> Result<Vec<f64>, CliError> {
        match pick(
            match key {
                "p" => args.p.clone(),
                _ => args.q.clone(),
            },
            file,
            key,
        ) {
            Some(s) => {
                let v = parse_list(key, &s)?;
                if v.len() != d {
                    return Err(usage(format!("{} needs {} coordinates, got {}", key, d, v.len())));
                }
                Ok(v)
            }
            None => Ok(default),
        }
    };
    let p = point("p", vec![0.0; d])?;
    let mut ez = vec![0.0; d];
    ez[d - 1] = 1.0;
    let q = point("q", ez)?;

    let a0 = match pick(args.a0.map(|v| v.to_string()), file, "a0") {
        Some(s) => parse_scalar::<f64>("a0", &s)?,
        None => 1.0,
    };
    let b = match pick(args.b.clone(), file, "b") {
        Some(s) => {
            let v = parse_list("b", &s)?;
            match v.len() {
                1 => vec![v[0]; n],
                m if m == n => v,
                m => return Err(usage(format!("b has {} entries, expected 1 or n = {}", m, n))),
            }
        }
        None => a.clone(),
    };

    let t_max = match pick(args.t_max.map(|v| v.to_string()), file, "t_max") {
        Some(s) => parse_scalar::<f64>("t-max", &s)?,
        None => 10.0,
    };
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(usage("t-max must be positive"));
    }

    Ok(RunConfig {
        n,
        model,
        a,
        seed,
        samples,
        tol,
        box_half_width: bw,
        box_half_height: bh,
        lattice,
        l_schedule,
        out,
        format,
        resolution,
        p,
        q,
        a0,
        b,
        t_max,
    })
}

impl RunConfig {
    pub fn domain(&self) -> BoxDomain {
        BoxDomain {
            half_width: self.box_half_width,
            half_height: self.box_half_height,
        }
    }

    pub fn cone(&self) -> ConeParams {
        ConeParams::new(self.a.clone()).expect("validated in resolve")
    }

    /// The configured model; `deformed` with `a = 0` is the right model.
    pub fn model(&self) -> Model {
        match self.model.as_str() {
            "deformed" => Model::Deformed(self.cone()),
            m => Model::from_str(m).expect("validated in resolve"),
        }
    }
}
