//! INI-style experiment configuration.
//!
//! Sections hold `key = value` pairs; `#` and `;` start comments. Numbers may
//! carry a `pi` factor (`160pi`, `0.5 * pi`). Every key not given falls back
//! to the reference geometry, and [`ExperimentConfig::to_ini`] writes the fully
//! resolved set back out so a run can be repeated from its own output.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use giantchain_core::chain_builder::ReorthMode;
use giantchain_core::field_model::{ProfileKind, Sector};
use giantchain_core::mps_engine::{TruncationPolicy, Variant};
use giantchain_core::reference_models::BellState;

/// A configuration problem, tied to the offending line when there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

struct Entry {
    value: String,
    line: usize,
    used: Cell<bool>,
}

/// Raw sections and entries, with the line each came from.
struct Ini {
    sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)>,
}

fn strip_comment(line: &str) -> &str {
    let cut = line
        .char_indices()
        .find(|&(i, c)| (c == '#' || c == ';') && (i == 0 || line[..i].ends_with(char::is_whitespace)))
        .map_or(line.len(), |(i, _)| i);
    line[..cut].trim()
}

impl Ini {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, (usize, BTreeMap<String, Entry>)> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = strip_comment(raw);
            if s.is_empty() {
                continue;
            }
            if let Some(rest) = s.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line, "section header is missing `]`"))?
                    .trim()
                    .to_ascii_lowercase();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(ConfigError::at(
                        line,
                        format!(
                            "unknown section [{name}]; expected one of {}",
                            SECTIONS.join(", ")
                        ),
                    ));
                }
                if let Some((first, _)) = sections.get(&name) {
                    return Err(ConfigError::at(
                        line,
                        format!("section [{name}] repeated (first at line {first})"),
                    ));
                }
                sections.insert(name.clone(), (line, BTreeMap::new()));
                current = Some(name);
                continue;
            }
            let (key, value) = s
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, format!("expected `key = value`, found `{s}`")))?;
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            if key.is_empty() {
                return Err(ConfigError::at(line, "missing key before `=`"));
            }
            if value.is_empty() {
                return Err(ConfigError::at(line, format!("missing value for `{key}`")));
            }
            let section = current
                .as_ref()
                .ok_or_else(|| ConfigError::at(line, format!("`{key}` appears before any [section]")))?;
            let entries = &mut sections.get_mut(section).expect("section registered").1;
            if let Some(prev) = entries.get(&key) {
                return Err(ConfigError::at(
                    line,
                    format!("`{key}` repeated in [{section}] (first at line {})", prev.line),
                ));
            }
            entries.insert(
                key,
                Entry {
                    value: value.to_string(),
                    line,
                    used: Cell::new(false),
                },
            );
        }
        Ok(Self { sections })
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        let e = self.sections.get(section)?.1.get(key)?;
        e.used.set(true);
        Some(e)
    }

    fn get<T: ConfigValue>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.entry(section, key) {
            None => Ok(None),
            Some(e) => T::parse(&e.value)
                .map(Some)
                .map_err(|why| ConfigError::at(e.line, format!("[{section}] {key}: {why}"))),
        }
    }

    fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.sections.get(section)?.1.get(key).map(|e| e.line)
    }

    fn check_unused(&self) -> Result<()> {
        for (name, (_, entries)) in &self.sections {
            if let Some((key, e)) = entries.iter().find(|(_, e)| !e.used.get()) {
                return Err(ConfigError::at(
                    e.line,
                    format!("unknown key `{key}` in [{name}]"),
                ));
            }
        }
        Ok(())
    }
}

const SECTIONS: &[&str] = &[
    "experiment",
    "waveguide",
    "emitter",
    "numerics",
    "scan",
    "dark_states",
    "two_atom",
    "limits",
];

trait ConfigValue: Sized {
    fn parse(s: &str) -> std::result::Result<Self, String>;
}

/// A real number, optionally times `pi`.
fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let v = if let Some(head) = lower.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let c = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))?
        };
        c * PI
    } else {
        t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"))?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{t}` is not finite"))
    }
}

impl ConfigValue for f64 {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        parse_real(s)
    }
}

impl ConfigValue for usize {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        s.parse()
            .map_err(|_| format!("`{s}` is not a non-negative integer"))
    }
}

impl ConfigValue for u64 {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        s.parse()
            .map_err(|_| format!("`{s}` is not a non-negative integer"))
    }
}

impl ConfigValue for u32 {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        s.parse()
            .map_err(|_| format!("`{s}` is not a non-negative integer"))
    }
}

impl ConfigValue for u8 {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        s.parse()
            .map_err(|_| format!("`{s}` is not a small non-negative integer"))
    }
}

impl ConfigValue for bool {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => Err(format!("`{s}` is not a boolean")),
        }
    }
}

impl ConfigValue for String {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        Ok(s.to_string())
    }
}

impl ConfigValue for Vec<f64> {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        s.split(',').map(parse_real).collect()
    }
}

/// Enum keys spelled in lower snake case.
macro_rules! keyword_enum {
    ($t:ty, $what:literal, { $($name:literal => $v:expr),+ $(,)? }) => {
        impl ConfigValue for $t {
            fn parse(s: &str) -> std::result::Result<Self, String> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($v),)+
                    _ => Err(format!(concat!("`{}` is not a valid ", $what, "; expected one of {}"), s, [$($name),+].join(", "))),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Modes,
    Chain,
    GroundScan,
    OccupationScan,
    Dynamics,
    RwaCompare,
    DarkStates,
    TwoAtomDensity,
    OracleCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Modes => "modes",
            Self::Chain => "chain",
            Self::GroundScan => "ground_scan",
            Self::OccupationScan => "occupation_scan",
            Self::Dynamics => "dynamics",
            Self::RwaCompare => "rwa_compare",
            Self::DarkStates => "dark_states",
            Self::TwoAtomDensity => "two_atom_density",
            Self::OracleCheck => "oracle_check",
        }
    }

    /// Experiments that build an MPS over the atom plus chain.
    pub fn uses_mps(self) -> bool {
        matches!(
            self,
            Self::GroundScan | Self::OccupationScan | Self::Dynamics | Self::RwaCompare | Self::OracleCheck
        )
    }
}

keyword_enum!(ExperimentKind, "experiment kind", {
    "modes" => ExperimentKind::Modes,
    "chain" => ExperimentKind::Chain,
    "ground_scan" => ExperimentKind::GroundScan,
    "occupation_scan" => ExperimentKind::OccupationScan,
    "dynamics" => ExperimentKind::Dynamics,
    "rwa_compare" => ExperimentKind::RwaCompare,
    "dark_states" => ExperimentKind::DarkStates,
    "two_atom_density" => ExperimentKind::TwoAtomDensity,
    "oracle_check" => ExperimentKind::OracleCheck,
});

keyword_enum!(Sector, "sector", { "even" => Sector::Even, "full" => Sector::Full });
keyword_enum!(Variant, "variant", { "full" => Variant::Full, "rwa" => Variant::Rwa });
keyword_enum!(ReorthMode, "reorthogonalization", {
    "full" => ReorthMode::Full,
    "partial" => ReorthMode::Partial,
    "none" => ReorthMode::None,
});
keyword_enum!(ProfileKind, "profile", {
    "gaussian" => ProfileKind::Gaussian,
    "lorentzian" => ProfileKind::Lorentzian,
    "rectangle" => ProfileKind::Rectangle,
    "delta" => ProfileKind::Delta,
});
keyword_enum!(BellState, "Bell state", { "triplet" => BellState::Triplet, "singlet" => BellState::Singlet });

fn sector_name(s: Sector) -> &'static str {
    match s {
        Sector::Even => "even",
        Sector::Full => "full",
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Full => "full",
        Variant::Rwa => "rwa",
    }
}

fn reorth_name(r: ReorthMode) -> &'static str {
    match r {
        ReorthMode::Full => "full",
        ReorthMode::Partial => "partial",
        ReorthMode::None => "none",
    }
}

fn profile_name(p: ProfileKind) -> &'static str {
    match p {
        ProfileKind::Gaussian => "gaussian",
        ProfileKind::Lorentzian => "lorentzian",
        ProfileKind::Rectangle => "rectangle",
        ProfileKind::Delta => "delta",
    }
}

fn bell_name(b: BellState) -> &'static str {
    match b {
        BellState::Triplet => "triplet",
        BellState::Singlet => "singlet",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waveguide {
    pub length: f64,
    /// Mode cutoff `N`.
    pub cutoff: usize,
    pub sector: Sector,
}

/// One emitter with `points` equally spaced coupling points centred on 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitter {
    pub frequency: f64,
    pub coupling: f64,
    pub points: usize,
    pub spacing: f64,
    pub profile: ProfileKind,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub n_b: usize,
    pub max_bond: usize,
    pub svd_cutoff: f64,
    /// Chain sites kept; 0 keeps the full chain.
    pub chain_length: usize,
    pub reorth: ReorthMode,
    pub variant: Variant,
    pub dt: f64,
    pub total_time: f64,
    pub stride: f64,
    pub trotter_order: u8,
    pub max_sweeps: usize,
    pub energy_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkStates {
    pub omega: f64,
    pub gamma_tau: f64,
    pub ratio: f64,
    pub tau: f64,
    pub n_max: u32,
    /// Bound-population table up to this time; 0 skips it.
    pub t_max: f64,
    pub t_step: f64,
    /// Also propagate the single-excitation waveguide model.
    pub propagate: bool,
    pub band_length: f64,
    pub band_half: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoAtom {
    pub state: BellState,
    pub frequency: f64,
    pub coupling: f64,
    pub tau: f64,
    pub width: f64,
    pub t_max: f64,
    pub t_step: f64,
    pub grid_points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Limits {
    /// Estimated peak working memory across all workers.
    pub max_memory_mb: f64,
    /// Largest Hilbert or single-excitation dimension.
    pub max_dimension: usize,
    /// Largest number of rows in any one output file.
    pub max_rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub waveguide: Waveguide,
    pub emitter: Emitter,
    pub numerics: Numerics,
    pub scan: Scan,
    pub dark_states: DarkStates,
    pub two_atom: TwoAtom,
    pub limits: Limits,
    lines: BTreeMap<(String, String), usize>,
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self> {
        let ini = Ini::parse(text)?;
        let cfg = Self::from_ini(&ini)?;
        ini.check_unused()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn scan_from(ini: &Ini, default: f64) -> Result<Vec<f64>> {
    let list: Option<Vec<f64>> = ini.get("scan", "lambdas")?;
    let start: Option<f64> = ini.get("scan", "lambda_start")?;
    let stop: Option<f64> = ini.get("scan", "lambda_stop")?;
    let count: Option<usize> = ini.get("scan", "lambda_count")?;
    let range_line = ini
        .line("scan", "lambda_start")
        .or(ini.line("scan", "lambda_stop"))
        .or(ini.line("scan", "lambda_count"));
    match (list, start, stop, count) {
        (Some(v), None, None, None) => Ok(v),
        (Some(_), ..) => Err(ConfigError::at(
            range_line.unwrap_or(0),
            "[scan] give either `lambdas` or the lambda_start/lambda_stop/lambda_count range, not both",
        )),
        (None, None, None, None) => Ok(vec![default]),
        (None, Some(a), Some(b), Some(n)) => {
            if n == 0 {
                return Err(ConfigError::at(
                    ini.line("scan", "lambda_count").unwrap_or(0),
                    "[scan] lambda_count must be >= 1",
                ));
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        (None, ..) => Err(ConfigError::at(
            range_line.unwrap_or(0),
            "[scan] a lambda range needs all of lambda_start, lambda_stop and lambda_count",
        )),
    }
}

impl ExperimentConfig {
    fn from_ini(ini: &Ini) -> Result<Self> {
        let kind: ExperimentKind = ini.get("experiment", "kind")?.ok_or_else(|| {
            ConfigError::at(
                ini.sections.get("experiment").map_or(1, |s| s.0),
                "[experiment] needs `kind`",
            )
        })?;
        let length: f64 = ini.get("waveguide", "length")?.unwrap_or(1.0);
        let waveguide = Waveguide {
            length,
            cutoff: ini
                .get("waveguide", "cutoff")?
                .unwrap_or(giantchain_core::field_model::DEFAULT_CUTOFF),
            sector: ini.get("waveguide", "sector")?.unwrap_or(Sector::Even),
        };
        let emitter = Emitter {
            frequency: ini.get("emitter", "frequency")?.unwrap_or(160.0 * PI / length),
            coupling: ini.get("emitter", "coupling")?.unwrap_or(0.4),
            points: ini.get("emitter", "points")?.unwrap_or(3),
            spacing: ini.get("emitter", "spacing")?.unwrap_or(length / 20.0),
            profile: ini.get("emitter", "profile")?.unwrap_or(ProfileKind::Gaussian),
            width: ini.get("emitter", "width")?.unwrap_or(length / 500.0),
        };
        // Eigenstate searches and time evolution start from different
        // truncations; the oracle system is small enough to keep everything.
        let preset = match kind {
            ExperimentKind::GroundScan | ExperimentKind::OccupationScan => TruncationPolicy::statics(),
            ExperimentKind::OracleCheck => TruncationPolicy {
                max_bond: 64,
                cutoff: 0.0,
                n_b: 4,
            },
            _ => TruncationPolicy::dynamics(emitter.coupling),
        };
        let numerics = Numerics {
            n_b: ini.get("numerics", "n_b")?.unwrap_or(preset.n_b),
            max_bond: ini.get("numerics", "max_bond")?.unwrap_or(preset.max_bond),
            svd_cutoff: ini.get("numerics", "svd_cutoff")?.unwrap_or(preset.cutoff),
            chain_length: ini.get("numerics", "chain_length")?.unwrap_or(0),
            reorth: ini.get("numerics", "reorth")?.unwrap_or(ReorthMode::Full),
            variant: ini.get("numerics", "variant")?.unwrap_or(Variant::Full),
            dt: ini.get("numerics", "dt")?.unwrap_or(1e-3),
            total_time: ini.get("numerics", "total_time")?.unwrap_or(1.0),
            stride: ini.get("numerics", "stride")?.unwrap_or(0.01),
            trotter_order: ini.get("numerics", "trotter_order")?.unwrap_or(2),
            max_sweeps: ini.get("numerics", "max_sweeps")?.unwrap_or(40),
            energy_tol: ini.get("numerics", "energy_tol")?.unwrap_or(1e-10),
        };
        let scan = Scan {
            lambdas: scan_from(ini, emitter.coupling)?,
        };
        let ds_tau: f64 = ini.get("dark_states", "tau")?.unwrap_or(1.0);
        let dark_states = DarkStates {
            omega: ini.get("dark_states", "omega")?.unwrap_or(10.0 * PI / ds_tau),
            gamma_tau: ini.get("dark_states", "gamma_tau")?.unwrap_or(PI),
            ratio: ini.get("dark_states", "ratio")?.unwrap_or(0.5),
            tau: ds_tau,
            n_max: ini.get("dark_states", "n_max")?.unwrap_or(100),
            t_max: ini.get("dark_states", "t_max")?.unwrap_or(20.0 * ds_tau),
            t_step: ini.get("dark_states", "t_step")?.unwrap_or(0.05 * ds_tau),
            propagate: ini.get("dark_states", "propagate")?.unwrap_or(false),
            band_length: ini.get("dark_states", "band_length")?.unwrap_or(100.0 * ds_tau),
            band_half: ini.get("dark_states", "band_half")?.unwrap_or(16_000),
        };
        let ta_tau: f64 = ini.get("two_atom", "tau")?.unwrap_or(length / 10.0);
        let two_atom = TwoAtom {
            state: ini.get("two_atom", "state")?.unwrap_or(BellState::Triplet),
            frequency: ini.get("two_atom", "frequency")?.unwrap_or(10.0 * PI / ta_tau),
            coupling: ini.get("two_atom", "coupling")?.unwrap_or(0.208),
            tau: ta_tau,
            width: ini.get("two_atom", "width")?.unwrap_or(length / 300.0),
            t_max: ini.get("two_atom", "t_max")?.unwrap_or(4.0 * ta_tau),
            t_step: ini.get("two_atom", "t_step")?.unwrap_or(0.5 * ta_tau),
            grid_points: ini.get("two_atom", "grid_points")?.unwrap_or(601),
            x_min: ini.get("two_atom", "x_min")?.unwrap_or(-ta_tau),
            x_max: ini.get("two_atom", "x_max")?.unwrap_or(2.5 * ta_tau),
        };
        let limits = Limits {
            max_memory_mb: ini.get("limits", "max_memory_mb")?.unwrap_or(4096.0),
            max_dimension: ini.get("limits", "max_dimension")?.unwrap_or(200_000),
            max_rows: ini.get("limits", "max_rows")?.unwrap_or(10_000_000),
        };
        let output_dir: String = ini.get("experiment", "output_dir")?.unwrap_or_else(|| ".".into());
        let mut lines = BTreeMap::new();
        for (s, (_, entries)) in &ini.sections {
            for (k, e) in entries {
                lines.insert((s.clone(), k.clone()), e.line);
            }
        }
        Ok(Self {
            kind,
            output_dir: PathBuf::from(output_dir),
            seed: ini.get("experiment", "seed")?.unwrap_or(0),
            waveguide,
            emitter,
            numerics,
            scan,
            dark_states,
            two_atom,
            limits,
            lines,
        })
    }

    /// Line of `key` in `section`, if it was given explicitly.
    pub fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        self.lines.get(&(section.to_string(), key.to_string())).copied()
    }

    fn fail(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let message = format!("[{section}] {key}: {}", message.into());
        match self.line_of(section, key) {
            Some(l) => ConfigError::at(l, message),
            None => ConfigError::global(format!("{message} (default value)")),
        }
    }

    fn require(&self, ok: bool, section: &str, key: &str, message: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.fail(section, key, message))
        }
    }

    /// Range checks that need no physics code.
    pub fn validate(&self) -> Result<()> {
        let w = &self.waveguide;
        self.require(w.length > 0.0, "waveguide", "length", "must be positive")?;
        self.require(w.cutoff >= 1, "waveguide", "cutoff", "must be at least 1")?;
        let e = &self.emitter;
        self.require(e.frequency > 0.0, "emitter", "frequency", "must be positive")?;
        self.require(e.coupling >= 0.0, "emitter", "coupling", "must be non-negative")?;
        self.require(e.points >= 1, "emitter", "points", "must be at least 1")?;
        self.require(e.spacing >= 0.0, "emitter", "spacing", "must be non-negative")?;
        self.require(
            e.width > 0.0 || e.profile == ProfileKind::Delta,
            "emitter",
            "width",
            "must be positive",
        )?;
        let n = &self.numerics;
        self.require(n.n_b >= 2, "numerics", "n_b", "must be at least 2")?;
        self.require(n.max_bond >= 1, "numerics", "max_bond", "must be at least 1")?;
        self.require(
            n.svd_cutoff >= 0.0,
            "numerics",
            "svd_cutoff",
            "must be non-negative",
        )?;
        self.require(n.dt > 0.0, "numerics", "dt", "must be positive")?;
        self.require(
            n.total_time >= 0.0,
            "numerics",
            "total_time",
            "must be non-negative",
        )?;
        self.require(n.stride >= n.dt, "numerics", "stride", "must be at least dt")?;
        let per = n.stride / n.dt;
        self.require(
            (per - per.round()).abs() < 1e-9 * per,
            "numerics",
            "stride",
            "must be a whole multiple of dt",
        )?;
        self.require(
            matches!(n.trotter_order, 1 | 2),
            "numerics",
            "trotter_order",
            "must be 1 or 2",
        )?;
        self.require(n.max_sweeps >= 1, "numerics", "max_sweeps", "must be at least 1")?;
        self.require(n.energy_tol > 0.0, "numerics", "energy_tol", "must be positive")?;
        if let Some(bad) = self.scan.lambdas.iter().find(|l| **l < 0.0) {
            let key = if self.line_of("scan", "lambdas").is_some() {
                "lambdas"
            } else {
                "lambda_start"
            };
            return Err(self.fail("scan", key, format!("coupling {bad} is negative")));
        }
        let d = &self.dark_states;
        self.require(d.tau > 0.0, "dark_states", "tau", "must be positive")?;
        self.require(d.gamma_tau > 0.0, "dark_states", "gamma_tau", "must be positive")?;
        self.require(
            d.ratio > 0.0 && d.ratio < 1.0,
            "dark_states",
            "ratio",
            "must lie in (0, 1)",
        )?;
        self.require(d.t_max >= 0.0, "dark_states", "t_max", "must be non-negative")?;
        self.require(d.t_step > 0.0, "dark_states", "t_step", "must be positive")?;
        self.require(
            d.band_length > 0.0,
            "dark_states",
            "band_length",
            "must be positive",
        )?;
        let t = &self.two_atom;
        self.require(t.frequency > 0.0, "two_atom", "frequency", "must be positive")?;
        self.require(t.coupling >= 0.0, "two_atom", "coupling", "must be non-negative")?;
        self.require(t.tau > 0.0, "two_atom", "tau", "must be positive")?;
        self.require(t.width > 0.0, "two_atom", "width", "must be positive")?;
        self.require(t.t_max >= 0.0, "two_atom", "t_max", "must be non-negative")?;
        self.require(t.t_step > 0.0, "two_atom", "t_step", "must be positive")?;
        self.require(
            t.grid_points >= 2,
            "two_atom",
            "grid_points",
            "must be at least 2",
        )?;
        self.require(t.x_max > t.x_min, "two_atom", "x_max", "must exceed x_min")?;
        let l = &self.limits;
        self.require(
            l.max_memory_mb > 0.0,
            "limits",
            "max_memory_mb",
            "must be positive",
        )?;
        Ok(())
    }

    /// The resolved configuration in the input syntax, every key present.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let w = &mut s;
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        // `{:?}` on f64 is the shortest round-trip form.
        let _ = writeln!(w, "[experiment]");
        let _ = writeln!(w, "kind = {}", self.kind.name());
        let _ = writeln!(w, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(w, "seed = {}", self.seed);
        let wg = &self.waveguide;
        let _ = writeln!(w, "[waveguide]");
        let _ = writeln!(w, "length = {:?}", wg.length);
        let _ = writeln!(w, "cutoff = {}", wg.cutoff);
        let _ = writeln!(w, "sector = {}", sector_name(wg.sector));
        let e = &self.emitter;
        let _ = writeln!(w, "[emitter]");
        let _ = writeln!(w, "frequency = {:?}", e.frequency);
        let _ = writeln!(w, "coupling = {:?}", e.coupling);
        let _ = writeln!(w, "points = {}", e.points);
        let _ = writeln!(w, "spacing = {:?}", e.spacing);
        let _ = writeln!(w, "profile = {}", profile_name(e.profile));
        let _ = writeln!(w, "width = {:?}", e.width);
        let n = &self.numerics;
        let _ = writeln!(w, "[numerics]");
        let _ = writeln!(w, "n_b = {}", n.n_b);
        let _ = writeln!(w, "max_bond = {}", n.max_bond);
        let _ = writeln!(w, "svd_cutoff = {:?}", n.svd_cutoff);
        let _ = writeln!(w, "chain_length = {}", n.chain_length);
        let _ = writeln!(w, "reorth = {}", reorth_name(n.reorth));
        let _ = writeln!(w, "variant = {}", variant_name(n.variant));
        let _ = writeln!(w, "dt = {:?}", n.dt);
        let _ = writeln!(w, "total_time = {:?}", n.total_time);
        let _ = writeln!(w, "stride = {:?}", n.stride);
        let _ = writeln!(w, "trotter_order = {}", n.trotter_order);
        let _ = writeln!(w, "max_sweeps = {}", n.max_sweeps);
        let _ = writeln!(w, "energy_tol = {:?}", n.energy_tol);
        let _ = writeln!(w, "[scan]");
        let _ = writeln!(w, "lambdas = {}", list(&self.scan.lambdas));
        let d = &self.dark_states;
        let _ = writeln!(w, "[dark_states]");
        let _ = writeln!(w, "omega = {:?}", d.omega);
        let _ = writeln!(w, "gamma_tau = {:?}", d.gamma_tau);
        let _ = writeln!(w, "ratio = {:?}", d.ratio);
        let _ = writeln!(w, "tau = {:?}", d.tau);
        let _ = writeln!(w, "n_max = {}", d.n_max);
        let _ = writeln!(w, "t_max = {:?}", d.t_max);
        let _ = writeln!(w, "t_step = {:?}", d.t_step);
        let _ = writeln!(w, "propagate = {}", d.propagate);
        let _ = writeln!(w, "band_length = {:?}", d.band_length);
        let _ = writeln!(w, "band_half = {}", d.band_half);
        let t = &self.two_atom;
        let _ = writeln!(w, "[two_atom]");
        let _ = writeln!(w, "state = {}", bell_name(t.state));
        let _ = writeln!(w, "frequency = {:?}", t.frequency);
        let _ = writeln!(w, "coupling = {:?}", t.coupling);
        let _ = writeln!(w, "tau = {:?}", t.tau);
        let _ = writeln!(w, "width = {:?}", t.width);
        let _ = writeln!(w, "t_max = {:?}", t.t_max);
        let _ = writeln!(w, "t_step = {:?}", t.t_step);
        let _ = writeln!(w, "grid_points = {}", t.grid_points);
        let _ = writeln!(w, "x_min = {:?}", t.x_min);
        let _ = writeln!(w, "x_max = {:?}", t.x_max);
        let l = &self.limits;
        let _ = writeln!(w, "[limits]");
        let _ = writeln!(w, "max_memory_mb = {:?}", l.max_memory_mb);
        let _ = writeln!(w, "max_dimension = {}", l.max_dimension);
        let _ = writeln!(w, "max_rows = {}", l.max_rows);
        s
    }
}
