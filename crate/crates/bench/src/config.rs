//! Experiment configuration.
//!
//! Configurations are TOML documents. Top-level keys describe the Monte-Carlo
//! run, a section named after the technique holds its parameters and an
//! optional `[sweep]` section lists values to substitute, one child
//! configuration per combination. See `docs/config.md` for the grammar.

use std::path::PathBuf;

use papr_core::clipping::ClipConfig;
use papr_core::metrics::{default_grid, threshold_grid};
use papr_core::pts::PartitionScheme;
use papr_core::sap::SapConfig;
use papr_core::slm::PhaseAlphabet;
use papr_core::tr::{ToneCap, TonePlacement};
use papr_core::Technique;
use toml::{Table, Value};

use crate::error::ConfigErrors;
use crate::run::Prepared;

pub const DEFAULT_OVERSAMPLING: usize = 4;
pub const DEFAULT_SYMBOLS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;

const TOP_LEVEL_KEYS: &[&str] = &[
    "n_subcarriers",
    "technique",
    "oversampling",
    "n_symbols",
    "seed",
    "output",
    "label",
    "grid",
    "sweep",
];
const GRID_KEYS: &[&str] = &["start_db", "stop_db", "step_db"];
const TECHNIQUE_NAMES: &[&str] = &["none", "clipping", "slm", "pts", "tr", "sap", "ops"];
/// Top-level keys a sweep may vary.
const SWEEPABLE_TOP_LEVEL: &[&str] = &["n_subcarriers", "oversampling", "n_symbols"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtsSearch {
    Exhaustive,
    Iterative,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TechniqueConfig {
    None,
    Clipping {
        clip_ratio_db: f64,
        iterations: usize,
    },
    Slm {
        u_count: usize,
        alphabet: PhaseAlphabet,
        /// Structure seed; `None` uses the master seed.
        seed: Option<u64>,
    },
    Pts {
        v_count: usize,
        w: usize,
        scheme: PartitionScheme,
        search: PtsSearch,
        seed: Option<u64>,
    },
    Tr {
        r_count: usize,
        placement: TonePlacement,
        target_db: f64,
        max_iters: usize,
        cap: ToneCap,
        seed: Option<u64>,
    },
    Sap(SapConfig),
    Ops {
        n_pilots: usize,
        m_count: usize,
    },
}

impl TechniqueConfig {
    pub fn technique(&self) -> Technique {
        match self {
            TechniqueConfig::None => Technique::None,
            TechniqueConfig::Clipping { .. } => Technique::ClipFilter,
            TechniqueConfig::Slm { .. } => Technique::Slm,
            TechniqueConfig::Pts { .. } => Technique::Pts,
            TechniqueConfig::Tr { .. } => Technique::ToneReservation,
            TechniqueConfig::Sap(_) => Technique::Sap,
            TechniqueConfig::Ops { .. } => Technique::Ops,
        }
    }

    /// Parameters as `(key, value)` pairs in config-file spelling.
    pub fn parameters(&self) -> Vec<(&'static str, String)> {
        match self {
            TechniqueConfig::None => vec![],
            TechniqueConfig::Clipping {
                clip_ratio_db,
                iterations,
            } => vec![
                ("clip_ratio_db", clip_ratio_db.to_string()),
                ("iterations", iterations.to_string()),
            ],
            TechniqueConfig::Slm {
                u_count,
                alphabet,
                seed,
            } => vec![
                ("u_count", u_count.to_string()),
                ("alphabet", alphabet_name(*alphabet).to_string()),
                ("seed", seed.map_or("master".to_string(), |s| s.to_string())),
            ],
            TechniqueConfig::Pts {
                v_count,
                w,
                scheme,
                search,
                seed,
            } => vec![
                ("v_count", v_count.to_string()),
                ("w", w.to_string()),
                ("scheme", scheme_name(*scheme).to_string()),
                (
                    "search",
                    match search {
                        PtsSearch::Exhaustive => "exhaustive",
                        PtsSearch::Iterative => "iterative",
                    }
                    .to_string(),
                ),
                ("seed", seed.map_or("master".to_string(), |s| s.to_string())),
            ],
            TechniqueConfig::Tr {
                r_count,
                placement,
                target_db,
                max_iters,
                cap,
                seed,
            } => vec![
                ("r_count", r_count.to_string()),
                ("placement", placement_name(*placement).to_string()),
                ("target_db", target_db.to_string()),
                ("max_iters", max_iters.to_string()),
                (
                    "cap",
                    match cap {
                        ToneCap::DataRelative(m) => m.to_string(),
                        ToneCap::Absolute(a) => format!("absolute {a}"),
                        ToneCap::Unbounded => "unbounded".to_string(),
                    },
                ),
                ("seed", seed.map_or("master".to_string(), |s| s.to_string())),
            ],
            TechniqueConfig::Sap(c) => vec![
                ("alpha", c.alpha.to_string()),
                ("l_count", c.l_count.to_string()),
                ("p_exponent", c.p_exponent.to_string()),
                ("threshold_db", c.threshold_db.to_string()),
                ("k_cap", c.k_cap.to_string()),
            ],
            TechniqueConfig::Ops { n_pilots, m_count } => vec![
                ("n_pilots", n_pilots.to_string()),
                ("m_count", m_count.to_string()),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub label: String,
    pub n_subcarriers: usize,
    pub oversampling: usize,
    pub n_symbols: usize,
    pub seed: u64,
    pub technique: TechniqueConfig,
    pub grid: Vec<f64>,
    pub output: Option<PathBuf>,
    /// Child configurations produced by a `[sweep]` section, in expansion
    /// order. Empty when the document has no sweep.
    pub sweep: Vec<ExperimentConfig>,
}

impl ExperimentConfig {
    /// The configurations to run: the sweep children, or the config itself.
    pub fn expand(&self) -> Vec<&ExperimentConfig> {
        if self.sweep.is_empty() {
            vec![self]
        } else {
            self.sweep.iter().collect()
        }
    }

    /// Applies command-line overrides to this config and all its children.
    pub fn override_with(&mut self, seed: Option<u64>, n_symbols: Option<usize>) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(n) = n_symbols {
            self.n_symbols = n;
        }
        for child in &mut self.sweep {
            child.override_with(seed, n_symbols);
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let mut errors = ConfigErrors::default();
        errors.push("", format!("not a valid TOML document: {}", e.message()));
        errors
    })?;
    let mut errors = ConfigErrors::default();
    let base = parse_table(&table, &mut errors);
    let sweep = match table.get("sweep") {
        Some(Value::Table(sweep)) => expand_sweep(&table, sweep, &mut errors),
        Some(_) => {
            errors.push("sweep", "must be a table of value lists");
            vec![]
        }
        None => vec![],
    };
    match base {
        Some(mut cfg) if errors.is_empty() => {
            cfg.sweep = sweep;
            Ok(cfg)
        }
        _ => Err(errors),
    }
}

fn expand_sweep(base: &Table, sweep: &Table, errors: &mut ConfigErrors) -> Vec<ExperimentConfig> {
    let technique = base.get("technique").and_then(Value::as_str).unwrap_or("");
    let section_keys = technique_keys(technique);
    let mut axes: Vec<(&str, &Vec<Value>)> = Vec::new();
    for (key, values) in sweep {
        let path = format!("sweep.{key}");
        let known = SWEEPABLE_TOP_LEVEL.contains(&key.as_str())
            || section_keys.is_some_and(|keys| keys.contains(&key.as_str()));
        if !known {
            let mut candidates: Vec<&str> = SWEEPABLE_TOP_LEVEL.to_vec();
            candidates.extend(section_keys.unwrap_or(&[]));
            errors.push(path, unknown_key_message(key, &candidates));
            continue;
        }
        match values {
            Value::Array(list) if !list.is_empty() => axes.push((key, list)),
            _ => errors.push(path, "must be a non-empty list of values"),
        }
    }
    if axes.is_empty() || !errors.is_empty() {
        return vec![];
    }

    let mut children = Vec::new();
    let mut counters = vec![0usize; axes.len()];
    'outer: loop {
        let mut table = base.clone();
        table.remove("sweep");
        let mut suffix = String::new();
        for (&(key, values), &i) in axes.iter().zip(&counters) {
            let value = values[i].clone();
            suffix.push_str(&format!("_{key}_{}", plain(&value)));
            if SWEEPABLE_TOP_LEVEL.contains(&key) {
                table.insert(key.to_string(), value);
            } else {
                let section = table
                    .entry(technique.to_string())
                    .or_insert_with(|| Value::Table(Table::new()));
                if let Value::Table(section) = section {
                    section.insert(key.to_string(), value);
                }
            }
        }
        let mut child_errors = ConfigErrors::default();
        if let Some(mut child) = parse_table(&table, &mut child_errors) {
            child.label.push_str(&suffix);
            children.push(child);
        }
        for e in child_errors.iter() {
            errors.push(
                e.key.clone(),
                format!("in sweep child{suffix}: {}", e.message),
            );
        }
        // odometer over the axes, last axis fastest
        for pos in (0..axes.len()).rev() {
            counters[pos] += 1;
            if counters[pos] < axes[pos].1.len() {
                continue 'outer;
            }
            counters[pos] = 0;
        }
        break;
    }
    children
}

fn plain(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn technique_keys(technique: &str) -> Option<&'static [&'static str]> {
    Some(match technique {
        "none" => &[],
        "clipping" => &["clip_ratio_db", "iterations"],
        "slm" => &["u_count", "alphabet", "seed"],
        "pts" => &["v_count", "w", "scheme", "search", "seed"],
        "tr" => &[
            "r_count",
            "placement",
            "target_db",
            "max_iters",
            "cap",
            "seed",
        ],
        "sap" => &["alpha", "l_count", "p_exponent", "threshold_db", "k_cap"],
        "ops" => &["n_pilots", "m_count"],
        _ => return None,
    })
}

fn unknown_key_message(key: &str, candidates: &[&str]) -> String {
    let best = candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(key, c), *c))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((score, c)) if score >= 0.8 => format!("unknown key; did you mean `{c}`?"),
        _ => "unknown key".to_string(),
    }
}

/// Typed reads from one table, recording every problem.
struct Reader<'a> {
    table: &'a Table,
    prefix: &'a str,
    errors: &'a mut ConfigErrors,
}

impl<'a> Reader<'a> {
    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn check_keys(&mut self, allowed: &[&str]) {
        for key in self.table.keys() {
            if !allowed.contains(&key.as_str()) {
                let path = self.path(key);
                self.errors.push(path, unknown_key_message(key, allowed));
            }
        }
    }

    fn required_usize(&mut self, key: &str) -> Option<usize> {
        if !self.table.contains_key(key) {
            let path = self.path(key);
            self.errors.push(path, "missing required key");
            return None;
        }
        self.usize(key, 0)
    }

    fn usize(&mut self, key: &str, default: usize) -> Option<usize> {
        match self.table.get(key) {
            None => Some(default),
            Some(Value::Integer(v)) if *v >= 0 => Some(*v as usize),
            Some(other) => {
                let path = self.path(key);
                self.errors.push(
                    path,
                    format!("expected a non-negative integer, got {other}"),
                );
                None
            }
        }
    }

    fn u64(&mut self, key: &str, default: u64) -> Option<u64> {
        self.usize(key, default as usize).map(|v| v as u64)
    }

    fn optional_u64(&mut self, key: &str) -> Option<Option<u64>> {
        if self.table.contains_key(key) {
            self.u64(key, 0).map(Some)
        } else {
            Some(None)
        }
    }

    fn f64(&mut self, key: &str, default: f64) -> Option<f64> {
        match self.table.get(key) {
            None => Some(default),
            Some(Value::Float(v)) => Some(*v),
            Some(Value::Integer(v)) => Some(*v as f64),
            Some(other) => {
                let path = self.path(key);
                self.errors
                    .push(path, format!("expected a number, got {other}"));
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, default: T, options: &[(&str, T)]) -> Option<T> {
        match self.table.get(key) {
            None => Some(default),
            Some(Value::String(s)) => match options.iter().find(|(name, _)| name == s) {
                Some(&(_, v)) => Some(v),
                None => {
                    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                    let path = self.path(key);
                    self.errors.push(
                        path,
                        format!("unknown value `{s}`; expected one of {}", names.join(", ")),
                    );
                    None
                }
            },
            Some(other) => {
                let path = self.path(key);
                self.errors
                    .push(path, format!("expected a string, got {other}"));
                None
            }
        }
    }
}

fn parse_table(table: &Table, errors: &mut ConfigErrors) -> Option<ExperimentConfig> {
    let before = errors.0.len();
    let technique_name = match table.get("technique") {
        None => {
            errors.push("technique", "missing required key");
            None
        }
        Some(Value::String(s)) if TECHNIQUE_NAMES.contains(&s.as_str()) => Some(s.clone()),
        Some(Value::String(s)) => {
            errors.push(
                "technique",
                format!(
                    "unknown technique `{s}`; expected one of {}",
                    TECHNIQUE_NAMES.join(", ")
                ),
            );
            None
        }
        Some(other) => {
            errors.push("technique", format!("expected a string, got {other}"));
            None
        }
    };

    let mut allowed: Vec<&str> = TOP_LEVEL_KEYS.to_vec();
    if let Some(name) = &technique_name {
        allowed.push(name);
    }
    let mut top = Reader {
        table,
        prefix: "",
        errors,
    };
    // sections for the wrong technique get a targeted message
    for key in table.keys() {
        if technique_keys(key).is_some() && Some(key) != technique_name.as_ref() {
            top.errors.push(
                key.clone(),
                format!(
                    "section does not apply to technique `{}`",
                    technique_name.as_deref().unwrap_or("?")
                ),
            );
            allowed.push(key);
        }
    }
    top.check_keys(&allowed);
    let n = top.required_usize("n_subcarriers");
    let oversampling = top.usize("oversampling", DEFAULT_OVERSAMPLING);
    let n_symbols = top.usize("n_symbols", DEFAULT_SYMBOLS);
    let seed = top.u64("seed", DEFAULT_SEED);
    let output = match table.get("output") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(other) => {
            top.errors
                .push("output", format!("expected a path string, got {other}"));
            None
        }
    };
    let label = match table.get("label") {
        None => technique_name.clone().unwrap_or_default(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            top.errors
                .push("label", format!("expected a string, got {other}"));
            String::new()
        }
    };

    if let Some(n) = n {
        if n < 2 || !n.is_power_of_two() {
            errors.push(
                "n_subcarriers",
                format!("must be a power of two >= 2, got {n}"),
            );
        }
    }
    if oversampling == Some(0) {
        errors.push("oversampling", "must be at least 1");
    }
    if n_symbols == Some(0) {
        errors.push("n_symbols", "must be at least 1");
    }

    let grid = parse_grid(table.get("grid"), errors);
    let empty = Table::new();
    // the section is checked even without a usable N so that all of its
    // errors are reported; N only feeds defaults here
    let technique = match (&technique_name, n.or(Some(2))) {
        (Some(name), Some(n)) => {
            let section = match table.get(name.as_str()) {
                None => Some(&empty),
                Some(Value::Table(t)) => Some(t),
                Some(_) => {
                    errors.push(name.clone(), "must be a table");
                    None
                }
            };
            section.and_then(|t| parse_technique(name, t, n, errors))
        }
        _ => None,
    };

    if errors.0.len() > before {
        return None;
    }
    let cfg = ExperimentConfig {
        label,
        n_subcarriers: n?,
        oversampling: oversampling?,
        n_symbols: n_symbols?,
        seed: seed?,
        technique: technique?,
        grid: grid?,
        output,
        sweep: vec![],
    };
    // structural validation by the owning module
    if let Err(e) = Prepared::build(&cfg) {
        errors.push(
            cfg.technique.technique().as_str(),
            format!("rejected by the technique: {e}"),
        );
        return None;
    }
    Some(cfg)
}

fn parse_grid(value: Option<&Value>, errors: &mut ConfigErrors) -> Option<Vec<f64>> {
    let table = match value {
        None => return Some(default_grid()),
        Some(Value::Table(t)) => t,
        Some(_) => {
            errors.push("grid", "must be a table with start_db, stop_db, step_db");
            return None;
        }
    };
    let mut r = Reader {
        table,
        prefix: "grid",
        errors,
    };
    r.check_keys(GRID_KEYS);
    let start = r.f64("start_db", 4.0)?;
    let stop = r.f64("stop_db", 13.0)?;
    let step = r.f64("step_db", 0.1)?;
    match threshold_grid(start, stop, step) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push("grid", e.to_string());
            None
        }
    }
}

fn parse_technique(
    name: &str,
    table: &Table,
    n: usize,
    errors: &mut ConfigErrors,
) -> Option<TechniqueConfig> {
    let mut r = Reader {
        table,
        prefix: name,
        errors,
    };
    r.check_keys(technique_keys(name).unwrap_or(&[]));
    let before = r.errors.0.len();
    let cfg = match name {
        "none" => Some(TechniqueConfig::None),
        "clipping" => {
            let d = ClipConfig::default();
            let clip_ratio_db = r.f64("clip_ratio_db", d.clip_ratio_db);
            let iterations = r.usize("iterations", d.iterations);
            Some(TechniqueConfig::Clipping {
                clip_ratio_db: clip_ratio_db?,
                iterations: iterations?,
            })
        }
        "slm" => {
            let u_count = r.usize("u_count", 4);
            let alphabet = r.choice(
                "alphabet",
                PhaseAlphabet::Binary,
                &[
                    ("binary", PhaseAlphabet::Binary),
                    ("quaternary", PhaseAlphabet::Quaternary),
                    ("random", PhaseAlphabet::RandomPhase),
                ],
            );
            let seed = r.optional_u64("seed");
            Some(TechniqueConfig::Slm {
                u_count: u_count?,
                alphabet: alphabet?,
                seed: seed?,
            })
        }
        "pts" => {
            let v_count = r.usize("v_count", 4);
            let w = r.usize("w", 2);
            let scheme = r.choice(
                "scheme",
                PartitionScheme::Interleaved,
                &[
                    ("adjacent", PartitionScheme::Adjacent),
                    ("interleaved", PartitionScheme::Interleaved),
                    ("pseudorandom", PartitionScheme::Pseudorandom),
                ],
            );
            let search = r.choice(
                "search",
                PtsSearch::Exhaustive,
                &[
                    ("exhaustive", PtsSearch::Exhaustive),
                    ("iterative", PtsSearch::Iterative),
                ],
            );
            let seed = r.optional_u64("seed");
            Some(TechniqueConfig::Pts {
                v_count: v_count?,
                w: w?,
                scheme: scheme?,
                search: search?,
                seed: seed?,
            })
        }
        "tr" => {
            let r_count = r.usize("r_count", (n / 8).max(1));
            let placement = r.choice(
                "placement",
                TonePlacement::Equispaced,
                &[
                    ("equispaced", TonePlacement::Equispaced),
                    ("random", TonePlacement::Random),
                    ("edge", TonePlacement::Edge),
                ],
            );
            let target_db = r.f64("target_db", 6.0);
            let max_iters = r.usize("max_iters", 16);
            let cap = match table.get("cap") {
                None => Some(ToneCap::DataRelative(2.0)),
                Some(Value::String(s)) if s == "unbounded" => Some(ToneCap::Unbounded),
                Some(Value::Float(_) | Value::Integer(_)) => {
                    r.f64("cap", 2.0).map(ToneCap::DataRelative)
                }
                Some(other) => {
                    let path = r.path("cap");
                    r.errors.push(
                        path,
                        format!("expected a multiple of the mean data amplitude or \"unbounded\", got {other}"),
                    );
                    None
                }
            };
            let seed = r.optional_u64("seed");
            Some(TechniqueConfig::Tr {
                r_count: r_count?,
                placement: placement?,
                target_db: target_db?,
                max_iters: max_iters?,
                cap: cap?,
                seed: seed?,
            })
        }
        "sap" => {
            let d = SapConfig::for_subcarriers(n);
            let alpha = r.f64("alpha", d.alpha);
            let l_count = r.usize("l_count", d.l_count);
            let p_exponent = r.f64("p_exponent", d.p_exponent);
            let threshold_db = r.f64("threshold_db", d.threshold_db);
            let k_cap = r.usize("k_cap", d.k_cap);
            Some(TechniqueConfig::Sap(SapConfig {
                alpha: alpha?,
                l_count: l_count?,
                p_exponent: p_exponent?,
                threshold_db: threshold_db?,
                k_cap: k_cap?,
            }))
        }
        "ops" => {
            let n_pilots = r.usize("n_pilots", n.min(16));
            let m_count = r.usize("m_count", n_pilots.unwrap_or(1));
            Some(TechniqueConfig::Ops {
                n_pilots: n_pilots?,
                m_count: m_count?,
            })
        }
        _ => None,
    };
    if r.errors.0.len() > before {
        None
    } else {
        cfg
    }
}

pub fn alphabet_name(a: PhaseAlphabet) -> &'static str {
    match a {
        PhaseAlphabet::Binary => "binary",
        PhaseAlphabet::Quaternary => "quaternary",
        PhaseAlphabet::RandomPhase => "random",
    }
}

pub fn scheme_name(s: PartitionScheme) -> &'static str {
    match s {
        PartitionScheme::Adjacent => "adjacent",
        PartitionScheme::Interleaved => "interleaved",
        PartitionScheme::Pseudorandom => "pseudorandom",
    }
}

pub fn placement_name(p: TonePlacement) -> &'static str {
    match p {
        TonePlacement::Equispaced => "equispaced",
        TonePlacement::Random => "random",
        TonePlacement::Edge => "edge",
    }
}
