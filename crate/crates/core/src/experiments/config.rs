//! Scenario files: `[scenario]` blocks of `key = value` lines, `#` comments.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::multiplier::{MultiplierClass, MultiplierSequence};
use crate::orlicz_pettis::IntervalPartition;
use crate::space::NormKind;
use crate::summability::{RieszWeights, TruncationSchedule};

use super::builtin::BuiltinSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Analysis {
    Membership,
    HBound,
    Summing,
    Tail,
    Gap,
    Antosik,
    Chain,
    Probe,
}

impl Analysis {
    pub const ALL: [Analysis; 8] = [
        Analysis::Membership,
        Analysis::HBound,
        Analysis::Summing,
        Analysis::Tail,
        Analysis::Gap,
        Analysis::Antosik,
        Analysis::Chain,
        Analysis::Probe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Analysis::Membership => "membership",
            Analysis::HBound => "h_bound",
            Analysis::Summing => "summing",
            Analysis::Tail => "tail",
            Analysis::Gap => "gap",
            Analysis::Antosik => "antosik",
            Analysis::Chain => "chain",
            Analysis::Probe => "probe",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Analysis {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Analysis::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| LabError::validation(format!("unknown analysis `{}`", s.trim())))
    }
}

/// Block partitions for the Antosik matrix, with `t_j = j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSpec {
    Pairs(usize),
    Singletons(usize),
}

impl IntervalSpec {
    pub fn partition(self) -> Result<IntervalPartition> {
        match self {
            IntervalSpec::Pairs(n) => IntervalPartition::pairs(n),
            IntervalSpec::Singletons(n) => IntervalPartition::singletons(n),
        }
    }
}

impl fmt::Display for IntervalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalSpec::Pairs(n) => write!(f, "pairs:{n}"),
            IntervalSpec::Singletons(n) => write!(f, "singletons:{n}"),
        }
    }
}

impl FromStr for IntervalSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, n) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| LabError::validation("expected `pairs:n` or `singletons:n`"))?;
        let n: usize = n
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| LabError::validation(format!("bad interval count `{n}`")))?;
        match kind.trim() {
            "pairs" => Ok(IntervalSpec::Pairs(n)),
            "singletons" => Ok(IntervalSpec::Singletons(n)),
            other => Err(LabError::validation(format!("unknown partition `{other}`"))),
        }
    }
}

pub fn parse_norm(s: &str) -> Result<NormKind> {
    match s.trim() {
        "inf" | "sup" => Ok(NormKind::Inf),
        other => NormKind::p(
            other
                .parse()
                .map_err(|_| LabError::validation(format!("bad norm `{other}`")))?,
        ),
    }
}

pub fn render_norm(n: NormKind) -> String {
    match n {
        NormKind::Inf => "inf".into(),
        NormKind::P(p) => p.to_string(),
    }
}

pub fn parse_depths(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse::<usize>()
                .map_err(|_| LabError::validation(format!("bad depth `{}`", d.trim())))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub series: BuiltinSeries,
    pub weights: RieszWeights,
    pub multiplier: MultiplierSequence,
    pub schedule: TruncationSchedule,
    pub seed: u64,
    pub analyses: Vec<Analysis>,
    pub trials: usize,
    pub functionals: usize,
    pub intervals: IntervalSpec,
    pub tail_depths: Vec<usize>,
    pub x_norm: NormKind,
    pub y_norm: NormKind,
    /// Multiplier class for `probe`.
    pub class: MultiplierClass,
}

pub const DEFAULT_TRIALS: usize = 16;
pub const DEFAULT_INTERVALS: IntervalSpec = IntervalSpec::Pairs(32);
pub const DEFAULT_TAIL_DEPTHS: [usize; 3] = [8, 16, 32];

impl ScenarioConfig {
    pub fn new(name: impl Into<String>, series: BuiltinSeries) -> Self {
        Self {
            name: name.into(),
            series,
            weights: RieszWeights::cesaro(),
            multiplier: MultiplierSequence::Ones,
            schedule: TruncationSchedule::default(),
            seed: 0,
            analyses: vec![Analysis::Membership],
            trials: DEFAULT_TRIALS,
            functionals: crate::multiplier::DEFAULT_FUNCTIONALS,
            intervals: DEFAULT_INTERVALS,
            tail_depths: DEFAULT_TAIL_DEPTHS.to_vec(),
            x_norm: NormKind::Inf,
            y_norm: NormKind::Inf,
            class: MultiplierClass::Linf,
        }
    }
}

const KEYS: [&str; 16] = [
    "name",
    "series",
    "weights",
    "multiplier",
    "depths",
    "window",
    "tol",
    "seed",
    "analyses",
    "trials",
    "functionals",
    "intervals",
    "tail_depths",
    "x_norm",
    "y_norm",
    "class",
];

struct Block {
    line: usize,
    entries: Vec<(usize, String, String)>,
}

fn lex(text: &str) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if line != "[scenario]" {
                return Err(LabError::Parse {
                    line: n,
                    message: format!("unknown section `{line}`"),
                });
            }
            blocks.push(Block {
                line: n,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| LabError::Parse {
            line: n,
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(LabError::Parse {
                line: n,
                message: format!("unknown key `{key}`"),
            });
        }
        let block = blocks.last_mut().ok_or_else(|| LabError::Parse {
            line: n,
            message: "key outside a [scenario] block".into(),
        })?;
        if block.entries.iter().any(|(_, k, _)| k == key) {
            return Err(LabError::Parse {
                line: n,
                message: format!("duplicate key `{key}`"),
            });
        }
        block
            .entries
            .push((n, key.to_string(), value.trim().to_string()));
    }
    Ok(blocks)
}

fn build(block: &Block) -> Result<ScenarioConfig> {
    let get = |k: &str| {
        block
            .entries
            .iter()
            .find(|(_, key, _)| key == k)
            .map(|(_, _, v)| v.as_str())
    };
    let label =
        get("name").map_or_else(|| format!("<block at line {}>", block.line), str::to_string);
    let field = |f: &str| {
        let label = label.clone();
        let f = f.to_string();
        move |e: LabError| LabError::Config {
            scenario: label,
            field: f,
            message: e.to_string(),
        }
    };
    let name = get("name")
        .filter(|n| !n.is_empty())
        .ok_or_else(|| field("name")(LabError::validation("missing scenario name")))?;
    if name.contains(|c: char| c == '/' || c == '\\' || c.is_whitespace() || c == ',') {
        return Err(field("name")(LabError::validation(
            "names may not contain separators or whitespace",
        )));
    }
    let series: BuiltinSeries = get("series")
        .ok_or_else(|| LabError::validation("missing series"))
        .and_then(str::parse)
        .map_err(field("series"))?;
    let mut c = ScenarioConfig::new(name, series);
    if let Some(v) = get("weights") {
        c.weights = v.parse().map_err(field("weights"))?;
    }
    if let Some(v) = get("multiplier") {
        c.multiplier = v.parse().map_err(field("multiplier"))?;
    }
    let depths = match get("depths") {
        Some(v) => parse_depths(v).map_err(field("depths"))?,
        None => c.schedule.depths().to_vec(),
    };
    let window = match get("window") {
        Some(v) => v
            .parse()
            .map_err(|_| field("window")(LabError::validation(format!("bad window `{v}`"))))?,
        None => c.schedule.window(),
    };
    let tol = match get("tol") {
        Some(v) => v
            .parse()
            .map_err(|_| field("tol")(LabError::validation(format!("bad tolerance `{v}`"))))?,
        None => c.schedule.tol(),
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(field("tol")(LabError::validation(
            "tolerance must be positive",
        )));
    }
    let sched_field = if get("window").is_some() {
        "window"
    } else {
        "depths"
    };
    c.schedule = TruncationSchedule::new(depths, window, tol).map_err(field(sched_field))?;
    if let Some(v) = get("seed") {
        c.seed = v
            .parse()
            .map_err(|_| field("seed")(LabError::validation(format!("bad seed `{v}`"))))?;
    }
    if let Some(v) = get("analyses") {
        let list: Vec<Analysis> = v
            .split(',')
            .map(str::parse)
            .collect::<Result<_>>()
            .map_err(field("analyses"))?;
        if list.is_empty() {
            return Err(field("analyses")(LabError::validation("no analyses")));
        }
        c.analyses = list;
    }
    for (key, slot) in [
        ("trials", &mut c.trials),
        ("functionals", &mut c.functionals),
    ] {
        if let Some(v) = get(key) {
            *slot = v.parse().ok().filter(|&n: &usize| n > 0).ok_or_else(|| {
                field(key)(LabError::validation(format!(
                    "expected a positive count, got `{v}`"
                )))
            })?;
        }
    }
    if let Some(v) = get("intervals") {
        c.intervals = v.parse().map_err(field("intervals"))?;
    }
    if let Some(v) = get("tail_depths") {
        c.tail_depths = parse_depths(v).map_err(field("tail_depths"))?;
        let ok = !c.tail_depths.is_empty()
            && c.tail_depths[0] > 0
            && c.tail_depths.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(field("tail_depths")(LabError::validation(
                "tail depths must be positive and strictly increasing",
            )));
        }
    }
    if let Some(v) = get("x_norm") {
        c.x_norm = parse_norm(v).map_err(field("x_norm"))?;
    }
    if let Some(v) = get("y_norm") {
        c.y_norm = parse_norm(v).map_err(field("y_norm"))?;
    }
    if let Some(v) = get("class") {
        c.class = v.parse().map_err(field("class"))?;
    }
    Ok(c)
}

pub fn parse_config(text: &str) -> Result<Vec<ScenarioConfig>> {
    let configs: Vec<ScenarioConfig> = lex(text)?.iter().map(build).collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    for c in &configs {
        if !seen.insert(c.name.as_str()) {
            return Err(LabError::Config {
                scenario: c.name.clone(),
                field: "name".into(),
                message: "duplicate scenario name".into(),
            });
        }
    }
    Ok(configs)
}

/// Canonical text for `configs`, every key written out.
pub fn render(configs: &[ScenarioConfig]) -> String {
    let mut out = String::new();
    for (i, c) in configs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let depths: Vec<String> = c.schedule.depths().iter().map(|d| d.to_string()).collect();
        let tails: Vec<String> = c.tail_depths.iter().map(|d| d.to_string()).collect();
        let analyses: Vec<&str> = c.analyses.iter().map(|a| a.as_str()).collect();
        let lines = [
            ("name", c.name.clone()),
            ("series", c.series.to_string()),
            ("weights", c.weights.to_string()),
            ("multiplier", c.multiplier.to_string()),
            ("depths", depths.join(",")),
            ("window", c.schedule.window().to_string()),
            ("tol", c.schedule.tol().to_string()),
            ("seed", c.seed.to_string()),
            ("analyses", analyses.join(",")),
            ("trials", c.trials.to_string()),
            ("functionals", c.functionals.to_string()),
            ("intervals", c.intervals.to_string()),
            ("tail_depths", tails.join(",")),
            ("x_norm", render_norm(c.x_norm)),
            ("y_norm", render_norm(c.y_norm)),
            ("class", c.class.to_string()),
        ];
        out.push_str("[scenario]\n");
        for (k, v) in lines {
            out.push_str(&format!("{k} = {v}\n"));
        }
    }
    out
}
