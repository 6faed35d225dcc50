use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::group::GroupKind;
use crate::multiorder::{Family, MultiorderSampler};

/// Which pair `bhr-run` builds for each sampled order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    /// `y` = `x` flipped at the identity site; expected certified.
    Flip,
    /// `y` = `x` flipped on every even nonnegative order index; expected refuted.
    ParityControl,
}

impl PairMode {
    pub fn name(self) -> &'static str {
        match self {
            PairMode::Flip => "flip",
            PairMode::ParityControl => "parity-control",
        }
    }
}

impl FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "flip" => Ok(PairMode::Flip),
            "parity-control" => Ok(PairMode::ParityControl),
            other => Err(Error::parse(format!("unknown pair mode {other:?} (expected flip, parity-control)"))),
        }
    }
}

/// A seed list, kept together with the text it was parsed from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seeds {
    text: String,
    values: Vec<u64>,
}

impl Seeds {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl FromStr for Seeds {
    type Err = Error;

    /// `a..b`, `a..=b`, or a comma list `1,5,9`.
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim().to_string();
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| Error::parse(format!("seed {t:?}: {e}")));
        let values: Vec<u64> = if let Some((a, b)) = text.split_once("..=") {
            (num(a)?..=num(b)?).collect()
        } else if let Some((a, b)) = text.split_once("..") {
            (num(a)?..num(b)?).collect()
        } else {
            text.split(',').map(num).collect::<Result<_>>()?
        };
        if values.is_empty() {
            return Err(Error::parse(format!("seed set {text:?} is empty")));
        }
        Ok(Seeds { text, values })
    }
}

/// Every setting of a run. Built from defaults, then a `key=value` file,
/// then command-line overrides, in that order.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub groups: Vec<GroupKind>,
    pub family: Family,
    pub sampler_seed: u64,
    pub swap_prob: f64,
    pub seed: u64,
    pub seeds: Seeds,
    pub radius: i64,
    pub horizon: u64,
    pub depth: u32,
    pub alphabet: u16,
    pub configuration: Option<String>,
    pub pair: PairMode,
    pub elements: usize,
    pub element_radius: i64,
    pub box_radius: u32,
    pub element: Option<String>,
    pub pattern_radius: i64,
    pub samples: usize,
    pub block: usize,
    pub tv_max: f64,
    pub entropy_expect: Option<f64>,
    pub entropy_tol: f64,
    pub order: Option<PathBuf>,
    pub order_b: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// Recognised keys, in echo order.
pub const KEYS: &[&str] = &[
    "group",
    "family",
    "sampler-seed",
    "swap-prob",
    "seed",
    "seeds",
    "radius",
    "horizon",
    "depth",
    "alphabet",
    "configuration",
    "pair",
    "elements",
    "element-radius",
    "box-radius",
    "element",
    "pattern-radius",
    "samples",
    "block",
    "tv-max",
    "entropy-expect",
    "entropy-tol",
    "order",
    "order-b",
    "output",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            groups: vec![GroupKind::Z],
            family: Family::Hierarchical,
            sampler_seed: 0,
            swap_prob: 0.5,
            seed: 0,
            seeds: "0..10".parse().expect("default seeds"),
            radius: 16,
            horizon: 64,
            depth: 8,
            alphabet: 2,
            configuration: None,
            pair: PairMode::Flip,
            elements: 20,
            element_radius: 8,
            box_radius: 4,
            element: None,
            pattern_radius: 2,
            samples: 10_000,
            block: 10,
            tv_max: 0.05,
            entropy_expect: None,
            entropy_tol: 0.05,
            order: None,
            order_b: None,
            output: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| Error::parse(format!("{key}={v}: {e}")))
}

impl ExperimentConfig {
    /// Parse flat `key=value` text; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("config line {}: expected key=value", lineno + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::parse(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "group" => {
                self.groups = v.split(',').map(|g| g.parse()).collect::<Result<_>>()?;
                if self.groups.is_empty() {
                    return Err(Error::parse("group list is empty"));
                }
            }
            "family" => self.family = v.parse()?,
            "sampler-seed" => self.sampler_seed = parse_num(key, v)?,
            "swap-prob" => self.swap_prob = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "seeds" => self.seeds = v.parse()?,
            "radius" => self.radius = parse_num(key, v)?,
            "horizon" | "K" => self.horizon = parse_num(key, v)?,
            "depth" | "N" => self.depth = parse_num(key, v)?,
            "alphabet" => self.alphabet = parse_num(key, v)?,
            "configuration" => self.configuration = Some(v.to_string()).filter(|s| !s.is_empty()),
            "pair" => self.pair = v.parse()?,
            "elements" => self.elements = parse_num(key, v)?,
            "element-radius" => self.element_radius = parse_num(key, v)?,
            "box-radius" => self.box_radius = parse_num(key, v)?,
            "element" => self.element = Some(v.to_string()),
            "pattern-radius" => self.pattern_radius = parse_num(key, v)?,
            "samples" => self.samples = parse_num(key, v)?,
            "block" => self.block = parse_num(key, v)?,
            "tv-max" => self.tv_max = parse_num(key, v)?,
            "entropy-expect" => self.entropy_expect = Some(parse_num(key, v)?),
            "entropy-tol" => self.entropy_tol = parse_num(key, v)?,
            "order" => self.order = Some(PathBuf::from(v)),
            "order-b" => self.order_b = Some(PathBuf::from(v)),
            "output" => self.output = Some(PathBuf::from(v)),
            other => return Err(Error::parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Value of `key` as it would be written in a config file.
    pub fn get(&self, key: &str) -> Option<String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        Some(match key {
            "group" => self.groups.iter().map(|g| g.name()).collect::<Vec<_>>().join(","),
            "family" => self.family.name().to_string(),
            "sampler-seed" => self.sampler_seed.to_string(),
            "swap-prob" => self.swap_prob.to_string(),
            "seed" => self.seed.to_string(),
            "seeds" => self.seeds.text().to_string(),
            "radius" => self.radius.to_string(),
            "horizon" => self.horizon.to_string(),
            "depth" => self.depth.to_string(),
            "alphabet" => self.alphabet.to_string(),
            "configuration" => self.configuration.clone()?,
            "pair" => self.pair.name().to_string(),
            "elements" => self.elements.to_string(),
            "element-radius" => self.element_radius.to_string(),
            "box-radius" => self.box_radius.to_string(),
            "element" => self.element.clone()?,
            "pattern-radius" => self.pattern_radius.to_string(),
            "samples" => self.samples.to_string(),
            "block" => self.block.to_string(),
            "tv-max" => self.tv_max.to_string(),
            "entropy-expect" => self.entropy_expect?.to_string(),
            "entropy-tol" => self.entropy_tol.to_string(),
            "order" => path(&self.order)?,
            "order-b" => path(&self.order_b)?,
            "output" => path(&self.output)?,
            _ => return None,
        })
    }

    /// `key=value` lines for every set key; parsing them back gives an
    /// equivalent config.
    pub fn to_text(&self) -> String {
        KEYS.iter()
            .filter_map(|k| self.get(k).map(|v| format!("{k}={v}\n")))
            .collect()
    }

    /// The single group for commands that take one.
    pub fn group(&self) -> Result<GroupKind> {
        match self.groups.as_slice() {
            [g] => Ok(*g),
            _ => Err(Error::usage("this command takes exactly one group")),
        }
    }

    pub fn sampler(&self, group: GroupKind) -> Result<MultiorderSampler> {
        MultiorderSampler::new(group, self.family, self.sampler_seed)?.with_swap_prob(self.swap_prob)
    }
}
