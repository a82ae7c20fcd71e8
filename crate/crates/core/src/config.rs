//! Flat `key=value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the long
//! flag names with `-` or `_`. Unknown or repeated keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::Sense;
use crate::error::{Error, Result};
use crate::model::{DeckSpec, FeedbackModel};
use crate::report::OutputFormat;
use crate::strategies::StrategySpec;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "GUESSBENCH_CONFIG";

/// Every field is optional so that a file and command-line flags can be
/// layered; [`RunConfig::merge`] lets later values win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Option<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub model: Option<FeedbackModel>,
    pub strategy: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub epsilon: Option<f64>,
    pub sense: Option<Sense>,
    pub max_total: Option<usize>,
    pub j: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub enumeration_limit: Option<u64>,
    pub state_limit: Option<usize>,
}

pub const KEYS: [&str; 16] = [
    "command",
    "m",
    "n",
    "model",
    "strategy",
    "trials",
    "seed",
    "workers",
    "epsilon",
    "sense",
    "max-total",
    "j",
    "format",
    "out",
    "enumeration-limit",
    "state-limit",
];

fn positive<T: FromStr + PartialOrd + Default>(key: &str, v: &str) -> Result<T> {
    let x: T = v.parse().map_err(|_| Error::Config(format!("{key}: {v:?} is not a valid number")))?;
    if x <= T::default() {
        return Err(Error::Config(format!("{key} must be positive, got {v}")));
    }
    Ok(x)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got {line:?}", lineno + 1)))?;
            let key = k.trim().to_ascii_lowercase().replace('_', "-");
            if !seen.insert(key.clone()) {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
            cfg.set(&key, v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(format!("{key}: {e}"));
        match key {
            "command" => self.command = Some(v.to_string()),
            "m" => self.m = Some(positive(key, v)?),
            "n" => self.n = Some(positive(key, v)?),
            "model" => self.model = Some(v.parse().map_err(cfg_err)?),
            "strategy" => {
                StrategySpec::from_str(v).map_err(cfg_err)?;
                self.strategy = Some(v.to_string());
            }
            "trials" => self.trials = Some(positive(key, v)?),
            "seed" => self.seed = Some(v.parse().map_err(|_| Error::Config(format!("seed: {v:?} is not a u64")))?),
            "workers" => self.workers = Some(positive(key, v)?),
            "epsilon" => self.epsilon = Some(positive(key, v)?),
            "sense" => self.sense = Some(v.parse().map_err(cfg_err)?),
            "max-total" => self.max_total = Some(positive(key, v)?),
            "j" => self.j = Some(positive(key, v)?),
            "format" => self.format = Some(v.parse().map_err(cfg_err)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "enumeration-limit" => self.enumeration_limit = Some(positive(key, v)?),
            "state-limit" => self.state_limit = Some(positive(key, v)?),
            other => return Err(Error::Config(format!("unknown key {other:?}; known keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 0.5) {
                return Err(Error::Config(format!("epsilon must lie in (0, 1/2), got {e}")));
            }
        }
        if let Some(s) = &self.strategy {
            StrategySpec::from_str(s).map_err(|e| Error::Config(format!("strategy: {e}")))?;
        }
        if let Some(out) = &self.out {
            if out.as_os_str().is_empty() {
                return Err(Error::Config("out must not be empty".into()));
            }
        }
        Ok(())
    }

    /// `key=value` lines in [`KEYS`] order, one per set field.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(s, "{k}={v}");
            }
        };
        put("command", self.command.clone());
        put("m", self.m.map(|x| x.to_string()));
        put("n", self.n.map(|x| x.to_string()));
        put("model", self.model.map(|x| x.to_string()));
        put("strategy", self.strategy.clone());
        put("trials", self.trials.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        put("workers", self.workers.map(|x| x.to_string()));
        put("epsilon", self.epsilon.map(|x| x.to_string()));
        put("sense", self.sense.map(|x| x.to_string()));
        put("max-total", self.max_total.map(|x| x.to_string()));
        put("j", self.j.map(|x| x.to_string()));
        put("format", self.format.map(|x| x.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("enumeration-limit", self.enumeration_limit.map(|x| x.to_string()));
        put("state-limit", self.state_limit.map(|x| x.to_string()));
        s
    }

    /// Fields set in `other` override those in `self`.
    pub fn merge(mut self, other: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(command, m, n, model, strategy, trials, seed, workers, epsilon, sense, max_total, j, format, out, enumeration_limit, state_limit);
        self
    }

    pub fn deck(&self) -> Result<DeckSpec> {
        match (self.m, self.n) {
            (Some(m), Some(n)) => DeckSpec::new(m, n),
            _ => Err(Error::Config("both m and n are required".into())),
        }
    }

    pub fn strategy_spec(&self) -> Result<Option<StrategySpec>> {
        self.strategy.as_deref().map(StrategySpec::from_str).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_emit() {
        let text = "# run\ncommand=simulate\nm=2\nn = 2\nmodel=partial\nstrategy=partial-ladder\ntrials=100\nseed=7\nmax_total=8\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.m, Some(2));
        assert_eq!(cfg.max_total, Some(8));
        assert_eq!(cfg.model, Some(FeedbackModel::Partial));
        assert_eq!(RunConfig::parse(&cfg.emit()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("colour=blue").is_err());
        assert!(RunConfig::parse("m=0").is_err());
        assert!(RunConfig::parse("m=2\nm=3").is_err());
        assert!(RunConfig::parse("trials").is_err());
        assert!(RunConfig::parse("epsilon=0.7").is_err());
        assert!(RunConfig::parse("strategy=no-such").is_err());
        assert!(RunConfig::parse("model=telepathy").is_err());
    }

    #[test]
    fn merge_prefers_later() {
        let file = RunConfig::parse("m=2\nn=3\nseed=1").unwrap();
        let flags = RunConfig { seed: Some(9), ..Default::default() };
        let merged = file.merge(flags);
        assert_eq!((merged.m, merged.n, merged.seed), (Some(2), Some(3), Some(9)));
    }
}
