use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Parameters of the two-stage randomized greedy search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyParams {
    /// Random steps at the start of stage 1.
    pub delta_q: usize,
    /// Explicit pool sizes `d_{q,i}` keyed by the random-step number `i`
    /// (1-based). Missing entries use [`default_pool_size`].
    pub pools: BTreeMap<usize, usize>,
    /// Stage-2 attempts.
    pub n_q: usize,
    /// Step ordinals (counted from `|S0| + 1`) that are random in every
    /// stage-2 attempt.
    pub random_positions: Vec<usize>,
    pub master_seed: u64,
    /// Cap file whose leading points seed stage 2.
    pub warm_start: Option<String>,
    /// Leading points of the warm-start cap (or of the stage-1 cap when no
    /// file is given) used as `S0` in stage 2. `None` starts stage 2 from
    /// the frame.
    pub warm_start_prefix: Option<Prefix>,
}

/// How many leading points of a cap to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefix {
    Points(usize),
    /// Percentage of the cap size, rounded up.
    Percent(u32),
}

impl Prefix {
    pub fn resolve(self, cap_len: usize) -> usize {
        match self {
            Prefix::Points(m) => m.min(cap_len),
            Prefix::Percent(p) => (cap_len * p as usize).div_ceil(100).min(cap_len),
        }
    }
}

impl std::fmt::Display for Prefix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prefix::Points(m) => write!(f, "{m}"),
            Prefix::Percent(p) => write!(f, "{p}%"),
        }
    }
}

/// `max(10, ceil(q / 2^i))`.
pub fn default_pool_size(q: u32, i: usize) -> usize {
    let shift = i.min(63) as u32;
    let d = (q as u64).div_ceil(1u64 << shift);
    d.max(10) as usize
}

impl Default for GreedyParams {
    fn default() -> Self {
        GreedyParams {
            delta_q: 3,
            pools: BTreeMap::new(),
            n_q: 50,
            random_positions: vec![1, 3, 5],
            master_seed: 0,
            warm_start: None,
            warm_start_prefix: None,
        }
    }
}

impl GreedyParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn pool_size(&self, q: u32, i: usize) -> usize {
        self.pools.get(&i).copied().unwrap_or_else(|| default_pool_size(q, i))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((i, _)) = self.pools.iter().find(|(&i, &d)| i == 0 || d == 0) {
            return Err(Error::InvalidParams(format!("pool.{i} must be a positive size for a step i >= 1")));
        }
        let rp = &self.random_positions;
        if !(2..=3).contains(&rp.len()) {
            return Err(Error::InvalidParams(format!(
                "random_positions needs 2 or 3 entries, got {}",
                rp.len()
            )));
        }
        if rp.iter().any(|&p| !(1..=5).contains(&p)) || rp.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "random_positions must be increasing values in 1..=5".into(),
            ));
        }
        match self.warm_start_prefix {
            Some(Prefix::Points(0)) | Some(Prefix::Percent(0)) => {
                return Err(Error::InvalidParams("warm_start_prefix must be positive".into()))
            }
            Some(Prefix::Percent(p)) if p > 100 => {
                return Err(Error::InvalidParams("warm_start_prefix percentage exceeds 100".into()))
            }
            _ => {}
        }
        Ok(())
    }

    /// Canonical `key = value` text; parsing it gives back `self`.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        writeln!(s, "delta_q = {}", self.delta_q).unwrap();
        writeln!(s, "n_q = {}", self.n_q).unwrap();
        for (i, d) in &self.pools {
            writeln!(s, "pool.{i} = {d}").unwrap();
        }
        let rp: Vec<String> = self.random_positions.iter().map(|p| p.to_string()).collect();
        writeln!(s, "random_positions = {}", rp.join(",")).unwrap();
        writeln!(s, "master_seed = {}", self.master_seed).unwrap();
        if let Some(w) = &self.warm_start {
            writeln!(s, "warm_start = {w}").unwrap();
        }
        if let Some(m) = self.warm_start_prefix {
            writeln!(s, "warm_start_prefix = {m}").unwrap();
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of the canonical config, seed
    /// excluded.
    pub fn digest(&self) -> String {
        let mut p = self.clone();
        p.master_seed = 0;
        let h = Sha256::digest(p.to_config().as_bytes());
        hex::encode(&h[..8])
    }

    /// Parses a config file of `key = value` lines. `#` starts a comment.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut p = GreedyParams::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| Error::ConfigError { line: line_no, message };
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| err(format!("`{v}` is not a non-negative integer")))
            };
            match key {
                "delta_q" => p.delta_q = int(value)? as usize,
                "n_q" => p.n_q = int(value)? as usize,
                "master_seed" => p.master_seed = int(value)?,
                "warm_start" => p.warm_start = Some(value.to_string()),
                "warm_start_prefix" => {
                    p.warm_start_prefix = Some(match value.strip_suffix('%') {
                        Some(pct) => Prefix::Percent(int(pct.trim())? as u32),
                        None => Prefix::Points(int(value)? as usize),
                    })
                }
                "random_positions" => {
                    p.random_positions = value
                        .split(',')
                        .map(|v| int(v.trim()).map(|x| x as usize))
                        .collect::<Result<_>>()?;
                }
                _ => match key.strip_prefix("pool.").map(str::parse::<usize>) {
                    Some(Ok(idx)) => {
                        p.pools.insert(idx, int(value)? as usize);
                    }
                    _ => return Err(err(format!("unknown key `{key}`"))),
                },
            }
        }
        p.validate()?;
        Ok(p)
    }
}
