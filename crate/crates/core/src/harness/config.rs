//! Sweep configuration in a flat `key = value` text format.
//!
//! ```text
//! # two users, uniform delays
//! seed = 7
//! system.users = 2
//! system.frame_len = 128
//! system.antennas = 1
//! system.idle_tail = true
//! delays.mode = uniform          # uniform | optimal | explicit | random
//! delays.taus = 0, 0.5           # explicit mode only
//! sweep.snr_db = 0:2:30          # start:step:stop, or a comma list
//! sweep.detectors = mlsd, sync-ml, single-user
//! sweep.frames = 10000           # frames per point (upper bound)
//! sweep.stop_errors = 200        # 0 disables early stop
//! ```
//!
//! Every key except `sweep.snr_db` and `sweep.detectors` has a default.
//! Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detectors::DETECTOR_NAMES;
use crate::error::{Error, Result};
use crate::model::DelayProfile;

/// Name of the single-user reference curve.
pub const SINGLE_USER: &str = "single-user";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "taus", rename_all = "lowercase")]
pub enum DelayMode {
    /// `τ_k = (k-1)/K`.
    Uniform,
    /// Minimiser of `trace(R⁻¹)` for the configured `K` and `N`.
    Optimal,
    Explicit(DelayProfile),
    /// A fresh sorted uniform profile every frame.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub seed: u64,
    pub users: usize,
    pub frame_len: usize,
    pub antennas: usize,
    pub idle_tail: bool,
    pub delays: DelayMode,
    pub snr_db: Vec<f64>,
    pub detectors: Vec<String>,
    pub frames_per_point: u64,
    /// Stop a point once a detector has this many bit errors.
    pub stop_errors: Option<u64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            users: 2,
            frame_len: 128,
            antennas: 1,
            idle_tail: true,
            delays: DelayMode::Uniform,
            snr_db: Vec::new(),
            detectors: Vec::new(),
            frames_per_point: 10_000,
            stop_errors: Some(200),
        }
    }
}

const KEYS: &[&str] = &[
    "seed",
    "system.users",
    "system.frame_len",
    "system.antennas",
    "system.idle_tail",
    "delays.mode",
    "delays.taus",
    "sweep.snr_db",
    "sweep.detectors",
    "sweep.frames",
    "sweep.stop_errors",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_num(key, s.trim())).collect()
}

/// `start:step:stop` (inclusive, tolerant to rounding) or a comma list.
pub fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [single] => parse_list(key, single),
        [start, step, stop] => {
            let (start, step, stop): (f64, f64, f64) =
                (parse_num(key, start)?, parse_num(key, step)?, parse_num(key, stop)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::Config(format!("{key}: empty range `{v}`")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        _ => Err(Error::Config(format!("{key}: expected start:step:stop, got `{v}`"))),
    }
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", no + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: repeated key `{k}`", no + 1)));
            }
        }

        let mut cfg = SweepConfig::default();
        let get = |k: &str| map.get(k).map(String::as_str);
        if let Some(v) = get("seed") {
            cfg.seed = parse_num("seed", v)?;
        }
        if let Some(v) = get("system.users") {
            cfg.users = parse_num("system.users", v)?;
        }
        if let Some(v) = get("system.frame_len") {
            cfg.frame_len = parse_num("system.frame_len", v)?;
        }
        if let Some(v) = get("system.antennas") {
            cfg.antennas = parse_num("system.antennas", v)?;
        }
        if let Some(v) = get("system.idle_tail") {
            cfg.idle_tail = parse_num("system.idle_tail", v)?;
        }
        let taus = get("delays.taus");
        cfg.delays = match get("delays.mode").unwrap_or("uniform") {
            "uniform" => DelayMode::Uniform,
            "optimal" => DelayMode::Optimal,
            "random" => DelayMode::Random,
            "explicit" => {
                let v = taus.ok_or_else(|| Error::Config("delays.taus is required in explicit mode".into()))?;
                let profile = DelayProfile::new(parse_list("delays.taus", v)?)
                    .map_err(|e| Error::Config(format!("delays.taus: {e}")))?;
                DelayMode::Explicit(profile)
            }
            other => return Err(Error::Config(format!("delays.mode: unknown mode `{other}`"))),
        };
        if taus.is_some() && !matches!(cfg.delays, DelayMode::Explicit(_)) {
            return Err(Error::Config("delays.taus is only valid with delays.mode = explicit".into()));
        }
        cfg.snr_db = parse_grid(
            "sweep.snr_db",
            get("sweep.snr_db").ok_or_else(|| Error::Config("sweep.snr_db is required".into()))?,
        )?;
        cfg.detectors = get("sweep.detectors")
            .ok_or_else(|| Error::Config("sweep.detectors is required".into()))?
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if let Some(v) = get("sweep.frames") {
            cfg.frames_per_point = parse_num("sweep.frames", v)?;
        }
        if let Some(v) = get("sweep.stop_errors") {
            let n: u64 = parse_num("sweep.stop_errors", v)?;
            cfg.stop_errors = (n > 0).then_some(n);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.users == 0 || self.frame_len == 0 || self.antennas == 0 {
            return bad("users, frame length and antennas must be at least 1".into());
        }
        if self.idle_tail && self.frame_len < 2 {
            return bad("an idle tail needs a frame of at least 2 slots".into());
        }
        if self.frames_per_point == 0 {
            return bad("sweep.frames must be at least 1".into());
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("sweep.snr_db must hold finite values".into());
        }
        if self.detectors.is_empty() {
            return bad("at least one detector is required".into());
        }
        for d in &self.detectors {
            if d != SINGLE_USER && !DETECTOR_NAMES.contains(&d.as_str()) {
                return bad(format!(
                    "unknown detector `{d}` (known: {}, {SINGLE_USER})",
                    DETECTOR_NAMES.join(", ")
                ));
            }
        }
        if let DelayMode::Explicit(p) = &self.delays {
            if p.users() != self.users {
                return bad(format!(
                    "delays.taus has {} entries for {} users",
                    p.users(),
                    self.users
                ));
            }
        }
        if matches!(self.delays, DelayMode::Optimal) && self.users < 2 {
            return bad("optimal delays need at least two users".into());
        }
        Ok(())
    }

    /// Data bits per frame and detector.
    pub fn bits_per_frame(&self) -> u64 {
        ((self.frame_len - usize::from(self.idle_tail)) * self.users) as u64
    }
}
