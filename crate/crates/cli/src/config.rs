//! Flat key = value sweep configuration.
//!
//! One key per line, `#` starts a comment, dotted prefixes group the
//! channel blocks (`fso.alpha`, `rf.kappa`, `mc.seed`). SNR entries are
//! either a fixed dB value or a `start:stop:step` dB range; exactly one of
//! the participating blocks must carry the range, which becomes the sweep
//! axis.

use std::collections::BTreeMap;

use hybridlink::presets::db_to_linear;
use hybridlink::{DetectionType, FsoParams, ModulationSpec, RfParams, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Fso,
    Rf,
    Sc,
    Mrc,
}

impl LinkKind {
    pub fn needs_fso(self) -> bool {
        !matches!(self, LinkKind::Rf)
    }

    pub fn needs_rf(self) -> bool {
        !matches!(self, LinkKind::Fso)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Op,
    Ber,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrSpec {
    FixedDb(f64),
    RangeDb { start: f64, stop: f64, step: f64 },
}

impl SnrSpec {
    pub fn is_range(&self) -> bool {
        matches!(self, SnrSpec::RangeDb { .. })
    }
}

#[derive(Debug, Clone)]
pub struct FsoBlock {
    pub alpha: f64,
    pub beta: f64,
    pub xi: f64,
    pub detection: DetectionType,
    pub snr: SnrSpec,
}

#[derive(Debug, Clone)]
pub struct RfBlock {
    pub kappa: f64,
    pub mu: u32,
    pub m: u32,
    pub snr: SnrSpec,
}

#[derive(Debug, Clone)]
pub struct McBlock {
    pub enabled: bool,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for McBlock {
    fn default() -> Self {
        Self {
            enabled: false,
            samples: 10_000_000,
            seed: 1,
            workers: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub link: LinkKind,
    pub task: Option<Task>,
    pub threshold_db: Option<f64>,
    pub fso: Option<FsoBlock>,
    pub rf: Option<RfBlock>,
    pub modulation: Option<ModulationSpec>,
    pub mc: McBlock,
}

impl SweepConfig {
    /// The dB values of the sweep axis.
    pub fn sweep_points(&self) -> Vec<f64> {
        let spec = [
            self.fso.as_ref().map(|b| b.snr),
            self.rf.as_ref().map(|b| b.snr),
        ]
        .into_iter()
        .flatten()
        .find(|s| s.is_range());
        match spec {
            Some(SnrSpec::RangeDb { start, stop, step }) => {
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|i| start + i as f64 * step).collect()
            }
            _ => unreachable!("validated: exactly one range"),
        }
    }

    /// True when the FSO block carries the sweep axis.
    pub fn sweep_is_fso(&self) -> bool {
        self.fso.as_ref().map(|b| b.snr.is_range()).unwrap_or(false)
    }

    /// Instantiate the FSO channel at a given dB SNR.
    pub fn fso_at(&self, snr_db: f64) -> Result<FsoParams, String> {
        let b = self.fso.as_ref().expect("validated");
        FsoParams::new(b.alpha, b.beta, b.xi, b.detection, db_to_linear(snr_db))
            .map_err(|e| format!("fso block: {e}"))
    }

    /// Instantiate the RF channel at a given dB SNR.
    pub fn rf_at(&self, snr_db: f64) -> Result<RfParams, String> {
        let b = self.rf.as_ref().expect("validated");
        RfParams::new(b.kappa, b.mu, b.m, db_to_linear(snr_db))
            .map_err(|e| format!("rf block: {e}"))
    }

    pub fn fixed_fso_db(&self) -> Option<f64> {
        match self.fso.as_ref().map(|b| b.snr) {
            Some(SnrSpec::FixedDb(v)) => Some(v),
            _ => None,
        }
    }

    pub fn fixed_rf_db(&self) -> Option<f64> {
        match self.rf.as_ref().map(|b| b.snr) {
            Some(SnrSpec::FixedDb(v)) => Some(v),
            _ => None,
        }
    }
}

fn parse_snr(value: &str, key: &str) -> Result<SnrSpec, String> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(format!(
                "{key}: range must be start:stop:step, got `{value}`"
            ));
        }
        let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|_| format!("{key}: non-numeric range component in `{value}`"))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(format!(
                "{key}: need stop >= start and step > 0, got `{value}`"
            ));
        }
        Ok(SnrSpec::RangeDb { start, stop, step })
    } else {
        value
            .parse::<f64>()
            .map(SnrSpec::FixedDb)
            .map_err(|_| format!("{key}: expected a number or start:stop:step, got `{value}`"))
    }
}

/// Parse and validate a configuration file's contents.
pub fn parse(text: &str) -> Result<SweepConfig, String> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected `key = value`", lineno + 1));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if map.insert(key.clone(), (lineno + 1, value)).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
    }

    let mut take = |key: &str| map.remove(key).map(|(_, v)| v);

    let link = match take("link").as_deref() {
        Some("fso") => LinkKind::Fso,
        Some("rf") => LinkKind::Rf,
        Some("sc") => LinkKind::Sc,
        Some("mrc") => LinkKind::Mrc,
        Some(other) => return Err(format!("link: expected fso|rf|sc|mrc, got `{other}`")),
        None => return Err("link: missing (fso|rf|sc|mrc)".into()),
    };
    let task = match take("task").as_deref() {
        Some("op") => Some(Task::Op),
        Some("ber") => Some(Task::Ber),
        Some(other) => return Err(format!("task: expected op|ber, got `{other}`")),
        None => None,
    };
    let threshold_db = match take("threshold_db") {
        Some(v) => Some(
            v.parse::<f64>()
                .map_err(|_| format!("threshold_db: expected a number, got `{v}`"))?,
        ),
        None => None,
    };

    let parse_f64 = |key: &str, v: String| {
        v.parse::<f64>()
            .map_err(|_| format!("{key}: expected a number, got `{v}`"))
    };

    let fso = if link.needs_fso() {
        let field = |m: &mut BTreeMap<String, (usize, String)>, key: &str| {
            m.remove(key)
                .map(|(_, v)| v)
                .ok_or_else(|| format!("{key}: missing (required for link = {link:?})"))
        };
        let alpha = parse_f64("fso.alpha", field(&mut map, "fso.alpha")?)?;
        let beta = parse_f64("fso.beta", field(&mut map, "fso.beta")?)?;
        let xi = parse_f64("fso.xi", field(&mut map, "fso.xi")?)?;
        let detection = match field(&mut map, "fso.detection")?.as_str() {
            "hd" => DetectionType::Hd,
            "imdd" => DetectionType::ImDd,
            other => return Err(format!("fso.detection: expected hd|imdd, got `{other}`")),
        };
        let snr = parse_snr(&field(&mut map, "fso.snr_db")?, "fso.snr_db")?;
        Some(FsoBlock {
            alpha,
            beta,
            xi,
            detection,
            snr,
        })
    } else {
        None
    };

    let rf = if link.needs_rf() {
        let field = |m: &mut BTreeMap<String, (usize, String)>, key: &str| {
            m.remove(key)
                .map(|(_, v)| v)
                .ok_or_else(|| format!("{key}: missing (required for link = {link:?})"))
        };
        let kappa = parse_f64("rf.kappa", field(&mut map, "rf.kappa")?)?;
        let mu = field(&mut map, "rf.mu")?
            .parse::<u32>()
            .map_err(|_| "rf.mu: expected a positive integer".to_string())?;
        let m = field(&mut map, "rf.m")?
            .parse::<u32>()
            .map_err(|_| "rf.m: expected a positive integer".to_string())?;
        let snr = parse_snr(&field(&mut map, "rf.snr_db")?, "rf.snr_db")?;
        Some(RfBlock { kappa, mu, m, snr })
    } else {
        None
    };

    let modulation = match map.remove("modulation.scheme").map(|(_, v)| v) {
        Some(scheme) => {
            let order = match map.remove("modulation.M").map(|(_, v)| v) {
                Some(v) => Some(
                    v.parse::<u32>()
                        .map_err(|_| "modulation.M: expected a positive integer".to_string())?,
                ),
                None => None,
            };
            let spec = match scheme.as_str() {
                "ook" => ModulationSpec::ook(),
                "psk" => ModulationSpec::new(
                    Scheme::Mpsk,
                    order.ok_or("modulation.M: required for psk")?,
                )
                .map_err(|e| e.to_string())?,
                "qam" => ModulationSpec::new(
                    Scheme::Mqam,
                    order.ok_or("modulation.M: required for qam")?,
                )
                .map_err(|e| e.to_string())?,
                other => {
                    return Err(format!(
                        "modulation.scheme: expected ook|psk|qam, got `{other}`"
                    ))
                }
            };
            Some(spec)
        }
        None => {
            map.remove("modulation.M");
            None
        }
    };

    let mut mc = McBlock::default();
    if let Some((_, v)) = map.remove("mc.enabled") {
        mc.enabled = match v.as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => return Err(format!("mc.enabled: expected true|false, got `{other}`")),
        };
    }
    if let Some((_, v)) = map.remove("mc.samples") {
        mc.samples = v
            .parse::<u64>()
            .map_err(|_| "mc.samples: expected a positive integer".to_string())?;
    }
    if let Some((_, v)) = map.remove("mc.seed") {
        mc.seed = v
            .parse::<u64>()
            .map_err(|_| "mc.seed: expected an unsigned integer".to_string())?;
    }
    if let Some((_, v)) = map.remove("mc.workers") {
        mc.workers = v
            .parse::<usize>()
            .map_err(|_| "mc.workers: expected a positive integer".to_string())?;
    }

    if let Some((lineno, _)) = map.values().next() {
        let key = map.keys().next().unwrap();
        return Err(format!("line {lineno}: unknown key `{key}`"));
    }

    // cross-field validation
    let ranges = usize::from(fso.as_ref().map(|b| b.snr.is_range()).unwrap_or(false))
        + usize::from(rf.as_ref().map(|b| b.snr.is_range()).unwrap_or(false));
    if ranges != 1 {
        return Err(format!(
            "exactly one of fso.snr_db / rf.snr_db must be a range (the sweep axis), found {ranges}"
        ));
    }
    if mc.samples == 0 {
        return Err("mc.samples: must be positive".into());
    }
    if mc.workers == 0 {
        return Err("mc.workers: must be positive".into());
    }

    Ok(SweepConfig {
        link,
        task,
        threshold_db,
        fso,
        rf,
        modulation,
        mc,
    })
}

/// Task-specific validation once the subcommand is known.
pub fn validate_for_task(cfg: &SweepConfig, task: Task) -> Result<(), String> {
    if let Some(declared) = cfg.task {
        if declared != task {
            return Err(format!(
                "task: config declares {declared:?} but the {task:?} subcommand was invoked"
            ));
        }
    }
    match task {
        Task::Op => {
            if cfg.threshold_db.is_none() {
                return Err("threshold_db: required for the op task".into());
            }
        }
        Task::Ber => {
            let Some(spec) = cfg.modulation.as_ref() else {
                return Err("modulation.scheme: required for the ber task".into());
            };
            if let Some(b) = cfg.fso.as_ref() {
                if !spec.supports_fso_detection(b.detection) {
                    return Err(format!(
                        "modulation {:?} is not defined for FSO detection {:?}",
                        spec.scheme, b.detection
                    ));
                }
            }
        }
    }
    Ok(())
}
