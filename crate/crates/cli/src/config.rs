//! Scenario configuration: a flat TOML key-value file layered over a named
//! preset, then over `--override key=value` pairs.
//!
//! Times are in seconds, frequencies in Hz, angles in radians and levels in
//! dB. Every key is listed in [`ScenarioConfig`]; anything else is rejected.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use isacjam_core::comm::{delay_bins, Modulation};
use isacjam_core::dmm::SolverConfig;
use isacjam_core::jamming::{floor_ratio, JammerSpec, TransferMatrix};
use isacjam_core::radar::EchoScene;

use crate::error::{WorkbenchError, WorkbenchResult};

pub const DEFAULT_PRESET: &str = "table3-pprj";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Convergence,
    PulseCompression,
    DelayDoppler,
    SerSweep,
    BetaSweep,
    EpsilonTradeoff,
    PhaseCompare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Convergence,
        ExperimentKind::PulseCompression,
        ExperimentKind::DelayDoppler,
        ExperimentKind::SerSweep,
        ExperimentKind::BetaSweep,
        ExperimentKind::EpsilonTradeoff,
        ExperimentKind::PhaseCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::PulseCompression => "pulse_compression",
            ExperimentKind::DelayDoppler => "delay_doppler",
            ExperimentKind::SerSweep => "ser_sweep",
            ExperimentKind::BetaSweep => "beta_sweep",
            ExperimentKind::EpsilonTradeoff => "epsilon_tradeoff",
            ExperimentKind::PhaseCompare => "phase_compare",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JammerType {
    Pprj,
    Rrj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationName {
    Qpsk,
    Qam16,
}

impl From<ModulationName> for Modulation {
    fn from(m: ModulationName) -> Self {
        match m {
            ModulationName::Qpsk => Modulation::Qpsk,
            ModulationName::Qam16 => Modulation::Qam16,
        }
    }
}

/// Fully resolved scenario. Field names are the file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Preset the file was layered on; informational once resolved.
    pub preset: String,
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// Output directory.
    pub output: String,

    // Waveform.
    pub length: usize,
    pub pulse_width: f64,
    pub bandwidth: f64,
    pub sample_interval: f64,

    // Jammer.
    pub jammer: JammerType,
    pub intercept_time: f64,
    /// RRJ interception period; ignored for PPRJ.
    pub repeat_period: f64,
    pub repeats: usize,

    // Solver.
    pub rho: f64,
    pub epsilon: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    /// `a_max / L`.
    pub a_max_ratio: f64,
    /// `a_min / L`.
    pub a_min_ratio: f64,
    pub eta: f64,
    pub max_iter: usize,
    pub accel: bool,

    // Communication.
    pub modulation: ModulationName,
    /// Path delays relative to the line-of-sight path.
    pub channel_delays: Vec<f64>,

    // Radar scene.
    pub target_delay_bins: usize,
    /// Extra delay of the jammer retransmission behind the target echo.
    pub jammer_delay: f64,
    pub theta: f64,
    pub jsr_db: f64,
    pub snr_db: f64,
    pub pulses: usize,
    pub doppler_bins: usize,

    // Experiment grids.
    pub ser_snr_db: Vec<f64>,
    pub ser_trials: usize,
    /// Solver iteration cap for the per-trial designs of the SER sweeps.
    pub ser_max_iter: usize,
    pub ser_epsilons: Vec<f64>,
    pub beta1_grid: Vec<f64>,
    /// SNR at which the beta sweep measures SER.
    pub beta_ser_snr_db: f64,
    pub epsilon_grid: Vec<f64>,
    /// Weight of the communication term in the LFM-anchored trade-off design.
    pub tradeoff_rho: f64,
}

impl ScenarioConfig {
    pub fn solver(&self) -> SolverConfig {
        let l = self.length as f64;
        SolverConfig {
            rho: self.rho,
            epsilon: self.epsilon,
            beta1: self.beta1,
            beta2: self.beta2,
            gamma: self.gamma,
            a_max: self.a_max_ratio * l,
            a_min: self.a_min_ratio * l,
            eta: self.eta,
            max_iter: self.max_iter,
            accel: self.accel,
        }
    }

    pub fn jammer_spec(&self) -> JammerSpec {
        match self.jammer {
            JammerType::Pprj => JammerSpec::pprj(self.sample_interval, self.intercept_time, self.repeats, self.length),
            JammerType::Rrj => JammerSpec::rrj(
                self.sample_interval,
                self.intercept_time,
                self.repeat_period,
                self.repeats,
                self.length,
            ),
        }
    }

    pub fn transfer(&self) -> WorkbenchResult<TransferMatrix> {
        self.jammer_spec().build().map_err(|e| config_err("jammer", e))
    }

    pub fn channel_bins(&self) -> Vec<usize> {
        delay_bins(&self.channel_delays, self.sample_interval)
    }

    pub fn jammer_delay_bins(&self) -> usize {
        floor_ratio(self.jammer_delay, self.sample_interval)
    }

    /// Echo scene for `pulses` pulses at the configured JSR and SNR.
    pub fn scene(&self, pulses: usize) -> EchoScene {
        EchoScene {
            snr_db: self.snr_db,
            ..EchoScene::noiseless(self.target_delay_bins, self.jammer_delay_bins(), self.theta, self.jsr_db, pulses)
        }
    }

    pub fn validate(&self) -> WorkbenchResult<()> {
        for (key, v) in [
            ("pulse_width", self.pulse_width),
            ("bandwidth", self.bandwidth),
            ("sample_interval", self.sample_interval),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(WorkbenchError::Config(format!("`{key}` must be positive, got {v}")));
            }
        }
        let expect = floor_ratio(self.pulse_width, self.sample_interval);
        if self.length != expect {
            return Err(WorkbenchError::Config(format!(
                "`length` = {} disagrees with `pulse_width` / `sample_interval` = {} / {} (floor {expect})",
                self.length, self.pulse_width, self.sample_interval
            )));
        }
        if self.length < 2 {
            return Err(WorkbenchError::Config("`length` must be at least 2".into()));
        }
        self.solver().validate().map_err(|e| config_err("solver", e))?;
        if !(0.0..=1.0).contains(&self.tradeoff_rho) {
            return Err(WorkbenchError::Config("`tradeoff_rho` outside [0, 1]".into()));
        }
        self.transfer()?;

        if self.channel_delays.is_empty() {
            return Err(WorkbenchError::Config("`channel_delays` is empty".into()));
        }
        if self.channel_delays.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(WorkbenchError::Config("`channel_delays` must be non-negative".into()));
        }
        let mut bins = self.channel_bins();
        bins.sort_unstable();
        if bins.windows(2).any(|w| w[0] == w[1]) || bins.last().is_some_and(|&b| b >= self.length) {
            return Err(WorkbenchError::Config(format!(
                "`channel_delays` map to bins {bins:?}; they must be distinct and below `length`"
            )));
        }

        if !(self.jammer_delay >= 0.0 && self.jammer_delay.is_finite()) {
            return Err(WorkbenchError::Config("`jammer_delay` must be non-negative".into()));
        }
        if !self.theta.is_finite() || !self.jsr_db.is_finite() {
            return Err(WorkbenchError::Config("`theta` and `jsr_db` must be finite".into()));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(WorkbenchError::Config("`snr_db` must be finite or +inf".into()));
        }
        if self.pulses == 0 {
            return Err(WorkbenchError::Config("`pulses` must be positive".into()));
        }
        if self.doppler_bins < 2 {
            return Err(WorkbenchError::Config("`doppler_bins` must be at least 2".into()));
        }

        for (key, grid) in [
            ("ser_snr_db", &self.ser_snr_db),
            ("ser_epsilons", &self.ser_epsilons),
            ("beta1_grid", &self.beta1_grid),
            ("epsilon_grid", &self.epsilon_grid),
        ] {
            if grid.is_empty() {
                return Err(WorkbenchError::Config(format!("`{key}` is empty")));
            }
            if grid.iter().any(|v| v.is_nan()) {
                return Err(WorkbenchError::Config(format!("`{key}` contains NaN")));
            }
        }
        if self.beta1_grid.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(WorkbenchError::Config("`beta1_grid` values must lie in [0, 1]".into()));
        }
        if self.epsilon_grid.iter().chain(&self.ser_epsilons).any(|e| *e < 0.0 || !e.is_finite()) {
            return Err(WorkbenchError::Config(
                "`epsilon_grid` and `ser_epsilons` must be non-negative".into(),
            ));
        }
        if self.ser_trials == 0 || self.ser_max_iter == 0 {
            return Err(WorkbenchError::Config("`ser_trials` and `ser_max_iter` must be positive".into()));
        }
        Ok(())
    }

    /// Canonical TOML text; loading it back yields an identical config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serialises")
    }

    /// Hex SHA-256 of [`Self::to_toml`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("scenario config serialises")
    }
}

fn config_err(what: &str, e: isacjam_core::Error) -> WorkbenchError {
    WorkbenchError::Config(format!("{what}: {e}"))
}

/// Name and one-line description of every preset.
pub fn preset_names() -> Vec<(&'static str, &'static str)> {
    vec![
        ("table3-pprj", "L=256 PPRJ scenario: T_L 4 us, 4 repeats, JSR 15 dB"),
        ("table3-rrj", "L=256 RRJ scenario: T_L 1 us, T_s 6.4 us, 5 repeats"),
        ("desk-pprj", "L=64 PPRJ scenario scaled down for quick runs"),
        ("desk-rrj", "L=64 RRJ scenario scaled down for quick runs"),
        ("convergence", "L=64 constant-modulus (rho=1, gamma=1) convergence run"),
        ("desk-ser", "L=64 SER sweep over 1000 Monte-Carlo trials"),
    ]
}

pub fn preset(name: &str) -> WorkbenchResult<ScenarioConfig> {
    let table3 = ScenarioConfig {
        preset: String::new(),
        experiment: ExperimentKind::PulseCompression,
        seed: 1,
        output: "out".into(),
        length: 256,
        pulse_width: 25.6e-6,
        bandwidth: 10e6,
        sample_interval: 0.1e-6,
        jammer: JammerType::Pprj,
        intercept_time: 4e-6,
        repeat_period: 6.4e-6,
        repeats: 4,
        rho: 0.4,
        epsilon: 2.0,
        beta1: 0.12,
        beta2: 0.88,
        gamma: 1.5,
        a_max_ratio: 1.0,
        a_min_ratio: 1e-4,
        eta: 1e-5,
        max_iter: 2000,
        accel: true,
        modulation: ModulationName::Qpsk,
        channel_delays: vec![0.0, 0.5e-6, 0.8e-6],
        target_delay_bins: 20,
        jammer_delay: 1e-6,
        theta: 1.0,
        jsr_db: 15.0,
        snr_db: 10.0,
        pulses: 64,
        doppler_bins: 201,
        ser_snr_db: vec![0.0, 4.0, 8.0, 12.0, 16.0],
        ser_trials: 1000,
        ser_max_iter: 300,
        ser_epsilons: vec![2.0, 3.0],
        beta1_grid: vec![0.12, 0.3, 0.5],
        beta_ser_snr_db: 10.0,
        epsilon_grid: vec![0.0, 1.0, 2.0, 3.0],
        tradeoff_rho: 0.1,
    };
    let desk = |jammer: JammerType| ScenarioConfig {
        length: 64,
        pulse_width: 6.4e-6,
        jammer,
        ..match jammer {
            JammerType::Pprj => ScenarioConfig {
                intercept_time: 1e-6,
                repeats: 4,
                ..table3.clone()
            },
            JammerType::Rrj => ScenarioConfig {
                intercept_time: 0.2e-6,
                repeat_period: 1.6e-6,
                repeats: 5,
                ..table3.clone()
            },
        }
    };
    let mut cfg = match name {
        "table3-pprj" => table3,
        "table3-rrj" => ScenarioConfig {
            jammer: JammerType::Rrj,
            intercept_time: 1e-6,
            repeat_period: 6.4e-6,
            repeats: 5,
            ..table3
        },
        "desk-pprj" => desk(JammerType::Pprj),
        "desk-rrj" => desk(JammerType::Rrj),
        "convergence" => ScenarioConfig {
            experiment: ExperimentKind::Convergence,
            rho: 1.0,
            gamma: 1.0,
            ..desk(JammerType::Pprj)
        },
        "desk-ser" => ScenarioConfig {
            experiment: ExperimentKind::SerSweep,
            ..desk(JammerType::Pprj)
        },
        other => {
            let known: Vec<_> = preset_names().iter().map(|p| p.0).collect();
            return Err(WorkbenchError::Config(format!(
                "unknown preset `{other}` (known: {})",
                known.join(", ")
            )));
        }
    };
    cfg.preset = name.to_string();
    Ok(cfg)
}

/// Parses `key=value`; the value is read as a TOML value, falling back to a
/// bare string.
pub fn parse_override(spec: &str) -> WorkbenchResult<(String, toml::Value)> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| WorkbenchError::Config(format!("override `{spec}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(WorkbenchError::Config(format!("override `{spec}` has an empty key")));
    }
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((key.to_string(), value))
}

/// Command-line adjustments applied after the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<String>,
    /// Raw `key=value` strings.
    pub values: Vec<String>,
}

/// Resolves TOML text: preset (from `overrides.preset`, else the file's
/// `preset` key, else [`DEFAULT_PRESET`]), then the file's keys, then the
/// overrides. Unknown keys are rejected by name.
pub fn resolve(text: &str, overrides: &Overrides) -> WorkbenchResult<ScenarioConfig> {
    let file: toml::Table = toml::from_str(text).map_err(|e| WorkbenchError::Config(format!("parse error: {e}")))?;
    let preset_name = match (&overrides.preset, file.get("preset")) {
        (Some(p), _) => p.clone(),
        (None, Some(toml::Value::String(p))) => p.clone(),
        (None, Some(_)) => return Err(WorkbenchError::Config("`preset` must be a string".into())),
        (None, None) => DEFAULT_PRESET.to_string(),
    };
    let base = preset(&preset_name)?.to_table();
    let mut table = base.clone();
    let mut touched = Vec::new();

    let mut set = |key: &str, value: toml::Value, origin: &str| -> WorkbenchResult<()> {
        if !table.contains_key(key) {
            return Err(WorkbenchError::Config(format!("unknown key `{key}` in {origin}")));
        }
        table.insert(key.to_string(), value);
        touched.push(key.to_string());
        Ok(())
    };
    for (key, value) in file {
        if key != "preset" {
            set(&key, value, "config file")?;
        }
    }
    for spec in &overrides.values {
        let (key, value) = parse_override(spec)?;
        if key == "preset" {
            return Err(WorkbenchError::Config("use --preset to change the preset".into()));
        }
        set(&key, value, "--override")?;
    }
    if let Some(seed) = overrides.seed {
        let seed = i64::try_from(seed).map_err(|_| WorkbenchError::Config("`seed` exceeds i64::MAX".into()))?;
        table.insert("seed".into(), toml::Value::Integer(seed));
    }
    if let Some(out) = &overrides.output {
        table.insert("output".into(), toml::Value::String(out.clone()));
    }
    table.insert("preset".into(), toml::Value::String(preset_name));

    let cfg: ScenarioConfig = match table.try_into() {
        Ok(cfg) => cfg,
        Err(e) => {
            let e: toml::de::Error = e;
            // The deserialiser does not report which key failed; retry the
            // changed keys one at a time on top of the preset.
            for key in &touched {
                let mut probe = base.clone();
                probe.insert(key.clone(), table_value(text, overrides, key));
                if let Err(ke) = probe.try_into::<ScenarioConfig>() {
                    return Err(WorkbenchError::Config(format!("invalid value for `{key}`: {}", ke.message())));
                }
            }
            return Err(WorkbenchError::Config(format!("invalid value: {}", e.message())));
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Final value of `key` after the file and overrides, for error reporting.
fn table_value(text: &str, overrides: &Overrides, key: &str) -> toml::Value {
    let mut value = toml::from_str::<toml::Table>(text)
        .ok()
        .and_then(|mut t| t.remove(key))
        .unwrap_or(toml::Value::Boolean(false));
    for spec in &overrides.values {
        if let Ok((k, v)) = parse_override(spec) {
            if k == key {
                value = v;
            }
        }
    }
    value
}

pub fn load_config(path: &Path, overrides: &Overrides) -> WorkbenchResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WorkbenchError::Config(format!("cannot read {}: {e}", path.display())))?;
    resolve(&text, overrides)
}
