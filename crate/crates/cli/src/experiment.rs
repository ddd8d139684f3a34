//! Experiment orchestration. Every run is a pure function of the config:
//! symbols come from stream `(seed, "bits")`, the channel from
//! `(seed, "channel")` and radar noise from `(seed, "noise")`; Monte-Carlo
//! trials use the indexed sub-streams of [`monte_carlo_ser`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;

use isacjam_core::baseline::{lfm_waveform, tradeoff_waveform, TradeoffConfig};
use isacjam_core::comm::{
    build_channel, complex_gaussian, demodulate, equalize, monte_carlo_ser, ChannelSpec, Constellation, DesignFn,
    MultipathChannel, SerPoint,
};
use isacjam_core::dmm::{Design, DmmSolver, SolverConfig, SolverTrace};
use isacjam_core::jamming::TransferMatrix;
use isacjam_core::radar::{delay_doppler_map, synthesize_echoes, DelayDopplerMap, EchoScene};
use isacjam_core::rng::substream;
use isacjam_core::signal::{amplitude_db, il, isl, lpg, papr, pslr, xcorr_fft, CorrelationProfile};
use isacjam_core::{Complex64, ComplexSequence};

use crate::config::{ExperimentKind, ScenarioConfig};
use crate::error::{WorkbenchError, WorkbenchResult};
use crate::persist::save_sequence;

/// Waveform/filter pair under evaluation.
#[derive(Debug, Clone)]
pub struct Variant {
    pub name: String,
    pub x: ComplexSequence,
    pub w: ComplexSequence,
}

impl Variant {
    fn matched(name: &str, x: ComplexSequence) -> Self {
        Self {
            name: name.into(),
            w: x.clone(),
            x,
        }
    }

    fn from_design(name: &str, d: Design) -> Self {
        Self {
            name: name.into(),
            x: d.x,
            w: d.w,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub pslr_db: f64,
    pub lpg_db: f64,
    pub isl: f64,
    pub il: f64,
    pub papr: f64,
    /// Peak of the jamming-only filter output relative to the target-only
    /// peak, at the configured JSR.
    pub jam_peak_db: f64,
}

fn peak(p: &CorrelationProfile) -> f64 {
    p.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Jamming-only filter output peak against the fixed reference `L` (the
/// matched-filter target peak at unit amplitude):
/// `20 log10(|α_J| max_k |C_{Jx,w}(k)| / (|α_T| L))`.
pub fn jamming_output_db(x: &[Complex64], w: &[Complex64], j: &TransferMatrix, jsr_db: f64) -> WorkbenchResult<f64> {
    let jam = peak(&xcorr_fft(&j.apply(x)?, w)?);
    Ok(amplitude_db(jam / x.len() as f64) + jsr_db)
}

/// `20 log10(|α_J| max_k |C_{Jx,w}(k)| / (|α_T| max_k |C_{x,w}(k)|))`.
pub fn jamming_peak_db(x: &[Complex64], w: &[Complex64], j: &TransferMatrix, jsr_db: f64) -> WorkbenchResult<f64> {
    let target = peak(&xcorr_fft(x, w)?);
    let jam = peak(&xcorr_fft(&j.apply(x)?, w)?);
    Ok(amplitude_db(jam / target) + jsr_db)
}

pub fn pair_metrics(x: &[Complex64], w: &[Complex64], j: &TransferMatrix, jsr_db: f64) -> WorkbenchResult<PairMetrics> {
    Ok(PairMetrics {
        pslr_db: pslr(&xcorr_fft(x, w)?)?,
        lpg_db: lpg(x, w)?,
        isl: isl(x, w)?,
        il: il(&j.apply(x)?, w)?,
        papr: papr(x)?,
        jam_peak_db: jamming_peak_db(x, w, j, jsr_db)?,
    })
}

/// Everything derived from a config before any design runs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pub j: TransferMatrix,
    pub constellation: Constellation,
    /// Desired communication symbols.
    pub symbols: Vec<Complex64>,
    pub channel: MultipathChannel,
    /// LFM radar reference.
    pub lfm: ComplexSequence,
}

fn draw_symbols(c: &Constellation, len: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let n = c.points().len();
    (0..len).map(|_| c.points()[rng.random_range(0..n)]).collect()
}

impl Scenario {
    pub fn new(cfg: &ScenarioConfig) -> WorkbenchResult<Self> {
        cfg.validate()?;
        let n = cfg.length;
        let constellation = Constellation::new(cfg.modulation.into());
        let symbols = draw_symbols(&constellation, n, &mut substream(cfg.seed, "bits", &[]));
        let channel = build_channel(&cfg.channel_bins(), None, n, &mut substream(cfg.seed, "channel", &[]))?;
        let lfm = lfm_waveform(n, cfg.bandwidth, cfg.pulse_width, cfg.sample_interval)
            .map_err(|e| WorkbenchError::Config(format!("LFM reference: {e}")))?;
        Ok(Self {
            cfg: cfg.clone(),
            j: cfg.transfer()?,
            constellation,
            symbols,
            channel,
            lfm,
        })
    }

    /// DMM design from the scenario symbols.
    pub fn design_with(&self, solver: &SolverConfig) -> WorkbenchResult<Design> {
        Ok(DmmSolver::new(&self.symbols, &self.j, solver.clone())?.solve(None)?)
    }

    pub fn proposed(&self) -> WorkbenchResult<Design> {
        self.design_with(&self.cfg.solver())
    }

    /// The jamming-suppression design without the communication term.
    pub fn anti_jamming(&self) -> WorkbenchResult<Design> {
        self.design_with(&SolverConfig {
            epsilon: 0.0,
            ..self.cfg.solver()
        })
    }

    pub fn tradeoff_config(&self) -> TradeoffConfig {
        TradeoffConfig {
            rho: self.cfg.tradeoff_rho,
            gamma: self.cfg.gamma,
            ..TradeoffConfig::default()
        }
    }

    /// LFM-anchored trade-off waveform for the scenario channel.
    pub fn tradeoff(&self) -> WorkbenchResult<ComplexSequence> {
        Ok(tradeoff_waveform(&self.channel, &self.symbols, &self.lfm, &self.tradeoff_config())?.x)
    }

    /// LFM, trade-off, ε = 0 and configured-ε pairs, in that order.
    pub fn variants(&self) -> WorkbenchResult<Vec<Variant>> {
        let (anti, proposed) = rayon::join(|| self.anti_jamming(), || self.proposed());
        Ok(vec![
            Variant::matched("lfm", self.lfm.clone()),
            Variant::matched("isac_tradeoff", self.tradeoff()?),
            Variant::from_design("anti_jamming", anti?),
            Variant::from_design("proposed", proposed?),
        ])
    }

    pub fn metrics(&self, v: &Variant) -> WorkbenchResult<PairMetrics> {
        pair_metrics(&v.x, &v.w, &self.j, self.cfg.jsr_db)
    }

    /// Radar echoes for `x` over `pulses` pulses. All variants see the same
    /// noise realisation.
    pub fn echoes(&self, x: &[Complex64], pulses: usize) -> WorkbenchResult<Vec<Vec<Complex64>>> {
        let scene: EchoScene = self.cfg.scene(pulses);
        Ok(synthesize_echoes(&scene, x, &self.j, &mut substream(self.cfg.seed, "noise", &[]))?)
    }

    pub fn delay_doppler(&self, v: &Variant) -> WorkbenchResult<DelayDopplerMap> {
        let echoes = self.echoes(&v.x, self.cfg.pulses)?;
        Ok(delay_doppler_map(&echoes, &v.w, self.cfg.doppler_bins)?)
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn write_file(path: &Path, body: &str) -> WorkbenchResult<()> {
    std::fs::write(path, body).map_err(|source| WorkbenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(dir: &Path) -> WorkbenchResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| WorkbenchError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Collects CSV files for one run; rows are written by a single thread.
struct Output<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Output<'a> {
    fn new(dir: &'a Path) -> WorkbenchResult<Self> {
        create_dir(dir)?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> WorkbenchResult<()> {
        let mut body = header.join(",");
        body.push('\n');
        for row in rows {
            body.push_str(&row.join(","));
            body.push('\n');
        }
        self.write(name, &body)
    }

    fn write(&mut self, name: &str, body: &str) -> WorkbenchResult<()> {
        let path = self.dir.join(name);
        write_file(&path, body)?;
        self.files.push(path);
        Ok(())
    }
}

pub fn trace_rows(trace: &SolverTrace) -> Vec<Vec<String>> {
    trace
        .records
        .iter()
        .map(|r| {
            vec![
                r.iteration.to_string(),
                num(r.objective.composite),
                num(r.objective.isl),
                num(r.objective.il),
                num(r.objective.similarity),
                num(r.gap),
                num(r.lpg_db),
            ]
        })
        .collect()
}

pub const TRACE_HEADER: [&str; 7] = [
    "iteration [iterations]",
    "composite [linear]",
    "isl [linear]",
    "il [linear]",
    "similarity [linear]",
    "eps_gap [linear]",
    "lpg [dB]",
];

const METRICS_HEADER: [&str; 7] = [
    "variant",
    "pslr [dB]",
    "lpg [dB]",
    "isl [linear]",
    "il [linear]",
    "papr [linear]",
    "jam_peak [dB]",
];

fn metrics_row(name: &str, m: &PairMetrics) -> Vec<String> {
    vec![
        name.to_string(),
        num(m.pslr_db),
        num(m.lpg_db),
        num(m.isl),
        num(m.il),
        num(m.papr),
        num(m.jam_peak_db),
    ]
}

/// Runs the solver and writes `x.txt`, `w.txt`, `trace.csv` and
/// `metrics.csv`.
pub fn run_design(cfg: &ScenarioConfig, dir: &Path) -> WorkbenchResult<(Design, Vec<PathBuf>)> {
    let sc = Scenario::new(cfg)?;
    let design = sc.proposed()?;
    let mut out = Output::new(dir)?;
    let hash = cfg.hash();
    for (name, seq) in [("x.txt", &design.x), ("w.txt", &design.w)] {
        let path = dir.join(name);
        save_sequence(&path, &name[..1], &hash, seq)?;
        out.files.push(path);
    }
    out.csv("trace.csv", &TRACE_HEADER, trace_rows(&design.trace))?;
    let m = pair_metrics(&design.x, &design.w, &sc.j, cfg.jsr_db)?;
    out.csv("metrics.csv", &METRICS_HEADER, [metrics_row("proposed", &m)])?;
    out.write("config.toml", &cfg.to_toml())?;
    Ok((design, out.files))
}

/// Metrics of the `x.txt` / `w.txt` pair previously saved in `dir` for the
/// same config. A header hash that disagrees with `cfg` is a config error.
pub fn run_evaluate(cfg: &ScenarioConfig, dir: &Path) -> WorkbenchResult<(PairMetrics, Vec<PathBuf>)> {
    let sc = Scenario::new(cfg)?;
    let hash = cfg.hash();
    let mut seqs = Vec::new();
    for name in ["x.txt", "w.txt"] {
        let saved = crate::persist::load_sequence(&dir.join(name))?;
        match saved.config_hash.as_deref() {
            Some(h) if h == hash => {}
            other => {
                return Err(WorkbenchError::Config(format!(
                    "{name} was designed for config {} but the current config hashes to {hash}",
                    other.unwrap_or("<none>")
                )))
            }
        }
        if saved.samples.len() != cfg.length {
            return Err(WorkbenchError::Config(format!(
                "{name} has {} samples, `length` is {}",
                saved.samples.len(),
                cfg.length
            )));
        }
        seqs.push(saved.samples);
    }
    let m = pair_metrics(&seqs[0], &seqs[1], &sc.j, cfg.jsr_db)?;
    let mut out = Output::new(dir)?;
    out.csv("evaluation.csv", &METRICS_HEADER, [metrics_row("saved", &m)])?;
    Ok((m, out.files))
}

/// Runs `cfg.experiment`, writing its CSVs and the resolved config to `dir`.
pub fn run_experiment(cfg: &ScenarioConfig, dir: &Path) -> WorkbenchResult<Vec<PathBuf>> {
    let sc = Scenario::new(cfg)?;
    let mut out = Output::new(dir)?;
    match cfg.experiment {
        ExperimentKind::Convergence => convergence(&sc, &mut out)?,
        ExperimentKind::PulseCompression => pulse_compression(&sc, &mut out)?,
        ExperimentKind::DelayDoppler => delay_doppler(&sc, &mut out)?,
        ExperimentKind::SerSweep => ser_sweep(&sc, &mut out)?,
        ExperimentKind::BetaSweep => beta_sweep(&sc, &mut out)?,
        ExperimentKind::EpsilonTradeoff => epsilon_tradeoff(&sc, &mut out)?,
        ExperimentKind::PhaseCompare => phase_compare(&sc, &mut out)?,
    }
    out.write("config.toml", &cfg.to_toml())?;
    Ok(out.files)
}

fn convergence(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let d = sc.proposed()?;
    out.csv("convergence.csv", &TRACE_HEADER, trace_rows(&d.trace))
}

fn pulse_compression(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let variants = sc.variants()?;
    let n = sc.cfg.length as isize;

    let profiles: Vec<CorrelationProfile> = variants
        .iter()
        .map(|v| xcorr_fft(&v.x, &v.w))
        .collect::<Result<_, _>>()?;
    let refs: Vec<f64> = profiles.iter().map(peak).collect();
    let mut header = vec!["lag [samples]".to_string()];
    header.extend(variants.iter().map(|v| format!("{} [dB]", v.name)));
    let rows = (1 - n..n).map(|k| {
        let mut row = vec![k.to_string()];
        for (p, r) in profiles.iter().zip(&refs) {
            row.push(num(amplitude_db(p.at(k).expect("lag in range").norm() / r)));
        }
        row
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("pulse_compression.csv", &header_refs, rows)?;

    // Single noiseless pulse with the jammer on, normalised to the
    // target-only peak of each pair.
    let scene = EchoScene {
        snr_db: f64::INFINITY,
        ..sc.cfg.scene(1)
    };
    let target_only = EchoScene {
        jsr_db: f64::NEG_INFINITY,
        ..scene.clone()
    };
    let mut columns = Vec::new();
    for v in &variants {
        let mut rng = substream(sc.cfg.seed, "noise", &[]);
        let y = &synthesize_echoes(&scene, &v.x, &sc.j, &mut rng)?[0];
        let y0 = &synthesize_echoes(&target_only, &v.x, &sc.j, &mut rng)?[0];
        let reference = isacjam_core::radar::pulse_compress(y0, &v.w)?.peak().1;
        columns.push(isacjam_core::radar::pulse_compress(y, &v.w)?.db_relative(reference));
    }
    let mut header = vec!["delay_bin [samples]".to_string()];
    header.extend(variants.iter().map(|v| format!("{} [dB]", v.name)));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..columns[0].len()).map(|d| {
        let mut row = vec![d.to_string()];
        row.extend(columns.iter().map(|c| num(c[d])));
        row
    });
    out.csv("pulse_compression_jamming.csv", &header_refs, rows)?;

    let metrics: Vec<Vec<String>> = variants
        .iter()
        .map(|v| Ok(metrics_row(&v.name, &sc.metrics(v)?)))
        .collect::<WorkbenchResult<_>>()?;
    out.csv("metrics.csv", &METRICS_HEADER, metrics)
}

fn delay_doppler(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let variants = sc.variants()?;
    let maps: Vec<DelayDopplerMap> = variants
        .par_iter()
        .map(|v| sc.delay_doppler(v))
        .collect::<WorkbenchResult<_>>()?;
    let mut summary = Vec::new();
    for (v, map) in variants.iter().zip(&maps) {
        let (di, dd, vmax) = map.argmax();
        let truth_doppler = map.nearest_bin(sc.cfg.theta);
        let mut body = String::from("doppler_idx [index],theta [rad],delay_bin [samples],magnitude [dB]\n");
        for (i, row) in map.magnitudes.iter().enumerate() {
            for (d, m) in row.iter().enumerate() {
                let _ = writeln!(body, "{i},{},{d},{}", num(map.grid[i]), num(amplitude_db(m / vmax)));
            }
        }
        out.write(&format!("delay_doppler_{}.csv", v.name), &body)?;
        summary.push(vec![
            v.name.clone(),
            di.to_string(),
            num(map.grid[di]),
            dd.to_string(),
            truth_doppler.to_string(),
            sc.cfg.target_delay_bins.to_string(),
            (di == truth_doppler && dd == sc.cfg.target_delay_bins).to_string(),
        ]);
    }
    out.csv(
        "delay_doppler_summary.csv",
        &[
            "variant",
            "argmax_doppler_idx [index]",
            "argmax_theta [rad]",
            "argmax_delay_bin [samples]",
            "target_doppler_idx [index]",
            "target_delay_bin [samples]",
            "target_detected [bool]",
        ],
        summary,
    )
}

/// Per-trial designs used by the SER sweep.
pub fn ser_variants(sc: &Scenario) -> Vec<(String, Option<Box<DesignFn<'_>>>)> {
    let mut v: Vec<(String, Option<Box<DesignFn<'_>>>)> = vec![("com_only".into(), None)];
    for &eps in &sc.cfg.ser_epsilons {
        let solver = SolverConfig {
            epsilon: eps,
            max_iter: sc.cfg.ser_max_iter,
            ..sc.cfg.solver()
        };
        let j = sc.j.clone();
        let f = move |s: &[Complex64], _: &MultipathChannel| -> isacjam_core::Result<Vec<Complex64>> {
            Ok(DmmSolver::new(s, &j, solver.clone())?.solve(None)?.x.into_vec())
        };
        v.push((format!("proposed_eps{eps}"), Some(Box::new(f))));
    }
    let tcfg = sc.tradeoff_config();
    let lfm = sc.lfm.clone();
    let f = move |s: &[Complex64], h: &MultipathChannel| -> isacjam_core::Result<Vec<Complex64>> {
        Ok(tradeoff_waveform(h, s, &lfm, &tcfg)?.x.into_vec())
    };
    v.push(("isac_tradeoff".into(), Some(Box::new(f))));
    v
}

pub fn ser_curves(sc: &Scenario) -> WorkbenchResult<Vec<(String, Vec<SerPoint>)>> {
    let channel = ChannelSpec {
        delays: sc.cfg.channel_bins(),
        gains: None,
    };
    ser_variants(sc)
        .into_iter()
        .map(|(name, f)| {
            let pts = monte_carlo_ser(
                f.as_deref(),
                &channel,
                &sc.constellation,
                sc.cfg.length,
                &sc.cfg.ser_snr_db,
                sc.cfg.ser_trials,
                sc.cfg.seed,
            )?;
            Ok((name, pts))
        })
        .collect()
}

fn ser_sweep(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let curves = ser_curves(sc)?;
    let rows = curves.iter().flat_map(|(name, pts)| {
        pts.iter().map(move |p| {
            vec![
                num(p.snr_db),
                num(p.ser()),
                num(p.std_err()),
                p.trials.to_string(),
                name.clone(),
            ]
        })
    });
    out.csv(
        "ser.csv",
        &["snr [dB]", "ser [ratio]", "ser_std_err [ratio]", "trials [count]", "variant"],
        rows,
    )
}

/// SER of a fixed transmit block `x` carrying `sent` over `trials`
/// independent channel and noise draws at one SNR.
pub fn fixed_block_ser(sc: &Scenario, x: &[Complex64], snr_db: f64) -> WorkbenchResult<f64> {
    let pts = sc.constellation.points();
    let sent: Vec<usize> = sc
        .symbols
        .iter()
        .map(|s| pts.iter().position(|p| p == s).expect("symbol drawn from the constellation"))
        .collect();
    let bins = sc.cfg.channel_bins();
    let errors: usize = (0..sc.cfg.ser_trials)
        .into_par_iter()
        .map(|trial| -> WorkbenchResult<usize> {
            let trial = trial as u64;
            let ch = build_channel(&bins, None, x.len(), &mut substream(sc.cfg.seed, "channel", &[trial]))?;
            let hx = ch.apply_noiseless(x)?;
            let power = hx.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
            let var = power / 10f64.powf(snr_db / 10.0);
            let mut rng = substream(sc.cfg.seed, "noise", &[trial, 0]);
            let y: Vec<Complex64> = hx.iter().map(|v| v + complex_gaussian(&mut rng, var)).collect();
            let got = demodulate(&equalize(&y, &ch)?, &sc.constellation);
            Ok(got.iter().zip(&sent).filter(|(a, b)| a != b).count())
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(errors as f64 / (sc.cfg.ser_trials * x.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPoint {
    pub beta1: f64,
    pub lpg_db: f64,
    /// See [`jamming_output_db`].
    pub jam_output_db: f64,
    /// See [`jamming_peak_db`].
    pub jam_peak_db: f64,
    pub ser: f64,
}

pub fn beta_points(sc: &Scenario) -> WorkbenchResult<Vec<BetaPoint>> {
    sc.cfg
        .beta1_grid
        .par_iter()
        .map(|&beta1| {
            let d = sc.design_with(&SolverConfig {
                beta1,
                beta2: 1.0 - beta1,
                ..sc.cfg.solver()
            })?;
            Ok(BetaPoint {
                beta1,
                lpg_db: lpg(&d.x, &d.w)?,
                jam_output_db: jamming_output_db(&d.x, &d.w, &sc.j, sc.cfg.jsr_db)?,
                jam_peak_db: jamming_peak_db(&d.x, &d.w, &sc.j, sc.cfg.jsr_db)?,
                ser: fixed_block_ser(sc, &d.x, sc.cfg.beta_ser_snr_db)?,
            })
        })
        .collect()
}

fn beta_sweep(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let rows = beta_points(sc)?
        .into_iter()
        .map(|p| {
            vec![
                num(p.beta1),
                num(p.lpg_db),
                num(p.jam_output_db),
                num(p.ser),
                num(p.jam_peak_db),
            ]
        });
    out.csv(
        "beta_sweep.csv",
        &[
            "beta1 [linear]",
            "lpg [dB]",
            "jam_peak [dB]",
            "ser [ratio]",
            "jam_to_target [dB]",
        ],
        rows,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonPoint {
    pub epsilon: f64,
    pub isl: f64,
    pub il: f64,
    pub pslr_db: f64,
}

pub fn epsilon_points(sc: &Scenario) -> WorkbenchResult<Vec<EpsilonPoint>> {
    sc.cfg
        .epsilon_grid
        .par_iter()
        .map(|&epsilon| {
            let d = sc.design_with(&SolverConfig {
                epsilon,
                ..sc.cfg.solver()
            })?;
            Ok(EpsilonPoint {
                epsilon,
                isl: isl(&d.x, &d.w)?,
                il: il(&sc.j.apply(&d.x)?, &d.w)?,
                pslr_db: pslr(&xcorr_fft(&d.x, &d.w)?)?,
            })
        })
        .collect()
}

fn epsilon_tradeoff(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let rows = epsilon_points(sc)?
        .into_iter()
        .map(|p| vec![num(p.epsilon), num(p.isl), num(p.il), num(p.pslr_db)]);
    out.csv(
        "epsilon_tradeoff.csv",
        &["epsilon [linear]", "isl [linear]", "il [linear]", "pslr [dB]"],
        rows,
    )
}

fn phase_compare(sc: &Scenario, out: &mut Output) -> WorkbenchResult<()> {
    let d = sc.proposed()?;
    let rows = sc
        .symbols
        .iter()
        .zip(d.x.iter())
        .enumerate()
        .map(|(i, (s, x))| vec![i.to_string(), num(s.arg()), num(x.arg()), num(x.norm())]);
    out.csv(
        "phase_compare.csv",
        &["index [samples]", "phase_s [rad]", "phase_x [rad]", "modulus_x [linear]"],
        rows,
    )
}
