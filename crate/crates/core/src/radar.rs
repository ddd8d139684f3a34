//! Radar receive chain: echo synthesis for a target plus a repeater jammer,
//! pulse compression with an arbitrary filter and the Doppler filter bank.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::comm::complex_gaussian;
use crate::error::{Error, Result};
use crate::fft::Transform;
use crate::jamming::TransferMatrix;
use crate::signal::{amplitude_db, ComplexSequence};

/// Echo geometry and power levels for one coherent processing interval.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoScene {
    /// Target delay in samples.
    pub target_delay: usize,
    /// Extra delay of the jammer retransmission relative to the target echo.
    pub jammer_delay: usize,
    /// Pulse-to-pulse Doppler phase `θ = 2π f_d T_r`, radians.
    pub theta: f64,
    pub target_amp: Complex64,
    /// `10 log10(|α_J|² / |α_T|²)`; `-∞` switches the jammer off.
    pub jsr_db: f64,
    /// Target echo power per sample over noise variance; `+∞` is noiseless.
    pub snr_db: f64,
    pub pulses: usize,
    /// Samples per receive vector. `None` uses `L + max delay + 1`.
    pub window: Option<usize>,
}

impl EchoScene {
    pub fn noiseless(target_delay: usize, jammer_delay: usize, theta: f64, jsr_db: f64, pulses: usize) -> Self {
        Self {
            target_delay,
            jammer_delay,
            theta,
            target_amp: Complex64::new(1.0, 0.0),
            jsr_db,
            snr_db: f64::INFINITY,
            pulses,
            window: None,
        }
    }

    /// Jammer amplitude, in phase with the target echo.
    pub fn jammer_amp(&self) -> Complex64 {
        self.target_amp * 10f64.powf(self.jsr_db / 20.0)
    }

    /// `|α_T|² / 10^{SNR/10}`.
    pub fn noise_var(&self) -> f64 {
        self.target_amp.norm_sqr() / 10f64.powf(self.snr_db / 10.0)
    }

    pub fn window_len(&self, len: usize) -> usize {
        self.window
            .unwrap_or(len + self.target_delay + self.jammer_delay + 1)
    }

    fn validate(&self, len: usize) -> Result<()> {
        if self.pulses == 0 {
            return Err(Error::arg("scene needs at least one pulse"));
        }
        if !self.theta.is_finite() || !self.jsr_db.is_finite() && self.jsr_db != f64::NEG_INFINITY {
            return Err(Error::arg("scene theta and JSR must be finite (JSR may be -inf)"));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::arg("scene SNR must be finite or +inf"));
        }
        let need = len + self.target_delay + self.jammer_delay;
        let window = self.window_len(len);
        if window < need {
            return Err(Error::arg(format!(
                "receive window {window} shorter than the {need} samples the delayed echoes occupy"
            )));
        }
        Ok(())
    }
}

/// `N` receive vectors
/// `y_n = α_T x(· − d_T) e^{jnθ} + α_J (Jx)(· − d_T − d_J) e^{jnθ} + v_n`.
/// Both echoes carry the target's Doppler progression.
pub fn synthesize_echoes<R: Rng + ?Sized>(
    scene: &EchoScene,
    x: &[Complex64],
    j: &TransferMatrix,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    let n = x.len();
    scene.validate(n)?;
    let xj = j.apply(x)?;
    let window = scene.window_len(n);
    let alpha_j = scene.jammer_amp();
    let noise_var = scene.noise_var();

    let mut base = vec![Complex64::default(); window];
    for i in 0..n {
        base[scene.target_delay + i] += scene.target_amp * x[i];
        base[scene.target_delay + scene.jammer_delay + i] += alpha_j * xj[i];
    }
    Ok((0..scene.pulses)
        .map(|p| {
            let rot = Complex64::from_polar(1.0, p as f64 * scene.theta);
            base.iter()
                .map(|v| {
                    let clean = v * rot;
                    if noise_var > 0.0 {
                        clean + complex_gaussian(rng, noise_var)
                    } else {
                        clean
                    }
                })
                .collect()
        })
        .collect())
}

/// Filter output at every full alignment: `out[d] = Σ_l y[d+l] conj(w_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    values: Vec<Complex64>,
}

impl RangeProfile {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn peak(&self) -> (usize, f64) {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    }

    /// Magnitudes in dB relative to `reference`.
    pub fn db_relative(&self, reference: f64) -> Vec<f64> {
        self.values.iter().map(|v| amplitude_db(v.norm() / reference)).collect()
    }

    /// Magnitudes in dB relative to this profile's own peak.
    pub fn db_normalized(&self) -> Vec<f64> {
        self.db_relative(self.peak().1)
    }
}

/// Sliding correlation of `y` against `w` over the `len(y) − L + 1` full
/// alignments, computed with one zero-padded transform product.
pub fn pulse_compress(y: &[Complex64], w: &[Complex64]) -> Result<RangeProfile> {
    let l = w.len();
    if l == 0 || y.len() < l {
        return Err(Error::arg(format!(
            "receive vector of {} samples shorter than filter of {l}",
            y.len()
        )));
    }
    let size = (y.len() + l).next_power_of_two();
    let mut t = Transform::new(size);
    let mut fy = Vec::new();
    let mut fw = Vec::new();
    t.forward_padded(y, &mut fy);
    t.forward_padded(w, &mut fw);
    let mut prod: Vec<Complex64> = fy.iter().zip(&fw).map(|(a, b)| a * b.conj()).collect();
    t.inverse(&mut prod);
    prod.truncate(y.len() - l + 1);
    Ok(RangeProfile { values: prod })
}

/// `θ_i = −π + 2π i / (M − 1)`, `i = 0 … M−1`, endpoints exact.
pub fn doppler_grid(m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::arg("Doppler grid needs at least two bins"));
    }
    use std::f64::consts::PI;
    let mut g: Vec<f64> = (0..m)
        .map(|i| -PI + 2.0 * PI * i as f64 / (m - 1) as f64)
        .collect();
    g[0] = -PI;
    g[m - 1] = PI;
    Ok(g)
}

/// Coherent filter-bank output, `M` Doppler rows by delay bins.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDopplerMap {
    pub grid: Vec<f64>,
    /// `magnitudes[i][d]` for Doppler bin `i` and delay bin `d`.
    pub magnitudes: Vec<Vec<f64>>,
}

impl DelayDopplerMap {
    /// `(doppler_index, delay_bin, magnitude)` of the global maximum; ties go
    /// to the first in row-major order.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.magnitudes.iter().enumerate() {
            for (d, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (i, d, v);
                }
            }
        }
        best
    }

    pub fn delay_bins(&self) -> usize {
        self.magnitudes.first().map_or(0, Vec::len)
    }

    /// Index of the grid point closest to `theta`.
    pub fn nearest_bin(&self, theta: f64) -> usize {
        self.grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - theta).abs().total_cmp(&(b.1 - theta).abs()))
            .map_or(0, |(i, _)| i)
    }
}

/// For every `θ_i`, `|Σ_n PC(y_n, w e^{jnθ_i})| = |Σ_n e^{−jnθ_i} PC(y_n, w)|`.
pub fn delay_doppler_map(echoes: &[Vec<Complex64>], w: &ComplexSequence, m: usize) -> Result<DelayDopplerMap> {
    let grid = doppler_grid(m)?;
    if echoes.is_empty() {
        return Err(Error::arg("no echoes"));
    }
    let profiles: Vec<RangeProfile> = echoes
        .iter()
        .map(|y| pulse_compress(y, w))
        .collect::<Result<_>>()?;
    let bins = profiles[0].len();
    if profiles.iter().any(|p| p.len() != bins) {
        return Err(Error::arg("echoes of unequal length"));
    }
    let magnitudes = grid
        .par_iter()
        .map(|&theta| {
            let mut acc = vec![Complex64::default(); bins];
            for (n, p) in profiles.iter().enumerate() {
                let rot = Complex64::from_polar(1.0, -(n as f64) * theta);
                for (a, v) in acc.iter_mut().zip(p.values()) {
                    *a += rot * v;
                }
            }
            acc.iter().map(|v| v.norm()).collect()
        })
        .collect();
    Ok(DelayDopplerMap { grid, magnitudes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jamming::JammerSpec;
    use crate::rng::substream;
    use crate::signal::xcorr_direct;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unimodular(n: usize, seed: u64) -> ComplexSequence {
        let mut rng = substream(seed, "radar-test", &[]);
        ComplexSequence::from_phases(&(0..n).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect::<Vec<_>>()).unwrap()
    }

    fn pprj(n: usize) -> TransferMatrix {
        JammerSpec::pprj(1.0, (n / 4) as f64, 3, n).build().unwrap()
    }

    #[test]
    fn no_jammer_no_noise_gives_identical_shifted_pulses() {
        let x = unimodular(16, 1);
        let scene = EchoScene::noiseless(5, 2, 0.0, f64::NEG_INFINITY, 3);
        let ys = synthesize_echoes(&scene, &x, &pprj(16), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(ys.len(), 3);
        for y in &ys {
            assert_eq!(y.len(), 16 + 5 + 2 + 1);
            assert_eq!(y, &ys[0]);
            for i in 0..16 {
                assert_eq!(y[5 + i], x[i]);
            }
        }
    }

    #[test]
    fn jsr_sets_amplitude_ratio() {
        let scene = EchoScene::noiseless(0, 10, 0.0, 15.0, 1);
        let r = scene.jammer_amp().norm_sqr() / scene.target_amp.norm_sqr();
        assert!((r - 10f64.powf(1.5)).abs() < 1e-9);
        assert!((r - 31.622776601683793).abs() < 1e-9);
    }

    #[test]
    fn doppler_progression() {
        let x = unimodular(8, 2);
        let scene = EchoScene::noiseless(1, 0, 1.0, f64::NEG_INFINITY, 5);
        let ys = synthesize_echoes(&scene, &x, &pprj(8), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for (n, y) in ys.iter().enumerate() {
            for i in 0..8 {
                assert!((y[1 + i] - x[i] * Complex64::from_polar(1.0, n as f64)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn window_overflow_rejected() {
        let x = unimodular(8, 2);
        let mut scene = EchoScene::noiseless(4, 4, 0.0, 0.0, 1);
        scene.window = Some(12);
        assert!(synthesize_echoes(&scene, &x, &pprj(8), &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn noise_level_follows_snr() {
        let x = unimodular(8, 3);
        let mut scene = EchoScene::noiseless(0, 0, 0.0, f64::NEG_INFINITY, 400);
        scene.snr_db = 10.0;
        scene.window = Some(200);
        let ys = synthesize_echoes(&scene, &x, &pprj(8), &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let tail: Vec<f64> = ys.iter().flat_map(|y| y[20..].iter().map(|v| v.norm_sqr())).collect();
        let var = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((var - 0.1).abs() < 0.005, "{var}");
    }

    #[test]
    fn matched_filter_peaks_at_shift() {
        let x = unimodular(32, 4);
        let mut y = vec![Complex64::default(); 50];
        y[7..39].copy_from_slice(&x);
        let pc = pulse_compress(&y, &x).unwrap();
        assert_eq!(pc.len(), 19);
        let (i, v) = pc.peak();
        assert_eq!(i, 7);
        assert!((v - 32.0).abs() < 1e-9);
        assert_eq!(pc.db_normalized()[7], 0.0);
    }

    #[test]
    fn pulse_compression_reproduces_autocorrelation() {
        let x = unimodular(16, 5);
        let mut y = vec![Complex64::default(); 15];
        y.extend_from_slice(&x);
        y.extend(std::iter::repeat_n(Complex64::default(), 15));
        let pc = pulse_compress(&y, &x).unwrap();
        let prof = xcorr_direct(&x, &x).unwrap();
        // out[d] = Σ_l y[d+l] conj(x_l) = C_{x,x}(d − 15) read backwards.
        for (d, v) in pc.values().iter().enumerate() {
            let k = 15 - d as isize;
            assert!((v - prof.at(k).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = doppler_grid(201).unwrap();
        assert_eq!(g[0], -std::f64::consts::PI);
        assert_eq!(g[200], std::f64::consts::PI);
        assert!((g[100]).abs() < 1e-15);
        assert!(doppler_grid(1).is_err());
    }

    #[test]
    fn single_pulse_rows_identical() {
        let x = unimodular(16, 6);
        let scene = EchoScene::noiseless(3, 4, 0.3, 0.0, 1);
        let ys = synthesize_echoes(&scene, &x, &pprj(16), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let map = delay_doppler_map(&ys, &x, 11).unwrap();
        for row in &map.magnitudes {
            for (a, b) in row.iter().zip(&map.magnitudes[0]) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn map_localises_noiseless_target() {
        let x = unimodular(32, 7);
        let scene = EchoScene::noiseless(9, 0, 1.0, f64::NEG_INFINITY, 16);
        let ys = synthesize_echoes(&scene, &x, &pprj(32), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let map = delay_doppler_map(&ys, &x, 201).unwrap();
        let (i, d, _) = map.argmax();
        assert_eq!(d, 9);
        assert_eq!(i, map.nearest_bin(1.0));
    }

    #[test]
    fn map_invariant_to_global_phase() {
        let x = unimodular(16, 8);
        let scene = EchoScene::noiseless(2, 3, 0.5, 5.0, 4);
        let ys = synthesize_echoes(&scene, &x, &pprj(16), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let rot = Complex64::from_polar(1.0, 2.1);
        let yr: Vec<Vec<Complex64>> = ys.iter().map(|y| y.iter().map(|v| v * rot).collect()).collect();
        let a = delay_doppler_map(&ys, &x, 21).unwrap();
        let b = delay_doppler_map(&yr, &x, 21).unwrap();
        for (ra, rb) in a.magnitudes.iter().zip(&b.magnitudes) {
            for (u, v) in ra.iter().zip(rb) {
                assert!((u - v).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn more_pulses_sharpen_doppler() {
        let x = unimodular(16, 9);
        let ratio = |pulses| {
            let scene = EchoScene::noiseless(0, 0, 1.0, f64::NEG_INFINITY, pulses);
            let ys = synthesize_echoes(&scene, &x, &pprj(16), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            let map = delay_doppler_map(&ys, &x, 201).unwrap();
            let (i, d, peak) = map.argmax();
            // Largest response at the target delay at least 10 grid bins away.
            let side = map
                .magnitudes
                .iter()
                .enumerate()
                .filter(|(k, _)| (*k as isize - i as isize).abs() >= 10)
                .map(|(_, row)| row[d])
                .fold(0.0, f64::max);
            peak / side
        };
        assert!(ratio(32) > ratio(16));
    }
}
