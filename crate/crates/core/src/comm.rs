//! Communication link: multipath channel built from cyclic shifts,
//! Gray-mapped QPSK/16QAM, transform-domain zero-forcing equalisation and a
//! Monte-Carlo symbol-error-rate harness.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::fft::Transform;
use crate::rng::substream;
use crate::signal::ComplexSequence;

/// Floor applied to channel bin magnitudes during zero-forcing.
pub const ZF_FLOOR: f64 = 1e-8;

/// One path: complex gain and cyclic delay in samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub gain: Complex64,
    pub delay: usize,
}

/// `H = Σ h_i Ψ_{d_i}` where `Ψ_d` cyclically delays by `d` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathChannel {
    taps: Vec<Tap>,
    len: usize,
}

impl MultipathChannel {
    pub fn new(taps: Vec<Tap>, len: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::arg("channel needs at least one tap"));
        }
        let mut delays: Vec<_> = taps.iter().map(|t| t.delay).collect();
        delays.sort_unstable();
        if delays.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg("duplicate tap delays"));
        }
        if let Some(&d) = delays.last().filter(|&&d| d >= len) {
            return Err(Error::arg(format!("tap delay {d} not below length {len}")));
        }
        Ok(Self { taps, len })
    }

    pub fn identity(len: usize) -> Self {
        Self {
            taps: vec![Tap {
                gain: Complex64::new(1.0, 0.0),
                delay: 0,
            }],
            len,
        }
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `H x` as a sum of cyclic shifts, O(P·L).
    pub fn apply_noiseless(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len, x.len())?;
        let n = self.len;
        let mut y = vec![Complex64::default(); n];
        for tap in &self.taps {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += tap.gain * x[(i + n - tap.delay) % n];
            }
        }
        Ok(y)
    }

    /// Eigenvalues of the circulant `H`: `Ĥ(k) = Σ h_i e^{-j2πk d_i/L}`.
    pub fn frequency_response(&self) -> Vec<Complex64> {
        let n = self.len as f64;
        (0..self.len)
            .map(|k| {
                self.taps
                    .iter()
                    .map(|t| {
                        t.gain
                            * Complex64::from_polar(
                                1.0,
                                -std::f64::consts::TAU * k as f64 * t.delay as f64 / n,
                            )
                    })
                    .sum()
            })
            .collect()
    }
}

/// Delay bins `⌊τ_i / T_c⌋` for path delays in seconds.
pub fn delay_bins(delays: &[f64], sample_interval: f64) -> Vec<usize> {
    delays
        .iter()
        .map(|&d| crate::jamming::floor_ratio(d, sample_interval))
        .collect()
}

/// Circularly-symmetric complex Gaussian sample with variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

/// Builds a channel on the given delay bins. Gains are drawn from `CN(0,1)`
/// with `rng` unless supplied.
pub fn build_channel<R: Rng + ?Sized>(
    delays: &[usize],
    gains: Option<&[Complex64]>,
    len: usize,
    rng: &mut R,
) -> Result<MultipathChannel> {
    let gains: Vec<Complex64> = match gains {
        Some(g) => {
            check_len(delays.len(), g.len())?;
            g.to_vec()
        }
        None => delays.iter().map(|_| complex_gaussian(rng, 1.0)).collect(),
    };
    MultipathChannel::new(
        delays
            .iter()
            .zip(gains)
            .map(|(&delay, gain)| Tap { gain, delay })
            .collect(),
        len,
    )
}

/// `y = H x + v` with `v` i.i.d. `CN(0, noise_var)`.
pub fn apply_channel<R: Rng + ?Sized>(
    ch: &MultipathChannel,
    x: &[Complex64],
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !(noise_var >= 0.0) {
        return Err(Error::arg("noise variance must be non-negative"));
    }
    let mut y = ch.apply_noiseless(x)?;
    if noise_var > 0.0 {
        y.iter_mut()
            .for_each(|v| *v += complex_gaussian(rng, noise_var));
    }
    Ok(y)
}

/// Zero-forcing equalisation exploiting the circulant structure of `H`. Bins
/// with `|Ĥ(k)| < ZF_FLOOR` are divided by `ZF_FLOOR` along `Ĥ(k)`'s phase.
pub fn equalize(y: &[Complex64], ch: &MultipathChannel) -> Result<Vec<Complex64>> {
    check_len(ch.len(), y.len())?;
    let resp = ch.frequency_response();
    let mut t = Transform::new(ch.len());
    let mut buf = y.to_vec();
    t.forward(&mut buf);
    for (b, h) in buf.iter_mut().zip(&resp) {
        let mag = h.norm();
        let h = if mag < ZF_FLOOR {
            if mag > 0.0 {
                h * (ZF_FLOOR / mag)
            } else {
                Complex64::new(ZF_FLOOR, 0.0)
            }
        } else {
            *h
        };
        *b /= h;
    }
    t.inverse(&mut buf);
    Ok(buf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Qpsk,
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }
}

/// Gray-mapped constellation with unit average energy. `points[i]` is the
/// symbol whose bits, MSB first, spell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: Modulation,
    points: Vec<Complex64>,
}

/// Gray level for a two-bit PAM axis: 00 → -3, 01 → -1, 11 → +1, 10 → +3.
fn pam4_level(b0: usize, b1: usize) -> f64 {
    match (b0, b1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    }
}

impl Constellation {
    pub fn new(kind: Modulation) -> Self {
        let points = match kind {
            Modulation::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                (0..4)
                    .map(|i| {
                        let b0 = (i >> 1) & 1;
                        let b1 = i & 1;
                        Complex64::new(
                            a * (1.0 - 2.0 * b0 as f64),
                            a * (1.0 - 2.0 * b1 as f64),
                        )
                    })
                    .collect()
            }
            Modulation::Qam16 => {
                let g = 1.0 / 10f64.sqrt();
                (0..16)
                    .map(|i| {
                        let re = pam4_level((i >> 3) & 1, (i >> 2) & 1);
                        let im = pam4_level((i >> 1) & 1, i & 1);
                        Complex64::new(re * g, im * g)
                    })
                    .collect()
            }
        };
        Self { kind, points }
    }

    pub fn kind(&self) -> Modulation {
        self.kind
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.kind.bits_per_symbol()
    }

    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.min((a - b).norm());
            }
        }
        d
    }
}

/// Maps bits (0/1, MSB first per symbol) to constellation points.
pub fn modulate(bits: &[u8], constellation: &Constellation) -> Result<Vec<Complex64>> {
    let k = constellation.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::arg(format!(
            "{} bits not divisible by {k} bits per symbol",
            bits.len()
        )));
    }
    bits.chunks(k)
        .map(|chunk| {
            let mut idx = 0usize;
            for &b in chunk {
                if b > 1 {
                    return Err(Error::arg(format!("bit value {b}")));
                }
                idx = (idx << 1) | b as usize;
            }
            Ok(constellation.points[idx])
        })
        .collect()
}

/// Bits for a symbol index, MSB first.
pub fn index_bits(index: usize, bits_per_symbol: usize) -> impl Iterator<Item = u8> {
    (0..bits_per_symbol)
        .rev()
        .map(move |b| ((index >> b) & 1) as u8)
}

/// Minimum-distance slicer; ties go to the lowest index.
pub fn demodulate(xhat: &[Complex64], constellation: &Constellation) -> Vec<usize> {
    xhat.iter()
        .map(|v| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, p) in constellation.points.iter().enumerate() {
                let d = (v - p).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Which channel each Monte-Carlo trial sees.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub delays: Vec<usize>,
    /// Fixed gains; when `None` every trial draws fresh `CN(0,1)` gains.
    pub gains: Option<Vec<Complex64>>,
}

impl ChannelSpec {
    pub fn unit() -> Self {
        Self {
            delays: vec![0],
            gains: Some(vec![Complex64::new(1.0, 0.0)]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub errors: u64,
    pub symbols: u64,
    pub trials: usize,
}

impl SerPoint {
    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.errors as f64 / self.symbols as f64
        }
    }

    /// Binomial standard deviation of the SER estimate.
    pub fn std_err(&self) -> f64 {
        if self.symbols == 0 {
            return 0.0;
        }
        let p = self.ser();
        (p * (1.0 - p) / self.symbols as f64).sqrt()
    }
}

/// Transmit-waveform generator for a block of desired symbols. `None`
/// stands for the communication-only reference (transmit `s` itself).
pub type DesignFn<'a> = dyn Fn(&[Complex64], &MultipathChannel) -> Result<Vec<Complex64>> + Sync + 'a;

/// Empirical SER per SNR point. Each trial draws symbols from stream
/// `("bits", trial)`, a channel from `("channel", trial)` and noise from
/// `("noise", trial, snr_index)`; the transmit block is designed once per
/// trial and reused across the SNR grid. SNR is `‖Hx‖²/L` over the noise
/// variance.
pub fn monte_carlo_ser(
    design: Option<&DesignFn<'_>>,
    channel: &ChannelSpec,
    constellation: &Constellation,
    block_len: usize,
    snr_grid_db: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SerPoint>> {
    if trials == 0 {
        return Err(Error::arg("at least one trial required"));
    }
    let per_trial: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            run_trial(
                design,
                channel,
                constellation,
                block_len,
                snr_grid_db,
                seed,
                trial as u64,
            )
        })
        .collect::<Result<_>>()?;

    Ok(snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| SerPoint {
            snr_db,
            errors: per_trial.iter().map(|e| e[i]).sum(),
            symbols: (trials * block_len) as u64,
            trials,
        })
        .collect())
}

fn run_trial(
    design: Option<&DesignFn<'_>>,
    channel: &ChannelSpec,
    constellation: &Constellation,
    block_len: usize,
    snr_grid_db: &[f64],
    seed: u64,
    trial: u64,
) -> Result<Vec<u64>> {
    let mut bits_rng = substream(seed, "bits", &[trial]);
    let npts = constellation.points().len();
    let sent: Vec<usize> = (0..block_len).map(|_| bits_rng.random_range(0..npts)).collect();
    let s: Vec<Complex64> = sent.iter().map(|&i| constellation.points()[i]).collect();

    let mut ch_rng = substream(seed, "channel", &[trial]);
    let ch = build_channel(&channel.delays, channel.gains.as_deref(), block_len, &mut ch_rng)?;

    let x = match design {
        Some(f) => f(&s, &ch)?,
        None => s,
    };
    let hx = ch.apply_noiseless(&x)?;
    let signal_power = hx.iter().map(|v| v.norm_sqr()).sum::<f64>() / block_len as f64;

    snr_grid_db
        .iter()
        .enumerate()
        .map(|(k, &snr_db)| {
            let noise_var = if snr_db.is_finite() {
                signal_power / 10f64.powf(snr_db / 10.0)
            } else {
                0.0
            };
            let mut noise_rng = substream(seed, "noise", &[trial, k as u64]);
            let y: Vec<Complex64> = hx
                .iter()
                .map(|v| {
                    if noise_var > 0.0 {
                        v + complex_gaussian(&mut noise_rng, noise_var)
                    } else {
                        *v
                    }
                })
                .collect();
            let xhat = equalize(&y, &ch)?;
            let got = demodulate(&xhat, constellation);
            Ok(got.iter().zip(&sent).filter(|(a, b)| a != b).count() as u64)
        })
        .collect()
}

/// Convenience wrapper returning a validated sequence.
pub fn received(ch: &MultipathChannel, x: &ComplexSequence) -> Result<ComplexSequence> {
    ComplexSequence::new(ch.apply_noiseless(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rand_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| complex_gaussian(&mut rng, 1.0)).collect()
    }

    /// Dense `Σ h_i Ψ_{d_i}` with `Ψ_d = [[0, I_d], [I_{L-d}, 0]]`.
    fn dense_h(ch: &MultipathChannel) -> Vec<Vec<Complex64>> {
        let n = ch.len();
        let mut h = vec![vec![c(0.0, 0.0); n]; n];
        for tap in ch.taps() {
            let d = tap.delay;
            for i in 0..d {
                h[i][n - d + i] += tap.gain;
            }
            for i in 0..n - d {
                h[d + i][i] += tap.gain;
            }
        }
        h
    }

    #[test]
    fn reference_channel_delay_bins() {
        assert_eq!(delay_bins(&[0.0, 0.5e-6, 0.8e-6], 0.1e-6), vec![0, 5, 8]);
    }

    #[test]
    fn identity_channel_passes_through() {
        let x = rand_vec(16, 1);
        let ch = MultipathChannel::identity(16);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(apply_channel(&ch, &x, 0.0, &mut rng).unwrap(), x);
        assert_eq!(equalize(&x, &ch).unwrap().len(), 16);
        for (a, b) in equalize(&x, &ch).unwrap().iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_tap_is_cyclic_shift() {
        let x = rand_vec(8, 2);
        let ch = MultipathChannel::new(vec![Tap { gain: c(1.0, 0.0), delay: 3 }], 8).unwrap();
        let y = ch.apply_noiseless(&x).unwrap();
        for i in 0..8 {
            assert_eq!(y[(i + 3) % 8], x[i]);
        }
    }

    #[test]
    fn channel_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = build_channel(&[0, 5, 8], None, 32, &mut rng).unwrap();
        let x = rand_vec(32, 3);
        let y = ch.apply_noiseless(&x).unwrap();
        let h = dense_h(&ch);
        for i in 0..32 {
            let v: Complex64 = (0..32).map(|j| h[i][j] * x[j]).sum();
            assert!((v - y[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn seeded_gains_reproducible() {
        let a = build_channel(&[0, 5, 8], None, 64, &mut substream(9, "channel", &[0])).unwrap();
        let b = build_channel(&[0, 5, 8], None, 64, &mut substream(9, "channel", &[0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn channel_rejects_bad_taps() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(build_channel(&[0, 0], None, 8, &mut rng).is_err());
        assert!(build_channel(&[8], None, 8, &mut rng).is_err());
        assert!(build_channel(&[], None, 8, &mut rng).is_err());
        let ch = MultipathChannel::identity(8);
        assert!(apply_channel(&ch, &rand_vec(4, 0), 0.0, &mut rng).is_err());
        assert!(apply_channel(&ch, &rand_vec(8, 0), -1.0, &mut rng).is_err());
    }

    #[test]
    fn zero_forcing_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ch = build_channel(&[0, 5, 8], None, 64, &mut rng).unwrap();
        assert!(ch.frequency_response().iter().all(|h| h.norm() > ZF_FLOOR));
        let x = rand_vec(64, 4);
        let y = ch.apply_noiseless(&x).unwrap();
        let xr = equalize(&y, &ch).unwrap();
        for (a, b) in xr.iter().zip(&x) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_forcing_floor_keeps_output_finite() {
        // h = 1 + Ψ_1 has a spectral null at k = L/2.
        let ch = MultipathChannel::new(
            vec![
                Tap { gain: c(1.0, 0.0), delay: 0 },
                Tap { gain: c(1.0, 0.0), delay: 1 },
            ],
            8,
        )
        .unwrap();
        assert!(ch.frequency_response()[4].norm() < 1e-12);
        let out = equalize(&rand_vec(8, 1), &ch).unwrap();
        assert!(out.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }

    #[test]
    fn qpsk_gray_quadrants() {
        let q = Constellation::new(Modulation::Qpsk);
        let s = modulate(&[0, 0, 0, 1, 1, 1, 1, 0], &q).unwrap();
        let quadrant = |v: &Complex64| (v.re > 0.0, v.im > 0.0);
        assert_eq!(quadrant(&s[0]), (true, true));
        assert_eq!(quadrant(&s[1]), (true, false));
        assert_eq!(quadrant(&s[2]), (false, false));
        assert_eq!(quadrant(&s[3]), (false, true));
        assert!(s.iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn constellations_have_unit_energy() {
        for m in [Modulation::Qpsk, Modulation::Qam16] {
            let k = Constellation::new(m);
            let e: f64 = k.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / k.points().len() as f64;
            assert!((e - 1.0).abs() < 1e-12);
        }
        let qam = Constellation::new(Modulation::Qam16);
        let max = qam.points().iter().map(|p| p.norm()).fold(0.0, f64::max);
        assert!((max - 3.0 * 5f64.sqrt() / 5.0).abs() < 1e-12);
    }

    #[test]
    fn qam16_neighbours_differ_in_one_bit() {
        let qam = Constellation::new(Modulation::Qam16);
        let dmin = qam.min_distance();
        for (i, a) in qam.points().iter().enumerate() {
            for (j, b) in qam.points().iter().enumerate() {
                if i != j && ((a - b).norm() - dmin).abs() < 1e-12 {
                    assert_eq!((i ^ j).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn modulate_edge_cases() {
        let q = Constellation::new(Modulation::Qpsk);
        assert!(modulate(&[], &q).unwrap().is_empty());
        assert!(modulate(&[1, 0, 1], &q).is_err());
        assert!(modulate(&[2, 0], &q).is_err());
    }

    #[test]
    fn modulate_demodulate_identity() {
        for m in [Modulation::Qpsk, Modulation::Qam16] {
            let k = Constellation::new(m);
            let n = k.points().len();
            let bits: Vec<u8> = (0..n).flat_map(|i| index_bits(i, k.bits_per_symbol())).collect();
            let s = modulate(&bits, &k).unwrap();
            assert_eq!(demodulate(&s, &k), (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn slicer_tolerates_small_perturbations() {
        let k = Constellation::new(Modulation::Qam16);
        let r = 0.49 * k.min_distance();
        let pts: Vec<_> = k
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| p + Complex64::from_polar(r, i as f64))
            .collect();
        assert_eq!(demodulate(&pts, &k), (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn qpsk_slicer_matches_quadrant_oracle() {
        let q = Constellation::new(Modulation::Qpsk);
        let v = rand_vec(500, 8);
        for (p, idx) in v.iter().zip(demodulate(&v, &q)) {
            let expect = ((p.re < 0.0) as usize) << 1 | (p.im < 0.0) as usize;
            assert_eq!(idx, expect);
        }
    }

    #[test]
    fn com_only_noiseless_is_error_free() {
        let q = Constellation::new(Modulation::Qpsk);
        let spec = ChannelSpec { delays: vec![0, 5, 8], gains: None };
        let pts = monte_carlo_ser(None, &spec, &q, 64, &[f64::INFINITY], 20, 1).unwrap();
        assert_eq!(pts[0].errors, 0);
        assert_eq!(pts[0].symbols, 20 * 64);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let q = Constellation::new(Modulation::Qpsk);
        let spec = ChannelSpec::unit();
        let a = monte_carlo_ser(None, &spec, &q, 32, &[0.0, 5.0], 30, 4).unwrap();
        let b = monte_carlo_ser(None, &spec, &q, 32, &[0.0, 5.0], 30, 4).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_ser(None, &spec, &q, 32, &[0.0], 0, 4).is_err());
    }
}
