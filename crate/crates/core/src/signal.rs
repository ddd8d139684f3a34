//! Complex baseband sequences, aperiodic cross-correlation and the scalar
//! quality metrics (ISL, IL, PAPR, PSLR, LPG).
//!
//! Cross-correlation follows
//!
//! ```text
//! C_{x,w}(k) = Σ_l x_l · conj(w_{l+k}),   1-L ≤ k ≤ L-1
//! ```
//!
//! with out-of-range indices contributing zero.

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::Transform;
use crate::NEG_INF_DB;

/// A length-`L` complex baseband sequence, `L ≥ 2`, with finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSequence {
    samples: Vec<Complex64>,
}

impl ComplexSequence {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::arg(format!(
                "sequence length must be at least 2, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::arg("sequence contains non-finite samples"));
        }
        Ok(Self { samples })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Unit-modulus sequence with the given phases (radians).
    pub fn from_phases(phases: &[f64]) -> Result<Self> {
        Self::new(phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect())
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Complex64::default(); len])
    }

    /// Kronecker delta at index 0.
    pub fn delta(len: usize) -> Result<Self> {
        let mut v = vec![Complex64::default(); len];
        if let Some(first) = v.first_mut() {
            *first = Complex64::new(1.0, 0.0);
        }
        Self::new(v)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn max_modulus(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every sample by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * c).collect(),
        }
    }
}

impl Deref for ComplexSequence {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.samples
    }
}

impl TryFrom<Vec<Complex64>> for ComplexSequence {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

/// Aperiodic cross-correlation over lags `1-L ..= L-1`, stored contiguously
/// with lag `k` at index `k + L - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationProfile {
    values: Vec<Complex64>,
    len: usize,
}

impl CorrelationProfile {
    pub(crate) fn from_values(values: Vec<Complex64>, len: usize) -> Self {
        debug_assert_eq!(values.len(), 2 * len - 1);
        Self { values, len }
    }

    /// Sequence length `L` the profile was computed from.
    pub fn seq_len(&self) -> usize {
        self.len
    }

    pub fn zero_lag_index(&self) -> usize {
        self.len - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_lag(&self) -> isize {
        self.len as isize - 1
    }

    /// Value at lag `k`; `None` outside `1-L ..= L-1`.
    pub fn at(&self, k: isize) -> Option<Complex64> {
        let idx = k + self.len as isize - 1;
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied()
    }

    /// `(lag, value)` pairs in increasing lag order.
    pub fn lags(&self) -> impl Iterator<Item = (isize, Complex64)> + '_ {
        let off = self.len as isize - 1;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (i as isize - off, *v))
    }

    pub fn zero_lag(&self) -> Complex64 {
        self.values[self.len - 1]
    }

    /// Σ |C(k)|² over every lag.
    pub fn total_energy(&self) -> f64 {
        energy(&self.values)
    }
}

pub(crate) fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|s| s.norm_sqr()).sum()
}

/// `a^H b`.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// O(L²) reference evaluation of both branches of the correlation sum.
pub fn xcorr_direct(x: &[Complex64], w: &[Complex64]) -> Result<CorrelationProfile> {
    check_len(x.len(), w.len())?;
    let n = x.len();
    if n == 0 {
        return Err(Error::arg("empty sequence"));
    }
    let mut values = Vec::with_capacity(2 * n - 1);
    for k in 1 - n as isize..n as isize {
        let c = if k >= 0 {
            let k = k as usize;
            (0..n - k).map(|l| x[l] * w[l + k].conj()).sum()
        } else {
            let k = (-k) as usize;
            (0..n - k).map(|l| x[l + k] * w[l].conj()).sum()
        };
        values.push(c);
    }
    Ok(CorrelationProfile::from_values(values, n))
}

/// Cross-correlation via length-`2L` zero-padded transforms.
pub fn xcorr_fft(x: &[Complex64], w: &[Complex64]) -> Result<CorrelationProfile> {
    check_len(x.len(), w.len())?;
    let n = x.len();
    if n == 0 {
        return Err(Error::arg("empty sequence"));
    }
    let mut t = Transform::new(2 * n);
    let mut fx = Vec::new();
    let mut fw = Vec::new();
    t.forward_padded(x, &mut fx);
    t.forward_padded(w, &mut fw);
    // c[m] = Σ_l x_{l+m} conj(w_l) = C_{x,w}(-m), indices modulo 2L.
    let mut c: Vec<Complex64> = fx.iter().zip(&fw).map(|(a, b)| a * b.conj()).collect();
    t.inverse(&mut c);
    Ok(CorrelationProfile::from_values(
        circular_to_profile(&c, n),
        n,
    ))
}

/// Reorders the circular layout `c[m] = C(-m)` into lag order `1-L ..= L-1`.
pub(crate) fn circular_to_profile(c: &[Complex64], n: usize) -> Vec<Complex64> {
    let two_n = 2 * n;
    (1 - n as isize..n as isize)
        .map(|k| {
            let m = (-k).rem_euclid(two_n as isize) as usize;
            c[m]
        })
        .collect()
}

/// Integrated sidelobe level: Σ_{k≠0} |C_{x,w}(k)|².
pub fn isl(x: &[Complex64], w: &[Complex64]) -> Result<f64> {
    let p = xcorr_fft(x, w)?;
    Ok(p.total_energy() - p.zero_lag().norm_sqr())
}

/// Integrated level of the jamming/filter pair: Σ_k |C_{xj,w}(k)|², zero lag included.
pub fn il(xj: &[Complex64], w: &[Complex64]) -> Result<f64> {
    Ok(xcorr_fft(xj, w)?.total_energy())
}

/// Peak-to-average power ratio `L · max|x_l|² / ‖x‖²`.
pub fn papr(x: &[Complex64]) -> Result<f64> {
    let e = energy(x);
    if e <= 0.0 {
        return Err(Error::Domain("PAPR of a zero-energy sequence"));
    }
    let peak = x.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    Ok(x.len() as f64 * peak / e)
}

/// Peak sidelobe level ratio in dB: largest non-zero-lag magnitude over the
/// zero-lag magnitude.
pub fn pslr(profile: &CorrelationProfile) -> Result<f64> {
    let peak = profile.zero_lag().norm();
    if peak == 0.0 {
        return Err(Error::Domain("PSLR with zero main peak"));
    }
    let zl = profile.zero_lag_index();
    let side = profile
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != zl)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    Ok(amplitude_db(side / peak))
}

/// Loss in processing gain, `10 log10(|w^H x|² / (‖w‖²‖x‖²))`.
pub fn lpg(x: &[Complex64], w: &[Complex64]) -> Result<f64> {
    check_len(x.len(), w.len())?;
    let ex = energy(x);
    let ew = energy(w);
    if ex <= 0.0 || ew <= 0.0 {
        return Err(Error::Domain("LPG with a zero-energy input"));
    }
    Ok(power_db(inner(w, x).norm_sqr() / (ex * ew)))
}

/// Rescales `x` to energy `target`, preserving its direction.
pub fn scale_to_energy(x: &[Complex64], target: f64) -> Result<ComplexSequence> {
    if !(target > 0.0) {
        return Err(Error::arg("target energy must be positive"));
    }
    let e = energy(x);
    if e <= 0.0 {
        return Err(Error::Domain("cannot rescale a zero-energy sequence"));
    }
    let g = (target / e).sqrt();
    ComplexSequence::new(x.iter().map(|v| v * g).collect())
}

/// `20 log10(ratio)`, floored at [`NEG_INF_DB`].
pub fn amplitude_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (20.0 * ratio.log10()).max(NEG_INF_DB)
    } else {
        NEG_INF_DB
    }
}

/// `10 log10(ratio)`, floored at [`NEG_INF_DB`].
pub fn power_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        (10.0 * ratio.log10()).max(NEG_INF_DB)
    } else {
        NEG_INF_DB
    }
}
