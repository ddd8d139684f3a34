//! Jamming transfer operators `x_J = J x` for partial pulse repeater jamming
//! (PPRJ) and repetitive repeater jamming (RRJ).
//!
//! PPRJ: the jammer intercepts the first `c = ⌊T_L/t_s⌋` samples and forwards
//! them `M₁` times back to back, so `J` holds `M₁` stacked `c×c` identities
//! in its leftmost `c` columns.
//!
//! RRJ: every `L_s = ⌊T_s/t_s⌋` samples the jammer intercepts `c` samples and
//! repeats them `M₂` times until the next interception. `J` is block-diagonal
//! with `Q = ⌊T_p/T_s⌋` copies of the `L_s×L_s` PPRJ-like block `D`. Rows and
//! columns past the last complete period stay zero.

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};

/// Tolerance applied before flooring timing ratios, so that e.g.
/// `25.6 µs / 0.1 µs` yields 256 rather than 255.
pub const TIMING_EPS: f64 = 1e-9;

/// `⌊num/den⌋` with the [`TIMING_EPS`] guard; 0 for negative or non-finite ratios.
pub fn floor_ratio(num: f64, den: f64) -> usize {
    let r = num / den;
    if !(r.is_finite()) || r < 0.0 {
        return 0;
    }
    (r + TIMING_EPS).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JammerKind {
    Pprj,
    Rrj,
}

/// Timing description of a repeater jammer. Times are in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct JammerSpec {
    pub kind: JammerKind,
    /// Sampling interval `t_s`.
    pub sample_interval: f64,
    /// Interception (sampling) time `T_L`.
    pub intercept_time: f64,
    /// Interception period `T_s`; RRJ only.
    pub repeat_period: Option<f64>,
    /// Forwarding count `M₁` (PPRJ) or `M₂` (RRJ).
    pub repeats: usize,
    /// Sequence length `L`.
    pub length: usize,
}

impl JammerSpec {
    pub fn pprj(sample_interval: f64, intercept_time: f64, repeats: usize, length: usize) -> Self {
        Self {
            kind: JammerKind::Pprj,
            sample_interval,
            intercept_time,
            repeat_period: None,
            repeats,
            length,
        }
    }

    pub fn rrj(
        sample_interval: f64,
        intercept_time: f64,
        repeat_period: f64,
        repeats: usize,
        length: usize,
    ) -> Self {
        Self {
            kind: JammerKind::Rrj,
            sample_interval,
            intercept_time,
            repeat_period: Some(repeat_period),
            repeats,
            length,
        }
    }

    /// RRJ spec with `M₂ = ⌊T_s/T_L⌋ - 1` derived from the timing.
    pub fn rrj_from_timing(
        sample_interval: f64,
        intercept_time: f64,
        repeat_period: f64,
        length: usize,
    ) -> Result<Self> {
        let ratio = floor_ratio(repeat_period, intercept_time);
        if ratio < 2 {
            return Err(Error::JammerSpec(format!(
                "repeat period {repeat_period} leaves no room to forward after a {intercept_time} interception"
            )));
        }
        Ok(Self::rrj(
            sample_interval,
            intercept_time,
            repeat_period,
            ratio - 1,
            length,
        ))
    }

    /// Samples per interception, `c = ⌊T_L/t_s⌋`.
    pub fn samples_per_intercept(&self) -> usize {
        floor_ratio(self.intercept_time, self.sample_interval)
    }

    /// `L_s = ⌊T_s/t_s⌋` for RRJ.
    pub fn period_len(&self) -> Option<usize> {
        self.repeat_period
            .map(|ts| floor_ratio(ts, self.sample_interval))
    }

    /// Number of complete interception periods `Q = ⌊T_p/T_s⌋`, `T_p = L·t_s`.
    pub fn periods(&self) -> Option<usize> {
        self.repeat_period
            .map(|ts| floor_ratio(self.length as f64 * self.sample_interval, ts))
    }

    pub fn build(&self) -> Result<TransferMatrix> {
        match self.kind {
            JammerKind::Pprj => build_pprj(self),
            JammerKind::Rrj => build_rrj(self),
        }
    }
}

/// Sparse binary `L×L` operator. Entries are `(row, col)` pairs with value 1,
/// sorted row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMatrix {
    len: usize,
    entries: Vec<(usize, usize)>,
}

impl TransferMatrix {
    /// Builds from arbitrary coordinates; duplicates are rejected and the
    /// identity is refused.
    pub fn from_entries(len: usize, mut entries: Vec<(usize, usize)>) -> Result<Self> {
        entries.sort_unstable();
        if entries.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::JammerSpec("duplicate transfer matrix entry".into()));
        }
        if let Some(&(r, c)) = entries.iter().find(|&&(r, c)| r >= len || c >= len) {
            return Err(Error::JammerSpec(format!(
                "entry ({r}, {c}) outside a {len}x{len} operator"
            )));
        }
        let is_identity =
            entries.len() == len && entries.iter().enumerate().all(|(i, &(r, c))| r == i && c == i);
        if is_identity {
            return Err(Error::JammerSpec("transfer matrix must differ from the identity".into()));
        }
        Ok(Self { len, entries })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.len];
        for &(_, c) in &self.entries {
            sums[c] += 1;
        }
        sums
    }

    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len];
        for &(r, _) in &self.entries {
            counts[r] += 1;
        }
        counts
    }

    pub fn trace(&self) -> usize {
        self.entries.iter().filter(|(r, c)| r == c).count()
    }

    /// `J x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len, x.len())?;
        let mut out = vec![Complex64::default(); self.len];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `J^H y` (the transpose, since entries are real).
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.len, y.len())?;
        let mut out = vec![Complex64::default(); self.len];
        self.apply_adjoint_into(y, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::default());
        for &(r, c) in &self.entries {
            out[r] += x[c];
        }
    }

    pub(crate) fn apply_adjoint_into(&self, y: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::default());
        for &(r, c) in &self.entries {
            out[c] += y[r];
        }
    }
}

fn stacked_identities(origin: usize, c: usize, repeats: usize, out: &mut Vec<(usize, usize)>) {
    for m in 0..repeats {
        for i in 0..c {
            out.push((origin + m * c + i, origin + i));
        }
    }
}

pub fn build_pprj(spec: &JammerSpec) -> Result<TransferMatrix> {
    if spec.kind != JammerKind::Pprj {
        return Err(Error::JammerSpec("expected a PPRJ specification".into()));
    }
    let l = spec.length;
    let c = spec.samples_per_intercept();
    if c == 0 {
        return Err(Error::JammerSpec(
            "interception time shorter than one sample".into(),
        ));
    }
    if spec.repeats == 0 {
        return Err(Error::JammerSpec("repeat count must be positive".into()));
    }
    if spec.repeats * c > l {
        return Err(Error::JammerSpec(format!(
            "M1*c1 = {}*{} exceeds sequence length {l}",
            spec.repeats, c
        )));
    }
    let mut entries = Vec::with_capacity(spec.repeats * c);
    stacked_identities(0, c, spec.repeats, &mut entries);
    TransferMatrix::from_entries(l, entries)
}

pub fn build_rrj(spec: &JammerSpec) -> Result<TransferMatrix> {
    if spec.kind != JammerKind::Rrj {
        return Err(Error::JammerSpec("expected an RRJ specification".into()));
    }
    let l = spec.length;
    let c = spec.samples_per_intercept();
    let ls = spec
        .period_len()
        .ok_or_else(|| Error::JammerSpec("RRJ requires a repeat period".into()))?;
    if c == 0 {
        return Err(Error::JammerSpec(
            "interception time shorter than one sample".into(),
        ));
    }
    if ls == 0 {
        return Err(Error::JammerSpec("repeat period shorter than one sample".into()));
    }
    if spec.repeats == 0 {
        return Err(Error::JammerSpec("repeat count must be positive".into()));
    }
    if spec.repeats * c > ls {
        return Err(Error::JammerSpec(format!(
            "M2*c2 = {}*{} exceeds period length {ls}",
            spec.repeats, c
        )));
    }
    let q = spec.periods().unwrap_or(0);
    if q == 0 || q * ls > l {
        return Err(Error::JammerSpec(format!(
            "repeat period of {ls} samples does not fit in length {l}"
        )));
    }
    let mut entries = Vec::with_capacity(q * spec.repeats * c);
    for p in 0..q {
        stacked_identities(p * ls, c, spec.repeats, &mut entries);
    }
    TransferMatrix::from_entries(l, entries)
}
