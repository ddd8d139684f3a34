//! Reference waveforms: an LFM chirp and the communication/radar trade-off
//! design `min ρ‖Hx − s‖² + (1−ρ)‖x − x_rad‖²` under the energy and PAPR
//! constraints.

use num_complex::Complex64;

use crate::comm::MultipathChannel;
use crate::dmm::project_x;
use crate::error::{check_len, Error, Result};
use crate::fft::Transform;
use crate::jamming::floor_ratio;
use crate::signal::{distance, ComplexSequence};

/// Unit-modulus chirp `exp(jπ (B/T_p) (l t_s)²)`, `l = 0 … L−1`.
pub fn lfm_waveform(len: usize, bandwidth: f64, pulse_width: f64, sample_interval: f64) -> Result<ComplexSequence> {
    if !(bandwidth > 0.0 && pulse_width > 0.0 && sample_interval > 0.0) {
        return Err(Error::arg("LFM bandwidth, pulse width and sample interval must be positive"));
    }
    let expect = floor_ratio(pulse_width, sample_interval);
    if expect != len {
        return Err(Error::arg(format!(
            "LFM length {len} inconsistent with pulse width / sample interval = {expect}"
        )));
    }
    let rate = bandwidth / pulse_width;
    let phases: Vec<f64> = (0..len)
        .map(|l| {
            let t = l as f64 * sample_interval;
            std::f64::consts::PI * rate * t * t
        })
        .collect();
    ComplexSequence::from_phases(&phases)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffConfig {
    /// Weight of the communication term.
    pub rho: f64,
    pub gamma: f64,
    pub max_iter: usize,
    /// Stop once `‖x_{t+1} − x_t‖ ≤ tolerance`.
    pub tolerance: f64,
}

impl Default for TradeoffConfig {
    fn default() -> Self {
        Self {
            rho: 0.1,
            gamma: 1.5,
            max_iter: 2000,
            tolerance: 1e-9,
        }
    }
}

impl TradeoffConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::arg(format!("rho = {} outside [0, 1]", self.rho)));
        }
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::arg(format!("gamma = {} below 1", self.gamma)));
        }
        if self.max_iter == 0 || !(self.tolerance > 0.0) {
            return Err(Error::arg("max_iter and tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TradeoffDesign {
    pub x: ComplexSequence,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after each iteration.
    pub history: Vec<f64>,
}

/// `ρ‖Hx − s‖² + (1−ρ)‖x − x_rad‖²`.
pub fn tradeoff_objective(
    h: &MultipathChannel,
    s: &[Complex64],
    x_rad: &[Complex64],
    x: &[Complex64],
    rho: f64,
) -> Result<f64> {
    check_len(s.len(), x.len())?;
    check_len(x_rad.len(), x.len())?;
    let hx = h.apply_noiseless(x)?;
    Ok(rho * distance(&hx, s).powi(2) + (1.0 - rho) * distance(x, x_rad).powi(2))
}

/// Floor on `ρ|Ĥ(k)|² + 1 − ρ` when inverting the normal equations.
const NORMAL_FLOOR: f64 = 1e-12;

/// Projected-gradient MM on the constraint set. The quadratic is
/// `(x − x*)^H G (x − x*)` with `G = ρH^H H + (1−ρ)I` diagonal per transform
/// bin and `x*` its unconstrained minimiser, so each iteration takes the
/// step `x − G(x − x*)/λ_max(G)` and projects back (the same projection as
/// the DMM waveform update). The start is the best of the projections of
/// `x*`, `x_rad` and `s`, and the objective never increases.
pub fn tradeoff_waveform(
    h: &MultipathChannel,
    s: &[Complex64],
    x_rad: &[Complex64],
    cfg: &TradeoffConfig,
) -> Result<TradeoffDesign> {
    cfg.validate()?;
    let n = h.len();
    check_len(n, s.len())?;
    check_len(n, x_rad.len())?;
    let resp = h.frequency_response();
    let gain: Vec<f64> = resp
        .iter()
        .map(|hk| (cfg.rho * hk.norm_sqr() + 1.0 - cfg.rho).max(NORMAL_FLOOR))
        .collect();
    let lmax = gain.iter().copied().fold(0.0, f64::max);
    let mut t = Transform::new(n);

    let mut fs = s.to_vec();
    let mut fr = x_rad.to_vec();
    t.forward(&mut fs);
    t.forward(&mut fr);
    let mut x_star: Vec<Complex64> = (0..n)
        .map(|k| (resp[k].conj() * fs[k] * cfg.rho + fr[k] * (1.0 - cfg.rho)) / gain[k])
        .collect();
    t.inverse(&mut x_star);

    let obj = |x: &[Complex64]| tradeoff_objective(h, s, x_rad, x, cfg.rho);
    let mut x = None::<(ComplexSequence, f64)>;
    for start in [&x_star[..], x_rad, s] {
        if start.iter().all(|v| v.norm() == 0.0) {
            continue;
        }
        let (cand, _) = project_x(start, cfg.gamma, None)?;
        let f = obj(&cand)?;
        if x.as_ref().is_none_or(|(_, best)| f < *best) {
            x = Some((cand, f));
        }
    }
    let (mut x, mut f) = x.ok_or(Error::Degenerate("all trade-off anchors are zero"))?;

    let mut history = Vec::new();
    let mut iterations = 0;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        let mut d: Vec<Complex64> = x.iter().zip(&x_star).map(|(a, b)| a - b).collect();
        t.forward(&mut d);
        d.iter_mut().zip(&gain).for_each(|(v, g)| *v *= g / lmax);
        t.inverse(&mut d);
        let v: Vec<Complex64> = x.iter().zip(&d).map(|(a, b)| a - b).collect();
        let (next, _) = project_x(&v, cfg.gamma, Some(&x))?;
        let fnext = obj(&next)?;
        let change = distance(&next, &x);
        history.push(fnext);
        x = next;
        f = fnext;
        if change <= cfg.tolerance {
            break;
        }
    }
    Ok(TradeoffDesign {
        x,
        objective: f,
        iterations,
        history,
    })
}
