//! Decoupled majorization-minimization (DMM) for the joint waveform/filter
//! problem.
//!
//! The waveform `x` and filter `w` are stacked into `z = [x; w]`. Each
//! iteration majorizes the quartic objective by a linear function
//! `Re{z^H P(z_t)}` and maximizes it in closed form over the feasible set
//! (`‖w‖² = ‖x‖² = L`, `|x_l| ≤ γ`). Correlation-matrix products never touch
//! dense Toeplitz matrices: they are evaluated with length-`2L` transforms.
//!
//! Conventions: `C_{x,w}(k) = Σ_l x_l conj(w_{l+k})`. With normalised inverse
//! transforms, `c = ifft(conj(fft(w)) ∘ fft(x))` holds `c[m] = C(-m)` modulo
//! `2L`, so the masks below drop index 0 (zero lag, ISL only) and index `L`
//! (no such lag).

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::fft::Transform;
use crate::jamming::TransferMatrix;
use crate::signal::{self, distance, energy, inner, ComplexSequence};

/// Termination width of the δ bisection.
pub const BISECTION_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Weight between sidelobe (ρ) and jamming-suppression (1−ρ) terms.
    pub rho: f64,
    /// Similarity penalty towards the communication symbols.
    pub epsilon: f64,
    /// Weight on the target correlation peak.
    pub beta1: f64,
    /// Weight on the jamming correlation peak; `beta1 + beta2 = 1`.
    pub beta2: f64,
    /// Amplitude bound, PAPR ≤ γ².
    pub gamma: f64,
    pub a_max: f64,
    pub a_min: f64,
    /// Stop once `‖x_{t+1} − x_t‖ + ‖w_{t+1} − w_t‖ ≤ η`.
    pub eta: f64,
    pub max_iter: usize,
    /// SQUAREM extrapolation.
    pub accel: bool,
}

impl SolverConfig {
    /// Simulation settings used for the `L = 256` PPRJ design.
    pub fn reference(len: usize) -> Self {
        let l = len as f64;
        Self {
            rho: 0.4,
            epsilon: 2.0,
            beta1: 0.12,
            beta2: 0.88,
            gamma: 1.5,
            a_max: l,
            a_min: 1e-4 * l,
            eta: 1e-5,
            max_iter: 20_000,
            accel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.rho,
            self.epsilon,
            self.beta1,
            self.beta2,
            self.gamma,
            self.a_max,
            self.a_min,
            self.eta,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("solver parameters must be finite"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::arg(format!("rho = {} outside [0, 1]", self.rho)));
        }
        if self.epsilon < 0.0 {
            return Err(Error::arg("epsilon must be non-negative"));
        }
        if self.beta1 < 0.0 || self.beta2 < 0.0 {
            return Err(Error::arg("beta weights must be non-negative"));
        }
        if (self.beta1 + self.beta2 - 1.0).abs() > 1e-12 {
            return Err(Error::arg(format!(
                "beta1 + beta2 = {} (must be 1)",
                self.beta1 + self.beta2
            )));
        }
        if self.gamma < 1.0 {
            return Err(Error::arg(format!("gamma = {} below 1", self.gamma)));
        }
        if self.a_max < 0.0 || self.a_min < 0.0 {
            return Err(Error::arg("a_max and a_min must be non-negative"));
        }
        if self.eta <= 0.0 {
            return Err(Error::arg("eta must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::arg("max_iter must be positive"));
        }
        Ok(())
    }
}

/// Closed-form surrogate curvature:
/// `ρ(L−1) + (1−ρ) max_k ‖J^H U_k‖²_F`.
///
/// `J^H U_k` keeps the entries `(r, c)` of `J` with `0 ≤ r + k < L`, so the
/// Frobenius norm is a count over a band of rows.
pub fn lambda_u(rho: f64, j: &TransferMatrix) -> f64 {
    let n = j.len();
    let rows = j.row_counts();
    let mut prefix = vec![0usize; n + 1];
    for (i, c) in rows.iter().enumerate() {
        prefix[i + 1] = prefix[i] + c;
    }
    // Rows r with max(0, -k) ≤ r < min(L, L - k).
    let band = (1 - n as isize..n as isize)
        .map(|k| {
            let lo = (-k).max(0) as usize;
            let hi = (n as isize - k).min(n as isize) as usize;
            prefix[hi] - prefix[lo]
        })
        .max()
        .unwrap_or(0);
    rho * (n as f64 - 1.0) + (1.0 - rho) * band as f64
}

/// Masked correlation spectra `μ = F(ω∘c)` and `μ_J = F(ω_J∘c_J)` together
/// with the circular correlations they come from.
#[derive(Debug, Clone)]
pub struct Spectra {
    pub c: Vec<Complex64>,
    pub c_j: Vec<Complex64>,
    pub mu: Vec<Complex64>,
    pub mu_j: Vec<Complex64>,
}

/// Transforms of one stacked iterate, shared by the operator and the
/// objective.
struct Transforms {
    fx: Vec<Complex64>,
    fw: Vec<Complex64>,
    fxj: Vec<Complex64>,
    spectra: Spectra,
}

struct Engine {
    len: usize,
    t: Transform,
}

impl Engine {
    fn new(len: usize) -> Self {
        Self {
            len,
            t: Transform::new(2 * len),
        }
    }

    fn transforms(&mut self, x: &[Complex64], w: &[Complex64], xj: &[Complex64]) -> Transforms {
        let n = self.len;
        let mut fx = Vec::new();
        let mut fw = Vec::new();
        let mut fxj = Vec::new();
        self.t.forward_padded(x, &mut fx);
        self.t.forward_padded(w, &mut fw);
        self.t.forward_padded(xj, &mut fxj);

        let mut c: Vec<Complex64> = fx.iter().zip(&fw).map(|(a, b)| a * b.conj()).collect();
        let mut c_j: Vec<Complex64> = fxj.iter().zip(&fw).map(|(a, b)| a * b.conj()).collect();
        self.t.inverse(&mut c);
        self.t.inverse(&mut c_j);

        let mut mu = c.clone();
        mu[0] = Complex64::default();
        mu[n] = Complex64::default();
        let mut mu_j = c_j.clone();
        mu_j[n] = Complex64::default();
        self.t.forward(&mut mu);
        self.t.forward(&mut mu_j);

        Transforms {
            fx,
            fw,
            fxj,
            spectra: Spectra { c, c_j, mu, mu_j },
        }
    }

    /// First `L` samples of `ifft(a ∘ b)`.
    fn product_head(&mut self, a: impl Iterator<Item = Complex64>, b: &[Complex64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = a.zip(b).map(|(u, v)| u * v).collect();
        self.t.inverse(&mut buf);
        buf.truncate(self.len);
        buf
    }

    /// The two blocks of `(Q + Q^H) z`.
    fn q_sym(&mut self, tr: &Transforms, rho: f64, j: &TransferMatrix) -> (Vec<Complex64>, Vec<Complex64>) {
        let sp = &tr.spectra;
        let n = self.len;
        let mut top = self.product_head(sp.mu.iter().copied(), &tr.fw);
        let mut bottom = self.product_head(sp.mu.iter().map(|m| m.conj()), &tr.fx);
        if rho < 1.0 {
            let tj = self.product_head(sp.mu_j.iter().copied(), &tr.fw);
            let mut jh = vec![Complex64::default(); n];
            j.apply_adjoint_into(&tj, &mut jh);
            let bj = self.product_head(sp.mu_j.iter().map(|m| m.conj()), &tr.fxj);
            for i in 0..n {
                top[i] = rho * top[i] + (1.0 - rho) * jh[i];
                bottom[i] = rho * bottom[i] + (1.0 - rho) * bj[i];
            }
        } else {
            top.iter_mut().for_each(|v| *v *= rho);
            bottom.iter_mut().for_each(|v| *v *= rho);
        }
        (top, bottom)
    }
}

fn check_inputs(x: &[Complex64], w: &[Complex64], j: &TransferMatrix) -> Result<()> {
    check_len(x.len(), w.len())?;
    check_len(j.len(), x.len())?;
    if x.len() < 2 {
        return Err(Error::arg("sequence length must be at least 2"));
    }
    Ok(())
}

pub fn correlation_spectra(x: &[Complex64], w: &[Complex64], xj: &[Complex64]) -> Result<Spectra> {
    check_len(x.len(), w.len())?;
    check_len(x.len(), xj.len())?;
    if x.len() < 2 {
        return Err(Error::arg("sequence length must be at least 2"));
    }
    Ok(Engine::new(x.len()).transforms(x, w, xj).spectra)
}

/// `(Q + Q^H) z` for `z = [x; w]`, returned stacked (length `2L`).
pub fn apply_q_sym(x: &[Complex64], w: &[Complex64], rho: f64, j: &TransferMatrix) -> Result<Vec<Complex64>> {
    check_inputs(x, w, j)?;
    let mut e = Engine::new(x.len());
    let xj = j.apply(x)?;
    let tr = e.transforms(x, w, &xj);
    let (mut top, bottom) = e.q_sym(&tr, rho, j);
    top.extend(bottom);
    Ok(top)
}

/// Objective components at `(x, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObjectiveComponents {
    pub isl: f64,
    pub il: f64,
    /// `‖x − s‖²`.
    pub similarity: f64,
    /// `−4β₁ a_max Re(x^H w)`.
    pub peak_penalty: f64,
    /// `−4β₂ a_min Re((Jx)^H w)`.
    pub jam_penalty: f64,
    /// `−ε |s^H x|²`.
    pub corr_similarity: f64,
    /// `ρ ISL + (1−ρ) IL` plus the three penalty terms.
    pub composite: f64,
}

fn components(
    sp: &Spectra,
    x: &[Complex64],
    w: &[Complex64],
    xj: &[Complex64],
    s: &[Complex64],
    cfg: &SolverConfig,
) -> ObjectiveComponents {
    let n = x.len();
    let isl = sp
        .c
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 0 && *i != n)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>();
    let il = sp
        .c_j
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != n)
        .map(|(_, v)| v.norm_sqr())
        .sum::<f64>();
    let peak_penalty = -4.0 * cfg.beta1 * cfg.a_max * inner(x, w).re;
    let jam_penalty = -4.0 * cfg.beta2 * cfg.a_min * inner(xj, w).re;
    let corr_similarity = -cfg.epsilon * inner(s, x).norm_sqr();
    ObjectiveComponents {
        isl,
        il,
        similarity: distance(x, s).powi(2),
        peak_penalty,
        jam_penalty,
        corr_similarity,
        composite: cfg.rho * isl + (1.0 - cfg.rho) * il + peak_penalty + jam_penalty + corr_similarity,
    }
}

pub fn objective(
    x: &[Complex64],
    w: &[Complex64],
    s: &[Complex64],
    j: &TransferMatrix,
    cfg: &SolverConfig,
) -> Result<ObjectiveComponents> {
    check_inputs(x, w, j)?;
    check_len(x.len(), s.len())?;
    let xj = j.apply(x)?;
    let sp = correlation_spectra(x, w, &xj)?;
    Ok(components(&sp, x, w, &xj, s, cfg))
}

#[allow(clippy::too_many_arguments)]
fn assemble_p(
    e: &mut Engine,
    tr: &Transforms,
    x: &[Complex64],
    w: &[Complex64],
    xj: &[Complex64],
    s: &[Complex64],
    j: &TransferMatrix,
    cfg: &SolverConfig,
    lambda: f64,
) -> Vec<Complex64> {
    let n = x.len();
    let (top, bottom) = e.q_sym(tr, cfg.rho, j);
    let curv = 4.0 * lambda * n as f64;
    let sx = inner(s, x) * cfg.epsilon;
    let mut jhw = vec![Complex64::default(); n];
    j.apply_adjoint_into(w, &mut jhw);
    let g1 = 2.0 * cfg.beta1 * cfg.a_max;
    let g2 = 2.0 * cfg.beta2 * cfg.a_min;

    let mut p = Vec::with_capacity(2 * n);
    for i in 0..n {
        p.push(curv * x[i] + s[i] * sx - top[i] + g1 * w[i] + g2 * jhw[i]);
    }
    for i in 0..n {
        p.push(curv * w[i] - bottom[i] + g1 * x[i] + g2 * xj[i]);
    }
    p
}

/// Linear surrogate coefficient
/// `P(z) = 4λ_u L z + ε s̃ s̃^H z − (Q+Q^H) z + penalty block`, stacked
/// `[P_x; P_w]`. `s` is used as given. Config invariants are not checked so
/// that individual terms can be isolated.
pub fn compute_p(
    x: &[Complex64],
    w: &[Complex64],
    s: &[Complex64],
    j: &TransferMatrix,
    cfg: &SolverConfig,
) -> Result<Vec<Complex64>> {
    check_inputs(x, w, j)?;
    check_len(x.len(), s.len())?;
    let mut e = Engine::new(x.len());
    let xj = j.apply(x)?;
    let tr = e.transforms(x, w, &xj);
    Ok(assemble_p(&mut e, &tr, x, w, &xj, s, j, cfg, lambda_u(cfg.rho, j)))
}

/// Filter update: `P_w` rescaled to energy `L`.
pub fn update_w(p_w: &[Complex64]) -> Result<ComplexSequence> {
    let e = energy(p_w);
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Degenerate("filter update from a zero or non-finite P_w"));
    }
    let g = (p_w.len() as f64 / e).sqrt();
    ComplexSequence::new(p_w.iter().map(|v| v * g).collect())
}

/// Outcome of the scale search for the waveform update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub delta: f64,
    /// Final bracket width, in the units of `delta`.
    pub width: f64,
    /// `f(δ) = Σ min(γ², δ²|p_l|²) − L`.
    pub residual: f64,
}

fn clipped_energy(mags: &[f64], delta: f64, gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    mags.iter().map(|a| (delta * delta * a * a).min(g2)).sum()
}

/// Finds `δ ∈ (0, γ / min_{p_l≠0} |p_l|]` with `Σ min(γ², δ²|p_l|²) = L`.
///
/// The search runs on magnitudes normalised by their maximum (so the root
/// sits near 1 whatever the scale of `P`), stops once the bracket is below
/// [`BISECTION_WIDTH`] in both normalised and original units, then snaps to
/// the closed-form root for the clipping pattern found, if it lies inside
/// the final bracket. When fewer than `L/γ²` entries are nonzero no root
/// exists and the upper end of the bracket is returned.
pub fn bisect_delta(p_x: &[Complex64], gamma: f64) -> Result<Bisection> {
    if !(gamma >= 1.0) {
        return Err(Error::arg(format!("gamma = {gamma} below 1")));
    }
    let n = p_x.len() as f64;
    let mags: Vec<f64> = p_x.iter().map(|v| v.norm()).collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::Degenerate("waveform update from a zero or non-finite P_x"));
    }
    let a: Vec<f64> = mags.iter().map(|m| m / peak).collect();
    let min_nz = a.iter().copied().filter(|&m| m > 0.0).fold(f64::INFINITY, f64::min);
    let f = |d: f64| clipped_energy(&a, d, gamma) - n;

    let mut lo = 0.0;
    let mut hi = gamma / min_nz;
    if f(hi) < 0.0 {
        return Ok(Bisection {
            delta: hi / peak,
            width: 0.0,
            residual: f(hi),
        });
    }
    let target = BISECTION_WIDTH * peak.min(1.0);
    while hi - lo > target {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mut best = mid;
    let mut best_res = f(mid);

    let g2 = gamma * gamma;
    let (mut clipped, mut free) = (0usize, 0.0);
    for &m in &a {
        if mid * m >= gamma {
            clipped += 1;
        } else {
            free += m * m;
        }
    }
    let rem = n - clipped as f64 * g2;
    if rem > 0.0 && free > 0.0 {
        let d = (rem / free).sqrt();
        let slack = 4.0 * f64::EPSILON * hi;
        if d >= lo - slack && d <= hi + slack {
            let r = f(d);
            if r.abs() <= best_res.abs() {
                best = d;
                best_res = r;
            }
        }
    }
    Ok(Bisection {
        delta: best / peak,
        width: (hi - lo) / peak,
        residual: best_res,
    })
}

/// Waveform update: `x_l = min(δ|p_l|, γ) e^{j arg p_l}`.
///
/// Entries with `p_l = 0` keep the phase of `prev` (or phase 0). They get
/// zero amplitude unless the nonzero entries, all clipped at `γ`, cannot
/// reach energy `L`; the shortfall is then spread evenly over them.
pub fn update_x(
    p_x: &[Complex64],
    delta: f64,
    gamma: f64,
    prev: Option<&[Complex64]>,
) -> Result<ComplexSequence> {
    if let Some(prev) = prev {
        check_len(p_x.len(), prev.len())?;
    }
    let mut out: Vec<Complex64> = p_x
        .iter()
        .map(|p| {
            let m = p.norm();
            if m > 0.0 {
                p * ((delta * m).min(gamma) / m)
            } else {
                Complex64::default()
            }
        })
        .collect();
    let zeros: Vec<usize> = (0..p_x.len()).filter(|&i| p_x[i].norm() == 0.0).collect();
    if !zeros.is_empty() {
        let deficit = p_x.len() as f64 - energy(&out);
        let amp = if deficit > 0.0 {
            (deficit / zeros.len() as f64).sqrt().min(gamma)
        } else {
            0.0
        };
        for &i in &zeros {
            let phase = prev.map(|v| v[i].arg()).unwrap_or(0.0);
            out[i] = Complex64::from_polar(amp, phase);
        }
    }
    ComplexSequence::new(out)
}

/// Maximiser of `Re{x^H p}` over `{‖x‖² = L, |x_l| ≤ γ}`.
pub fn project_x(p_x: &[Complex64], gamma: f64, prev: Option<&[Complex64]>) -> Result<(ComplexSequence, Bisection)> {
    let b = bisect_delta(p_x, gamma)?;
    Ok((update_x(p_x, b.delta, gamma, prev)?, b))
}

/// One plain DMM map `z_t → z_{t+1}`, with the surrogate coefficient used.
#[derive(Debug, Clone)]
pub struct Step {
    pub p: Vec<Complex64>,
    pub x: ComplexSequence,
    pub w: ComplexSequence,
    pub bisection: Bisection,
}

/// Per-iteration record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    /// 1-based iteration count.
    pub iteration: usize,
    pub objective: ObjectiveComponents,
    /// `‖x_{t+1} − x_t‖ + ‖w_{t+1} − w_t‖`.
    pub gap: f64,
    pub lpg_db: f64,
    pub delta: f64,
    pub bisection_residual: f64,
    pub bisection_width: f64,
    /// SQUAREM extrapolation was rejected and the plain double step kept.
    pub fallback: bool,
    pub x_energy: f64,
    pub w_energy: f64,
    pub x_peak: f64,
    /// Smallest `|x_l|`.
    pub x_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub initial: ObjectiveComponents,
    pub records: Vec<IterRecord>,
    pub converged: bool,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn final_gap(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.gap)
    }

    /// Iterations after `skip` whose composite objective exceeds the
    /// previous one by more than `rel_tol · |previous|`.
    pub fn monotonicity_violations(&self, skip: usize, rel_tol: f64) -> Vec<usize> {
        self.records
            .windows(2)
            .filter(|w| w[1].iteration > skip)
            .filter(|w| {
                let prev = w[0].objective.composite;
                w[1].objective.composite > prev + rel_tol * prev.abs()
            })
            .map(|w| w[1].iteration)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub x: ComplexSequence,
    pub w: ComplexSequence,
    pub trace: SolverTrace,
}

/// Iterate together with its surrogate coefficient and objective.
struct Evaluated {
    x: ComplexSequence,
    w: ComplexSequence,
    p: Vec<Complex64>,
    obj: ObjectiveComponents,
}

/// Solver bound to one symbol block and jamming operator.
pub struct DmmSolver {
    cfg: SolverConfig,
    j: TransferMatrix,
    s: Vec<Complex64>,
    lambda: f64,
    engine: Engine,
}

fn all_finite(v: &[Complex64]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

fn numerical(iteration: usize, what: impl Into<String>) -> Error {
    Error::Numerical {
        iteration,
        what: what.into(),
    }
}

fn retag(e: Error, iteration: usize) -> Error {
    match e {
        Error::Degenerate(what) => numerical(iteration, what),
        other => other,
    }
}

impl DmmSolver {
    /// `s` is rescaled to energy `L`.
    pub fn new(s: &[Complex64], j: &TransferMatrix, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        check_len(j.len(), s.len())?;
        if s.len() < 2 {
            return Err(Error::arg("sequence length must be at least 2"));
        }
        let s = signal::scale_to_energy(s, s.len() as f64)?.into_vec();
        Ok(Self {
            lambda: lambda_u(cfg.rho, j),
            engine: Engine::new(s.len()),
            j: j.clone(),
            s,
            cfg,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The energy-normalised symbol block.
    pub fn symbols(&self) -> &[Complex64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    fn evaluate(&mut self, x: ComplexSequence, w: ComplexSequence) -> Result<Evaluated> {
        check_len(self.len(), x.len())?;
        check_len(self.len(), w.len())?;
        let xj = self.j.apply(&x)?;
        let tr = self.engine.transforms(&x, &w, &xj);
        let obj = components(&tr.spectra, &x, &w, &xj, &self.s, &self.cfg);
        let p = assemble_p(&mut self.engine, &tr, &x, &w, &xj, &self.s, &self.j, &self.cfg, self.lambda);
        Ok(Evaluated { x, w, p, obj })
    }

    fn map(&self, ev: &Evaluated, iteration: usize) -> Result<(ComplexSequence, ComplexSequence, Bisection)> {
        if !all_finite(&ev.p) {
            return Err(numerical(iteration, "non-finite surrogate coefficient"));
        }
        let n = self.len();
        let (p_x, p_w) = ev.p.split_at(n);
        let w = update_w(p_w).map_err(|e| retag(e, iteration))?;
        let (x, b) = project_x(p_x, self.cfg.gamma, Some(&ev.x)).map_err(|e| retag(e, iteration))?;
        Ok((x, w, b))
    }

    /// Surrogate coefficient at `(x, w)`.
    pub fn compute_p(&mut self, x: &[Complex64], w: &[Complex64]) -> Result<Vec<Complex64>> {
        let ev = self.evaluate(ComplexSequence::new(x.to_vec())?, ComplexSequence::new(w.to_vec())?)?;
        Ok(ev.p)
    }

    pub fn objective(&mut self, x: &[Complex64], w: &[Complex64]) -> Result<ObjectiveComponents> {
        let ev = self.evaluate(ComplexSequence::new(x.to_vec())?, ComplexSequence::new(w.to_vec())?)?;
        Ok(ev.obj)
    }

    /// One plain DMM map.
    pub fn step(&mut self, x: &[Complex64], w: &[Complex64]) -> Result<Step> {
        let ev = self.evaluate(ComplexSequence::new(x.to_vec())?, ComplexSequence::new(w.to_vec())?)?;
        let (x, w, bisection) = self.map(&ev, 0)?;
        Ok(Step {
            p: ev.p,
            x,
            w,
            bisection,
        })
    }

    /// Feasible point for a SQUAREM step length `alpha`:
    /// `z0 − 2αr + α²v` with `r = z1 − z0`, `v = z2 − z1 − r`, projected back
    /// onto the constraint set.
    pub fn squarem_point(
        &self,
        z0: (&[Complex64], &[Complex64]),
        z1: (&[Complex64], &[Complex64]),
        z2: (&[Complex64], &[Complex64]),
        alpha: f64,
    ) -> Result<(ComplexSequence, ComplexSequence)> {
        let extrap = |a: &[Complex64], b: &[Complex64], c: &[Complex64]| -> Vec<Complex64> {
            a.iter()
                .zip(b)
                .zip(c)
                .map(|((z0, z1), z2)| {
                    let r = z1 - z0;
                    let v = z2 - z1 - r;
                    z0 - r * (2.0 * alpha) + v * (alpha * alpha)
                })
                .collect()
        };
        let xe = extrap(z0.0, z1.0, z2.0);
        let we = extrap(z0.1, z1.1, z2.1);
        let (x, _) = project_x(&xe, self.cfg.gamma, Some(z2.0))?;
        Ok((x, update_w(&we)?))
    }

    /// One SQUAREM cycle from `cur`: two plain maps, an extrapolation and a
    /// backtracking safeguard on the composite objective. Returns the new
    /// point, the bisection of the second plain map and whether the
    /// extrapolation was abandoned.
    fn squarem_cycle(&mut self, cur: &Evaluated, iteration: usize) -> Result<(Evaluated, Bisection, bool)> {
        let (x1, w1, _) = self.map(cur, iteration)?;
        let e1 = self.evaluate(x1, w1)?;
        let (x2, w2, b2) = self.map(&e1, iteration)?;
        let e2 = self.evaluate(x2, w2)?;

        let mut r2 = 0.0;
        let mut v2 = 0.0;
        for (z0, z1, z2) in [(&cur.x, &e1.x, &e2.x), (&cur.w, &e1.w, &e2.w)] {
            for i in 0..z0.len() {
                let r = z1[i] - z0[i];
                r2 += r.norm_sqr();
                v2 += (z2[i] - z1[i] - r).norm_sqr();
            }
        }
        if !(v2 > 0.0) {
            return Ok((e2, b2, false));
        }
        let mut alpha = -(r2 / v2).sqrt();
        if alpha >= -1.0 {
            return Ok((e2, b2, false));
        }
        while alpha < -1.0 {
            let cand = self.squarem_point(
                (&cur.x, &cur.w),
                (&e1.x, &e1.w),
                (&e2.x, &e2.w),
                alpha,
            );
            if let Ok((x, w)) = cand {
                if all_finite(&x) && all_finite(&w) {
                    let ev = self.evaluate(x, w)?;
                    if ev.obj.composite <= e2.obj.composite {
                        return Ok((ev, b2, false));
                    }
                }
            }
            alpha = (alpha - 1.0) / 2.0;
        }
        Ok((e2, b2, true))
    }

    /// Runs from `x₀ = s`, `w₀ = w_init` (default `x₀`) until the iterate gap
    /// falls to `η` or `max_iter` iterations. With acceleration on, one
    /// iteration is one SQUAREM cycle.
    pub fn solve(&mut self, w_init: Option<&[Complex64]>) -> Result<Design> {
        self.solve_from(&self.s.clone(), w_init)
    }

    pub fn solve_from(&mut self, x0: &[Complex64], w_init: Option<&[Complex64]>) -> Result<Design> {
        let n = self.len();
        check_len(n, x0.len())?;
        let x0 = ComplexSequence::new(x0.to_vec())?;
        let w0 = match w_init {
            Some(w) => {
                check_len(n, w.len())?;
                signal::scale_to_energy(w, n as f64)?
            }
            None => x0.clone(),
        };
        let mut cur = self.evaluate(x0, w0)?;
        let initial = cur.obj;
        let mut records = Vec::new();
        let mut converged = false;

        for it in 1..=self.cfg.max_iter {
            let (next, b, fallback) = if self.cfg.accel {
                self.squarem_cycle(&cur, it)?
            } else {
                let (x, w, b) = self.map(&cur, it)?;
                (self.evaluate(x, w)?, b, false)
            };
            let gap = distance(&next.x, &cur.x) + distance(&next.w, &cur.w);
            if !gap.is_finite() || !next.obj.composite.is_finite() {
                return Err(numerical(it, "non-finite iterate or objective"));
            }
            let lpg_db = signal::lpg(&next.x, &next.w).map_err(|e| retag(e, it))?;
            records.push(IterRecord {
                iteration: it,
                objective: next.obj,
                gap,
                lpg_db,
                delta: b.delta,
                bisection_residual: b.residual,
                bisection_width: b.width,
                fallback,
                x_energy: next.x.energy(),
                w_energy: next.w.energy(),
                x_peak: next.x.max_modulus(),
                x_min: next.x.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min),
            });
            cur = next;
            if gap <= self.cfg.eta {
                converged = true;
                break;
            }
        }
        Ok(Design {
            x: cur.x,
            w: cur.w,
            trace: SolverTrace {
                initial,
                records,
                converged,
            },
        })
    }
}

/// Convenience wrapper around [`DmmSolver`].
pub fn solve(
    s: &[Complex64],
    j: &TransferMatrix,
    cfg: &SolverConfig,
    w_init: Option<&[Complex64]>,
) -> Result<Design> {
    DmmSolver::new(s, j, cfg.clone())?.solve(w_init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jamming::JammerSpec;
    use crate::rng::substream;
    use crate::signal::{il, isl, papr};
    use proptest::prelude::*;
    use rand::Rng;

    fn rand_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = substream(seed, "dmm-test", &[]);
        (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect()
    }

    fn qpsk(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = substream(seed, "qpsk", &[]);
        (0..n)
            .map(|_| {
                let k = rng.random_range(0..4) as f64;
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * k + std::f64::consts::FRAC_PI_4)
            })
            .collect()
    }

    fn pprj(c: usize, m: usize, n: usize) -> TransferMatrix {
        JammerSpec::pprj(1.0, c as f64, m, n).build().unwrap()
    }

    /// Dense `Σ_k |band_k|` by explicit `J^H U_k` products.
    fn dense_band_max(j: &TransferMatrix) -> usize {
        let n = j.len();
        let mut dense = vec![vec![0u8; n]; n];
        for &(r, c) in j.entries() {
            dense[r][c] = 1;
        }
        let mut best = 0;
        for k in 1 - n as isize..n as isize {
            // (J^H U_k)_{c, col} = Σ_i J_{i,c} [col = i + k]
            let mut fro = 0;
            for c in 0..n {
                for col in 0..n {
                    let i = col as isize - k;
                    if (0..n as isize).contains(&i) {
                        fro += dense[i as usize][c] as usize;
                    }
                }
            }
            best = best.max(fro);
        }
        best
    }

    #[test]
    fn lambda_u_rho_one() {
        assert_eq!(lambda_u(1.0, &pprj(40, 4, 256)), 255.0);
        assert_eq!(lambda_u(1.0, &pprj(1, 2, 4)), 3.0);
    }

    #[test]
    fn lambda_u_matches_band_enumeration() {
        let j = pprj(1, 2, 4);
        assert_eq!(dense_band_max(&j), 2);
        assert_eq!(lambda_u(0.0, &j), 2.0);
        let rrj = JammerSpec::rrj(1.0, 2.0, 8.0, 3, 16).build().unwrap();
        assert_eq!(lambda_u(0.0, &rrj), dense_band_max(&rrj) as f64);
        let j = pprj(40, 4, 256);
        assert!((lambda_u(0.4, &j) - (0.4 * 255.0 + 0.6 * 160.0)).abs() < 1e-9);
    }

    #[test]
    fn delta_spectra_drop_zero_lag() {
        let d = ComplexSequence::delta(8).unwrap();
        let sp = correlation_spectra(&d, &d, &d).unwrap();
        assert!((sp.c[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(sp.mu.iter().all(|v| v.norm() < 1e-12));
        assert!(sp.mu_j.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn mask_difference_is_lag_zero_spectrum() {
        let x = rand_vec(16, 1);
        let w = rand_vec(16, 2);
        let sp = correlation_spectra(&x, &w, &x).unwrap();
        for v in sp.mu_j.iter().zip(&sp.mu).map(|(a, b)| a - b) {
            assert!((v - sp.c[0]).norm() < 1e-9);
        }
    }

    #[test]
    fn q_sym_with_zero_filter_has_zero_top() {
        let x = rand_vec(16, 3);
        let w = vec![Complex64::default(); 16];
        let q = apply_q_sym(&x, &w, 0.4, &pprj(2, 3, 16)).unwrap();
        assert!(q.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn q_sym_is_gradient_of_quartic() {
        // (Q+Q^H) z = ∂f/∂z* for f = ρ ISL + (1−ρ) IL, so the directional
        // derivative is 2 Re{dz^H (Q+Q^H) z}.
        let n = 12;
        let j = pprj(2, 3, n);
        let x = rand_vec(n, 4);
        let w = rand_vec(n, 5);
        let dx = rand_vec(n, 6);
        let dw = rand_vec(n, 7);
        let rho = 0.3;
        let f = |x: &[Complex64], w: &[Complex64]| {
            rho * isl(x, w).unwrap() + (1.0 - rho) * il(&j.apply(x).unwrap(), w).unwrap()
        };
        let h = 1e-5;
        let step = |v: &[Complex64], d: &[Complex64], t: f64| -> Vec<Complex64> {
            v.iter().zip(d).map(|(a, b)| a + b * t).collect()
        };
        let fd = (f(&step(&x, &dx, h), &step(&w, &dw, h)) - f(&step(&x, &dx, -h), &step(&w, &dw, -h))) / (2.0 * h);
        let q = apply_q_sym(&x, &w, rho, &j).unwrap();
        let an = 2.0 * (inner(&dx, &q[..n]) + inner(&dw, &q[n..])).re;
        assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
    }

    #[test]
    fn p_term_isolation() {
        let n = 16;
        let j = pprj(2, 3, n);
        let x = rand_vec(n, 8);
        let w = rand_vec(n, 9);
        let s = rand_vec(n, 10);
        let mut cfg = SolverConfig::reference(n);
        cfg.epsilon = 0.0;
        cfg.beta1 = 0.0;
        cfg.beta2 = 0.0;
        let p = compute_p(&x, &w, &s, &j, &cfg).unwrap();
        let q = apply_q_sym(&x, &w, cfg.rho, &j).unwrap();
        let lam = lambda_u(cfg.rho, &j);
        for (i, z) in x.iter().chain(&w).enumerate() {
            assert!((p[i] - (4.0 * lam * n as f64 * z - q[i])).norm() < 1e-9);
        }

        // ε only enters the x block.
        let mut with_eps = cfg.clone();
        with_eps.epsilon = 3.0;
        let pe = compute_p(&x, &w, &s, &j, &with_eps).unwrap();
        let sx = inner(&s, &x);
        for i in 0..n {
            assert!((pe[i] - p[i] - s[i] * sx * 3.0).norm() < 1e-9);
            assert!((pe[n + i] - p[n + i]).norm() < 1e-9);
        }
    }

    #[test]
    fn update_w_examples() {
        let v: Vec<Complex64> = rand_vec(256, 11);
        let w = update_w(&v).unwrap();
        assert!((w.energy() - 256.0).abs() < 1e-9);
        let w2 = update_w(&v.iter().map(|a| a * 7.5).collect::<Vec<_>>()).unwrap();
        for (a, b) in w.iter().zip(w2.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        let unit = update_w(&w).unwrap();
        for (a, b) in unit.iter().zip(w.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(update_w(&[Complex64::default(); 4]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bisection_closed_forms() {
        let p = vec![Complex64::from_polar(2.5, 0.3); 32];
        let b = bisect_delta(&p, 1.5).unwrap();
        assert!((b.delta - 0.4).abs() < 1e-12);

        let p = rand_vec(64, 12);
        let e = energy(&p);
        let b = bisect_delta(&p, 100.0).unwrap();
        assert!((b.delta - (64.0 / e).sqrt()).abs() < 1e-12 * b.delta.max(1.0));
        assert!(b.width <= BISECTION_WIDTH);
        assert!(matches!(bisect_delta(&[Complex64::default(); 4], 1.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bisection_function_is_monotone() {
        let p = rand_vec(256, 13);
        let b = bisect_delta(&p, 1.5).unwrap();
        let mags: Vec<f64> = p.iter().map(|v| v.norm()).collect();
        let du = 1.5 / mags.iter().copied().fold(f64::INFINITY, f64::min);
        let mut last = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let f = clipped_energy(&mags, du * i as f64 / 1000.0, 1.5) - 256.0;
            assert!(f >= last);
            last = f;
        }
        assert!(b.residual.abs() <= 1e-8 * 256.0);
        assert!(b.delta > 0.0 && b.delta <= du);
    }

    #[test]
    fn update_x_examples() {
        let p = rand_vec(64, 14);
        let (x, _) = project_x(&p, 1.0, None).unwrap();
        assert!(x.iter().all(|v| (v.norm() - 1.0).abs() < 1e-9));

        let real: Vec<Complex64> = (1..=8).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let (x, _) = project_x(&real, 1.5, None).unwrap();
        assert!(x.iter().all(|v| v.im == 0.0 && v.re > 0.0));

        let (x, _) = project_x(&p, 1.5, None).unwrap();
        assert!((x.energy() - 64.0).abs() < 1e-6);
        assert!(papr(&x).unwrap() <= 1.5 * 1.5 + 1e-9);
    }

    #[test]
    fn zero_entries_keep_previous_phase() {
        let mut p = vec![Complex64::new(1.0, 0.0); 4];
        p[2] = Complex64::default();
        let prev = vec![Complex64::from_polar(1.0, 0.7); 4];
        let (x, _) = project_x(&p, 1.0, Some(&prev)).unwrap();
        assert!((x[2].arg() - 0.7).abs() < 1e-12);
        assert!((x.energy() - 4.0).abs() < 1e-9);
        assert!(x.iter().all(|v| (v.norm() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn objective_components() {
        let n = 32;
        let j = pprj(4, 3, n);
        let x = rand_vec(n, 15);
        let w = rand_vec(n, 16);
        let cfg = SolverConfig::reference(n);
        let o = objective(&x, &w, &x, &j, &cfg).unwrap();
        assert_eq!(o.similarity, 0.0);
        assert!((o.isl - isl(&x, &w).unwrap()).abs() < 1e-9 * o.isl);
        assert!((o.il - il(&j.apply(&x).unwrap(), &w).unwrap()).abs() < 1e-9 * o.il);

        let mut one = cfg.clone();
        one.rho = 1.0;
        let o1 = objective(&x, &w, &x, &j, &one).unwrap();
        let expect = o1.isl + o1.peak_penalty + o1.jam_penalty + o1.corr_similarity;
        assert!((o1.composite - expect).abs() < 1e-9 * expect.abs());
    }

    #[test]
    fn solve_large_eta_stops_after_one_iteration() {
        let n = 32;
        let mut cfg = SolverConfig::reference(n);
        cfg.eta = 1e3;
        let d = solve(&qpsk(n, 1), &pprj(4, 3, n), &cfg, None).unwrap();
        assert_eq!(d.trace.iterations(), 1);
        assert!(d.trace.converged);
    }

    #[test]
    fn solve_rejects_bad_config() {
        let n = 16;
        let mut cfg = SolverConfig::reference(n);
        cfg.beta2 = 0.5;
        assert!(solve(&qpsk(n, 1), &pprj(2, 3, n), &cfg, None).is_err());
        let mut cfg = SolverConfig::reference(n);
        cfg.gamma = 0.9;
        assert!(solve(&qpsk(n, 1), &pprj(2, 3, n), &cfg, None).is_err());
    }

    #[test]
    fn squarem_unit_step_is_plain_double_step() {
        let n = 32;
        let j = pprj(4, 3, n);
        let s = qpsk(n, 2);
        let mut solver = DmmSolver::new(&s, &j, SolverConfig::reference(n)).unwrap();
        let s1 = solver.step(&s, &s).unwrap();
        let s2 = solver.step(&s1.x, &s1.w).unwrap();
        let (x, w) = solver
            .squarem_point((&s, &s), (&s1.x, &s1.w), (&s2.x, &s2.w), -1.0)
            .unwrap();
        assert!(distance(&x, &s2.x) < 1e-9);
        assert!(distance(&w, &s2.w) < 1e-9);
    }

    #[test]
    fn iterates_stay_feasible_and_objective_decreases() {
        let n = 32;
        let mut cfg = SolverConfig::reference(n);
        cfg.max_iter = 300;
        for accel in [false, true] {
            cfg.accel = accel;
            let d = solve(&qpsk(n, 3), &pprj(4, 3, n), &cfg, None).unwrap();
            for r in &d.trace.records {
                assert!((r.x_energy - n as f64).abs() < 1e-6);
                assert!((r.w_energy - n as f64).abs() < 1e-6);
                assert!(r.x_peak <= cfg.gamma + 1e-9);
            }
            assert!(d.trace.monotonicity_violations(5, 1e-6).is_empty());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projection_beats_feasible_probes(seed in 0u64..10_000, gamma in 1.0f64..3.0) {
            let n = 24;
            let p = rand_vec(n, seed);
            let (x, b) = project_x(&p, gamma, None).unwrap();
            prop_assert!(b.residual.abs() <= 1e-8 * n as f64);
            let best = inner(&x, &p).re;
            for k in 0..20 {
                let (probe, _) = project_x(&rand_vec(n, seed * 31 + k + 1), gamma, None).unwrap();
                prop_assert!(inner(&probe, &p).re <= best + 1e-9 * energy(&p).sqrt());
            }
        }

        #[test]
        fn projection_is_feasible(seed in 0u64..10_000, gamma in 1.0f64..4.0, scale in -8i32..8) {
            let n = 48;
            let p: Vec<Complex64> = rand_vec(n, seed).iter().map(|v| v * 10f64.powi(scale)).collect();
            let (x, b) = project_x(&p, gamma, None).unwrap();
            prop_assert!((x.energy() - n as f64).abs() < 1e-6);
            prop_assert!(x.max_modulus() <= gamma + 1e-9);
            // Below 1e-12 unless δ is so large that its own spacing is coarser.
            prop_assert!(b.width <= BISECTION_WIDTH.max(4.0 * f64::EPSILON * b.delta));
        }
    }
}
