//! Integration of
//! `x'' + (alpha/t) x' + beta(t) d/dt grad Phi_{lambda(t)}(x) + b(t) grad Phi_{lambda(t)}(x) = 0`
//! through its first-order `(x, y)` reformulation.
//!
//! For `beta > 0` the lifted variable is
//! `y = beta z + (b - beta' - alpha beta / t) x` with
//! `z = -(x' + beta grad Phi_lambda(x))`, which removes the time derivative
//! of the gradient from the right-hand side. For `beta = 0` the system is the
//! plain position/velocity split.
//!
//! [`integrate`] advances the pair `(x, z)` itself:
//!
//! ```text
//! x' = -beta grad Phi_lambda(x) - z
//! z' = -(alpha/t) z + (b - beta' - alpha beta / t) grad Phi_lambda(x)
//! ```
//!
//! This is the same system in other coordinates. When `b` is large, `y` is
//! dominated by `b x / beta` and recovering `x'` from it cancels most digits,
//! so error control on `y` leaves the velocity poorly resolved; `z` has the
//! size of `x'` and does not suffer from this.

mod dopri;
mod trajectory;

use std::fmt;

use thiserror::Error;

use crate::analysis::energy::energy_from_parts;
use crate::error::{check_dim, Error, Result};
use crate::prox::{norm, ProxFunction};
use crate::schedule::{PolynomialSchedule, ScheduleEval};

use dopri::{Dopri5, Trial};
pub use trajectory::{Quantity, Sample, State, Trajectory};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_ABS_TOL: f64 = 1e-14;
pub const DEFAULT_SAMPLE_COUNT: usize = 1000;
pub const DEFAULT_MAX_STEPS: usize = 50_000_000;

/// Smallest admissible step relative to the current time.
const MIN_RELATIVE_STEP: f64 = 1e-12;

/// Full simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub objective: ProxFunction,
    pub schedule: PolynomialSchedule,
    /// `x(t0)`
    pub x0: Vec<f64>,
    /// `x'(t0)`
    pub u0: Vec<f64>,
    pub t_end: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Number of logarithmically spaced output samples on `[t0, t_end]`.
    pub sample_count: usize,
    /// Additional output times merged into the log-spaced grid.
    pub extra_times: Vec<f64>,
    /// Budget of accepted plus rejected steps.
    pub max_steps: usize,
}

/// Which first-order reformulation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    BetaPositive,
    BetaZero,
}

impl SystemConfig {
    /// Configuration with default tolerances and sampling.
    pub fn new(
        objective: ProxFunction,
        schedule: PolynomialSchedule,
        x0: Vec<f64>,
        u0: Vec<f64>,
        t_end: f64,
    ) -> Result<Self> {
        let cfg = Self {
            objective,
            schedule,
            x0,
            u0,
            t_end,
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            sample_count: DEFAULT_SAMPLE_COUNT,
            extra_times: Vec::new(),
            max_steps: DEFAULT_MAX_STEPS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    /// Adds a tight cluster `t (1 - rel), t, t (1 + rel)` around each time so
    /// that [`ode_residual`] can difference across neighbouring samples.
    pub fn with_probes(mut self, centers: &[f64], rel: f64) -> Self {
        for &c in centers {
            self.extra_times
                .extend_from_slice(&[c * (1.0 - rel), c, c * (1.0 + rel)]);
        }
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn dimension(&self) -> usize {
        self.objective.dimension()
    }

    pub fn branch(&self) -> Branch {
        if self.schedule.beta_is_zero() {
            Branch::BetaZero
        } else {
            Branch::BetaPositive
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        let d = self.dimension();
        check_dim(d, self.x0.len())?;
        check_dim(d, self.u0.len())?;
        if self.x0.iter().chain(&self.u0).any(|v| !v.is_finite()) {
            return Err(Error::invalid("x0", "initial data must be finite"));
        }
        let t0 = self.schedule.t0;
        if !(self.t_end > t0 && self.t_end.is_finite()) {
            return Err(Error::invalid(
                "t_end",
                format!("must be finite and exceed t0 = {t0}, got {}", self.t_end),
            ));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if self.sample_count < 2 {
            return Err(Error::invalid("sample_count", "need at least 2 samples"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be positive"));
        }
        if let Some(t) = self
            .extra_times
            .iter()
            .find(|&&t| !(t >= t0 && t <= self.t_end))
        {
            return Err(Error::invalid(
                "extra_times",
                format!("{t} lies outside [{t0}, {}]", self.t_end),
            ));
        }
        Ok(())
    }

    /// Output times: log-spaced grid merged with `extra_times`; strictly
    /// increasing, first `t0`, last `t_end`.
    pub fn sample_times(&self) -> Vec<f64> {
        let t0 = self.schedule.t0;
        let n = self.sample_count;
        let ratio = (self.t_end / t0).ln();
        let mut times: Vec<f64> = (0..n)
            .map(|k| match k {
                0 => t0,
                k if k == n - 1 => self.t_end,
                k => t0 * (ratio * k as f64 / (n - 1) as f64).exp(),
            })
            .collect();
        times.extend_from_slice(&self.extra_times);
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

fn check_time(cfg: &SystemConfig, t: f64) -> Result<ScheduleEval> {
    cfg.schedule.eval(t)
}

fn check_branch(cfg: &SystemConfig, expected: Branch) -> Result<()> {
    if cfg.branch() != expected {
        return Err(Error::Config(format!(
            "{expected:?} right-hand side requested but beta0 = {}",
            cfg.schedule.beta0
        )));
    }
    Ok(())
}

/// Right-hand side of the reformulated system evaluated into caller buffers.
struct VectorField<'a> {
    cfg: &'a SystemConfig,
    branch: Branch,
    prox: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> VectorField<'a> {
    fn new(cfg: &'a SystemConfig) -> Self {
        let d = cfg.dimension();
        Self {
            cfg,
            branch: cfg.branch(),
            prox: vec![0.0; d],
            grad: vec![0.0; d],
        }
    }

    fn eval(&mut self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.cfg.dimension();
        let (x, y) = state.split_at(d);
        let (dx, dy) = out.split_at_mut(d);
        let s = self.cfg.schedule.eval_unchecked(t);
        self.cfg
            .objective
            .moreau_into(s.lambda, x, &mut self.prox, &mut self.grad)?;
        let alpha = self.cfg.schedule.alpha;
        match self.branch {
            Branch::BetaPositive => {
                if !(s.beta > 0.0) {
                    return Err(Error::Config(format!("beta({t}) = {} is not positive", s.beta)));
                }
                let inv_beta = 1.0 / s.beta;
                let cx = (s.dbeta - s.b) * inv_beta + alpha / t;
                let cyx = s.ddbeta
                    + (3.0 * s.b * s.dbeta - 2.0 * s.dbeta * s.dbeta - s.b * s.b) * inv_beta
                    + alpha / t * (s.b - s.dbeta - s.beta / t)
                    - s.db;
                let cyy = (s.b - 2.0 * s.dbeta) * inv_beta;
                for i in 0..d {
                    dx[i] = -s.beta * self.grad[i] - cx * x[i] - y[i] * inv_beta;
                    dy[i] = -cyx * x[i] - cyy * y[i];
                }
            }
            Branch::BetaZero => {
                for i in 0..d {
                    dx[i] = y[i];
                    dy[i] = -alpha / t * y[i] - s.b * self.grad[i];
                }
            }
        }
        Ok(())
    }
}

fn split_rhs(cfg: &SystemConfig, t: f64, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = cfg.dimension();
    check_dim(d, x.len())?;
    check_dim(d, y.len())?;
    check_time(cfg, t)?;
    let state: Vec<f64> = x.iter().chain(y).copied().collect();
    let mut out = vec![0.0; 2 * d];
    VectorField::new(cfg).eval(t, &state, &mut out)?;
    let dy = out.split_off(d);
    Ok((out, dy))
}

/// Right-hand side of the `(x, y)` system for `beta > 0`.
pub fn rhs_beta_positive(
    cfg: &SystemConfig,
    t: f64,
    x: &[f64],
    y: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_branch(cfg, Branch::BetaPositive)?;
    split_rhs(cfg, t, x, y)
}

/// Right-hand side for `beta = 0`: `x' = y`, `y' = -(alpha/t) y - b grad Phi_lambda(x)`.
pub fn rhs_beta_zero(
    cfg: &SystemConfig,
    t: f64,
    x: &[f64],
    y: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_branch(cfg, Branch::BetaZero)?;
    split_rhs(cfg, t, x, y)
}

/// Lifted initial pair `(x(t0), y(t0))` for the active branch.
pub fn initial_lift(cfg: &SystemConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let x0 = cfg.x0.clone();
    let y0 = match cfg.branch() {
        Branch::BetaZero => cfg.u0.clone(),
        Branch::BetaPositive => {
            let t0 = cfg.schedule.t0;
            let s = cfg.schedule.eval(t0)?;
            let grad = cfg.objective.moreau(s.lambda, &x0)?.gradient;
            let cx = s.b - s.dbeta - cfg.schedule.alpha * s.beta / t0;
            (0..cfg.dimension())
                .map(|i| -s.beta * (cfg.u0[i] + s.beta * grad[i]) + cx * x0[i])
                .collect()
        }
    };
    Ok((x0, y0))
}

fn velocity_from(
    branch: Branch,
    alpha: f64,
    s: &ScheduleEval,
    x: &[f64],
    y: &[f64],
    grad: &[f64],
    out: &mut [f64],
) {
    match branch {
        Branch::BetaZero => out.copy_from_slice(y),
        Branch::BetaPositive => {
            let inv_beta = 1.0 / s.beta;
            let cx = (s.dbeta - s.b) * inv_beta + alpha / s.t;
            for i in 0..x.len() {
                out[i] = -s.beta * grad[i] - cx * x[i] - y[i] * inv_beta;
            }
        }
    }
}

/// `x'(t)` recovered algebraically from a lifted state.
pub fn velocity_reconstruct(cfg: &SystemConfig, t: f64, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let d = cfg.dimension();
    check_dim(d, x.len())?;
    check_dim(d, y.len())?;
    let s = check_time(cfg, t)?;
    let grad = match cfg.branch() {
        Branch::BetaZero => vec![0.0; d],
        Branch::BetaPositive => cfg.objective.moreau(s.lambda, x)?.gradient,
    };
    let mut v = vec![0.0; d];
    velocity_from(cfg.branch(), cfg.schedule.alpha, &s, x, y, &grad, &mut v);
    Ok(v)
}

/// Right-hand side in the `(x, z)` coordinates used by [`integrate`]; covers
/// both branches.
struct DampedField<'a> {
    cfg: &'a SystemConfig,
    prox: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> DampedField<'a> {
    fn new(cfg: &'a SystemConfig) -> Self {
        let d = cfg.dimension();
        Self {
            cfg,
            prox: vec![0.0; d],
            grad: vec![0.0; d],
        }
    }

    fn eval(&mut self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.cfg.dimension();
        let (x, z) = state.split_at(d);
        let (dx, dz) = out.split_at_mut(d);
        let s = self.cfg.schedule.eval_unchecked(t);
        self.cfg
            .objective
            .moreau_into(s.lambda, x, &mut self.prox, &mut self.grad)?;
        let damping = self.cfg.schedule.alpha / t;
        let coupling = s.b - s.dbeta - damping * s.beta;
        for i in 0..d {
            dx[i] = -s.beta * self.grad[i] - z[i];
            dz[i] = -damping * z[i] + coupling * self.grad[i];
        }
        Ok(())
    }
}

/// `z(t0) = -(u0 + beta(t0) grad Phi_lambda(t0)(x0))`.
fn initial_z(cfg: &SystemConfig) -> Result<Vec<f64>> {
    let s = cfg.schedule.eval(cfg.schedule.t0)?;
    let grad = cfg.objective.moreau(s.lambda, &cfg.x0)?.gradient;
    Ok((0..cfg.dimension())
        .map(|i| -(cfg.u0[i] + s.beta * grad[i]))
        .collect())
}

/// Builds a fully instrumented sample from an `(x, z)` state.
pub(crate) fn make_sample(cfg: &SystemConfig, t: f64, x: &[f64], z: &[f64]) -> Result<Sample> {
    let s = cfg.schedule.eval_unchecked(t);
    let m = cfg.objective.moreau(s.lambda, x)?;
    let v: Vec<f64> = (0..x.len())
        .map(|i| -s.beta * m.gradient[i] - z[i])
        .collect();
    let f_star = cfg.objective.optimal_value();
    let z = cfg.objective.minimizer();
    let envelope_gap = m.envelope_value - f_star;
    let prox_dist = x
        .iter()
        .zip(&m.prox_point)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        .sqrt();
    let prox_gap = cfg.objective.value(&m.prox_point)? - f_star;
    let dist_to_minimizer = x
        .iter()
        .zip(z)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let energy = energy_from_parts(
        cfg.schedule.alpha,
        &s,
        envelope_gap,
        x,
        &v,
        &m.gradient,
        z,
        cfg.schedule.alpha - 1.0,
    );
    Ok(Sample {
        envelope_gap,
        grad_norm: norm(&m.gradient),
        prox_dist,
        prox_gap,
        velocity_norm: norm(&v),
        energy,
        dist_to_minimizer,
        t2b_gap: t * t * s.b * envelope_gap,
        gradient: m.gradient,
        state: State {
            t,
            x: x.to_vec(),
            v,
        },
    })
}

/// What stopped an integration run.
#[derive(Debug, Clone, PartialEq)]
pub enum StiffnessCause {
    /// The controller asked for a step below `1e-12 t`.
    StepUnderflow { h: f64 },
    /// The step budget ran out. `stability_limited` records whether the
    /// step size was pinned at the explicit stability boundary.
    StepBudget { steps: usize, stability_limited: bool },
}

impl fmt::Display for StiffnessCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StiffnessCause::StepUnderflow { h } => write!(f, "step size underflow (h = {h:e})"),
            StiffnessCause::StepBudget {
                steps,
                stability_limited,
            } => write!(
                f,
                "step budget of {steps} exhausted{}",
                if *stability_limited {
                    " while stability-limited"
                } else {
                    ""
                }
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("stiffness at t = {t}: {cause}")]
    Stiffness { t: f64, cause: StiffnessCause },
    #[error("trajectory diverged (non-finite state) after t = {t}")]
    Divergence { t: f64 },
}

/// Failed run: the error plus every sample produced before it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error}")]
pub struct IntegrationFailure {
    pub error: IntegrationError,
    pub partial: Trajectory,
}

impl IntegrationFailure {
    fn new(error: impl Into<IntegrationError>, partial: Trajectory) -> Self {
        Self {
            error: error.into(),
            partial,
        }
    }
}

/// Integrates the system from `t0` to `t_end` with an adaptive
/// Dormand–Prince 5(4) pair and records a sample at every output time.
pub fn integrate(cfg: &SystemConfig) -> Result<Trajectory, IntegrationFailure> {
    let mut traj = Trajectory::default();
    if let Err(e) = cfg.validate() {
        return Err(IntegrationFailure::new(e, traj));
    }
    let d = cfg.dimension();
    let t0 = cfg.schedule.t0;
    let times = cfg.sample_times();

    let x0 = cfg.x0.clone();
    let z0 = initial_z(cfg).map_err(|e| IntegrationFailure::new(e, Trajectory::default()))?;
    let state0: Vec<f64> = x0.iter().chain(&z0).copied().collect();

    let mut field = DampedField::new(cfg);
    let mut rhs = |t: f64, s: &[f64], out: &mut [f64]| field.eval(t, s, out);

    let mut f0 = vec![0.0; 2 * d];
    if let Err(e) = rhs(t0, &state0, &mut f0) {
        return Err(IntegrationFailure::new(e, traj));
    }
    match make_sample(cfg, t0, &x0, &z0) {
        Ok(s) => traj.samples.push(s),
        Err(e) => return Err(IntegrationFailure::new(e, traj)),
    }

    let span = cfg.t_end - t0;
    let mut solver = Dopri5::new(t0, state0, f0, cfg.rel_tol, cfg.abs_tol);
    let mut h = match solver.initial_step(&mut rhs, span) {
        Ok(h) => h,
        Err(e) => return Err(IntegrationFailure::new(e, traj)),
    };
    let mut next_sample = 1;
    let mut dense = vec![0.0; 2 * d];
    let mut last_nonfinite = false;

    while next_sample < times.len() {
        if traj.steps >= cfg.max_steps {
            let cause = StiffnessCause::StepBudget {
                steps: traj.steps,
                stability_limited: solver.stability_limited,
            };
            return Err(IntegrationFailure::new(
                IntegrationError::Stiffness { t: solver.t, cause },
                traj,
            ));
        }
        let t = solver.t;
        let remaining = cfg.t_end - t;
        h = h.min(span);
        // Land exactly on t_end and avoid a sliver of a final step.
        if h >= remaining || remaining - h < MIN_RELATIVE_STEP * cfg.t_end {
            h = remaining;
        }
        if h < MIN_RELATIVE_STEP * t && h < remaining {
            let error = if last_nonfinite {
                IntegrationError::Divergence { t }
            } else {
                IntegrationError::Stiffness {
                    t,
                    cause: StiffnessCause::StepUnderflow { h },
                }
            };
            return Err(IntegrationFailure::new(error, traj));
        }
        traj.steps += 1;
        let trial = match solver.step(&mut rhs, h) {
            Ok(trial) => trial,
            Err(e) => return Err(IntegrationFailure::new(e, traj)),
        };
        match trial {
            Trial::Accepted { h_next } => {
                last_nonfinite = false;
                let landed = h == remaining;
                let t_new = if landed { cfg.t_end } else { solver.t };
                if landed {
                    solver.t = cfg.t_end;
                }
                while next_sample < times.len() && times[next_sample] <= t_new {
                    let ts = times[next_sample];
                    let sample = if ts == t_new {
                        let (x, z) = solver.y.split_at(d);
                        make_sample(cfg, ts, x, z)
                    } else {
                        solver.interpolate(ts, &mut dense);
                        let (x, z) = dense.split_at(d);
                        make_sample(cfg, ts, x, z)
                    };
                    match sample {
                        Ok(s) => traj.samples.push(s),
                        Err(e) => return Err(IntegrationFailure::new(e, traj)),
                    }
                    next_sample += 1;
                }
                h = h_next;
            }
            Trial::Rejected { h_next } => {
                last_nonfinite = false;
                h = h_next;
            }
            Trial::NonFinite => {
                last_nonfinite = true;
                h *= 0.1;
            }
        }
    }
    Ok(traj)
}

/// Finite-difference residual norm of the second-order equation at the
/// sample nearest to `t`, using the neighbouring samples.
pub fn ode_residual(cfg: &SystemConfig, traj: &Trajectory, t: f64) -> Result<f64> {
    Ok(ode_residual_terms(cfg, traj, t)?.norm)
}

/// Residual of the second-order equation together with the size of its
/// largest individual term, for relative comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub t: f64,
    pub norm: f64,
    pub scale: f64,
}

pub fn ode_residual_terms(cfg: &SystemConfig, traj: &Trajectory, t: f64) -> Result<OdeResidual> {
    let k = traj
        .nearest_index(t)
        .ok_or_else(|| Error::invalid("trajectory", "empty trajectory"))?;
    if k == 0 || k + 1 >= traj.len() {
        return Err(Error::invalid("t", format!("{t} is not interior to the samples")));
    }
    let (prev, cur, next) = (&traj.samples[k - 1], &traj.samples[k], &traj.samples[k + 1]);
    let tk = cur.t();
    let (h1, h2) = (tk - prev.t(), next.t() - tk);
    if h1.max(h2) > 1e-2 * tk {
        return Err(Error::invalid(
            "trajectory",
            format!("sample spacing {:e} too coarse at t = {tk}", h1.max(h2)),
        ));
    }
    let wm = -h2 / (h1 * (h1 + h2));
    let w0 = (h2 - h1) / (h1 * h2);
    let wp = h1 / (h2 * (h1 + h2));
    let diff = |a: &[f64], b: &[f64], c: &[f64], i: usize| wm * a[i] + w0 * b[i] + wp * c[i];

    let s = cfg.schedule.eval(tk)?;
    let alpha = cfg.schedule.alpha;
    let mut res_sq = 0.0;
    let mut scale: f64 = 0.0;
    let mut terms = [0.0f64; 4];
    for i in 0..cfg.dimension() {
        let acc = diff(&prev.state.v, &cur.state.v, &next.state.v, i);
        let dgrad = diff(&prev.gradient, &cur.gradient, &next.gradient, i);
        let parts = [
            acc,
            alpha / tk * cur.state.v[i],
            s.beta * dgrad,
            s.b * cur.gradient[i],
        ];
        let r: f64 = parts.iter().sum();
        res_sq += r * r;
        for (acc_sq, p) in terms.iter_mut().zip(parts) {
            *acc_sq += p * p;
        }
    }
    for t in terms {
        scale = scale.max(t.sqrt());
    }
    Ok(OdeResidual {
        t: tk,
        norm: res_sq.sqrt(),
        scale,
    })
}
