use crate::dynamics::{SystemConfig, Trajectory};
use crate::error::{check_dim, Error, Result};
use crate::schedule::ScheduleEval;

/// Lyapunov energy
/// `E_c(t) = (t^2 w + (alpha-1-c) t beta) gap
///           + |c (x - z) + t v + t beta grad|^2 / 2
///           + c (alpha-1-c) |x - z|^2 / 2`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn energy_from_parts(
    alpha: f64,
    s: &ScheduleEval,
    gap: f64,
    x: &[f64],
    v: &[f64],
    grad: &[f64],
    z: &[f64],
    c: f64,
) -> f64 {
    let t = s.t;
    let slack = alpha - 1.0 - c;
    let mut mixed = 0.0;
    let mut dist_sq = 0.0;
    for i in 0..x.len() {
        let e = x[i] - z[i];
        let m = c * e + t * v[i] + t * s.beta * grad[i];
        mixed += m * m;
        dist_sq += e * e;
    }
    (t * t * s.w + slack * t * s.beta) * gap + 0.5 * mixed + 0.5 * c * slack * dist_sq
}

/// `E_c(t)` at state `(x, v)` with `z` the catalog minimizer of the objective.
pub fn energy(cfg: &SystemConfig, t: f64, x: &[f64], v: &[f64], c: f64) -> Result<f64> {
    let alpha = cfg.schedule.alpha;
    if !(0.0..=alpha - 1.0).contains(&c) {
        return Err(Error::invalid("c", format!("must lie in [0, {}], got {c}", alpha - 1.0)));
    }
    let d = cfg.dimension();
    check_dim(d, x.len())?;
    check_dim(d, v.len())?;
    let s = cfg.schedule.eval(t)?;
    let m = cfg.objective.moreau(s.lambda, x)?;
    let gap = m.envelope_value - cfg.objective.optimal_value();
    Ok(energy_from_parts(
        alpha,
        &s,
        gap,
        x,
        v,
        &m.gradient,
        cfg.objective.minimizer(),
        c,
    ))
}

/// Energies `E_c(t_k)` along a trajectory, using the stored velocity and gradient.
pub fn energy_series(cfg: &SystemConfig, traj: &Trajectory, c: f64) -> Result<Vec<f64>> {
    let alpha = cfg.schedule.alpha;
    if !(0.0..=alpha - 1.0).contains(&c) {
        return Err(Error::invalid("c", format!("must lie in [0, {}], got {c}", alpha - 1.0)));
    }
    let z = cfg.objective.minimizer();
    traj.samples
        .iter()
        .map(|s| {
            let e = cfg.schedule.eval(s.t())?;
            Ok(energy_from_parts(
                alpha,
                &e,
                s.envelope_gap,
                &s.state.x,
                &s.state.v,
                &s.gradient,
                z,
                c,
            ))
        })
        .collect()
}

/// Largest relative energy increase between consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    pub max_uphill: f64,
    /// Time of the sample where the largest increase ends.
    pub worst_t: Option<f64>,
    pub pass: bool,
}

pub const UPHILL_TOLERANCE: f64 = 1e-6;

/// `max_k (E_c(t_{k+1}) - E_c(t_k)) / max(1, E_c(t_k))`, passing at `<= 1e-6`.
pub fn energy_monotonicity_report(
    cfg: &SystemConfig,
    traj: &Trajectory,
    c: f64,
) -> Result<MonotonicityReport> {
    let e = energy_series(cfg, traj, c)?;
    let mut max_uphill = 0.0;
    let mut worst_t = None;
    for (k, pair) in e.windows(2).enumerate() {
        let up = (pair[1] - pair[0]) / pair[0].max(1.0);
        if up > max_uphill || up.is_nan() {
            max_uphill = up;
            worst_t = Some(traj.samples[k + 1].t());
        }
    }
    Ok(MonotonicityReport {
        max_uphill,
        worst_t,
        pass: max_uphill <= UPHILL_TOLERANCE,
    })
}

/// Largest excess of the envelope gap over `E_{alpha-1}(t0) / (t^2 w(t))`
/// across the samples; non-positive when the bound holds everywhere.
pub fn envelope_bound_excess(cfg: &SystemConfig, traj: &Trajectory) -> Result<f64> {
    let e = energy_series(cfg, traj, cfg.schedule.alpha - 1.0)?;
    let Some(&e0) = e.first() else {
        return Ok(0.0);
    };
    let mut worst = f64::NEG_INFINITY;
    for s in &traj.samples {
        let w = cfg.schedule.eval(s.t())?.w;
        if !(w > 0.0) {
            return Err(Error::invalid("schedule", format!("w({}) = {w} is not positive", s.t())));
        }
        worst = worst.max(s.envelope_gap - e0 / (s.t() * s.t() * w));
    }
    Ok(worst)
}
