use serde::Serialize;

use crate::dynamics::{Quantity, Trajectory};
use crate::error::{Error, Result};

/// Values at or below this are treated as exact zeros and skipped.
pub const FIT_FLOOR: f64 = 1e-14;
pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares line through `(log t, log q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Fits `q(t) ~ C t^p` over samples with `t_lo <= t <= t_hi`.
pub fn fit_rate(traj: &Trajectory, quantity: Quantity, window: (f64, f64)) -> Result<RateFit> {
    let (t_lo, t_hi) = window;
    if !(t_lo < t_hi) {
        return Err(Error::invalid("window", format!("need t_lo < t_hi, got {window:?}")));
    }
    let points: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| s.t() >= t_lo && s.t() <= t_hi)
        .map(|s| (s.t(), quantity.of(s)))
        .filter(|&(_, q)| q > FIT_FLOOR)
        .map(|(t, q)| (t.ln(), q.ln()))
        .collect();
    fit_loglog(&points, window)
}

pub(crate) fn fit_loglog(points: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::invalid(
            "window",
            format!(
                "only {} usable samples in [{}, {}], need {MIN_FIT_SAMPLES}",
                points.len(),
                window.0,
                window.1
            ),
        ));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("window", "all samples share one time"));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        exponent,
        intercept,
        r_squared,
        window,
        samples: points.len(),
    })
}

/// Default fit window `[t_end/10, t_end]`.
pub fn default_window(traj: &Trajectory) -> Option<(f64, f64)> {
    traj.last().map(|s| (s.t() / 10.0, s.t()))
}
