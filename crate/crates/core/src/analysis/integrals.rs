use std::fmt;

use serde::Serialize;

use crate::dynamics::{SystemConfig, Trajectory};
use crate::error::Result;

/// The integrals whose finiteness the energy estimates guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Integral {
    /// `(t^2 w lambda'/2 + t^2 beta w) |grad|^2`
    GradWeighted,
    /// `((alpha-3) t w - t^2 w') gap`
    GapWeighted,
    /// `t |x'|^2`
    Kinetic,
    /// `t b gap`
    ScaledGap,
    /// `t w <grad, x - z>`
    Monotone,
}

impl Integral {
    pub const ALL: [Integral; 5] = [
        Integral::GradWeighted,
        Integral::GapWeighted,
        Integral::Kinetic,
        Integral::ScaledGap,
        Integral::Monotone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Integral::GradWeighted => "grad_weighted",
            Integral::GapWeighted => "gap_weighted",
            Integral::Kinetic => "kinetic",
            Integral::ScaledGap => "scaled_gap",
            Integral::Monotone => "monotone",
        }
    }
}

impl fmt::Display for Integral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cumulative trapezoid integrals at every sample time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralTable {
    pub times: Vec<f64>,
    /// Indexed like [`Integral::ALL`].
    pub cumulative: [Vec<f64>; 5],
}

impl IntegralTable {
    pub fn series(&self, which: Integral) -> &[f64] {
        &self.cumulative[which as usize]
    }

    pub fn total(&self, which: Integral) -> f64 {
        self.series(which).last().copied().unwrap_or(0.0)
    }

    /// Share of the total accumulated on `[t_end/10, t_end]`; zero when the
    /// total vanishes.
    pub fn last_decade_share(&self, which: Integral) -> f64 {
        let Some(&t_end) = self.times.last() else {
            return 0.0;
        };
        let series = self.series(which);
        let total = self.total(which);
        if total == 0.0 {
            return 0.0;
        }
        let k = self.times.partition_point(|&t| t < t_end / 10.0);
        let start = if k == 0 {
            0.0
        } else {
            // Linear interpolation between the bracketing samples.
            let (ta, tb) = (self.times[k - 1], self.times[k.min(self.times.len() - 1)]);
            let (va, vb) = (series[k - 1], series[k.min(series.len() - 1)]);
            if tb > ta {
                va + (vb - va) * (t_end / 10.0 - ta) / (tb - ta)
            } else {
                va
            }
        };
        (total - start) / total.abs()
    }
}

/// Accumulates the five integrands along `traj` by the trapezoid rule.
pub fn accumulate_theorem2_integrals(cfg: &SystemConfig, traj: &Trajectory) -> Result<IntegralTable> {
    let alpha = cfg.schedule.alpha;
    let z = cfg.objective.minimizer();
    let mut integrands: [Vec<f64>; 5] = Default::default();
    for s in &traj.samples {
        let t = s.t();
        let e = cfg.schedule.eval(t)?;
        let g2 = s.grad_norm * s.grad_norm;
        let inner: f64 = s
            .gradient
            .iter()
            .zip(&s.state.x)
            .zip(z)
            .map(|((g, x), zi)| g * (x - zi))
            .sum();
        let values = [
            (t * t * e.w * e.dlambda / 2.0 + t * t * e.beta * e.w) * g2,
            ((alpha - 3.0) * t * e.w - t * t * e.dw) * s.envelope_gap,
            t * s.velocity_norm * s.velocity_norm,
            t * e.b * s.envelope_gap,
            t * e.w * inner,
        ];
        for (series, v) in integrands.iter_mut().zip(values) {
            series.push(v);
        }
    }
    let times: Vec<f64> = traj.times().collect();
    let cumulative = integrands.map(|f| {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(f.len());
        for k in 0..f.len() {
            if k > 0 {
                acc += 0.5 * (f[k] + f[k - 1]) * (times[k] - times[k - 1]);
            }
            out.push(acc);
        }
        out
    });
    Ok(IntegralTable { times, cumulative })
}
