use serde::Serialize;

/// Instantaneous phase `(t, x(t), x'(t))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// One output sample with every monitored quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub state: State,
    /// `grad Phi_{lambda(t)}(x(t))`
    pub gradient: Vec<f64>,
    /// `Phi_{lambda(t)}(x(t)) - Phi*`
    pub envelope_gap: f64,
    pub grad_norm: f64,
    /// `|prox_{lambda(t) Phi}(x(t)) - x(t)|`
    pub prox_dist: f64,
    /// `Phi(prox_{lambda(t) Phi}(x(t))) - Phi*`
    pub prox_gap: f64,
    pub velocity_norm: f64,
    /// `E_{alpha-1}(t)`
    pub energy: f64,
    pub dist_to_minimizer: f64,
    /// `t^2 b(t) (Phi_{lambda(t)}(x(t)) - Phi*)`
    pub t2b_gap: f64,
}

impl Sample {
    pub fn t(&self) -> f64 {
        self.state.t
    }
}

/// Quantities that can be read off a trajectory sample by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    EnvelopeGap,
    ProxGap,
    GradNorm,
    ProxDist,
    VelocityNorm,
    DistToMinimizer,
    Energy,
    T2bGap,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::EnvelopeGap,
        Quantity::ProxGap,
        Quantity::GradNorm,
        Quantity::ProxDist,
        Quantity::VelocityNorm,
        Quantity::DistToMinimizer,
        Quantity::Energy,
        Quantity::T2bGap,
    ];

    pub fn of(self, s: &Sample) -> f64 {
        match self {
            Quantity::EnvelopeGap => s.envelope_gap,
            Quantity::ProxGap => s.prox_gap,
            Quantity::GradNorm => s.grad_norm,
            Quantity::ProxDist => s.prox_dist,
            Quantity::VelocityNorm => s.velocity_norm,
            Quantity::DistToMinimizer => s.dist_to_minimizer,
            Quantity::Energy => s.energy,
            Quantity::T2bGap => s.t2b_gap,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::EnvelopeGap => "envelope_gap",
            Quantity::ProxGap => "prox_gap",
            Quantity::GradNorm => "grad_norm",
            Quantity::ProxDist => "prox_dist",
            Quantity::VelocityNorm => "velocity_norm",
            Quantity::DistToMinimizer => "dist_to_minimizer",
            Quantity::Energy => "energy_c_alpha_minus_1",
            Quantity::T2bGap => "t2b_times_gap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == name)
    }
}

/// Time-ordered samples of one integration run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Accepted plus rejected integrator steps.
    pub steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(Sample::t)
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Sample whose time is closest to `t`.
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        if self.samples.is_empty() {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.t() < t);
        let candidates = [idx.checked_sub(1), Some(idx).filter(|&i| i < self.samples.len())];
        candidates
            .into_iter()
            .flatten()
            .min_by(|&a, &b| {
                let da = (self.samples[a].t() - t).abs();
                let db = (self.samples[b].t() - t).abs();
                da.total_cmp(&db)
            })
    }

    pub fn nearest(&self, t: f64) -> Option<&Sample> {
        self.nearest_index(t).map(|i| &self.samples[i])
    }

    pub fn series(&self, q: Quantity) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t(), q.of(s))).collect()
    }
}
