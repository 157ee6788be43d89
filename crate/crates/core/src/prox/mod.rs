//! Separable convex objectives with proximal maps and Moreau envelopes.
//!
//! Every catalog member is separable, so the proximal map decomposes into
//! independent scalar problems. Closed forms are used where they exist;
//! [`ProxKind::NumericSeparable`] falls back to a bracketed Brent search.
//! The independent grid-search oracle in [`oracle`] exists to validate both.

mod brent;
pub mod oracle;

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};

/// Scalar convex function used by [`ProxKind::NumericSeparable`].
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Absolute tolerance of the numeric scalar prox search.
pub const PROX_TOL: f64 = 1e-10;

/// Slack allowed when checking inequalities that hold exactly in theory.
pub const INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Clone)]
pub enum ProxKind {
    /// `sum |x_i|`
    L1,
    /// `sum |x_i| + x_i^2 / 2`
    ElasticAbs,
    /// `sum q_i (x_i - c_i)^2 / 2` with `q_i >= 0`
    DiagQuadratic { weights: Vec<f64>, center: Vec<f64> },
    /// `sum phi(x_i)` for a caller-supplied convex `phi`.
    NumericSeparable {
        func: ScalarFn,
        bracket: (f64, f64),
        scalar_minimizer: f64,
    },
}

impl fmt::Debug for ProxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxKind::L1 => f.write_str("L1"),
            ProxKind::ElasticAbs => f.write_str("ElasticAbs"),
            ProxKind::DiagQuadratic { weights, center } => f
                .debug_struct("DiagQuadratic")
                .field("weights", weights)
                .field("center", center)
                .finish(),
            ProxKind::NumericSeparable {
                bracket,
                scalar_minimizer,
                ..
            } => f
                .debug_struct("NumericSeparable")
                .field("bracket", bracket)
                .field("scalar_minimizer", scalar_minimizer)
                .finish_non_exhaustive(),
        }
    }
}

impl PartialEq for ProxKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ProxKind::L1, ProxKind::L1) | (ProxKind::ElasticAbs, ProxKind::ElasticAbs) => true,
            (
                ProxKind::DiagQuadratic { weights, center },
                ProxKind::DiagQuadratic {
                    weights: w2,
                    center: c2,
                },
            ) => weights == w2 && center == c2,
            (
                ProxKind::NumericSeparable {
                    func,
                    bracket,
                    scalar_minimizer,
                },
                ProxKind::NumericSeparable {
                    func: f2,
                    bracket: b2,
                    scalar_minimizer: s2,
                },
            ) => Arc::ptr_eq(func, f2) && bracket == b2 && scalar_minimizer == s2,
            _ => false,
        }
    }
}

/// A proper convex objective with a known minimizer and optimal value.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxFunction {
    kind: ProxKind,
    dimension: usize,
    optimal_value: f64,
    minimizer: Vec<f64>,
}

/// Moreau envelope of parameter `lambda` evaluated at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct MoreauEval {
    pub envelope_value: f64,
    pub prox_point: Vec<f64>,
    pub gradient: Vec<f64>,
    pub lambda: f64,
}

fn check_dimension_positive(dimension: usize) -> Result<()> {
    if dimension == 0 {
        return Err(Error::invalid("dimension", "must be positive"));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(
            "lambda",
            format!("must be positive and finite, got {lambda}"),
        ));
    }
    Ok(())
}

#[inline]
fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

impl ProxFunction {
    pub fn l1(dimension: usize) -> Result<Self> {
        check_dimension_positive(dimension)?;
        Ok(Self {
            kind: ProxKind::L1,
            dimension,
            optimal_value: 0.0,
            minimizer: vec![0.0; dimension],
        })
    }

    pub fn elastic_abs(dimension: usize) -> Result<Self> {
        check_dimension_positive(dimension)?;
        Ok(Self {
            kind: ProxKind::ElasticAbs,
            dimension,
            optimal_value: 0.0,
            minimizer: vec![0.0; dimension],
        })
    }

    pub fn diag_quadratic(weights: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        check_dimension_positive(weights.len())?;
        check_dim(weights.len(), center.len())?;
        if let Some(q) = weights.iter().find(|q| !(**q >= 0.0 && q.is_finite())) {
            return Err(Error::invalid(
                "weights",
                format!("must be finite and non-negative, got {q}"),
            ));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("center", "must be finite"));
        }
        let dimension = weights.len();
        Ok(Self {
            minimizer: center.clone(),
            kind: ProxKind::DiagQuadratic { weights, center },
            dimension,
            optimal_value: 0.0,
        })
    }

    /// Separable objective `sum phi(x_i)`.
    ///
    /// Convexity of `phi` is the caller's promise; only a midpoint check on
    /// the bracket is performed. `scalar_minimizer` must minimize `phi` and lie
    /// strictly inside `bracket`.
    pub fn numeric_separable(
        dimension: usize,
        func: ScalarFn,
        bracket: (f64, f64),
        scalar_minimizer: f64,
    ) -> Result<Self> {
        check_dimension_positive(dimension)?;
        let (lo, hi) = bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid("bracket", format!("invalid interval [{lo}, {hi}]")));
        }
        if !(lo < scalar_minimizer && scalar_minimizer < hi) {
            return Err(Error::invalid(
                "scalar_minimizer",
                format!("{scalar_minimizer} is not inside [{lo}, {hi}]"),
            ));
        }
        let (f_lo, f_mid, f_hi) = (func(lo), func(0.5 * (lo + hi)), func(hi));
        let f_star = func(scalar_minimizer);
        if !f_star.is_finite() {
            return Err(Error::invalid("func", "non-finite value at the minimizer"));
        }
        if f_mid > 0.5 * (f_lo + f_hi) + 1e-12 * (1.0 + f_lo.abs() + f_hi.abs()) {
            return Err(Error::invalid("func", "midpoint convexity check failed"));
        }
        if f_star > f_lo.min(f_mid).min(f_hi) + 1e-12 * (1.0 + f_star.abs()) {
            return Err(Error::invalid(
                "scalar_minimizer",
                "a bracket point has a lower value",
            ));
        }
        Ok(Self {
            kind: ProxKind::NumericSeparable {
                func,
                bracket,
                scalar_minimizer,
            },
            dimension,
            optimal_value: dimension as f64 * f_star,
            minimizer: vec![scalar_minimizer; dimension],
        })
    }

    pub fn kind(&self) -> &ProxKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Optimal value `Phi*`.
    pub fn optimal_value(&self) -> f64 {
        self.optimal_value
    }

    /// One element of `argmin Phi`.
    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    /// Scalar summand of coordinate `i`.
    pub(crate) fn scalar_value(&self, i: usize, v: f64) -> f64 {
        match &self.kind {
            ProxKind::L1 => v.abs(),
            ProxKind::ElasticAbs => v.abs() + 0.5 * v * v,
            ProxKind::DiagQuadratic { weights, center } => {
                let d = v - center[i];
                0.5 * weights[i] * d * d
            }
            ProxKind::NumericSeparable { func, .. } => {
                let f = func(v);
                if f.is_nan() {
                    f64::INFINITY
                } else {
                    f
                }
            }
        }
    }

    /// `Phi(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dimension, x.len())?;
        Ok(x
            .iter()
            .enumerate()
            .map(|(i, &v)| self.scalar_value(i, v))
            .sum())
    }

    /// `prox_{lambda Phi}(x)`.
    pub fn prox(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dimension];
        self.prox_into(lambda, x, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`ProxFunction::prox`].
    pub fn prox_into(&self, lambda: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_lambda(lambda)?;
        check_dim(self.dimension, x.len())?;
        check_dim(self.dimension, out.len())?;
        match &self.kind {
            ProxKind::L1 => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = soft_threshold(v, lambda);
                }
            }
            ProxKind::ElasticAbs => {
                let shrink = 1.0 / (1.0 + lambda);
                for (o, &v) in out.iter_mut().zip(x) {
                    *o = soft_threshold(v, lambda) * shrink;
                }
            }
            ProxKind::DiagQuadratic { weights, center } => {
                for i in 0..self.dimension {
                    let lq = lambda * weights[i];
                    out[i] = (x[i] + lq * center[i]) / (1.0 + lq);
                }
            }
            ProxKind::NumericSeparable { func, bracket, .. } => {
                let (lo, hi) = *bracket;
                for (i, (o, &v)) in out.iter_mut().zip(x).enumerate() {
                    let objective = |y: f64| {
                        let f = func(y);
                        let f = if f.is_nan() { f64::INFINITY } else { f };
                        f + (v - y) * (v - y) / (2.0 * lambda)
                    };
                    let p = brent::minimize(objective, lo, hi, PROX_TOL);
                    let edge = 4.0 * PROX_TOL + 1e-12 * (hi - lo);
                    if p - lo < edge || hi - p < edge {
                        return Err(Error::SearchFailure {
                            coordinate: i,
                            lo,
                            hi,
                        });
                    }
                    *o = p;
                }
            }
        }
        Ok(())
    }

    /// Writes the prox point and `grad Phi_lambda(x)` into the buffers and
    /// returns the envelope value `Phi_lambda(x)`.
    pub fn moreau_into(
        &self,
        lambda: f64,
        x: &[f64],
        prox_out: &mut [f64],
        grad_out: &mut [f64],
    ) -> Result<f64> {
        self.prox_into(lambda, x, prox_out)?;
        check_dim(self.dimension, grad_out.len())?;
        let mut value = 0.0;
        let mut dist_sq = 0.0;
        for i in 0..self.dimension {
            let d = x[i] - prox_out[i];
            grad_out[i] = d / lambda;
            dist_sq += d * d;
            value += self.scalar_value(i, prox_out[i]);
        }
        Ok(value + dist_sq / (2.0 * lambda))
    }

    /// Moreau envelope value, prox point and gradient at `x`.
    ///
    /// The gradient is `(x - prox)/lambda`, never a finite difference.
    pub fn moreau(&self, lambda: f64, x: &[f64]) -> Result<MoreauEval> {
        let mut prox_point = vec![0.0; self.dimension];
        let mut gradient = vec![0.0; self.dimension];
        let envelope_value = self.moreau_into(lambda, x, &mut prox_point, &mut gradient)?;
        Ok(MoreauEval {
            envelope_value,
            prox_point,
            gradient,
            lambda,
        })
    }

    /// `|lambda - mu| * |grad Phi_lambda(x)| - |prox_lambda(x) - prox_mu(x)|`,
    /// non-negative up to [`INEQUALITY_SLACK`].
    pub fn prox_comparison_residual(&self, lambda: f64, mu: f64, x: &[f64]) -> Result<f64> {
        check_lambda(mu)?;
        let at_lambda = self.moreau(lambda, x)?;
        let prox_mu = self.prox(mu, x)?;
        let grad_norm = norm(&at_lambda.gradient);
        let gap = at_lambda
            .prox_point
            .iter()
            .zip(&prox_mu)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        Ok((lambda - mu).abs() * grad_norm - gap)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
