//! Monomial parameter functions `lambda(t) = lambda0 t^l`, `beta(t) = beta0 t^m`
//! and `b(t) = b0 t^n`, together with the auxiliary function
//! `w(t) = b(t) - beta'(t) - beta(t)/t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSchedule {
    pub alpha: f64,
    pub t0: f64,
    pub lambda0: f64,
    pub l: f64,
    pub beta0: f64,
    pub m: f64,
    pub b0: f64,
    pub n: f64,
}

/// Parameter values and derivatives at a single time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleEval {
    pub t: f64,
    pub lambda: f64,
    pub dlambda: f64,
    pub beta: f64,
    pub dbeta: f64,
    pub ddbeta: f64,
    pub b: f64,
    pub db: f64,
    pub w: f64,
    pub dw: f64,
}

impl PolynomialSchedule {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        t0: f64,
        lambda0: f64,
        l: f64,
        beta0: f64,
        m: f64,
        b0: f64,
        n: f64,
    ) -> Result<Self> {
        let s = Self {
            alpha,
            t0,
            lambda0,
            l,
            beta0,
            m,
            b0,
            n,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("alpha", self.alpha),
            ("t0", self.t0),
            ("lambda0", self.lambda0),
            ("l", self.l),
            ("beta0", self.beta0),
            ("m", self.m),
            ("b0", self.b0),
            ("n", self.n),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.alpha <= 1.0 {
            return Err(Error::invalid("alpha", format!("must exceed 1, got {}", self.alpha)));
        }
        if self.t0 <= 0.0 {
            return Err(Error::invalid("t0", format!("must be positive, got {}", self.t0)));
        }
        if self.lambda0 <= 0.0 {
            return Err(Error::invalid(
                "lambda0",
                format!("must be positive, got {}", self.lambda0),
            ));
        }
        if self.b0 <= 0.0 {
            return Err(Error::invalid("b0", format!("must be positive, got {}", self.b0)));
        }
        if self.beta0 < 0.0 {
            return Err(Error::invalid(
                "beta0",
                format!("must be non-negative, got {}", self.beta0),
            ));
        }
        Ok(())
    }

    /// `beta` vanishes identically.
    pub fn beta_is_zero(&self) -> bool {
        self.beta0 == 0.0
    }

    pub fn eval(&self, t: f64) -> Result<ScheduleEval> {
        if !(t >= self.t0) {
            return Err(Error::invalid(
                "t",
                format!("schedule evaluated at t = {t} before t0 = {}", self.t0),
            ));
        }
        Ok(self.eval_unchecked(t))
    }

    /// Same as [`PolynomialSchedule::eval`] without the `t >= t0` check; used
    /// on the integrator hot path where `t` is known to be in range.
    #[inline]
    pub(crate) fn eval_unchecked(&self, t: f64) -> ScheduleEval {
        let inv_t = 1.0 / t;
        let lambda = self.lambda0 * monomial(t, self.l);
        let dlambda = self.l * lambda * inv_t;
        let b = self.b0 * monomial(t, self.n);
        let db = self.n * b * inv_t;
        let (beta, dbeta, ddbeta) = if self.beta0 == 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            let beta = self.beta0 * monomial(t, self.m);
            let dbeta = self.m * beta * inv_t;
            let ddbeta = (self.m - 1.0) * dbeta * inv_t;
            (beta, dbeta, ddbeta)
        };
        let w = b - dbeta - beta * inv_t;
        let dw = db - ddbeta - dbeta * inv_t + beta * inv_t * inv_t;
        ScheduleEval {
            t,
            lambda,
            dlambda,
            beta,
            dbeta,
            ddbeta,
            b,
            db,
            w,
            dw,
        }
    }
}

/// `t^e`, avoiding `powf` for the common small integer exponents.
#[inline]
fn monomial(t: f64, e: f64) -> f64 {
    if e == e.trunc() && e.abs() <= 16.0 {
        t.powi(e as i32)
    } else {
        t.powf(e)
    }
}

/// Time-scaling coefficient used by the numerical experiments:
/// `(m+1)(alpha-m-2) beta0 / ((alpha-3-n) t0^(n-m+1)) + 1`, replaced by `1`
/// when that is not positive.
pub fn default_b0(alpha: f64, m: f64, n: f64, beta0: f64, t0: f64) -> Result<f64> {
    let denom = alpha - 3.0 - n;
    if denom == 0.0 {
        return Err(Error::invalid("n", "alpha - 3 - n must be non-zero"));
    }
    if !(t0 > 0.0) {
        return Err(Error::invalid("t0", format!("must be positive, got {t0}")));
    }
    let b = (m + 1.0) * (alpha - m - 2.0) * beta0 / (denom * t0.powf(n - m + 1.0)) + 1.0;
    if !b.is_finite() {
        return Err(Error::invalid("b0", "coefficient rule produced a non-finite value"));
    }
    Ok(if b > 0.0 { b } else { 1.0 })
}
