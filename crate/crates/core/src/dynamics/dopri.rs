//! Dormand–Prince 5(4) embedded pair with PI step control, Hairer's
//! order-4 continuous extension and stability-limit (stiffness) detection.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;
const STABILITY_BOUNDARY: f64 = 3.25;

/// Outcome of one trial step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Trial {
    Accepted { h_next: f64 },
    Rejected { h_next: f64 },
    NonFinite,
}

pub(crate) struct Dopri5 {
    rtol: f64,
    atol: f64,
    pub(crate) t: f64,
    pub(crate) y: Vec<f64>,
    k: [Vec<f64>; 7],
    y_new: Vec<f64>,
    y_stage: Vec<f64>,
    y_stiff: Vec<f64>,
    h_last: f64,
    fac_old: f64,
    rejected_last: bool,
    /// Counters for the stiffness heuristic: consecutive stability-limited
    /// and non-limited accepted steps.
    stiff_count: u32,
    nonstiff_count: u32,
    pub(crate) stability_limited: bool,
    dense: [Vec<f64>; 5],
    dense_ready: bool,
}

impl Dopri5 {
    /// `f0` must hold `f(t, y)`.
    pub(crate) fn new(t: f64, y: Vec<f64>, f0: Vec<f64>, rtol: f64, atol: f64) -> Self {
        let n = y.len();
        let z = || vec![0.0; n];
        Self {
            rtol,
            atol,
            t,
            y,
            k: [f0, z(), z(), z(), z(), z(), z()],
            y_new: z(),
            y_stage: z(),
            y_stiff: z(),
            h_last: 0.0,
            fac_old: 1e-4,
            rejected_last: false,
            stiff_count: 0,
            nonstiff_count: 0,
            stability_limited: false,
            dense: [z(), z(), z(), z(), z()],
            dense_ready: false,
        }
    }

    fn norm(&self, v: &[f64], reference: &[f64]) -> f64 {
        let n = v.len() as f64;
        (v.iter()
            .zip(reference)
            .map(|(a, r)| {
                let s = a / (self.atol + self.rtol * r.abs());
                s * s
            })
            .sum::<f64>()
            / n)
            .sqrt()
    }

    /// Initial step size guess (Hairer–Nørsett–Wanner, II.4).
    pub(crate) fn initial_step<F, E>(&mut self, f: &mut F, h_max: f64) -> Result<f64, E>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
    {
        let d0 = self.norm(&self.y, &self.y);
        let d1 = self.norm(&self.k[0], &self.y);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(h_max);
        for i in 0..self.y.len() {
            self.y_stage[i] = self.y[i] + h0 * self.k[0][i];
        }
        f(self.t + h0, &self.y_stage, &mut self.k[1])?;
        let diff: Vec<f64> = self.k[1]
            .iter()
            .zip(&self.k[0])
            .map(|(a, b)| a - b)
            .collect();
        let d2 = self.norm(&diff, &self.y) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dmax).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(h_max))
    }

    /// Attempts a step of size `h` from the current state. On acceptance the
    /// state advances and the dense output for `[t_old, t]` becomes available.
    pub(crate) fn step<F, E>(&mut self, f: &mut F, h: f64) -> Result<Trial, E>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
    {
        let n = self.y.len();
        let t = self.t;
        let y = &self.y;
        let ys = &mut self.y_stage;
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;

        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, ys, k2)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, ys, k3)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, ys, k4)?;
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, ys, k5)?;
        for i in 0..n {
            self.y_stiff[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = t + h;
        f(t_new, &self.y_stiff, k6)?;
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &self.y_new, k7)?;

        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = self.atol + self.rtol * y[i].abs().max(self.y_new[i].abs());
            let r = e / sk;
            err_sq += r * r;
            finite &= self.y_new[i].is_finite() && k7[i].is_finite();
        }
        if !finite || !err_sq.is_finite() {
            self.rejected_last = true;
            return Ok(Trial::NonFinite);
        }
        let err = (err_sq / n as f64).sqrt();

        let expo = 0.2 - PI_BETA * 0.75;
        let fac11 = err.powf(expo);
        if err <= 1.0 {
            let fac = (fac11 / self.fac_old.powf(PI_BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_next = h / fac;
            if self.rejected_last {
                h_next = h_next.min(h);
            }
            self.fac_old = err.max(1e-4);
            self.rejected_last = false;
            self.detect_stiffness(h);
            self.prepare_dense(h);
            self.h_last = h;
            self.t = t_new;
            std::mem::swap(&mut self.y, &mut self.y_new);
            self.k.swap(0, 6);
            Ok(Trial::Accepted { h_next })
        } else {
            self.rejected_last = true;
            let h_next = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            Ok(Trial::Rejected { h_next })
        }
    }

    fn detect_stiffness(&mut self, h: f64) {
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.y.len() {
            let dk = self.k[6][i] - self.k[5][i];
            let dy = self.y_new[i] - self.y_stiff[i];
            num += dk * dk;
            den += dy * dy;
        }
        if den > 0.0 && h * (num / den).sqrt() > STABILITY_BOUNDARY {
            self.nonstiff_count = 0;
            self.stiff_count += 1;
            if self.stiff_count >= 15 {
                self.stability_limited = true;
            }
        } else {
            self.nonstiff_count += 1;
            if self.nonstiff_count >= 6 {
                self.stiff_count = 0;
                self.stability_limited = false;
            }
        }
    }

    /// Called before the state swap: `y` is the old state and `y_new` the new.
    fn prepare_dense(&mut self, h: f64) {
        let [k1, _k2, k3, k4, k5, k6, k7] = &self.k;
        let [r1, r2, r3, r4, r5] = &mut self.dense;
        for i in 0..self.y.len() {
            let ydiff = self.y_new[i] - self.y[i];
            let bspl = h * k1[i] - ydiff;
            r1[i] = self.y[i];
            r2[i] = ydiff;
            r3[i] = bspl;
            r4[i] = ydiff - h * k7[i] - bspl;
            r5[i] = h
                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        self.dense_ready = true;
    }

    /// Dense output at `t_old + theta * h` for the last accepted step.
    pub(crate) fn interpolate(&self, t_eval: f64, out: &mut [f64]) {
        debug_assert!(self.dense_ready);
        let h = self.h_last;
        let theta = ((t_eval - (self.t - h)) / h).clamp(0.0, 1.0);
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.dense;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}
