//! Feasibility of the parameter conditions (I)–(VII):
//!
//! * (I)   `alpha > 1` and `(alpha-3) w - t w' >= eps b` for some `eps in (0, alpha-1)`
//! * (II)  `beta` and `lambda` nondecreasing
//! * (III) `b > beta' + beta/t`, i.e. `w > 0`
//! * (IV)  `int [beta^2 lambda'^2 t^3 / lambda^4 - lambda' t^2 b / (2 lambda^2)]_+ dt < inf`
//! * (V)   `d/dt (t^2 b) <= C t b` for some `C > 0`
//! * (VI)  `sup beta / (t w) < inf`
//! * (VII) `sup lambda / t < inf`

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::PolynomialSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::I,
        Condition::II,
        Condition::III,
        Condition::IV,
        Condition::V,
        Condition::VI,
        Condition::VII,
    ];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Setting {
    /// `beta = 0`
    Setting1,
    /// `beta > 0`
    Setting2,
    NotPolynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub witness: String,
}

impl Outcome {
    fn pass(witness: impl Into<String>) -> Self {
        Self {
            pass: true,
            witness: witness.into(),
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        Self {
            pass: false,
            witness: witness.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub per_condition: BTreeMap<Condition, Outcome>,
    pub epsilon_witness: Option<f64>,
    pub overall: bool,
    pub setting: Setting,
}

impl ConditionReport {
    fn new(setting: Setting, outcomes: [Outcome; 7], epsilon: Option<f64>) -> Self {
        let per_condition: BTreeMap<_, _> = Condition::ALL.into_iter().zip(outcomes).collect();
        let overall = per_condition.values().all(|o| o.pass);
        let epsilon_witness = epsilon.filter(|_| per_condition[&Condition::I].pass);
        Self {
            per_condition,
            epsilon_witness,
            overall,
            setting,
        }
    }

    pub fn get(&self, c: Condition) -> &Outcome {
        &self.per_condition[&c]
    }

    pub fn failed(&self) -> impl Iterator<Item = (Condition, &Outcome)> + '_ {
        self.per_condition
            .iter()
            .filter(|(_, o)| !o.pass)
            .map(|(c, o)| (*c, o))
    }

    /// Whether any failing condition's witness mentions `needle`.
    pub fn names_violation(&self, needle: &str) -> bool {
        self.failed().any(|(_, o)| o.witness.contains(needle))
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "setting: {:?}", self.setting)?;
        for (c, o) in &self.per_condition {
            let verdict = if o.pass { "pass" } else { "FAIL" };
            writeln!(f, "  {:<6}{verdict:<6}{}", format!("({c})"), o.witness)?;
        }
        match self.epsilon_witness {
            Some(eps) => writeln!(f, "epsilon: {eps}")?,
            None => writeln!(f, "epsilon: none")?,
        }
        write!(f, "overall: {}", if self.overall { "pass" } else { "FAIL" })
    }
}

/// Closed-form verdicts for `lambda = lambda0 t^l`, `beta = beta0 t^m`,
/// `b = b0 t^n`.
pub fn check_conditions_polynomial(s: &PolynomialSchedule) -> ConditionReport {
    let PolynomialSchedule {
        alpha,
        t0,
        lambda0,
        l,
        beta0,
        m,
        b0,
        n,
    } = *s;
    let has_beta = beta0 > 0.0;
    let setting = if has_beta {
        Setting::Setting2
    } else {
        Setting::Setting1
    };

    let cond_ii = {
        let mut bad = Vec::new();
        if l < 0.0 {
            bad.push(format!("l ≥ 0 violated (l = {l})"));
        }
        if has_beta && m < 0.0 {
            bad.push(format!("m ≥ 0 violated (m = {m})"));
        }
        if bad.is_empty() {
            Outcome::pass("lambda and beta nondecreasing")
        } else {
            Outcome::fail(bad.join("; "))
        }
    };

    let cond_vii = if l <= 1.0 {
        Outcome::pass(format!("sup lambda/t < inf (l = {l} ≤ 1)"))
    } else {
        Outcome::fail(format!("l ≤ 1 violated (l = {l})"))
    };

    let cond_v = Outcome::pass(format!("C = {}", if n + 2.0 > 0.0 { n + 2.0 } else { 1.0 }));

    // w(t) = b0 t^n - (m+1) beta0 t^(m-1) > 0  <=>  b0 t^p > (m+1) beta0, p = n-m+1
    let p = n - m + 1.0;
    let mb = (m + 1.0) * beta0;
    let cond_iii = if !has_beta || mb <= 0.0 {
        Outcome::pass("w = b - beta' - beta/t > 0")
    } else if p < 0.0 {
        Outcome::fail(format!("m ≤ n+1 violated ({m} > {})", n + 1.0))
    } else if b0 * t0.powf(p) > mb {
        Outcome::pass(format!("m ≤ n+1 and b > (m+1)β t0^(m-1-n) = {}", mb / t0.powf(p)))
    } else {
        Outcome::fail(format!(
            "b > (m+1)β t0^(m-1-n) violated at t = {t0} ({b0} ≤ {})",
            mb / t0.powf(p)
        ))
    };

    let cond_vi = if !cond_iii.pass {
        Outcome::fail("requires w > 0, see (III)")
    } else if has_beta && mb == 0.0 && p < 0.0 {
        Outcome::fail("β/(t w) = β t^(m-n-1)/b is unbounded")
    } else {
        Outcome::pass("sup β/(t w) < inf")
    };

    let cond_iv = polynomial_iv(lambda0, l, beta0, m, b0, n);

    // (I): (a - eps) b0 t^p >= K on [t0, inf), a = alpha-3-n,
    // K = beta0 (m+1)(alpha-m-2).
    let a = alpha - 3.0 - n;
    let k = beta0 * (m + 1.0) * (alpha - m - 2.0);
    let eps_sup = if p > 0.0 {
        Some(a - k.max(0.0) / (b0 * t0.powf(p)))
    } else if p == 0.0 {
        Some(a - k / b0)
    } else if k <= 0.0 {
        Some(a - k / (b0 * t0.powf(p)))
    } else {
        None
    };
    let (cond_i, epsilon) = if alpha <= 1.0 {
        (Outcome::fail(format!("α > 1 violated (α = {alpha})")), None)
    } else if a <= 0.0 {
        (
            Outcome::fail(format!("α−3 > n violated ({} > {n} is false)", alpha - 3.0)),
            None,
        )
    } else {
        match eps_sup {
            Some(sup) if sup > 0.0 => {
                let half = 0.5 * a;
                let eps = if half <= sup && half < alpha - 1.0 {
                    half
                } else {
                    0.5 * sup.min(alpha - 1.0)
                };
                (Outcome::pass(format!("ε = {eps} (admissible up to {sup})")), Some(eps))
            }
            Some(_) => (
                Outcome::fail(format!(
                    "b > (m+1)(α−m−2)β/((α−3−n) t0^(n−m+1)) violated (b = {b0}, bound {})",
                    k / (a * t0.powf(p))
                )),
                None,
            ),
            None => (
                Outcome::fail(format!(
                    "m ≤ n+1 violated ({m} > {}) with (m+1)(α−m−2)β > 0",
                    n + 1.0
                )),
                None,
            ),
        }
    };

    ConditionReport::new(
        setting,
        [cond_i, cond_ii, cond_iii, cond_iv, cond_v, cond_vi, cond_vii],
        epsilon,
    )
}

/// `int [A t^p1 - B t^q]_+ dt` with `A = (beta l / lambda)^2`,
/// `B = l b / (2 lambda)`, `p1 = 2m - 2l + 1`, `q = n - l + 1`.
fn polynomial_iv(lambda0: f64, l: f64, beta0: f64, m: f64, b0: f64, n: f64) -> Outcome {
    let a = (beta0 * l / lambda0).powi(2);
    let b = l * b0 / (2.0 * lambda0);
    let p1 = 2.0 * m - 2.0 * l + 1.0;
    let q = n - l + 1.0;
    let integrable = |e: f64| e < -1.0;
    if a == 0.0 {
        return if b >= 0.0 || integrable(q) {
            Outcome::pass("integrand vanishes or decays")
        } else {
            Outcome::fail(format!("l ≥ 0 violated: integrand ~ t^{q} is not integrable"))
        };
    }
    if b <= 0.0 {
        return if integrable(p1) && (b == 0.0 || integrable(q)) {
            Outcome::pass("integrand decays fast enough")
        } else {
            Outcome::fail(format!("integrand ~ t^{} is not integrable", p1.max(q)))
        };
    }
    if q > p1 {
        Outcome::pass(format!("2m < n+l ({} < {})", 2.0 * m, n + l))
    } else if q < p1 {
        if integrable(p1) {
            Outcome::pass(format!("integrand ~ t^{p1} is integrable"))
        } else {
            Outcome::fail(format!("2m < n+l violated ({} > {})", 2.0 * m, n + l))
        }
    } else if a <= b || integrable(p1) {
        Outcome::pass(format!("2m = n+l and b ≥ 2lβ²/λ ({b0} ≥ {})", 2.0 * l * beta0 * beta0 / lambda0))
    } else {
        Outcome::fail(format!(
            "2m = n+l but b ≥ 2lβ²/λ violated ({b0} < {})",
            2.0 * l * beta0 * beta0 / lambda0
        ))
    }
}

/// Parameter functions with derivatives, for schedules outside the
/// monomial family.
pub struct ScheduleFns<'a> {
    /// `t -> (lambda, lambda')`
    pub lambda: &'a dyn Fn(f64) -> (f64, f64),
    /// `t -> (beta, beta', beta'')`
    pub beta: &'a dyn Fn(f64) -> (f64, f64, f64),
    /// `t -> (b, b')`
    pub b: &'a dyn Fn(f64) -> (f64, f64),
}

/// Relative slack when comparing a late supremum with an early one.
const SUP_SLACK: f64 = 1e-2;
const TAIL_SHARE: f64 = 1e-2;

struct GridPoint {
    t: f64,
    lambda: f64,
    dlambda: f64,
    beta: f64,
    dbeta: f64,
    b: f64,
    db: f64,
    w: f64,
    dw: f64,
}

/// Evidence-only check of (I)–(VII) on a log grid over `[t0, t_max]`.
/// Integrability and boundedness are judged by how much the last decade
/// contributes, so a pass is necessary evidence rather than proof.
pub fn check_conditions_grid(
    alpha: f64,
    fns: &ScheduleFns<'_>,
    t0: f64,
    t_max: f64,
    grid: usize,
) -> Result<ConditionReport> {
    if grid < 100 {
        return Err(Error::invalid("grid", format!("need at least 100 points, got {grid}")));
    }
    if !(t0 > 0.0 && t_max > t0 && t_max.is_finite()) {
        return Err(Error::invalid("t_max", format!("need 0 < t0 < t_max, got [{t0}, {t_max}]")));
    }
    let ratio = (t_max / t0).ln();
    let mut pts = Vec::with_capacity(grid);
    for k in 0..grid {
        let t = if k + 1 == grid {
            t_max
        } else {
            t0 * (ratio * k as f64 / (grid - 1) as f64).exp()
        };
        let (lambda, dlambda) = (fns.lambda)(t);
        let (beta, dbeta, ddbeta) = (fns.beta)(t);
        let (b, db) = (fns.b)(t);
        if [lambda, dlambda, beta, dbeta, ddbeta, b, db]
            .iter()
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("schedule", format!("non-finite value at t = {t}")));
        }
        pts.push(GridPoint {
            t,
            lambda,
            dlambda,
            beta,
            dbeta,
            b,
            db,
            w: b - dbeta - beta / t,
            dw: db - ddbeta - dbeta / t + beta / (t * t),
        });
    }
    let early = |p: &GridPoint| p.t <= t_max / 10.0;
    let setting = if pts.iter().all(|p| p.beta == 0.0) {
        Setting::Setting1
    } else {
        Setting::Setting2
    };

    // (I)
    let (min_ratio, at) = pts
        .iter()
        .map(|p| (((alpha - 3.0) * p.w - p.t * p.dw) / p.b, p.t))
        .fold((f64::INFINITY, t0), |acc, x| if x.0 < acc.0 { x } else { acc });
    let (cond_i, epsilon) = if alpha <= 1.0 {
        (Outcome::fail(format!("α > 1 violated (α = {alpha})")), None)
    } else if min_ratio > 0.0 {
        let eps = if min_ratio < alpha - 1.0 {
            min_ratio
        } else {
            0.5 * (alpha - 1.0)
        };
        (Outcome::pass(format!("ε = {eps}")), Some(eps))
    } else {
        (
            Outcome::fail(format!(
                "(α−3)w − t w' ≥ ε b violated at t = {at} (ratio {min_ratio})"
            )),
            None,
        )
    };

    // (II)
    let cond_ii = match pts.iter().find(|p| p.dlambda < 0.0 || p.dbeta < 0.0) {
        None => Outcome::pass("lambda' ≥ 0 and beta' ≥ 0 on the grid"),
        Some(p) => Outcome::fail(format!("monotonicity violated at t = {}", p.t)),
    };

    // (III)
    let first_bad_w = pts.iter().find(|p| !(p.w > 0.0));
    let cond_iii = match first_bad_w {
        None => Outcome::pass("w > 0 on the grid"),
        Some(p) => Outcome::fail(format!("b > β' + β/t violated at t = {} (w = {})", p.t, p.w)),
    };

    // (IV)
    let integrand: Vec<f64> = pts
        .iter()
        .map(|p| {
            let v = p.beta * p.beta * p.dlambda * p.dlambda * p.t.powi(3) / p.lambda.powi(4)
                - p.dlambda * p.t * p.t * p.b / (2.0 * p.lambda * p.lambda);
            v.max(0.0)
        })
        .collect();
    let (mut total, mut tail) = (0.0, 0.0);
    for k in 1..pts.len() {
        let piece = 0.5 * (integrand[k] + integrand[k - 1]) * (pts[k].t - pts[k - 1].t);
        total += piece;
        if !early(&pts[k - 1]) {
            tail += piece;
        }
    }
    let cond_iv = if total == 0.0 || tail < TAIL_SHARE * total {
        Outcome::pass(format!("integral ≈ {total:e}, last-decade share {:.2e}", share(tail, total)))
    } else {
        Outcome::fail(format!(
            "integral not settling: last decade contributes {:.1}%",
            100.0 * share(tail, total)
        ))
    };

    // (V)
    let cond_v = stabilized_sup(&pts, early, |p| 2.0 + p.t * p.db / p.b, "d/dt(t² b)/(t b)");

    // (VI)
    let cond_vi = if first_bad_w.is_some() {
        Outcome::fail("requires w > 0, see (III)")
    } else {
        stabilized_sup(&pts, early, |p| p.beta / (p.t * p.w), "β/(t w)")
    };

    // (VII)
    let cond_vii = stabilized_sup(&pts, early, |p| p.lambda / p.t, "λ/t");

    Ok(ConditionReport::new(
        setting,
        [cond_i, cond_ii, cond_iii, cond_iv, cond_v, cond_vi, cond_vii],
        epsilon,
    ))
}

fn share(part: f64, total: f64) -> f64 {
    if total == 0.0 {
        0.0
    } else {
        part / total
    }
}

fn stabilized_sup(
    pts: &[GridPoint],
    early: impl Fn(&GridPoint) -> bool,
    f: impl Fn(&GridPoint) -> f64,
    label: &str,
) -> Outcome {
    let mut sup_early = f64::NEG_INFINITY;
    let mut sup_all = f64::NEG_INFINITY;
    let mut arg = pts[0].t;
    for p in pts {
        let v = f(p);
        if early(p) {
            sup_early = sup_early.max(v);
        }
        if v > sup_all {
            sup_all = v;
            arg = p.t;
        }
    }
    if sup_all <= sup_early + SUP_SLACK * sup_early.abs() + 1e-12 {
        Outcome::pass(format!("sup {label} ≈ {sup_all}"))
    } else {
        Outcome::fail(format!(
            "sup {label} still growing: {sup_all} at t = {arg} vs {sup_early} up to t_max/10"
        ))
    }
}

/// Grid check of a monomial schedule through its closed-form derivatives.
pub fn check_conditions_grid_schedule(
    s: &PolynomialSchedule,
    t_max: f64,
    grid: usize,
) -> Result<ConditionReport> {
    let lambda = |t: f64| {
        let e = s.eval_unchecked(t);
        (e.lambda, e.dlambda)
    };
    let beta = |t: f64| {
        let e = s.eval_unchecked(t);
        (e.beta, e.dbeta, e.ddbeta)
    };
    let b = |t: f64| {
        let e = s.eval_unchecked(t);
        (e.b, e.db)
    };
    let fns = ScheduleFns {
        lambda: &lambda,
        beta: &beta,
        b: &b,
    };
    check_conditions_grid(s.alpha, &fns, s.t0, t_max, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(alpha: f64, l: f64, beta0: f64, m: f64, b0: f64, n: f64) -> PolynomialSchedule {
        PolynomialSchedule::new(alpha, 1.0, 1.0, l, beta0, m, b0, n).unwrap()
    }

    #[test]
    fn setting1_passes() {
        let r = check_conditions_polynomial(&sched(9.0, 1.0, 0.0, 0.0, 2.0, 5.0));
        assert!(r.overall, "{r}");
        assert_eq!(r.setting, Setting::Setting1);
        assert_eq!(r.epsilon_witness, Some(0.5));
    }

    #[test]
    fn figure1_passes_with_witness() {
        let r = check_conditions_polynomial(&sched(9.0, 1.0, 1.0, 0.0, 4.5, 4.0));
        assert!(r.overall, "{r}");
        let eps = r.epsilon_witness.unwrap();
        assert!(eps > 0.0 && eps < 8.0);
    }

    #[test]
    fn figure4a_names_both_violations() {
        let r = check_conditions_polynomial(&sched(13.0, 1.0, 1.0, 12.0, 1.0, 9.0));
        assert!(!r.overall);
        assert!(r.names_violation("m ≤ n+1"), "{r}");
        assert!(r.names_violation("2m < n+l"), "{r}");
        assert!(r.get(Condition::I).pass);
    }

    #[test]
    fn figure4b_names_alpha_violation() {
        let r = check_conditions_polynomial(&sched(2.0, 4.0, 1.0, 6.0, 9.4, 4.0));
        assert!(!r.overall);
        assert!(r.names_violation("α−3 > n"), "{r}");
        assert!(r.epsilon_witness.is_none());
    }

    #[test]
    fn boundary_case_2m_equals_n_plus_l() {
        // 2m = n + l = 4: needs b >= 2 l beta^2 / lambda = 2.
        let ok = check_conditions_polynomial(&sched(9.0, 1.0, 1.0, 2.0, 30.0, 3.0));
        assert!(ok.get(Condition::IV).pass, "{ok}");
        let bad = polynomial_iv(1.0, 1.0, 1.0, 2.0, 1.5, 3.0);
        assert!(!bad.pass);
    }

    #[test]
    fn grid_flags_nonpositive_w() {
        let lambda = |t: f64| (t, 1.0);
        let beta = |t: f64| (t * t, 2.0 * t, 2.0);
        // w = b - 3t, negative once t > 2.
        let b = |_t: f64| (6.0, 0.0);
        let fns = ScheduleFns {
            lambda: &lambda,
            beta: &beta,
            b: &b,
        };
        let r = check_conditions_grid(9.0, &fns, 1.0, 100.0, 200).unwrap();
        assert!(!r.get(Condition::III).pass);
        assert!(r.get(Condition::III).witness.contains("t = "));
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        let s = sched(9.0, 1.0, 1.0, 0.0, 4.5, 4.0);
        assert!(check_conditions_grid_schedule(&s, 100.0, 10).is_err());
        assert!(check_conditions_grid_schedule(&s, 0.5, 1000).is_err());
        let nan = |_t: f64| (f64::NAN, 0.0);
        let beta = |_t: f64| (0.0, 0.0, 0.0);
        let fns = ScheduleFns {
            lambda: &nan,
            beta: &beta,
            b: &nan,
        };
        assert!(check_conditions_grid(9.0, &fns, 1.0, 10.0, 100).is_err());
    }

    #[test]
    fn grid_matches_closed_form_on_figures() {
        for s in [
            sched(9.0, 1.0, 1.0, 0.0, 4.5, 4.0),
            sched(13.0, 1.0, 1.0, 12.0, 1.0, 9.0),
            sched(9.0, 1.0, 0.0, 0.0, 1.0, 5.0),
        ] {
            let closed = check_conditions_polynomial(&s);
            let grid = check_conditions_grid_schedule(&s, 1e4, 10_000).unwrap();
            assert_eq!(closed.overall, grid.overall, "{closed}\n{grid}");
        }
    }

    #[test]
    fn epsilon_present_iff_condition_i_passes() {
        for s in [
            sched(9.0, 1.0, 1.0, 0.0, 4.5, 4.0),
            sched(2.0, 4.0, 1.0, 6.0, 9.4, 4.0),
            sched(5.0, 0.5, 0.0, 0.0, 1.0, 3.0),
        ] {
            let r = check_conditions_polynomial(&s);
            assert_eq!(r.epsilon_witness.is_some(), r.get(Condition::I).pass);
        }
    }
}
