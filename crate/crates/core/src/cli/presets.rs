use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::{B0Spec, ExperimentConfig, ObjectiveName};
use crate::dynamics::{DEFAULT_ABS_TOL, DEFAULT_MAX_STEPS, DEFAULT_REL_TOL, DEFAULT_SAMPLE_COUNT};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FigureId {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "4a")]
    FourA,
    #[serde(rename = "4b")]
    FourB,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::One,
        FigureId::Two,
        FigureId::Three,
        FigureId::FourA,
        FigureId::FourB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::One => "1",
            FigureId::Two => "2",
            FigureId::Three => "3",
            FigureId::FourA => "4a",
            FigureId::FourB => "4b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::invalid("figure", format!("unknown id {s:?}, expected 1, 2, 3, 4a or 4b")))
    }
}

/// One member of a figure sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub figure: FigureId,
    pub param: &'static str,
    pub value: f64,
    pub config: ExperimentConfig,
    /// The parameters violate the convergence conditions.
    pub diverging: bool,
}

impl Curve {
    pub fn stem(&self) -> String {
        format!("figure{}_{}={}", self.figure, self.param, self.value)
    }
}

/// Which plotted quantity each panel of a figure shows.
pub fn subfigures(id: FigureId) -> Vec<(&'static str, &'static str)> {
    match id {
        FigureId::One | FigureId::Two | FigureId::Three => {
            vec![("a", "x_0"), ("b", "envelope_gap"), ("c", "grad_norm")]
        }
        FigureId::FourA => vec![("a", "x_0")],
        FigureId::FourB => vec![("b", "x_0")],
    }
}

pub(crate) struct Base {
    objective: ObjectiveName,
    alpha: f64,
    l: f64,
    m: f64,
    n: f64,
    t_end: f64,
}

pub(crate) fn base_config(b: Base) -> ExperimentConfig {
    ExperimentConfig {
        objective: b.objective,
        weights: None,
        center: None,
        alpha: b.alpha,
        t0: 1.0,
        lambda0: 1.0,
        l: b.l,
        beta0: 1.0,
        m: b.m,
        b0: B0Spec::default(),
        n: b.n,
        x0: vec![10.0],
        u0: Some(vec![0.0]),
        t_end: b.t_end,
        rel_tol: DEFAULT_REL_TOL,
        abs_tol: DEFAULT_ABS_TOL,
        sample_count: DEFAULT_SAMPLE_COUNT,
        max_steps: DEFAULT_MAX_STEPS,
        output: None,
    }
}

/// The sweep parameter and its values.
pub fn sweep(id: FigureId) -> (&'static str, &'static [f64]) {
    match id {
        FigureId::One => ("n", &[0.0, 1.0, 2.0, 3.0, 4.0, 4.99]),
        FigureId::Two => ("l", &[0.0, 0.5, 1.0]),
        FigureId::Three => ("m", &[0.0, 2.0, 4.0, 4.99]),
        FigureId::FourA => ("m", &[12.0]),
        FigureId::FourB => ("alpha", &[2.0]),
    }
}

/// Time horizon of the divergent demo with `m = 12`; its oscillation
/// frequency grows like `t^9` and exhausts any step budget beyond this.
pub const FIGURE_4A_T_END: f64 = 4.0;

pub fn curve(id: FigureId, value: f64) -> Curve {
    use ObjectiveName::{ElasticAbs, L1};
    let (param, _) = sweep(id);
    let (config, diverging) = match id {
        FigureId::One => (base_config(Base { objective: L1, alpha: 9.0, l: 1.0, m: 0.0, n: value, t_end: 100.0 }), false),
        FigureId::Two => (base_config(Base { objective: L1, alpha: 9.0, l: value, m: 0.0, n: 5.0, t_end: 100.0 }), false),
        FigureId::Three => (
            base_config(Base { objective: ElasticAbs, alpha: 13.0, l: 1.0, m: value, n: 9.0, t_end: 100.0 }),
            false,
        ),
        FigureId::FourA => (
            base_config(Base { objective: ElasticAbs, alpha: 13.0, l: 1.0, m: value, n: 9.0, t_end: FIGURE_4A_T_END }),
            true,
        ),
        FigureId::FourB => (
            base_config(Base { objective: ElasticAbs, alpha: value, l: 4.0, m: 6.0, n: 4.0, t_end: 100.0 }),
            true,
        ),
    };
    Curve {
        figure: id,
        param,
        value,
        config,
        diverging,
    }
}

pub fn figure_curves(id: FigureId) -> Vec<Curve> {
    sweep(id).1.iter().map(|&v| curve(id, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::check_conditions_polynomial;

    #[test]
    fn ids_parse() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
        }
        assert!("5".parse::<FigureId>().is_err());
    }

    #[test]
    fn sweep_sizes_and_names() {
        assert_eq!(figure_curves(FigureId::One).len(), 6);
        assert_eq!(figure_curves(FigureId::Two).len(), 3);
        assert_eq!(figure_curves(FigureId::Three).len(), 4);
        assert_eq!(curve(FigureId::One, 4.99).stem(), "figure1_n=4.99");
        assert_eq!(curve(FigureId::Two, 0.5).stem(), "figure2_l=0.5");
        assert_eq!(curve(FigureId::FourB, 2.0).stem(), "figure4b_alpha=2");
    }

    #[test]
    fn diverging_flag_matches_conditions() {
        for id in FigureId::ALL {
            for c in figure_curves(id) {
                let report = check_conditions_polynomial(&c.config.schedule().unwrap());
                assert_eq!(report.overall, !c.diverging, "{}", c.stem());
                c.config.system_config().unwrap();
            }
        }
    }
}
