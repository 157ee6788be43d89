//! Brute-force proximal map used to validate the closed forms.
//!
//! Each coordinate is solved by exhaustive grid search followed by golden
//! section refinement and a parabolic polish on smooth pieces. It only uses
//! scalar objective values, never a closed-form prox.

use super::ProxFunction;
use crate::error::{check_dim, Error, Result};

const GRID_POINTS: usize = 100_000;
const GOLDEN_TOL: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Per-coordinate brute-force minimizer of `Phi(y) + |x - y|^2 / (2 lambda)`.
pub fn brute_force_prox(f: &ProxFunction, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(f.dimension(), x.len())?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let g = |y: f64| f.scalar_value(i, y) + (xi - y) * (xi - y) / (2.0 * lambda);
            scalar_argmin(g, xi - 2.0 * xi.abs() - 10.0, xi + 2.0 * xi.abs() + 10.0)
        })
        .collect())
}

fn scalar_argmin<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let at = |k: usize| lo + step * k as f64;
    let best = (0..GRID_POINTS)
        .map(|k| (k, g(at(k))))
        .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc })
        .0;
    let a = at(best.saturating_sub(1));
    let b = at((best + 1).min(GRID_POINTS - 1));
    let y = golden_section(&g, a, b);
    parabolic_polish(&g, y)
}

fn golden_section<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> f64 {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while (b - a).abs() > GOLDEN_TOL {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Value comparisons only resolve the argmin to about `sqrt(eps)`. On a
/// smooth (locally quadratic) piece the vertex of an interpolating parabola is
/// much sharper; two stencil widths must agree, which rejects kinks.
fn parabolic_polish<G: Fn(f64) -> f64>(g: &G, y: f64) -> f64 {
    let vertex = |s: f64| {
        let (fm, f0, fp) = (g(y - s), g(y), g(y + s));
        let curvature = fp - 2.0 * f0 + fm;
        if !(curvature > 0.0) {
            return None;
        }
        Some(y - 0.5 * s * (fp - fm) / curvature)
    };
    let s = 1e-3 * (1.0 + y.abs());
    match (vertex(s), vertex(2.0 * s)) {
        (Some(v1), Some(v2)) if (v1 - v2).abs() <= 1e-9 * (1.0 + y.abs()) && (v1 - y).abs() < s => v1,
        _ => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_oracle_matches_first_order_optimality() {
        let f = ProxFunction::l1(1).unwrap();
        let p = brute_force_prox(&f, 1.0, &[10.0]).unwrap();
        // 0 in d|y| + (y - 10): y = 9 is the unique point with slope 1 - 1 = 0.
        assert!((p[0] - 9.0).abs() < 1e-8, "{}", p[0]);
    }

    #[test]
    fn quadratic_oracle() {
        let f = ProxFunction::diag_quadratic(vec![1.0], vec![0.0]).unwrap();
        let p = brute_force_prox(&f, 1.0, &[4.0]).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-8, "{}", p[0]);
    }

    #[test]
    fn oracle_fixes_minimizers() {
        let fns = [
            ProxFunction::l1(2).unwrap(),
            ProxFunction::elastic_abs(2).unwrap(),
            ProxFunction::diag_quadratic(vec![2.0, 0.5], vec![-3.0, 7.0]).unwrap(),
        ];
        for f in &fns {
            let p = brute_force_prox(f, 1.0, f.minimizer()).unwrap();
            for (a, b) in p.iter().zip(f.minimizer()) {
                assert!((a - b).abs() < 1e-8, "{f:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn elastic_oracle() {
        let f = ProxFunction::elastic_abs(1).unwrap();
        let p = brute_force_prox(&f, 1.0, &[10.0]).unwrap();
        assert!((p[0] - 4.5).abs() < 1e-8, "{}", p[0]);
    }
}
