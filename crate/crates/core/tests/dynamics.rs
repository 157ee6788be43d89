use inertial_moreau::dynamics::{integrate, SystemConfig, Trajectory};
use inertial_moreau::{PolynomialSchedule, ProxFunction};

fn config(beta0: f64, t_end: f64) -> SystemConfig {
    let s = PolynomialSchedule::new(9.0, 1.0, 1.0, 1.0, beta0, 0.0, 3.0, 2.0).unwrap();
    SystemConfig::new(ProxFunction::l1(1).unwrap(), s, vec![10.0], vec![0.0], t_end).unwrap()
}

fn sup_distance(a: &Trajectory, b: &Trajectory) -> f64 {
    assert_eq!(a.len(), b.len());
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| (p.state.x[0] - q.state.x[0]).abs())
        .fold(0.0, f64::max)
}

#[test]
fn branches_agree_as_beta_vanishes() {
    let tiny = integrate(&config(1e-8, 20.0).with_samples(400)).unwrap();
    let zero = integrate(&config(0.0, 20.0).with_samples(400)).unwrap();
    let d = sup_distance(&tiny, &zero);
    assert!(d <= 1e-4, "sup distance {d:e}");
}

fn refinement_change(t_end: f64) -> (f64, f64, f64) {
    let base = config(1.0, t_end).with_samples(50);
    let coarse = integrate(&base).unwrap();
    let fine = integrate(&base.clone().with_tolerances(base.rel_tol / 2.0, base.abs_tol / 2.0)).unwrap();
    let (a, b) = (coarse.last().unwrap().state.x[0], fine.last().unwrap().state.x[0]);
    let peak = fine.samples.iter().map(|s| s.state.x[0].abs()).fold(0.0, f64::max);
    ((a - b).abs(), b.abs(), peak)
}

#[test]
fn tolerance_refinement_converges() {
    let rel_tol = config(1.0, 3.0).rel_tol;
    let (change, x_end, _) = refinement_change(3.0);
    assert!(change < 10.0 * rel_tol * x_end, "{change:e} vs |x| {x_end}");
}

#[test]
fn tolerance_refinement_after_decay() {
    // Once x(t) has decayed by orders of magnitude the error is set by the
    // earlier, larger states.
    let rel_tol = config(1.0, 10.0).rel_tol;
    let (change, _, peak) = refinement_change(10.0);
    assert!(change < 10.0 * rel_tol * peak, "{change:e} vs peak {peak}");
}

#[test]
fn envelope_gap_derivative_identity() {
    // d/dt (Phi_lambda(x) - Phi*) = <grad, x'> - lambda'/2 |grad|^2 with lambda = t.
    let cfg = config(1.0, 10.0).with_samples(8000);
    let traj = integrate(&cfg).unwrap();
    let mut checked = 0;
    for w in traj.samples.windows(3) {
        let (a, s, c) = (&w[0], &w[1], &w[2]);
        let fd = (c.envelope_gap - a.envelope_gap) / (c.t() - a.t());
        let g = s.gradient[0];
        let exact = g * s.state.v[0] - 0.5 * g * g;
        // Relative to the larger of the two terms, plus the central-difference
        // truncation term h^2 |x''| |v| / t that dominates where x crosses zero.
        let scale = (g * s.state.v[0]).abs().max(0.5 * g * g);
        let h = 0.5 * (c.t() - a.t());
        let acc = (c.state.v[0] - a.state.v[0]) / (c.t() - a.t());
        let truncation = h * h * (acc * s.state.v[0]).abs() / s.t();
        // Skip samples whose neighbours straddle a kink of the envelope.
        let same_piece = (a.state.x[0].abs() > a.t()) == (c.state.x[0].abs() > c.t());
        if same_piece && scale > 1e-12 {
            assert!((fd - exact).abs() <= 1e-3 * scale + 2.0 * truncation, "t = {}: {fd} vs {exact}", s.t());
            checked += 1;
        }
    }
    assert!(checked > 4000, "only {checked} samples checked");
}

#[test]
fn runs_are_deterministic() {
    let cfg = config(1.0, 30.0).with_samples(100);
    assert_eq!(integrate(&cfg).unwrap(), integrate(&cfg).unwrap());
}

