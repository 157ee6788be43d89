use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::dynamics::Trajectory;

pub fn header(dimension: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..dimension).map(|i| format!("x_{i}")));
    cols.extend((0..dimension).map(|i| format!("v_{i}")));
    cols.extend(
        [
            "envelope_gap",
            "grad_norm",
            "prox_dist",
            "prox_gap",
            "velocity_norm",
            "energy_c_alpha_minus_1",
            "dist_to_minimizer",
            "t2b_times_gap",
        ]
        .map(String::from),
    );
    cols.join(",")
}

/// Writes one row per sample, 17 significant digits per number.
pub fn write_trajectory<W: Write>(mut w: W, dimension: usize, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "{}", header(dimension))?;
    for s in &traj.samples {
        let mut row = Vec::with_capacity(1 + 2 * dimension + 8);
        row.push(s.t());
        row.extend_from_slice(&s.state.x);
        row.extend_from_slice(&s.state.v);
        row.extend([
            s.envelope_gap,
            s.grad_norm,
            s.prox_dist,
            s.prox_gap,
            s.velocity_norm,
            s.energy,
            s.dist_to_minimizer,
            s.t2b_gap,
        ]);
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

pub fn write_trajectory_file(path: &Path, dimension: usize, traj: &Trajectory) -> io::Result<()> {
    write_trajectory(BufWriter::new(File::create(path)?), dimension, traj)
}
