//! Sweep output as CSV, one row per matrix entry per grid point.

use std::fmt::Write;

use slhkit::characteristic::SweepResult;
use slhkit::matrix::{c, CMatrix, C64};

pub const HEADER: &str = "s_re,s_im,block_row,block_col,entry_row,entry_col,re,im,status";

/// Renders a sweep of an `n`-input, `m`-dimensional model. Failed points
/// keep their rows with NaN values and the status `singular`.
pub fn render_sweep(result: &SweepResult, n_inputs: usize, dim: usize) -> String {
    let points: Vec<(C64, Option<&CMatrix>)> = result
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| (result.grid.s_at(i), v.as_ref().map(|t| t.data())))
        .collect();
    render_points(&points, n_inputs, dim)
}

/// Same layout for an explicit list of `(s, T(s))` pairs.
pub fn render_points(points: &[(C64, Option<&CMatrix>)], n_inputs: usize, dim: usize) -> String {
    let per_point = (n_inputs * dim).pow(2);
    let mut out = String::with_capacity(64 * (1 + per_point * points.len()));
    out.push_str(HEADER);
    out.push('\n');
    for (s, value) in points {
        for (bi, bj, a, b) in entry_order(n_inputs, dim) {
            let (z, status) = match value {
                Some(t) => (t[(bi * dim + a, bj * dim + b)], "ok"),
                None => (c(f64::NAN, f64::NAN), "singular"),
            };
            writeln!(
                out,
                "{:.16e},{:.16e},{bi},{bj},{a},{b},{:.16e},{:.16e},{status}",
                s.re, s.im, z.re, z.im
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

fn entry_order(n: usize, m: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n).flat_map(move |bi| {
        (0..n).flat_map(move |bj| (0..m).flat_map(move |a| (0..m).map(move |b| (bi, bj, a, b))))
    })
}
