use std::f64::consts::TAU;

use crate::geometry::{DiskGrid, Grid, ScalarField};

/// Slack for points that sit on the unit circle up to round-off.
pub(crate) const EDGE_TOL: f64 = 1e-12;

/// Bilinear interpolation in `(r, θ)` on the disk. `None` outside the unit disk.
pub fn sample(v: &ScalarField<DiskGrid>, p: [f64; 2]) -> Option<f64> {
    let g = v.grid();
    let r = p[0].hypot(p[1]);
    if r > 1.0 + EDGE_TOL {
        return None;
    }
    let r = r.min(1.0);
    let mut t = p[1].atan2(p[0]);
    if t < 0.0 {
        t += TAU;
    }
    let s = r * g.nr() as f64;
    let i = (s.floor() as usize).min(g.nr() - 1);
    let a = s - i as f64;
    let u = t / g.dtheta();
    let jf = u.floor();
    let b = u - jf;
    let j = jf as usize % g.angular_nodes();
    let (in0, in1) = if i == 0 {
        (v.origin_value(), v.origin_value())
    } else {
        (v.at(i, j), v.at(i, j + 1))
    };
    let (out0, out1) = (v.at(i + 1, j), v.at(i + 1, j + 1));
    Some((1.0 - a) * ((1.0 - b) * in0 + b * in1) + a * ((1.0 - b) * out0 + b * out1))
}

/// Piecewise-linear interpolation on the triangles used by the contour
/// extraction. Reproduces Cartesian-linear fields exactly.
pub fn sample_linear(v: &ScalarField<DiskGrid>, p: [f64; 2]) -> Option<f64> {
    let g = v.grid();
    let r = p[0].hypot(p[1]);
    if r > 1.0 + EDGE_TOL {
        return None;
    }
    let i = ((r.min(1.0) * g.nr() as f64).floor() as usize).min(g.nr() - 1);
    let mut t = p[1].atan2(p[0]);
    if t < 0.0 {
        t += TAU;
    }
    let jc = (t / g.dtheta()).floor() as usize % g.angular_cells();
    let [a, b, c, d] = g.cell_corners(i, jc);
    let tris: &[[usize; 3]] = if i == 0 { &[[a, d, c]] } else { &[[a, b, d], [a, d, c]] };
    let vals = v.values();
    // pick the triangle needing the least extrapolation (curved cell edges)
    let mut best: Option<(f64, f64)> = None;
    for tri in tris {
        let [p0, p1, p2] = tri.map(|k| g.point(k));
        let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let l1 = ((p[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p[1] - p0[1])) / det;
        let l2 = ((p1[0] - p0[0]) * (p[1] - p0[1]) - (p[0] - p0[0]) * (p1[1] - p0[1])) / det;
        let l0 = 1.0 - l1 - l2;
        let worst = l0.min(l1).min(l2);
        let val = l0 * vals[tri[0]] + l1 * vals[tri[1]] + l2 * vals[tri[2]];
        if best.is_none_or(|(w, _)| worst > w) {
            best = Some((worst, val));
        }
    }
    best.map(|(_, val)| val)
}
