use std::collections::BTreeMap;

use crate::geometry::{DiskGrid, Grid, ScalarField};

pub type Polyline = Vec<[f64; 2]>;

type EdgeKey = (usize, usize);

fn key(a: usize, b: usize) -> EdgeKey {
    if a < b { (a, b) } else { (b, a) }
}

/// Level set `{v = level}` by marching triangles.
///
/// Each polar cell is split along its `(i, j)–(i+1, j+1)` diagonal; inside a
/// triangle the field is linear in Cartesian coordinates. Nodes with
/// `v > level` count as inside. Open polylines end on the unit circle; closed
/// loops repeat their first point at the end.
pub fn extract_free_boundary(v: &ScalarField<DiskGrid>, level: f64) -> Vec<Polyline> {
    let g = v.grid();
    let vals = v.values();
    let inside = |k: usize| vals[k] > level;
    let crossing = |a: usize, b: usize| -> [f64; 2] {
        let (fa, fb) = (vals[a] - level, vals[b] - level);
        let t = fa / (fa - fb);
        let (pa, pb) = (g.point(a), g.point(b));
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    };

    let mut points: BTreeMap<EdgeKey, [f64; 2]> = BTreeMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for i in 0..g.nr() {
        for jc in 0..g.angular_cells() {
            let [a, b, c, d] = g.cell_corners(i, jc);
            let tris: &[[usize; 3]] = if i == 0 { &[[a, d, c]] } else { &[[a, b, d], [a, d, c]] };
            for t in tris {
                let cut: Vec<EdgeKey> = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
                    .iter()
                    .filter(|(p, q)| inside(*p) != inside(*q))
                    .map(|&(p, q)| {
                        let k = key(p, q);
                        points.entry(k).or_insert_with(|| crossing(k.0, k.1));
                        k
                    })
                    .collect();
                if cut.len() == 2 {
                    segments.push((cut[0], cut[1]));
                }
            }
        }
    }

    // each crossed edge is shared by at most two triangles
    let mut adj: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, (p, q)) in segments.iter().enumerate() {
        adj.entry(*p).or_default().push(s);
        adj.entry(*q).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();

    let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Option<Polyline> {
        let mut line = vec![points[&start]];
        let mut at = start;
        loop {
            let next = adj[&at].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (p, q) = segments[s];
            at = if p == at { q } else { p };
            line.push(points[&at]);
            if at == start {
                break;
            }
        }
        (line.len() > 1).then_some(line)
    };

    let ends: Vec<EdgeKey> = adj.iter().filter(|(_, s)| s.len() == 1).map(|(k, _)| *k).collect();
    for e in ends {
        if adj[&e].iter().all(|&s| used[s]) {
            continue;
        }
        out.extend(walk(e, &mut used));
    }
    let keys: Vec<EdgeKey> = adj.keys().copied().collect();
    for k in keys {
        if adj[&k].iter().any(|&s| !used[s]) {
            out.extend(walk(k, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_has_no_contour() {
        let d = DiskGrid::new(3, 16, 8).unwrap();
        assert!(extract_free_boundary(&ScalarField::constant(d, 1.0), 0.0).is_empty());
    }

    #[test]
    fn straight_line() {
        let d = DiskGrid::new(3, 32, 16).unwrap();
        let v = ScalarField::from_xy(d, |x, _| x - 0.013);
        let lines = extract_free_boundary(&v, 0.0);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        for p in line {
            assert!((p[0] - 0.013).abs() <= d.dr(), "{p:?}");
        }
        // endpoints sit on the chords of the outer ring
        let sag = d.dtheta() * d.dtheta() / 8.0;
        let (a, b) = (line[0], line[line.len() - 1]);
        assert!((a[0].hypot(a[1]) - 1.0).abs() <= sag);
        assert!((b[0].hypot(b[1]) - 1.0).abs() <= sag);
        assert!(a[1] * b[1] < 0.0);
    }

    #[test]
    fn line_through_the_origin() {
        let d = DiskGrid::new(3, 32, 16).unwrap();
        let v = ScalarField::from_xy(d, |x, _| x);
        let lines = extract_free_boundary(&v, 0.0);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].iter().all(|p| p[0].abs() <= d.dr()));
    }

    #[test]
    fn circle() {
        let d = DiskGrid::new(3, 40, 16).unwrap();
        let v = ScalarField::from_xy(d, |x, y| x * x + y * y - 0.25);
        let lines = extract_free_boundary(&v, 0.0);
        assert_eq!(lines.len(), 1);
        let l = &lines[0];
        assert_eq!(l.first(), l.last());
        let h = d.dr().max(0.5 * d.dtheta());
        for p in l {
            assert!((p[0].hypot(p[1]) - 0.5).abs() <= h);
        }
        // off-grid radius
        let v = ScalarField::from_xy(d, |x, y| x * x + y * y - 0.3 * 0.3);
        let l = &extract_free_boundary(&v, 0.0)[0];
        for p in l {
            assert!((p[0].hypot(p[1]) - 0.3).abs() <= h);
        }
    }
}
