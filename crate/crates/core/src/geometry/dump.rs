//! Text dump of a nodal field.
//!
//! ```text
//! # fbsing-field m=3 nr=64 ntheta=16 domain=sector
//! 0 0 0.0000000000000000e0 0.0000000000000000e0 1.0000000000000001e-1
//! 1 0 1.5625000000000000e-2 ...
//! ```
//!
//! One line `i j r theta value` per node in index order; reals carry 17
//! significant digits so a dump reads back bit-identically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{GeometryError, Grid, ScalarField};

const MAGIC: &str = "# fbsing-field";

pub fn write_field<G: Grid, W: Write>(field: &ScalarField<G>, mut out: W) -> std::io::Result<()> {
    let g = field.grid();
    writeln!(
        out,
        "{MAGIC} m={} nr={} ntheta={} domain={}",
        g.m(),
        g.nr(),
        g.ntheta(),
        G::DOMAIN
    )?;
    for (k, v) in field.values().iter().enumerate() {
        let (i, j) = g.node_ij(k);
        let (r, t) = g.polar(k);
        writeln!(out, "{i} {j} {r:.16e} {t:.16e} {v:.16e}")?;
    }
    out.flush()
}

pub fn write_field_file<G: Grid>(
    field: &ScalarField<G>,
    path: impl AsRef<Path>,
) -> Result<(), GeometryError> {
    let f = File::create(path)?;
    write_field(field, BufWriter::new(f))?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> GeometryError {
    GeometryError::Parse { line, msg: msg.into() }
}

pub fn read_field<G: Grid, R: BufRead>(input: R) -> Result<ScalarField<G>, GeometryError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty input"))??;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| parse_err(1, "missing fbsing-field header"))?;
    let (mut m, mut nr, mut nt, mut domain) = (None, None, None, None);
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("bad header token `{tok}`")))?;
        let num = || v.parse::<usize>().map_err(|_| parse_err(1, format!("bad {k} `{v}`")));
        match k {
            "m" => m = Some(num()?),
            "nr" => nr = Some(num()?),
            "ntheta" => nt = Some(num()?),
            "domain" => domain = Some(v.to_string()),
            _ => return Err(parse_err(1, format!("unknown header key `{k}`"))),
        }
    }
    let (m, nr, nt, domain) = match (m, nr, nt, domain) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => return Err(parse_err(1, "header needs m, nr, ntheta and domain")),
    };
    if domain != G::DOMAIN.as_str() {
        return Err(parse_err(
            1,
            format!("expected domain={}, found domain={domain}", G::DOMAIN),
        ));
    }
    let grid = G::from_parts(m, nr, nt)?;
    let mut values = Vec::with_capacity(grid.node_count());
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 5 {
            return Err(parse_err(lineno, "expected `i j r theta value`"));
        }
        let i: usize = cols[0].parse().map_err(|_| parse_err(lineno, "bad i"))?;
        let j: usize = cols[1].parse().map_err(|_| parse_err(lineno, "bad j"))?;
        let idx = values.len();
        if idx >= grid.node_count() || grid.node_ij(idx) != (i, j) {
            return Err(parse_err(lineno, format!("node ({i}, {j}) out of order")));
        }
        let v: f64 = cols[4].parse().map_err(|_| parse_err(lineno, "bad value"))?;
        values.push(v);
    }
    ScalarField::new(grid, values)
}

pub fn read_field_file<G: Grid>(path: impl AsRef<Path>) -> Result<ScalarField<G>, GeometryError> {
    read_field(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DiskGrid, SectorGrid};
    use proptest::prelude::*;

    #[test]
    fn header_format() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        let mut buf = Vec::new();
        write_field(&ScalarField::constant(g, 0.1), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "# fbsing-field m=3 nr=8 ntheta=4 domain=sector");
        assert_eq!(text.lines().count(), 1 + g.node_count());
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        let mut buf = Vec::new();
        write_field(&ScalarField::zeros(g), &mut buf).unwrap();
        let r: Result<ScalarField<DiskGrid>, _> = read_field(&buf[..]);
        assert!(matches!(r, Err(GeometryError::Parse { line: 1, .. })));
    }

    #[test]
    fn truncated_dump_is_rejected() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        let mut buf = Vec::new();
        write_field(&ScalarField::zeros(g), &mut buf).unwrap();
        buf.truncate(buf.len() / 2);
        let cut = buf.iter().rposition(|&b| b == b'\n').unwrap() + 1;
        buf.truncate(cut);
        let r: Result<ScalarField<SectorGrid>, _> = read_field(&buf[..]);
        assert!(matches!(r, Err(GeometryError::LengthMismatch { .. })));
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, -1e-6f64..1e-6, any::<f64>().prop_filter("finite", |x| x.is_finite())]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn roundtrip_is_bit_exact(
            vals in prop::collection::vec(finite(), 400),
            nr in 8usize..12,
            nt in 4usize..7,
            disk in any::<bool>(),
        ) {
            let sector = SectorGrid::new(3, nr, nt).unwrap();
            let mut buf = Vec::new();
            if disk {
                let g = sector.disk();
                let f = ScalarField::new(g, vals[..g.node_count()].to_vec()).unwrap();
                write_field(&f, &mut buf).unwrap();
                let back: ScalarField<DiskGrid> = read_field(&buf[..]).unwrap();
                prop_assert_eq!(back, f);
            } else {
                let f = ScalarField::new(sector, vals[..sector.node_count()].to_vec()).unwrap();
                write_field(&f, &mut buf).unwrap();
                let back: ScalarField<SectorGrid> = read_field(&buf[..]).unwrap();
                prop_assert_eq!(back, f);
            }
        }
    }
}
