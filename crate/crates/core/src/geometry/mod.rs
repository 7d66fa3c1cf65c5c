//! Polar grids on the symmetry sector and the reflected disk, nodal fields,
//! boundary data, the discrete Laplacian and the field dump format.

mod boundary;
mod dump;
mod field;
mod grid;
mod laplacian;

pub use boundary::{BoundaryData, MAX_BOUNDARY_TERMS};
pub use dump::{read_field, read_field_file, write_field, write_field_file};
pub use field::ScalarField;
pub use grid::{DiskGrid, Domain, Grid, NodeClass, SectorGrid};
pub use laplacian::{assemble_laplacian, Laplacian, RingStencil};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("symmetry order m must be at least 3, got {0}")]
    SymmetryOrder(usize),
    #[error("{what} must be at least {min}, got {value}")]
    TooCoarse { what: &'static str, value: usize, min: usize },
    #[error("field has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field value at node {0} is not finite")]
    NonFinite(usize),
    #[error("field and grid do not match")]
    GridMismatch,
    #[error("boundary data must be non-constant g (some a_k with k >= 1 nonzero, amplitude nonzero)")]
    ConstantBoundary,
    #[error("boundary data needs 1..=32 coefficients, got {0}")]
    BoundaryTerms(usize),
    #[error("boundary data has non-finite entries")]
    NonFiniteBoundary,
    #[error("field dump line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Even reflection of a sector field onto the `2m`-fold disk. Every disk value
/// is a bit-identical copy of a sector value.
pub fn reflect_to_disk(
    grid: &SectorGrid,
    field: &ScalarField<SectorGrid>,
) -> Result<ScalarField<DiskGrid>, GeometryError> {
    if field.grid() != grid {
        return Err(GeometryError::GridMismatch);
    }
    let disk = grid.disk();
    let src = field.values();
    let values = (0..disk.node_count())
        .map(|k| {
            let (i, jd) = disk.node_ij(k);
            if i == 0 {
                src[0]
            } else {
                src[grid.index(i, disk.sector_angle_index(jd))]
            }
        })
        .collect();
    ScalarField::new(disk, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reflection_of_constant() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        let d = reflect_to_disk(&g, &ScalarField::constant(g, 1.25)).unwrap();
        assert!(d.values().iter().all(|&v| v == 1.25));
    }

    #[test]
    fn reflection_of_cos_m_theta() {
        for m in [3, 4, 7] {
            let g = SectorGrid::new(m, 12, 9).unwrap();
            let f = ScalarField::from_polar(g, |_, t| (m as f64 * t).cos());
            let d = reflect_to_disk(&g, &f).unwrap();
            let direct = ScalarField::from_polar(g.disk(), |r, t| {
                if r == 0.0 { 1.0 } else { (m as f64 * t).cos() }
            });
            for (a, b) in d.values().iter().zip(direct.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn reflection_rejects_foreign_field() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        let h = SectorGrid::new(3, 8, 5).unwrap();
        assert!(matches!(
            reflect_to_disk(&g, &ScalarField::zeros(h)),
            Err(GeometryError::GridMismatch)
        ));
    }
}
