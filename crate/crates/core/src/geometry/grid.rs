use std::f64::consts::PI;
use std::fmt;

use super::GeometryError;

/// Which polar domain a grid covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Sector,
    Disk,
}

impl Domain {
    pub fn as_str(&self) -> &'static str {
        match self {
            Domain::Sector => "sector",
            Domain::Disk => "disk",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Origin,
    Interior,
    ArcDirichlet,
    RadialNeumann,
}

/// Common interface of the sector and the reflected disk.
///
/// Nodes are the origin (index 0) followed by rings `i = 1..=nr`, each holding
/// `angular_nodes()` nodes. Cells are indexed `(i, jc)` with `i = 0..nr`; cell
/// `(0, jc)` is the triangle fan touching the origin.
pub trait Grid: Copy + PartialEq + fmt::Debug + Send + Sync {
    const DOMAIN: Domain;

    fn from_parts(m: usize, nr: usize, ntheta: usize) -> Result<Self, GeometryError>;
    fn sector(&self) -> SectorGrid;
    fn angular_nodes(&self) -> usize;
    fn angular_cells(&self) -> usize;

    fn m(&self) -> usize {
        self.sector().m
    }
    fn nr(&self) -> usize {
        self.sector().nr
    }
    fn ntheta(&self) -> usize {
        self.sector().ntheta
    }
    fn dr(&self) -> f64 {
        self.sector().dr
    }
    fn dtheta(&self) -> f64 {
        self.sector().dtheta
    }

    fn node_count(&self) -> usize {
        1 + self.nr() * self.angular_nodes()
    }

    /// Index of node `(i, j)`; every `(0, j)` maps to the origin. Angular
    /// indices wrap on the disk.
    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            0
        } else {
            let n = self.angular_nodes();
            let j = if Self::DOMAIN == Domain::Disk { j % n } else { j };
            1 + (i - 1) * n + j
        }
    }

    /// Inverse of [`Grid::index`]; the origin reports `(0, 0)`.
    #[inline]
    fn node_ij(&self, idx: usize) -> (usize, usize) {
        if idx == 0 {
            (0, 0)
        } else {
            let n = self.angular_nodes();
            (1 + (idx - 1) / n, (idx - 1) % n)
        }
    }

    #[inline]
    fn radius(&self, i: usize) -> f64 {
        i as f64 / self.nr() as f64
    }

    #[inline]
    fn angle(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    #[inline]
    fn polar(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.node_ij(idx);
        if i == 0 {
            (0.0, 0.0)
        } else {
            (self.radius(i), self.angle(j))
        }
    }

    #[inline]
    fn point(&self, idx: usize) -> [f64; 2] {
        let (r, t) = self.polar(idx);
        [r * t.cos(), r * t.sin()]
    }

    /// Corner node indices of cell `(i, jc)`: inner `jc`, inner `jc+1`, outer
    /// `jc`, outer `jc+1`. The inner pair is the origin twice when `i == 0`.
    #[inline]
    fn cell_corners(&self, i: usize, jc: usize) -> [usize; 4] {
        [
            self.index(i, jc),
            self.index(i, jc + 1),
            self.index(i + 1, jc),
            self.index(i + 1, jc + 1),
        ]
    }

    /// Polar centre `(r, θ)` of cell `(i, jc)`.
    #[inline]
    fn cell_center(&self, i: usize, jc: usize) -> (f64, f64) {
        (
            (i as f64 + 0.5) * self.dr(),
            (jc as f64 + 0.5) * self.dtheta(),
        )
    }

    /// Exact area of the annular cell `(i, jc)`.
    #[inline]
    fn cell_area(&self, i: usize, _jc: usize) -> f64 {
        (i as f64 + 0.5) * self.dr() * self.dr() * self.dtheta()
    }
}

/// Polar grid on the sector `0 < r < 1, 0 < θ < π/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGrid {
    pub m: usize,
    pub nr: usize,
    pub ntheta: usize,
    pub dr: f64,
    pub dtheta: f64,
}

impl SectorGrid {
    pub fn new(m: usize, nr: usize, ntheta: usize) -> Result<Self, GeometryError> {
        if m < 3 {
            return Err(GeometryError::SymmetryOrder(m));
        }
        if nr < 8 {
            return Err(GeometryError::TooCoarse { what: "nr", value: nr, min: 8 });
        }
        if ntheta < 4 {
            return Err(GeometryError::TooCoarse { what: "ntheta", value: ntheta, min: 4 });
        }
        Ok(SectorGrid {
            m,
            nr,
            ntheta,
            dr: 1.0 / nr as f64,
            dtheta: PI / (m as f64 * ntheta as f64),
        })
    }

    pub fn opening_angle(&self) -> f64 {
        PI / self.m as f64
    }

    pub fn classify(&self, idx: usize) -> NodeClass {
        let (i, j) = self.node_ij(idx);
        if i == 0 {
            NodeClass::Origin
        } else if i == self.nr {
            NodeClass::ArcDirichlet
        } else if j == 0 || j == self.ntheta {
            NodeClass::RadialNeumann
        } else {
            NodeClass::Interior
        }
    }

    pub fn disk(&self) -> DiskGrid {
        DiskGrid { sector: *self }
    }

    /// Node indices on the Dirichlet arc, in increasing `j`.
    pub fn arc_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.ntheta).map(move |j| self.index(self.nr, j))
    }
}

impl Grid for SectorGrid {
    const DOMAIN: Domain = Domain::Sector;

    fn from_parts(m: usize, nr: usize, ntheta: usize) -> Result<Self, GeometryError> {
        SectorGrid::new(m, nr, ntheta)
    }
    fn sector(&self) -> SectorGrid {
        *self
    }
    fn angular_nodes(&self) -> usize {
        self.ntheta + 1
    }
    fn angular_cells(&self) -> usize {
        self.ntheta
    }
}

/// The `2m`-fold reflected copy of a sector grid covering the full disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskGrid {
    sector: SectorGrid,
}

impl DiskGrid {
    pub fn new(m: usize, nr: usize, ntheta: usize) -> Result<Self, GeometryError> {
        Ok(SectorGrid::new(m, nr, ntheta)?.disk())
    }

    /// Sector angular index that disk angular index `jd` is a mirror copy of.
    #[inline]
    pub fn sector_angle_index(&self, jd: usize) -> usize {
        let n = self.sector.ntheta;
        let (s, t) = (jd / n, jd % n);
        if s % 2 == 0 {
            t
        } else {
            n - t
        }
    }

    /// Angular index of the mirror image of `jd` across the line `θ = l·π/m`.
    #[inline]
    pub fn reflect_angle_index(&self, jd: usize, l: usize) -> usize {
        let n = self.angular_nodes();
        let two_l = (2 * l * self.sector.ntheta) % n;
        (two_l + n - jd % n) % n
    }

    /// Node index of the mirror image of `idx` across `θ = l·π/m`.
    pub fn reflect_node(&self, idx: usize, l: usize) -> usize {
        let (i, j) = self.node_ij(idx);
        if i == 0 {
            0
        } else {
            self.index(i, self.reflect_angle_index(j, l))
        }
    }
}

impl Grid for DiskGrid {
    const DOMAIN: Domain = Domain::Disk;

    fn from_parts(m: usize, nr: usize, ntheta: usize) -> Result<Self, GeometryError> {
        DiskGrid::new(m, nr, ntheta)
    }
    fn sector(&self) -> SectorGrid {
        self.sector
    }
    fn angular_nodes(&self) -> usize {
        2 * self.sector.m * self.sector.ntheta
    }
    fn angular_cells(&self) -> usize {
        self.angular_nodes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_sector_counts() {
        let g = SectorGrid::new(3, 8, 4).unwrap();
        assert_eq!(g.node_count(), 1 + 8 * 5);
        let mut counts = [0usize; 4];
        for idx in 0..g.node_count() {
            counts[match g.classify(idx) {
                NodeClass::Origin => 0,
                NodeClass::Interior => 1,
                NodeClass::ArcDirichlet => 2,
                NodeClass::RadialNeumann => 3,
            }] += 1;
        }
        assert_eq!(counts, [1, 7 * 3, 5, 7 * 2]);
        assert_eq!(g.arc_nodes().count(), 5);
        assert_abs_diff_eq!(g.opening_angle(), PI / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn spacing() {
        let g = SectorGrid::new(4, 16, 8).unwrap();
        assert_abs_diff_eq!(g.dtheta, PI / 32.0, epsilon = 1e-16);
        assert_eq!(g.dr, 1.0 / 16.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(SectorGrid::new(2, 16, 8), Err(GeometryError::SymmetryOrder(2))));
        assert!(SectorGrid::new(3, 7, 8).is_err());
        assert!(SectorGrid::new(3, 8, 3).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let s = SectorGrid::new(3, 9, 5).unwrap();
        let d = s.disk();
        for idx in 1..s.node_count() {
            let (i, j) = s.node_ij(idx);
            assert_eq!(s.index(i, j), idx);
        }
        for idx in 1..d.node_count() {
            let (i, j) = d.node_ij(idx);
            assert_eq!(d.index(i, j), idx);
        }
        assert_eq!(d.angular_nodes(), 2 * 3 * 5);
        assert_eq!(d.index(2, d.angular_nodes()), d.index(2, 0));
    }

    #[test]
    fn coordinates_are_bit_reproducible() {
        let s = SectorGrid::new(5, 12, 7).unwrap();
        let d = s.disk();
        for i in 1..=12 {
            for j in 0..=7 {
                assert_eq!(s.polar(s.index(i, j)), d.polar(d.index(i, j)));
            }
        }
    }

    #[test]
    fn reflection_is_an_involution() {
        let d = DiskGrid::new(3, 8, 6).unwrap();
        for l in 0..2 * 3 {
            for idx in 0..d.node_count() {
                assert_eq!(d.reflect_node(d.reflect_node(idx, l), l), idx);
            }
        }
    }

    #[test]
    fn mirror_map_matches_geometry() {
        let d = DiskGrid::new(4, 8, 5).unwrap();
        let s = d.sector();
        for jd in 0..d.angular_nodes() {
            let js = d.sector_angle_index(jd);
            // the sector copy has the same angular distance to the nearest symmetry line
            let t = d.angle(jd);
            let folded = {
                let w = s.opening_angle();
                let k = (t / w).floor();
                let rem = t - k * w;
                if (k as usize).is_multiple_of(2) { rem } else { w - rem }
            };
            assert_abs_diff_eq!(s.angle(js), folded, epsilon = 1e-12);
        }
    }

    #[test]
    fn cell_areas_tile_the_domain() {
        let d = DiskGrid::new(3, 10, 4).unwrap();
        let mut a = 0.0;
        for i in 0..d.nr() {
            for jc in 0..d.angular_cells() {
                a += d.cell_area(i, jc);
            }
        }
        assert_abs_diff_eq!(a, PI, epsilon = 1e-12);
    }
}
