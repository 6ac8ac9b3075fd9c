//! Angle-Doppler grid and the per-range-cell overcomplete space-time
//! dictionary.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::clutter::ClutterScenario;
use crate::error::{Error, Result};
use crate::geometry::{AngleVector, ArrayGeometry};
use crate::linalg::{CMatrix, CVector};
use crate::steering::{spatial_steering, temporal_steering};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub zoom_spatial: f64,
    pub zoom_temporal: f64,
    pub azimuth_bins: usize,
    pub doppler_bins: usize,
}

impl GridSpec {
    /// Azimuth of bin `i`: `2π(i+1)/N_s`, wrapped into `[0, 2π)`.
    pub fn azimuth(&self, i: usize) -> f64 {
        (TAU * (i + 1) as f64 / self.azimuth_bins as f64).rem_euclid(TAU)
    }

    /// Normalized Doppler of bin `j`: `-1/2 + j/N_d`.
    pub fn doppler(&self, j: usize) -> f64 {
        -0.5 + j as f64 / self.doppler_bins as f64
    }

    pub fn azimuths(&self) -> Vec<f64> {
        (0..self.azimuth_bins).map(|i| self.azimuth(i)).collect()
    }

    pub fn dopplers(&self) -> Vec<f64> {
        (0..self.doppler_bins).map(|j| self.doppler(j)).collect()
    }

    pub fn atoms(&self) -> usize {
        self.azimuth_bins * self.doppler_bins
    }

    /// Column index of grid node `(azimuth i, doppler j)`; azimuth varies fastest.
    pub fn column(&self, i: usize, j: usize) -> usize {
        j * self.azimuth_bins + i
    }

    /// Inverse of [`GridSpec::column`].
    pub fn node(&self, column: usize) -> (usize, usize) {
        (column % self.azimuth_bins, column / self.azimuth_bins)
    }
}

/// Discretize azimuth into `round(ρ_s·N·M)` and Doppler into `round(ρ_t·P)` bins.
pub fn build_grid(
    geom: &ArrayGeometry,
    pulses: usize,
    zoom_spatial: f64,
    zoom_temporal: f64,
) -> Result<GridSpec> {
    for zoom in [zoom_spatial, zoom_temporal] {
        if !(zoom >= 1.0) || !zoom.is_finite() {
            return Err(Error::NotOvercomplete { zoom });
        }
    }
    let grid = GridSpec {
        zoom_spatial,
        zoom_temporal,
        azimuth_bins: (zoom_spatial * geom.channels() as f64).round() as usize,
        doppler_bins: (zoom_temporal * pulses as f64).round() as usize,
    };
    if grid.atoms() <= geom.channels() * pulses {
        log::warn!(
            "dictionary with {} atoms in dimension {} is not overcomplete",
            grid.atoms(),
            geom.channels() * pulses
        );
    }
    Ok(grid)
}

/// Space-time atoms on the grid for one range cell. Every atom is
/// `temporal(f_j) ⊗ spatial(φ_i, θ_k)`, so the two factor matrices are kept
/// alongside the dense matrix.
#[derive(Debug, Clone)]
pub struct Dictionary {
    pub atoms: CMatrix,
    pub grid: GridSpec,
    pub range_index: usize,
    pub elevation: f64,
    spatial: CMatrix,
    temporal: CMatrix,
}

impl Dictionary {
    pub fn build(sc: &ClutterScenario, k: usize, grid: &GridSpec) -> Result<Self> {
        let elevation = sc.elevation(k)?;
        Self::at_elevation(&sc.geometry, sc.platform.pulses, elevation, k, grid)
    }

    /// Dictionary for an arbitrary elevation.
    pub fn at_elevation(
        geom: &ArrayGeometry,
        pulses: usize,
        elevation: f64,
        range_index: usize,
        grid: &GridSpec,
    ) -> Result<Self> {
        let channels = geom.channels();
        let mut spatial = CMatrix::zeros(channels, grid.azimuth_bins);
        for i in 0..grid.azimuth_bins {
            let psi = AngleVector::new(grid.azimuth(i), elevation)?;
            spatial.set_column(i, spatial_steering(geom, &psi).values());
        }
        let mut temporal = CMatrix::zeros(pulses, grid.doppler_bins);
        for j in 0..grid.doppler_bins {
            temporal.set_column(j, temporal_steering(grid.doppler(j), pulses).values());
        }
        let dim = channels * pulses;
        let mut atoms = CMatrix::zeros(dim, grid.atoms());
        for j in 0..grid.doppler_bins {
            for i in 0..grid.azimuth_bins {
                let mut col = atoms.column_mut(grid.column(i, j));
                for p in 0..pulses {
                    let t = temporal[(p, j)];
                    for c in 0..channels {
                        col[p * channels + c] = t * spatial[(c, i)];
                    }
                }
            }
        }
        Ok(Self {
            atoms,
            grid: grid.clone(),
            range_index,
            elevation,
            spatial,
            temporal,
        })
    }

    pub fn dimension(&self) -> usize {
        self.atoms.nrows()
    }

    pub fn len(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.ncols() == 0
    }

    pub fn atom(&self, column: usize) -> CVector {
        self.atoms.column(column).into_owned()
    }

    /// Spatial factor matrix, one column per azimuth bin.
    pub fn spatial_factors(&self) -> &CMatrix {
        &self.spatial
    }

    /// Temporal factor matrix, one column per Doppler bin.
    pub fn temporal_factors(&self) -> &CMatrix {
        &self.temporal
    }

    /// Columns restricted to `support`.
    pub fn restrict(&self, support: &[usize]) -> CMatrix {
        self.atoms.select_columns(support)
    }

    /// `max_{a≠b} |φ_a^H φ_b| / (N·M·P)`.
    ///
    /// Atom inner products factor into temporal and spatial parts, each at
    /// most one after normalization, so the maximum is attained with one
    /// factor on its diagonal.
    pub fn mutual_coherence(&self) -> f64 {
        fn max_off_diagonal(f: &CMatrix) -> f64 {
            let g = f.adjoint() * f;
            let n = f.nrows() as f64;
            let mut best: f64 = 0.0;
            for a in 0..g.nrows() {
                for b in 0..g.ncols() {
                    if a != b {
                        best = best.max(g[(a, b)].norm() / n);
                    }
                }
            }
            best
        }
        max_off_diagonal(&self.spatial).max(max_off_diagonal(&self.temporal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PlatformState;
    use crate::linalg::kron;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    #[test]
    fn grid_sizes() {
        let g = ArrayGeometry::table_one();
        let grid = build_grid(&g, 16, 4.0, 4.0).unwrap();
        assert_eq!((grid.azimuth_bins, grid.doppler_bins, grid.atoms()), (64, 64, 4096));
        let square = build_grid(&g, 16, 1.0, 1.0).unwrap();
        assert_eq!((square.azimuth_bins, square.doppler_bins), (16, 16));
        assert!(matches!(build_grid(&g, 16, 0.5, 4.0), Err(Error::NotOvercomplete { .. })));
        assert!(build_grid(&g, 16, 4.0, 0.9).is_err());
    }

    #[test]
    fn grid_axes() {
        let grid = build_grid(&ArrayGeometry::table_one(), 16, 4.0, 4.0).unwrap();
        assert_eq!(grid.doppler(0), -0.5);
        assert!((grid.doppler(63) - (0.5 - 1.0 / 64.0)).abs() < 1e-15);
        assert!((grid.azimuth(0) - TAU / 64.0).abs() < 1e-15);
        assert_eq!(grid.azimuth(63), 0.0);
        assert_eq!(grid.node(grid.column(5, 7)), (5, 7));
    }

    #[test]
    fn shape_and_unit_norm_columns() {
        let sc = ClutterScenario::table_one(0.0, 2, 1);
        let grid = build_grid(&sc.geometry, 16, 2.0, 2.0).unwrap();
        let d = Dictionary::build(&sc, 0, &grid).unwrap();
        assert_eq!(d.atoms.shape(), (256, 32 * 32));
        for c in (0..d.len()).step_by(37) {
            let n2: f64 = d.atoms.column(c).iter().map(|z| z.norm_sqr()).sum();
            assert!((n2 - 256.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_doppler_column_on_collapsed_array() {
        let geom = ArrayGeometry::new(2, 3, 1e-300, 1e-300, 0.3).unwrap();
        let grid = build_grid(&geom, 4, 2.0, 2.0).unwrap();
        let d = Dictionary::at_elevation(&geom, 4, 0.5, 0, &grid).unwrap();
        let j = grid.dopplers().iter().position(|&f| f == 0.0).unwrap();
        let col = d.atom(grid.column(3, j));
        assert!(col.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn atoms_decouple() {
        let sc = ClutterScenario::table_one(0.3, 2, 1);
        let grid = build_grid(&sc.geometry, 16, 4.0, 4.0).unwrap();
        let d = Dictionary::build(&sc, 1, &grid).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let c = rng.gen_range(0..d.len());
            let (i, j) = grid.node(c);
            let psi = AngleVector::new(grid.azimuth(i), d.elevation).unwrap();
            let expect = kron(
                temporal_steering(grid.doppler(j), 16).values(),
                spatial_steering(&sc.geometry, &psi).values(),
            );
            let diff = (d.atom(c) - expect).amax();
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn range_dependence_only_through_elevation() {
        let sc = ClutterScenario::table_one(0.3, 4, 1);
        let grid = build_grid(&sc.geometry, 16, 2.0, 2.0).unwrap();
        let a = Dictionary::build(&sc, 0, &grid).unwrap();
        let b = Dictionary::build(&sc, 4, &grid).unwrap();
        assert_eq!(a.temporal_factors(), b.temporal_factors());
        assert_ne!(a.spatial_factors(), b.spatial_factors());
        assert!(a.elevation > b.elevation);
    }

    #[test]
    fn on_grid_scatterer_best_atom() {
        let sc = ClutterScenario::table_one(0.0, 2, 1);
        let grid = build_grid(&sc.geometry, 16, 2.0, 2.0).unwrap();
        let d = Dictionary::build(&sc, 1, &grid).unwrap();
        let p = PlatformState::table_one();
        for &(i, j) in &[(3usize, 9usize), (17, 0), (31, 20)] {
            let psi = AngleVector::new(grid.azimuth(i), d.elevation).unwrap();
            let s = crate::steering::space_time_steering_at(&sc.geometry, &psi, grid.doppler(j), p.pulses);
            let corr = d.atoms.ad_mul(s.values());
            // exhaustive scan
            let best = (0..corr.len())
                .max_by(|&a, &b| corr[a].norm().total_cmp(&corr[b].norm()))
                .unwrap();
            assert_eq!(best, grid.column(i, j));
        }
    }

    #[test]
    fn coherence_below_one() {
        let sc = ClutterScenario::table_one(0.0, 2, 1);
        let grid = build_grid(&sc.geometry, 16, 4.0, 4.0).unwrap();
        let d = Dictionary::build(&sc, 1, &grid).unwrap();
        let mu = d.mutual_coherence();
        assert!(mu > 0.0 && mu < 1.0, "coherence {mu}");
    }
}
