//! Ground clutter synthesis on iso-range rings and the matching clairvoyant
//! covariance.
//!
//! Each range cell has `N_c` statistically independent scatterers spread
//! uniformly in azimuth on a single iso-range (no range ambiguity). Scatterer
//! powers are uniform and calibrated so that the clutter-to-noise ratio,
//! defined per space-time sample, hits the configured CNR.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{elevation_for_slant_range, AngleVector, ArrayGeometry, PlatformState};
use crate::linalg::{gram_outer, hermitian_eigen, trace_re, CMatrix, CVector};
use crate::steering::{doppler_frequency, spatial_steering, temporal_steering};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Range resolution `c / (2 f_s)` for a given range sample rate.
pub fn range_cell_spacing(sample_rate: f64) -> f64 {
    SPEED_OF_LIGHT / (2.0 * sample_rate)
}

/// `below + 1 + above` slant ranges spaced by `spacing`, centred on `center`.
/// Returns the ranges and the index of the centre cell.
pub fn centered_range_cells(center: f64, spacing: f64, below: usize, above: usize) -> (Vec<f64>, usize) {
    let ranges = (0..below + 1 + above)
        .map(|i| center + spacing * (i as f64 - below as f64))
        .collect();
    (ranges, below)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainModel {
    #[default]
    Isotropic,
    /// Power pattern `max(0, cos γ)` with γ the angle between the incoming
    /// direction and the element's outward normal.
    CosineElement,
}

/// Deterministic amplitude tapers. `Configured` carries one real weight per
/// spatial channel and per pulse; the covariance taper is their outer product.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaperModel {
    #[default]
    Identity,
    Configured { spatial: Vec<f64>, temporal: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClutterScenario {
    pub geometry: ArrayGeometry,
    pub platform: PlatformState,
    pub scatterers_per_ring: usize,
    pub cnr_db: f64,
    /// Slant range of each range cell, meters, strictly increasing.
    pub range_cells: Vec<f64>,
    pub test_cell_index: usize,
    pub noise_power: f64,
    pub gain_model: GainModel,
    pub taper_model: TaperModel,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    pub angle: AngleVector,
    /// Voltage amplitude; the scatterer power is its square.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub data: CVector,
    pub range_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    pub matrix: CMatrix,
    pub label: String,
}

impl Covariance {
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Self {
        Self {
            matrix,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.matrix)
    }

    /// Largest entry of `|R - R^H|` relative to the largest entry of `|R|`.
    pub fn hermitian_error(&self) -> f64 {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = hermitian_eigen(&self.matrix);
        vals.last().copied().unwrap_or(0.0)
    }

    /// Hermitian to 1e-10 and PSD up to `1e-10·trace`.
    pub fn satisfies_invariants(&self) -> bool {
        self.hermitian_error() <= 1e-10 && self.min_eigenvalue() >= -1e-10 * self.trace().abs()
    }
}

impl ClutterScenario {
    /// Table I platform and array, test cell at 1.5·H with `training` cells
    /// split evenly around it at the 5 MHz range resolution.
    pub fn table_one(crab_angle: f64, training: usize, seed: u64) -> Self {
        let platform = PlatformState {
            crab_angle,
            ..PlatformState::table_one()
        };
        let (range_cells, test_cell_index) = centered_range_cells(
            1.5 * platform.height,
            range_cell_spacing(5e6),
            training / 2,
            training - training / 2,
        );
        Self {
            geometry: ArrayGeometry::table_one(),
            platform,
            scatterers_per_ring: 256,
            cnr_db: 30.0,
            range_cells,
            test_cell_index,
            noise_power: 1.0,
            gain_model: GainModel::Isotropic,
            taper_model: TaperModel::Identity,
            seed,
        }
    }

    /// Space-time dimension `N·M·P`.
    pub fn dimension(&self) -> usize {
        self.geometry.channels() * self.platform.pulses
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.platform.validate()?;
        let dim = self.dimension();
        if 4 * self.scatterers_per_ring < dim {
            return Err(Error::invalid(
                "scatterers_per_ring",
                format!(
                    "{} is below N*M*P/4 = {}",
                    self.scatterers_per_ring,
                    dim.div_ceil(4)
                ),
            ));
        }
        if !self.cnr_db.is_finite() {
            return Err(Error::invalid("cnr_db", "must be finite"));
        }
        if !(self.noise_power.is_finite() && self.noise_power >= 0.0) {
            return Err(Error::invalid("noise_power", "must be non-negative"));
        }
        if self.range_cells.is_empty() {
            return Err(Error::invalid("range_cells", "at least one cell required"));
        }
        if self.range_cells.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("range_cells", "must be strictly increasing"));
        }
        if self.range_cells[0] < self.platform.height {
            return Err(Error::RangeAboveHorizon {
                height: self.platform.height,
                range: self.range_cells[0],
            });
        }
        if self.test_cell_index >= self.range_cells.len() {
            return Err(Error::RangeIndex {
                index: self.test_cell_index,
                count: self.range_cells.len(),
            });
        }
        if let TaperModel::Configured { spatial, temporal } = &self.taper_model {
            if spatial.len() != self.geometry.channels() {
                return Err(Error::DimensionMismatch {
                    context: "spatial taper",
                    expected: self.geometry.channels(),
                    actual: spatial.len(),
                });
            }
            if temporal.len() != self.platform.pulses {
                return Err(Error::DimensionMismatch {
                    context: "temporal taper",
                    expected: self.platform.pulses,
                    actual: temporal.len(),
                });
            }
        }
        Ok(())
    }

    fn check_cell(&self, k: usize) -> Result<()> {
        if k >= self.range_cells.len() {
            return Err(Error::RangeIndex {
                index: k,
                count: self.range_cells.len(),
            });
        }
        Ok(())
    }

    /// Depression angle of range cell `k`'s iso-range.
    pub fn elevation(&self, k: usize) -> Result<f64> {
        self.check_cell(k)?;
        elevation_for_slant_range(self.platform.height, self.range_cells[k])
    }

    /// Amplitude gain vector `g` (square roots of element power gains).
    pub fn element_gains(&self, psi: &AngleVector) -> Vec<f64> {
        let channels = self.geometry.channels();
        match self.gain_model {
            GainModel::Isotropic => vec![1.0; channels],
            GainModel::CosineElement => {
                let k = psi.wavevector();
                (0..channels)
                    .map(|c| {
                        let n = c % self.geometry.elements_per_ring;
                        k.dot(&self.geometry.element_normal(n)).max(0.0).sqrt()
                    })
                    .collect()
            }
        }
    }

    /// Unit-amplitude space-time response `(a_t ⊙ s_t) ⊗ (a_s ⊙ g ⊙ s_s)` of a
    /// stationary scatterer.
    pub fn scatterer_response(&self, psi: &AngleVector) -> CVector {
        let fd = doppler_frequency(psi, &self.platform, self.geometry.wavelength);
        let t = temporal_steering(fd, self.platform.pulses).into_values();
        let mut s = spatial_steering(&self.geometry, psi).into_values();
        for (z, g) in s.iter_mut().zip(self.element_gains(psi)) {
            *z *= g;
        }
        let (ts, ss) = match &self.taper_model {
            TaperModel::Identity => (None, None),
            TaperModel::Configured { spatial, temporal } => (Some(temporal), Some(spatial)),
        };
        let channels = s.len();
        CVector::from_fn(t.len() * channels, |idx, _| {
            let (p, c) = (idx / channels, idx % channels);
            let at = ts.map_or(1.0, |w| w[p]);
            let as_ = ss.map_or(1.0, |w| w[c]);
            t[p] * s[c] * (at * as_)
        })
    }

    fn unit_responses(&self, k: usize) -> Result<(Vec<AngleVector>, CMatrix)> {
        let theta = self.elevation(k)?;
        let nc = self.scatterers_per_ring;
        let angles = (0..nc)
            .map(|q| AngleVector::new(TAU * q as f64 / nc as f64, theta))
            .collect::<Result<Vec<_>>>()?;
        let mut responses = CMatrix::zeros(self.dimension(), nc);
        for (q, psi) in angles.iter().enumerate() {
            responses.set_column(q, &self.scatterer_response(psi));
        }
        Ok((angles, responses))
    }

    fn calibrated_amplitude(&self, responses: &CMatrix) -> Result<f64> {
        let unit_trace: f64 = responses.iter().map(|z| z.norm_sqr()).sum();
        let scale = cnr_scale_from_trace(unit_trace, self.dimension(), self.noise_power, self.cnr_db)?;
        Ok(scale.sqrt())
    }
}

/// Scatterers of range cell `k`: azimuths `2πq/N_c` on the cell's iso-range,
/// amplitudes uniform and CNR-calibrated.
pub fn iso_range_scatterers(sc: &ClutterScenario, k: usize) -> Result<Vec<Scatterer>> {
    let (angles, responses) = sc.unit_responses(k)?;
    let amplitude = sc.calibrated_amplitude(&responses)?;
    Ok(angles
        .into_iter()
        .map(|angle| Scatterer { angle, amplitude })
        .collect())
}

/// Scale `c` with `trace(c·R_clutter) / (dim·σ_n²) = 10^(cnr_db/10)`.
pub fn cnr_scale(unnormalized: &CMatrix, noise_power: f64, cnr_db: f64) -> Result<f64> {
    cnr_scale_from_trace(trace_re(unnormalized), unnormalized.nrows(), noise_power, cnr_db)
}

fn cnr_scale_from_trace(trace: f64, dim: usize, noise_power: f64, cnr_db: f64) -> Result<f64> {
    if !(trace > 0.0) {
        return Err(Error::ZeroClutter);
    }
    Ok(10f64.powf(cnr_db / 10.0) * dim as f64 * noise_power / trace)
}

/// Clairvoyant covariance `Σ_q σ_s² r_q r_q^H + σ_n² I` of range cell `k`,
/// where `r_q` already carries gain and taper.
pub fn clairvoyant_ccm(sc: &ClutterScenario, k: usize) -> Result<Covariance> {
    let (_, mut responses) = sc.unit_responses(k)?;
    let amplitude = sc.calibrated_amplitude(&responses)?;
    responses.scale_mut(amplitude);
    let mut r = gram_outer(&responses);
    for i in 0..r.nrows() {
        r[(i, i)] += Complex64::new(sc.noise_power, 0.0);
    }
    Ok(Covariance::new(r, format!("clairvoyant[{k}]")))
}

/// Random stream for range cell `k`: the scenario seed picks the key and the
/// cell index picks the stream, so cells can be drawn in any order.
pub fn cell_rng(seed: u64, k: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// One clutter-plus-noise snapshot of range cell `k`, drawn from the cell's
/// own random stream.
pub fn clutter_snapshot(sc: &ClutterScenario, k: usize) -> Result<Snapshot> {
    let mut rng = cell_rng(sc.seed, k);
    clutter_snapshot_with_rng(sc, k, &mut rng)
}

pub fn clutter_snapshot_with_rng<R: rand::Rng + ?Sized>(
    sc: &ClutterScenario,
    k: usize,
    rng: &mut R,
) -> Result<Snapshot> {
    let dim = sc.dimension();
    let mut data = CVector::zeros(dim);
    if sc.scatterers_per_ring > 0 {
        let (_, responses) = sc.unit_responses(k)?;
        let amplitude = sc.calibrated_amplitude(&responses)?;
        let reflectivity = CVector::from_fn(responses.ncols(), |_, _| complex_normal(rng) * amplitude);
        data += &responses * reflectivity;
    }
    let sigma = sc.noise_power.sqrt();
    for z in data.iter_mut() {
        *z += complex_normal(rng) * sigma;
    }
    Ok(Snapshot { data, range_index: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;

    fn small(crab: f64) -> ClutterScenario {
        let mut sc = ClutterScenario::table_one(crab, 4, 11);
        sc.geometry.rings = 2;
        sc.geometry.elements_per_ring = 2;
        sc.platform.pulses = 4;
        sc.scatterers_per_ring = 16;
        sc
    }

    #[test]
    fn table_one_layout() {
        let sc = ClutterScenario::table_one(0.0, 40, 1);
        sc.validate().unwrap();
        assert_eq!(sc.range_cells.len(), 41);
        assert_eq!(sc.test_cell_index, 20);
        assert!((sc.range_cells[20] - 4500.0).abs() < 1e-9);
        assert!((sc.range_cells[21] - sc.range_cells[20] - 29.9792458).abs() < 1e-9);
    }

    #[test]
    fn scatterer_layout() {
        let mut sc = small(0.0);
        sc.scatterers_per_ring = 4;
        sc.platform.pulses = 2;
        sc.geometry.rings = 1;
        sc.geometry.elements_per_ring = 2;
        let q = iso_range_scatterers(&sc, sc.test_cell_index).unwrap();
        let az: Vec<f64> = q.iter().map(|s| s.angle.azimuth()).collect();
        let expect = [0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0];
        for (a, e) in az.iter().zip(expect) {
            assert!((a - e).abs() < 1e-12);
        }
        let theta = (2.0f64 / 3.0).asin();
        assert!(q.iter().all(|s| (s.angle.elevation() - theta).abs() < 1e-12));

        let other = iso_range_scatterers(&sc, 0).unwrap();
        for (a, b) in q.iter().zip(&other) {
            assert_eq!(a.angle.azimuth(), b.angle.azimuth());
            assert!(a.angle.elevation() < b.angle.elevation());
        }
    }

    #[test]
    fn cnr_scale_examples() {
        let eye = |s: f64| CMatrix::identity(256, 256).scale(s);
        assert!((cnr_scale(&eye(1.0), 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((cnr_scale(&eye(1.0), 1.0, 30.0).unwrap() - 1000.0).abs() < 1e-9);
        assert!((cnr_scale(&eye(2.0), 1.0, 30.0).unwrap() - 500.0).abs() < 1e-9);
        assert!(matches!(cnr_scale(&eye(0.0), 1.0, 30.0), Err(Error::ZeroClutter)));
    }

    #[test]
    fn single_scatterer_is_rank_one() {
        let mut sc = small(0.0);
        sc.noise_power = 0.0;
        sc.scatterers_per_ring = 1;
        // bypass the density check: this is a direct construction test
        let r = clairvoyant_ccm(&sc, 0).unwrap();
        let (vals, _) = hermitian_eigen(&r.matrix);
        assert!(vals[1].abs() < 1e-9 * vals[0]);
        let psi = AngleVector::new(0.0, sc.elevation(0).unwrap()).unwrap();
        let s = sc.scatterer_response(&psi);
        let scaled = (&s * s.adjoint()).scale(r.trace() / 16.0);
        assert!(frobenius(&(scaled - &r.matrix)) < 1e-9 * frobenius(&r.matrix));
    }

    #[test]
    fn clairvoyant_trace_and_cnr() {
        let sc = ClutterScenario::table_one(0.5, 2, 3);
        let r = clairvoyant_ccm(&sc, 1).unwrap();
        let dim = sc.dimension() as f64;
        let clutter_trace = r.trace() - dim * sc.noise_power;
        assert!((clutter_trace / (dim * sc.noise_power) - 1000.0).abs() < 1e-9 * 1000.0);
        // per-atom trace identity: N_c atoms of power σ_s² and unit gain
        let q = iso_range_scatterers(&sc, 1).unwrap();
        let expected: f64 = q.iter().map(|s| s.amplitude.powi(2)).sum::<f64>() * dim;
        assert!((clutter_trace - expected).abs() < 1e-9 * expected);
        assert!(r.satisfies_invariants());
    }

    #[test]
    fn trace_identity_with_cosine_gain() {
        let mut sc = small(0.2);
        sc.gain_model = GainModel::CosineElement;
        sc.cnr_db = 10.0;
        let r = clairvoyant_ccm(&sc, 2).unwrap();
        let q = iso_range_scatterers(&sc, 2).unwrap();
        let pulses = sc.platform.pulses as f64;
        let expected: f64 = q
            .iter()
            .map(|s| {
                let g2: f64 = sc.element_gains(&s.angle).iter().map(|g| g * g).sum();
                s.amplitude.powi(2) * g2 * pulses
            })
            .sum();
        let clutter_trace = r.trace() - sc.dimension() as f64 * sc.noise_power;
        assert!((clutter_trace - expected).abs() < 1e-9 * expected);
        assert!((clutter_trace / sc.dimension() as f64 - 10.0).abs() < 1e-9);
    }

    #[test]
    fn empty_and_noiseless_snapshot_is_zero() {
        let mut sc = small(0.0);
        sc.scatterers_per_ring = 0;
        sc.noise_power = 0.0;
        let x = clutter_snapshot(&sc, 0).unwrap();
        assert!(x.data.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn snapshot_is_reproducible_and_order_independent() {
        let sc = small(0.3);
        let a = clutter_snapshot(&sc, 2).unwrap();
        let _ = clutter_snapshot(&sc, 1).unwrap();
        let b = clutter_snapshot(&sc, 2).unwrap();
        assert_eq!(a, b);
        let c = clutter_snapshot(&sc, 3).unwrap();
        assert_ne!(a.data, c.data);
        assert_eq!(a.range_index, 2);
        assert!(a.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }

    #[test]
    fn validation_rules() {
        let mut sc = ClutterScenario::table_one(0.0, 4, 1);
        sc.scatterers_per_ring = 63;
        assert!(sc.validate().is_err());
        let mut sc = ClutterScenario::table_one(0.0, 4, 1);
        sc.range_cells.swap(0, 1);
        assert!(sc.validate().is_err());
        let mut sc = ClutterScenario::table_one(0.0, 4, 1);
        sc.range_cells[0] = 2000.0;
        assert!(sc.validate().is_err());
        let mut sc = ClutterScenario::table_one(0.0, 4, 1);
        sc.taper_model = TaperModel::Configured {
            spatial: vec![1.0; 3],
            temporal: vec![1.0; 16],
        };
        assert!(sc.validate().is_err());
    }

    #[test]
    fn ridge_confinement() {
        let sc = ClutterScenario::table_one(0.4, 2, 1);
        let q = iso_range_scatterers(&sc, 0).unwrap();
        for s in q.iter().step_by(17) {
            let r = sc.scatterer_response(&s.angle);
            let fd = doppler_frequency(&s.angle, &sc.platform, sc.geometry.wavelength);
            // second pulse block is first block times exp(j 2π f_d)
            let ratio = r[16] / r[0];
            assert!((ratio - Complex64::from_polar(1.0, TAU * fd)).norm() < 1e-12);
        }
    }
}
