//! Spatial, temporal and space-time steering vectors.
//!
//! Doppler is expressed in normalized cycles per PRI throughout; multiply by
//! `1/T` for Hz. Space-time vectors are `temporal ⊗ spatial`, so the pulse
//! index varies slowest.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::geometry::{AngleVector, ArrayGeometry, PlatformState};
use crate::linalg::{kron, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringKind {
    Spatial,
    Temporal,
    SpaceTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    values: CVector,
    kind: SteeringKind,
}

impl SteeringVector {
    pub fn values(&self) -> &CVector {
        &self.values
    }

    pub fn into_values(self) -> CVector {
        self.values
    }

    pub fn kind(&self) -> SteeringKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn spatial_steering(geom: &ArrayGeometry, psi: &AngleVector) -> SteeringVector {
    let k = psi.wavevector() * (TAU / geom.wavelength);
    let values = CVector::from_iterator(
        geom.channels(),
        geom.positions()
            .into_iter()
            .map(|pos| Complex64::from_polar(1.0, k.dot(&pos))),
    );
    SteeringVector {
        values,
        kind: SteeringKind::Spatial,
    }
}

/// Normalized Doppler `2 (k·v) T / λ` of a stationary scatterer at `psi`.
pub fn doppler_frequency(psi: &AngleVector, platform: &PlatformState, wavelength: f64) -> f64 {
    2.0 * psi.wavevector().dot(&platform.velocity()) * platform.pri / wavelength
}

pub fn temporal_steering(doppler: f64, pulses: usize) -> SteeringVector {
    let values = CVector::from_iterator(
        pulses,
        (0..pulses).map(|p| Complex64::from_polar(1.0, TAU * doppler * p as f64)),
    );
    SteeringVector {
        values,
        kind: SteeringKind::Temporal,
    }
}

/// Space-time response of a stationary scatterer at `psi`.
pub fn space_time_steering(
    geom: &ArrayGeometry,
    psi: &AngleVector,
    platform: &PlatformState,
) -> SteeringVector {
    let fd = doppler_frequency(psi, platform, geom.wavelength);
    space_time_steering_at(geom, psi, fd, platform.pulses)
}

/// Space-time steering with an explicit Doppler, used for moving targets
/// and dictionary atoms. The spatial factor is the same as for a stationary
/// scatterer at `psi`.
pub fn space_time_steering_at(
    geom: &ArrayGeometry,
    psi: &AngleVector,
    doppler: f64,
    pulses: usize,
) -> SteeringVector {
    let t = temporal_steering(doppler, pulses);
    let s = spatial_steering(geom, psi);
    SteeringVector {
        values: kron(&t.values, &s.values),
        kind: SteeringKind::SpaceTime,
    }
}
