//! Coordinate system and cylindrical conformal array layout.
//!
//! The cylinder axis is the y axis. Ring `m` sits at `y = d·m` and its
//! elements are spread uniformly on a circle of radius `r` in the x-z plane,
//! element 0 pointing straight down. Channels are ordered element-fastest
//! within a ring, ring index slower.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Azimuth/elevation pair, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleVector {
    azimuth: f64,
    elevation: f64,
}

impl AngleVector {
    /// Azimuth is wrapped into `[0, 2π)`; elevation must lie in `[-π/2, π/2]`.
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() {
            return Err(Error::invalid("azimuth", "must be finite"));
        }
        if !(-PI / 2.0..=PI / 2.0).contains(&elevation) {
            return Err(Error::invalid(
                "elevation",
                format!("{elevation} outside [-pi/2, pi/2]"),
            ));
        }
        let mut azimuth = azimuth.rem_euclid(TAU);
        if azimuth >= TAU {
            azimuth = 0.0;
        }
        Ok(Self { azimuth, elevation })
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    /// Unit vector orthogonal to the incoming planar wavefront.
    pub fn wavevector(&self) -> Vector3<f64> {
        let (st, ct) = self.elevation.sin_cos();
        let (sp, cp) = self.azimuth.sin_cos();
        Vector3::new(ct * cp, ct * sp, -st)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rings: usize,
    pub elements_per_ring: usize,
    /// Inter-ring spacing `d`, meters.
    pub ring_spacing: f64,
    /// Ring radius `r`, meters.
    pub ring_radius: f64,
    pub wavelength: f64,
}

impl ArrayGeometry {
    pub fn new(
        rings: usize,
        elements_per_ring: usize,
        ring_spacing: f64,
        ring_radius: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let g = Self {
            rings,
            elements_per_ring,
            ring_spacing,
            ring_radius,
            wavelength,
        };
        g.validate()?;
        Ok(g)
    }

    /// 4 rings of 4 elements, d = r = 0.15 m, λ = 0.3 m.
    pub fn table_one() -> Self {
        Self {
            rings: 4,
            elements_per_ring: 4,
            ring_spacing: 0.15,
            ring_radius: 0.15,
            wavelength: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rings == 0 {
            return Err(Error::invalid("rings", "must be at least 1"));
        }
        if self.elements_per_ring == 0 {
            return Err(Error::invalid("elements_per_ring", "must be at least 1"));
        }
        for (name, v) in [
            ("ring_spacing", self.ring_spacing),
            ("ring_radius", self.ring_radius),
            ("wavelength", self.wavelength),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Number of spatial channels `N·M`.
    pub fn channels(&self) -> usize {
        self.rings * self.elements_per_ring
    }

    /// Angular position of element `n` around its ring.
    pub fn element_angle(&self, element: usize) -> f64 {
        TAU * element as f64 / self.elements_per_ring as f64
    }

    /// Position of element `element` on ring `ring` (both zero-based), meters.
    ///
    /// Panics if either index is out of range.
    pub fn element_position(&self, ring: usize, element: usize) -> Vector3<f64> {
        assert!(ring < self.rings, "ring index {ring} out of range");
        assert!(
            element < self.elements_per_ring,
            "element index {element} out of range"
        );
        let (s, c) = self.element_angle(element).sin_cos();
        Vector3::new(
            self.ring_radius * s,
            self.ring_spacing * ring as f64,
            -self.ring_radius * c,
        )
    }

    /// Outward normal of an element's mounting point on the cylinder.
    pub fn element_normal(&self, element: usize) -> Vector3<f64> {
        let (s, c) = self.element_angle(element).sin_cos();
        Vector3::new(s, 0.0, -c)
    }

    /// All element positions in channel order.
    pub fn positions(&self) -> Vec<Vector3<f64>> {
        (0..self.rings)
            .flat_map(|m| (0..self.elements_per_ring).map(move |n| (m, n)))
            .map(|(m, n)| self.element_position(m, n))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformState {
    /// m/s
    pub speed: f64,
    /// Angle between flight direction and cylinder axis, radians.
    pub crab_angle: f64,
    /// m
    pub height: f64,
    /// Pulse repetition interval, seconds.
    pub pri: f64,
    pub pulses: usize,
}

impl PlatformState {
    pub fn new(speed: f64, crab_angle: f64, height: f64, pri: f64, pulses: usize) -> Result<Self> {
        let p = Self {
            speed,
            crab_angle,
            height,
            pri,
            pulses,
        };
        p.validate()?;
        Ok(p)
    }

    /// 300 m/s, no crab, 3000 m altitude, 0.25 ms PRI, 16 pulses.
    pub fn table_one() -> Self {
        Self {
            speed: 300.0,
            crab_angle: 0.0,
            height: 3000.0,
            pri: 0.25e-3,
            pulses: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed.is_finite() && self.speed >= 0.0) {
            return Err(Error::invalid("speed", "must be non-negative"));
        }
        if !self.crab_angle.is_finite() {
            return Err(Error::invalid("crab_angle", "must be finite"));
        }
        if !(self.height.is_finite() && self.height > 0.0) {
            return Err(Error::invalid("height", "must be positive"));
        }
        if !(self.pri.is_finite() && self.pri > 0.0) {
            return Err(Error::invalid("pri", "must be positive"));
        }
        if self.pulses < 2 {
            return Err(Error::invalid("pulses", "need at least 2 pulses"));
        }
        Ok(())
    }

    pub fn velocity(&self) -> Vector3<f64> {
        let (s, c) = self.crab_angle.sin_cos();
        Vector3::new(-self.speed * s, self.speed * c, 0.0)
    }
}

/// Flat-earth depression angle of the iso-range at slant range `range`.
pub fn elevation_for_slant_range(height: f64, range: f64) -> Result<f64> {
    if !(height > 0.0) {
        return Err(Error::invalid("height", "must be positive"));
    }
    if !(range >= height) {
        return Err(Error::RangeAboveHorizon { height, range });
    }
    Ok((height / range).asin())
}
