//! Sparse angle-Doppler spectrum recovery by iteratively reweighted
//! minimum-norm least squares (FOCUSS) with support pruning.
//!
//! Starting from the matched-filter spectrum on the full grid, each pass
//! solves a ridge-regularized weighted minimum-norm problem on the current
//! support, drops every amplitude below `prune_ratio · max|α|`, and reweights
//! with the surviving magnitudes. The support never grows.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clutter::{Covariance, Snapshot};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, gram_inner, gram_outer, CMatrix, CVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IrlsConfig {
    /// Relative pruning threshold η.
    pub prune_ratio: f64,
    /// Relative change below which the iteration stops.
    pub convergence_tol: f64,
    pub max_iterations: usize,
    /// Ridge λ added to the Gram matrix of each weighted solve.
    pub ridge: f64,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self {
            prune_ratio: 1e-3,
            convergence_tol: 1e-3,
            max_iterations: 30,
            ridge: 1.0,
        }
    }
}

impl IrlsConfig {
    /// Defaults with the ridge set to the noise power.
    pub fn for_noise_power(noise_power: f64) -> Self {
        Self {
            ridge: noise_power,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prune_ratio > 0.0 && self.prune_ratio < 1.0) {
            return Err(Error::invalid("prune_ratio", "must lie in (0, 1)"));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::invalid("convergence_tol", "must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::invalid("ridge", "must be non-negative"));
        }
        Ok(())
    }
}

/// One row of the optional per-iteration log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub support_size: usize,
    pub residual: f64,
    pub relative_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    /// Full-grid amplitudes, zero outside `support`.
    pub amplitudes: CVector,
    /// Sorted grid columns with nonzero amplitude.
    pub support: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖x − Φα‖₂`
    pub residual: f64,
    pub trace: Vec<IterationRecord>,
}

impl SpectrumEstimate {
    pub fn powers(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_shapes(dict: &Dictionary, x: &Snapshot) -> Result<()> {
    if x.data.len() != dict.dimension() {
        return Err(Error::DimensionMismatch {
            context: "snapshot vs dictionary",
            expected: dict.dimension(),
            actual: x.data.len(),
        });
    }
    Ok(())
}

/// Matched-filter spectrum `Φ^H x`.
pub fn fourier_init(dict: &Dictionary, x: &Snapshot) -> Result<CVector> {
    check_shapes(dict, x)?;
    Ok(dict.atoms.ad_mul(&x.data))
}

/// Weighted minimum-norm update `W A^H (A A^H + λI)^{-1} x` with `A = Φ_Γ W`.
///
/// When the support is smaller than the data dimension the equivalent form
/// `W (A^H A + λI)^{-1} A^H x` is solved instead; it is the same vector for
/// `λ > 0` and the ordinary least-squares fit for `λ = 0`.
pub fn irls_step(phi_gamma: &CMatrix, weights: &[f64], x: &CVector, ridge: f64) -> Result<CVector> {
    let (dim, cols) = phi_gamma.shape();
    if weights.len() != cols {
        return Err(Error::DimensionMismatch {
            context: "IRLS weights",
            expected: cols,
            actual: weights.len(),
        });
    }
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "IRLS data",
            expected: dim,
            actual: x.len(),
        });
    }
    if cols == 0 {
        return Err(Error::Empty("IRLS support"));
    }
    let mut a = phi_gamma.clone();
    for (c, &w) in weights.iter().enumerate() {
        a.column_mut(c).scale_mut(w);
    }
    let fat = cols >= dim;
    let mut g = if fat { gram_outer(&a) } else { gram_inner(&a) };
    let n = g.nrows();
    for i in 0..n {
        g[(i, i)] += Complex64::new(ridge, 0.0);
    }
    let max_diag = (0..n).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    let chol = cholesky(&g).ok_or(Error::SingularIrlsSystem)?;
    let min_pivot = chol.l_dirty().diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if !(min_pivot * min_pivot > 1e-13 * max_diag) {
        return Err(Error::SingularIrlsSystem);
    }
    let mut alpha = if fat {
        a.ad_mul(&chol.solve(x))
    } else {
        chol.solve(&a.ad_mul(x))
    };
    for (z, &w) in alpha.iter_mut().zip(weights) {
        *z *= w;
    }
    Ok(alpha)
}

/// Positions `i` with `|α_i| ≥ η·max|α|`. An all-zero input keeps everything.
pub fn prune_support(alpha: &[Complex64], prune_ratio: f64) -> Vec<usize> {
    let peak = alpha.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        log::warn!("all-zero spectrum; support left at {} entries", alpha.len());
        return (0..alpha.len()).collect();
    }
    let threshold = prune_ratio * peak;
    alpha
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() >= threshold)
        .map(|(i, _)| i)
        .collect()
}

pub fn update_weights(alpha_gamma: &[Complex64]) -> Vec<f64> {
    alpha_gamma.iter().map(|z| z.norm()).collect()
}

/// `‖new − old‖ / ‖new‖ ≤ tol`; a zero `new` counts as converged.
pub fn has_converged(new: &CVector, old: &CVector, tol: f64) -> bool {
    let denom = new.norm();
    if denom == 0.0 {
        log::warn!("zero spectrum treated as converged");
        return true;
    }
    (new - old).norm() / denom <= tol
}

fn scatter(values: &CVector, support: &[usize], len: usize) -> CVector {
    let mut full = CVector::zeros(len);
    for (&i, v) in support.iter().zip(values.iter()) {
        full[i] = *v;
    }
    full
}

pub fn estimate_spectrum(dict: &Dictionary, x: &Snapshot, cfg: &IrlsConfig) -> Result<SpectrumEstimate> {
    cfg.validate()?;
    let atoms = dict.len();
    let mut previous = fourier_init(dict, x)?;
    let mut support: Vec<usize> = (0..atoms).collect();
    let mut weights = update_weights(previous.as_slice());
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations && !converged {
        iterations += 1;
        let phi_gamma = dict.restrict(&support);
        let alpha = irls_step(&phi_gamma, &weights, &x.data, cfg.ridge)?;
        let current = scatter(&alpha, &support, atoms);
        let change = {
            let denom = current.norm();
            if denom == 0.0 {
                0.0
            } else {
                (&current - &previous).norm() / denom
            }
        };
        converged = has_converged(&current, &previous, cfg.convergence_tol);

        let kept = prune_support(alpha.as_slice(), cfg.prune_ratio);
        let kept_alpha: Vec<Complex64> = kept.iter().map(|&i| alpha[i]).collect();
        support = kept.iter().map(|&i| support[i]).collect();
        weights = update_weights(&kept_alpha);
        previous = scatter(&DVector::from_vec(kept_alpha), &support, atoms);

        trace.push(IterationRecord {
            iteration: iterations,
            support_size: support.len(),
            residual: (&x.data - &dict.atoms * &previous).norm(),
            relative_change: change,
        });
    }

    let residual = trace
        .last()
        .map(|r| r.residual)
        .unwrap_or_else(|| x.data.norm());
    let support: Vec<usize> = support.into_iter().filter(|&i| previous[i] != Complex64::new(0.0, 0.0)).collect();
    Ok(SpectrumEstimate {
        amplitudes: previous,
        support,
        iterations,
        converged,
        residual,
        trace,
    })
}

/// Covariance `Σ_{i∈Γ} |α_i|² φ_i φ_i^H + β_L I` of a recovered spectrum.
pub fn spectrum_to_ccm(est: &SpectrumEstimate, dict: &Dictionary, loading: f64) -> Covariance {
    let mut a = dict.restrict(&est.support);
    for (c, &i) in est.support.iter().enumerate() {
        a.column_mut(c).scale_mut(est.amplitudes[i].norm());
    }
    let mut r = if est.support.is_empty() {
        CMatrix::zeros(dict.dimension(), dict.dimension())
    } else {
        gram_outer(&a)
    };
    for i in 0..r.nrows() {
        r[(i, i)] += Complex64::new(loading, 0.0);
    }
    Covariance::new(r, format!("reconstructed[{}]", dict.range_index))
}
