//! Beamformer construction.
//!
//! Three routes to a precoding matrix: zero-forcing on the approximate
//! eigenchannel built from binned spectra (statistics only), zero-forcing
//! on MMSE-estimated channels (instantaneous CSI), and plain dominant-
//! eigenvector beamforming on the per-user covariance.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelMatrix, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, dominant_eigenpair, eigh, CMat};
use crate::spectrum::SpectrumRow;

/// Condition-number bound above which a matrix is treated as rank
/// deficient by the zero-forcing precoder.
pub const ZF_CONDITION_LIMIT: f64 = 1e12;

/// K_s x M approximate eigenchannel: each row is a superposition of one
/// synthetic path per occupied bin, amplitude the square root of the bin
/// mass, phase front at the bin center.
#[derive(Debug, Clone)]
pub struct EigenchannelMatrix {
    entries: CMat,
}

impl EigenchannelMatrix {
    pub fn as_mat(&self) -> &CMat {
        &self.entries
    }

    pub fn users(&self) -> usize {
        self.entries.rows()
    }

    pub fn antennas(&self) -> usize {
        self.entries.cols()
    }
}

/// M x K_s beamformer; column `k` is the unit-norm vector for selected
/// user `k`, per-user transmit powers carried alongside.
#[derive(Debug, Clone)]
pub struct Precoder {
    weights: CMat,
    power_w: Vec<f64>,
}

impl Precoder {
    pub fn from_unit_columns(weights: CMat) -> Precoder {
        let k_s = weights.cols();
        Precoder {
            weights,
            power_w: vec![1.0; k_s],
        }
    }

    pub fn weights(&self) -> &CMat {
        &self.weights
    }

    pub fn num_users(&self) -> usize {
        self.weights.cols()
    }

    pub fn antennas(&self) -> usize {
        self.weights.rows()
    }

    pub fn power_w(&self) -> &[f64] {
        &self.power_w
    }

    /// Assign the same transmit power to every selected user.
    pub fn with_uniform_power(mut self, p_watts: f64) -> Precoder {
        self.power_w = vec![p_watts; self.weights.cols()];
        self
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        (0..self.weights.rows()).map(|i| self.weights[(i, k)]).collect()
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Build the approximate eigenchannel for the selected users' spectrum
/// rows: `g_km = sum_b sqrt(u_k[b]) exp(j 2 pi (m-1) (b/M - 1/2))`.
pub fn approximate_eigenchannel(rows: &[&SpectrumRow], m: usize) -> EigenchannelMatrix {
    let mut entries = CMat::zeros(rows.len(), m);
    for (k, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), m, "spectrum rows must have M bins");
        let out = entries.row_mut(k);
        for (b, &mass) in row.bins().iter().enumerate() {
            if mass <= 0.0 {
                continue;
            }
            let amp = mass.sqrt();
            let center = b as f64 / m as f64 - 0.5;
            for (idx, g) in out.iter_mut().enumerate() {
                *g += amp
                    * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * idx as f64 * center);
            }
        }
    }
    EigenchannelMatrix { entries }
}

/// Unnormalized zero-forcing solution `A^H (A A^H)^{-1}`, whose product
/// with `A` is the identity. Errors when `A` is rank deficient, naming the
/// rows that participate in the (near-)null space of the Gram matrix.
pub fn zf_raw(a: &CMat) -> Result<CMat> {
    let k_s = a.rows();
    if k_s == 0 {
        return Err(Error::ZeroInput { op: "zf_raw" });
    }
    let gram = a.mul(&a.adjoint());
    let (vals, vecs) = eigh(&gram);
    let lambda_max = vals[k_s - 1];
    let lambda_min = vals[0];
    if lambda_max <= 0.0
        || lambda_max.is_nan()
        || lambda_min <= lambda_max / (ZF_CONDITION_LIMIT * ZF_CONDITION_LIMIT)
    {
        // rows with significant weight in the null-space direction
        let mut rows: Vec<usize> = (0..k_s)
            .filter(|&i| vecs[(i, 0)].norm_sqr() >= 1.0 / (2.0 * k_s as f64))
            .collect();
        if rows.is_empty() {
            rows = (0..k_s).collect();
        }
        return Err(Error::RankDeficient { op: "zf_raw", rows });
    }
    let l = cholesky(&gram).map_err(|j| Error::RankDeficient {
        op: "zf_raw",
        rows: vec![j],
    })?;
    let gram_inv = cholesky_solve(&l, &CMat::identity(k_s));
    Ok(a.adjoint().mul(&gram_inv))
}

/// Zero-forcing precoder on `A`: raw solution with columns normalized to
/// unit Euclidean norm.
pub fn zf_precoder(a: &CMat) -> Result<Precoder> {
    let raw = zf_raw(a)?;
    let (m, k_s) = (raw.rows(), raw.cols());
    let mut weights = raw;
    for k in 0..k_s {
        let norm = (0..m).map(|i| weights[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..m {
                weights[(i, k)] /= norm;
            }
        }
    }
    Ok(Precoder::from_unit_columns(weights))
}

/// One unit-norm dominant eigenvector of each selected user's covariance,
/// stacked as precoder columns.
pub fn eigen_beamformer(r_list: &[&CovarianceMatrix]) -> Result<Precoder> {
    if r_list.is_empty() {
        return Err(Error::ZeroInput {
            op: "eigen_beamformer",
        });
    }
    let m = r_list[0].dim();
    let mut weights = CMat::zeros(m, r_list.len());
    for (k, r) in r_list.iter().enumerate() {
        let (_, v) = dominant_eigenpair(r.as_mat(), 10_000).ok_or(Error::ZeroInput {
            op: "eigen_beamformer",
        })?;
        for i in 0..m {
            weights[(i, k)] = v[i];
        }
    }
    Ok(Precoder::from_unit_columns(weights))
}

/// Per-user MMSE channel estimate from one orthogonal-pilot observation.
///
/// The observation is `y = h + n'` with per-antenna noise variance
/// `noise_power / pilot_power`; the estimate is `y R (R + s'^2 I)^{-1}`
/// using each user's analytic covariance as the prior.
pub fn mmse_estimate(
    h_true: &ChannelMatrix,
    r_list: &[CovarianceMatrix],
    noise_power: f64,
    pilot_power: f64,
    rng: &mut impl Rng,
) -> ChannelMatrix {
    assert_eq!(h_true.users(), r_list.len(), "one covariance per user");
    let m = h_true.antennas();
    let sigma_sq = noise_power / pilot_power;
    let mut est = CMat::zeros(h_true.users(), m);
    let noise_scale = (sigma_sq / 2.0).sqrt();
    for (k, r) in r_list.iter().enumerate() {
        // observation
        let y: Vec<Complex64> = h_true
            .row(k)
            .iter()
            .map(|&h| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                h + Complex64::new(re * noise_scale, im * noise_scale)
            })
            .collect();
        if sigma_sq == 0.0 {
            est.row_mut(k).copy_from_slice(&y);
            continue;
        }
        // z = y R, then solve (R + s'^2 I) w = z^H so that hhat = w^H
        let rm = r.as_mat();
        let z: Vec<Complex64> = (0..m)
            .map(|j| (0..m).map(|i| y[i] * rm[(i, j)]).sum())
            .collect();
        let mut s = rm.clone();
        for i in 0..m {
            s[(i, i)] += sigma_sq;
        }
        let l = cholesky(&s).expect("R + s'^2 I is positive definite for s'^2 > 0");
        let zh = CMat::from_fn(m, 1, |i, _| z[i].conj());
        let w = cholesky_solve(&l, &zh);
        let out = est.row_mut(k);
        for i in 0..m {
            out[i] = w[(i, 0)].conj();
        }
    }
    ChannelMatrix::from_mat(est)
}
