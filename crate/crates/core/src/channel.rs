//! Instantaneous channel matrix and per-user spatial covariance.
//!
//! The array is a uniform linear array with element spacing `d`; the phase
//! slope across elements is `alpha = -2 pi d/lambda` per unit `sin` of the
//! departure azimuth. Row `k` of the channel is
//! `h_km = sum_i a_ki exp(j alpha (m-1) sin phi_ki)` with
//! `a_ki = geo_amplitude * fading`. The covariance is the expectation of
//! `h^H h` over the fading, taken analytically, which makes it Hermitian
//! Toeplitz by construction.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::UserLink;
use crate::linalg::CMat;

/// Phase slope of the array response: `-2 pi d/lambda`.
pub fn phase_slope(d_over_lambda: f64) -> f64 {
    -2.0 * std::f64::consts::PI * d_over_lambda
}

/// K x M instantaneous channel; row `k` belongs to user `k` of the input.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    entries: CMat,
}

impl ChannelMatrix {
    pub fn users(&self) -> usize {
        self.entries.rows()
    }

    pub fn antennas(&self) -> usize {
        self.entries.cols()
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        self.entries.row(k)
    }

    pub fn as_mat(&self) -> &CMat {
        &self.entries
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> ChannelMatrix {
        let m = self.antennas();
        ChannelMatrix {
            entries: CMat::from_fn(rows.len(), m, |i, j| self.entries[(rows[i], j)]),
        }
    }

    pub fn from_mat(entries: CMat) -> ChannelMatrix {
        ChannelMatrix { entries }
    }
}

/// M x M Hermitian Toeplitz spatial covariance of one user.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    entries: CMat,
}

impl CovarianceMatrix {
    /// Wrap a square matrix without checking the Hermitian/Toeplitz
    /// invariants; for synthetic inputs whose structure is known.
    pub fn from_mat_unchecked(entries: CMat) -> CovarianceMatrix {
        assert_eq!(entries.rows(), entries.cols());
        CovarianceMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Draw an independent circular-symmetric unit-variance fading coefficient
/// for every path of the link.
pub fn draw_small_scale(link: &mut UserLink, rng: &mut impl Rng) {
    let scale = 0.5f64.sqrt();
    for mpc in &mut link.mpcs {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        mpc.fading = Complex64::new(re * scale, im * scale);
    }
}

/// Assemble the aggregate K x M channel from links with fading populated.
pub fn assemble_channel(links: &[UserLink], config: &ScenarioConfig) -> ChannelMatrix {
    let alpha = phase_slope(config.d_over_lambda);
    let m = config.m;
    let mut entries = CMat::zeros(links.len(), m);
    for (k, link) in links.iter().enumerate() {
        let row = entries.row_mut(k);
        for mpc in &link.mpcs {
            let a = mpc.fading * mpc.geo_amplitude;
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let step = alpha * mpc.departure_az_rad.sin();
            for (idx, h) in row.iter_mut().enumerate() {
                *h += a * Complex64::from_polar(1.0, step * idx as f64);
            }
        }
    }
    ChannelMatrix { entries }
}

/// Analytic spatial covariance of one user from geometry alone.
///
/// Entry `(m, n)` is `sum_i geo_amplitude_i^2 exp(j alpha (n-m) sin phi_i)`;
/// fading never enters because its unit variance drops out of the
/// expectation.
pub fn covariance(link: &UserLink, config: &ScenarioConfig) -> CovarianceMatrix {
    let alpha = phase_slope(config.d_over_lambda);
    let m = config.m;
    // one value per diagonal offset: c(delta) = sum_i p_i e^{j alpha delta sin phi}
    let mut diag = vec![Complex64::new(0.0, 0.0); m];
    for mpc in &link.mpcs {
        let p = mpc.geo_amplitude * mpc.geo_amplitude;
        if p == 0.0 {
            continue;
        }
        let step = alpha * mpc.departure_az_rad.sin();
        for (delta, c) in diag.iter_mut().enumerate() {
            *c += p * Complex64::from_polar(1.0, step * delta as f64);
        }
    }
    let entries = CMat::from_fn(m, m, |i, j| {
        if j >= i {
            diag[j - i]
        } else {
            diag[i - j].conj()
        }
    });
    CovarianceMatrix { entries }
}

/// Read the antenna correlation sequence `r(m)` off the covariance
/// diagonals, `m = 0..M-1`, where `r(m)` is the entry `m` places below the
/// main diagonal. Errors if the matrix is not Toeplitz within tolerance.
pub fn correlation_sequence(r: &CovarianceMatrix) -> Result<Vec<Complex64>> {
    let m = r.dim();
    let a = r.as_mat();
    let seq: Vec<Complex64> = (0..m).map(|d| a[(d, 0)]).collect();
    let tol = 1e-9 * seq[0].norm().max(1e-300);
    let mut max_dev = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let want = if i >= j {
                seq[i - j]
            } else {
                seq[j - i].conj()
            };
            max_dev = max_dev.max((a[(i, j)] - want).norm());
        }
    }
    if max_dev > tol {
        return Err(Error::NotToeplitz { max_dev, tol });
    }
    Ok(seq)
}
