//! Binned eigenvalue spectrum of the antenna correlation.
//!
//! With a large array, the eigenvalue distribution of the Toeplitz
//! covariance converges to the discrete-time Fourier transform of the
//! antenna correlation sequence. For finite `M` the frequency axis is
//! quantized into `M` bins of width `1/M`, bin `b` centered at
//! `b/M - 1/2`; a path with departure azimuth `phi` lands in the bin
//! containing `-d/lambda * sin(phi)`. A user's spectrum row holds the
//! geometric path power accumulated per bin.

use crate::config::ScenarioConfig;
use crate::geometry::UserLink;
use crate::linalg::eigvalsh;

/// Nonnegative per-bin path powers of one user; always `M` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    bins: Vec<f64>,
}

impl SpectrumRow {
    pub fn from_bins(bins: Vec<f64>) -> Self {
        debug_assert!(bins.iter().all(|&b| b >= 0.0));
        SpectrumRow { bins }
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Total binned power, equal to the user's total path power.
    pub fn total_power(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// Euclidean norm of the row.
    pub fn norm(&self) -> f64 {
        self.bins.iter().map(|b| b * b).sum::<f64>().sqrt()
    }

    /// Number of bins carrying any power.
    pub fn occupied_bins(&self) -> usize {
        self.bins.iter().filter(|&&b| b > 0.0).count()
    }
}

/// K x M stack of spectrum rows, user order preserved.
#[derive(Debug, Clone)]
pub struct SpectrumMatrix {
    rows: Vec<SpectrumRow>,
}

impl SpectrumMatrix {
    pub fn from_rows(rows: Vec<SpectrumRow>) -> Self {
        SpectrumMatrix { rows }
    }

    pub fn users(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: usize) -> &SpectrumRow {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[SpectrumRow] {
        &self.rows
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Index of the angular bin occupied by a path with departure azimuth
/// `phi`.
///
/// The spatial frequency `-d/lambda * sin(phi)` is wrapped by the DTFT's
/// 1-periodicity into the principal interval
/// `(-1/2 - 1/(2M), 1/2 - 1/(2M)]`, then matched to the bin whose
/// half-open interval `(b/M - 1/2 - 1/(2M), b/M - 1/2 + 1/(2M)]`
/// contains it.
pub fn bin_index(phi: f64, d_over_lambda: f64, m: usize) -> usize {
    debug_assert!(m >= 1);
    let f = -d_over_lambda * phi.sin();
    let lo = -0.5 - 1.0 / (2.0 * m as f64);
    let mut t = (f - lo).rem_euclid(1.0);
    if t == 0.0 {
        // the bottom edge belongs to the top bin under the right-closed
        // convention
        t = 1.0;
    }
    let wrapped = lo + t;
    let b = (m as f64 * (wrapped + 0.5) - 0.5).ceil() as isize;
    b.clamp(0, m as isize - 1) as usize
}

/// Accumulate each path's squared geometric amplitude into its bin.
pub fn spectrum_row(link: &UserLink, config: &ScenarioConfig) -> SpectrumRow {
    let mut bins = vec![0.0; config.m];
    for mpc in &link.mpcs {
        let b = bin_index(mpc.departure_az_rad, config.d_over_lambda, config.m);
        bins[b] += mpc.geo_amplitude * mpc.geo_amplitude;
    }
    SpectrumRow { bins }
}

/// Stack per-user spectrum rows into the scheduling matrix.
pub fn build_u(links: &[UserLink], config: &ScenarioConfig) -> SpectrumMatrix {
    SpectrumMatrix {
        rows: links.iter().map(|l| spectrum_row(l, config)).collect(),
    }
}

/// Two-sample Kolmogorov-Smirnov distance between the empirical CDFs of
/// `a` and `b`. Values closer than `tie_tol` are treated as equal so that
/// matching atoms contribute no distance.
pub fn ks_distance(a: &[f64], b: &[f64], tie_tol: f64) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        if x <= y + tie_tol {
            i += 1;
        }
        if y <= x + tie_tol {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Convergence probe for the binned spectrum: for each antenna count in
/// `m_list`, compare the covariance eigenvalues (scaled by `1/M`, the
/// convention that makes a single path of power `P` match its bin mass
/// `P`) against the binned spectrum values, and report the
/// Kolmogorov-Smirnov distance between the two empirical CDFs.
pub fn asymptotic_spectrum_check(
    link: &UserLink,
    config: &ScenarioConfig,
    m_list: &[usize],
) -> Vec<f64> {
    debug_assert!(
        m_list.windows(2).all(|w| w[0] < w[1]),
        "antenna counts must be increasing"
    );
    m_list
        .iter()
        .map(|&m| {
            let mut cfg = config.clone();
            cfg.m = m;
            let r = crate::channel::covariance(link, &cfg);
            let scaled: Vec<f64> = eigvalsh(r.as_mat())
                .into_iter()
                .map(|v| (v / m as f64).max(0.0))
                .collect();
            let bins = spectrum_row(link, &cfg);
            let scale = link.total_path_power().max(1e-300);
            ks_distance(&scaled, bins.bins(), 1e-9 * scale)
        })
        .collect()
}
