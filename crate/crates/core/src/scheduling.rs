//! User selection: greedy scheduling on the binned spectrum matrix, plus
//! the two baselines used for comparison.
//!
//! All three schedulers are pure and deterministic. The spectrum-based
//! schemes consume only `SpectrumMatrix` rows, never a channel
//! realization, which is what enforces their statistics-only contract.

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{dot_conj, vec_norm};
use crate::spectrum::{SpectrumMatrix, SpectrumRow};
use num_complex::Complex64;

/// Scheduling/beamforming scheme under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Cusbf,
    Gwc,
    Jsdm,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Cusbf, Scheme::Gwc, Scheme::Jsdm];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Cusbf => "CUSBF",
            Scheme::Gwc => "GWC",
            Scheme::Jsdm => "JSDM",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s.to_ascii_uppercase().as_str() {
            "CUSBF" => Some(Scheme::Cusbf),
            "GWC" => Some(Scheme::Gwc),
            "JSDM" => Some(Scheme::Jsdm),
            _ => None,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Overlap pruning interpretation for the greedy spectrum scheduler.
///
/// `Cumulative` shrinks one candidate set against each new pick, which is
/// the literal pseudocode reading; `AllPairs` re-checks every candidate
/// against every selected user. Because the candidate set only ever
/// shrinks, the two produce identical selections; both are kept for
/// fidelity comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneMode {
    #[default]
    AllPairs,
    Cumulative,
}

/// Outcome of one scheduling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleResult {
    /// Selected user indices in selection order; never empty, never more
    /// than `k_s` entries, no duplicates.
    pub selected: Vec<usize>,
    /// Threshold the selection was made with.
    pub epsilon_used: f64,
    pub scheme: Scheme,
}

// ---------------------------------------------------------------------------
// Selection metrics
// ---------------------------------------------------------------------------

/// Selection metric of the spectrum scheduler: the Euclidean norm of the
/// user's binned spectrum.
pub fn f1(u: &SpectrumRow) -> f64 {
    u.norm()
}

/// Normalized spectral overlap between two users, in [0, 1]. Zero means no
/// shared bins; one means identical spectral shape.
pub fn f2(u_k: &SpectrumRow, u_j: &SpectrumRow) -> Result<f64> {
    let (nk, nj) = (u_k.norm(), u_j.norm());
    if nk == 0.0 || nj == 0.0 {
        return Err(Error::Domain {
            op: "f2",
            reason: "zero-norm spectrum row; exclude zero-power users first".to_string(),
        });
    }
    let dot: f64 = u_k.bins().iter().zip(u_j.bins()).map(|(a, b)| a * b).sum();
    Ok(dot / (nk * nj))
}

fn overlap_unchecked(a: &SpectrumRow, b: &SpectrumRow) -> f64 {
    let dot: f64 = a.bins().iter().zip(b.bins()).map(|(x, y)| x * y).sum();
    dot / (a.norm() * b.norm())
}

// ---------------------------------------------------------------------------
// Spectrum-based greedy core
// ---------------------------------------------------------------------------

/// Greedy selection on spectrum rows with an arbitrary per-user metric and
/// `f2 < epsilon` pruning. Zero-norm rows are excluded up front.
fn greedy_by_metric(
    u: &SpectrumMatrix,
    k_s: usize,
    epsilon: f64,
    mode: PruneMode,
    scheme: Scheme,
    metric: impl Fn(&SpectrumRow) -> (f64, f64),
    op: &'static str,
) -> Result<ScheduleResult> {
    let mut candidates: Vec<usize> = (0..u.users()).filter(|&k| u.row(k).norm() > 0.0).collect();
    if candidates.is_empty() {
        return Err(Error::ZeroInput { op });
    }
    let mut selected: Vec<usize> = Vec::with_capacity(k_s);
    while selected.len() < k_s && !candidates.is_empty() {
        // argmax of the metric with ties broken by the lowest user index;
        // the metric returns a (primary, secondary) pair compared
        // lexicographically
        let &pick = candidates
            .iter()
            .max_by(|&&a, &&b| {
                let ma = metric(u.row(a));
                let mb = metric(u.row(b));
                ma.partial_cmp(&mb)
                    .unwrap()
                    .then(b.cmp(&a)) // lower index wins on exact ties
            })
            .expect("candidates nonempty");
        selected.push(pick);
        candidates.retain(|&k| {
            if k == pick {
                return false;
            }
            match mode {
                PruneMode::Cumulative => overlap_unchecked(u.row(k), u.row(pick)) < epsilon,
                PruneMode::AllPairs => selected
                    .iter()
                    .all(|&s| overlap_unchecked(u.row(k), u.row(s)) < epsilon),
            }
        });
    }
    Ok(ScheduleResult {
        selected,
        epsilon_used: epsilon,
        scheme,
    })
}

/// Greedy spectrum scheduler: pick the largest-norm row, keep only
/// candidates with spectral overlap below `epsilon` against the selected
/// users, repeat until `k_s` users are chosen or no candidate survives.
pub fn cusbf_schedule(u: &SpectrumMatrix, k_s: usize, epsilon: f64) -> Result<ScheduleResult> {
    cusbf_schedule_with_mode(u, k_s, epsilon, PruneMode::default())
}

/// [`cusbf_schedule`] with an explicit pruning interpretation.
pub fn cusbf_schedule_with_mode(
    u: &SpectrumMatrix,
    k_s: usize,
    epsilon: f64,
    mode: PruneMode,
) -> Result<ScheduleResult> {
    greedy_by_metric(
        u,
        k_s,
        epsilon,
        mode,
        Scheme::Cusbf,
        |row| (f1(row), 0.0),
        "cusbf_schedule",
    )
}

/// Bin-occupancy baseline: selection metric is the number of occupied
/// bins, ties broken by the larger row norm, with the same overlap
/// pruning as the spectrum scheduler.
pub fn jsdm_schedule(u: &SpectrumMatrix, k_s: usize, epsilon: f64) -> Result<ScheduleResult> {
    greedy_by_metric(
        u,
        k_s,
        epsilon,
        PruneMode::default(),
        Scheme::Jsdm,
        |row| (row.occupied_bins() as f64, f1(row)),
        "jsdm_schedule",
    )
}

// ---------------------------------------------------------------------------
// Channel-norm greedy baseline
// ---------------------------------------------------------------------------

/// Channel-norm greedy selection on estimated channels with a direction
/// constraint: after each pick, only candidates whose projection onto the
/// span of the selected channels stays below `gamma` (as a fraction of
/// their own norm) survive.
pub fn gwc_schedule(h_est: &ChannelMatrix, k_s: usize, gamma: f64) -> Result<ScheduleResult> {
    let users = h_est.users();
    let mut candidates: Vec<usize> =
        (0..users).filter(|&k| vec_norm(h_est.row(k)) > 0.0).collect();
    if candidates.is_empty() {
        return Err(Error::ZeroInput { op: "gwc_schedule" });
    }
    let mut selected: Vec<usize> = Vec::with_capacity(k_s);
    // orthonormal basis of the selected channels' span
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(k_s);
    while selected.len() < k_s && !candidates.is_empty() {
        let &pick = candidates
            .iter()
            .max_by(|&&a, &&b| {
                let na = vec_norm(h_est.row(a));
                let nb = vec_norm(h_est.row(b));
                na.partial_cmp(&nb).unwrap().then(b.cmp(&a))
            })
            .expect("candidates nonempty");
        selected.push(pick);
        // extend the basis with the picked channel's orthogonal component
        let mut g: Vec<Complex64> = h_est.row(pick).to_vec();
        for q in &basis {
            let coeff = dot_conj(q, &g);
            for (gi, qi) in g.iter_mut().zip(q) {
                *gi -= coeff * qi;
            }
        }
        let gnorm = vec_norm(&g);
        if gnorm > 1e-12 * vec_norm(h_est.row(pick)).max(1e-300) {
            for z in g.iter_mut() {
                *z /= gnorm;
            }
            basis.push(g);
        }
        candidates.retain(|&k| {
            if k == pick {
                return false;
            }
            let h = h_est.row(k);
            let hnorm = vec_norm(h);
            let proj_sq: f64 = basis.iter().map(|q| dot_conj(q, h).norm_sqr()).sum();
            proj_sq.sqrt() / hnorm < gamma
        });
    }
    Ok(ScheduleResult {
        selected,
        epsilon_used: gamma,
        scheme: Scheme::Gwc,
    })
}
