//! Per-user SINR, Shannon rates, the single-drop pipeline, and Monte Carlo
//! aggregation over drops.
//!
//! Rates are always evaluated against the true channel realization; what
//! differs between schemes is only the information the scheduler and
//! beamformer were allowed to see. The spectrum-based schemes receive the
//! binned spectra and covariances, never the realization; the channel-norm
//! greedy baseline receives an MMSE estimate from one noisy pilot
//! observation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{assemble_channel, covariance, CovarianceMatrix};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{generate_drop, noise_power};
use crate::linalg::CMat;
use crate::precoding::{
    approximate_eigenchannel, eigen_beamformer, mmse_estimate, zf_precoder, Precoder,
};
use crate::scheduling::{cusbf_schedule, gwc_schedule, jsdm_schedule, ScheduleResult, Scheme};
use crate::spectrum::build_u;

/// Key parameters echoed into every report so any row can be re-run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEcho {
    pub m: usize,
    pub k: usize,
    pub k_s: usize,
    pub epsilon: f64,
    pub tx_power_dbm: f64,
}

impl ConfigEcho {
    fn from(config: &ScenarioConfig) -> ConfigEcho {
        ConfigEcho {
            m: config.m,
            k: config.k,
            k_s: config.k_s,
            epsilon: config.epsilon,
            tx_power_dbm: config.tx_power_dbm,
        }
    }
}

/// Outcome of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub scheme: Scheme,
    /// Users that were actually served, in selection order.
    pub selected: Vec<usize>,
    /// Linear SINR per served user.
    pub per_user_sinr: Vec<f64>,
    /// Shannon rate per served user, bits/s/Hz.
    pub per_user_rate: Vec<f64>,
    /// Sum of the per-user rates.
    pub sum_rate: f64,
    pub config_echo: ConfigEcho,
}

/// Monte Carlo aggregate over independent drops.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub scheme: Scheme,
    pub drops: usize,
    pub seed: u64,
    pub sum_rate_mean: f64,
    /// Standard error of the sum-rate mean.
    pub sum_rate_stderr: f64,
    /// Mean over drops of (sum rate / number served).
    pub per_user_rate_mean: f64,
    pub n_selected_mean: f64,
}

// ---------------------------------------------------------------------------
// SINR and rates
// ---------------------------------------------------------------------------

/// Per-user SINR against the true channel rows of the served users:
/// `p |h_k w_k|^2 / (sum_{j != k} p |h_k w_j|^2 + P_n)`.
pub fn sinr(h_true_selected: &CMat, w: &Precoder, p_watts: f64, noise_w: f64) -> Vec<f64> {
    let k_s = h_true_selected.rows();
    assert_eq!(w.num_users(), k_s, "one beam per served user");
    assert_eq!(w.antennas(), h_true_selected.cols(), "antenna count mismatch");
    // gains[k][j] = |h_k w_j|^2
    let gains: Vec<Vec<f64>> = (0..k_s)
        .map(|k| {
            let h = h_true_selected.row(k);
            (0..k_s)
                .map(|j| {
                    h.iter()
                        .enumerate()
                        .map(|(m, &hm)| hm * w.weights()[(m, j)])
                        .sum::<num_complex::Complex64>()
                        .norm_sqr()
                })
                .collect()
        })
        .collect();
    (0..k_s)
        .map(|k| {
            let signal = p_watts * gains[k][k];
            let interference: f64 = (0..k_s)
                .filter(|&j| j != k)
                .map(|j| p_watts * gains[k][j])
                .sum();
            signal / (interference + noise_w)
        })
        .collect()
}

/// Shannon sum rate in bits/s/Hz.
pub fn sum_rate(sinrs: &[f64]) -> f64 {
    sinrs.iter().map(|s| (1.0 + s).log2()).sum()
}

// ---------------------------------------------------------------------------
// Single drop
// ---------------------------------------------------------------------------

/// Zero-forcing with the documented drop-one-user retry: on a rank
/// deficiency, the latest-selected offending user is removed and the
/// precoder rebuilt.
fn zf_with_retry(
    selection: &mut Vec<usize>,
    build: impl Fn(&[usize]) -> CMat,
) -> Result<Precoder> {
    loop {
        let a = build(selection);
        match zf_precoder(&a) {
            Ok(p) => return Ok(p),
            Err(Error::RankDeficient { rows, .. }) if selection.len() > 1 => {
                let pos = rows.into_iter().max().unwrap_or(selection.len() - 1);
                selection.remove(pos.min(selection.len() - 1));
            }
            Err(e) => return Err(e),
        }
    }
}

/// One full pipeline pass: drop, covariances, spectrum matrix, scheduling,
/// precoding, SINR against the true channel, report.
pub fn run_drop(
    config: &ScenarioConfig,
    scheme: Scheme,
    rng: &mut ChaCha8Rng,
) -> Result<RateReport> {
    config.validate()?;
    let p_n = noise_power(config);
    let p = config.tx_power_w();

    let mut drop = generate_drop(config, rng)?;
    // One fading realization per drop, drawn at a fixed point of the
    // stream so every scheme sees the same geometry and channel.
    for link in &mut drop.links {
        crate::channel::draw_small_scale(link, rng);
    }
    let h_true = assemble_channel(&drop.links, config);

    let (schedule, precoder): (ScheduleResult, Precoder) = match scheme {
        Scheme::Cusbf => {
            let u = build_u(&drop.links, config);
            let mut schedule = cusbf_schedule(&u, config.k_s, config.epsilon)?;
            let precoder = zf_with_retry(&mut schedule.selected, |sel| {
                let rows: Vec<&crate::spectrum::SpectrumRow> =
                    sel.iter().map(|&k| u.row(k)).collect();
                approximate_eigenchannel(&rows, config.m).as_mat().clone()
            })?;
            (schedule, precoder)
        }
        Scheme::Jsdm => {
            let u = build_u(&drop.links, config);
            let schedule = jsdm_schedule(&u, config.k_s, config.jsdm_epsilon)?;
            let r_sel: Vec<CovarianceMatrix> = schedule
                .selected
                .iter()
                .map(|&k| covariance(&drop.links[k], config))
                .collect();
            let r_refs: Vec<&CovarianceMatrix> = r_sel.iter().collect();
            let precoder = eigen_beamformer(&r_refs)?;
            (schedule, precoder)
        }
        Scheme::Gwc => {
            let r_all: Vec<CovarianceMatrix> = drop
                .links
                .iter()
                .map(|l| covariance(l, config))
                .collect();
            let h_est = mmse_estimate(&h_true, &r_all, p_n, config.pilot_power_w(), rng);
            let mut schedule = gwc_schedule(&h_est, config.k_s, config.gwc_gamma)?;
            let precoder = zf_with_retry(&mut schedule.selected, |sel| {
                h_est.select_rows(sel).as_mat().clone()
            })?;
            (schedule, precoder)
        }
    };

    let h_served = h_true.select_rows(&schedule.selected);
    let precoder = precoder.with_uniform_power(p);
    let sinrs = sinr(h_served.as_mat(), &precoder, p, p_n);
    let rates: Vec<f64> = sinrs.iter().map(|s| (1.0 + s).log2()).collect();
    let total = rates.iter().sum();
    Ok(RateReport {
        scheme,
        selected: schedule.selected,
        per_user_sinr: sinrs,
        per_user_rate: rates,
        sum_rate: total,
        config_echo: ConfigEcho::from(config),
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

/// Independent RNG stream for one drop, derived from the master seed so
/// that drop `i` sees the same stream regardless of the total drop count.
pub fn drop_rng(master_seed: u64, drop_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(drop_index);
    rng
}

/// Run every drop of the configured Monte Carlo experiment.
pub fn run_drops(config: &ScenarioConfig, scheme: Scheme) -> Result<Vec<RateReport>> {
    config.validate()?;
    (0..config.drops as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = drop_rng(config.seed, i);
            run_drop(config, scheme, &mut rng)
        })
        .collect()
}

/// Mean and standard error of the sum rate over independent drops.
pub fn monte_carlo(config: &ScenarioConfig, scheme: Scheme) -> Result<MonteCarloReport> {
    let reports = run_drops(config, scheme)?;
    Ok(aggregate(config, scheme, &reports))
}

/// Fold per-drop reports into the Monte Carlo aggregate.
pub fn aggregate(
    config: &ScenarioConfig,
    scheme: Scheme,
    reports: &[RateReport],
) -> MonteCarloReport {
    let n = reports.len();
    let mean = reports.iter().map(|r| r.sum_rate).sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = reports
            .iter()
            .map(|r| (r.sum_rate - mean).powi(2))
            .sum::<f64>()
            / (n as f64 - 1.0);
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    let per_user = reports
        .iter()
        .map(|r| {
            if r.selected.is_empty() {
                0.0
            } else {
                r.sum_rate / r.selected.len() as f64
            }
        })
        .sum::<f64>()
        / n as f64;
    let n_sel = reports.iter().map(|r| r.selected.len() as f64).sum::<f64>() / n as f64;
    MonteCarloReport {
        scheme,
        drops: n,
        seed: config.seed,
        sum_rate_mean: mean,
        sum_rate_stderr: stderr,
        per_user_rate_mean: per_user,
        n_selected_mean: n_sel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn small_config() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.m = 16;
        cfg.k = 8;
        cfg.k_s = 3;
        cfg.drops = 4;
        cfg.n_clusters = 8;
        cfg
    }

    #[test]
    fn sinr_single_user_known_value() {
        let h = CMat::from_rows(&[vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]]);
        let w = Precoder::from_unit_columns(CMat::from_rows(&[
            vec![Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0)],
        ]));
        let s = sinr(&h, &w, 1.0, 0.5);
        assert_eq!(s.len(), 1);
        assert!((s[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sinr_orthogonal_beam_is_zero() {
        let h = CMat::from_rows(&[vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]]);
        let w = Precoder::from_unit_columns(CMat::from_rows(&[
            vec![Complex64::new(0.0, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        ]));
        let s = sinr(&h, &w, 2.0, 0.1);
        assert_eq!(s[0], 0.0);
    }

    #[test]
    fn sinr_zf_on_true_channel_kills_interference() {
        let mut rng = drop_rng(5, 0);
        use rand::Rng;
        let h = CMat::from_fn(2, 8, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let p = zf_precoder(&h).unwrap();
        // cross gains |h_k w_j|^2 must be at machine-precision level
        for k in 0..2 {
            for j in 0..2 {
                if k == j {
                    continue;
                }
                let cross: Complex64 = (0..8).map(|m| h[(k, m)] * p.weights()[(m, j)]).sum();
                assert!(
                    cross.norm_sqr() < 1e-18 * h.frobenius_norm().powi(2),
                    "leakage {:.3e}",
                    cross.norm_sqr()
                );
            }
        }
        let s = sinr(&h, &p, 1.0, 1e-9);
        assert!(s.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sum_rate_known_values() {
        assert!((sum_rate(&[1.0, 3.0]) - 3.0).abs() < 1e-12);
        assert_eq!(sum_rate(&[]), 0.0);
        assert_eq!(sum_rate(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn run_drop_is_deterministic() {
        let cfg = small_config();
        for scheme in Scheme::ALL {
            let a = run_drop(&cfg, scheme, &mut drop_rng(cfg.seed, 0)).unwrap();
            let b = run_drop(&cfg, scheme, &mut drop_rng(cfg.seed, 0)).unwrap();
            assert_eq!(a, b, "scheme {scheme}");
        }
    }

    #[test]
    fn run_drop_single_user_has_no_interference() {
        let mut cfg = small_config();
        cfg.k = 1;
        cfg.k_s = 1;
        let report = run_drop(&cfg, Scheme::Cusbf, &mut drop_rng(7, 0)).unwrap();
        assert_eq!(report.selected.len(), 1);
        assert_eq!(report.per_user_sinr.len(), 1);
        assert!(report.sum_rate > 0.0);
    }

    #[test]
    fn run_drop_rate_vanishes_with_power() {
        let mut cfg = small_config();
        cfg.tx_power_dbm = -300.0;
        let report = run_drop(&cfg, Scheme::Cusbf, &mut drop_rng(7, 0)).unwrap();
        assert!(report.sum_rate < 1e-9, "sum rate {}", report.sum_rate);
    }

    #[test]
    fn run_drop_rate_monotone_in_power() {
        let cfg = small_config();
        let mut prev = -1.0;
        for p_dbm in [-10.0, 0.0, 10.0, 20.0, 30.0] {
            let mut c = cfg.clone();
            c.tx_power_dbm = p_dbm;
            let report = run_drop(&c, Scheme::Cusbf, &mut drop_rng(13, 0)).unwrap();
            assert!(
                report.sum_rate >= prev,
                "sum rate must not decrease with power: {} after {prev}",
                report.sum_rate
            );
            prev = report.sum_rate;
        }
    }

    #[test]
    fn report_rates_match_sinrs() {
        let cfg = small_config();
        for scheme in Scheme::ALL {
            let r = run_drop(&cfg, scheme, &mut drop_rng(3, 1)).unwrap();
            let recomputed: f64 = r.per_user_sinr.iter().map(|s| (1.0 + s).log2()).sum();
            assert!((recomputed - r.sum_rate).abs() < 1e-12);
            assert!(r.per_user_rate.iter().all(|&x| x >= 0.0));
            assert!(r.selected.len() <= cfg.k_s);
            assert!(!r.selected.is_empty());
        }
    }

    #[test]
    fn monte_carlo_single_drop_equals_run_drop() {
        let mut cfg = small_config();
        cfg.drops = 1;
        let mc = monte_carlo(&cfg, Scheme::Cusbf).unwrap();
        let single = run_drop(&cfg, Scheme::Cusbf, &mut drop_rng(cfg.seed, 0)).unwrap();
        assert!((mc.sum_rate_mean - single.sum_rate).abs() < 1e-12);
        assert_eq!(mc.sum_rate_stderr, 0.0);
    }

    #[test]
    fn doubling_drops_preserves_prefix() {
        let mut cfg = small_config();
        cfg.drops = 4;
        let first = run_drops(&cfg, Scheme::Cusbf).unwrap();
        cfg.drops = 8;
        let second = run_drops(&cfg, Scheme::Cusbf).unwrap();
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(a, b, "per-drop seed derivation must be stable");
        }
    }

    #[test]
    fn zf_retry_drops_latest_offending_user() {
        // rows 0 and 2 are colinear; the retry must remove the later one
        // and produce a working precoder for the survivors
        let rows = [
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        let mut selection = vec![0usize, 1, 2];
        let precoder = zf_with_retry(&mut selection, |sel| {
            CMat::from_fn(sel.len(), 3, |i, j| rows[sel[i]][j])
        })
        .expect("retry must recover");
        assert_eq!(selection, vec![0, 1], "latest colinear user dropped");
        assert_eq!(precoder.num_users(), 2);
    }

    #[test]
    fn zf_retry_gives_up_on_single_zero_row() {
        let mut selection = vec![0usize];
        let err = zf_with_retry(&mut selection, |sel| CMat::zeros(sel.len(), 3));
        assert!(err.is_err(), "an all-zero row cannot be recovered");
    }

    #[test]
    fn stderr_shrinks_with_drop_count() {
        let mut cfg = small_config();
        cfg.drops = 8;
        let small = monte_carlo(&cfg, Scheme::Cusbf).unwrap();
        cfg.drops = 64;
        let large = monte_carlo(&cfg, Scheme::Cusbf).unwrap();
        assert!(
            large.sum_rate_stderr < small.sum_rate_stderr,
            "stderr {} -> {}",
            small.sum_rate_stderr,
            large.sum_rate_stderr
        );
    }
}
