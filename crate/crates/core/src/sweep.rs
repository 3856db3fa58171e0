//! Experiment sweeps and the complexity report.
//!
//! A sweep varies one scalar knob over a sorted value list for a set of
//! schemes and emits one CSV row per (scheme, value) pair. Output is
//! buffered and written in deterministic order so identical inputs produce
//! byte-identical CSV.

use std::fmt::Write as _;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{assemble_channel, covariance, CovarianceMatrix};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::UserLink;
use crate::metrics::monte_carlo;
use crate::precoding::mmse_estimate;
use crate::scheduling::{cusbf_schedule, Scheme};
use crate::spectrum::{SpectrumMatrix, SpectrumRow};

/// Knob varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Epsilon,
    K,
    KS,
    PowerDbm,
    M,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Epsilon => "epsilon",
            SweepVariable::K => "K",
            SweepVariable::KS => "K_s",
            SweepVariable::PowerDbm => "power_dBm",
            SweepVariable::M => "M",
        }
    }

    pub fn parse(s: &str) -> Option<SweepVariable> {
        match s.to_ascii_lowercase().as_str() {
            "epsilon" => Some(SweepVariable::Epsilon),
            "k" => Some(SweepVariable::K),
            "k_s" | "ks" => Some(SweepVariable::KS),
            "power_dbm" | "power" | "p" => Some(SweepVariable::PowerDbm),
            "m" => Some(SweepVariable::M),
            _ => None,
        }
    }

    /// Override the matching config field with `value`.
    pub fn apply(self, config: &mut ScenarioConfig, value: f64) -> Result<()> {
        let as_count = |value: f64, field: &str| -> Result<usize> {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(Error::InvalidConfig {
                    field: field.to_string(),
                    reason: format!("sweep value {value} is not a positive integer"),
                });
            }
            Ok(value as usize)
        };
        match self {
            SweepVariable::Epsilon => config.epsilon = value,
            SweepVariable::K => config.k = as_count(value, "k")?,
            SweepVariable::KS => config.k_s = as_count(value, "k_s")?,
            SweepVariable::PowerDbm => config.tx_power_dbm = value,
            SweepVariable::M => config.m = as_count(value, "m")?,
        }
        Ok(())
    }
}

/// A full sweep description.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Values in ascending order; each overrides the base config field.
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    /// Check shape and validate every sweep point before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidConfig {
                field: "values".to_string(),
                reason: "sweep needs at least one value".to_string(),
            });
        }
        if self.values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidConfig {
                field: "values".to_string(),
                reason: "sweep values must be sorted ascending".to_string(),
            });
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig {
                field: "schemes".to_string(),
                reason: "sweep needs at least one scheme".to_string(),
            });
        }
        for &value in &self.values {
            let mut cfg = self.base.clone();
            self.variable.apply(&mut cfg, value)?;
            cfg.validate()?;
        }
        Ok(())
    }
}

/// CSV header emitted by [`run_sweep`].
pub const SWEEP_CSV_HEADER: &str =
    "scheme,variable,value,sum_rate_mean,sum_rate_stderr,per_user_rate_mean,n_selected_mean,drops,seed";

/// Run the sweep and render the CSV table, one row per (scheme, value) in
/// deterministic order.
pub fn run_sweep(spec: &SweepSpec) -> Result<String> {
    spec.validate()?;
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for &scheme in &spec.schemes {
        for &value in &spec.values {
            let mut cfg = spec.base.clone();
            spec.variable.apply(&mut cfg, value)?;
            let report = monte_carlo(&cfg, scheme)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                scheme,
                spec.variable.name(),
                value,
                report.sum_rate_mean,
                report.sum_rate_stderr,
                report.per_user_rate_mean,
                report.n_selected_mean,
                report.drops,
                report.seed
            )
            .expect("string write");
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Complexity report
// ---------------------------------------------------------------------------

/// One asymptotic row of the comparison table.
#[derive(Debug, Clone)]
pub struct ComplexityRow {
    pub scheme: &'static str,
    pub channel_estimation: String,
    pub user_scheduling: &'static str,
    pub beamforming: String,
}

/// Measured wall-clock scaling of one operation.
#[derive(Debug, Clone)]
pub struct MeasuredScaling {
    pub label: String,
    /// (problem size, seconds per call)
    pub points: Vec<(usize, f64)>,
    /// Least-squares slope of log(time) against log(size).
    pub fit_exponent: f64,
}

/// Asymptotic table plus measured scaling trends.
#[derive(Debug, Clone)]
pub struct ComplexityReport {
    pub table: Vec<ComplexityRow>,
    /// Size of the joint estimator's matrix inversion for the channel-norm
    /// greedy baseline: KM x KM.
    pub gwc_estimator_dim: (usize, usize),
    pub cusbf_scheduling: MeasuredScaling,
    pub mmse_estimation: MeasuredScaling,
}

/// Least-squares slope of ln(t) vs ln(n).
fn fit_log_log(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(s, _)| (s as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, t)| t.max(1e-12).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// Seconds per call as the minimum over several timed passes. The minimum
/// discards scheduler and frequency transients, which matters when the
/// call under test takes microseconds.
fn time_per_call(passes: usize, reps: usize, mut f: impl FnMut()) -> f64 {
    f(); // warm-up
    let mut best = f64::INFINITY;
    for _ in 0..passes.max(1) {
        let start = Instant::now();
        for _ in 0..reps.max(1) {
            f();
        }
        best = best.min(start.elapsed().as_secs_f64() / reps.max(1) as f64);
    }
    best
}

fn synthetic_spectrum(k: usize, m: usize, rng: &mut ChaCha8Rng) -> SpectrumMatrix {
    let rows = (0..k)
        .map(|_| {
            let mut bins = vec![0.0; m];
            for _ in 0..4 {
                let b = rng.gen_range(0..m);
                bins[b] += rng.gen_range(0.1..1.0);
            }
            SpectrumRow::from_bins(bins)
        })
        .collect();
    SpectrumMatrix::from_rows(rows)
}

/// Measure how the spectrum scheduler's wall-clock grows with the user
/// count on synthetic spectra.
pub fn measure_scheduling_scaling(
    m: usize,
    k_s: usize,
    k_values: &[usize],
    seed: u64,
) -> MeasuredScaling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let largest = k_values.iter().copied().max().unwrap_or(1);
    let points: Vec<(usize, f64)> = k_values
        .iter()
        .map(|&k| {
            let u = synthetic_spectrum(k, m, &mut rng);
            // fixed work per point: more repetitions for the cheaper sizes
            let reps = (largest / k.max(1)) * 24 + 8;
            // epsilon at the top of the range: pruning runs but removes
            // almost nothing, so every round scans the full candidate set
            let t = time_per_call(6, reps, || {
                cusbf_schedule(&u, k_s, 1.0).expect("synthetic spectra are nonzero");
            });
            (k, t)
        })
        .collect();
    let fit_exponent = fit_log_log(&points);
    MeasuredScaling {
        label: format!("scheduling seconds vs K (M={m}, K_s={k_s})"),
        points,
        fit_exponent,
    }
}

/// Measure how the per-user MMSE estimation wall-clock grows with the
/// antenna count.
pub fn measure_mmse_scaling(k: usize, m_values: &[usize], seed: u64) -> MeasuredScaling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(usize, f64)> = m_values
        .iter()
        .map(|&m| {
            let cfg = ScenarioConfig {
                m,
                k,
                k_s: k.min(m),
                ..Default::default()
            };
            let links: Vec<UserLink> = (0..k)
                .map(|i| {
                    let paths: Vec<(f64, f64)> = (0..10)
                        .map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(-1.5..1.5)))
                        .collect();
                    UserLink::from_paths(i, &paths)
                })
                .collect();
            let r_all: Vec<CovarianceMatrix> =
                links.iter().map(|l| covariance(l, &cfg)).collect();
            let mut links = links;
            for link in &mut links {
                crate::channel::draw_small_scale(link, &mut rng);
            }
            let h = assemble_channel(&links, &cfg);
            let mut rng_est = ChaCha8Rng::seed_from_u64(seed ^ m as u64);
            let largest = m_values.iter().copied().max().unwrap_or(1);
            let reps = (largest / m.max(1)).pow(2) + 2;
            let t = time_per_call(5, reps, || {
                mmse_estimate(&h, &r_all, 1e-3, 1.0, &mut rng_est);
            });
            (m, t)
        })
        .collect();
    let fit_exponent = fit_log_log(&points);
    MeasuredScaling {
        label: format!("MMSE estimation seconds vs M (K={k})"),
        points,
        fit_exponent,
    }
}

/// Assemble the asymptotic table and the two measured trends.
pub fn complexity_report(config: &ScenarioConfig) -> Result<ComplexityReport> {
    config.validate()?;
    let table = vec![
        ComplexityRow {
            scheme: "GWC",
            channel_estimation: "O(K^3 M^3)".to_string(),
            user_scheduling: "O(K)",
            beamforming: "O(M^3)".to_string(),
        },
        ComplexityRow {
            scheme: "JSDM",
            channel_estimation: "O(K_s^3 M^3)".to_string(),
            user_scheduling: "O(K)",
            beamforming: "K_s O(M^3 + M log^2 M log b)".to_string(),
        },
        ComplexityRow {
            scheme: "Algorithm 1",
            channel_estimation: "-".to_string(),
            user_scheduling: "O(K)",
            beamforming: "O(M^3)".to_string(),
        },
    ];
    let cusbf_scheduling = measure_scheduling_scaling(
        config.m,
        config.k_s,
        &[250, 500, 1000, 2000],
        config.seed,
    );
    let mmse_estimation = measure_mmse_scaling(config.k, &[16, 32, 64], config.seed);
    Ok(ComplexityReport {
        table,
        gwc_estimator_dim: (config.k * config.m, config.k * config.m),
        cusbf_scheduling,
        mmse_estimation,
    })
}

impl std::fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<14} {:<16} {:<16} beamforming", "scheme", "estimation", "scheduling")?;
        for row in &self.table {
            writeln!(
                f,
                "{:<14} {:<16} {:<16} {}",
                row.scheme, row.channel_estimation, row.user_scheduling, row.beamforming
            )?;
        }
        writeln!(
            f,
            "\nGWC joint estimator inverts a {} x {} matrix",
            self.gwc_estimator_dim.0, self.gwc_estimator_dim.1
        )?;
        for scaling in [&self.cusbf_scheduling, &self.mmse_estimation] {
            writeln!(f, "\n{}", scaling.label)?;
            for &(size, secs) in &scaling.points {
                writeln!(f, "  {size:>6}: {:.3e} s", secs)?;
            }
            writeln!(f, "  fit exponent: {:.3}", scaling.fit_exponent)?;
        }
        Ok(())
    }
}
