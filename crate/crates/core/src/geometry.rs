//! Random drop generation: user positions, clusters with visibility
//! regions, multipath components with geometry-based amplitudes, path loss,
//! and noise power.
//!
//! The cluster parameterization is deliberately simple: clusters and their
//! visibility-region centers are uniform in the cell, cluster attenuation is
//! drawn as `10^(-|N(0, sigma_dB)|/10)` so it always lands in (0, 1], and
//! each cluster carries a fixed set of per-path azimuth offsets around the
//! BS-to-cluster bearing. Users whose terminals fall inside a shared
//! cluster's visibility region therefore see the same departure angles,
//! which is what creates correlated spectra between users.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::{BOLTZMANN, SPEED_OF_LIGHT};

/// A scattering cluster and its circular visibility region.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// Cluster position in meters; z is only used for path delays.
    pub position: [f64; 3],
    /// Center of the visibility region on the ground plane.
    pub vr_center: [f64; 2],
    /// Visibility-region radius in meters.
    pub vr_radius_m: f64,
    /// Cluster power attenuation in (0, 1].
    pub attenuation: f64,
    /// Per-path azimuth offsets (radians) around the BS-to-cluster bearing.
    /// Fixed per cluster so that users sharing the cluster share departure
    /// directions.
    pub path_azimuth_offsets: Vec<f64>,
}

/// One propagation path.
#[derive(Debug, Clone)]
pub struct MultipathComponent {
    /// Azimuth of departure at the BS, wrapped into (-pi, pi].
    pub departure_az_rad: f64,
    /// Azimuth of arrival at the terminal. Stored for fidelity; the
    /// narrowband single-antenna-user pipeline never reads it.
    pub arrival_az_rad: f64,
    /// Geometric path delay in seconds. Stored, unused by the narrowband
    /// model.
    pub delay_s: f64,
    /// Geometry-based amplitude (path loss x visibility x cluster
    /// attenuation), nonnegative.
    pub geo_amplitude: f64,
    /// Small-scale fading coefficient. Unit until a realization is drawn.
    pub fading: Complex64,
}

/// One user terminal and its set of multipath components.
#[derive(Debug, Clone)]
pub struct UserLink {
    pub user_index: usize,
    pub position: [f64; 2],
    pub mpcs: Vec<MultipathComponent>,
}

impl UserLink {
    /// Total geometric path power, `sum of geo_amplitude^2`.
    pub fn total_path_power(&self) -> f64 {
        self.mpcs.iter().map(|m| m.geo_amplitude * m.geo_amplitude).sum()
    }

    /// Synthetic link from `(geo_amplitude, departure_azimuth_rad)` pairs,
    /// for controlled studies and tests.
    pub fn from_paths(user_index: usize, paths: &[(f64, f64)]) -> UserLink {
        UserLink {
            user_index,
            position: [0.0, 0.0],
            mpcs: paths
                .iter()
                .map(|&(amp, az)| MultipathComponent {
                    departure_az_rad: wrap_angle(az),
                    arrival_az_rad: 0.0,
                    delay_s: 0.0,
                    geo_amplitude: amp,
                    fading: Complex64::new(1.0, 0.0),
                })
                .collect(),
        }
    }
}

/// One random realization of the cell geometry.
#[derive(Debug, Clone)]
pub struct CellDrop {
    pub clusters: Vec<Cluster>,
    pub links: Vec<UserLink>,
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = x.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w - two_pi
    } else {
        w
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Place `k` users uniformly on the square cell, resampling any position
/// closer than `exclusion_factor * cell_radius_m` to the BS at the origin.
pub fn place_users(config: &ScenarioConfig, rng: &mut impl Rng) -> Result<Vec<[f64; 2]>> {
    const CAP: u64 = 1_000_000;
    let r = config.cell_radius_m;
    let r_min = config.exclusion_factor * r;
    let mut out = Vec::with_capacity(config.k);
    for _ in 0..config.k {
        let mut attempts = 0u64;
        loop {
            let x = rng.gen_range(-r..=r);
            let y = rng.gen_range(-r..=r);
            if (x * x + y * y).sqrt() >= r_min {
                out.push([x, y]);
                break;
            }
            attempts += 1;
            if attempts >= CAP {
                return Err(Error::SamplingExhausted {
                    op: "place_users",
                    cap: CAP,
                });
            }
        }
    }
    Ok(out)
}

/// NLoS micro-cell path loss as a linear power gain.
///
/// `L_dB = 26 log10(d) + 20 log10(4 pi / lambda)`; the returned gain is
/// `10^(-L_dB/10)`. Amplitudes carry the square root of this gain.
pub fn path_loss_linear(d_bs_ms_m: f64, lambda_m: f64) -> Result<f64> {
    if d_bs_ms_m <= 0.0 || d_bs_ms_m.is_nan() {
        return Err(Error::Domain {
            op: "path_loss_linear",
            reason: format!("distance must be positive, got {d_bs_ms_m}"),
        });
    }
    if lambda_m <= 0.0 || lambda_m.is_nan() {
        return Err(Error::Domain {
            op: "path_loss_linear",
            reason: format!("wavelength must be positive, got {lambda_m}"),
        });
    }
    let loss_db = 26.0 * d_bs_ms_m.log10()
        + 20.0 * (4.0 * std::f64::consts::PI / lambda_m).log10();
    Ok(10f64.powf(-loss_db / 10.0))
}

/// Visibility-region transition gain in [0, 1].
///
/// 1 inside `radius - transition`, 0 at and beyond `radius`, raised-cosine
/// ramp between. Non-increasing and continuous in the distance.
pub fn vr_gain(dist_to_vr_center_m: f64, vr_radius_m: f64, transition_m: f64) -> f64 {
    debug_assert!(vr_radius_m > 0.0 && transition_m >= 0.0);
    let inner = vr_radius_m - transition_m;
    if dist_to_vr_center_m >= vr_radius_m {
        0.0
    } else if dist_to_vr_center_m <= inner || transition_m == 0.0 {
        1.0
    } else {
        let frac = (dist_to_vr_center_m - inner) / transition_m;
        0.5 * (1.0 + (std::f64::consts::PI * frac).cos())
    }
}

/// Noise power in watts: `BW * k_B * T0 * 10^(NF_dB/10)`.
pub fn noise_power(config: &ScenarioConfig) -> f64 {
    config.bandwidth_hz
        * BOLTZMANN
        * config.noise_temp_k
        * 10f64.powf(config.noise_figure_db / 10.0)
}

/// Draw the cluster population for one drop.
pub fn generate_clusters(config: &ScenarioConfig, rng: &mut impl Rng) -> Vec<Cluster> {
    let r = config.cell_radius_m;
    let spread_rad = config.angular_spread_deg.to_radians();
    (0..config.n_clusters)
        .map(|_| {
            let position = [
                rng.gen_range(-r..=r),
                rng.gen_range(-r..=r),
                config.bs_height_m,
            ];
            let vr_center = [rng.gen_range(-r..=r), rng.gen_range(-r..=r)];
            let g: f64 = rng.sample(StandardNormal);
            let attenuation = 10f64.powf(
                -(config.cluster_atten_mean_db + g.abs() * config.cluster_atten_spread_db)
                    / 10.0,
            );
            let path_azimuth_offsets = (0..config.paths_per_cluster)
                .map(|_| {
                    let o: f64 = rng.sample(StandardNormal);
                    o * spread_rad
                })
                .collect();
            Cluster {
                position,
                vr_center,
                vr_radius_m: config.vr_radius_m,
                attenuation,
                path_azimuth_offsets,
            }
        })
        .collect()
}

fn mpcs_from_cluster(
    user_pos: [f64; 2],
    bearing: f64,
    offsets: &[f64],
    amplitude: f64,
    cluster_pos: [f64; 3],
    config: &ScenarioConfig,
) -> Vec<MultipathComponent> {
    let bs = [0.0, 0.0, config.bs_height_m];
    let ms = [user_pos[0], user_pos[1], config.ms_height_m];
    let d_bs_c = ((cluster_pos[0] - bs[0]).powi(2)
        + (cluster_pos[1] - bs[1]).powi(2)
        + (cluster_pos[2] - bs[2]).powi(2))
    .sqrt();
    let d_c_ms = ((cluster_pos[0] - ms[0]).powi(2)
        + (cluster_pos[1] - ms[1]).powi(2)
        + (cluster_pos[2] - ms[2]).powi(2))
    .sqrt();
    let delay_s = (d_bs_c + d_c_ms) / SPEED_OF_LIGHT;
    let arrival = wrap_angle((cluster_pos[1] - ms[1]).atan2(cluster_pos[0] - ms[0]));
    offsets
        .iter()
        .map(|&off| MultipathComponent {
            departure_az_rad: wrap_angle(bearing + off),
            arrival_az_rad: arrival,
            delay_s,
            geo_amplitude: amplitude,
            fading: Complex64::new(1.0, 0.0),
        })
        .collect()
}

/// Build the multipath set for one user from the visible clusters.
///
/// Each cluster with positive visibility gain contributes
/// `paths_per_cluster` components with amplitude
/// `sqrt(path_loss) * A_VR * sqrt(A_C)`. A user outside every visibility
/// region falls back to a single local cluster at its own position so the
/// link never has an empty path set.
pub fn generate_mpcs(
    user_index: usize,
    user_pos: [f64; 2],
    clusters: &[Cluster],
    config: &ScenarioConfig,
    rng: &mut impl Rng,
) -> Result<UserLink> {
    let dz = config.bs_height_m - config.ms_height_m;
    let d_bs_ms = (user_pos[0].powi(2) + user_pos[1].powi(2) + dz * dz).sqrt();
    let amp_pl = path_loss_linear(d_bs_ms, config.wavelength_m())?.sqrt();

    let mut mpcs = Vec::new();
    for cluster in clusters {
        let visibility = vr_gain(
            dist2(user_pos, cluster.vr_center),
            cluster.vr_radius_m,
            config.vr_transition_m,
        );
        if visibility <= 0.0 {
            continue;
        }
        let amplitude = amp_pl * visibility * cluster.attenuation.sqrt();
        let bearing = wrap_angle(cluster.position[1].atan2(cluster.position[0]));
        mpcs.extend(mpcs_from_cluster(
            user_pos,
            bearing,
            &cluster.path_azimuth_offsets,
            amplitude,
            cluster.position,
            config,
        ));
    }

    if mpcs.is_empty() {
        // Local fallback cluster at the user position: keeps every link at
        // rank >= 1 with full visibility. It carries a cluster-like
        // attenuation draw so VR-less users are not systematically
        // stronger than everyone else.
        let spread_rad = config.angular_spread_deg.to_radians();
        let offsets: Vec<f64> = (0..config.paths_per_cluster)
            .map(|_| {
                let o: f64 = rng.sample(StandardNormal);
                o * spread_rad
            })
            .collect();
        let g: f64 = rng.sample(StandardNormal);
        let attenuation = 10f64.powf(
            -(config.cluster_atten_mean_db + g.abs() * config.cluster_atten_spread_db) / 10.0,
        );
        let bearing = wrap_angle(user_pos[1].atan2(user_pos[0]));
        let local_pos = [user_pos[0], user_pos[1], config.ms_height_m];
        mpcs = mpcs_from_cluster(
            user_pos,
            bearing,
            &offsets,
            amp_pl * attenuation.sqrt(),
            local_pos,
            config,
        );
    }

    Ok(UserLink {
        user_index,
        position: user_pos,
        mpcs,
    })
}

/// Generate one full drop: clusters, user positions, and per-user links.
pub fn generate_drop(config: &ScenarioConfig, rng: &mut impl Rng) -> Result<CellDrop> {
    let clusters = generate_clusters(config, rng);
    let positions = place_users(config, rng)?;
    let links = positions
        .into_iter()
        .enumerate()
        .map(|(idx, pos)| generate_mpcs(idx, pos, &clusters, config, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(CellDrop { clusters, links })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn test_config() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.m = 8;
        cfg.k = 4;
        cfg.k_s = 2;
        cfg
    }

    #[test]
    fn place_users_respects_exclusion_radius() {
        let mut cfg = test_config();
        cfg.k = 1;
        cfg.cell_radius_m = 500.0;
        cfg.exclusion_factor = 0.1;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pos = place_users(&cfg, &mut rng).unwrap();
            let d = (pos[0][0].powi(2) + pos[0][1].powi(2)).sqrt();
            assert!(d >= 50.0, "seed {seed}: user at {d} m breaches the exclusion radius");
        }
    }

    #[test]
    fn place_users_zero_exclusion_fills_square() {
        let mut cfg = test_config();
        cfg.exclusion_factor = 0.0;
        cfg.k = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pos = place_users(&cfg, &mut rng).unwrap();
        assert_eq!(pos.len(), 200);
        for p in &pos {
            assert!(p[0].abs() <= cfg.cell_radius_m && p[1].abs() <= cfg.cell_radius_m);
        }
        // with no exclusion some user should land near the BS over 200 draws
        let closest = pos
            .iter()
            .map(|p| (p[0].powi(2) + p[1].powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(closest < 0.2 * cfg.cell_radius_m);
    }

    #[test]
    fn place_users_is_deterministic() {
        let cfg = test_config();
        let a = place_users(&cfg, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = place_users(&cfg, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_loss_matches_direct_evaluation() {
        // L = 26*log10(100) + 20*log10(4 pi / 0.15) evaluated by hand
        let l_db = 26.0 * 2.0 + 20.0 * (4.0 * std::f64::consts::PI / 0.15).log10();
        assert!((l_db - 90.46).abs() < 0.01, "hand value drifted: {l_db}");
        let gain = path_loss_linear(100.0, 0.15).unwrap();
        assert!(((-10.0 * gain.log10()) - l_db).abs() < 1e-9);
    }

    #[test]
    fn path_loss_unity_point() {
        // d = 1 kills the distance term, lambda = 4 pi kills the constant
        let gain = path_loss_linear(1.0, 4.0 * std::f64::consts::PI).unwrap();
        assert!((gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_loss_decade_ratio() {
        let g100 = path_loss_linear(100.0, 0.15).unwrap();
        let g1000 = path_loss_linear(1000.0, 0.15).unwrap();
        let ratio = g1000 / g100;
        assert!(
            (ratio - 10f64.powf(-2.6)).abs() < 1e-12,
            "26 dB per decade expected, got ratio {ratio}"
        );
    }

    #[test]
    fn path_loss_rejects_nonpositive_distance() {
        assert!(path_loss_linear(0.0, 0.15).is_err());
        assert!(path_loss_linear(-5.0, 0.15).is_err());
    }

    #[test]
    fn path_loss_monotone_in_distance() {
        let mut prev = f64::INFINITY;
        for d in [1.0, 3.0, 10.0, 50.0, 200.0, 1000.0] {
            let g = path_loss_linear(d, 0.15).unwrap();
            assert!(g < prev, "gain must strictly decrease with distance");
            prev = g;
        }
    }

    #[test]
    fn vr_gain_endpoints_and_midpoint() {
        assert_eq!(vr_gain(0.0, 100.0, 20.0), 1.0);
        assert_eq!(vr_gain(101.0, 100.0, 20.0), 0.0);
        let mid = vr_gain(100.0 - 10.0, 100.0, 20.0);
        assert!((mid - 0.5).abs() < 1e-12, "raised-cosine midpoint, got {mid}");
    }

    #[test]
    fn vr_gain_monotone_and_continuous() {
        let (radius, transition) = (80.0, 25.0);
        let mut prev = 1.0;
        let mut last_val = vr_gain(0.0, radius, transition);
        let mut x = 0.0;
        while x <= 90.0 {
            let g = vr_gain(x, radius, transition);
            assert!(g <= prev + 1e-12, "non-increasing violated at {x}");
            assert!((g - last_val).abs() < 0.02, "jump at {x}");
            prev = g;
            last_val = g;
            x += 0.05;
        }
    }

    #[test]
    fn vr_gain_zero_transition_is_a_step() {
        assert_eq!(vr_gain(49.9, 50.0, 0.0), 1.0);
        assert_eq!(vr_gain(50.0, 50.0, 0.0), 0.0);
    }

    #[test]
    fn mpcs_single_broadside_cluster() {
        let mut cfg = test_config();
        // equal heights so the 3D BS-MS distance is exactly 100 m
        cfg.bs_height_m = 1.0;
        cfg.ms_height_m = 1.0;
        cfg.angular_spread_deg = 2.0;
        let lambda = cfg.wavelength_m();
        let cluster = Cluster {
            position: [200.0, 0.0, 1.0],
            vr_center: [100.0, 0.0],
            vr_radius_m: 500.0,
            attenuation: 1.0,
            path_azimuth_offsets: vec![0.01, -0.02, 0.005],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let link = generate_mpcs(0, [100.0, 0.0], &[cluster], &cfg, &mut rng).unwrap();
        assert_eq!(link.mpcs.len(), 3);
        // independent amplitude oracle: sqrt of the hand-evaluated gain
        let l_db = 26.0 * 100f64.log10() + 20.0 * (4.0 * std::f64::consts::PI / lambda).log10();
        let expected = 10f64.powf(-l_db / 20.0);
        for mpc in &link.mpcs {
            assert!(
                (mpc.geo_amplitude - expected).abs() < 1e-12 * expected,
                "a_ga {} vs oracle {expected}",
                mpc.geo_amplitude
            );
            assert!(mpc.departure_az_rad.abs() < 0.1, "broadside DoD expected");
        }
    }

    #[test]
    fn mpcs_fallback_when_no_cluster_visible() {
        let cfg = test_config();
        let cluster = Cluster {
            position: [400.0, 0.0, 5.0],
            vr_center: [400.0, 400.0],
            vr_radius_m: 10.0,
            attenuation: 0.5,
            path_azimuth_offsets: vec![0.0; cfg.paths_per_cluster],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let link = generate_mpcs(0, [-300.0, -300.0], &[cluster], &cfg, &mut rng).unwrap();
        assert_eq!(link.mpcs.len(), cfg.paths_per_cluster, "fallback local cluster");
        assert!(link.total_path_power() > 0.0);
    }

    #[test]
    fn mpcs_amplitude_scales_with_sqrt_attenuation() {
        let mut cfg = test_config();
        cfg.vr_transition_m = 0.0;
        let mk_cluster = |atten: f64| Cluster {
            position: [150.0, 80.0, 5.0],
            vr_center: [0.0, 0.0],
            vr_radius_m: 1000.0,
            attenuation: atten,
            path_azimuth_offsets: vec![0.0, 0.1],
        };
        let mut rng1 = ChaCha8Rng::seed_from_u64(5);
        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        let full = generate_mpcs(0, [50.0, 50.0], &[mk_cluster(1.0)], &cfg, &mut rng1).unwrap();
        let half = generate_mpcs(0, [50.0, 50.0], &[mk_cluster(0.5)], &cfg, &mut rng2).unwrap();
        for (a, b) in full.mpcs.iter().zip(&half.mpcs) {
            let ratio = b.geo_amplitude / a.geo_amplitude;
            assert!((ratio - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_power_reference_point() {
        let mut cfg = test_config();
        cfg.bandwidth_hz = 20.0e6;
        cfg.noise_temp_k = 290.0;
        cfg.noise_figure_db = 9.0;
        let p = noise_power(&cfg);
        // direct evaluation: 20e6 * 1.381e-23 * 290 * 10^0.9
        let expected = 20.0e6 * 1.381e-23 * 290.0 * 10f64.powf(0.9);
        assert!((p - expected).abs() < 1e-9 * expected);
        assert!((p - 6.362e-13).abs() < 1e-3 * 6.362e-13, "got {p:e}");
    }

    #[test]
    fn noise_power_zero_figure_and_linearity() {
        let mut cfg = test_config();
        cfg.noise_figure_db = 0.0;
        let base = noise_power(&cfg);
        assert!((base - cfg.bandwidth_hz * BOLTZMANN * cfg.noise_temp_k).abs() < 1e-30);
        cfg.bandwidth_hz *= 2.0;
        assert!((noise_power(&cfg) - 2.0 * base).abs() < 1e-24);
    }

    #[test]
    fn drop_generation_is_deterministic_and_sane() {
        let cfg = test_config();
        let a = generate_drop(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = generate_drop(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a.links.len(), cfg.k);
        for (la, lb) in a.links.iter().zip(&b.links) {
            assert_eq!(la.position, lb.position);
            assert_eq!(la.mpcs.len(), lb.mpcs.len());
            for (ma, mb) in la.mpcs.iter().zip(&lb.mpcs) {
                assert_eq!(ma.departure_az_rad, mb.departure_az_rad);
                assert_eq!(ma.geo_amplitude, mb.geo_amplitude);
                assert_eq!(ma.delay_s, mb.delay_s);
            }
        }
        for link in &a.links {
            assert!(!link.mpcs.is_empty());
            for mpc in &link.mpcs {
                assert!(mpc.geo_amplitude >= 0.0 && mpc.geo_amplitude.is_finite());
                assert!(
                    mpc.departure_az_rad > -std::f64::consts::PI
                        && mpc.departure_az_rad <= std::f64::consts::PI
                );
                assert!(mpc.delay_s > 0.0);
            }
        }
        for cluster in &a.clusters {
            assert!(cluster.attenuation > 0.0 && cluster.attenuation <= 1.0);
        }
    }

    #[test]
    fn mpcs_store_arrival_azimuth_and_geometric_delay() {
        let mut cfg = test_config();
        cfg.bs_height_m = 1.0;
        cfg.ms_height_m = 1.0;
        // cluster due north of the user, 50 m away; BS-cluster leg 111.8 m
        let cluster = Cluster {
            position: [100.0, 50.0, 1.0],
            vr_center: [100.0, 0.0],
            vr_radius_m: 500.0,
            attenuation: 1.0,
            path_azimuth_offsets: vec![0.0],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let link = generate_mpcs(0, [100.0, 0.0], &[cluster], &cfg, &mut rng).unwrap();
        let mpc = &link.mpcs[0];
        assert!(
            (mpc.arrival_az_rad - std::f64::consts::FRAC_PI_2).abs() < 1e-12,
            "arrival bearing {}",
            mpc.arrival_az_rad
        );
        let path_len = (100.0f64.powi(2) + 50.0f64.powi(2)).sqrt() + 50.0;
        assert!((mpc.delay_s - path_len / crate::SPEED_OF_LIGHT).abs() < 1e-18);
    }

    #[test]
    fn wrap_angle_range() {
        let pi = std::f64::consts::PI;
        assert_eq!(wrap_angle(pi), pi);
        assert!((wrap_angle(-pi) - pi).abs() < 1e-15);
        assert!((wrap_angle(3.0 * pi) - pi).abs() < 1e-12);
        assert!((wrap_angle(2.5 * pi) - 0.5 * pi).abs() < 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
    }
}
