//! Scenario configuration: every physical and algorithmic parameter of one
//! experiment, plus validation and the flat `key = value` file format used
//! by the CLI.

use crate::error::{Error, Result};

/// All parameters of one simulated scenario.
///
/// Defaults follow the micro-cell NLoS setup: 2 GHz carrier, 20 MHz
/// bandwidth, 9 dB noise figure, 290 K noise temperature, a square cell of
/// half side 500 m with a 0.1 exclusion radius, half-wavelength element
/// spacing, and 10 dBm per-user transmit power.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Number of base-station antennas (also the number of angular bins).
    pub m: usize,
    /// Total number of users in the cell.
    pub k: usize,
    /// Maximum number of users selected per scheduling round.
    pub k_s: usize,
    /// Half side of the square cell in meters.
    pub cell_radius_m: f64,
    /// Users closer than `exclusion_factor * cell_radius_m` to the BS are
    /// resampled.
    pub exclusion_factor: f64,
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Antenna element spacing in wavelengths.
    pub d_over_lambda: f64,
    /// Bandwidth in Hz.
    pub bandwidth_hz: f64,
    /// Receiver noise figure in dB.
    pub noise_figure_db: f64,
    /// Noise temperature in Kelvin.
    pub noise_temp_k: f64,
    /// Per-user transmit power in dBm.
    pub tx_power_dbm: f64,
    /// Uplink pilot power in dBm used by the MMSE channel estimator; a
    /// terminal sounding budget, deliberately not tied to the downlink
    /// power.
    pub pilot_power_dbm: f64,
    /// Scheduling orthogonality threshold in [0, 1].
    pub epsilon: f64,
    /// Overlap threshold handed to the bin-count baseline scheduler. The
    /// reference scheme imposes no orthogonality constraint of its own, so
    /// the default of 1 admits any overlap short of colinearity.
    pub jsdm_epsilon: f64,
    /// Number of scattering clusters in the cell.
    pub n_clusters: usize,
    /// Number of multipath components per cluster.
    pub paths_per_cluster: usize,
    /// Visibility-region radius in meters.
    pub vr_radius_m: f64,
    /// Width of the visibility-region transition zone in meters.
    pub vr_transition_m: f64,
    /// Base-station antenna height in meters.
    pub bs_height_m: f64,
    /// User terminal height in meters.
    pub ms_height_m: f64,
    /// Per-cluster azimuth spread of path departure angles, in degrees.
    pub angular_spread_deg: f64,
    /// Mean cluster excess attenuation in dB; every cluster is at least
    /// this far below the direct path-loss level.
    pub cluster_atten_mean_db: f64,
    /// Spread (dB) of the folded-normal exponent that draws the cluster
    /// attenuation; larger values give weaker, more varied clusters.
    pub cluster_atten_spread_db: f64,
    /// Direction constraint for the channel-norm greedy baseline.
    pub gwc_gamma: f64,
    /// Monte Carlo drop count.
    pub drops: usize,
    /// Master RNG seed; per-drop streams are derived from it.
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            m: 64,
            k: 20,
            k_s: 5,
            cell_radius_m: 500.0,
            exclusion_factor: 0.1,
            carrier_hz: 2.0e9,
            d_over_lambda: 0.5,
            bandwidth_hz: 20.0e6,
            noise_figure_db: 9.0,
            noise_temp_k: 290.0,
            tx_power_dbm: 10.0,
            pilot_power_dbm: 10.0,
            epsilon: 0.1,
            jsdm_epsilon: 1.0,
            n_clusters: 20,
            paths_per_cluster: 6,
            vr_radius_m: 200.0,
            vr_transition_m: 30.0,
            bs_height_m: 5.0,
            ms_height_m: 1.5,
            angular_spread_deg: 2.5,
            cluster_atten_mean_db: 6.0,
            cluster_atten_spread_db: 12.0,
            gwc_gamma: 0.3,
            drops: 200,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    /// Carrier wavelength in meters.
    pub fn wavelength_m(&self) -> f64 {
        crate::SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Per-user transmit power in watts.
    pub fn tx_power_w(&self) -> f64 {
        10f64.powf((self.tx_power_dbm - 30.0) / 10.0)
    }

    /// Uplink pilot power in watts.
    pub fn pilot_power_w(&self) -> f64 {
        10f64.powf((self.pilot_power_dbm - 30.0) / 10.0)
    }

    /// Check every invariant; returns the first violated field.
    pub fn validate(&self) -> Result<()> {
        fn fail(field: &str, reason: impl Into<String>) -> Result<()> {
            Err(Error::InvalidConfig {
                field: field.to_string(),
                reason: reason.into(),
            })
        }
        if self.m == 0 {
            return fail("m", "antenna count must be >= 1");
        }
        if self.k_s == 0 {
            return fail("k_s", "must select at least one user");
        }
        if self.k_s > self.m {
            return fail("k_s", format!("k_s={} exceeds m={}", self.k_s, self.m));
        }
        if self.k < self.k_s {
            return fail("k", format!("k={} is below k_s={}", self.k, self.k_s));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return fail("epsilon", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.jsdm_epsilon) {
            return fail("jsdm_epsilon", "must lie in [0, 1]");
        }
        for (name, v) in [
            ("cell_radius_m", self.cell_radius_m),
            ("carrier_hz", self.carrier_hz),
            ("d_over_lambda", self.d_over_lambda),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_temp_k", self.noise_temp_k),
            ("vr_radius_m", self.vr_radius_m),
            ("bs_height_m", self.bs_height_m),
            ("ms_height_m", self.ms_height_m),
            ("angular_spread_deg", self.angular_spread_deg),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return fail(name, "must be strictly positive and finite");
            }
        }
        for (name, v) in [
            ("exclusion_factor", self.exclusion_factor),
            ("vr_transition_m", self.vr_transition_m),
            ("cluster_atten_mean_db", self.cluster_atten_mean_db),
            ("cluster_atten_spread_db", self.cluster_atten_spread_db),
        ] {
            if v < 0.0 || !v.is_finite() {
                return fail(name, "must be nonnegative and finite");
            }
        }
        if self.exclusion_factor >= 1.0 {
            return fail("exclusion_factor", "must be below 1 or no user fits the cell");
        }
        if !self.gwc_gamma.is_finite() || self.gwc_gamma <= 0.0 {
            return fail("gwc_gamma", "must be strictly positive");
        }
        if self.n_clusters == 0 {
            return fail("n_clusters", "need at least one cluster");
        }
        if self.paths_per_cluster == 0 {
            return fail("paths_per_cluster", "need at least one path per cluster");
        }
        if self.drops == 0 {
            return fail("drops", "need at least one drop");
        }
        if !self.noise_figure_db.is_finite()
            || !self.tx_power_dbm.is_finite()
            || !self.pilot_power_dbm.is_finite()
        {
            return fail("noise_figure_db/tx_power_dbm/pilot_power_dbm", "must be finite");
        }
        Ok(())
    }

    /// Set one field by its name, parsing `value` as the field's type.
    ///
    /// The accepted keys are exactly the struct field names.
    pub fn set_field(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse_f64(key: &str, value: &str) -> Result<f64> {
            value.trim().parse::<f64>().map_err(|_| Error::InvalidConfig {
                field: key.to_string(),
                reason: format!("`{value}` is not a number"),
            })
        }
        fn parse_usize(key: &str, value: &str) -> Result<usize> {
            value.trim().parse::<usize>().map_err(|_| Error::InvalidConfig {
                field: key.to_string(),
                reason: format!("`{value}` is not a nonnegative integer"),
            })
        }
        match key {
            "m" => self.m = parse_usize(key, value)?,
            "k" => self.k = parse_usize(key, value)?,
            "k_s" => self.k_s = parse_usize(key, value)?,
            "cell_radius_m" => self.cell_radius_m = parse_f64(key, value)?,
            "exclusion_factor" => self.exclusion_factor = parse_f64(key, value)?,
            "carrier_hz" => self.carrier_hz = parse_f64(key, value)?,
            "d_over_lambda" => self.d_over_lambda = parse_f64(key, value)?,
            "bandwidth_hz" => self.bandwidth_hz = parse_f64(key, value)?,
            "noise_figure_db" => self.noise_figure_db = parse_f64(key, value)?,
            "noise_temp_k" => self.noise_temp_k = parse_f64(key, value)?,
            "tx_power_dbm" => self.tx_power_dbm = parse_f64(key, value)?,
            "pilot_power_dbm" => self.pilot_power_dbm = parse_f64(key, value)?,
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            "jsdm_epsilon" => self.jsdm_epsilon = parse_f64(key, value)?,
            "n_clusters" => self.n_clusters = parse_usize(key, value)?,
            "paths_per_cluster" => self.paths_per_cluster = parse_usize(key, value)?,
            "vr_radius_m" => self.vr_radius_m = parse_f64(key, value)?,
            "vr_transition_m" => self.vr_transition_m = parse_f64(key, value)?,
            "bs_height_m" => self.bs_height_m = parse_f64(key, value)?,
            "ms_height_m" => self.ms_height_m = parse_f64(key, value)?,
            "angular_spread_deg" => self.angular_spread_deg = parse_f64(key, value)?,
            "cluster_atten_mean_db" => {
                self.cluster_atten_mean_db = parse_f64(key, value)?
            }
            "cluster_atten_spread_db" => {
                self.cluster_atten_spread_db = parse_f64(key, value)?
            }
            "gwc_gamma" => self.gwc_gamma = parse_f64(key, value)?,
            "drops" => self.drops = parse_usize(key, value)?,
            "seed" => {
                self.seed = value.trim().parse::<u64>().map_err(|_| Error::InvalidConfig {
                    field: key.to_string(),
                    reason: format!("`{value}` is not a u64"),
                })?
            }
            other => {
                return Err(Error::InvalidConfig {
                    field: other.to_string(),
                    reason: "unknown key".to_string(),
                })
            }
        }
        Ok(())
    }

    /// Parse a flat `key = value` config file. `#` starts a comment; blank
    /// lines are ignored. The result is validated.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::ConfigParse {
                line: idx + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set_field(key.trim(), value).map_err(|e| Error::ConfigParse {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_k_s_above_m() {
        let mut cfg = ScenarioConfig::default();
        cfg.m = 4;
        cfg.k_s = 5;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("k_s"), "got {err}");
    }

    #[test]
    fn rejects_epsilon_outside_unit_interval() {
        let mut cfg = ScenarioConfig::default();
        cfg.epsilon = 1.5;
        assert!(cfg.validate().is_err());
        cfg.epsilon = -0.1;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn kv_roundtrip_overrides_defaults() {
        let text = "m = 16\nk = 8   # inline comment\n\nepsilon = 0.4\nseed = 99\n";
        let cfg = ScenarioConfig::from_kv_text(text).unwrap();
        assert_eq!(cfg.m, 16);
        assert_eq!(cfg.k, 8);
        assert_eq!(cfg.seed, 99);
        assert!((cfg.epsilon - 0.4).abs() < 1e-15);
        // untouched field keeps its default
        assert_eq!(cfg.drops, ScenarioConfig::default().drops);
    }

    #[test]
    fn kv_unknown_key_is_named() {
        let err = ScenarioConfig::from_kv_text("bogus = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "error should name the key: {msg}");
        assert!(msg.contains("line 1"), "error should carry the line: {msg}");
    }

    #[test]
    fn tx_power_conversion() {
        let mut cfg = ScenarioConfig::default();
        cfg.tx_power_dbm = 30.0;
        assert!((cfg.tx_power_w() - 1.0).abs() < 1e-12);
        cfg.tx_power_dbm = 0.0;
        assert!((cfg.tx_power_w() - 1e-3).abs() < 1e-15);
    }
}
