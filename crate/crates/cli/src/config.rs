//! Line-based `key = value` run configuration.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hexcover_core::baselines::BaselineFading;
use hexcover_core::{
    Error, FadingModel, NetworkParams, PlacementRule, PropagationParams, Result, Reuse, ScMode,
    SimConfig,
};

/// Every recognised key with its default and a short description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("alpha", "4", "path-loss exponent"),
    ("sigma_l_db", "4", "shadowing standard deviation"),
    ("r_ref_m", "1", "reference distance of the path-loss law"),
    ("r_mc_m", "1000", "macrocell radius"),
    ("r_sc_m", "150", "small-cell radius"),
    ("gamma_g", "0.25", "relative width of region A2"),
    ("sigma_m_sq_dbm", "43", "macro transmit power"),
    ("sigma_sc_sq_dbm", "20", "small-cell transmit power"),
    ("sigma_n_sq_dbm", "-100", "noise power"),
    ("gamma_gap_db", "2", "SNR gap"),
    ("c0_bps_hz", "1", "target spectral efficiency"),
    ("eta", "0.5", "outage tolerance"),
    ("reuse", "1", "macro frequency reuse factor, 1 or 7"),
    ("w_hz", "10000000", "system bandwidth"),
    ("m_slots", "50", "users sharing the band"),
    ("tiers", "2", "interfering tiers in the simulator"),
    ("grid_step_m", "10", "user grid spacing"),
    ("fading_draws", "500", "Rayleigh draws per point"),
    ("realizations", "200", "shadowing realizations"),
    ("sc_mode", "none", "none, isolated, orthogonal, cochannel or orthogonal_reuse3"),
    ("fading", "averaged", "averaged or rayleigh"),
    ("placement", "center", "center or majority"),
    ("poly_order", "3", "interference polynomial order"),
    ("fit_samples", "101", "radii per interference fit"),
    ("bounds_dir", ".", "directory for cached interference fits"),
    ("baseline_window_w_m", "9000", "baseline window width"),
    ("baseline_window_h_m", "9000", "baseline window height"),
    ("baseline_guard_m", "auto", "guard margin, auto for 2/sqrt(pi density)"),
    ("baseline_grid_step_m", "50", "baseline user grid spacing"),
    ("baseline_fading", "averaged", "averaged or rayleigh_exact"),
    ("ppp_density_per_m2", "auto", "PPP density, auto to match the lattice"),
    ("site_center_lat_deg", "0", "projection centre latitude"),
    ("site_center_lon_deg", "0", "projection centre longitude"),
    ("seed", "none", "master seed, required by seeded commands"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: NetworkParams,
    pub tiers: usize,
    pub grid_step_m: f64,
    pub fading_draws: usize,
    pub realizations: usize,
    pub sc_mode: ScMode,
    pub fading: FadingModel,
    pub placement: PlacementRule,
    pub poly_order: usize,
    pub fit_samples: usize,
    pub bounds_dir: PathBuf,
    pub baseline_window_m: (f64, f64),
    pub baseline_guard_m: Option<f64>,
    pub baseline_grid_step_m: f64,
    pub baseline_fading: BaselineFading,
    pub ppp_density_per_m2: Option<f64>,
    pub site_center: (f64, f64),
    pub seed: Option<u64>,
    /// Keys set explicitly, by file or override.
    pub explicit: BTreeSet<String>,
    pub source: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        RunConfig {
            params: NetworkParams::default(),
            tiers: sim.tiers,
            grid_step_m: sim.grid_step,
            fading_draws: sim.fading_draws,
            realizations: sim.realizations,
            sc_mode: sim.sc_mode,
            fading: sim.fading,
            placement: sim.placement,
            poly_order: hexcover_core::interference::DEFAULT_ORDER,
            fit_samples: hexcover_core::interference::DEFAULT_SAMPLES,
            bounds_dir: PathBuf::from("."),
            baseline_window_m: (9000.0, 9000.0),
            baseline_guard_m: None,
            baseline_grid_step_m: 50.0,
            baseline_fading: BaselineFading::Averaged,
            ppp_density_per_m2: None,
            site_center: (0.0, 0.0),
            seed: None,
            explicit: BTreeSet::new(),
            source: None,
        }
    }
}

fn invalid(key: &str, value: &str, why: &str) -> Error {
    Error::InvalidArgument(format!("{key} = {value}: {why}"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| invalid(key, value, "not a valid number"))
}

fn auto(key: &str, value: &str) -> Result<Option<f64>> {
    if value == "auto" {
        Ok(None)
    } else {
        num(key, value).map(Some)
    }
}

fn show_auto(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".to_string(), |x| x.to_string())
}

fn baseline_fading_name(f: BaselineFading) -> &'static str {
    match f {
        BaselineFading::Averaged => "averaged",
        BaselineFading::RayleighExact => "rayleigh_exact",
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let p = &mut self.params;
        match key {
            "alpha" | "sigma_l_db" | "r_ref_m" => {
                let x: f64 = num(key, v)?;
                let (mut a, mut s, mut r) = (p.propagation.alpha, p.propagation.sigma_l_db, p.propagation.r_ref);
                match key {
                    "alpha" => a = x,
                    "sigma_l_db" => s = x,
                    _ => r = x,
                }
                p.propagation = PropagationParams::new(a, s, r)?;
            }
            "r_mc_m" => p.r_mc = num(key, v)?,
            "r_sc_m" => p.r_sc = num(key, v)?,
            "gamma_g" => p.gamma_g = num(key, v)?,
            "sigma_m_sq_dbm" => p.sigma_m_sq_dbm = num(key, v)?,
            "sigma_sc_sq_dbm" => p.sigma_sc_sq_dbm = num(key, v)?,
            "sigma_n_sq_dbm" => p.sigma_n_sq_dbm = num(key, v)?,
            "gamma_gap_db" => p.gamma_gap_db = num(key, v)?,
            "c0_bps_hz" => p.c0 = num(key, v)?,
            "eta" => p.eta = num(key, v)?,
            "reuse" => p.reuse = Reuse::from_factor(num(key, v)?)?,
            "w_hz" => p.w_hz = num(key, v)?,
            "m_slots" => p.m_slots = num(key, v)?,
            "tiers" => self.tiers = num(key, v)?,
            "grid_step_m" => self.grid_step_m = num(key, v)?,
            "fading_draws" => self.fading_draws = num(key, v)?,
            "realizations" => self.realizations = num(key, v)?,
            "sc_mode" => self.sc_mode = ScMode::parse(v)?,
            "fading" => self.fading = FadingModel::parse(v)?,
            "placement" => self.placement = PlacementRule::parse(v)?,
            "poly_order" => self.poly_order = num(key, v)?,
            "fit_samples" => self.fit_samples = num(key, v)?,
            "bounds_dir" => self.bounds_dir = PathBuf::from(v),
            "baseline_window_w_m" => self.baseline_window_m.0 = num(key, v)?,
            "baseline_window_h_m" => self.baseline_window_m.1 = num(key, v)?,
            "baseline_guard_m" => self.baseline_guard_m = auto(key, v)?,
            "baseline_grid_step_m" => self.baseline_grid_step_m = num(key, v)?,
            "baseline_fading" => {
                self.baseline_fading = match v {
                    "averaged" => BaselineFading::Averaged,
                    "rayleigh_exact" => BaselineFading::RayleighExact,
                    _ => return Err(invalid(key, v, "expected averaged or rayleigh_exact")),
                }
            }
            "ppp_density_per_m2" => self.ppp_density_per_m2 = auto(key, v)?,
            "site_center_lat_deg" => self.site_center.0 = num(key, v)?,
            "site_center_lon_deg" => self.site_center.1 = num(key, v)?,
            "seed" => self.seed = if v == "none" { None } else { Some(num(key, v)?) },
            _ => return Err(Error::InvalidArgument(format!("unknown config key '{key}'"))),
        }
        self.explicit.insert(key.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.params;
        Some(match key {
            "alpha" => p.propagation.alpha.to_string(),
            "sigma_l_db" => p.propagation.sigma_l_db.to_string(),
            "r_ref_m" => p.propagation.r_ref.to_string(),
            "r_mc_m" => p.r_mc.to_string(),
            "r_sc_m" => p.r_sc.to_string(),
            "gamma_g" => p.gamma_g.to_string(),
            "sigma_m_sq_dbm" => p.sigma_m_sq_dbm.to_string(),
            "sigma_sc_sq_dbm" => p.sigma_sc_sq_dbm.to_string(),
            "sigma_n_sq_dbm" => p.sigma_n_sq_dbm.to_string(),
            "gamma_gap_db" => p.gamma_gap_db.to_string(),
            "c0_bps_hz" => p.c0.to_string(),
            "eta" => p.eta.to_string(),
            "reuse" => p.reuse.factor().to_string(),
            "w_hz" => p.w_hz.to_string(),
            "m_slots" => p.m_slots.to_string(),
            "tiers" => self.tiers.to_string(),
            "grid_step_m" => self.grid_step_m.to_string(),
            "fading_draws" => self.fading_draws.to_string(),
            "realizations" => self.realizations.to_string(),
            "sc_mode" => self.sc_mode.name().to_string(),
            "fading" => self.fading.name().to_string(),
            "placement" => self.placement.name().to_string(),
            "poly_order" => self.poly_order.to_string(),
            "fit_samples" => self.fit_samples.to_string(),
            "bounds_dir" => self.bounds_dir.display().to_string(),
            "baseline_window_w_m" => self.baseline_window_m.0.to_string(),
            "baseline_window_h_m" => self.baseline_window_m.1.to_string(),
            "baseline_guard_m" => show_auto(self.baseline_guard_m),
            "baseline_grid_step_m" => self.baseline_grid_step_m.to_string(),
            "baseline_fading" => baseline_fading_name(self.baseline_fading).to_string(),
            "ppp_density_per_m2" => show_auto(self.ppp_density_per_m2),
            "site_center_lat_deg" => self.site_center.0.to_string(),
            "site_center_lon_deg" => self.site_center.1.to_string(),
            "seed" => self.seed.map_or_else(|| "none".into(), |s| s.to_string()),
            _ => return None,
        })
    }

    /// Parses config text. Blank lines and `#` comments are ignored and a
    /// key may appear only once.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = RunConfig {
            source: Some(path.to_path_buf()),
            ..RunConfig::default()
        };
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(k + 1, format!("expected 'key = value', found '{line}'")))?;
            let key = key.trim();
            if cfg.explicit.contains(key) {
                return Err(err(k + 1, format!("duplicate key '{key}'")));
            }
            cfg.set(key, value).map_err(|e| err(k + 1, e.to_string()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_config(0).validate()
    }

    /// Serialized form. Explicit keys are written as settings and defaults
    /// as comments, so parsing the text gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(key, _, doc) in KEYS {
            let value = self.get(key).expect("known key");
            if self.explicit.contains(key) {
                let _ = writeln!(out, "{key} = {value}");
            } else {
                let _ = writeln!(out, "# {key} = {value}  ({doc}, default)");
            }
        }
        out
    }

    pub fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            params: self.params,
            tiers: self.tiers,
            grid_step: self.grid_step_m,
            fading_draws: self.fading_draws,
            realizations: self.realizations,
            seed,
            sc_mode: self.sc_mode,
            fading: self.fading,
            placement: self.placement,
        }
    }
}

/// Help text listing every key and its default.
pub fn keys_help() -> String {
    let mut s = String::from("Config keys (key = value, '#' starts a comment):\n");
    for &(key, default, doc) in KEYS {
        let _ = writeln!(s, "  {key:<22} default {default:<10} {doc}");
    }
    s
}
