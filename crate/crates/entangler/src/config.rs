//! JSON experiment configuration. Every field is optional; unknown keys are
//! rejected.

use std::path::Path;

use entangler_core::{DetuningSchedule64, EvolveOptions, PhysicalParams64};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub params: ParamsConfig,
    /// Cavity Fock levels kept by the full model.
    pub fock_dim: usize,
    pub model: ModelKind,
    /// Detuning profile for experiments that take one; each experiment has
    /// its own default.
    pub schedule: Option<ScheduleConfig>,
    pub initial_state: InitialState,
    /// Horizon in ms; each experiment has its own default.
    pub t_final: Option<f64>,
    /// Samples per trajectory, both ends included.
    pub output_points: usize,
    pub grids: Grids,
    pub tolerances: Tolerances,
    /// Fraction of the reference concurrence that counts as converged.
    pub threshold: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            fock_dim: PhysicalParams64::DEFAULT_FOCK_DIM,
            model: ModelKind::Reduced,
            schedule: None,
            initial_state: InitialState::Basis { index: 0 },
            t_final: None,
            output_points: 401,
            grids: Grids::default(),
            tolerances: Tolerances::default(),
            threshold: 0.99,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub alpha0: f64,
    pub g: f64,
    pub gamma_b: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub eta_g: f64,
    pub eta_omega: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = PhysicalParams64::standard();
        Self {
            alpha0: p.alpha0,
            g: p.g1,
            gamma_b: p.gamma_b,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            eta_g: p.eta_g,
            eta_omega: p.eta_omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Reduced,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Constant { delta_omega: f64 },
    Linear { initial: f64, t_end: f64 },
    Exponential { initial: f64, rate: f64 },
    ExponentialOffset { initial: f64, offset: f64, rate: f64 },
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<DetuningSchedule64, HarnessError> {
        let s = match *self {
            Self::Constant { delta_omega } => Ok(DetuningSchedule64::constant(delta_omega)),
            Self::Linear { initial, t_end } => DetuningSchedule64::linear(initial, t_end),
            Self::Exponential { initial, rate } => DetuningSchedule64::exponential(initial, rate),
            Self::ExponentialOffset {
                initial,
                offset,
                rate,
            } => DetuningSchedule64::exponential_offset(initial, offset, rate),
        };
        s.map_err(|e| HarnessError::Config(format!("schedule: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// Computational basis state of the atoms, order (↑↑, ↑↓, ↓↑, ↓↓);
    /// the cavity starts in vacuum.
    Basis { index: usize },
    /// Haar-random pure two-atom state drawn from this seed.
    Random { seed: u64 },
    /// Explicit 4×4 atomic density matrix; `im` defaults to zero.
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    pub kappa: Option<Vec<f64>>,
    pub gamma_over_alpha: Option<Vec<f64>>,
    pub gamma_n: Option<Vec<f64>>,
    pub eta_g: Option<Vec<f64>>,
    pub eta_omega: Option<Vec<f64>>,
    pub gamma_b_scale: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = EvolveOptions::<f64>::default();
        Self {
            rtol: d.rtol,
            atol: d.atol,
        }
    }
}

/// `start, start + step, …` up to `stop` inclusive, without drift.
pub fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| round12(start + step * k as f64)).collect()
}

/// `n` points spaced logarithmically over `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| round12(10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)))
        .collect()
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        self.physical_params()
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.output_points < 2 {
            return bad("output_points must be at least 2".into());
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return bad(format!("threshold must lie in (0, 1], got {}", self.threshold));
        }
        if !(self.tolerances.rtol > 0.0 && self.tolerances.atol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("t_final must be positive, got {t}"));
            }
        }
        if let Some(s) = &self.schedule {
            s.build()?;
        }
        let grids = [
            ("kappa", &self.grids.kappa),
            ("gamma_over_alpha", &self.grids.gamma_over_alpha),
            ("gamma_n", &self.grids.gamma_n),
            ("eta_g", &self.grids.eta_g),
            ("eta_omega", &self.grids.eta_omega),
            ("gamma_b_scale", &self.grids.gamma_b_scale),
        ];
        for (name, grid) in grids {
            if let Some(g) = grid {
                if g.is_empty() {
                    return bad(format!("grid `{name}` is empty"));
                }
                if g.iter().any(|x| !x.is_finite()) {
                    return bad(format!("grid `{name}` has non-finite entries"));
                }
            }
        }
        if self.grids.gamma_n.iter().flatten().any(|&x| x < 0.0) {
            return bad("grid `gamma_n` must be non-negative".into());
        }
        if self.grids.gamma_over_alpha.iter().flatten().any(|&x| x <= 0.0) {
            return bad("grid `gamma_over_alpha` must be positive".into());
        }
        if self.grids.gamma_b_scale.iter().flatten().any(|&x| x <= 0.0) {
            return bad("grid `gamma_b_scale` must be positive".into());
        }
        match &self.initial_state {
            InitialState::Basis { index } if *index >= 4 => {
                return bad(format!("basis index {index} out of range 0..4"));
            }
            InitialState::Matrix { re, im } => {
                let square = |m: &Vec<Vec<f64>>| m.len() == 4 && m.iter().all(|r| r.len() == 4);
                if !square(re) || !im.as_ref().is_none_or(square) {
                    return bad("initial matrix must be 4×4".into());
                }
            }
            _ => {}
        }
        crate::experiments::initial_atomic_state(self)?;
        Ok(())
    }

    pub fn physical_params(&self) -> PhysicalParams64 {
        let p = &self.params;
        PhysicalParams64 {
            alpha0: p.alpha0,
            g1: p.g,
            gamma_b: p.gamma_b,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
            eta_g: p.eta_g,
            eta_omega: p.eta_omega,
            fock_dim: self.fock_dim,
        }
    }

    pub fn evolve_options(&self) -> EvolveOptions<f64> {
        EvolveOptions {
            rtol: self.tolerances.rtol,
            atol: self.tolerances.atol,
            ..EvolveOptions::default()
        }
    }

    pub fn schedule_or(&self, default: DetuningSchedule64) -> Result<DetuningSchedule64, HarnessError> {
        match &self.schedule {
            Some(s) => s.build(),
            None => Ok(default),
        }
    }

    /// SHA-256 of the canonical JSON form, first 16 hex digits. The worker
    /// count does not enter: it never changes results.
    pub fn params_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut canonical = self.clone();
        canonical.workers = 1;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))[..16].to_string()
    }

    pub fn kappa_grid(&self, default: impl FnOnce() -> Vec<f64>) -> Vec<f64> {
        self.grids.kappa.clone().unwrap_or_else(default)
    }

    pub fn gamma_over_alpha_grid(&self) -> Vec<f64> {
        self.grids
            .gamma_over_alpha
            .clone()
            .unwrap_or_else(|| range(0.5, 5.0, 0.5))
    }

    /// 0 followed by 9 logarithmic points over [0.001, 0.1] kHz.
    pub fn gamma_n_grid(&self) -> Vec<f64> {
        self.grids.gamma_n.clone().unwrap_or_else(|| {
            std::iter::once(0.0)
                .chain(logspace(1e-3, 0.1, 9))
                .collect()
        })
    }

    pub fn eta_g_grid(&self) -> Vec<f64> {
        self.grids
            .eta_g
            .clone()
            .unwrap_or_else(|| range(0.0, 0.2, 0.02))
    }

    pub fn eta_omega_grid(&self) -> Vec<f64> {
        self.grids
            .eta_omega
            .clone()
            .unwrap_or_else(|| range(0.0, 1.0, 0.1))
    }

    pub fn gamma_b_scale_grid(&self) -> Vec<f64> {
        self.grids.gamma_b_scale.clone().unwrap_or_else(|| vec![10.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let cfg = Config::from_json("{}").unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.physical_params(), PhysicalParams64::standard());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            Config::from_json(r#"{"paramz": {}}"#),
            Err(HarnessError::Config(_))
        ));
        assert!(Config::from_json(r#"{"params": {"g2": 1.0}}"#).is_err());
        assert!(Config::from_json(r#"{"schedule": {"kind": "constant", "delta_omega": 1, "x": 2}}"#).is_err());
    }

    #[test]
    fn full_document_parses() {
        let cfg = Config::from_json(
            r#"{
                "params": {"alpha0": 150, "g": 180, "gamma_b": 1800, "gamma1": 0.01, "gamma2": 0.01, "eta_g": 0.05, "eta_omega": 0.1},
                "fock_dim": 6,
                "model": "full",
                "schedule": {"kind": "exponential-offset", "initial": 100, "offset": 5, "rate": 0.8},
                "initial_state": {"kind": "random", "seed": 9},
                "t_final": 12.5,
                "output_points": 51,
                "grids": {"kappa": [0.1, 0.2], "gamma_n": [0, 0.01]},
                "tolerances": {"rtol": 1e-7, "atol": 1e-9},
                "threshold": 0.95,
                "seed": 4,
                "workers": 3
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.model, ModelKind::Full);
        assert_eq!(cfg.physical_params().fock_dim, 6);
        assert_eq!(cfg.kappa_grid(Vec::new), vec![0.1, 0.2]);
        assert!(matches!(
            cfg.schedule.unwrap().build().unwrap(),
            DetuningSchedule64::ExponentialOffset { .. }
        ));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for doc in [
            r#"{"fock_dim": 1}"#,
            r#"{"workers": 0}"#,
            r#"{"grids": {"kappa": []}}"#,
            r#"{"grids": {"gamma_n": [-1]}}"#,
            r#"{"initial_state": {"kind": "basis", "index": 4}}"#,
            r#"{"initial_state": {"kind": "matrix", "re": [[1, 0], [0, 0]]}}"#,
            r#"{"initial_state": {"kind": "matrix", "re": [[2,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}}"#,
            r#"{"schedule": {"kind": "linear", "initial": 100, "t_end": 0}}"#,
            r#"{"t_final": -1}"#,
            r#"{"params": {"gamma_b": 0}}"#,
        ] {
            assert!(matches!(Config::from_json(doc), Err(HarnessError::Config(_))), "{doc}");
        }
    }

    #[test]
    fn default_grids() {
        let cfg = Config::default();
        assert_eq!(cfg.gamma_over_alpha_grid().len(), 10);
        assert_eq!(cfg.eta_omega_grid(), vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
        assert_eq!(cfg.eta_g_grid().len(), 11);
        let gn = cfg.gamma_n_grid();
        assert_eq!(gn.len(), 10);
        assert_eq!((gn[0], gn[1], gn[9]), (0.0, 0.001, 0.1));
        assert!((gn[5] - 0.01).abs() < 1e-12);
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.params_hash(), b.params_hash());
        b.workers = 8;
        assert_eq!(a.params_hash(), b.params_hash());
        b.seed = 1;
        assert_ne!(a.params_hash(), b.params_hash());
        assert_eq!(a.params_hash().len(), 16);
    }
}
