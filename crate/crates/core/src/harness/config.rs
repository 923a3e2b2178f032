use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::DistributionSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    VarianceSweep,
    NoiseSweep,
    InfluenceProfile,
    SmallballTail,
    Geometry,
    Shape,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        Self::VarianceSweep,
        Self::NoiseSweep,
        Self::InfluenceProfile,
        Self::SmallballTail,
        Self::Geometry,
        Self::Shape,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::VarianceSweep => "variance-sweep",
            Self::NoiseSweep => "noise-sweep",
            Self::InfluenceProfile => "influence-profile",
            Self::SmallballTail => "smallball-tail",
            Self::Geometry => "geometry",
            Self::Shape => "shape",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::config(format!("field `kind`: unknown experiment kind \"{name}\"; valid kinds: {}", valid_kinds())))
    }

    /// Stable id mixed into every seed of this kind.
    pub fn seed_id(self) -> u64 {
        self as u64
    }

    /// Grid keys the kind reads.
    pub fn grid_keys(self) -> &'static [&'static str] {
        match self {
            Self::VarianceSweep | Self::Geometry => &["n", "k", "gamma"],
            Self::NoiseSweep => &["n", "k", "gamma", "alpha", "eps"],
            Self::InfluenceProfile => &["n", "k", "gamma", "alpha"],
            Self::SmallballTail => &["n", "k", "gamma", "alpha", "r"],
            Self::Shape => &["n", "h"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn valid_kinds() -> String {
    ExperimentKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

pub const DEFAULT_N: [usize; 4] = [16, 32, 64, 128];
pub const DEFAULT_GAMMA: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_ALPHA: [f64; 3] = [0.25, 0.5, 0.75];
pub const DEFAULT_EPS: [f64; 6] = [0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
pub const DEFAULT_R: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
pub const DEFAULT_H: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    /// Exponents for `k = ceil(n^gamma)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    /// Direction slopes for the shape fan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
}

impl Grid {
    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let pairs: [(&'static str, bool); 7] = [
            ("n", self.n.is_some()),
            ("k", self.k.is_some()),
            ("gamma", self.gamma.is_some()),
            ("alpha", self.alpha.is_some()),
            ("eps", self.eps.is_some()),
            ("r", self.r.is_some()),
            ("h", self.h.is_some()),
        ];
        for (key, present) in pairs {
            if present {
                keys.push(key);
            }
        }
        keys
    }

    pub fn n_values(&self) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| DEFAULT_N.to_vec())
    }

    /// Explicit `k` values plus `ceil(n^gamma)`; with neither given, `k = 1`
    /// and the default exponents.
    pub fn k_values(&self, n: usize) -> Vec<usize> {
        let mut ks = BTreeSet::new();
        let (explicit, gammas) = match (&self.k, &self.gamma) {
            (None, None) => (vec![1], DEFAULT_GAMMA.to_vec()),
            (k, g) => (k.clone().unwrap_or_default(), g.clone().unwrap_or_default()),
        };
        ks.extend(explicit);
        for g in gammas {
            ks.insert(k_of_gamma(n, g));
        }
        ks.into_iter().collect()
    }

    pub fn alpha_values(&self) -> Vec<f64> {
        self.alpha.clone().unwrap_or_else(|| DEFAULT_ALPHA.to_vec())
    }

    pub fn eps_values(&self) -> Vec<f64> {
        self.eps.clone().unwrap_or_else(|| DEFAULT_EPS.to_vec())
    }

    pub fn r_values(&self) -> Vec<f64> {
        let mut r = self.r.clone().unwrap_or_else(|| DEFAULT_R.to_vec());
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }

    pub fn h_values(&self) -> Vec<f64> {
        let mut h = self.h.clone().unwrap_or_else(|| DEFAULT_H.to_vec());
        h.sort_by(f64::total_cmp);
        h.dedup();
        h
    }
}

pub fn k_of_gamma(n: usize, gamma: f64) -> usize {
    // Guard against n^gamma landing a hair above an integer.
    let x = (n as f64).powf(gamma);
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

fn default_spec() -> DistributionSpec {
    DistributionSpec::TwoPoint { a: 1.0, b: 2.0, p: 0.5 }
}

fn default_reps() -> usize {
    1000
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("fpplab-out")
}

fn default_calibration_reps() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_spec")]
    pub spec: DistributionSpec,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_calibration_reps")]
    pub calibration_reps: usize,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            spec: default_spec(),
            grid: Grid::default(),
            reps: default_reps(),
            master_seed: 0,
            threads: 0,
            out_dir: default_out_dir(),
            calibration_reps: default_calibration_reps(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::config(format!("config is not valid JSON: {e}")))?;
        let object = value.as_object().ok_or_else(|| Error::config("config must be a JSON object"))?;
        match object.get("kind") {
            None => return Err(Error::config(format!("missing field `kind`; valid kinds: {}", valid_kinds()))),
            Some(serde_json::Value::String(name)) => {
                ExperimentKind::parse(name)?;
            }
            Some(other) => return Err(Error::config(format!("field `kind` must be a string, got {other}"))),
        }
        let config: Self = serde_json::from_value(value).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        self.spec.validate().map_err(|e| Error::config(format!("field `spec`: {e}")))?;
        for key in self.grid.present_keys() {
            if !kind.grid_keys().contains(&key) {
                return Err(Error::config(format!(
                    "field `grid.{key}` is not used by {kind} (accepted: {})",
                    kind.grid_keys().join(", ")
                )));
            }
        }
        if self.reps < 2 {
            return Err(Error::config(format!("field `reps`: need at least 2, got {}", self.reps)));
        }
        let ns = self.grid.n_values();
        if ns.is_empty() {
            return Err(Error::config("field `grid.n`: empty list"));
        }
        if let Some(&n) = ns.iter().find(|&&n| n == 0) {
            return Err(Error::config(format!("field `grid.n`: n={n} must be at least 1")));
        }
        for list in [&self.grid.k] {
            if matches!(list, Some(v) if v.is_empty()) {
                return Err(Error::config("field `grid.k`: empty list"));
            }
        }
        check_floats("grid.gamma", &self.grid.gamma, |g| (0.0..=1.0).contains(&g), "in [0, 1]")?;
        check_floats("grid.alpha", &self.grid.alpha, |a| a > 0.0 && a < 1.0, "in (0, 1)")?;
        check_floats("grid.eps", &self.grid.eps, |e| (0.0..=1.0).contains(&e), "in [0, 1]")?;
        check_floats("grid.r", &self.grid.r, |r| r.abs() <= 2.0, "in [-2, 2]")?;
        check_floats("grid.h", &self.grid.h, |h| (0.0..=1.0).contains(&h), "in [0, 1]")?;
        if matches!(kind, ExperimentKind::NoiseSweep | ExperimentKind::InfluenceProfile | ExperimentKind::SmallballTail)
            && self.calibration_reps < 1
        {
            return Err(Error::config("field `calibration_reps`: need at least 1"));
        }
        if kind == ExperimentKind::InfluenceProfile && !self.spec.is_two_point() {
            return Err(Error::config("field `spec`: influence-profile needs a two-point law (edge flips)"));
        }
        if kind != ExperimentKind::Shape {
            for &n in &ns {
                for k in self.grid.k_values(n) {
                    if k > n {
                        return Err(Error::config(format!("field `grid.k`: k={k} exceeds n={n}")));
                    }
                    if kind == ExperimentKind::SmallballTail && (k == 0 || 2 * k > n) {
                        return Err(Error::config(format!(
                            "field `grid.k`: smallball-tail needs 1 <= k <= n/2 (k={k}, n={n})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_floats(field: &str, values: &Option<Vec<f64>>, ok: impl Fn(f64) -> bool, what: &str) -> Result<()> {
    let Some(values) = values else {
        return Ok(());
    };
    if values.is_empty() {
        return Err(Error::config(format!("field `{field}`: empty list")));
    }
    for &v in values {
        if !v.is_finite() || !ok(v) {
            return Err(Error::config(format!("field `{field}`: value {v} must be {what}")));
        }
    }
    Ok(())
}
