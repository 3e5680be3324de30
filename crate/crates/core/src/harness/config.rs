use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::reductions::Algorithm;

/// How an algorithm enters an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Cost-sensitive algorithm on the task's costs.
    Hard,
    /// Cost-sensitive algorithm on blended costs, alpha chosen by CV.
    Soft,
    /// Regular algorithm, ignores costs.
    Regular,
}

/// An algorithm and the variant it runs in, written `osr`, `soft-osr`,
/// `ova` or `regular-osr` (the regular sibling, here `ova`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    pub variant: Variant,
}

impl AlgorithmSpec {
    pub fn hard(algorithm: Algorithm) -> Self {
        Self::new(algorithm, false)
    }

    pub fn soft(algorithm: Algorithm) -> Self {
        Self::new(algorithm, true)
    }

    fn new(algorithm: Algorithm, soft: bool) -> Self {
        let variant = match (algorithm.is_cost_sensitive(), soft) {
            (false, _) => Variant::Regular,
            (true, false) => Variant::Hard,
            (true, true) => Variant::Soft,
        };
        AlgorithmSpec { algorithm, variant }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim().to_ascii_lowercase();
        if let Some(rest) = text.strip_prefix("soft-") {
            let a = Algorithm::parse(rest)?;
            if !a.is_cost_sensitive() {
                return Err(Error::Config(format!("{a} is regular and has no soft variant")));
            }
            return Ok(Self::soft(a));
        }
        if let Some(rest) = text.strip_prefix("regular-") {
            return Ok(Self::hard(Algorithm::parse(rest)?.regular_sibling()));
        }
        Ok(Self::hard(Algorithm::parse(&text)?))
    }

    pub fn name(&self) -> String {
        match self.variant {
            Variant::Soft => format!("soft-{}", self.algorithm),
            _ => self.algorithm.to_string(),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for AlgorithmSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for AlgorithmSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        AlgorithmSpec::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    #[default]
    Cost,
    Error,
    MaxErrorNormcost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    /// Read from `matrix`.
    Matrix,
    Inconsistent,
    Consistent,
    /// All off-diagonal entries 1.
    Naive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub source: CostKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    /// Draw a new matrix every run rather than once.
    #[serde(default = "yes")]
    pub redraw: bool,
    #[serde(default)]
    pub balance_rows: bool,
    /// Emphasis factors; each one is a separate sweep point.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub emphasize: Vec<f64>,
    /// 1-based class whose column is emphasized; defaults to the least
    /// frequent class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emphasize_class: Option<usize>,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            source: CostKind::Inconsistent,
            matrix: None,
            redraw: true,
            balance_rows: false,
            emphasize: Vec::new(),
            emphasize_class: None,
        }
    }
}

fn yes() -> bool {
    true
}

pub fn default_lambda_grid() -> Vec<f64> {
    [10, 7, 4, 1, -2].iter().map(|&e| 2f64.powi(e)).collect()
}

pub fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

fn default_runs() -> usize {
    20
}

fn default_split() -> f64 {
    0.75
}

fn default_folds() -> usize {
    5
}

fn default_level() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub cost: CostConfig,
    /// Balanced class weights for the blend, the regular algorithms and the
    /// weighted-error and G-mean metrics.
    #[serde(default)]
    pub weighted_error: bool,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_split")]
    pub split: f64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    /// Selection criterion for soft algorithms. Hard ones always select by
    /// cost, regular ones by (weighted) error.
    #[serde(default)]
    pub criterion: Criterion,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_level")]
    pub t_test_level: f64,
    #[serde(default)]
    pub kernel: Kernel,
}

impl ExperimentConfig {
    /// Defaults for everything but the dataset and the algorithms.
    pub fn new(dataset: impl Into<PathBuf>, algorithms: Vec<AlgorithmSpec>) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            algorithms,
            cost: CostConfig::default(),
            weighted_error: false,
            runs: default_runs(),
            split: default_split(),
            folds: default_folds(),
            lambda_grid: default_lambda_grid(),
            alpha_grid: default_alpha_grid(),
            criterion: Criterion::default(),
            seed: 0,
            t_test_level: default_level(),
            kernel: Kernel::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.algorithms.is_empty() {
            return fail("no algorithms configured".into());
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return fail(format!("algorithm {a} is listed twice"));
            }
        }
        if self.runs < 2 {
            return fail(format!("runs must be at least 2, got {}", self.runs));
        }
        if self.folds < 2 {
            return fail(format!("folds must be at least 2, got {}", self.folds));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return fail(format!("split {} must lie strictly between 0 and 1", self.split));
        }
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return fail("lambda_grid must be a nonempty list of positive numbers".into());
        }
        let soft = self.algorithms.iter().any(|a| a.variant == Variant::Soft);
        if soft && self.alpha_grid.is_empty() {
            return fail("alpha_grid must be nonempty".into());
        }
        if self.alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return fail("alpha_grid entries must lie in [0, 1]".into());
        }
        if !(self.t_test_level > 0.0 && self.t_test_level < 0.5) {
            return fail(format!("t_test_level {} must lie in (0, 0.5)", self.t_test_level));
        }
        match (self.cost.source, &self.cost.matrix) {
            (CostKind::Matrix, None) => return fail("cost source \"matrix\" needs a matrix path".into()),
            (CostKind::Matrix, Some(_)) | (_, None) => {}
            (_, Some(_)) => return fail("a matrix path is only allowed with source \"matrix\"".into()),
        }
        if self.cost.emphasize.iter().any(|u| !(u.is_finite() && *u > 0.0)) {
            return fail("emphasis factors must be positive".into());
        }
        if self.cost.emphasize_class == Some(0) {
            return fail("emphasize_class is 1-based".into());
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config; relative paths inside resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.dataset = base.join(&config.dataset);
        if let Some(m) = &mut config.cost.matrix {
            *m = base.join(&*m);
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names() {
        let p = |s: &str| AlgorithmSpec::parse(s).unwrap();
        assert_eq!(p("osr"), AlgorithmSpec { algorithm: Algorithm::Osr, variant: Variant::Hard });
        assert_eq!(p("soft-cszl").variant, Variant::Soft);
        assert_eq!(p("regular-csft"), AlgorithmSpec::hard(Algorithm::Ft));
        assert_eq!(p("ova").variant, Variant::Regular);
        assert!(AlgorithmSpec::parse("soft-ova").is_err());
        assert!(AlgorithmSpec::parse("svm").is_err());
        for a in Algorithm::ALL {
            let s = AlgorithmSpec::hard(a);
            assert_eq!(p(&s.name()), s);
        }
    }

    #[test]
    fn defaults_and_round_trip() {
        let c = ExperimentConfig::from_toml("dataset = \"d.txt\"\nalgorithms = [\"osr\", \"soft-osr\"]\n").unwrap();
        assert_eq!(c.runs, 20);
        assert_eq!(c.folds, 5);
        assert_eq!(c.lambda_grid, vec![1024.0, 128.0, 16.0, 2.0, 0.25]);
        assert_eq!(c.alpha_grid.len(), 11);
        assert_eq!(c.alpha_grid[3], 0.3);
        assert_eq!(c.criterion, Criterion::Cost);
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = "dataset = \"d\"\nalgorithms = [\"ova\"]\nrunz = 3\n";
        assert!(matches!(ExperimentConfig::from_toml(bad), Err(Error::Config(_))));
        let nested = "dataset = \"d\"\nalgorithms = [\"ova\"]\n[cost]\nsource = \"naive\"\ncolour = 1\n";
        assert!(ExperimentConfig::from_toml(nested).is_err());
    }

    #[test]
    fn invariants() {
        let base = "dataset = \"d\"\nalgorithms = [\"ova\"]\n";
        for extra in ["runs = 1", "folds = 1", "lambda_grid = []", "split = 1.0", "alpha_grid = [1.5]"] {
            assert!(ExperimentConfig::from_toml(&format!("{base}{extra}\n")).is_err(), "{extra}");
        }
        assert!(ExperimentConfig::from_toml(&format!("{base}[cost]\nsource = \"matrix\"\n")).is_err());
        assert!(ExperimentConfig::from_toml("dataset = \"d\"\nalgorithms = []\n").is_err());
    }
}
