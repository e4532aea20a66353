use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::measures::MeasureId;

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// `dataset` is a directory holding `<dataset_name>_A.txt` and siblings.
    Tudataset,
    /// `dataset` is an SPMF graph file; `labels` optionally names a class file.
    Spmf,
    /// Seeded graphs with one planted discriminative motif.
    PlantedGraphs,
    /// Seeded footprint matrix with planted discriminative columns; mining is skipped.
    PlantedFootprints,
    /// Seeded footprint matrix of class-independent columns; mining is skipped.
    RandomFootprints,
}

impl DatasetFormat {
    pub fn is_synthetic(self) -> bool {
        !matches!(self, Self::Tudataset | Self::Spmf)
    }

    pub fn is_footprint_only(self) -> bool {
        matches!(self, Self::PlantedFootprints | Self::RandomFootprints)
    }
}

/// An absolute count, or a percentage written with a trailing `%`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAmount", into = "RawAmount")]
pub enum Amount {
    Count(usize),
    Percent(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawAmount {
    Count(u64),
    Text(String),
}

impl TryFrom<RawAmount> for Amount {
    type Error = String;

    fn try_from(raw: RawAmount) -> Result<Self, String> {
        match raw {
            RawAmount::Count(c) => Ok(Amount::Count(c as usize)),
            RawAmount::Text(s) => s.parse(),
        }
    }
}

impl From<Amount> for RawAmount {
    fn from(a: Amount) -> Self {
        match a {
            Amount::Count(c) => RawAmount::Count(c as u64),
            Amount::Percent(_) => RawAmount::Text(a.to_string()),
        }
    }
}

impl FromStr for Amount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(p) = s.strip_suffix('%') {
            let pct: f64 = p
                .trim()
                .parse()
                .map_err(|_| format!("bad percentage {s:?}"))?;
            if !(0.0..=100.0).contains(&pct) {
                return Err(format!("percentage {s:?} outside [0, 100]"));
            }
            Ok(Amount::Percent(pct))
        } else {
            s.parse()
                .map(Amount::Count)
                .map_err(|_| format!("bad count {s:?}"))
        }
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amount::Count(c) => write!(f, "{c}"),
            Amount::Percent(p) => write!(f, "{p}%"),
        }
    }
}

impl Amount {
    /// A count as is; a percentage as `ceil(pct · total / 100)`.
    pub fn resolve(self, total: usize) -> usize {
        match self {
            Amount::Count(c) => c,
            Amount::Percent(p) => percent_count(p, total),
        }
    }
}

/// `ceil(pct · total / 100)`, with the product rounded to 9 decimals first so
/// that exact percentages are not pushed up by float noise.
pub fn percent_count(pct: f64, total: usize) -> usize {
    let x = pct * total as f64 / 100.0;
    ((x * 1e9).round() / 1e9).ceil() as usize
}

/// One flat set of parameters shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: String,
    pub format: DatasetFormat,
    /// File prefix of a TUDataset; defaults to the last path component.
    pub dataset_name: Option<String>,
    /// Class label file for SPMF input.
    pub labels: Option<String>,
    /// Further datasets of the same format, used by `pairwise-tau`.
    pub extra_datasets: Vec<String>,
    /// Number of synthetic datasets, seeded `synthetic_seed + i`.
    pub replicates: usize,
    /// Under-sample the majority class.
    pub balance: bool,
    pub min_support: Amount,
    pub max_patterns: usize,
    /// Unbounded when absent.
    pub max_edges: Option<usize>,
    /// Clustering threshold in percent of the graph count.
    pub threshold_pct: f64,
    /// Thresholds in percent for `cluster-sweep`.
    pub thresholds: Vec<f64>,
    /// Measure names; empty selects all.
    pub measures: Vec<String>,
    /// Number of top-ranked representatives fed to the classifier.
    pub s: Amount,
    /// Percentages of representatives for `gold`.
    pub s_grid: Vec<f64>,
    pub c: f64,
    pub epochs: usize,
    pub k_folds: usize,
    pub rbo_p: f64,
    pub exact_limit: usize,
    pub n_permutations: usize,
    /// Class size of the exhaustive property domain.
    pub property_n: u64,
    pub n_half: usize,
    pub n_planted: usize,
    pub n_noise: usize,
    pub balance_seed: u64,
    pub fold_seed: u64,
    pub train_seed: u64,
    pub permutation_seed: u64,
    pub synthetic_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: String::new(),
            format: DatasetFormat::Tudataset,
            dataset_name: None,
            labels: None,
            extra_datasets: Vec::new(),
            replicates: 1,
            balance: true,
            min_support: Amount::Count(1),
            max_patterns: 100_000,
            max_edges: None,
            threshold_pct: 20.0,
            thresholds: vec![
                0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0,
                90.0, 100.0,
            ],
            measures: Vec::new(),
            s: Amount::Percent(100.0),
            s_grid: vec![1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0],
            c: 1.0,
            epochs: 200,
            k_folds: 5,
            rbo_p: 0.9,
            exact_limit: 15,
            n_permutations: 200,
            property_n: 10,
            n_half: 50,
            n_planted: 5,
            n_noise: 200,
            balance_seed: 0,
            fold_seed: 0,
            train_seed: 0,
            permutation_seed: 0,
            synthetic_seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

fn check_pct(name: &str, x: f64) -> Result<(), ExperimentError> {
    if (0.0..=100.0).contains(&x) {
        Ok(())
    } else {
        Err(config_err(format!("{name} = {x} outside [0, 100]")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        check_pct("threshold_pct", self.threshold_pct)?;
        for &t in &self.thresholds {
            check_pct("thresholds", t)?;
        }
        for &s in &self.s_grid {
            check_pct("s_grid", s)?;
            if s == 0.0 {
                return Err(config_err("s_grid entries must be positive"));
            }
        }
        if let Amount::Percent(p) = self.min_support {
            check_pct("min_support", p)?;
        }
        match self.s {
            Amount::Count(0) => return Err(config_err("s must be positive")),
            Amount::Percent(p) if p <= 0.0 || p > 100.0 => {
                return Err(config_err("s must be in (0%, 100%]"))
            }
            _ => {}
        }
        if self.dataset.is_empty() && !self.format.is_synthetic() {
            return Err(config_err("dataset is required"));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(config_err("c must be positive"));
        }
        if self.k_folds < 2 {
            return Err(config_err("k_folds must be at least 2"));
        }
        if !(self.rbo_p > 0.0 && self.rbo_p < 1.0) {
            return Err(config_err("rbo_p must be in (0, 1)"));
        }
        if self.replicates == 0 {
            return Err(config_err("replicates must be positive"));
        }
        if self.epochs == 0 || self.n_permutations == 0 {
            return Err(config_err("epochs and n_permutations must be positive"));
        }
        self.measure_ids().map(|_| ())
    }

    /// Selected measures in canonical order.
    pub fn measure_ids(&self) -> Result<Vec<MeasureId>, ExperimentError> {
        if self.measures.is_empty() {
            return Ok(MeasureId::ALL.to_vec());
        }
        let mut ids = self
            .measures
            .iter()
            .map(|m| {
                m.parse::<MeasureId>()
                    .map_err(|e| config_err(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ids.sort();
        ids.dedup();
        Ok(ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amounts_parse_and_resolve() {
        assert_eq!("12".parse::<Amount>(), Ok(Amount::Count(12)));
        assert_eq!("12.5%".parse::<Amount>(), Ok(Amount::Percent(12.5)));
        assert!("120%".parse::<Amount>().is_err());
        assert_eq!(Amount::Percent(20.0).resolve(205), 41);
        assert_eq!(Amount::Percent(1.0).resolve(205), 3);
        assert_eq!(Amount::Percent(10.0).resolve(30), 3);
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig {
            format: DatasetFormat::PlantedFootprints,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_ok());
        cfg.measures = vec!["Sup".into(), "GR".into(), "Sup".into()];
        assert_eq!(
            cfg.measure_ids().unwrap(),
            vec![MeasureId::GR, MeasureId::Sup]
        );
        cfg.s = Amount::Count(0);
        assert!(cfg.validate().is_err());
        cfg.s = Amount::Count(3);
        cfg.threshold_pct = 101.0;
        assert!(cfg.validate().is_err());
        let tu = RunConfig::default();
        assert!(tu.validate().is_err());
    }

    #[test]
    fn amounts_round_trip_through_serde() {
        let v = serde_json::to_value(Amount::Percent(5.0)).unwrap();
        assert_eq!(v, serde_json::json!("5%"));
        assert_eq!(
            serde_json::from_value::<Amount>(v).unwrap(),
            Amount::Percent(5.0)
        );
        assert_eq!(
            serde_json::from_value::<Amount>(serde_json::json!(7)).unwrap(),
            Amount::Count(7)
        );
    }
}
