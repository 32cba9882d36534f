use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qmllab::data::DEFAULT_TRAIN_RATIO;
use qmllab::models::{ModelKind, ModelSpec};
use qmllab::search::{GeneratorChoice, SearchConfig};
use qmllab::training::{OptimizerKind, TrainConfig};
use toml::Value;

use crate::error::CliError;

/// Evaluation epochs per search candidate when `search.profile = "ci"`.
pub const CI_EVAL_EPOCHS: usize = 1;

/// Everything a command needs, after merging file values and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub train_ratio: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub model: ModelSpec,
    pub train: TrainConfig,
    pub search: SearchConfig,
}

/// Values that can come from a flag; `None` leaves the file or default value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub data: Option<PathBuf>,
    pub seed: Option<u64>,
    pub epochs: Option<usize>,
    pub batch: Option<usize>,
    pub lr: Option<f64>,
    pub qubits: Option<usize>,
    pub depth: Option<usize>,
    pub generator: Option<String>,
    pub endpoint: Option<String>,
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub profile: Option<String>,
    pub out: Option<PathBuf>,
}

/// Flattens nested tables into dotted keys: `[train] epochs = 3` and
/// `train.epochs = 3` both become `train.epochs`.
pub fn flatten(table: &toml::Table) -> BTreeMap<String, Value> {
    fn walk(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) {
        for (key, value) in table {
            let full = if prefix.is_empty() {
                key.clone()
            } else {
                format!("{prefix}.{key}")
            };
            match value {
                Value::Table(inner) => walk(&full, inner, out),
                other => {
                    out.insert(full, other.clone());
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    walk("", table, &mut out);
    out
}

pub fn load_file(path: &Path) -> Result<BTreeMap<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(flatten(&table))
}

fn bad(key: &str, expected: &str) -> CliError {
    CliError::Config(format!("{key}: expected {expected}"))
}

fn as_usize(key: &str, v: &Value) -> Result<usize, CliError> {
    v.as_integer()
        .and_then(|i| usize::try_from(i).ok())
        .ok_or_else(|| bad(key, "a non-negative integer"))
}

fn as_u64(key: &str, v: &Value) -> Result<u64, CliError> {
    v.as_integer()
        .and_then(|i| u64::try_from(i).ok())
        .ok_or_else(|| bad(key, "a non-negative integer"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(key, "a number")),
    }
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| bad(key, "a string"))
}

fn as_bool(key: &str, v: &Value) -> Result<bool, CliError> {
    v.as_bool().ok_or_else(|| bad(key, "a boolean"))
}

fn parse_kind(key: &str, s: &str) -> Result<ModelKind, CliError> {
    s.parse().map_err(|_| {
        CliError::Config(format!(
            "{key}: unknown model `{s}` (expected qmlp, qff, qbp, baseline, mlp or ff)"
        ))
    })
}

fn parse_optimizer(key: &str, s: &str) -> Result<OptimizerKind, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "adam" => Ok(OptimizerKind::Adam),
        "sgd" => Ok(OptimizerKind::Sgd),
        _ => Err(CliError::Config(format!("{key}: unknown optimizer `{s}` (expected adam or sgd)"))),
    }
}

impl RunConfig {
    /// Merges `file` values, then `flags`, over the defaults and validates the result.
    /// `env_data` is the data path from the environment, used when neither sets one.
    pub fn resolve(
        file: &BTreeMap<String, Value>,
        flags: &Overrides,
        env_data: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let get = |k: &str| file.get(k);

        let seed = match flags.seed {
            Some(s) => s,
            None => get("seed").map(|v| as_u64("seed", v)).transpose()?.unwrap_or(1),
        };

        let kind = match (&flags.model, get("model.kind")) {
            (Some(m), _) => parse_kind("--model", m)?,
            (None, Some(v)) => parse_kind("model.kind", as_str("model.kind", v)?)?,
            (None, None) => ModelKind::Qbp,
        };
        let mut model = ModelSpec::default_for(kind).with_seed(seed);

        let mut train = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        let mut search = SearchConfig {
            seed,
            ..SearchConfig::default()
        };
        let mut endpoint: Option<String> = None;
        let mut generator = "scripted".to_string();
        let mut profile = "default".to_string();
        let mut train_epochs_set = false;
        let mut data = None;
        let mut train_ratio = DEFAULT_TRAIN_RATIO;
        let mut out = PathBuf::from("out");

        for (key, v) in file {
            let k = key.as_str();
            match k {
                "seed" | "model.kind" => {}
                "data.path" => data = Some(PathBuf::from(as_str(k, v)?)),
                "data.train_ratio" => train_ratio = as_f64(k, v)?,
                "output.dir" => out = PathBuf::from(as_str(k, v)?),
                "model.num_qubits" => model.num_qubits = as_usize(k, v)?,
                "model.ansatz_depth" => model.ansatz_depth = as_usize(k, v)?,
                "model.ff_threshold" => model.ff_threshold = as_f64(k, v)?,
                "model.seed" => model.seed = as_u64(k, v)?,
                "model.classical_widths" => {
                    let items = v.as_array().ok_or_else(|| bad(k, "an array of integers"))?;
                    model.classical_widths =
                        items.iter().map(|i| as_usize(k, i)).collect::<Result<_, _>>()?;
                }
                "train.epochs" => {
                    train.epochs = as_usize(k, v)?;
                    train_epochs_set = true;
                }
                "train.batch_size" => train.batch_size = as_usize(k, v)?,
                "train.learning_rate" => train.learning_rate = as_f64(k, v)?,
                "train.optimizer" => train.optimizer = parse_optimizer(k, as_str(k, v)?)?,
                "train.seed" => train.seed = as_u64(k, v)?,
                "train.shuffle" => train.shuffle = as_bool(k, v)?,
                "search.population" => search.population = as_usize(k, v)?,
                "search.generations" => search.generations = as_usize(k, v)?,
                "search.elite_count" => search.elite_count = as_usize(k, v)?,
                "search.seed" => search.seed = as_u64(k, v)?,
                "search.top_k" => search.top_k = as_usize(k, v)?,
                "search.generator" => generator = as_str(k, v)?.to_string(),
                "search.endpoint" => endpoint = Some(as_str(k, v)?.to_string()),
                "search.profile" => profile = as_str(k, v)?.to_string(),
                _ => return Err(CliError::Config(format!("unknown config key `{k}`"))),
            }
        }

        if let Some(d) = &flags.data {
            data = Some(d.clone());
        }
        if data.is_none() {
            data = env_data;
        }
        if let Some(o) = &flags.out {
            out = o.clone();
        }
        if let Some(s) = flags.seed {
            model.seed = s;
            train.seed = s;
            search.seed = s;
        }
        if let Some(q) = flags.qubits {
            model.num_qubits = q;
        }
        if let Some(d) = flags.depth {
            model.ansatz_depth = d;
        }
        if let Some(e) = flags.epochs {
            train.epochs = e;
            train_epochs_set = true;
        }
        if let Some(b) = flags.batch {
            train.batch_size = b;
        }
        if let Some(lr) = flags.lr {
            train.learning_rate = lr;
        }
        if let Some(p) = flags.population {
            search.population = p;
        }
        if let Some(g) = flags.generations {
            search.generations = g;
        }
        if let Some(g) = &flags.generator {
            generator = g.clone();
        }
        if let Some(e) = &flags.endpoint {
            endpoint = Some(e.clone());
        }
        if let Some(p) = &flags.profile {
            profile = p.clone();
        }

        search.eval_budget = TrainConfig {
            seed: train.seed,
            ..train.clone()
        };
        if !train_epochs_set {
            search.eval_budget.epochs = SearchConfig::default().eval_budget.epochs;
        }
        match profile.as_str() {
            "default" => {}
            "ci" => search.eval_budget.epochs = CI_EVAL_EPOCHS,
            other => {
                return Err(CliError::Config(format!(
                    "search.profile: unknown profile `{other}` (expected default or ci)"
                )))
            }
        }
        search.generator = match generator.as_str() {
            "scripted" => GeneratorChoice::Scripted,
            "remote" => GeneratorChoice::Remote {
                endpoint: endpoint.ok_or_else(|| {
                    CliError::Config("search.endpoint: required with the remote generator".into())
                })?,
            },
            other => {
                return Err(CliError::Config(format!(
                    "search.generator: unknown generator `{other}` (expected scripted or remote)"
                )))
            }
        };

        if !(train_ratio > 0.0 && train_ratio < 1.0) {
            return Err(CliError::Config(format!(
                "data.train_ratio: {train_ratio} must lie strictly between 0 and 1"
            )));
        }
        model.validate()?;
        train.validate()?;
        search.validate()?;

        Ok(RunConfig {
            data,
            train_ratio,
            out,
            seed,
            model,
            train,
            search,
        })
    }

    pub fn data_path(&self) -> Result<&Path, CliError> {
        self.data.as_deref().ok_or_else(|| {
            CliError::Config("data: no dataset given (use --data, data.path or QMLLAB_DATA)".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> BTreeMap<String, Value> {
        flatten(&toml::from_str(text).unwrap())
    }

    #[test]
    fn dotted_and_sectioned_keys_agree() {
        let a = file("train.epochs = 4\nmodel.kind = \"qff\"\n");
        let b = file("[train]\nepochs = 4\n[model]\nkind = \"qff\"\n");
        assert_eq!(a, b);
    }

    #[test]
    fn flags_win_over_file() {
        let f = file("train.epochs = 4\nseed = 3\nmodel.num_qubits = 6\n");
        let flags = Overrides {
            epochs: Some(2),
            qubits: Some(5),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(&f, &flags, None).unwrap();
        assert_eq!(c.train.epochs, 2);
        assert_eq!(c.model.num_qubits, 5);
        assert_eq!((c.seed, c.model.seed, c.train.seed), (3, 3, 3));
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::resolve(&file("train.epochs = 0\n"), &Overrides::default(), None)
            .unwrap_err();
        assert!(err.to_string().contains("train.epochs"), "{err}");
        let err = RunConfig::resolve(&file("train.epoch = 3\n"), &Overrides::default(), None)
            .unwrap_err();
        assert!(err.to_string().contains("train.epoch"), "{err}");
        let flags = Overrides {
            generator: Some("remote".into()),
            ..Overrides::default()
        };
        let err = RunConfig::resolve(&BTreeMap::new(), &flags, None).unwrap_err();
        assert!(err.to_string().contains("search.endpoint"), "{err}");
    }

    #[test]
    fn search_budget_defaults() {
        let c = RunConfig::resolve(&BTreeMap::new(), &Overrides::default(), None).unwrap();
        assert_eq!(c.search.eval_budget.epochs, 3);
        assert_eq!(c.train.epochs, 15);
        let flags = Overrides {
            profile: Some("ci".into()),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(&BTreeMap::new(), &flags, None).unwrap();
        assert_eq!(c.search.eval_budget.epochs, CI_EVAL_EPOCHS);
    }

    #[test]
    fn env_data_is_fallback() {
        let c = RunConfig::resolve(&BTreeMap::new(), &Overrides::default(), Some("env.csv".into()))
            .unwrap();
        assert_eq!(c.data, Some(PathBuf::from("env.csv")));
        let flags = Overrides {
            data: Some("flag.csv".into()),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(&BTreeMap::new(), &flags, Some("env.csv".into())).unwrap();
        assert_eq!(c.data, Some(PathBuf::from("flag.csv")));
    }
}
