//! Run configuration: per-command defaults, overlaid by a TOML file and then
//! by `--set key=value` pairs. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;

use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(v) => write!(f, "{v:?}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(v) => write!(f, "{v}"),
            Value::Flag(v) => write!(f, "{v}"),
        }
    }
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Real(_) => "real",
            Value::Int(_) => "integer",
            Value::Text(_) => "string",
            Value::Flag(_) => "boolean",
        }
    }

    /// Parses `raw` as the same kind as `self`.
    fn parse_like(&self, key: &str, raw: &str) -> Result<Value, CliError> {
        let bad = || CliError::Config(format!("{key}: cannot parse {raw:?} as {}", self.kind()));
        Ok(match self {
            Value::Real(_) => Value::Real(raw.trim().parse().map_err(|_| bad())?),
            Value::Int(_) => Value::Int(raw.trim().parse().map_err(|_| bad())?),
            Value::Text(_) => Value::Text(raw.to_string()),
            Value::Flag(_) => Value::Flag(raw.trim().parse().map_err(|_| bad())?),
        })
    }

    /// Converts a TOML value to the kind of `self`; integers widen to reals.
    fn convert_toml(&self, key: &str, raw: &toml::Value) -> Result<Value, CliError> {
        let converted = match (self, raw) {
            (Value::Real(_), toml::Value::Float(v)) => Some(Value::Real(*v)),
            (Value::Real(_), toml::Value::Integer(v)) => Some(Value::Real(*v as f64)),
            (Value::Int(_), toml::Value::Integer(v)) => Some(Value::Int(*v)),
            (Value::Text(_), toml::Value::String(v)) => Some(Value::Text(v.clone())),
            (Value::Flag(_), toml::Value::Boolean(v)) => Some(Value::Flag(*v)),
            _ => None,
        };
        converted
            .ok_or_else(|| CliError::Config(format!("{key}: expected {}, got {raw}", self.kind())))
    }
}

/// Fully resolved parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub command: String,
    pub values: BTreeMap<String, Value>,
}

fn real(k: &str, v: f64) -> (String, Value) {
    (k.to_string(), Value::Real(v))
}

fn int(k: &str, v: i64) -> (String, Value) {
    (k.to_string(), Value::Int(v))
}

fn text(k: &str, v: &str) -> (String, Value) {
    (k.to_string(), Value::Text(v.to_string()))
}

fn flag(k: &str, v: bool) -> (String, Value) {
    (k.to_string(), Value::Flag(v))
}

/// Default parameters for a command key such as `bounds` or `verify.rank`.
pub fn defaults(command: &str) -> Option<BTreeMap<String, Value>> {
    let mut map: BTreeMap<String, Value> = match command {
        "bounds" => [
            text("channel", "thermal"),
            real("eta", 0.5),
            real("n_s", 1.0),
            real("n_b", 1.0),
            real("n_bar", 1.0),
            int("grid", 1),
            real("eta_min", 1e-3),
            real("eta_max", 0.999),
            real("n_s_min", 1e-3),
            real("n_s_max", 50.0),
            real("n_b_min", 1e-3),
            real("n_b_max", 50.0),
        ]
        .into(),
        "envelope" => [
            int("theorem", 1),
            text("channel", "thermal"),
            real("eta", 0.5),
            real("n_s", 1.0),
            real("n_b", 1.0),
            real("n_bar", 1.0),
            real("rate", 0.2),
            flag("relative", true),
            int("n_min", 100),
            int("n_max", 10_000),
            int("step", 100),
            real("d1_coeff", 1.0),
            real("d1_exponent", 1.0),
            text("d1_table", ""),
            real("d4_coeff", 1.0),
            real("d4_exponent", 1.0),
            text("d4_table", ""),
            real("d6_coeff", 1.0),
            real("d6_exponent", 1.0),
            text("d6_table", ""),
            real("d2", 1e-3),
            real("d3", 1e-3),
            real("d5", 1e-3),
            real("delta", 1e-3),
        ]
        .into(),
        "dist" => [
            text("channel", "thermal"),
            int("k", 0),
            real("eta", 0.5),
            real("n_b", 1.0),
            real("n_bar", 1.0),
            int("dim", 64),
        ]
        .into(),
        "verify.decompositions" => BTreeMap::new(),
        "verify.smoothing" => [int("trials", 10_000), int("max_len", 32)].into(),
        "verify.gentle" => [int("trials", 200), int("dim", 6)].into(),
        "verify.rank" => [int("n_max", 200), text("n_s_list", "0.5,1,5")].into(),
        "verify.qubit" => [int("n_max", 8), text("rates", "1.5,2"), int("trials", 1000)].into(),
        "demo.mean-constraint" => [
            int("n_modes", 1),
            real("power", 2.0),
            real("mix_p", 0.5),
            real("eta", 0.8),
            real("n_b", 0.5),
            int("dim", 40),
        ]
        .into(),
        "demo.concentration" => [
            text("n_list", "50,100,200,400"),
            int("photons", 0),
            real("eta", 0.5),
            real("n_b", 1.0),
            real("delta5", 0.1),
            int("trials", 10_000),
        ]
        .into(),
        _ => return None,
    };
    map.insert("seed".into(), Value::Int(0));
    Some(map)
}

impl Params {
    /// Defaults, then the TOML table, then `key=value` overrides, then the seed.
    pub fn resolve(
        command: &str,
        file: Option<&toml::Table>,
        sets: &[String],
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let mut values = defaults(command)
            .ok_or_else(|| CliError::Config(format!("unknown command {command:?}")))?;
        if let Some(table) = file {
            for (key, raw) in table {
                let slot = values.get(key).ok_or_else(|| {
                    CliError::Config(format!("unknown key {key:?} for {command}"))
                })?;
                let parsed = slot.convert_toml(key, raw)?;
                values.insert(key.clone(), parsed);
            }
        }
        for pair in sets {
            let (key, raw) = pair.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--set expects key=value, got {pair:?}"))
            })?;
            let key = key.trim();
            let slot = values
                .get(key)
                .ok_or_else(|| CliError::Config(format!("unknown key {key:?} for {command}")))?;
            let parsed = slot.parse_like(key, raw)?;
            values.insert(key.to_string(), parsed);
        }
        if let Some(seed) = seed {
            let seed = i64::try_from(seed)
                .map_err(|_| CliError::Config(format!("seed {seed} too large")))?;
            values.insert("seed".into(), Value::Int(seed));
        }
        Ok(Self {
            command: command.to_string(),
            values,
        })
    }

    fn get(&self, key: &str) -> &Value {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("parameter {key} missing from defaults of {}", self.command))
    }

    pub fn real(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Real(v) => *v,
            other => panic!("{key} is {other:?}, not a real"),
        }
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.get(key) {
            Value::Int(v) => *v,
            other => panic!("{key} is {other:?}, not an integer"),
        }
    }

    /// Integer parameter that must be nonnegative.
    pub fn count(&self, key: &str) -> Result<u64, CliError> {
        let v = self.int(key);
        u64::try_from(v).map_err(|_| CliError::Config(format!("{key} = {v} must be >= 0")))
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Text(v) => v,
            other => panic!("{key} is {other:?}, not a string"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.get(key) {
            Value::Flag(v) => *v,
            other => panic!("{key} is {other:?}, not a boolean"),
        }
    }

    pub fn seed(&self) -> u64 {
        self.int("seed") as u64
    }

    /// Comma-separated reals.
    pub fn real_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        split_list(key, self.text(key))
    }

    /// Comma-separated nonnegative integers.
    pub fn count_list(&self, key: &str) -> Result<Vec<u64>, CliError> {
        split_list(key, self.text(key))
    }

    /// `n:value` pairs separated by commas; empty means no table.
    pub fn table(&self, key: &str) -> Result<Option<BTreeMap<u64, f64>>, CliError> {
        let raw = self.text(key).trim();
        if raw.is_empty() {
            return Ok(None);
        }
        raw.split(',')
            .map(|entry| {
                let bad = || CliError::Config(format!("{key}: bad table entry {entry:?}"));
                let (n, v) = entry.split_once(':').ok_or_else(bad)?;
                Ok((
                    n.trim().parse().map_err(|_| bad())?,
                    v.trim().parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()
            .map(Some)
    }
}

fn split_list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{key}: cannot parse list item {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::Config(format!("{key}: empty list")));
    }
    Ok(items)
}
